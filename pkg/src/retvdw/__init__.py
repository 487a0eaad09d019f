"""Retarded van der Waals (Casimir-Polder) interaction strength.

The -R^{-7} tail of the interaction of two neutral atoms is controlled by a
dimensionless strength kappa built from three dispersion integrals (S1, S2,
S3) and the atom's electric and magnetic dipole moments.  This package
computes all of those pieces:

* ``exact_algebra``  - exact rational reduction of the angular integrals to
  moment-pair coefficient tables,
* ``quadrature``     - deterministic adaptive Gauss-Kronrod integration on
  the half line,
* ``kernels``        - the closed-form moment kernels K_n(t) plus an
  independent numerical oracle,
* ``dispersion``     - S-value evaluation, kappa assembly, scheme and
  convention comparisons, potential curves,
* ``atom``           - hydrogen radial solver supplying the dipole moments,
* ``operator_lab``   - matrix-level validation of the ground-state operator
  identities on a harmonic-oscillator surrogate,
* ``cli``            - command line front end (``retvdw``).
"""

__version__ = "0.1.0"
