"""Dispersion-integral assembly: S values, kappa coefficients, curves.

Normalization contract: the reduction tables carry the 2pi-inclusive
bracket convention while the kernels module returns table-normalized
K_n (one factor 2pi divided out per kernel).  The factor 4pi^2 therefore
reappears in exactly one place, compute_S, and nowhere else.

Sign contract: odd-index kernels are imaginary; a product of two of them
contributes i^2.  The tables store real coefficients, so compute_S applies
sigma_ab = -1 for odd-odd index pairs and +1 otherwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .exact_algebra import MomentPairTable, Rational
from .kernels import AccuracyError, closed_magnitude
from .quadrature import QuadratureSpec, integrate_half_line

# Fine-structure constant, CODATA 2018.  A configuration default, not a
# derived quantity; override through UnitSystem for other unit choices.
FINE_STRUCTURE_ALPHA = 7.2973525693e-3

# Strength coefficients of the dimensionless kappa.  The electric-electric
# one is shared verbatim between the two schemes (and the Casimir-Polder
# limit); the others differ per scheme.
EE_COEFF = Fraction(23, 16)
EM_COEFF = Fraction(26)
MM_COEFF = Fraction(64)
FS_EM_COEFF = Fraction(7, 8)

SCHEMES = ("this-paper", "feinberg-sucher-boyer")
CONVENTIONS = ("paper-factor-2", "no-factor-2")


@dataclass(frozen=True)
class PiRational:
    """Exact rational multiple of an integer power of pi.

    Multiplication is closed; addition requires matching pi powers (the
    class does not model sums of different powers).  Zero normalizes its
    power to 0 so equality behaves.
    """

    coeff: Rational
    pi_power: int

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if not isinstance(self.pi_power, int):
            raise TypeError("pi_power must be an integer")
        if self.coeff == 0:
            object.__setattr__(self, "pi_power", 0)

    def __mul__(self, other: Union["PiRational", Rational, int]) -> "PiRational":
        if isinstance(other, PiRational):
            return PiRational(self.coeff * other.coeff, self.pi_power + other.pi_power)
        return PiRational(self.coeff * Fraction(other), self.pi_power)

    __rmul__ = __mul__

    def __add__(self, other: "PiRational") -> "PiRational":
        if not isinstance(other, PiRational):
            return NotImplemented
        if self.coeff == 0:
            return other
        if other.coeff == 0:
            return self
        if self.pi_power != other.pi_power:
            raise ValueError(
                f"cannot add pi^{self.pi_power} to pi^{other.pi_power} exactly"
            )
        return PiRational(self.coeff + other.coeff, self.pi_power)

    def __float__(self) -> float:
        return float(self.coeff) * math.pi ** self.pi_power

    def __str__(self) -> str:
        if self.coeff == 0:
            return "0"
        if self.pi_power == 0:
            return str(self.coeff)
        pi = "pi" if self.pi_power == 1 else f"pi^{self.pi_power}"
        return f"{self.coeff} * {pi}"


@dataclass(frozen=True)
class DipoleMoments:
    """Dimensionless electric and magnetic dipole moments.

    alpha_M is diamagnetic (non-positive) for any atom-derived value; the
    type does not enforce that so scheme-comparison arithmetic can probe
    arbitrary points, but the atom module asserts it for its outputs.
    """

    alpha_E: float
    alpha_M: float
    convention: str = "paper-factor-2"

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")


@dataclass(frozen=True)
class KappaBreakdown:
    ee: float
    em: float
    mm: float
    total: float
    scheme: str


def _breakdown(ee: float, em: float, mm: float, scheme: str) -> KappaBreakdown:
    # total must share the floating path ee + em + mm exactly; construct
    # every breakdown through here.
    return KappaBreakdown(ee=ee, em=em, mm=mm, total=ee + em + mm, scheme=scheme)


@dataclass(frozen=True)
class UnitSystem:
    """Unit choices for restoring dimensions in the potential curve.

    Defaults: lengths in Bohr radii and energies in hartree, so the
    Compton length is alpha_fs and mc^2 = 1/alpha_fs^2.  cutoff_ratio is
    the dimensionless lambda_c * Lambda.
    """

    alpha_fs: float = FINE_STRUCTURE_ALPHA
    electron_mass_energy: float = 1.0 / FINE_STRUCTURE_ALPHA ** 2
    bohr_radius: float = 1.0
    compton_length: float = FINE_STRUCTURE_ALPHA
    cutoff_ratio: float = 1.0

    def __post_init__(self):
        for name in (
            "alpha_fs",
            "electron_mass_energy",
            "bohr_radius",
            "compton_length",
            "cutoff_ratio",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        # r_B = lambda_c / alpha_fs ties the two length entries together.
        expected = self.compton_length / self.alpha_fs
        if abs(self.bohr_radius - expected) > 1e-12 * expected:
            raise ValueError(
                "inconsistent lengths: bohr_radius must equal "
                "compton_length / alpha_fs"
            )

    @property
    def cutoff_inverse_bohr(self) -> float:
        """The cutoff Lambda expressed in inverse Bohr radii."""
        return self.cutoff_ratio / self.alpha_fs


# --- S integrals -------------------------------------------------------------

def compute_S(table: MomentPairTable, spec: QuadratureSpec) -> float:
    """4pi^2 * integral of the kernel-pair sum encoded by the table."""
    if table.max_exponent() > 4:
        raise ValueError("table holds moments beyond X^4; no kernel available")
    entries = [
        (a, b, -float(c) if (a % 2 and b % 2) else float(c))
        for (a, b), c in table.items()
    ]
    orders = sorted({n for (a, b), _ in table.items() for n in (a, b)})

    def integrand(t: np.ndarray) -> np.ndarray:
        mags = {n: closed_magnitude(n, t) for n in orders}
        acc = np.zeros_like(np.asarray(t))
        for a, b, c in entries:
            acc = acc + c * mags[a] * mags[b]
        return acc

    res = integrate_half_line(integrand, spec)
    if not res.converged:
        raise AccuracyError(
            f"S integral stalled at error {res.error_estimate:.3e}",
            res.error_estimate,
        )
    return 4.0 * math.pi ** 2 * res.value


# --- polarization sums -------------------------------------------------------

def _dreibein(khat: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Two unit polarization vectors completing khat to an orthonormal triad."""
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(khat)))] = 1.0
    e1 = np.cross(seed, khat)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(khat, e1)
    return e1, e2


def polarization_sum_check(
    khat1: Sequence[float], khat2: Sequence[float]
) -> Tuple[float, float]:
    """Polarization sums from explicit dreibeins.

    Returns (sum over both polarization pairs of (e1.e2)^2, sum over the
    first direction's polarizations of (e1.khat2)^2); these must come out
    as 1 + (khat1.khat2)^2 and 1 - (khat1.khat2)^2.
    """
    k1 = np.asarray(khat1, dtype=float)
    k2 = np.asarray(khat2, dtype=float)
    for k in (k1, k2):
        if k.shape != (3,) or abs(np.linalg.norm(k) - 1.0) > 1e-12:
            raise ValueError("directions must be unit 3-vectors (1e-12)")
    eps1 = _dreibein(k1)
    eps2 = _dreibein(k2)
    pair_sum = sum(float(np.dot(a, b)) ** 2 for a in eps1 for b in eps2)
    cross_sum = sum(float(np.dot(a, k2)) ** 2 for a in eps1)
    return pair_sum, cross_sum


# --- kappa assembly ----------------------------------------------------------

def kappa_from_S(S1: PiRational, S2: PiRational, S3: PiRational) -> Tuple[
    PiRational, PiRational, PiRational
]:
    """Exact (c_EE, c_EM, c_MM) from the three S values.

    Carries the overall 1/2 of the second-order energy and the channel
    multiplicities 1/2, 4, 8; the (2pi)^-6 absorbs one (2pi)^-2 per
    propagator line.
    """
    inv_2pi_6 = PiRational(Fraction(1, 64), -6)
    half = Fraction(1, 2)
    c_ee = S1 * inv_2pi_6 * (half * half)
    c_em = S2 * inv_2pi_6 * (half * 4)
    c_mm = S3 * inv_2pi_6 * (half * 8)
    return c_ee, c_em, c_mm


def kappa_dimensionless(m: DipoleMoments) -> KappaBreakdown:
    """Dimensionless strength kappa split by moment channel."""
    pref = 4.0 / math.pi
    ee = pref * float(EE_COEFF) * m.alpha_E ** 2
    em = pref * float(EM_COEFF) * m.alpha_E * m.alpha_M
    mm = pref * float(MM_COEFF) * m.alpha_M ** 2
    return _breakdown(ee, em, mm, "this-paper")


def feinberg_sucher_kappa(m: DipoleMoments) -> KappaBreakdown:
    """The earlier scheme's strength; same EE coefficient, weaker cross
    and magnetic terms."""
    pref = 4.0 / math.pi
    ee = pref * float(EE_COEFF) * m.alpha_E ** 2
    em = pref * float(FS_EM_COEFF) * m.alpha_E * m.alpha_M
    mm = pref * float(EE_COEFF) * m.alpha_M ** 2
    return _breakdown(ee, em, mm, "feinberg-sucher-boyer")


def casimir_polder_limit(alpha_E_at: float) -> float:
    """Potential prefactor in the electric-only limit, in the atomic
    polarizability normalization (alpha_E_at = 4pi * alpha_E-tilde)."""
    pref = (4.0 / math.pi) * float(EE_COEFF)
    return -pref * (0.5 / math.pi) ** 2 * (alpha_E_at / 2.0) ** 2


# --- curves ------------------------------------------------------------------

class PotentialCurve(NamedTuple):
    R_over_rB: np.ndarray
    delta_E: np.ndarray


def potential_curve(
    R_min: float,
    R_max: float,
    n_points: int,
    kappa: float,
    units: UnitSystem,
) -> PotentialCurve:
    """Energy shift -kappa * alpha * mc^2 * (R/r_B)^-7 on a log-spaced grid.

    R_min and R_max are in Bohr radii; delta_E comes out in the unit
    system's energy unit.
    """
    if not (0.0 < R_min < R_max):
        raise ValueError("need 0 < R_min < R_max")
    if n_points < 2:
        raise ValueError("need at least two grid points")
    R = np.geomspace(R_min, R_max, n_points)
    delta_E = -kappa * units.alpha_fs * units.electron_mass_energy * R ** -7.0
    return PotentialCurve(R_over_rB=R, delta_E=delta_E)


# --- serialization -----------------------------------------------------------

def json_text(obj, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits (full float64 round trip).

    The stdlib encoder prints shortest-roundtrip floats; output files are
    contracts here, so the digit count is pinned instead.
    """
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [
            f"{inner}{json.dumps(str(k))}: {json_text(v, indent + 2)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{inner}{json_text(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def kappa_report(
    m: DipoleMoments,
    breakdown: KappaBreakdown,
    units: Optional[UnitSystem] = None,
    moments_detail: Optional[Dict] = None,
) -> Dict:
    """Report dict for the kappa JSON output."""
    if breakdown.scheme == "this-paper":
        coeffs = (EE_COEFF, EM_COEFF, MM_COEFF)
    else:
        coeffs = (EE_COEFF, FS_EM_COEFF, EE_COEFF)
    report: Dict = {
        "scheme": breakdown.scheme,
        "convention": m.convention,
        "alpha_E": m.alpha_E,
        "alpha_M": m.alpha_M,
        "kappa": {
            "ee": breakdown.ee,
            "em": breakdown.em,
            "mm": breakdown.mm,
            "total": breakdown.total,
        },
        "exact_coefficients": {
            "ee": f"4/pi * {coeffs[0]}",
            "em": f"4/pi * {coeffs[1]}",
            "mm": f"4/pi * {coeffs[2]}",
        },
    }
    if units is not None:
        report["units"] = {
            "alpha_fs": units.alpha_fs,
            "electron_mass_energy": units.electron_mass_energy,
            "bohr_radius": units.bohr_radius,
            "compton_length": units.compton_length,
            "cutoff_ratio": units.cutoff_ratio,
            "cutoff_inverse_bohr": units.cutoff_inverse_bohr,
        }
    if moments_detail is not None:
        report["moments"] = moments_detail
    return report


def curve_csv(curve: PotentialCurve) -> str:
    lines = ["R_over_rB,delta_E"]
    for r, e in zip(curve.R_over_rB, curve.delta_E):
        lines.append("%.17g,%.17g" % (r, e))
    return "\n".join(lines) + "\n"


def curve_metadata(
    kappa: float, scheme: str, convention: str, units: UnitSystem
) -> Dict:
    return {
        "kappa": kappa,
        "scheme": scheme,
        "convention": convention,
        "units": {
            "alpha_fs": units.alpha_fs,
            "electron_mass_energy": units.electron_mass_energy,
            "bohr_radius": units.bohr_radius,
            "compton_length": units.compton_length,
            "cutoff_ratio": units.cutoff_ratio,
        },
    }
