"""Radial solver: eigenpair accuracy, moments, the resolvent element."""

import math

import numpy as np
import pytest

from retvdw.atom import (
    DEFAULT_GRID,
    AtomSolution,
    RadialGrid,
    dalgarno_lewis,
    dalgarno_lewis_spectral,
    dipole_moments,
    kinetic_energy,
    moment_r2,
    smeared_coulomb,
    solution_csv,
    solution_summary,
    solve_ground,
)

LAMBDA_BOHR = 137.036


@pytest.fixture(scope="module")
def coulomb():
    return solve_ground(DEFAULT_GRID)


@pytest.fixture(scope="module")
def smeared():
    return solve_ground(DEFAULT_GRID, LAMBDA_BOHR)


def richardson(e_coarse: float, e_fine: float) -> float:
    # Second-order stencil: halving h divides the error by 4.
    return (4.0 * e_fine - e_coarse) / 3.0


# --- potential ---------------------------------------------------------------

def test_smeared_coulomb_limits():
    assert smeared_coulomb(2.0, math.inf) == 0.5
    assert smeared_coulomb(2.0, 1e9) == pytest.approx(0.5, rel=1e-8)
    # (2/pi) Si(1), from Si(1) = 0.9460830703671830
    assert smeared_coulomb(1.0, 1.0) == pytest.approx(0.6022951888, abs=1e-9)


def test_smeared_coulomb_accepts_arrays():
    r = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(smeared_coulomb(r, math.inf), 1.0 / r)
    out = smeared_coulomb(r, 5.0)
    assert out.shape == r.shape
    assert np.all(out > 0)


def test_smeared_coulomb_rejects_bad_input():
    with pytest.raises(ValueError):
        smeared_coulomb(0.0, 1.0)
    with pytest.raises(ValueError):
        smeared_coulomb(-1.0, math.inf)
    with pytest.raises(ValueError):
        smeared_coulomb(1.0, 0.0)


def test_gibbs_overshoot_is_real():
    # The sharp cutoff is NOT below 1/r pointwise: Si peaks above pi/2 at
    # Lambda*r = pi, so monotonicity arguments must go through energies.
    r_peak = math.pi / LAMBDA_BOHR
    assert smeared_coulomb(r_peak, LAMBDA_BOHR) > 1.0 / r_peak


# --- grid and solution types ---------------------------------------------------

def test_radial_grid_validation():
    with pytest.raises(ValueError):
        RadialGrid(r_max=20.0)
    with pytest.raises(ValueError):
        RadialGrid(n=1000)
    with pytest.raises(ValueError):
        RadialGrid(spacing="cubic")
    with pytest.raises(ValueError):
        RadialGrid(spacing="log").h


def test_grid_nodes_are_interior_and_increasing():
    for grid in (RadialGrid(40.0, 2000), RadialGrid(40.0, 2000, "log")):
        r = grid.r
        assert r[0] > 0.0
        assert r[-1] <= grid.r_max
        assert np.all(np.diff(r) > 0)


def test_solution_validates_normalization_and_sign(coulomb):
    with pytest.raises(ValueError):
        AtomSolution(coulomb.energy, 2.0 * coulomb.u, coulomb.grid, math.inf)
    with pytest.raises(ValueError):
        AtomSolution(coulomb.energy, -coulomb.u, coulomb.grid, math.inf)


# --- ground state ---------------------------------------------------------------

def test_coulomb_ground_energy(coulomb):
    assert abs(coulomb.energy + 0.5) < 1e-6


def test_ground_state_is_nonnegative_and_normalized(coulomb):
    assert float(np.min(coulomb.u)) >= 0.0
    y = np.concatenate(([0.0], coulomb.u ** 2, [0.0]))
    x = np.concatenate(([0.0], coulomb.grid.r, [coulomb.grid.r_max]))
    assert np.trapezoid(y, x) == pytest.approx(1.0, abs=1e-10)


def test_ground_state_matches_exact_shape(coulomb):
    exact = 2.0 * coulomb.grid.r * np.exp(-coulomb.grid.r)
    assert np.max(np.abs(coulomb.u - exact)) < 1e-4


def test_convergence_order_is_two():
    errors = []
    for n in (2000, 4000, 8000):
        grid = RadialGrid(40.0, n)
        errors.append((grid.h, abs(solve_ground(grid).energy + 0.5)))
    for (h1, e1), (h2, e2) in zip(errors, errors[1:]):
        order = math.log(e1 / e2) / math.log(h1 / h2)
        assert 1.8 <= order <= 2.2


def test_virial_theorem(coulomb):
    assert abs(kinetic_energy(coulomb) + coulomb.energy) < 1e-4


def test_solve_ground_requires_uniform_grid():
    with pytest.raises(ValueError):
        solve_ground(RadialGrid(40.0, 2000, "log"))


# --- smeared solve ---------------------------------------------------------------

def test_smearing_raises_the_energy(coulomb, smeared):
    # The physical shift (+7e-7) is below the h^2 bias at one resolution,
    # so compare Richardson-extrapolated energies, which is also how the
    # 0 < eps < 1e-3 statement is meant.
    fine = RadialGrid(40.0, 32000)
    e_coul = richardson(coulomb.energy, solve_ground(fine).energy)
    e_smear = richardson(smeared.energy, solve_ground(fine, LAMBDA_BOHR).energy)
    eps = e_smear + 0.5
    assert e_smear > e_coul
    assert 0.0 < eps < 1e-3
    assert abs(e_coul + 0.5) < 1e-9


def test_smeared_r2_stays_close(smeared):
    assert abs(moment_r2(smeared) - 3.0) < 0.01


# --- moments ---------------------------------------------------------------------

def test_r2_moment_coulomb(coulomb):
    assert abs(moment_r2(coulomb) - 3.0) < 1e-5


def test_r2_moment_dilation_scaling():
    grid = RadialGrid(120.0, 12000)
    r = grid.r

    def normalized(scale):
        u = r * np.exp(-r / scale)
        return u / math.sqrt(grid.h * float(np.dot(u, u)))

    base = AtomSolution(-0.5, normalized(1.0), grid, math.inf)
    dilated = AtomSolution(-0.125, normalized(2.0), grid, math.inf)
    assert moment_r2(dilated) / moment_r2(base) == pytest.approx(4.0, rel=1e-9)


# --- Dalgarno-Lewis ----------------------------------------------------------------

def test_resolvent_element_coulomb(coulomb):
    assert abs(dalgarno_lewis(coulomb) - 2.25) < 1e-4


def test_resolvent_element_grid_converged(coulomb):
    fine = solve_ground(RadialGrid(40.0, 32000))
    assert abs(dalgarno_lewis(coulomb) - dalgarno_lewis(fine)) < 1e-5


def test_resolvent_matches_spectral_sum(coulomb):
    direct = dalgarno_lewis(coulomb)
    spectral = dalgarno_lewis_spectral(coulomb, n_states=200)
    assert abs(direct - spectral) < 1e-4


def test_spectral_sum_validates_input(coulomb):
    with pytest.raises(ValueError):
        dalgarno_lewis_spectral(coulomb, n_states=0)


# --- dipole moments ----------------------------------------------------------------

def test_dipole_moments_both_conventions(coulomb):
    alpha = 7.2973525693e-3
    paper = dipole_moments(coulomb, alpha)
    assert paper.convention == "paper-factor-2"
    assert paper.alpha_E == pytest.approx(4.5, abs=1e-4)
    assert paper.alpha_M == pytest.approx(-alpha ** 2 / 4, rel=1e-4)
    bare = dipole_moments(coulomb, alpha, convention="no-factor-2")
    assert bare.alpha_E == pytest.approx(2.25, abs=5e-5)
    assert bare.alpha_M == paper.alpha_M


def test_dipole_moments_zero_coupling(coulomb):
    assert dipole_moments(coulomb, 0.0).alpha_M == 0.0


# --- output -----------------------------------------------------------------------

def test_solution_csv_shape(coulomb):
    lines = solution_csv(coulomb).strip().split("\n")
    assert lines[0] == "r,u"
    assert lines[1] == "0,0"
    assert lines[-1].endswith(",0")
    assert len(lines) == coulomb.grid.n + 3
    r, u = lines[2].split(",")
    assert float(r) == coulomb.grid.r[0]
    assert float(u) == coulomb.u[0]


def test_solution_summary_keys(coulomb):
    summary = solution_summary(coulomb)
    assert summary["cutoff_inverse_bohr"] == "inf"
    assert summary["grid"]["n"] == coulomb.grid.n
    assert summary["r2_moment"] == pytest.approx(3.0, abs=1e-5)
    assert summary["resolvent_element"] == pytest.approx(2.25, abs=1e-4)
