"""Kernel tests: closed-form anchor points, oracle agreement, parity, decay."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from retvdw.kernels import (
    AccuracyError,
    KERNEL_IDS,
    AccuracyError as _,  # noqa: F401  (re-export sanity)
    closed_magnitude,
    inner_moment,
    kernel_closed,
    kernel_numeric,
    kernel_table_csv,
    _magnitude_recursion,
    _magnitude_taylor,
)
from retvdw.quadrature import QuadratureSpec


def test_closed_anchor_points():
    assert kernel_closed(0, 0.0) == (-4.0, "even")
    k3 = kernel_closed(3, 0.0)
    assert k3.parity == "odd"
    assert abs(k3.magnitude + 6.0 * math.pi) < 1e-14
    assert kernel_closed(0, 1.0).magnitude == pytest.approx(1.0, abs=1e-15)
    assert kernel_closed(1, 1.0).magnitude == pytest.approx(2.0, abs=1e-15)
    assert kernel_closed(2, 1.0).magnitude == pytest.approx(-1.0, abs=1e-15)
    assert kernel_closed(2, 0.0).magnitude == -12.0
    assert kernel_closed(4, 0.0).magnitude == pytest.approx(12.0, abs=1e-13)


def test_closed_rejects_bad_input():
    with pytest.raises(ValueError):
        kernel_closed(0, -0.1)
    with pytest.raises(ValueError):
        kernel_closed(5, 1.0)


def test_inner_moment_anchor_points():
    assert abs(inner_moment(0, math.pi)) < 1e-15
    m1 = inner_moment(1, 1e-4)
    assert m1.real == 0.0
    assert m1.imag == pytest.approx(2e-4 / 3.0, rel=1e-8)
    m2 = inner_moment(2, 1.0)
    assert m2.imag == 0.0
    assert m2.real == pytest.approx(2.0 * (2.0 * math.cos(1.0) - math.sin(1.0)), rel=1e-14)


def test_taylor_recursion_switchover():
    r = np.array([0.5])
    for n in KERNEL_IDS:
        tay = _magnitude_taylor(n, r)[0]
        rec = _magnitude_recursion(n, r)[0]
        assert abs(tay - rec) <= 1e-12 * max(abs(tay), 1e-300)


def test_oracle_matches_closed_spot_grid():
    # The full 40-point acceptance grid lives in test_acceptance; this is a
    # fast slice across the hard (small t) and easy (large t) ends.
    for n in KERNEL_IDS:
        for t in (0.01, 0.3, 1.0, 10.0, 100.0):
            closed = kernel_closed(n, t).magnitude
            numeric = kernel_numeric(n, t).magnitude
            assert abs(closed - numeric) <= 1e-8 * (1.0 + abs(closed)), (n, t)


def test_oracle_parity_flags():
    for n in KERNEL_IDS:
        assert kernel_numeric(n, 1.0).parity == ("odd" if n % 2 else "even")


def test_oracle_rejects_tiny_t():
    with pytest.raises(ValueError):
        kernel_numeric(0, 9e-4)


def test_oracle_budget_failure_raises_accuracy_error():
    starved = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-15, max_subdivisions=2)
    with pytest.raises(AccuracyError) as exc:
        kernel_numeric(4, 0.01, starved)
    assert exc.value.error_estimate > 0.0


def test_decay_bound():
    for n in KERNEL_IDS:
        for t in (10.0, 30.0, 100.0):
            assert abs(kernel_closed(n, t).magnitude) * t * t <= 16.0


def test_csv_dump_shape():
    text = kernel_table_csv([0.5, 1.0, 2.0])
    lines = text.strip().split("\n")
    assert lines[0].startswith("#")
    assert lines[1] == "t,K0,K1,K2,K3,K4"
    assert len(lines) == 5
    row = lines[3].split(",")
    assert float(row[0]) == 1.0
    assert float(row[1]) == pytest.approx(1.0)
    assert float(row[3]) == pytest.approx(-1.0)


def test_csv_numeric_source_agrees():
    closed = kernel_table_csv([1.0])
    numeric = kernel_table_csv([1.0], numeric=True)
    c_row = [float(x) for x in closed.strip().split("\n")[-1].split(",")]
    n_row = [float(x) for x in numeric.strip().split("\n")[-1].split(",")]
    assert np.allclose(c_row, n_row, atol=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=4), st.floats(min_value=0.0, max_value=50.0))
def test_inner_moment_parity_and_bound(n, r):
    m = inner_moment(n, r)
    if n % 2 == 0:
        assert m.imag == 0.0
        mag = m.real
    else:
        assert m.real == 0.0
        mag = m.imag
    # |int X^n e^{irX}| <= int |X|^n = 2/(n+1), with float slack.
    assert abs(mag) <= 2.0 / (n + 1) + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=1e-3, max_value=0.499))
def test_taylor_region_consistency(r):
    # Inside the Taylor region the recursion is still mathematically exact;
    # it only loses digits. Demand loose agreement as a cross-check.
    arr = np.array([r])
    for n in KERNEL_IDS:
        tay = _magnitude_taylor(n, arr)[0]
        rec = _magnitude_recursion(n, arr)[0]
        # Cancellation in the recursion grows like r^{-n}; allow for it.
        assert abs(tay - rec) <= 1e-10 * (1.0 + r ** -float(n))
