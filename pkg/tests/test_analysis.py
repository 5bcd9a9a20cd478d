from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import cable_matrix_float
from rtcable.analysis import (
    admissibility,
    fit_growth,
    full_inverse,
    growth_record,
    norm_growth_sweep,
    numeric_det,
    operator_norm,
    sandwich_check,
    trend_slope,
    tv_cable_of_solid_torus,
)
from rtcable.cabling import build_Rm, factor_matrices, inverse_factors
from rtcable.errors import ConvergenceError, PreconditionError
from rtcable.params import CableParams

P2313 = CableParams.of(2, 3, 13)


def _diag(monos, params):
    z = params.sys.zeta_powers
    return np.diag([d.sign * z[d.exp] for d in monos])


# -- determinants ---------------------------------------------------------------


def test_numeric_det_examples():
    assert numeric_det(np.eye(5)) == pytest.approx(1.0)
    assert abs(abs(numeric_det(build_Rm(P2313).to_complex())) - 1) < 1e-9
    assert abs(numeric_det(build_Rm(CableParams.of(2, 3, 9)).to_complex())) < 1e-9
    with pytest.raises(ValueError):
        numeric_det(np.ones((2, 3)))


# -- operator norm ----------------------------------------------------------------


def test_operator_norm_examples():
    assert operator_norm(np.eye(4)) == pytest.approx(1.0)
    f = factor_matrices(P2313)
    assert abs(operator_norm(_diag(f.D1, P2313)) - 1) < 1e-10
    assert abs(operator_norm(_diag(f.D2, P2313)) - 1) < 1e-10
    assert operator_norm(np.zeros((3, 3))) == 0.0
    with pytest.raises(ValueError):
        operator_norm(np.ones(3))


@pytest.mark.parametrize("m", [5, 20, 80, 200])
def test_parity_factor_norms(m):
    params = CableParams.of(1, 1, 2 * m + 1)
    u = factor_matrices(params).U.astype(float)
    _, u_inv, _ = inverse_factors(params)
    assert 1.0 <= operator_norm(u) <= m
    assert operator_norm(u_inv.astype(float)) <= 3.0


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_operator_norm_matches_svd(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    want = np.linalg.svd(a, compute_uv=False)[0]
    assert operator_norm(a) == pytest.approx(want, rel=1e-8)


def test_operator_norm_near_degenerate_top():
    rng = np.random.default_rng(1)
    q1, _ = np.linalg.qr(rng.standard_normal((60, 60)))
    q2, _ = np.linalg.qr(rng.standard_normal((60, 60)))
    s = np.linspace(1.0, 2.0, 60)
    s[-2] = 2.0 - 1e-4
    a = q1 @ np.diag(s) @ q2
    assert operator_norm(a) == pytest.approx(2.0, rel=1e-9)
    with pytest.raises(ConvergenceError):
        operator_norm(a, max_iter=50, squarings=0)


# -- inverse ----------------------------------------------------------------------


@pytest.mark.parametrize("pqr", [(2, 3, 13), (3, 2, 11), (-3, 8, 101)])
def test_full_inverse_residual(pqr):
    params = CableParams.of(*pqr)
    x = full_inverse(params)
    rt = cable_matrix_float(*pqr)
    assert np.max(np.abs(rt @ x - np.eye(params.m))) < 1e-8


@pytest.mark.parametrize("pqr", [(2, 3, 9), (1, 3, 21), (1, 4, 9)])
def test_full_inverse_refuses_outside_regime(pqr):
    with pytest.raises(PreconditionError):
        full_inverse(CableParams.of(*pqr))


# -- TV values --------------------------------------------------------------------


@given(st.sampled_from([(1, 1), (2, 3), (3, 2), (-1, 4), (5, 7)]), st.integers(4, 100))
def test_tv_of_cable_of_solid_torus_is_one(pq, k):
    params = CableParams.of(*pq, 2 * k + 1)
    assert abs(tv_cable_of_solid_torus(params) - 1.0) < 1e-9


def test_colored_tv_example():
    assert tv_cable_of_solid_torus(P2313, color=2) == pytest.approx(2.0, abs=1e-9)


def test_admissibility():
    assert admissibility(3, 2, 9) == "ok"
    assert admissibility(3, 2, 7) == "skipped-small-r"
    assert admissibility(2, 3, 21) == "skipped-gcd"
    with pytest.raises(PreconditionError):
        admissibility(3, 2, 10)


# -- growth fits --------------------------------------------------------------------


def test_fit_recovers_power_law():
    rs = np.arange(11, 202, 2)
    fit = fit_growth(rs, 3.0 * rs**2.5)
    assert fit.slope == pytest.approx(2.5)
    assert fit.intercept == pytest.approx(math.log(3.0))
    assert fit.residual < 1e-10
    assert fit.r_range[1] == 201 and fit.r_range[0] > 11


def test_fit_needs_points():
    with pytest.raises(ValueError):
        fit_growth([11, 13], [1.0, 2.0])


def test_trend_slope():
    assert trend_slope([1, 2, 3], [5, 3, 1]) == pytest.approx(-2.0)


def test_sweep_records_every_r():
    records, fit = norm_growth_sweep(3, 2, range(3, 62, 2))
    assert [rec.r for rec in records] == list(range(3, 62, 2))
    statuses = {rec.r: rec.status for rec in records}
    assert statuses[3] == statuses[7] == "skipped-small-r"
    assert statuses[9] == "ok"
    ok = [rec for rec in records if rec.status == "ok"]
    assert all(abs(rec.det_modulus - 1) < 1e-9 for rec in ok)
    assert all(rec.tv_cable == pytest.approx(1.0) for rec in ok)
    assert math.isfinite(fit.slope)


def test_sweep_without_admissible_r_cannot_fit():
    with pytest.raises(ValueError):
        norm_growth_sweep(1, 3, [3, 5, 7, 9, 15, 21])


def test_growth_record_gcd_skip():
    rec = growth_record(2, 3, 27)
    assert rec.status == "skipped-gcd" and rec.inv_norm is None


# -- sandwich ---------------------------------------------------------------------


def test_sandwich_basis_vectors():
    rep = sandwich_check(2, 3, range(11, 62, 2), seed=0)
    assert rep.within_certified
    assert np.allclose(rep.ratios["e1"], 1.0)
    assert np.allclose(rep.ratios["e2"], 2.0)
    assert rep.skipped[15] == "skipped-gcd"


def test_sandwich_random_vectors_bounded():
    rep = sandwich_check(3, 2, range(9, 202, 2), n_random=4, seed=11)
    assert rep.bounded
    assert rep.n_exponent <= 3
    again = sandwich_check(3, 2, range(9, 202, 2), n_random=4, seed=11)
    assert again.ratios == rep.ratios


def test_sandwich_declared_exponent_flags_growth():
    rep = sandwich_check(3, 2, range(9, 202, 2), n_random=2, seed=0, n_declared=0)
    assert rep.unbounded  # random vectors grow roughly like r
