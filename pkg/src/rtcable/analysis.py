"""Numeric side: determinants, inverses, operator norms and growth sweeps.

Turaev-Viro values of a cable of the solid torus are squared Hermitian norms
of operator images, with e_1..e_m taken as orthonormal and no global
normalisation applied; only ratios and growth rates are ever compared.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from rtcable.cabling import build_Rm, inverse_factors, morton_column, rt_matrix_e_basis
from rtcable.errors import ConvergenceError, PreconditionError
from rtcable.params import CableParams

logger = logging.getLogger(__name__)

__all__ = [
    "GrowthFit",
    "NormGrowthRecord",
    "SandwichReport",
    "admissibility",
    "fit_growth",
    "full_inverse",
    "norm_growth_sweep",
    "numeric_det",
    "operator_norm",
    "sandwich_check",
    "trend_slope",
    "tv_cable_of_solid_torus",
]

RESIDUAL_TOL = 1e-8


def numeric_det(mat: np.ndarray) -> complex:
    """Determinant by LU with partial pivoting (LAPACK via numpy)."""
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    return complex(np.linalg.det(mat))


def operator_norm(mat: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000, squarings: int = 8) -> float:
    """Largest singular value by power iteration on the Gram matrix.

    The iteration runs on G^(2^squarings), G = mat^H mat, which raises the
    ratio between the top two eigenvalues to the same power; near-degenerate
    tops (common for the inverse operators) would otherwise need far more
    than ``max_iter`` steps.  It starts from the normalised all-ones vector
    and stops once the Rayleigh quotient of G changes by less than ``tol``
    relative to its value.
    """
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    n = mat.shape[0]
    if n == 0:
        return 0.0
    gram = mat.conj().T @ mat
    step = gram
    for _ in range(squarings):
        scale = np.max(np.abs(step))
        if scale == 0.0:
            return 0.0
        step = step / scale
        step = step @ step
    v = np.ones(n, dtype=gram.dtype) / math.sqrt(n)
    lam = float(np.real(np.vdot(v, gram @ v)))
    for it in range(max_iter):
        w = step @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        new = float(np.real(np.vdot(v, gram @ v)))
        if abs(new - lam) <= tol * abs(new):
            logger.debug("power iteration converged after %d steps", it + 1)
            return math.sqrt(max(new, 0.0))
        lam = new
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations")


def _require_invertible_regime(params: CableParams) -> None:
    if params.level_gcd != 1:
        raise PreconditionError(f"operator is singular: gcd(r, q) = {params.level_gcd} for {params}")
    if not params.large_level:
        raise PreconditionError(f"need r > q + 6, got {params}")


def full_inverse(params: CableParams) -> np.ndarray:
    """Inverse of the e-basis operator as D2^-1 U^-1 D1^-1 R_m^-1.

    The three outer factors are the explicit inverses; only R_m is inverted
    numerically.  Raises ArithmeticError if the residual ||RT X - I||_max
    exceeds 1e-8.
    """
    _require_invertible_regime(params)
    sys = params.sys
    d2_inv, u_inv, d1_inv = inverse_factors(params)
    z = sys.zeta_powers
    d2 = np.array([d.sign * z[d.exp] for d in d2_inv])
    d1 = np.array([d.sign * z[d.exp] for d in d1_inv])
    rm_inv = np.linalg.inv(build_Rm(params).to_complex())
    x = (d2[:, None] * u_inv) @ (d1[:, None] * rm_inv)
    rt = rt_matrix_e_basis(params).to_complex()
    resid = float(np.max(np.abs(rt @ x - np.eye(params.m))))
    if not resid < RESIDUAL_TOL:
        raise ArithmeticError(f"inverse residual {resid:.3e} exceeds {RESIDUAL_TOL} for {params}")
    return x


def tv_cable_of_solid_torus(params: CableParams, color: int = 1) -> float:
    """Squared norm of the operator image of e_color.

    With color 1 this is the Turaev-Viro value of the cable of the solid
    torus; larger colours give the coloured variant.
    """
    return morton_column(color, params).norm_sq(params.sys)


def admissibility(p: int, q: int, r: int) -> str:
    """'ok', 'skipped-gcd' or 'skipped-small-r' for an odd level r."""
    if r % 2 == 0 or r < 3:
        raise PreconditionError(f"r must be an odd integer >= 3, got {r}")
    if r <= q + 6:
        return "skipped-small-r"
    if gcd(r, q) != 1:
        return "skipped-gcd"
    return "ok"


@dataclass
class NormGrowthRecord:
    p: int
    q: int
    r: int
    m: int
    status: str
    det_modulus: float | None = None
    inv_norm: float | None = None
    rt_norm: float | None = None
    tv_cable: float | None = None


@dataclass
class GrowthFit:
    slope: float
    intercept: float
    residual: float
    r_range: tuple[int, int]
    npoints: int


def fit_growth(rs: Sequence[float], values: Sequence[float], min_points: int = 5) -> GrowthFit:
    """Least-squares line through (log r, log value) on the top two thirds of
    the r-range; ``residual`` is the RMS deviation of the fit."""
    rs = np.asarray(rs, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(rs) < min_points:
        raise ValueError(f"need at least {min_points} points to fit, got {len(rs)}")
    cut = rs.min() + (rs.max() - rs.min()) / 3.0
    sel = rs >= cut
    if sel.sum() < min_points:
        sel = np.zeros(len(rs), dtype=bool)
        sel[np.argsort(rs)[-min_points:]] = True
    x, y = np.log(rs[sel]), np.log(values[sel])
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    rms = math.sqrt(float(res[0]) / len(x)) if len(res) else 0.0
    return GrowthFit(float(slope), float(intercept), rms, (int(rs[sel].min()), int(rs[sel].max())), int(sel.sum()))


def trend_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Ordinary least-squares slope of ys against xs."""
    return float(np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 1)[0])


def growth_record(p: int, q: int, r: int, norms: bool = True, color: int = 1) -> NormGrowthRecord:
    status = admissibility(p, q, r)
    rec = NormGrowthRecord(p, q, r, (r - 1) // 2, status)
    if status != "ok":
        return rec
    params = CableParams.of(p, q, r)
    try:
        rec.det_modulus = abs(numeric_det(build_Rm(params).to_complex()))
        rec.tv_cable = tv_cable_of_solid_torus(params, color)
        if norms:
            rec.inv_norm = operator_norm(full_inverse(params))
            rec.rt_norm = operator_norm(rt_matrix_e_basis(params).to_complex())
    except (ArithmeticError, ConvergenceError) as exc:
        logger.warning("r=%d failed: %s", r, exc)
        rec.status = "failed"
    return rec


def norm_growth_sweep(p: int, q: int, r_list: Iterable[int]) -> tuple[list[NormGrowthRecord], GrowthFit]:
    """Per-r records and a log-log fit of the inverse operator norm.

    Every r gets a record; inadmissible ones carry a skipped status.  Raises
    ValueError if fewer than five admissible records are available to fit.
    """
    records = [growth_record(p, q, r) for r in sorted(set(r_list))]
    ok = [rec for rec in records if rec.status == "ok"]
    fit = fit_growth([rec.r for rec in ok], [rec.inv_norm for rec in ok])
    return records, fit


@dataclass
class SandwichReport:
    p: int
    q: int
    rs: list[int]
    labels: list[str]
    ratios: dict[str, list[float]]
    lower_certified: list[float]
    upper_certified: list[float]
    slopes: dict[str, float]
    n_exponent: int
    constant: float
    within_certified: bool
    unbounded: list[str] = field(default_factory=list)
    skipped: dict[int, str] = field(default_factory=dict)

    @property
    def bounded(self) -> bool:
        return not self.unbounded and self.within_certified


def sandwich_check(
    p: int,
    q: int,
    r_list: Iterable[int],
    colors: Sequence[int] = (1, 2, 3),
    n_random: int = 3,
    seed: int = 0,
    n_declared: int | None = None,
) -> SandwichReport:
    """Norm-ratio sandwich ||RT v||^2 / ||v||^2 for stand-in boundary vectors.

    The vectors are the basis vectors e_c for c in ``colors`` and ``n_random``
    Gaussian unit vectors drawn per r from a generator seeded by (seed, r).
    For each vector the log-log slope of its ratio sequence is fitted; the
    exponent N is ``n_declared`` or else the smallest integer at least the
    largest |slope|, and C is the smallest constant with
    r^-N / C <= ratio <= C r^N on the sweep.  A vector is flagged unbounded
    when |slope| exceeds N by more than 0.5.  Each ratio is also checked
    against the certified bounds 1/|||RT^-1|||^2 and |||RT|||^2.
    """
    rs, skipped = [], {}
    for r in sorted(set(r_list)):
        status = admissibility(p, q, r)
        if status == "ok":
            rs.append(r)
        else:
            skipped[r] = status
    if not rs:
        raise ValueError("no admissible r values")
    m_min = (rs[0] - 1) // 2
    colors = [c for c in colors if c <= m_min]
    labels = [f"e{c}" for c in colors] + [f"rand{k}" for k in range(n_random)]
    ratios: dict[str, list[float]] = {lab: [] for lab in labels}
    lo_cert, hi_cert = [], []
    inside = True
    for r in rs:
        params = CableParams.of(p, q, r)
        rt = rt_matrix_e_basis(params).to_complex()
        inv_norm = operator_norm(full_inverse(params))
        rt_norm = operator_norm(rt)
        lo, hi = 1.0 / inv_norm**2, rt_norm**2
        lo_cert.append(lo)
        hi_cert.append(hi)
        vecs = [np.eye(params.m, dtype=complex)[c - 1] for c in colors]
        rng = np.random.default_rng([seed, r])
        for _ in range(n_random):
            v = rng.standard_normal(params.m) + 1j * rng.standard_normal(params.m)
            vecs.append(v / np.linalg.norm(v))
        for lab, v in zip(labels, vecs):
            ratio = float(np.linalg.norm(rt @ v) ** 2 / np.linalg.norm(v) ** 2)
            ratios[lab].append(ratio)
            if not (lo * (1 - 1e-9) <= ratio <= hi * (1 + 1e-9)):
                inside = False
    rarr = np.asarray(rs, dtype=float)
    slopes = {}
    for lab in labels:
        if len(rs) >= 2:
            slopes[lab] = trend_slope(np.log(rarr), np.log(ratios[lab]))
        else:
            slopes[lab] = 0.0
    n_exp = n_declared if n_declared is not None else int(math.ceil(max(abs(s) for s in slopes.values()) - 1e-12))
    n_exp = max(n_exp, 0)
    unbounded = [lab for lab, s in slopes.items() if abs(s) > n_exp + 0.5]
    const = 1.0
    for lab in labels:
        vals = np.asarray(ratios[lab])
        const = max(const, float(np.max(vals / rarr**n_exp)), float(np.max(1.0 / (vals * rarr**n_exp))))
    return SandwichReport(p, q, rs, labels, ratios, lo_cert, hi_cert, slopes, n_exp, const, inside, unbounded, skipped)
