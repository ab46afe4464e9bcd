"""Distance-based total, aleatoric, and epistemic uncertainty.

The three measures are minimal optimal-transport distances (under the 0/1
ground metric, i.e. total variation between first-order distributions) from
a second-order distribution to reference sets free of the respective kind of
uncertainty. They reduce to

    TU(Q) = 1 - max_y E_Q[p(y)]
    AU(Q) = 1 - E_Q[max_y p(y)]
    EU(Q) = (1/2) min_q E_Q[ ||p - q||_1 ]   over q in the simplex

For Dirichlet representations TU is closed form, AU is Monte Carlo, and EU
solves the equality-constrained L1 problem through its Lagrangian: the
stationarity condition makes every coordinate a Beta quantile at the common
level 1/2 - lambda, and a bisection on lambda enforces sum(q) = 1. For
ensembles the Beta CDFs become weighted empirical CDFs; the same level
search runs exactly on the finite set of cumulative weights, and residual
mass is placed inside the flat intervals where the objective is locally
constant (tie broken toward the ensemble mean). A simplex-lattice brute
force serves as an independent oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .secondorder import (
    DirichletParams,
    EnsembleRep,
    RestrictedRep,
    SecondOrderRep,
    marginal_beta,
    sample,
)
from .special import BetaShape, beta_cdf, beta_quantile

__all__ = [
    "EuSolverConfig",
    "EuSolution",
    "UncertaintyReport",
    "SolverError",
    "tu",
    "au",
    "eu",
    "eu_dirichlet",
    "eu_objective_dirichlet",
    "eu_ensemble",
    "eu_bruteforce_oracle",
    "normalize",
    "measure",
    "tu_restricted",
]

# Cumulative weights within this of the critical level count as flat.
_LEVEL_TOL = 1e-12

_LAMBDA_EDGE = 1e-12


class SolverError(RuntimeError):
    """Raised when an uncertainty solver fails to reach its tolerance."""


@dataclass(frozen=True)
class EuSolverConfig:
    """Tolerances and budgets for the epistemic-uncertainty solvers."""

    lambda_tol: float = 1e-10
    max_iter: int = 200
    mc_samples: int = 100_000

    def __post_init__(self) -> None:
        if not self.lambda_tol > 0.0:
            raise ValueError(f"lambda_tol must be positive, got {self.lambda_tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.mc_samples < 2:
            raise ValueError(f"mc_samples must be >= 2, got {self.mc_samples}")


@dataclass(frozen=True)
class EuSolution:
    """Epistemic uncertainty value with its minimizer and multiplier.

    ``box_lo``/``box_hi`` bound the full minimizer region coordinate-wise
    (the region is its intersection with the sum-to-1 plane); ``unique``
    says whether that region is a single point, ``fallback`` whether the
    quantile solver handed over to the brute-force oracle.
    """

    value: float
    minimizer: np.ndarray
    lambda_star: float
    unique: bool = True
    fallback: bool = False
    box_lo: np.ndarray | None = None
    box_hi: np.ndarray | None = None


@dataclass(frozen=True)
class UncertaintyReport:
    """A (TU, AU, EU) triple with solver metadata."""

    tu: float
    au: float
    eu: float
    k: int
    normalized: bool = False
    estimator: str = "lagrangian"
    mc_stderr: float | None = None
    minimizer_q: np.ndarray | None = None
    lambda_star: float | None = None

    def validate(self) -> None:
        """Check nonnegativity, the (K-1)/K range, and AU, EU <= TU."""
        tol = 1e-9 + 3.0 * (self.mc_stderr or 0.0)
        bound = 1.0 if self.normalized else (self.k - 1) / self.k
        for name, v in (("tu", self.tu), ("au", self.au), ("eu", self.eu)):
            if not -tol <= v <= bound + tol:
                raise ValueError(f"{name}={v!r} outside [0, {bound}] (tol {tol:g})")
        if self.au > self.tu + tol or self.eu > self.tu + tol:
            raise ValueError(
                f"ordering violated: au={self.au!r}, eu={self.eu!r} vs tu={self.tu!r}"
            )


def tu(q: SecondOrderRep) -> float:
    """Total uncertainty, 1 - max_y E_Q[p(y)]; closed form for both families."""
    if isinstance(q, DirichletParams):
        return 1.0 - float(q.alpha.max()) / q.alpha0
    return 1.0 - float((q.weights @ q.atoms).max())


def au(q: SecondOrderRep, cfg: EuSolverConfig | None = None, seed=None) -> tuple[float, float]:
    """Aleatoric uncertainty, 1 - E_Q[max_y p(y)], with its standard error.

    Exact (stderr 0) for ensembles; Monte Carlo with ``cfg.mc_samples``
    draws for Dirichlet representations.
    """
    if isinstance(q, EnsembleRep):
        return 1.0 - float(q.weights @ q.atoms.max(axis=1)), 0.0
    cfg = cfg or EuSolverConfig()
    draws = sample(q, cfg.mc_samples, seed)
    vals = 1.0 - draws.max(axis=1)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


def eu(q: SecondOrderRep, cfg: EuSolverConfig | None = None, seed=None) -> EuSolution:
    """Epistemic uncertainty, dispatching to the family-specific solver."""
    cfg = cfg or EuSolverConfig()
    if isinstance(q, DirichletParams):
        return eu_dirichlet(q, cfg)
    return eu_ensemble(q, cfg, seed=seed)


def eu_objective_dirichlet(q: DirichletParams, qvec) -> float:
    """The L1 objective (1/2) sum_i E|p_i - q_i| for a Dirichlet, in closed form.

    Each expectation evaluates through two regularized incomplete beta
    functions of the marginal shapes.
    """
    x = np.asarray(qvec, dtype=np.float64)
    if x.shape != (q.k,):
        raise ValueError(f"argument has shape {x.shape}, expected ({q.k},)")
    a0 = q.alpha0
    total = 0.0
    for ai, xi in zip(q.alpha, x):
        ai = float(ai)
        xi = min(1.0, max(0.0, float(xi)))
        f_mean = beta_cdf(BetaShape(ai + 1.0, a0 - ai), xi)
        f_marg = beta_cdf(BetaShape(ai, a0 - ai), xi)
        total += (ai / a0) * (1.0 - 2.0 * f_mean) + xi * (2.0 * f_marg - 1.0)
    return 0.5 * total


def eu_dirichlet(q: DirichletParams, cfg: EuSolverConfig | None = None) -> EuSolution:
    """Solve the constrained L1 problem for a Dirichlet representation.

    Bisects the multiplier lambda in (-1/2, 1/2): each coordinate of the
    candidate minimizer is the Beta(alpha_i, alpha0 - alpha_i) quantile at
    level 1/2 - lambda, and the root of sum(q(lambda)) - 1 is unique because
    every quantile is continuous and strictly decreasing in lambda.
    """
    cfg = cfg or EuSolverConfig()
    shapes = [marginal_beta(q, i) for i in range(q.k)]
    warm: list[float | None] = [None] * q.k

    def quantiles(lam: float) -> np.ndarray:
        u = 0.5 - lam
        out = np.empty(q.k)
        for i, sh in enumerate(shapes):
            out[i] = beta_quantile(sh, u, x0=warm[i])
            warm[i] = out[i]
        return out

    lo, hi = -0.5 + _LAMBDA_EDGE, 0.5 - _LAMBDA_EDGE
    lam = 0.5 * (lo + hi)
    qv = quantiles(lam)
    resid = float(qv.sum()) - 1.0
    iterations = 1
    while abs(resid) > cfg.lambda_tol and iterations < cfg.max_iter:
        if resid > 0.0:
            lo = lam
        else:
            hi = lam
        if hi - lo < 1e-16:
            break
        lam = 0.5 * (lo + hi)
        qv = quantiles(lam)
        resid = float(qv.sum()) - 1.0
        iterations += 1
    if abs(resid) > cfg.lambda_tol:
        raise SolverError(
            f"lambda bisection stopped after {iterations} iterations with "
            f"constraint residual {resid:.3e} > {cfg.lambda_tol:g}"
        )
    value = eu_objective_dirichlet(q, qv)
    return EuSolution(value=value, minimizer=qv, lambda_star=lam,
                      unique=True, box_lo=qv.copy(), box_hi=qv.copy())


def _coordinate_cdfs(q: EnsembleRep) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per coordinate: sorted unique atom values and cumulative weights."""
    out = []
    for i in range(q.k):
        vals, inverse = np.unique(q.atoms[:, i], return_inverse=True)
        w = np.bincount(inverse, weights=q.weights, minlength=vals.size)
        cums = np.cumsum(w)
        cums[-1] = 1.0
        out.append((vals, cums))
    return out


def eu_ensemble(q: EnsembleRep, cfg: EuSolverConfig | None = None, seed=None) -> EuSolution:
    """Solve the constrained L1 problem for an ensemble, exactly.

    The Lagrangian stationarity condition puts each coordinate at a weighted
    empirical quantile of the atom values at the common level 1/2 - lambda.
    The level search bisects over the finite set of cumulative weights; the
    residual of the sum constraint is then absorbed inside the optimal flat
    intervals, tie-broken toward the ensemble mean projected onto them. If
    the adjustment were infeasible the brute-force oracle takes over and the
    solution is flagged.
    """
    cfg = cfg or EuSolverConfig()
    coords = _coordinate_cdfs(q)
    levels = np.unique(np.concatenate([c for _, c in coords]))

    def min_quantiles(level: float) -> np.ndarray:
        out = np.empty(q.k)
        for i, (vals, cums) in enumerate(coords):
            j = int(np.searchsorted(cums, level - _LEVEL_TOL, side="left"))
            out[i] = vals[min(j, vals.size - 1)]
        return out

    # largest level whose minimal quantile vector still fits under the plane
    lo_idx, hi_idx = 0, levels.size - 1
    if min_quantiles(levels[hi_idx]).sum() <= 1.0 + _LEVEL_TOL:
        lo_idx = hi_idx
    else:
        while hi_idx - lo_idx > 1:
            mid = (lo_idx + hi_idx) // 2
            if min_quantiles(levels[mid]).sum() <= 1.0 + _LEVEL_TOL:
                lo_idx = mid
            else:
                hi_idx = mid
    level = float(levels[lo_idx])

    lo = min_quantiles(level)
    hi = lo.copy()
    for i, (vals, cums) in enumerate(coords):
        j = int(np.searchsorted(cums, level - _LEVEL_TOL, side="left"))
        j = min(j, vals.size - 1)
        if abs(cums[j] - level) <= _LEVEL_TOL and j + 1 < vals.size:
            hi[i] = vals[j + 1]

    residual = 1.0 - float(lo.sum())
    headroom = float((hi - lo).sum())
    if residual < -1e-9 or residual > headroom + 1e-9:
        value, minimizer = eu_bruteforce_oracle(q, _fallback_grid_step(q.k), cfg, seed=seed)
        return EuSolution(value=value, minimizer=minimizer, lambda_star=0.5 - level,
                          unique=False, fallback=True)

    mbar = q.weights @ q.atoms
    minimizer = _project_mean(mbar, lo, hi)
    value = 0.5 * float(
        sum((q.weights * np.abs(q.atoms[:, i] - minimizer[i])).sum() for i in range(q.k))
    )
    free = int(np.sum(hi - lo > 1e-15))
    unique = residual <= _LEVEL_TOL or free <= 1 or headroom - residual <= _LEVEL_TOL
    return EuSolution(value=value, minimizer=minimizer, lambda_star=0.5 - level,
                      unique=unique, box_lo=lo, box_hi=hi)


def _project_mean(mbar: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Point of the box with coordinate sum 1 closest to ``mbar`` (water filling)."""
    base = np.clip(mbar, lo, hi)
    if abs(base.sum() - 1.0) <= 1e-12:
        return base
    nu_lo, nu_hi = -2.0, 2.0
    for _ in range(100):
        nu = 0.5 * (nu_lo + nu_hi)
        s = float(np.clip(mbar + nu, lo, hi).sum())
        if s < 1.0:
            nu_lo = nu
        else:
            nu_hi = nu
    return np.clip(mbar + 0.5 * (nu_lo + nu_hi), lo, hi)


def _fallback_grid_step(k: int) -> float:
    if k == 2:
        return 1e-4
    if k == 3:
        return 1e-3
    if k == 4:
        return 1e-2
    raise SolverError(f"no brute-force fallback available for K={k} > 4")


def _simplex_lattice(k: int, n: int) -> list[np.ndarray]:
    """Index arrays (i_1, ..., i_k) of all lattice points with sum n."""
    if k == 2:
        i = np.arange(n + 1)
        return [i, n - i]
    if k == 3:
        parts_i, parts_j = [], []
        for i in range(n + 1):
            j = np.arange(n + 1 - i)
            parts_i.append(np.full(j.size, i))
            parts_j.append(j)
        ii = np.concatenate(parts_i)
        jj = np.concatenate(parts_j)
        return [ii, jj, n - ii - jj]
    # k == 4
    parts = [[], [], [], []]
    for i in range(n + 1):
        tail = _simplex_lattice(3, n - i)
        parts[0].append(np.full(tail[0].size, i))
        for t in range(3):
            parts[t + 1].append(tail[t])
    return [np.concatenate(p) for p in parts]


def _abs_deviation_table(values: np.ndarray, weights: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """E_w |X - t| for every t in ``grid``, via sorted prefix sums."""
    order = np.argsort(values)
    sv = values[order]
    sw = weights[order]
    pw = np.concatenate([[0.0], np.cumsum(sw)])
    pv = np.concatenate([[0.0], np.cumsum(sw * sv)])
    idx = np.searchsorted(sv, grid, side="right")
    below_w, below_v = pw[idx], pv[idx]
    total_w, total_v = pw[-1], pv[-1]
    return grid * below_w - below_v + (total_v - below_v) - grid * (total_w - below_w)


def eu_bruteforce_oracle(
    q: SecondOrderRep, grid_step: float, cfg: EuSolverConfig | None = None, seed=None
) -> tuple[float, np.ndarray]:
    """Exhaustive minimization of the L1 objective over a simplex lattice.

    Ensembles use the exact weighted objective; Dirichlet representations a
    common-random-number Monte Carlo estimate (one sample matrix shared by
    every lattice point). The objective separates over coordinates, so it is
    evaluated per lattice point from per-coordinate tables.
    """
    cfg = cfg or EuSolverConfig()
    k = q.k
    if k > 4:
        raise ValueError(f"brute-force oracle supports K <= 4, got K={k}")
    n = int(round(1.0 / grid_step))
    if n < 1:
        raise ValueError(f"grid step {grid_step} coarser than the simplex")
    if math.comb(n + k - 1, k - 1) > 3e7:
        raise ValueError(f"lattice with step {grid_step} and K={k} is too large")
    if isinstance(q, EnsembleRep):
        cols = [q.atoms[:, i] for i in range(k)]
        wts = q.weights
    else:
        draws = sample(q, cfg.mc_samples, seed)
        cols = [draws[:, i] for i in range(k)]
        wts = np.full(cfg.mc_samples, 1.0 / cfg.mc_samples)
    grid = np.arange(n + 1) / n
    tables = [_abs_deviation_table(c, wts, grid) for c in cols]
    lattice = _simplex_lattice(k, n)
    total = tables[0][lattice[0]].copy()
    for i in range(1, k):
        total += tables[i][lattice[i]]
    best = int(np.argmin(total))
    minimizer = np.array([lattice[i][best] for i in range(k)]) / n
    return 0.5 * float(total[best]), minimizer


def tu_restricted(r: RestrictedRep) -> float:
    """Total uncertainty of an unnormalized restriction, 1 - max of its mean."""
    return 1.0 - float(np.max(r.mean()))


def normalize(report: UncertaintyReport) -> UncertaintyReport:
    """Scale a report by K/(K-1) so the attainable range becomes [0, 1]."""
    if report.normalized:
        raise ValueError("report is already normalized")
    f = report.k / (report.k - 1)
    return replace(
        report,
        tu=report.tu * f,
        au=report.au * f,
        eu=report.eu * f,
        mc_stderr=None if report.mc_stderr is None else report.mc_stderr * f,
        normalized=True,
    )


def measure(
    q: SecondOrderRep,
    cfg: EuSolverConfig | None = None,
    seed=None,
    normalized: bool = False,
) -> UncertaintyReport:
    """Compute the full (TU, AU, EU) report for one representation."""
    cfg = cfg or EuSolverConfig()
    t = tu(q)
    a, stderr = au(q, cfg, seed)
    sol = eu(q, cfg, seed)
    report = UncertaintyReport(
        tu=t,
        au=a,
        eu=sol.value,
        k=q.k,
        estimator="brute_force" if sol.fallback else "lagrangian",
        mc_stderr=stderr if stderr > 0.0 else None,
        minimizer_q=sol.minimizer,
        lambda_star=sol.lambda_star,
    )
    report.validate()
    return normalize(report) if normalized else report
