"""Entropy-based and cross-entropy-based uncertainty baselines.

The default information-theoretic decomposition takes the Shannon entropy
of the mean as total uncertainty, the expected entropy as aleatoric, and
their gap (the mutual information, an expected KL to the mean) as epistemic.
The cross-entropy alternative replaces the total by an expected pairwise
cross-entropy between independent draws, keeping the same aleatoric part;
its TU and EU can diverge to +inf, which is propagated as a sentinel rather
than treated as an error. All values are in bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import EuSolverConfig
from .secondorder import DirichletParams, EnsembleRep, SecondOrderRep, mean, sample
from .simplex import entropy, kl_divergence, cross_entropy
from .special import digamma

__all__ = [
    "BaselineReport",
    "entropy_tu",
    "entropy_au",
    "entropy_eu",
    "kl_reframed",
    "ce_tu",
    "ce_eu",
    "entropy_report",
    "cross_entropy_report",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class BaselineReport:
    """Baseline (TU, AU, EU) triple; values may carry the +inf sentinel."""

    family: str  # "entropy_default" | "cross_entropy_alt"
    tu: float
    au: float
    eu: float
    estimator: str  # "closed_form" | "monte_carlo" | "exact_pairwise"
    mc_stderr: float | None = None


def entropy_tu(q: SecondOrderRep) -> float:
    """Entropy of the mean distribution, in bits."""
    return entropy(mean(q))


def _dirichlet_expected_entropy(q: DirichletParams) -> float:
    # E[H(p)] = sum_i (a_i / a_0) (psi(a_0 + 1) - psi(a_i + 1)), in nats
    a0 = q.alpha0
    top = digamma(a0 + 1.0)
    nats = sum(float(ai) / a0 * (top - digamma(float(ai) + 1.0)) for ai in q.alpha)
    return nats / _LN2


def entropy_au(q: SecondOrderRep, cfg: EuSolverConfig | None = None, seed=None) -> tuple[float, float]:
    """Expected entropy of the random first-order distribution (bits, stderr).

    Exact for ensembles; for Dirichlet representations the digamma closed
    form is used (stderr 0), with Monte Carlo kept as a test oracle.
    """
    if isinstance(q, EnsembleRep):
        return float(sum(w * entropy(p) for w, p in zip(q.weights, q.atoms) if w > 0.0)), 0.0
    return _dirichlet_expected_entropy(q), 0.0


def _kl_rows_to(ref: np.ndarray, rows: np.ndarray) -> np.ndarray:
    # KL(row || ref) per row, bits; ref strictly positive wherever rows are
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(rows > 0.0, rows * (np.log2(rows) - np.log2(ref)), 0.0)
    return terms.sum(axis=1)


def entropy_eu(q: SecondOrderRep, cfg: EuSolverConfig | None = None, seed=None) -> tuple[float, float]:
    """Mutual information E_Q[KL(p || mean)] in bits, with standard error.

    Exact for ensembles, Monte Carlo for Dirichlet representations.
    """
    pbar = mean(q).probs
    if isinstance(q, EnsembleRep):
        val = sum(w * kl_divergence(p, pbar) for w, p in zip(q.weights, q.atoms) if w > 0.0)
        return float(val), 0.0
    cfg = cfg or EuSolverConfig()
    draws = sample(q, cfg.mc_samples, seed)
    vals = _kl_rows_to(pbar, draws)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


def kl_reframed(q: SecondOrderRep, cfg: EuSolverConfig | None = None, seed=None) -> tuple[float, float, float]:
    """The same entropy triple written through KL distances to uniform.

    TU = log K - KL(mean || uniform), AU = log K - E[KL(p || uniform)],
    EU = E[KL(p || mean)]; numerically equal to the direct forms.
    """
    k = q.k
    logk = math.log2(k)
    unif = np.full(k, 1.0 / k)
    tu_v = logk - kl_divergence(mean(q), unif)
    if isinstance(q, EnsembleRep):
        au_v = logk - float(
            sum(w * kl_divergence(p, unif) for w, p in zip(q.weights, q.atoms) if w > 0.0)
        )
    else:
        # E[KL(p || uniform)] = log K + sum_i E[p_i log2 p_i], closed form
        a0 = q.alpha0
        top = digamma(a0 + 1.0)
        exp_plogp = sum(float(ai) / a0 * (digamma(float(ai) + 1.0) - top) for ai in q.alpha) / _LN2
        au_v = logk - (logk + exp_plogp)
    eu_v, _ = entropy_eu(q, cfg, seed)
    return float(tu_v), float(au_v), float(eu_v)


def _pairwise_expectation(q: EnsembleRep, fn) -> float:
    total = 0.0
    for wm, pm in zip(q.weights, q.atoms):
        if wm == 0.0:
            continue
        for wn, pn in zip(q.weights, q.atoms):
            if wn == 0.0:
                continue
            v = fn(pm, pn)
            if math.isinf(v):
                return math.inf
            total += wm * wn * v
    return float(total)


def _paired_draws(q: DirichletParams, cfg: EuSolverConfig, seed) -> tuple[np.ndarray, np.ndarray]:
    draws = sample(q, 2 * cfg.mc_samples, seed)
    return draws[: cfg.mc_samples], draws[cfg.mc_samples :]


def _mc_mean_stderr(vals: np.ndarray) -> tuple[float, float]:
    if not np.all(np.isfinite(vals)):
        return math.inf, math.nan
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


def ce_tu(q: SecondOrderRep, cfg: EuSolverConfig | None = None, seed=None) -> tuple[float, float]:
    """Expected cross-entropy between two independent draws (bits, stderr).

    Exact double sum for ensembles (any diverging pair makes the whole value
    +inf); Monte Carlo over independent pairs for Dirichlet representations.
    """
    if isinstance(q, EnsembleRep):
        return _pairwise_expectation(q, cross_entropy), 0.0
    cfg = cfg or EuSolverConfig()
    left, right = _paired_draws(q, cfg, seed)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(left > 0.0, left * np.log2(right), 0.0)
    return _mc_mean_stderr(-terms.sum(axis=1))


def ce_eu(q: SecondOrderRep, cfg: EuSolverConfig | None = None, seed=None) -> tuple[float, float]:
    """Expected KL divergence between two independent draws (bits, stderr)."""
    if isinstance(q, EnsembleRep):
        return _pairwise_expectation(q, kl_divergence), 0.0
    cfg = cfg or EuSolverConfig()
    left, right = _paired_draws(q, cfg, seed)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(left > 0.0, left * (np.log2(left) - np.log2(right)), 0.0)
    return _mc_mean_stderr(terms.sum(axis=1))


def entropy_report(q: SecondOrderRep, cfg: EuSolverConfig | None = None, seed=None) -> BaselineReport:
    """Assemble the entropy-based triple for one representation."""
    tu_v = entropy_tu(q)
    au_v, _ = entropy_au(q, cfg, seed)
    eu_v, se = entropy_eu(q, cfg, seed)
    exact = isinstance(q, EnsembleRep)
    return BaselineReport(
        family="entropy_default",
        tu=tu_v,
        au=au_v,
        eu=eu_v,
        estimator="closed_form" if exact else "monte_carlo",
        mc_stderr=None if exact else se,
    )


def cross_entropy_report(q: SecondOrderRep, cfg: EuSolverConfig | None = None, seed=None) -> BaselineReport:
    """Assemble the cross-entropy triple for one representation."""
    tu_v, se_tu = ce_tu(q, cfg, seed)
    au_v, _ = entropy_au(q, cfg, seed)
    eu_v, se_eu = ce_eu(q, cfg, seed)
    exact = isinstance(q, EnsembleRep)
    stderr = None
    if not exact:
        finite = [s for s in (se_tu, se_eu) if math.isfinite(s)]
        stderr = max(finite) if finite else None
    return BaselineReport(
        family="cross_entropy_alt",
        tu=tu_v,
        au=au_v,
        eu=eu_v,
        estimator="exact_pairwise" if exact else "monte_carlo",
        mc_stderr=stderr,
    )
