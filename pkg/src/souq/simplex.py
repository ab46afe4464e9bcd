"""First-order distributions on a finite label space.

Provides the categorical/simplex value types, the total-variation distance
induced by the 0/1 ground metric on labels, and the information-theoretic
primitives (entropy, KL divergence, cross-entropy) in bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Sum deviations below this are silently renormalized; larger ones rejected.
# Tolerates float noise from upstream ensembles without masking real errors.
SUM_TOLERANCE = 1e-9

__all__ = [
    "LabelSpace",
    "CategoricalDistribution",
    "dirac_first_order",
    "uniform_first_order",
    "tv_distance",
    "entropy",
    "kl_divergence",
    "cross_entropy",
]


@dataclass(frozen=True)
class LabelSpace:
    """A finite label space with ``size`` classes (at least two)."""

    size: int

    def __post_init__(self) -> None:
        if not isinstance(self.size, (int, np.integer)) or self.size < 2:
            raise ValueError(f"label space needs an integer size >= 2, got {self.size!r}")


@dataclass(frozen=True, eq=False)
class CategoricalDistribution:
    """A point of the probability simplex: K nonnegative entries summing to 1.

    Construction renormalizes sums within ``SUM_TOLERANCE`` of 1 and rejects
    anything further off; entries must lie in [0, 1] up to float noise.
    """

    probs: np.ndarray

    def __init__(self, probs) -> None:
        arr = np.asarray(probs, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError(f"probability vector must be 1-D with K >= 2, got shape {arr.shape}")
        if np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-9):
            raise ValueError(f"entries outside [0, 1]: {arr}")
        arr = np.clip(arr, 0.0, None)
        total = float(arr.sum())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"probabilities sum to {total!r}, more than {SUM_TOLERANCE} away from 1")
        if total != 1.0:
            arr = arr / total
        arr.flags.writeable = False
        object.__setattr__(self, "probs", arr)

    @property
    def k(self) -> int:
        return self.probs.size

    def __eq__(self, other) -> bool:
        return isinstance(other, CategoricalDistribution) and np.array_equal(self.probs, other.probs)

    def __repr__(self) -> str:
        return f"CategoricalDistribution({np.array2string(self.probs, separator=', ')})"


def _as_probs(p) -> np.ndarray:
    if isinstance(p, CategoricalDistribution):
        return p.probs
    return np.asarray(p, dtype=np.float64)


def _check_same_k(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def dirac_first_order(y: int, space: LabelSpace) -> CategoricalDistribution:
    """One-hot distribution placing all mass on label ``y``."""
    if not 0 <= y < space.size:
        raise ValueError(f"label index {y} out of range for K={space.size}")
    v = np.zeros(space.size)
    v[y] = 1.0
    return CategoricalDistribution(v)


def uniform_first_order(space: LabelSpace) -> CategoricalDistribution:
    """Uniform distribution, every label with mass 1/K."""
    return CategoricalDistribution(np.full(space.size, 1.0 / space.size))


def tv_distance(p, q) -> float:
    """Total variation distance, half the L1 distance between the vectors.

    Equals the optimal-transport cost between ``p`` and ``q`` under the 0/1
    ground metric on labels, and also ``1 - sum_y min(p(y), q(y))``.
    """
    a, b = _as_probs(p), _as_probs(q)
    _check_same_k(a, b)
    return 0.5 * float(np.abs(a - b).sum())


def _xlog2x(v: np.ndarray) -> np.ndarray:
    # 0 * log 0 := 0
    out = np.zeros_like(v)
    nz = v > 0.0
    out[nz] = v[nz] * np.log2(v[nz])
    return out


def entropy(p) -> float:
    """Shannon entropy in bits, ``-sum p(y) log2 p(y)`` with 0 log 0 = 0."""
    a = _as_probs(p)
    return float(-_xlog2x(a).sum())


def kl_divergence(p, q) -> float:
    """KL divergence in bits; ``+inf`` when q vanishes where p does not."""
    a, b = _as_probs(p), _as_probs(q)
    _check_same_k(a, b)
    sup = a > 0.0
    if np.any(b[sup] <= 0.0):
        return math.inf
    return float(np.sum(a[sup] * (np.log2(a[sup]) - np.log2(b[sup]))))


def cross_entropy(p, q) -> float:
    """Cross-entropy in bits, ``-sum p(y) log2 q(y)``; ``+inf`` on support loss.

    Satisfies CE(p, q) = H(p) + KL(p || q) whenever finite.
    """
    a, b = _as_probs(p), _as_probs(q)
    _check_same_k(a, b)
    sup = a > 0.0
    if np.any(b[sup] <= 0.0):
        return math.inf
    return float(-np.sum(a[sup] * np.log2(b[sup])))
