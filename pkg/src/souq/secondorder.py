"""Second-order distributions: measures over the probability simplex.

Two representations are supported, a parametric Dirichlet family and finite
weighted ensembles of first-order distributions (which subsume second-order
Dirac measures, Dirac mixtures on the one-hot vertices, and the
vertex-uniform distribution). Restriction to label subsets deliberately does
NOT renormalize: the restricted objects are sub-probability aware and exist
for the subadditivity/product checks only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simplex import CategoricalDistribution, LabelSpace
from .special import MAX_SHAPE, BetaShape

__all__ = [
    "DirichletParams",
    "EnsembleRep",
    "SecondOrderRep",
    "RestrictedRep",
    "mean",
    "sample",
    "marginal_beta",
    "restrict",
    "product",
    "mean_preserving_spread",
    "spread_preserving_shift",
    "second_order_dirac",
    "dirac_mixture",
    "vertex_uniform",
    "parse_distribution",
    "to_jsonable",
]

# Concentrations below this are numerically degenerate and rejected.
MIN_ALPHA = 1e-8

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DirichletParams:
    """Dirichlet concentration vector; all entries positive, K >= 2."""

    alpha: np.ndarray

    def __init__(self, alpha) -> None:
        arr = np.asarray(alpha, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError(f"concentration vector must be 1-D with K >= 2, got shape {arr.shape}")
        if np.any(arr < MIN_ALPHA):
            raise ValueError(f"concentrations must all be >= {MIN_ALPHA:g}, got {arr}")
        # headroom of 1 keeps the shifted shape alpha_i + 1 inside the envelope
        if arr.sum() > MAX_SHAPE - 1.0:
            raise ValueError(f"total concentration {arr.sum():g} exceeds the accuracy envelope {MAX_SHAPE:g}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "alpha", arr)

    @property
    def k(self) -> int:
        return self.alpha.size

    @property
    def alpha0(self) -> float:
        return float(self.alpha.sum())

    def __repr__(self) -> str:
        return f"DirichletParams({np.array2string(self.alpha, separator=', ')})"


@dataclass(frozen=True, eq=False)
class EnsembleRep:
    """Finite weighted mixture of second-order Dirac measures.

    ``atoms`` is an (M, K) matrix whose rows are first-order distributions;
    ``weights`` are nonnegative and sum to 1 (uniform when omitted).
    """

    atoms: np.ndarray
    weights: np.ndarray

    def __init__(self, atoms, weights=None) -> None:
        if isinstance(atoms, CategoricalDistribution):
            atoms = [atoms]
        rows = [a.probs if isinstance(a, CategoricalDistribution) else np.asarray(a, dtype=np.float64)
                for a in atoms]
        if not rows:
            raise ValueError("ensemble needs at least one atom")
        mat = np.vstack([CategoricalDistribution(r).probs for r in rows])
        if weights is None:
            w = np.full(mat.shape[0], 1.0 / mat.shape[0])
        else:
            w = np.asarray(weights, dtype=np.float64)
            if w.shape != (mat.shape[0],):
                raise ValueError(f"got {w.size} weights for {mat.shape[0]} atoms")
            if np.any(w < 0.0):
                raise ValueError(f"weights must be nonnegative, got {w}")
            if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
                raise ValueError(f"weights sum to {w.sum()!r}, more than {WEIGHT_SUM_TOL} away from 1")
        mat.flags.writeable = False
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "atoms", mat)
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return self.atoms.shape[0]

    @property
    def k(self) -> int:
        return self.atoms.shape[1]

    def __repr__(self) -> str:
        return f"EnsembleRep(m={self.m}, k={self.k})"


SecondOrderRep = DirichletParams | EnsembleRep


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def second_order_dirac(p) -> EnsembleRep:
    """Point mass at the first-order distribution ``p``."""
    return EnsembleRep([p])


def dirac_mixture(weights) -> EnsembleRep:
    """Mixture of second-order Diracs on the one-hot vertices, given weights."""
    w = np.asarray(weights, dtype=np.float64)
    return EnsembleRep(np.eye(w.size), w)


def vertex_uniform(space: LabelSpace | int) -> EnsembleRep:
    """Uniform mixture over the K one-hot vertices (the extreme epistemic case)."""
    k = space.size if isinstance(space, LabelSpace) else int(space)
    return dirac_mixture(np.full(k, 1.0 / k))


def mean(q: SecondOrderRep) -> CategoricalDistribution:
    """Expectation of the random first-order distribution under ``q``."""
    if isinstance(q, DirichletParams):
        return CategoricalDistribution(q.alpha / q.alpha0)
    return CategoricalDistribution(q.weights @ q.atoms)


def sample(q: SecondOrderRep, n: int, seed=None) -> np.ndarray:
    """Draw ``n`` i.i.d. first-order distributions; rows of the result.

    Deterministic for a fixed seed. Dirichlet sampling goes through numpy's
    generator (gamma draws with small-shape boosting); ensembles draw atoms
    by their weights.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    rng = _rng(seed)
    if isinstance(q, DirichletParams):
        return rng.dirichlet(q.alpha, size=n)
    idx = rng.choice(q.m, size=n, p=q.weights)
    return q.atoms[idx]


def marginal_beta(q: DirichletParams, i: int) -> BetaShape:
    """Marginal law of coordinate ``i``: Beta(alpha_i, alpha0 - alpha_i)."""
    if not 0 <= i < q.k:
        raise ValueError(f"label index {i} out of range for K={q.k}")
    a = float(q.alpha[i])
    return BetaShape(a, q.alpha0 - a)


@dataclass(frozen=True)
class RestrictedRep:
    """Coordinate restriction of a second-order distribution, unnormalized.

    Atom rows (or the mean) over the selected labels generally sum to less
    than 1. Used by the marginalization checks; not a SecondOrderRep.
    """

    labels: tuple[int, ...]
    atoms: np.ndarray | None = None
    weights: np.ndarray | None = None
    alpha: np.ndarray | None = None
    alpha0: float | None = None

    @property
    def kind(self) -> str:
        return "dirichlet" if self.alpha is not None else "ensemble"

    def mean(self) -> np.ndarray:
        if self.alpha is not None:
            return self.alpha / self.alpha0
        return self.weights @ self.atoms


def restrict(q: SecondOrderRep, subset) -> RestrictedRep:
    """Restrict ``q`` to a strict, nonempty subset of label coordinates.

    No renormalization is performed; the sub-vectors keep their original
    mass so that the restricted mean is the coordinate selection of the
    full mean.
    """
    k = q.k
    idx = list(subset)
    if len(idx) == 0:
        raise ValueError("restriction subset must be nonempty")
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate labels in subset {idx}")
    if any(not 0 <= i < k for i in idx):
        raise ValueError(f"subset {idx} out of range for K={k}")
    if len(idx) == k:
        raise ValueError("restriction subset must be a strict subset of the labels")
    sel = np.asarray(idx, dtype=np.intp)
    if isinstance(q, DirichletParams):
        return RestrictedRep(labels=tuple(idx), alpha=q.alpha[sel].copy(), alpha0=q.alpha0)
    return RestrictedRep(labels=tuple(idx), atoms=q.atoms[:, sel].copy(), weights=q.weights.copy())


def product(r1: RestrictedRep, r2: RestrictedRep) -> RestrictedRep:
    """Independent coupling of two ensemble-backed restrictions.

    Atoms are all concatenations over the combined coordinates with weights
    w_m * w_n. Blocks must be disjoint.
    """
    if r1.kind != "ensemble" or r2.kind != "ensemble":
        raise ValueError("product requires ensemble-backed restrictions")
    if set(r1.labels) & set(r2.labels):
        raise ValueError(f"overlapping label blocks: {r1.labels} and {r2.labels}")
    m1, m2 = r1.atoms.shape[0], r2.atoms.shape[0]
    left = np.repeat(r1.atoms, m2, axis=0)
    right = np.tile(r2.atoms, (m1, 1))
    w = np.outer(r1.weights, r2.weights).ravel()
    return RestrictedRep(labels=r1.labels + r2.labels, atoms=np.hstack([left, right]), weights=w)


def _zero_sum_unit_direction(rng: np.random.Generator, k: int) -> np.ndarray:
    while True:
        d = rng.standard_normal(k)
        d -= d.mean()
        norm = float(np.linalg.norm(d))
        if norm > 1e-9:
            return d / norm


def mean_preserving_spread(q: EnsembleRep, magnitude: float, seed=None) -> EnsembleRep:
    """Split every atom p into p + e and p - e at half weight, zero-mean noise.

    The per-atom offset e is a random zero-sum unit direction scaled by
    ``magnitude``, clipped so both offspring stay inside the closed simplex.
    The output mean equals the input mean exactly up to float rounding.
    """
    if not isinstance(q, EnsembleRep):
        raise ValueError("mean_preserving_spread is defined for ensemble representations")
    if not magnitude > 0.0:
        raise ValueError(f"spread magnitude must be positive, got {magnitude}")
    rng = _rng(seed)
    atoms_out = []
    weights_out = []
    for p, w in zip(q.atoms, q.weights):
        best_e = np.zeros(q.k)
        best_eps = 0.0
        for _ in range(8):
            d = _zero_sum_unit_direction(rng, q.k)
            moving = np.abs(d) > 1e-15
            room = np.minimum(p[moving], 1.0 - p[moving]) / np.abs(d[moving])
            eps = min(magnitude, float(room.min()) if room.size else 0.0)
            if eps > best_eps:
                best_eps, best_e = eps, eps * d
            if best_eps >= magnitude:
                break
        atoms_out.append(np.clip(p + best_e, 0.0, 1.0))
        atoms_out.append(np.clip(p - best_e, 0.0, 1.0))
        weights_out.extend((0.5 * w, 0.5 * w))
    return EnsembleRep(np.vstack(atoms_out), np.asarray(weights_out))


def spread_preserving_shift(q: EnsembleRep, z) -> EnsembleRep:
    """Translate every atom by the zero-sum vector ``z``, weights unchanged."""
    if not isinstance(q, EnsembleRep):
        raise ValueError("spread_preserving_shift is defined for ensemble representations")
    zv = np.asarray(z, dtype=np.float64)
    if zv.shape != (q.k,):
        raise ValueError(f"shift vector has shape {zv.shape}, expected ({q.k},)")
    if abs(float(zv.sum())) > 1e-12 * max(1.0, q.k):
        raise ValueError(f"shift vector must sum to 0, got sum {zv.sum()!r}")
    shifted = q.atoms + zv
    bad = np.where((shifted < -1e-12).any(axis=1) | (shifted > 1.0 + 1e-12).any(axis=1))[0]
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"shift moves atom {i} out of the simplex: {shifted[i]}")
    return EnsembleRep(np.clip(shifted, 0.0, 1.0), q.weights)


# --- shared JSON schema -----------------------------------------------------


def parse_distribution(obj) -> SecondOrderRep:
    """Build a representation from the shared JSON schema.

    ``{"type": "dirichlet", "alpha": [...]}`` or
    ``{"type": "ensemble", "atoms": [[...], ...], "weights": [...]}``
    with weights optional (uniform by default).
    """
    if not isinstance(obj, dict):
        raise ValueError(f"distribution spec must be an object, got {type(obj).__name__}")
    kind = obj.get("type")
    if kind == "dirichlet":
        if "alpha" not in obj:
            raise ValueError("dirichlet spec is missing the 'alpha' field")
        return DirichletParams(obj["alpha"])
    if kind == "ensemble":
        atoms = obj.get("atoms")
        if not atoms:
            raise ValueError("ensemble spec needs a nonempty 'atoms' field")
        return EnsembleRep(np.asarray(atoms, dtype=np.float64), obj.get("weights"))
    raise ValueError(f"unknown distribution type {kind!r} (expected 'dirichlet' or 'ensemble')")


def to_jsonable(q: SecondOrderRep) -> dict:
    """Serialize a representation back into the shared JSON schema."""
    if isinstance(q, DirichletParams):
        return {"type": "dirichlet", "alpha": q.alpha.tolist()}
    if isinstance(q, EnsembleRep):
        return {"type": "ensemble", "atoms": q.atoms.tolist(), "weights": q.weights.tolist()}
    raise ValueError(f"cannot serialize {type(q).__name__}")
