"""Tour of the uncertainty measures on a few second-order distributions.

Walks through total (TU), aleatoric (AU), and epistemic (EU) uncertainty
for the distance-based measures and the two information-theoretic
baselines, on inputs chosen so each value is easy to sanity-check by hand.
"""
import numpy as np

from souq import (
    DirichletParams,
    EnsembleRep,
    EuSolverConfig,
    cross_entropy_report,
    entropy_report,
    measure,
    second_order_dirac,
    vertex_uniform,
)

cfg = EuSolverConfig(mc_samples=50_000)
SEED = 2024


def show(name, q):
    dist = measure(q, cfg, seed=SEED)
    ent = entropy_report(q, cfg, seed=SEED)
    ce = cross_entropy_report(q, cfg, seed=SEED)
    print(f"\n{name}  (K={q.k})")
    print(f"  {'family':<15}{'TU':>10}{'AU':>10}{'EU':>10}")
    for label, r in (("distance", dist), ("entropy", ent), ("cross-entropy", ce)):
        print(f"  {label:<15}{r.tu:>10.4f}{r.au:>10.4f}{r.eu:>10.4f}")
    return dist


print("=" * 64)
print("1. A confident prediction: point mass on a near-one-hot vector")
print("=" * 64)
show("second-order Dirac at (0.9, 0.05, 0.05)", second_order_dirac([0.9, 0.05, 0.05]))
print("All families agree EU = 0: a point mass carries no second-order")
print("ambiguity. What remains is aleatoric.")

print()
print("=" * 64)
print("2. Pure epistemic uncertainty: uniform mixture over the vertices")
print("=" * 64)
show("vertex-uniform, K=3", vertex_uniform(3))
print("Every atom is a certain prediction, so AU = 0; disagreement between")
print("atoms drives EU to its maximum (K-1)/K = 2/3. The cross-entropy")
print("variant diverges to inf here, one of the criticisms it attracts.")

print()
print("=" * 64)
print("3. Pure aleatoric uncertainty: point mass on the uniform vector")
print("=" * 64)
show("second-order Dirac at Unif(3)", second_order_dirac([1 / 3] * 3))

print()
print("=" * 64)
print("4. The Dirichlet family")
print("=" * 64)
rep = show("Dir(1, 1)", DirichletParams([1.0, 1.0]))
print(f"Distance EU solves a small constrained problem: minimizer q* = "
      f"{np.round(rep.minimizer_q, 6)}, lambda* = {rep.lambda_star:.2e}")
print("Known values for Dir(1,1): TU = 1/2, AU = 1/4, EU = 1/4.")

show("Dir(2, 1, 1)", DirichletParams([2.0, 1.0, 1.0]))

print()
print("=" * 64)
print("5. Normalization to [0, 1]")
print("=" * 64)
q = DirichletParams([1.0, 1.0, 1.0])
raw = measure(q, cfg, seed=SEED)
scaled = measure(q, cfg, seed=SEED, normalized=True)
print(f"Dir(1,1,1): raw TU = {raw.tu:.4f} (bound {2 / 3:.4f}), "
      f"normalized TU = {scaled.tu:.4f}")
print("The factor K/(K-1) maps the attainable range [0, (K-1)/K] onto [0, 1].")

print()
print("=" * 64)
print("6. An ensemble of model predictions")
print("=" * 64)
ens = EnsembleRep([[0.2, 0.8], [0.6, 0.4]], weights=[0.5, 0.5])
rep = show("two-member ensemble {(0.2,0.8), (0.6,0.4)}", ens)
print(f"EU = 0.2 with a flat set of minimizers; the reported one "
      f"({np.round(rep.minimizer_q, 3)}) is the ensemble mean projected into it.")
