import math

import numpy as np
import pytest

from souq.baselines import (
    ce_eu,
    ce_tu,
    cross_entropy_report,
    entropy_au,
    entropy_eu,
    entropy_report,
    entropy_tu,
    kl_reframed,
)
from souq.measures import EuSolverConfig
from souq.secondorder import (
    DirichletParams,
    EnsembleRep,
    dirac_mixture,
    sample,
    second_order_dirac,
    vertex_uniform,
)
from souq.simplex import cross_entropy, entropy, kl_divergence
from souq.special import digamma

CFG = EuSolverConfig(mc_samples=50_000)
LN2 = math.log(2.0)


def random_ensemble(rng, k=None, m=None):
    k = k or int(rng.integers(2, 6))
    m = m or int(rng.integers(1, 6))
    return EnsembleRep(rng.dirichlet(np.ones(k), m), rng.dirichlet(np.ones(m)))


def dirichlet_expected_ce_closed(q: DirichletParams) -> float:
    # E[CE(p, p')] = -sum_i E[p_i] E[log2 p'_i] for independent draws
    a0 = q.alpha0
    return -sum(float(ai) / a0 * (digamma(float(ai)) - digamma(a0)) for ai in q.alpha) / LN2


class TestEntropyMeasures:
    def test_tu_two_vertex_ensemble(self):
        e = EnsembleRep([[1.0, 0.0], [0.0, 1.0]])
        assert entropy_tu(e) == pytest.approx(1.0, abs=1e-12)

    def test_tu_second_order_dirac_on_vertex(self):
        assert entropy_tu(second_order_dirac([0.0, 1.0])) == 0.0

    def test_tu_uniform_dirichlet(self):
        assert entropy_tu(DirichletParams([1, 1, 1])) == pytest.approx(math.log2(3), abs=1e-12)

    def test_au_one_hot_ensemble(self):
        v, se = entropy_au(vertex_uniform(3))
        assert (v, se) == (0.0, 0.0)

    def test_au_uniform_atom(self):
        v, _ = entropy_au(second_order_dirac([0.25] * 4))
        assert v == pytest.approx(2.0, abs=1e-12)

    def test_au_dirichlet_digamma_closed_form(self):
        v, se = entropy_au(DirichletParams([1, 1]))
        assert se == 0.0
        assert v == pytest.approx(0.5 / LN2, abs=1e-12)

    def test_au_closed_form_matches_monte_carlo(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            k = int(rng.integers(2, 6))
            q = DirichletParams(np.exp(rng.uniform(math.log(0.3), math.log(10), k)))
            v, _ = entropy_au(q)
            draws = sample(q, 100_000, seed=int(rng.integers(1 << 30)))
            ent = np.array([entropy(p) for p in draws])
            assert abs(v - ent.mean()) <= 3.0 * ent.std(ddof=1) / math.sqrt(ent.size)

    def test_eu_dirac_is_zero(self):
        v, _ = entropy_eu(second_order_dirac([0.3, 0.7]))
        assert v == pytest.approx(0.0, abs=1e-12)

    def test_eu_two_vertex_ensemble(self):
        v, _ = entropy_eu(EnsembleRep([[1.0, 0.0], [0.0, 1.0]]))
        assert v == pytest.approx(1.0, abs=1e-12)

    def test_eu_dirichlet_matches_decomposition(self):
        q = DirichletParams([1, 1])
        v, se = entropy_eu(q, CFG, seed=11)
        expected = entropy_tu(q) - entropy_au(q)[0]
        assert expected == pytest.approx(1.0 - 0.5 / LN2, abs=1e-12)
        assert abs(v - expected) <= 3.0 * se

    def test_additive_decomposition_on_ensembles(self):
        rng = np.random.default_rng(1)
        for _ in range(40):
            e = random_ensemble(rng)
            tu_v = entropy_tu(e)
            au_v, _ = entropy_au(e)
            eu_v, _ = entropy_eu(e)
            assert tu_v == pytest.approx(au_v + eu_v, abs=1e-9)


class TestKlReframing:
    def test_dirac_at_uniform(self):
        q = second_order_dirac([0.25] * 4)
        tu_v, au_v, eu_v = kl_reframed(q)
        assert tu_v == pytest.approx(2.0, abs=1e-12)
        assert au_v == pytest.approx(2.0, abs=1e-12)
        assert eu_v == pytest.approx(0.0, abs=1e-12)

    def test_vertex_dirac_binary(self):
        q = second_order_dirac([1.0, 0.0])
        assert kl_reframed(q) == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)

    def test_matches_direct_forms_on_random_ensembles(self):
        rng = np.random.default_rng(2)
        for _ in range(40):
            e = random_ensemble(rng)
            tu_v, au_v, eu_v = kl_reframed(e)
            assert tu_v == pytest.approx(entropy_tu(e), abs=1e-9)
            assert au_v == pytest.approx(entropy_au(e)[0], abs=1e-9)
            assert eu_v == pytest.approx(entropy_eu(e)[0], abs=1e-9)

    def test_matches_direct_forms_on_dirichlet(self):
        q = DirichletParams([0.7, 2.0, 5.5])
        tu_v, au_v, _ = kl_reframed(q, CFG, seed=3)
        assert tu_v == pytest.approx(entropy_tu(q), abs=1e-9)
        assert au_v == pytest.approx(entropy_au(q)[0], abs=1e-9)


class TestCrossEntropyMeasures:
    def test_tu_dirac_is_entropy(self):
        p = [0.3, 0.7]
        v, _ = ce_tu(second_order_dirac(p))
        assert v == pytest.approx(entropy(p), abs=1e-12)

    def test_tu_two_vertices_diverges(self):
        v, _ = ce_tu(EnsembleRep([[1.0, 0.0], [0.0, 1.0]]))
        assert v == math.inf

    def test_tu_symmetric_pair_exact_value(self):
        e = EnsembleRep([[0.75, 0.25], [0.25, 0.75]])
        v, se = ce_tu(e)
        p, q = e.atoms
        expected = 0.25 * (entropy(p) + cross_entropy(p, q) + cross_entropy(q, p) + entropy(q))
        assert se == 0.0
        assert v == pytest.approx(expected, abs=1e-12)
        # sampling oracle over independent atom pairs
        rng = np.random.default_rng(4)
        idx = rng.integers(0, 2, size=(100_000, 2))
        vals = np.array([cross_entropy(e.atoms[i], e.atoms[j]) for i, j in idx])
        assert abs(v - vals.mean()) <= 3.0 * vals.std(ddof=1) / math.sqrt(vals.size)

    def test_eu_dirac_is_zero(self):
        v, _ = ce_eu(second_order_dirac([0.6, 0.4]))
        assert v == pytest.approx(0.0, abs=1e-12)

    def test_eu_two_vertices_diverges(self):
        v, _ = ce_eu(dirac_mixture([0.5, 0.5]))
        assert v == math.inf

    def test_eu_symmetric_pair_value(self):
        # independent-copy expectation: same-atom pairs contribute zero, so
        # the value is half the one-sided KL, consistent with TU = AU + EU
        e = EnsembleRep([[0.75, 0.25], [0.25, 0.75]])
        v, _ = ce_eu(e)
        expected = 0.5 * kl_divergence([0.75, 0.25], [0.25, 0.75])
        assert v == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.25 * math.log2(3), abs=1e-12)

    def test_decomposition_on_ensembles(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            e = random_ensemble(rng)
            tu_v, _ = ce_tu(e)
            eu_v, _ = ce_eu(e)
            au_v, _ = entropy_au(e)
            if math.isinf(tu_v):
                assert math.isinf(eu_v)
            else:
                assert tu_v == pytest.approx(au_v + eu_v, abs=1e-9)

    def test_dirichlet_monte_carlo_matches_closed_form(self):
        q = DirichletParams([1.5, 3.0, 0.8])
        v, se = ce_tu(q, CFG, seed=6)
        assert abs(v - dirichlet_expected_ce_closed(q)) <= 3.0 * se

    def test_dirichlet_decomposition_with_common_draws(self):
        q = DirichletParams([2.0, 1.0, 4.0])
        tu_v, se_tu = ce_tu(q, CFG, seed=7)
        eu_v, _ = ce_eu(q, CFG, seed=7)
        au_v, _ = entropy_au(q)
        assert abs(tu_v - (au_v + eu_v)) <= 3.0 * se_tu


class TestReports:
    def test_entropy_report_ensemble(self):
        rep = entropy_report(EnsembleRep([[1.0, 0.0], [0.0, 1.0]]))
        assert rep.family == "entropy_default"
        assert rep.estimator == "closed_form"
        assert rep.tu == pytest.approx(rep.au + rep.eu, abs=1e-12)

    def test_entropy_report_dirichlet_uses_mc(self):
        rep = entropy_report(DirichletParams([1, 1]), CFG, seed=8)
        assert rep.estimator == "monte_carlo"
        assert rep.mc_stderr is not None
        assert abs(rep.tu - rep.au - rep.eu) <= 3.0 * rep.mc_stderr

    def test_cross_entropy_report_sentinel(self):
        rep = cross_entropy_report(vertex_uniform(2))
        assert rep.family == "cross_entropy_alt"
        assert rep.tu == math.inf
        assert rep.eu == math.inf
        assert rep.au == 0.0
