import math

import numpy as np
import pytest

from souq.measures import (
    EuSolverConfig,
    UncertaintyReport,
    au,
    eu,
    eu_bruteforce_oracle,
    eu_dirichlet,
    eu_ensemble,
    eu_objective_dirichlet,
    measure,
    normalize,
    tu,
    tu_restricted,
)
from souq.secondorder import (
    DirichletParams,
    EnsembleRep,
    restrict,
    sample,
    second_order_dirac,
    vertex_uniform,
)
from souq.special import BetaShape, beta_cdf

from oracles import mc_l1_objective

CFG = EuSolverConfig(mc_samples=20_000)


def random_ensemble(rng, k=None, m=None):
    k = k or int(rng.integers(2, 6))
    m = m or int(rng.integers(1, 7))
    return EnsembleRep(rng.dirichlet(np.ones(k), m), rng.dirichlet(np.ones(m)))


class TestTotalUncertainty:
    def test_uniform_dirichlet(self):
        assert tu(DirichletParams([1, 1, 1])) == pytest.approx(2 / 3, abs=1e-15)

    def test_second_order_dirac_on_vertex(self):
        assert tu(second_order_dirac([0.0, 1.0, 0.0])) == 0.0

    def test_two_vertex_ensemble_and_reference_cross_check(self):
        e = EnsembleRep([[1.0, 0.0], [0.0, 1.0]], weights=[0.5, 0.5])
        assert tu(e) == pytest.approx(0.5, abs=1e-15)
        # explicit minimal expected distance to the one-hot references
        mbar = e.weights @ e.atoms
        direct = min(1.0 - mbar[y] for y in range(2))
        assert tu(e) == pytest.approx(direct, abs=1e-15)


class TestAleatoricUncertainty:
    def test_dirac_at_uniform(self):
        v, se = au(second_order_dirac([1 / 3] * 3))
        assert se == 0.0
        assert v == pytest.approx(2 / 3, abs=1e-12)

    def test_vertex_uniform_is_zero(self):
        v, _ = au(vertex_uniform(4))
        assert v == 0.0

    def test_dirichlet_matches_analytic_integral(self):
        # for Dir(1, 1): E[max(x, 1-x)] integrates to 3/4
        v, se = au(DirichletParams([1, 1]), EuSolverConfig(mc_samples=200_000), seed=5)
        assert abs(v - 0.25) <= 3.0 * se


class TestObjectiveDirichlet:
    def test_uniform_pair_at_center(self):
        assert eu_objective_dirichlet(DirichletParams([1, 1]), [0.5, 0.5]) == pytest.approx(
            0.25, abs=1e-12
        )

    def test_uniform_pair_at_vertex(self):
        assert eu_objective_dirichlet(DirichletParams([1, 1]), [0.0, 1.0]) == pytest.approx(
            0.5, abs=1e-12
        )

    def test_minimizer_beats_random_feasible_points(self):
        rng = np.random.default_rng(2)
        q = DirichletParams([2.0, 0.7, 3.5])
        sol = eu_dirichlet(q, CFG)
        for _ in range(20):
            cand = rng.dirichlet(np.ones(3))
            assert sol.value <= eu_objective_dirichlet(q, cand) + 1e-10

    def test_matches_monte_carlo(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            alpha = np.exp(rng.uniform(math.log(0.5), math.log(10), size=3))
            q = DirichletParams(alpha)
            point = rng.dirichlet(np.ones(3))
            draws = sample(q, 200_000, seed=int(rng.integers(1 << 30)))
            mc, se = mc_l1_objective(draws, point)
            assert abs(eu_objective_dirichlet(q, point) - mc) <= 3.0 * se


class TestEuDirichlet:
    def test_uniform_two_class_anchor(self):
        sol = eu_dirichlet(DirichletParams([1, 1]))
        assert sol.lambda_star == pytest.approx(0.0, abs=1e-10)
        np.testing.assert_allclose(sol.minimizer, [0.5, 0.5], atol=1e-10)
        assert sol.value == pytest.approx(0.25, abs=1e-6)

    def test_symmetric_lambda_identity(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            k = int(rng.integers(2, 6))
            a = float(rng.uniform(0.5, 8.0))
            sol = eu_dirichlet(DirichletParams(np.full(k, a)))
            expected = 0.5 - beta_cdf(BetaShape(a, (k - 1) * a), 1.0 / k)
            assert sol.lambda_star == pytest.approx(expected, abs=1e-9)
            np.testing.assert_allclose(sol.minimizer, np.full(k, 1.0 / k), atol=1e-9)

    def test_stationarity_condition(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            k = int(rng.integers(2, 6))
            alpha = np.exp(rng.uniform(math.log(0.3), math.log(15), size=k))
            q = DirichletParams(alpha)
            sol = eu_dirichlet(q)
            a0 = q.alpha0
            for i in range(k):
                level = beta_cdf(BetaShape(float(alpha[i]), a0 - float(alpha[i])), float(sol.minimizer[i]))
                assert abs(level - (0.5 - sol.lambda_star)) <= 1e-8

    def test_agrees_with_grid_oracle(self):
        rng = np.random.default_rng(6)
        cfg = EuSolverConfig(mc_samples=100_000)
        for alpha in ([3.0, 1.0, 1.0], [0.8, 2.0], [5.0, 1.5, 0.6]):
            q = DirichletParams(alpha)
            sol = eu_dirichlet(q, cfg)
            seed = int(rng.integers(1 << 30))
            step = 1e-3 if len(alpha) == 3 else 1e-4
            val, _ = eu_bruteforce_oracle(q, step, cfg, seed=seed)
            draws = sample(q, cfg.mc_samples, seed=seed)
            _, se = mc_l1_objective(draws, sol.minimizer)
            assert abs(sol.value - val) <= max(1e-3, 3.0 * se)

    def test_value_matches_monte_carlo_at_minimizer(self):
        q = DirichletParams([2.5, 0.9, 4.0, 1.1])
        sol = eu_dirichlet(q)
        draws = sample(q, 200_000, seed=17)
        mc, se = mc_l1_objective(draws, sol.minimizer)
        assert abs(sol.value - mc) <= 3.0 * se

    def test_constraint_residual(self):
        sol = eu_dirichlet(DirichletParams([7.0, 0.4, 1.3]))
        assert abs(sol.minimizer.sum() - 1.0) <= 1e-10


class TestEuEnsemble:
    def test_single_atom(self):
        p = [0.3, 0.5, 0.2]
        sol = eu_ensemble(second_order_dirac(p))
        assert sol.value == pytest.approx(0.0, abs=1e-15)
        np.testing.assert_allclose(sol.minimizer, p, atol=1e-12)

    def test_vertex_uniform_two_class(self):
        sol = eu_ensemble(vertex_uniform(2))
        assert sol.value == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_allclose(sol.minimizer, [0.5, 0.5], atol=1e-12)
        assert not sol.unique

    def test_two_atom_flat_interval_example(self):
        e = EnsembleRep([[0.2, 0.8], [0.6, 0.4]], weights=[0.5, 0.5])
        sol = eu_ensemble(e)
        assert sol.value == pytest.approx(0.2, abs=1e-12)
        np.testing.assert_allclose(sol.minimizer, [0.4, 0.6], atol=1e-12)
        val, _ = eu_bruteforce_oracle(e, 1e-4)
        assert val == pytest.approx(0.2, abs=1e-9)

    def test_matches_oracle_on_random_ensembles(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            k = int(rng.integers(2, 4))
            e = random_ensemble(rng, k=k)
            sol = eu_ensemble(e)
            step = 1e-4 if k == 2 else 1e-3
            val, _ = eu_bruteforce_oracle(e, step)
            assert sol.value <= val + 1e-12  # solver is exact, grid is not
            assert val - sol.value <= k * step

    def test_minimizer_always_feasible(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            e = random_ensemble(rng)
            sol = eu_ensemble(e)
            assert sol.minimizer.min() >= -1e-12
            assert sol.minimizer.sum() == pytest.approx(1.0, abs=1e-9)


class TestBruteForceOracle:
    def test_single_atom(self):
        p = [0.25, 0.75]
        val, arg = eu_bruteforce_oracle(second_order_dirac(p), 1e-2)
        assert val == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(arg, p, atol=1e-2)

    def test_dirichlet_analytic_anchor(self):
        val, arg = eu_bruteforce_oracle(DirichletParams([1, 1]), 1e-3, CFG, seed=9)
        assert val == pytest.approx(0.25, abs=5e-3)
        np.testing.assert_allclose(arg, [0.5, 0.5], atol=0.05)

    def test_k_guard(self):
        with pytest.raises(ValueError):
            eu_bruteforce_oracle(DirichletParams(np.ones(5)), 0.1)

    def test_lattice_size_guard(self):
        with pytest.raises(ValueError):
            eu_bruteforce_oracle(DirichletParams(np.ones(4)), 1e-4)


class TestDispatchAndReports:
    def test_eu_dispatches(self):
        assert eu(DirichletParams([1, 1])).value == pytest.approx(0.25, abs=1e-6)
        assert eu(vertex_uniform(3)).value == pytest.approx(2 / 3, abs=1e-12)

    def test_normalize_examples(self):
        rep = UncertaintyReport(tu=2 / 3, au=0.5, eu=0.25, k=3)
        out = normalize(rep)
        assert out.tu == pytest.approx(1.0, abs=1e-12)
        assert out.normalized

    def test_normalize_zero_report(self):
        rep = UncertaintyReport(tu=0.0, au=0.0, eu=0.0, k=4)
        out = normalize(rep)
        assert (out.tu, out.au, out.eu) == (0.0, 0.0, 0.0)

    def test_normalize_scales_by_two_for_binary(self):
        rep = UncertaintyReport(tu=0.3, au=0.25, eu=0.1, k=2)
        assert normalize(rep).au == pytest.approx(0.5, abs=1e-12)

    def test_double_normalization_rejected(self):
        rep = normalize(UncertaintyReport(tu=0.3, au=0.25, eu=0.1, k=2))
        with pytest.raises(ValueError):
            normalize(rep)

    def test_measure_report_fields(self):
        rep = measure(DirichletParams([1, 1]), CFG, seed=3)
        assert rep.estimator == "lagrangian"
        assert rep.mc_stderr is not None
        assert rep.lambda_star == pytest.approx(0.0, abs=1e-10)
        assert rep.tu == pytest.approx(0.5, abs=1e-12)
        rep.validate()

    def test_measure_validates_on_random_inputs(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            if rng.random() < 0.5:
                q = random_ensemble(rng)
            else:
                k = int(rng.integers(2, 6))
                q = DirichletParams(np.exp(rng.uniform(math.log(0.3), math.log(20), k)))
            rep = measure(q, CFG, seed=int(rng.integers(1 << 30)))
            rep.validate()
            bound = (rep.k - 1) / rep.k + 1e-9 + 3.0 * (rep.mc_stderr or 0.0)
            assert max(rep.tu, rep.au, rep.eu) <= bound

    def test_label_permutation_invariance(self):
        rng = np.random.default_rng(12)
        alpha = np.array([0.7, 3.0, 1.2])
        perm = np.array([2, 0, 1])
        a, b = DirichletParams(alpha), DirichletParams(alpha[perm])
        assert tu(a) == pytest.approx(tu(b), abs=1e-15)
        sa, sb = eu_dirichlet(a), eu_dirichlet(b)
        assert sa.value == pytest.approx(sb.value, abs=1e-9)
        np.testing.assert_allclose(sa.minimizer[perm], sb.minimizer, atol=1e-8)
        e = random_ensemble(rng, k=3)
        e_perm = EnsembleRep(e.atoms[:, perm], e.weights)
        assert tu(e) == pytest.approx(tu(e_perm), abs=1e-12)
        assert au(e)[0] == pytest.approx(au(e_perm)[0], abs=1e-12)
        assert eu_ensemble(e).value == pytest.approx(eu_ensemble(e_perm).value, abs=1e-12)

    def test_tu_restricted_convention(self):
        q = DirichletParams([2, 1, 1])
        r = restrict(q, [1, 2])
        assert tu_restricted(r) == pytest.approx(0.75, abs=1e-12)

    def test_maximal_eu_requires_zero_au(self):
        # on vertex mixtures EU = 1 - max weight, so the bound is attained
        # exactly at uniform weights, where AU is zero; uneven weights fall
        # strictly below it
        from souq.secondorder import dirac_mixture

        rng = np.random.default_rng(14)
        for k in (2, 3, 4):
            bound = (k - 1) / k
            uniform = dirac_mixture(np.full(k, 1.0 / k))
            assert eu_ensemble(uniform).value >= bound - 1e-9
            assert au(uniform)[0] <= 1e-9
            w = rng.dirichlet(np.ones(k))
            if np.abs(w - 1.0 / k).max() < 1e-3:
                continue
            skewed = dirac_mixture(w)
            sol = eu_ensemble(skewed)
            assert sol.value == pytest.approx(1.0 - w.max(), abs=1e-12)
            assert sol.value < bound - 1e-9
