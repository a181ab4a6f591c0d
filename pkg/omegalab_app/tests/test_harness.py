import math
import os
from dataclasses import replace
from unittest import mock

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_array_equal

from omegalab_app import __version__
from omegalab_app.exceptions import InvalidConfig, NotSquare, ShapeMismatch
from omegalab_app.services.harness_service import (
    CHECK_NAMES, DEFAULT_PLAN_SHAPES, CheckOutcome, OmegaCache, TrialConfig, _merge,
    check_corollary_2_10, check_equality_condition_2_4, check_kernel_identities, check_lemma_2_8,
    check_lemma_2_8_structured, check_norm_axioms, check_profile_flatness, check_refinement_2_3,
    check_refinement_degeneracy, check_sandwich, check_scaled_bounds_2_5, check_triangle_2_9,
    check_engine_cross_validation, combine_reports, corner_norm, default_plan, default_trial_config,
    gen_instance, improvement_margin, lemma_2_8_terms, run_suite, tight_triangle, trial_seed, triangle_terms
)
from omegalab_app.services.linalg_service import Sym2x2, derive_seed, sym2x2_norm
from omegalab_app.services.module_service import AlgebraElement, ModuleElement, ModuleShape, module_norm
from omegalab_app.services.radius_service import RadiusConfig, RadiusResult, numerical_radius_bruteforce

# ==========================================================================
# TESTS – harness_service
# ==========================================================================

SMALL = RadiusConfig(grid_points=64)
COLUMN = ModuleShape(n=1, m=2)
SCALAR = ModuleShape(n=1, m=1)
E1 = ModuleElement(COLUMN, [[1], [0]])
E2 = ModuleElement(COLUMN, [[0], [1]])


def trial_config(shape=COLUMN, trials=1, **overrides):
    return TrialConfig(shape=shape, trials=trials, radius_cfg=SMALL, **overrides)


def assert_passes(test, outcome):
    test.assertEqual(outcome.violations, 0, outcome)


class TrialConfigTests(SimpleTestCase):

    def test_invalid_values(self):
        for overrides in ({'trials': 0}, {'tol': 0.0}, {'master_seed': -1}, {'workers': 0},
                          {'checks': ('bogus',)}, {'replay_seed': 2 ** 64}):
            values = {'trials': 1, **overrides}
            with self.assertRaises(InvalidConfig, msg=overrides):
                TrialConfig(shape=COLUMN, radius_cfg=SMALL, **values)

    def test_defaults(self):
        cfg = trial_config()
        self.assertEqual(cfg.tol, 1e-8)
        self.assertEqual(cfg.scale_samples, (2j, complex(-0.5, 1.5), 0j, complex(-3.0, 0.0)))
        self.assertTrue(cfg.wants('sandwich'))
        self.assertFalse(trial_config(checks=['lemma_2_8']).wants('sandwich'))

    @override_settings(OMEGALAB={**settings.OMEGALAB, 'TRIAL_WORKERS': 0})
    def test_workers_default_to_one_per_core(self):
        self.assertEqual(default_trial_config(COLUMN).workers, os.cpu_count() or 1)
        self.assertEqual(default_trial_config(COLUMN, workers=3).workers, 3)


class InstanceTests(SimpleTestCase):

    def test_same_seed_same_triple(self):
        shape = ModuleShape(n=2, m=3)
        first, second = gen_instance(99, shape), gen_instance(99, shape)
        for left, right in zip(first, second):
            assert_array_equal(left.mat, right.mat)
        x, y, a = first
        self.assertEqual((x.mat.shape, y.mat.shape, a.mat.shape), ((3, 2), (3, 2), (2, 2)))
        self.assertFalse(np.array_equal(x.mat, y.mat))

    def test_entry_variance(self):
        shape = ModuleShape(n=1, m=2)
        entries = np.concatenate([gen_instance(derive_seed(5, k), shape)[0].mat.ravel() for k in range(5000)])
        self.assertAlmostEqual(float(np.mean(np.abs(entries) ** 2)), 1.0, delta=0.05)

    def test_trial_seeds_depend_on_shape_and_index(self):
        cfg = trial_config()
        seeds = {trial_seed(cfg, k) for k in range(50)}
        self.assertEqual(len(seeds), 50)
        self.assertNotEqual(trial_seed(cfg, 0), trial_seed(trial_config(shape=SCALAR), 0))


class NormCheckTests(SimpleTestCase):

    def test_zero_element(self):
        cfg = trial_config()
        zero = ModuleElement.zero(COLUMN)
        assert_passes(self, check_norm_axioms(zero, E1, cfg.scale_samples, cfg))
        assert_passes(self, check_sandwich(zero, cfg))

    def test_scaled_unit_vector(self):
        cfg = trial_config()
        cache = OmegaCache(SMALL)
        assert_passes(self, check_norm_axioms(E1, E2, 2j, cfg, cache))
        self.assertAlmostEqual(cache(2j * E1).value, 1.0, delta=1e-12)
        self.assertAlmostEqual(cache(E1).value, 0.5, delta=1e-12)
        assert_passes(self, check_sandwich(E1, cfg, cache))

    def test_random_elements(self):
        cfg = trial_config(shape=ModuleShape(n=2, m=3))
        for k in range(3):
            x, y, _a = gen_instance(derive_seed(7, k), cfg.shape)
            cache = OmegaCache(SMALL)
            assert_passes(self, check_norm_axioms(x, y, cfg.scale_samples, cfg, cache))
            assert_passes(self, check_sandwich(x, cfg, cache))

    def test_lower_bound_is_attained(self):
        cfg = trial_config(shape=ModuleShape(n=4, m=4))
        for k in range(5):
            x, _y, _a = gen_instance(derive_seed(8, k), cfg.shape)
            norm = module_norm(x)
            self.assertLessEqual(abs(OmegaCache(SMALL)(x).value - 0.5 * norm), 1e-8 * (1 + norm))

    def test_loose_lower_bound_is_a_violation(self):
        def loose(element):
            return RadiusResult(value=0.75 * module_norm(element), argmax_theta=0.0, certificate=0.0)

        outcome = check_sandwich(E1, trial_config(), loose)
        self.assertEqual(outcome.violations, 1)
        self.assertAlmostEqual(outcome.worst_margin, -0.25, delta=1e-12)


class RefinementCheckTests(SimpleTestCase):

    def test_zero_element(self):
        outcome, terms = check_refinement_2_3(ModuleElement.zero(COLUMN), trial_config())
        assert_passes(self, outcome)
        self.assertEqual((terms.gamma, terms.gamma_prime, terms.delta, terms.delta_prime, terms.lower_bound),
                         (0.0, 0.0, 0.0, 0.0, 0.0))

    def test_unit_vector(self):
        outcome, terms = check_refinement_2_3(E1, trial_config())
        assert_passes(self, outcome)
        self.assertAlmostEqual(terms.gamma, 1.0, delta=1e-12)
        self.assertAlmostEqual(terms.gamma_prime, 1.0, delta=1e-12)
        self.assertAlmostEqual(terms.lower_bound, 0.5, delta=1e-12)
        self.assertLessEqual(max(terms.delta, terms.delta_prime), 1e-12)

    def test_terms_degenerate_on_random_elements(self):
        cfg = trial_config(shape=ModuleShape(n=3, m=2))
        for k in range(3):
            x = gen_instance(derive_seed(8, k), cfg.shape)[0]
            outcome, terms = check_refinement_2_3(x, cfg)
            assert_passes(self, outcome)
            assert_passes(self, check_refinement_degeneracy(x, terms))
            self.assertGreaterEqual(terms.gamma, module_norm(x) - 1e-9)


class EqualityConditionTests(SimpleTestCase):

    def test_examples(self):
        cfg = trial_config()
        for x in (ModuleElement.zero(COLUMN), E1):
            outcome = check_equality_condition_2_4(x, cfg)
            assert_passes(self, outcome)
            self.assertGreaterEqual(outcome.worst_margin, 0.0)

    def test_profile_flatness(self):
        cfg = trial_config(shape=ModuleShape(n=2, m=2))
        for k in range(3):
            assert_passes(self, check_profile_flatness(gen_instance(derive_seed(9, k), cfg.shape)[0], cfg))


class ScaledBoundTests(SimpleTestCase):

    def test_scalar_example(self):
        x, a = ModuleElement(SCALAR, [[1]]), AlgebraElement(SCALAR, [[1]])
        outcome = check_scaled_bounds_2_5(x, a, trial_config(shape=SCALAR))
        assert_passes(self, outcome)
        self.assertAlmostEqual(improvement_margin(x, a, trial_config(shape=SCALAR)), 0.0, delta=1e-12)

    def test_skew_adjoint_cancels(self):
        x, a = ModuleElement(SCALAR, [[1]]), AlgebraElement(SCALAR, [[1j]])
        assert_passes(self, check_scaled_bounds_2_5(x, a, trial_config(shape=SCALAR)))

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeMismatch):
            check_scaled_bounds_2_5(E1, AlgebraElement.identity(ModuleShape(n=2, m=2)), trial_config())

    def test_improvement_is_usually_strict(self):
        cfg = trial_config(shape=ModuleShape(n=2, m=2))
        strict = 0
        for k in range(20):
            x, _y, a = gen_instance(derive_seed(10, k), cfg.shape)
            assert_passes(self, check_scaled_bounds_2_5(x, a, cfg))
            strict += improvement_margin(x, a, cfg) > 0
        self.assertGreaterEqual(strict, 18)


class LemmaTests(SimpleTestCase):

    def test_hand_example(self):
        radius, bound = lemma_2_8_terms(np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]]))
        self.assertAlmostEqual(radius, 1.0, delta=1e-12)
        self.assertEqual(bound, 2.0)

    def test_identity_is_tight(self):
        radius, bound = lemma_2_8_terms(np.eye(2), np.eye(2))
        self.assertAlmostEqual(radius, 2.0, delta=1e-12)
        self.assertAlmostEqual(bound, 2.0, delta=1e-12)
        assert_passes(self, check_lemma_2_8(np.eye(2), np.eye(2)))

    def test_zero(self):
        outcome = check_lemma_2_8(np.zeros((3, 3)), np.zeros((3, 3)))
        assert_passes(self, outcome)
        self.assertEqual(outcome.worst_margin, 0.0)

    def test_errors(self):
        with self.assertRaises(NotSquare):
            check_lemma_2_8(np.zeros((2, 3)), np.zeros((2, 3)))
        with self.assertRaises(ShapeMismatch):
            check_lemma_2_8(np.eye(2), np.eye(3))

    def test_structured_pair(self):
        cfg = trial_config(shape=ModuleShape(n=2, m=3))
        x, y, _a = gen_instance(11, cfg.shape)
        assert_passes(self, check_lemma_2_8_structured(x, y, np.exp(0.9j), cfg))


class TriangleTests(SimpleTestCase):

    def test_orthogonal_columns(self):
        cfg = trial_config()
        cache = OmegaCache(SMALL)
        self.assertAlmostEqual(corner_norm(E1, E2), 1.0, delta=1e-12)
        middle = sym2x2_norm(Sym2x2(p=cache(E1).value, s=0.5 * math.sqrt(corner_norm(E1, E2)), q=cache(E2).value))
        self.assertAlmostEqual(middle, 1.0, delta=1e-12)
        self.assertAlmostEqual(cache(E1 + E2).value, math.sqrt(0.5), delta=1e-12)
        assert_passes(self, check_triangle_2_9(E1, E2, cfg, cache))

    def test_equal_arguments_give_equality_chain(self):
        cfg = trial_config(shape=ModuleShape(n=2, m=3))
        assert_passes(self, check_triangle_2_9(E1, E1, trial_config()))
        self.assertAlmostEqual(corner_norm(E1, E1), 4.0 * 0.5 * 0.5, delta=1e-12)
        for k in range(3):
            x, _y, _a = gen_instance(derive_seed(14, k), cfg.shape)
            cache = OmegaCache(SMALL)
            terms = triangle_terms(x, x, cache)
            self.assertTrue(tight_triangle(x, x))
            self.assertLessEqual(abs(terms.omega_sum.value - terms.middle), 1e-8)
            self.assertLessEqual(abs(terms.middle - 2.0 * terms.omega_x.value), 1e-8)
            self.assertLessEqual(abs(cache(2 * x).value - 2.0 * cache(x).value), 1e-8)
            assert_passes(self, check_triangle_2_9(x, x, cfg, cache))

    def test_zero_argument_gives_omega_of_the_other(self):
        cfg = trial_config(shape=ModuleShape(n=3, m=2))
        zero = ModuleElement.zero(cfg.shape)
        _x, y, _a = gen_instance(derive_seed(15, 0), cfg.shape)
        cache = OmegaCache(SMALL)
        for terms in (triangle_terms(zero, y, cache), triangle_terms(y, zero, cache)):
            self.assertEqual(terms.corner, 0.0)
            self.assertAlmostEqual(terms.middle, cache(y).value, delta=1e-12)
            self.assertAlmostEqual(terms.omega_sum.value, cache(y).value, delta=1e-12)
        assert_passes(self, check_triangle_2_9(ModuleElement.zero(COLUMN), E2, trial_config()))
        self.assertFalse(tight_triangle(E1, E2))

    def test_broken_equality_chain_is_a_violation(self):
        def underestimates_sums(element):
            norm = module_norm(element)
            value = 0.5 * norm if norm < 1.5 else 0.4 * norm
            return RadiusResult(value=value, argmax_theta=0.0, certificate=0.0)

        outcome = check_triangle_2_9(E1, E1, trial_config(), underestimates_sums)
        self.assertEqual(outcome.violations, 1)

    def test_random_pairs(self):
        cfg = trial_config(shape=ModuleShape(n=3, m=3))
        for k in range(3):
            x, y, _a = gen_instance(derive_seed(12, k), cfg.shape)
            assert_passes(self, check_triangle_2_9(x, y, cfg))


class CorollaryTests(SimpleTestCase):

    def test_equal_arguments_satisfy_consequent(self):
        outcome = check_corollary_2_10(E1, E1, trial_config())
        assert_passes(self, outcome)
        self.assertEqual(outcome.vacuous, 0)

    def test_opposite_arguments_are_vacuous(self):
        outcome = check_corollary_2_10(E1, -E1, trial_config())
        assert_passes(self, outcome)
        self.assertEqual(outcome.vacuous, 1)
        self.assertEqual(outcome.worst_margin, math.inf)


class KernelAndCrossValidationTests(SimpleTestCase):

    def test_random_instances(self):
        cfg = trial_config(shape=ModuleShape(n=3, m=2))
        for k in range(3):
            seed = derive_seed(13, k)
            x, y, a = gen_instance(seed, cfg.shape)
            assert_passes(self, check_kernel_identities(x, y, a, cfg, seed))
            assert_passes(self, check_engine_cross_validation(x, a, cfg))

    def test_engine_disagreeing_with_dense_sweep_is_a_violation(self):
        cfg = trial_config(shape=ModuleShape(n=3, m=2))
        x, _y, a = gen_instance(derive_seed(13, 0), cfg.shape)
        inflated = numerical_radius_bruteforce(a.mat, 1024) + 1.0
        target = 'omegalab_app.services.harness_service.numerical_radius_bruteforce'
        with mock.patch(target, return_value=inflated) as dense:
            outcome = check_engine_cross_validation(x, a, cfg)
        dense.assert_called_once()
        self.assertEqual(outcome.violations, 1)


class MergeTests(SimpleTestCase):

    def test_lower_margin_wins_and_ties_keep_first(self):
        first = CheckOutcome('sandwich', 1, 0, 0.5, witness_seed=1)
        second = CheckOutcome('sandwich', 1, 1, -0.5, witness_seed=2)
        merged = _merge(first, second)
        self.assertEqual((merged.trials, merged.violations, merged.worst_margin, merged.witness_seed),
                         (2, 1, -0.5, 2))
        self.assertEqual(_merge(first, replace(first, witness_seed=3)).witness_seed, 1)
        self.assertIs(_merge(None, first), first)


class SuiteTests(SimpleTestCase):

    def test_single_trial_passes(self):
        report = run_suite(trial_config(shape=SCALAR, master_seed=0))
        self.assertTrue(report.passed)
        self.assertEqual(report.version, __version__)
        self.assertEqual(tuple(outcome.name for outcome in report.outcomes), CHECK_NAMES)
        self.assertEqual(report.outcome('triangle_2_9').trials, 2)
        self.assertEqual(report.outcome('lemma_2_8').trials, 3)
        for outcome in report.outcomes:
            self.assertIsNotNone(outcome.witness_seed)
            self.assertLessEqual(outcome.violations, outcome.trials)

    def test_deterministic_and_schedule_independent(self):
        cfg = trial_config(shape=ModuleShape(n=2, m=2), trials=3, master_seed=7)
        first, second = run_suite(cfg), run_suite(cfg)
        self.assertEqual(first, second)
        pooled = run_suite(replace(cfg, workers=2))
        self.assertEqual(pooled.outcomes, first.outcomes)

    def test_replay_reproduces_a_trial(self):
        cfg = trial_config(shape=ModuleShape(n=1, m=3), trials=2, master_seed=3)
        single = run_suite(replace(cfg, trials=1))
        replayed = run_suite(replace(cfg, replay_seed=trial_seed(cfg, 0)))
        self.assertEqual(replayed.outcomes, single.outcomes)
        self.assertEqual(replayed.config[0].trials, 1)
        self.assertEqual(replayed.config[0].replay_seed, trial_seed(cfg, 0))

    def test_check_filter(self):
        report = run_suite(trial_config(checks=('sandwich', 'lemma_2_8')))
        self.assertEqual([outcome.name for outcome in report.outcomes], ['sandwich', 'lemma_2_8'])

    def test_default_plan_and_combination(self):
        plan = default_plan(master_seed=4, trials=1, radius_cfg=SMALL, checks=('sandwich',))
        self.assertEqual([(cfg.shape.n, cfg.shape.m) for cfg in plan], list(DEFAULT_PLAN_SHAPES))
        self.assertTrue(all(cfg.trials == 1 and cfg.master_seed == 4 for cfg in plan))
        combined = combine_reports(run_suite(cfg) for cfg in plan[:2])
        self.assertEqual(len(combined.config), 2)
        self.assertEqual(combined.outcome('sandwich').trials, 2)
        self.assertTrue(combined.passed)
