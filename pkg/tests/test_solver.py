import unittest
from typing import List

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fairopt.errors import CapacityError, DualFeasibilityError, ValidationError
from fairopt.ggi import WeightVector, ggi, weight_scheme
from fairopt.instances import (
    Instance,
    Permutation,
    agent_values,
    gen_assignment,
    gen_matching,
)
from fairopt.oracle import ggi_brute_force
from fairopt.projection import in_dual_polytope, project_dual, uniform_dual
from fairopt.solver import (
    SolverConfig,
    certificate,
    init_dual,
    maxweight_ratio_bound,
    rank_dual,
    rd_objective,
    reconstruct_rd,
    rho_schedule,
    solve,
    step_size,
    subgradient,
    upper_bound,
)
from fairopt.subsolvers import max_weight

_component_values = st.lists(
    st.integers(-1000, 1000).map(float), min_size=1, max_size=12
)


def _small_instances() -> List[Instance]:
    rng = np.random.default_rng(40)
    instances = []
    for _ in range(12):
        n = int(rng.integers(2, 6))
        d = int(rng.choice([10, 30, 50]))
        instances.append(gen_assignment(n, d, int(rng.integers(0, 10**6))))
    for _ in range(8):
        n = int(rng.integers(2, 5))
        d = int(rng.choice([10, 30, 50]))
        instances.append(gen_matching(n, d, int(rng.integers(0, 10**6))))
    return instances


class DualStartTest(unittest.TestCase):
    def setUp(self) -> None:
        self.inst = Instance("assignment", 2, [[5, 1], [2, 3]])
        self.deltas = [0.75, 0.25]

    def test_uniform(self) -> None:
        y, sol = init_dual(self.inst, self.deltas, "uniform")
        self.assertIsNone(sol)
        self.assertEqual(y.tolist(), [[0.375, 0.25], [0.375, 0.25]])
        np.testing.assert_allclose(project_dual(y, self.deltas), y)

    def test_rank_based(self) -> None:
        y, sol = init_dual(self.inst, self.deltas, "rank-based")
        self.assertEqual(sol, Permutation((0, 1)))
        self.assertEqual(y.tolist(), [[0.0, 0.25], [0.75, 0.25]])
        np.testing.assert_allclose(project_dual(y, self.deltas), y)

    def test_rank_dual_ties_by_index(self) -> None:
        y = rank_dual([4, 4, 4], [3, 2, 1])
        self.assertEqual(y[:, 0].tolist(), [0.0, 0.0, 3.0])
        self.assertEqual(y[:, 1].tolist(), [0.0, 2.0, 2.0])
        self.assertEqual(y[:, 2].tolist(), [1.0, 1.0, 1.0])

    def test_invalid(self) -> None:
        with self.assertRaises(ValidationError):
            init_dual(self.inst, [0.75, 0.25], "random")
        with self.assertRaises(ValidationError):
            init_dual(self.inst, [1.0], "uniform")
        with self.assertRaises(ValidationError):
            rank_dual([1, 2, 3], [0.75, 0.25])


class RankVariablesTest(unittest.TestCase):
    def test_reconstruct(self) -> None:
        rd = reconstruct_rd([5, 2, 9])
        self.assertEqual(rd.r.tolist(), [2.0, 5.0, 9.0])
        self.assertEqual(rd.d[1].tolist(), [0.0, 3.0, 7.0])
        self.assertEqual(rd.d[0].tolist(), [0.0, 0.0, 4.0])
        self.assertEqual(rd.d[2].tolist(), [0.0, 0.0, 0.0])

    def test_constant_values(self) -> None:
        rd = reconstruct_rd([4, 4, 4, 4])
        self.assertEqual(rd.r.tolist(), [4.0] * 4)
        self.assertFalse(np.any(rd.d))
        self.assertFalse(np.any(subgradient([4, 4, 4, 4], rd)))

    def test_subgradient(self) -> None:
        rd = reconstruct_rd([5, 2])
        self.assertEqual(rd.d.tolist(), [[0.0, 0.0], [0.0, 3.0]])
        self.assertEqual(subgradient([5, 2], rd).tolist(), [[-3.0, 0.0], [0.0, 0.0]])

    @settings(max_examples=300, deadline=None, derandomize=True)
    @given(_component_values)
    def test_linearized_objective_is_ggi(self, values: List[float]) -> None:
        w = weight_scheme(len(values), "inverse-square")
        rd = reconstruct_rd(values)
        self.assertAlmostEqual(rd_objective(rd, w), ggi(values, w), delta=1e-7)
        t = np.array(values)
        self.assertTrue(np.all(rd.r[None, :] - rd.d <= t[:, None]))
        self.assertTrue(np.all(np.diff(rd.r) >= 0))

    @settings(max_examples=300, deadline=None, derandomize=True)
    @given(_component_values)
    def test_subgradient_is_not_positive(self, values: List[float]) -> None:
        g = subgradient(values, reconstruct_rd(values))
        self.assertTrue(np.all(g <= 0.0))
        t = np.array(values)
        np.testing.assert_array_equal(
            g, np.minimum(np.sort(t)[None, :] - t[:, None], 0.0)
        )


class StepTest(unittest.TestCase):
    def test_step_size(self) -> None:
        self.assertEqual(step_size(10, 8, 4, 1), 0.5)
        self.assertEqual(step_size(7, 7, 3, 2), 0.0)
        self.assertIsNone(step_size(10, 8, 0, 1))

    def test_rho_schedule(self) -> None:
        bounds = [10, 10, 10, 10, 9, 9, 9, 9]
        self.assertEqual(rho_schedule(bounds, 2.0, 3), [2, 2, 2, 2, 1, 1, 1, 1])
        self.assertEqual(rho_schedule([5, 4, 3, 2], 2.0, 1), [2.0] * 4)
        self.assertEqual(rho_schedule([], 2.0, 3), [])


class BoundTest(unittest.TestCase):
    def test_single_component(self) -> None:
        inst = Instance("assignment", 1, [[7]])
        self.assertEqual(upper_bound(inst, [[1.0]], WeightVector([1.0])), 7.0)

    def test_outside_polytope(self) -> None:
        inst = Instance("assignment", 2, [[5, 1], [2, 3]])
        with self.assertRaises(DualFeasibilityError) as ctx:
            upper_bound(inst, [[1.0, 0.25], [0.0, 0.25]], [0.75, 0.25])
        self.assertAlmostEqual(ctx.exception.violation, 0.25)

    def test_uniform_bound(self) -> None:
        for inst in _small_instances():
            w = weight_scheme(inst.n, "inverse-square")
            best = float(agent_values(inst, max_weight(inst)).sum())
            expected = float(w.w.sum()) / inst.n * best
            self.assertAlmostEqual(
                upper_bound(inst, uniform_dual(w), w), expected, places=6
            )

    def test_bound_is_above_optimum(self) -> None:
        rng = np.random.default_rng(41)
        for inst in _small_instances():
            w = weight_scheme(inst.n, "inverse-square")
            _, opt = ggi_brute_force(inst, w)
            start, _ = init_dual(inst, w, "rank-based")
            scattered = project_dual(rng.normal(size=start.shape), w)
            for y in [uniform_dual(w), start, scattered]:
                self.assertGreaterEqual(upper_bound(inst, y, w), opt - 1e-6)


class CertificateTest(unittest.TestCase):
    def test_single_component(self) -> None:
        self.assertTrue(certificate([[0.5]], [3.0]))
        self.assertTrue(certificate([[0.5]], [-3.0], [0.5]))

    def test_rank_dual(self) -> None:
        deltas = [0.75, 0.2, 0.05]
        values = [4.0, 9.0, 1.0]
        self.assertTrue(certificate(rank_dual(values, deltas), values, deltas))
        self.assertTrue(certificate(rank_dual(values, deltas), values))
        self.assertFalse(certificate(rank_dual(values, deltas), [9.0, 4.0, 1.0]))

    def test_ties_do_not_matter(self) -> None:
        deltas = [0.75, 0.25]
        self.assertTrue(certificate(rank_dual([3, 3], deltas), [3, 3], deltas))
        flipped = np.array([[0.75, 0.25], [0.0, 0.25]])
        self.assertTrue(certificate(flipped, [3, 3], deltas))

    def test_interior_point(self) -> None:
        deltas = weight_scheme(3, "inverse-square").deltas
        self.assertFalse(certificate(uniform_dual(deltas), [1, 2, 3], deltas))

    def test_shape(self) -> None:
        with self.assertRaises(ValidationError):
            certificate(np.zeros((2, 2)), [1, 2, 3])


class RatioBoundTest(unittest.TestCase):
    def test_examples(self) -> None:
        self.assertEqual(maxweight_ratio_bound([5], [1.0]), 1.0)
        self.assertAlmostEqual(maxweight_ratio_bound([4, 4, 4], [0.5, 0.3, 0.2]), 1.0)
        self.assertAlmostEqual(maxweight_ratio_bound([9, 1], [0.75, 0.25]), 2 / 9)

    def test_invalid(self) -> None:
        with self.assertRaises(ValidationError):
            maxweight_ratio_bound([0, 0], [0.75, 0.25])
        with self.assertRaises(ValidationError):
            maxweight_ratio_bound([1, 2, 3], [0.75, 0.25])


class SolveTest(unittest.TestCase):
    def test_single_component(self) -> None:
        report = solve(Instance("assignment", 1, [[7]]), WeightVector([1.0]))
        self.assertEqual(report.best_ggi, 7.0)
        self.assertTrue(report.certificate)
        self.assertEqual(report.iterations, 1)
        self.assertEqual(report.stop_reason, "certificate")
        self.assertEqual(report.ratio_bound, 1.0)

    def test_two_by_two(self) -> None:
        inst = Instance("assignment", 2, [[5, 1], [2, 3]])
        report = solve(inst, WeightVector([1, 0.25]))
        self.assertEqual(report.best_solution, Permutation((0, 1)))
        self.assertEqual(report.best_ggi, 4.25)
        self.assertEqual(report.maxweight_ggi, 4.25)
        self.assertGreaterEqual(report.best_upper_bound, 4.25)

    def test_report(self) -> None:
        inst = gen_assignment(6, 30, 4)
        report = solve(inst, weight_scheme(6, "inverse-square"))
        self.assertEqual(len(report.upper_bounds), report.iterations)
        self.assertEqual(len(report.ggi_values), report.iterations)
        self.assertEqual(len(report.trace), report.iterations)
        self.assertIn(
            report.stop_reason, ("max-iter", "converged", "certificate", "stationary")
        )
        self.assertEqual(report.config, SolverConfig())
        self.assertGreaterEqual(report.wall_time, 0.0)
        values = agent_values(inst, report.best_solution)
        w = weight_scheme(6, "inverse-square")
        self.assertEqual(report.best_ggi, ggi(values, w))

    def test_sandwich_and_incumbent(self) -> None:
        for sign in ["standard", "descent"]:
            config = SolverConfig(max_iter=40, subgradient_sign=sign)
            for inst in _small_instances():
                w = weight_scheme(inst.n, "inverse-square")
                _, opt = ggi_brute_force(inst, w)
                report = solve(inst, w, config)
                for value, bound in zip(report.ggi_values, report.upper_bounds):
                    self.assertLessEqual(value, opt + 1e-9)
                    self.assertLessEqual(opt, bound + 1e-6)
                candidates = list(report.ggi_values)
                if report.maxweight_ggi is not None:
                    candidates.append(report.maxweight_ggi)
                self.assertEqual(report.best_ggi, max(candidates))
                self.assertGreaterEqual(report.best_ggi, report.maxweight_ggi)
                self.assertTrue(in_dual_polytope(report.final_dual, w))

    def test_certificate_is_sound(self) -> None:
        fired = 0
        example = Instance("assignment", 2, [[5, 1], [2, 3]])
        for inst in _small_instances() + [example]:
            w = weight_scheme(inst.n, "inverse-square")
            report = solve(inst, w)
            if report.certificate:
                fired += 1
                _, opt = ggi_brute_force(inst, w)
                self.assertAlmostEqual(report.best_ggi, opt, places=7)
                self.assertEqual(report.stop_reason, "certificate")
        self.assertGreater(fired, 0)

    def test_maxweight_ratio(self) -> None:
        for inst in _small_instances():
            w = weight_scheme(inst.n, "inverse-square")
            report = solve(inst, w, SolverConfig(max_iter=1))
            if report.ratio_bound is None:
                continue
            _, opt = ggi_brute_force(inst, w)
            assert report.maxweight_ggi is not None
            self.assertGreaterEqual(
                report.maxweight_ggi, report.ratio_bound * opt - 1e-9
            )

    def test_rho_is_replayable(self) -> None:
        inst = gen_assignment(7, 50, 9)
        config = SolverConfig(max_iter=60, halving_patience=2)
        report = solve(inst, weight_scheme(7, "inverse-square"), config)
        self.assertEqual(
            rho_schedule(report.upper_bounds, config.rho0, config.halving_patience),
            report.rho_values,
        )

    def test_deterministic(self) -> None:
        inst = gen_matching(4, 30, 2)
        w = weight_scheme(4, "inverse-square")
        a = solve(inst, w)
        b = solve(inst, w)
        self.assertEqual(a.best_solution, b.best_solution)
        self.assertEqual(a.upper_bounds, b.upper_bounds)
        self.assertEqual(a.ggi_values, b.ggi_values)
        self.assertEqual(a.trace, b.trace)
        np.testing.assert_array_equal(a.final_dual, b.final_dual)

    def test_uniform_start(self) -> None:
        inst = gen_assignment(5, 10, 3)
        w = weight_scheme(5, "inverse-square")
        report = solve(inst, w, SolverConfig(init_strategy="uniform"))
        self.assertIsNone(report.maxweight_ggi)
        self.assertIsNone(report.ratio_bound)
        self.assertGreaterEqual(report.best_iteration, 1)
        self.assertEqual(report.best_ggi, max(report.ggi_values))

    def test_logging(self) -> None:
        inst = gen_assignment(3, 10, 1)
        with self.assertLogs("fairopt", level="INFO") as logs:
            solve(inst, weight_scheme(3, "inverse-square"))
        self.assertTrue(any("stopped after" in line for line in logs.output))

    def test_errors(self) -> None:
        inst = gen_assignment(3, 10, 1)
        with self.assertRaises(ValidationError):
            solve(inst, weight_scheme(2, "inverse-square"))
        with self.assertRaises(CapacityError):
            solve(gen_matching(13, 10, 1), weight_scheme(13, "inverse-square"))


class SolverConfigTest(unittest.TestCase):
    def test_defaults(self) -> None:
        config = SolverConfig()
        self.assertEqual(config.max_iter, 200)
        self.assertEqual(config.rho0, 2.0)
        self.assertEqual(config.halving_patience, 3)
        self.assertEqual(config.y_change_tol, 1e-6)
        self.assertEqual(config.init_strategy, "rank-based")
        self.assertEqual(config.subgradient_sign, "standard")
        self.assertEqual(config.replace(max_iter=5).max_iter, 5)

    def test_invalid(self) -> None:
        for changes in [
            {"max_iter": 0},
            {"rho0": 0.0},
            {"halving_patience": 0},
            {"y_change_tol": -1.0},
            {"init_strategy": "lp"},
            {"subgradient_sign": "up"},
        ]:
            with self.assertRaises(ValidationError):
                SolverConfig(**changes)  # type: ignore[arg-type]
