import numpy as np
from django.test import SimpleTestCase

from pareto import merit
from pareto.exceptions import MeritDomainError, SingularDenominatorError
from pareto.merit import MeritKind
from pareto.problems import random_symmetric
from pareto.projection import project_sphere_plus
from pareto.tensor import HIdentity, ZIdentity, symmetrize
from pareto.verify import fd_gradient, fd_jacobian


def _instances(count=20):
    """(A, B, x) triples over both identities with x in the open positive orthant."""
    rng = np.random.default_rng(2024)
    for seed in range(count):
        n = 2 + seed % 3
        A = random_symmetric(n, 4, seed)
        B = ZIdentity(4, n) if seed % 2 == 0 else HIdentity(4, n)
        yield A, B, project_sphere_plus(rng.uniform(0.2, 1.0, size=n))


def _positive_tensor(n, seed):
    rng = np.random.default_rng(seed)
    return symmetrize(rng.uniform(0.5, 1.5, size=(n,) * 4))


class RayleighTest(SimpleTestCase):
    def test_gradient_matches_finite_differences(self):
        for A, B, x in _instances():
            g = merit.rayleigh_gradient(A, B, x)
            oracle = fd_gradient(lambda v: merit.rayleigh_value(A, B, v), x)
            np.testing.assert_allclose(g, oracle, atol=1e-5 * max(1.0, np.linalg.norm(g)))

    def test_hessian_matches_finite_differences(self):
        for A, B, x in _instances():
            H = merit.rayleigh_hessian(A, B, x)
            oracle = fd_jacobian(lambda v: merit.rayleigh_gradient(A, B, v), x)
            np.testing.assert_allclose(H, oracle, atol=1e-4 * max(1.0, np.abs(H).max()))
            np.testing.assert_array_equal(H, H.T)

    def test_gradient_is_tangent_to_the_sphere(self):
        for A, B, x in _instances(100):
            g = merit.rayleigh_gradient(A, B, x)
            self.assertAlmostEqual(float(x @ g), 0.0, delta=1e-10 * max(1.0, np.linalg.norm(g)))

    def test_gradient_is_homogeneous_of_degree_minus_one(self):
        for A, B, x in _instances():
            g = merit.rayleigh_gradient(A, B, x)
            for c in (0.5, 2.0, 10.0):
                scaled = merit.rayleigh_gradient(A, B, c * x)
                self.assertLessEqual(np.linalg.norm(scaled - g / c), 1e-8 * max(1e-12, np.linalg.norm(g / c)))

    def test_value_is_scale_invariant(self):
        A, B, x = next(_instances(1))
        self.assertAlmostEqual(merit.rayleigh_value(A, B, 3.0 * x), merit.rayleigh_value(A, B, x), delta=1e-12)

    def test_vanishing_denominator(self):
        A = random_symmetric(2, 4, 0)
        with self.assertRaises(SingularDenominatorError):
            merit.rayleigh_value(A, HIdentity(4, 2), np.zeros(2))

    def test_evaluate_reports_lambda(self):
        A, B, x = next(_instances(1))
        ev = merit.evaluate(A, B, x, MeritKind.RAYLEIGH)
        self.assertEqual(ev.value, ev.lam)
        np.testing.assert_array_equal(ev.gradient, merit.rayleigh_gradient(A, B, x))


class LogarithmicTest(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(8)

    def test_gradient_and_hessian_match_finite_differences(self):
        for seed in range(20):
            n = 2 + seed % 3
            A = _positive_tensor(n, seed)
            B = ZIdentity(4, n) if seed % 2 else HIdentity(4, n)
            x = project_sphere_plus(self.rng.uniform(0.2, 1.0, size=n))

            g = merit.log_gradient(A, B, x)
            np.testing.assert_allclose(g, fd_gradient(lambda v: merit.log_value(A, B, v), x), atol=1e-5)
            H = merit.log_hessian(A, B, x)
            oracle = fd_jacobian(lambda v: merit.log_gradient(A, B, v), x)
            np.testing.assert_allclose(H, oracle, atol=1e-4 * max(1.0, np.abs(H).max()))
            self.assertAlmostEqual(float(x @ g), 0.0, delta=1e-10)

    def test_log_of_rayleigh_quotient(self):
        A = _positive_tensor(3, 1)
        B = ZIdentity(4, 3)
        x = project_sphere_plus([0.3, 0.5, 0.9])
        self.assertAlmostEqual(merit.log_value(A, B, x), np.log(merit.rayleigh_value(A, B, x)), delta=1e-12)
        self.assertEqual(merit.evaluate(A, B, x, 'log').lam, merit.rayleigh_value(A, B, x))

    def test_domain_error_names_the_tensor(self):
        A = symmetrize(-np.ones((2, 2, 2, 2)))
        with self.assertRaises(MeritDomainError) as ctx:
            merit.log_value(A, ZIdentity(4, 2), np.array([0.6, 0.8]))
        self.assertEqual(ctx.exception.tensor_name, 'A')
        self.assertAlmostEqual(ctx.exception.value, -(1.4 ** 4))

    def test_dispatch_by_kind(self):
        A = _positive_tensor(2, 3)
        B = HIdentity(4, 2)
        x = np.array([0.6, 0.8])
        self.assertEqual(merit.value(A, B, x, 'log'), merit.log_value(A, B, x))
        np.testing.assert_array_equal(merit.hessian(A, B, x, 'rayleigh'), merit.rayleigh_hessian(A, B, x))
