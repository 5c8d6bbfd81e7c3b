import numpy as np
from django.test import SimpleTestCase

from pareto.problems import diagonal_fraction
from pareto.solvers import SolverConfig, spg1
from pareto.tensor import DenseSymmetricTensor, IdentityKind, ZIdentity
from pareto.verify import (
    diagonal_pareto_spectrum,
    fd_gradient,
    fd_jacobian,
    is_pareto_eigenpair,
    residual,
    spectrum_extremes,
)


def _neighbourhood(values, reduce):
    """3x3 neighbourhood max or min of a grid, edges repeated."""
    windows = np.lib.stride_tricks.sliding_window_view(np.pad(values, 1, mode='edge'), (3, 3))
    return reduce(windows, axis=(-2, -1))


def _diagonal(diag, order=4):
    entries = np.zeros((len(diag),) * order)
    for i, a in enumerate(diag):
        entries[(i,) * order] = a
    return DenseSymmetricTensor(entries, check=False)


class ResidualTest(SimpleTestCase):
    def setUp(self):
        self.A = diagonal_fraction(5)
        self.B = ZIdentity(4, 5)
        self.e5 = np.eye(5)[4]

    def test_exact_eigenpair_has_zero_residual(self):
        res = residual(self.A, self.B, 0.8, self.e5)
        self.assertEqual(res.max_component, 0.0)
        self.assertEqual(res.as_dict(), {'primal': 0.0, 'dual': 0.0, 'comp': 0.0})

    def test_certification_is_scale_invariant(self):
        self.assertTrue(is_pareto_eigenpair(self.A, self.B, 0.8, 3.0 * self.e5, 1e-12))
        self.assertFalse(is_pareto_eigenpair(self.A, self.B, 0.8, np.zeros(5), 1e-4))

    def test_wrong_eigenvalue_is_rejected(self):
        self.assertFalse(is_pareto_eigenpair(self.A, self.B, 0.7, self.e5, 1e-4))

    def test_negative_component_counts_as_primal_violation(self):
        x = np.array([-0.1, 0.0, 0.0, 0.0, 1.0])
        self.assertAlmostEqual(residual(self.A, self.B, 0.8, x).primal, 0.1)


class DiagonalSpectrumTest(SimpleTestCase):
    def test_largest_z_eigenvalue_of_fraction_diagonal_is_exact(self):
        diag = [(i - 1) / i for i in range(1, 6)]
        spectrum = diagonal_pareto_spectrum(diag, 4)
        smallest, largest = spectrum_extremes(spectrum)
        self.assertEqual(largest, 0.8)
        self.assertEqual(smallest, 0.0)
        top = max(spectrum, key=lambda c: c.lam)
        self.assertEqual(top.support, (4,))
        np.testing.assert_array_equal(top.x, np.eye(5)[4])

    def test_two_element_face_closed_form(self):
        spectrum = diagonal_pareto_spectrum([1.0, 2.0, -0.5], 4)
        values = sorted(c.lam for c in spectrum)
        np.testing.assert_allclose(values, [-0.5, 2.0 / 3.0, 1.0, 2.0])
        face = next(c for c in spectrum if c.support == (0, 1))
        np.testing.assert_allclose(face.x, [np.sqrt(2.0 / 3.0), np.sqrt(1.0 / 3.0), 0.0])

    def test_h_spectrum_needs_equal_values_on_the_face(self):
        spectrum = diagonal_pareto_spectrum([1.0, 1.0, 3.0], 4, IdentityKind.H)
        self.assertEqual(sorted((c.lam, c.support) for c in spectrum), [
            (1.0, (0,)), (1.0, (0, 1)), (1.0, (1,)), (3.0, (2,)),
        ])

    def test_every_candidate_certifies(self):
        diag = [0.7, -0.2, 1.3]
        A = _diagonal(diag)
        B = ZIdentity(4, 3)
        for candidate in diagonal_pareto_spectrum(diag, 4):
            self.assertTrue(is_pareto_eigenpair(A, B, candidate.lam, candidate.x, 1e-10))

    def test_spectrum_is_complete_against_solver_scan(self):
        angles = np.arange(0.0, np.pi / 2 + 1e-9, 0.01)
        theta, phi = np.meshgrid(angles, angles, indexing='ij')
        points = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)
        B = ZIdentity(4, 3)
        certified = 0
        for seed in range(3):
            diag = np.random.default_rng(seed).uniform(-1.0, 1.0, size=3)
            A = _diagonal(diag)
            known = np.array([c.lam for c in diagonal_pareto_spectrum(diag, 4)])
            values = (points ** 4 * diag).sum(axis=-1)
            for maximize, reduce in ((True, np.max), (False, np.min)):
                mask = values == _neighbourhood(values, reduce)
                starts = np.unique(np.round(points[mask], 6), axis=0)
                for x0 in starts:
                    report = spg1(A, B, x0, SolverConfig(maximize=maximize))
                    if report.converged:
                        certified += 1
                        with self.subTest(seed=seed, x0=tuple(x0)):
                            self.assertLess(np.abs(known - report.pair.lam).min(), 1e-4)
        self.assertGreater(certified, 0)

    def test_complementarity_scales_with_degree_m(self):
        A = _diagonal([0.7, -0.2, 1.3])
        B = ZIdentity(4, 3)
        x = np.array([0.3, 0.5, 0.8])
        base = residual(A, B, 0.9, x).comp
        for s in (0.5, 2.0, 3.0):
            self.assertAlmostEqual(residual(A, B, 0.9, s * x).comp, s ** 4 * base, delta=1e-10 * s ** 4 * base)


class FiniteDifferenceTest(SimpleTestCase):
    def test_gradient_of_quadratic(self):
        x = np.array([1.0, -2.0, 0.5])
        np.testing.assert_allclose(fd_gradient(lambda v: v @ v, x), 2 * x, atol=1e-8)

    def test_jacobian_of_linear_map(self):
        M = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_allclose(fd_jacobian(lambda v: M @ v, np.array([0.3, -0.1])), M, atol=1e-8)
