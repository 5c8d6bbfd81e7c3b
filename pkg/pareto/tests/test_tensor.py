import io
import json
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from pareto.exceptions import DimensionMismatchError, OperatorDomainError, SymmetryError, TensorFormatError
from pareto.problems import random_symmetric
from pareto.tensor import (
    DenseSymmetricTensor,
    HIdentity,
    IdentityKind,
    ZIdentity,
    as_vector,
    contract_m,
    contract_m_minus_1,
    contract_m_minus_2,
    dump_tensor,
    from_index_classes,
    identity,
    is_symmetric,
    load_tensor,
    principal_subtensor,
    symmetrize,
)
from pareto.verify import fd_jacobian


class ContractionTest(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_euler_identities_on_random_tensors(self):
        for seed in range(5):
            A = random_symmetric(3, 4, seed)
            for _ in range(10):
                x = self.rng.normal(size=3)
                self.assertAlmostEqual(x @ contract_m_minus_1(A, x), contract_m(A, x), delta=1e-12)
                np.testing.assert_allclose(contract_m_minus_2(A, x) @ x, contract_m_minus_1(A, x), atol=1e-10)

    def test_contraction_is_homogeneous_of_degree_m(self):
        for seed in range(5):
            A = random_symmetric(3, 4, seed)
            x = self.rng.normal(size=3)
            for c in (-2.5, 0.3, 7.0):
                scaled = contract_m(A, c * x)
                expected = c ** 4 * contract_m(A, x)
                self.assertLessEqual(abs(scaled - expected), 1e-10 * max(1.0, abs(expected)))

    def test_contract_m_minus_2_is_symmetric(self):
        A = random_symmetric(4, 4, 3)
        matrix = A.contract_m_minus_2(self.rng.normal(size=4))
        np.testing.assert_array_equal(matrix, matrix.T)

    def test_order_two_tensor_is_a_quadratic_form(self):
        M = np.array([[2.0, 1.0], [1.0, 3.0]])
        A = DenseSymmetricTensor(M)
        x = np.array([1.0, -2.0])
        self.assertAlmostEqual(A.contract_m(x), x @ M @ x)
        np.testing.assert_array_equal(A.contract_m_minus_2(x), M)

    def test_vector_length_is_checked(self):
        A = random_symmetric(3, 4, 0)
        with self.assertRaises(DimensionMismatchError):
            A.contract_m(np.ones(4))
        with self.assertRaises(DimensionMismatchError):
            as_vector(np.ones((3, 1)), 3)

    def test_dense_tensor_is_read_only(self):
        A = random_symmetric(2, 4, 0)
        with self.assertRaises(ValueError):
            A.entries[0, 0, 0, 0] = 5.0


class IdentityTest(SimpleTestCase):
    def test_z_identity_contractions(self):
        eps = ZIdentity(4, 3)
        x = np.array([1.0, 2.0, 2.0])
        self.assertAlmostEqual(eps.contract_m(x), 81.0)
        np.testing.assert_allclose(eps.contract_m_minus_1(x), 9.0 * x)

    def test_z_identity_matrix_form_matches_hessian_of_norm_power(self):
        rng = np.random.default_rng(5)
        for m in (2, 4, 6):
            eps = ZIdentity(m, 3)
            x = rng.uniform(0.1, 1.0, size=3)
            # Hessian of ||x||^m is the Jacobian of m ||x||^{m-2} x
            oracle = fd_jacobian(lambda v: m * np.linalg.norm(v) ** (m - 2) * v, x)
            np.testing.assert_allclose(m * (m - 1) * eps.contract_m_minus_2(x), oracle, atol=1e-6)

    def test_z_identity_matrix_form_at_origin(self):
        np.testing.assert_array_equal(ZIdentity(4, 2).contract_m_minus_2(np.zeros(2)), np.zeros((2, 2)))
        with self.assertRaises(OperatorDomainError):
            ZIdentity(6, 2).contract_m_minus_2(np.zeros(2))
        with self.assertRaises(OperatorDomainError):
            ZIdentity(3, 2).contract_m_minus_2(np.zeros(2))

    def test_h_identity_matches_its_dense_form(self):
        ident = HIdentity(4, 3)
        dense = ident.materialize()
        x = np.array([0.5, -1.0, 2.0])
        self.assertAlmostEqual(ident.contract_m(x), dense.contract_m(x))
        np.testing.assert_allclose(ident.contract_m_minus_1(x), dense.contract_m_minus_1(x))
        np.testing.assert_allclose(ident.contract_m_minus_2(x), dense.contract_m_minus_2(x))
        np.testing.assert_allclose(ident.contract_m_minus_1(x), x ** 3)

    def test_identity_factory(self):
        self.assertIsInstance(identity('z', 4, 2), ZIdentity)
        self.assertIsInstance(identity(IdentityKind.H, 4, 2), HIdentity)


class SymmetryTest(SimpleTestCase):
    def test_asymmetric_entries_are_rejected(self):
        raw = np.zeros((2, 2, 2, 2))
        raw[0, 1, 1, 1] = 1.0
        self.assertFalse(is_symmetric(raw))
        with self.assertRaises(SymmetryError):
            DenseSymmetricTensor(raw)

    def test_symmetrize_averages_over_permutations(self):
        raw = np.zeros((2, 2, 2, 2))
        raw[0, 1, 1, 1] = 1.0
        A = symmetrize(raw)
        # The class of (0,1,1,1) has four positions
        for idx in [(0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 0)]:
            self.assertAlmostEqual(A[idx], 0.25)
        self.assertTrue(is_symmetric(A.entries))

    def test_symmetrize_is_idempotent_bit_for_bit(self):
        raw = np.random.default_rng(1).uniform(-1, 1, size=(3, 3, 3, 3))
        once = symmetrize(raw)
        self.assertEqual(symmetrize(once.entries), once)
        self.assertIs(symmetrize(once), once)

    def test_symmetrize_keeps_diagonal(self):
        raw = np.zeros((3, 3, 3, 3))
        raw[2, 2, 2, 2] = 1.5
        raw[0, 1, 1, 1] = 0.4
        self.assertEqual(symmetrize(raw)[2, 2, 2, 2], 1.5)

    def test_from_index_classes_replicates_values(self):
        A = from_index_classes(4, 3, {(0, 1, 2, 2): -0.5})
        self.assertEqual(A[2, 0, 2, 1], -0.5)
        self.assertEqual(A[0, 1, 2, 2], -0.5)
        self.assertEqual(A[0, 0, 0, 0], 0.0)
        with self.assertRaises(DimensionMismatchError):
            from_index_classes(4, 3, {(0, 1, 3, 2): 1.0})

    def test_sampled_symmetry_check_catches_large_asymmetric_tensor(self):
        raw = np.random.default_rng(0).uniform(size=(32, 32, 32, 32))
        self.assertFalse(is_symmetric(raw))


class PrincipalSubtensorTest(SimpleTestCase):
    def test_reindexes_block(self):
        A = random_symmetric(4, 4, 2)
        sub = principal_subtensor(A, [1, 3])
        self.assertEqual(sub.dim, 2)
        self.assertEqual(sub[0, 1, 1, 0], A[1, 3, 3, 1])
        x = np.array([0.0, 0.3, 0.0, 0.7])
        self.assertAlmostEqual(sub.contract_m(x[[1, 3]]), A.contract_m(x), delta=1e-12)

    def test_rejects_bad_index_sets(self):
        A = random_symmetric(3, 4, 2)
        for support in ([], [0, 0], [0, 3], [-1]):
            with self.subTest(support=support), self.assertRaises(DimensionMismatchError):
                principal_subtensor(A, support)


class TensorFileTest(SimpleTestCase):
    def test_replicate_document(self):
        document = {
            'order': 4, 'dim': 2, 'replicate': True,
            'entries': [{'idx': [1, 1, 1, 1], 'val': 2.0}, {'idx': [1, 2, 2, 2], 'val': 0.5}],
        }
        A = load_tensor(document)
        self.assertEqual(A[0, 0, 0, 0], 2.0)
        self.assertEqual(A[1, 1, 0, 1], 0.5)

    def test_symmetrize_document_averages(self):
        document = {
            'order': 4, 'dim': 2, 'symmetrize': True,
            'entries': [{'idx': [1, 2, 2, 2], 'val': 0.8}],
        }
        self.assertAlmostEqual(load_tensor(document)[1, 1, 1, 0], 0.2)

    def test_plain_document_must_be_symmetric(self):
        document = {'order': 4, 'dim': 2, 'entries': [{'idx': [1, 2, 2, 2], 'val': 0.8}]}
        with self.assertRaises(SymmetryError):
            load_tensor(document)

    def test_malformed_documents(self):
        with self.assertRaises(TensorFormatError):
            load_tensor({'dim': 2})
        with self.assertRaises(TensorFormatError):
            load_tensor({'order': 4, 'dim': 2, 'entries': [{'idx': [1, 3, 1, 1], 'val': 1}]})
        with self.assertRaises(TensorFormatError):
            load_tensor(io.StringIO('{not json'))

    def test_dump_then_load_from_file(self):
        A = random_symmetric(3, 4, 9)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'tensor.json')
            dump_tensor(A, path)
            with open(path) as handle:
                self.assertTrue(json.load(handle)['replicate'])
            self.assertEqual(load_tensor(path), A)
