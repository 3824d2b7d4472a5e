import itertools
import random
import unittest

from exact_app.errors import (
    AsymmetricZero,
    DecomposableMatrix,
    DiagonalNotTwo,
    InvalidInput,
    KMForgeError,
    NotSymmetrizable,
    PositiveOffDiagonal,
)
from cartan_app import services
from cartan_app.services import AFFINE, FINITE, INDEFINITE, validate_gcm


def rank2(a, b):
    return validate_gcm([[2, a], [b, 2]])


class TestValidateGCM(unittest.TestCase):
    """Axioms C1-C3 and the JSON shape."""

    def test_valid_matrix(self):
        A = validate_gcm([[2, -3], [-2, 2]])
        self.assertEqual(A.labels, ("1", "2"))
        self.assertEqual(A[0, 1], -3)

    def test_asymmetric_zero_names_indices(self):
        with self.assertRaises(AsymmetricZero) as cm:
            validate_gcm([[2, -1], [0, 2]])
        self.assertEqual(cm.exception.details["at"], (1, 2))

    def test_diagonal_not_two(self):
        with self.assertRaises(DiagonalNotTwo) as cm:
            validate_gcm([[1]])
        self.assertEqual(cm.exception.details["at"], (1, 1))

    def test_positive_off_diagonal(self):
        with self.assertRaises(PositiveOffDiagonal):
            validate_gcm([[2, 1], [1, 2]])

    def test_non_square_and_non_integer(self):
        with self.assertRaises(InvalidInput):
            validate_gcm([[2, -1]])
        with self.assertRaises(InvalidInput):
            validate_gcm([[2, -1.5], [-1, 2]])

    def test_accepts_iff_axioms_hold(self):
        """Random 3x3 integer matrices are accepted exactly when C1-C3 hold."""
        rng = random.Random(7)
        for _ in range(300):
            m = [[rng.randint(-2, 2) if i != j else rng.choice([2, 2, 2, 1]) for j in range(3)] for i in range(3)]
            ok = all(m[i][i] == 2 for i in range(3)) and all(
                m[i][j] <= 0 and ((m[i][j] == 0) == (m[j][i] == 0))
                for i in range(3) for j in range(3) if i != j
            )
            try:
                validate_gcm(m)
                accepted = True
            except KMForgeError:
                accepted = False
            self.assertEqual(accepted, ok, m)

    def test_json_round_trip_keeps_labels(self):
        A = services.gcm_from_json({"labels": ["a", "b"], "matrix": [[2, -2], [-2, 2]]})
        self.assertEqual(A.to_json(), {"labels": ["a", "b"], "matrix": [[2, -2], [-2, 2]]})


class TestOrderAndType(unittest.TestCase):
    """Comparison, classification and the affine search."""

    def test_gcm_leq_examples(self):
        self.assertTrue(services.gcm_leq(rank2(-2, -2), rank2(-3, -2)))
        self.assertTrue(services.gcm_leq(rank2(-3, -2), rank2(-3, -2)))
        self.assertFalse(services.gcm_leq(rank2(-3, -3), rank2(-2, -2)))

    def test_gcm_leq_is_a_partial_order(self):
        mats = [rank2(a, b) for a in range(-3, 0) for b in range(-3, 0)]
        for X, Y, Z in itertools.product(mats, repeat=3):
            if services.gcm_leq(X, Y) and services.gcm_leq(Y, Z):
                self.assertTrue(services.gcm_leq(X, Z))
        for X, Y in itertools.product(mats, repeat=2):
            if services.gcm_leq(X, Y) and services.gcm_leq(Y, X):
                self.assertEqual(X, Y)

    def test_gcm_leq_with_embedding(self):
        A = validate_gcm([[2, -1, 0], [-1, 2, -3], [0, -3, 2]])
        self.assertTrue(services.gcm_leq(rank2(-2, -2), A, embedding=[1, 2]))
        with self.assertRaises(InvalidInput):
            services.gcm_leq(rank2(-2, -2), A, embedding=[1, 1])

    def test_classify_type(self):
        self.assertEqual(services.classify_type(rank2(-1, -1)), FINITE)
        self.assertEqual(services.classify_type(rank2(-2, -2)), AFFINE)
        self.assertEqual(services.classify_type(rank2(-3, -2)), INDEFINITE)
        with self.assertRaises(DecomposableMatrix):
            services.classify_type(validate_gcm([[2, 0], [0, 2]]))

    def test_affine_rank3(self):
        A = validate_gcm([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
        self.assertEqual(services.classify_type(A), AFFINE)

    def test_compact_hyperbolic(self):
        self.assertTrue(services.is_compact_hyperbolic(rank2(-3, -2)))
        self.assertFalse(services.is_compact_hyperbolic(rank2(-1, -1)))
        self.assertFalse(services.is_compact_hyperbolic(rank2(-2, -2)))

    def test_find_affine_sub_examples(self):
        B, subset = services.find_affine_sub(rank2(-3, -2))
        self.assertEqual(B.rows(), [[2, -2], [-2, 2]])
        self.assertEqual(subset, [0, 1])
        B, _ = services.find_affine_sub(rank2(-2, -2))
        self.assertEqual(B.rows(), [[2, -2], [-2, 2]])
        self.assertIsNone(services.find_affine_sub(rank2(-1, -1)))

    def test_find_affine_sub_sweep_rank2(self):
        for a in range(-5, 0):
            for b in range(-5, 0):
                A = rank2(a, b)
                if services.classify_type(A) != INDEFINITE:
                    continue
                B, subset = services.find_affine_sub(A)
                self.assertEqual(services.classify_type(B), AFFINE)
                self.assertTrue(services.gcm_leq(B, A, embedding=subset))

    def test_m_A(self):
        self.assertEqual(services.m_A(rank2(-3, -2)), 3)
        self.assertEqual(services.m_A(rank2(-1, -1)), 1)
        self.assertEqual(services.m_A(validate_gcm([[2]])), 0)


class TestSymmetrizerAndCovers(unittest.TestCase):
    """Symmetrizers and simply laced covers."""

    def test_symmetrizer(self):
        self.assertEqual(services.symmetrizer(rank2(-1, -2)), (2, 1))
        self.assertEqual(services.symmetrizer(rank2(-3, -3)), (1, 1))
        cyclic = validate_gcm([[2, -1, -2], [-2, 2, -1], [-1, -2, 2]])
        self.assertIsNone(services.symmetrizer(cyclic))

    def test_symmetrizer_identity(self):
        A = rank2(-1, -3)
        d = services.symmetrizer(A)
        for i in range(2):
            for j in range(2):
                self.assertEqual(d[i] * A[i, j], d[j] * A[j, i])

    def test_cover_of_b2_is_a3_path(self):
        cover = services.simply_laced_cover(rank2(-1, -2))
        self.assertEqual(cover.block_sizes, (1, 2))
        self.assertEqual(cover.cover_gcm.rows(), [[2, -1, -1], [-1, 2, 0], [-1, 0, 2]])

    def test_cover_of_affine_a1_is_a_four_cycle(self):
        cover = services.simply_laced_cover(rank2(-2, -2))
        self.assertEqual(cover.block_sizes, (2, 2))
        C = cover.cover_gcm
        for v in range(4):
            self.assertEqual(sum(1 for u in range(4) if u != v and C[v, u] == -1), 2)

    def test_cover_of_simply_laced_is_itself(self):
        cover = services.simply_laced_cover(rank2(-1, -1))
        self.assertEqual(cover.block_sizes, (1, 1))
        self.assertEqual(cover.cover_gcm.rows(), [[2, -1], [-1, 2]])

    def test_cover_sweep(self):
        """Every symmetrizable rank <= 3 matrix with entries >= -4 gets a valid cover."""
        values = [0, -1, -2, -3, -4]
        for a, b in itertools.product(values, repeat=2):
            if (a == 0) != (b == 0):
                continue
            A = rank2(a, b)
            cover = services.simply_laced_cover(A)
            services.check_cover(cover)
        for a12, a21, a23, a32 in itertools.product([-1, -2, -3], repeat=4):
            A = validate_gcm([[2, a12, 0], [a21, 2, a23], [0, a32, 2]])
            if services.symmetrizer(A) is None:
                continue
            services.check_cover(services.simply_laced_cover(A))

    def test_cover_requires_symmetrizable(self):
        cyclic = validate_gcm([[2, -1, -2], [-2, 2, -1], [-1, -2, 2]])
        with self.assertRaises(NotSymmetrizable):
            services.simply_laced_cover(cyclic)
