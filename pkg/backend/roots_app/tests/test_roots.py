import unittest

from sympy import QQ

from cartan_app.services import validate_gcm
from exact_app.errors import NotRealRoot, NotSymmetrizable, UnknownRoot
from roots_app import services, weyl
from roots_app.weyl import IMAGINARY, REAL

AFFINE_SL2 = [[2, -2], [-2, 2]]
HYPERBOLIC = [[2, -3], [-3, 2]]


def rank2(m, n):
    return validate_gcm([[2, -m], [-n, 2]])


class TestReflections(unittest.TestCase):
    """Simple reflections on roots and coroots."""

    def test_reflect_root(self):
        for m, n in ((1, 1), (3, 2), (4, 1)):
            A = rank2(m, n)
            self.assertEqual(services.reflect_root(A, 0, (0, 1)), (m, 1))
            self.assertEqual(services.reflect_root(A, 0, (1, 0)), (-1, 0))
            for alpha in ((2, 5), (1, 1), (0, 3)):
                self.assertEqual(weyl.reflect_root(A, 1, weyl.reflect_root(A, 1, alpha)), alpha)

    def test_reflect_coroot(self):
        A = rank2(3, 2)
        self.assertEqual(services.reflect_coroot(A, 1, (1, 0)), (1, 3))
        self.assertEqual(services.reflect_coroot(A, 0, (1, 0)), (-1, 0))
        self.assertEqual(weyl.reflect_coroot(A, 0, weyl.reflect_coroot(A, 0, (2, 7))), (2, 7))

    def test_pairing(self):
        m, n = 3, 2
        A = rank2(m, n)
        gamma = weyl.reflect_root(A, 1, (1, 0))
        beta = weyl.reflect_root(A, 0, (0, 1))
        self.assertEqual(services.pairing(A, gamma, (0, 1)), n)
        self.assertEqual(services.pairing(A, (1, 0), (1, 0)), 2)
        self.assertEqual(services.pairing(A, gamma, services.coroot_of_real(A, beta)), n * (3 - m * n))


class TestEnumerateRoots(unittest.TestCase):
    """Bounded root tables."""

    def test_affine_sl2(self):
        table = services.enumerate_roots(validate_gcm(AFFINE_SL2), 4)
        self.assertEqual(table.height_totals(), [2, 1, 2, 1])
        self.assertEqual(table.get((1, 1)).kind, IMAGINARY)
        self.assertEqual(table.get((1, 1)).mult, 1)
        self.assertEqual(table.get((2, 1)).kind, REAL)

    def test_descent_word(self):
        table = services.enumerate_roots(rank2(3, 2), 4)
        self.assertEqual(table.get((1, 1)).kind, IMAGINARY)
        entry = table.get((3, 1))
        self.assertEqual(entry.kind, REAL)
        self.assertEqual(entry.to_json()["descent_word"], [1])

    def test_finite_type_is_complete(self):
        table = services.enumerate_roots(rank2(1, 1), 9)
        self.assertEqual(table.roots(), [(0, 1), (1, 0), (1, 1)])
        self.assertTrue(all(e.kind == REAL for e in table))

    def test_report_order(self):
        table = services.enumerate_roots(validate_gcm(AFFINE_SL2), 3)
        coeffs = [e["coeffs"] for e in table.to_json()["entries"]]
        self.assertEqual(coeffs, [[0, 1], [1, 0], [1, 1], [1, 2], [2, 1]])

    def test_table_invariants(self):
        """Descent lands on a simple root, coroots pair to 2, 2alpha is never a root, Weyl stability."""
        for matrix in (AFFINE_SL2, HYPERBOLIC, [[2, -1, 0], [-1, 2, -2], [0, -1, 2]]):
            A = validate_gcm(matrix)
            table = services.enumerate_roots(A, 8 if A.rank == 2 else 6)
            for entry in table:
                if entry.kind != REAL:
                    continue
                self.assertEqual(entry.mult, 1)
                landed = weyl.apply_word(A, entry.descent_word, entry.coeffs)
                self.assertEqual(sorted(landed), [0] * (A.rank - 1) + [1])
                self.assertEqual(weyl.pairing(A, entry.coeffs, services.coroot_of_real(A, entry.coeffs, table)), 2)
                self.assertNotIn(weyl.scale(2, entry.coeffs), table)
            self.assertEqual(services.weyl_stability_violations(table), [])

    def test_norm_separates_kinds(self):
        """For symmetric A, (alpha, alpha) = 2 exactly on real roots and <= 0 on imaginary ones."""
        for matrix in (AFFINE_SL2, HYPERBOLIC):
            A = validate_gcm(matrix)
            for entry in services.enumerate_roots(A, 8):
                norm = services.sym_form(A, entry.coeffs, entry.coeffs)
                if entry.kind == REAL:
                    self.assertEqual(norm, 2)
                else:
                    self.assertLessEqual(norm, 0)


class TestCoroots(unittest.TestCase):

    def test_simple_and_reflected(self):
        A = rank2(3, 2)
        self.assertEqual(services.coroot_of_real(A, (1, 0)), (1, 0))
        self.assertEqual(services.coroot_of_real(A, (3, 1)), (2, 1))

    def test_imaginary_root_has_no_coroot(self):
        A = validate_gcm(AFFINE_SL2)
        table = services.enumerate_roots(A, 3)
        with self.assertRaises(NotRealRoot):
            services.coroot_of_real(A, (1, 1), table)


class TestSymForm(unittest.TestCase):

    def test_norms(self):
        self.assertEqual(services.sym_form(validate_gcm(HYPERBOLIC), (3, 1), (3, 1)), QQ(2))
        self.assertEqual(services.sym_form(validate_gcm(AFFINE_SL2), (3, 1), (3, 1)), QQ(8))
        self.assertEqual(services.sym_form(validate_gcm(HYPERBOLIC), (0, 1), (0, 1)), 2)

    def test_weighted_form_is_symmetric(self):
        A = rank2(1, 2)
        self.assertEqual(services.sym_form(A, (1, 0), (0, 1)), services.sym_form(A, (0, 1), (1, 0)))

    def test_not_symmetrizable(self):
        A = validate_gcm([[2, -1, -1], [-2, 2, -1], [-1, -1, 2]])
        with self.assertRaises(NotSymmetrizable):
            services.sym_form(A, (1, 0, 0), (0, 1, 0))


class TestClosedSets(unittest.TestCase):
    """Closed sets, root ideals and prenilpotent intervals."""

    def setUp(self):
        self.A = validate_gcm(AFFINE_SL2)
        self.table = services.enumerate_roots(self.A, 6)

    def test_height_ideal(self):
        for n in range(1, 5):
            psi = services.height_ideal(self.table, n)
            self.assertTrue(services.is_root_ideal(self.table, psi))
            self.assertTrue(services.is_closed_set(self.table, psi))

    def test_subdiagram_is_closed_not_ideal(self):
        A = validate_gcm([[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
        table = services.enumerate_roots(A, 3)
        sub = services.subdiagram_roots(table, [0, 1])
        self.assertTrue(services.is_closed_set(table, sub))
        verdict = services.is_root_ideal(table, sub)
        self.assertFalse(verdict)
        self.assertEqual(verdict.certified_to, 3)
        self.assertTrue(services.is_root_ideal(table, services.complement_ideal(table, [0, 1])))

    def test_single_simple_root(self):
        self.assertTrue(services.is_closed_set(self.table, [(1, 0)]))

    def test_unknown_root(self):
        with self.assertRaises(UnknownRoot):
            services.is_closed_set(self.table, [(3, 1)])

    def test_intervals(self):
        a2 = rank2(1, 1)
        table = services.enumerate_roots(a2, 6)
        full = services.prenilpotent_interval(a2, table, (1, 0), (0, 1))
        self.assertEqual(set(full.roots), {(1, 0), (0, 1), (1, 1)})
        short = services.prenilpotent_interval(a2, table, (1, 0), (1, 1))
        self.assertEqual(set(short.roots), {(1, 0), (1, 1)})
        affine = services.prenilpotent_interval(self.A, self.table, (1, 0), (0, 1))
        self.assertIsNone(affine.roots)
        self.assertEqual(affine.reason, "Unbounded")

    def test_interval_needs_real_roots(self):
        with self.assertRaises(NotRealRoot):
            services.prenilpotent_interval(self.A, self.table, (1, 1), (1, 0))
