import unittest

from sympy import QQ, divisors, mobius

from liealg_app import free_lie
from liealg_app.services import free_lie_basis


def witt_formula(r, n):
    return sum(mobius(d) * r ** (n // d) for d in divisors(n)) // n


class TestLyndonWords(unittest.TestCase):
    """Lyndon basis of the free Lie algebra."""

    def test_counts_match_witt_formula(self):
        for r in (2, 3):
            for n in range(1, 8):
                self.assertEqual(free_lie.witt_dimension(r, n), witt_formula(r, n), (r, n))

    def test_small_degrees(self):
        self.assertEqual(len(free_lie_basis(2, (1, 1))), 1)
        self.assertEqual(len(free_lie_basis(2, (2, 1))) + len(free_lie_basis(2, (1, 2))), 2)
        single = free_lie_basis(2, (1, 0))
        self.assertEqual(single[0]["word"], [0])
        self.assertEqual(single[0]["bracketing"], 0)

    def test_words_are_minimal_rotations(self):
        for w in free_lie.lyndon_words((3, 2)):
            self.assertTrue(all(w < w[i:] + w[:i] for i in range(1, len(w))))
            self.assertEqual(free_lie.content_of(w, 2), (3, 2))

    def test_standard_factorization(self):
        u, v = free_lie.standard_factorization((0, 0, 1))
        self.assertEqual((u, v), ((0,), (0, 1)))
        self.assertEqual(free_lie.bracket_tree((0, 0, 1)), (0, (0, 1)))


class TestFreeBrackets(unittest.TestCase):
    """Brackets in Lyndon coordinates."""

    def test_round_trip_through_words(self):
        coords = {(0, 0, 1): QQ(2), (0, 1, 1): QQ(-1)}
        self.assertEqual(free_lie.to_lyndon_coords(free_lie.lie_poly(coords)), coords)

    def test_non_lie_polynomial_is_rejected(self):
        with self.assertRaises(ValueError):
            free_lie.to_lyndon_coords({(1, 0): 1})

    def test_antisymmetry_and_jacobi(self):
        x, y, z = {(0,): QQ(1)}, {(1,): QQ(1)}, {(0, 1): QQ(1)}
        self.assertEqual(free_lie.bracket(x, y), {w: -c for w, c in free_lie.bracket(y, x).items()})
        total = {}
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            for w, v in free_lie.bracket(a, free_lie.bracket(b, c)).items():
                total[w] = total.get(w, 0) + v
        self.assertFalse({w: v for w, v in total.items() if v != 0})

    def test_derivation_on_simple_bracket(self):
        """ad f_1 on [e_1, e_2] is a_12 e_2."""
        poly = free_lie.lie_poly({(0, 1): 1})
        image = free_lie.derivation_f(0, poly, (2, -3))
        self.assertEqual(free_lie.to_lyndon_coords(image), {(1,): -3})
