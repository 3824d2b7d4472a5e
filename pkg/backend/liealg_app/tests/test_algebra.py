import random
import unittest

import pytest
from sympy import QQ

from cartan_app.services import validate_gcm
from exact_app.errors import BandOverflow, InvalidInput, NonIntegralDividedPower, NotImaginary, NotRealRoot
from exact_app.scalars import ScalarField
from liealg_app import services
from liealg_app.models import LieElement
from liealg_app.services import BandContext
from roots_app import weyl

A2 = [[2, -1], [-1, 2]]
B2 = [[2, -1], [-2, 2]]
AFFINE_SL2 = [[2, -2], [-2, 2]]
HYPERBOLIC = [[2, -3], [-3, 2]]
A3 = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]


def low_degrees(ctx, max_height):
    return [d for d in ctx.dimensions() if weyl.height(d) <= max_height]


def random_homogeneous(ctx, rng, degrees):
    """A random element of one root space (either sign) or of the Cartan part."""
    roll = rng.random()
    if roll < 0.2:
        return sum((ctx.h(i).scale(rng.randint(-3, 3)) for i in range(ctx.rank)), LieElement(ctx.field))
    sign = "+" if roll < 0.6 else "-"
    degree = rng.choice(degrees)
    out = LieElement(ctx.field)
    for b in ctx.basis(degree, sign):
        out = out + b.scale(rng.randint(-3, 3))
    return out


class TestSerreIdealDims(unittest.TestCase):
    """Incremental closure of the Serre ideal."""

    def test_a2_ideal_starts_at_height_three(self):
        dims = services.serre_ideal_dims(validate_gcm(A2), 4)
        self.assertEqual(dims, [0, 0, 2, 3])

    def test_b2_has_one_relation_at_height_three(self):
        self.assertEqual(services.serre_ideal_dims(validate_gcm(B2), 4), [0, 0, 1, 3])

    def test_affine_sl2(self):
        self.assertEqual(services.serre_ideal_dims(validate_gcm(AFFINE_SL2), 4), [0, 0, 0, 2])

    def test_onset_rule_for_rank_two(self):
        """dim ĩ_n = 0 up to m+1; at m+2 it is 2 for equal entries and 1 otherwise."""
        for a, b, expected in ((1, 1, 2), (2, 2, 2), (1, 2, 1), (2, 3, 1)):
            A = validate_gcm([[2, -a], [-b, 2]])
            m = min(a, b)
            dims = services.serre_ideal_dims(A, m + 2)
            self.assertEqual(dims[: m + 1], [0] * (m + 1), (a, b))
            self.assertEqual(dims[m + 1], expected, (a, b))

    def test_dimension_identity(self):
        """Free dims minus ideal dims equals the per-height dimension of n⁺."""
        from liealg_app import free_lie

        for matrix in (A2, B2, AFFINE_SL2, HYPERBOLIC, A3):
            A = validate_gcm(matrix)
            N = 6 if A.rank == 2 else 5
            ideal = services.serre_ideal_dims(A, N)
            profile = services.height_dimension_profile(A, N)
            for n in range(1, N + 1):
                self.assertEqual(free_lie.witt_dimension(A.rank, n) - ideal[n - 1], profile[n - 1])


class TestPositivePart(unittest.TestCase):
    """Root space dimensions of the band."""

    def test_dimensions(self):
        ctx = services.positive_part(validate_gcm(AFFINE_SL2), 4)
        self.assertEqual(ctx.dim((1, 1)), 1)
        self.assertEqual(ctx.dim((2, 2)), 1)
        self.assertEqual(ctx.dim((3, 1)), 0)
        self.assertEqual(ctx.dim((4, 0)), 0)
        a2 = services.positive_part(validate_gcm(A2), 3)
        self.assertEqual(a2.dim((1, 2)), 0)

    def test_height_above_band_is_rejected(self):
        ctx = services.positive_part(validate_gcm(A2), 2)
        with self.assertRaises(BandOverflow):
            ctx.dim((2, 1))

    def test_bound_must_be_positive(self):
        with self.assertRaises(InvalidInput):
            BandContext(validate_gcm(A2), 0, ScalarField.rationals())


class TestBracket(unittest.TestCase):
    """Sign conventions and band behaviour."""

    def setUp(self):
        self.ctx = BandContext(validate_gcm(B2), 4, ScalarField.rationals())

    def test_chevalley_relations(self):
        ctx = self.ctx
        self.assertEqual(ctx.bracket(ctx.e(0), ctx.f(0)), -ctx.h(0))
        self.assertEqual(ctx.bracket(ctx.f(0), ctx.e(0)), ctx.h(0))
        self.assertTrue(ctx.bracket(ctx.e(0), ctx.f(1)).is_zero())
        # [h_i, e_j] = a_ij e_j and [h_i, f_j] = -a_ij f_j
        self.assertEqual(ctx.bracket(ctx.h(1), ctx.e(0)), ctx.e(0).scale(-2))
        self.assertEqual(ctx.bracket(ctx.h(1), ctx.f(0)), ctx.f(0).scale(2))

    def test_alternating(self):
        self.assertTrue(self.ctx.bracket(self.ctx.e(1), self.ctx.e(1)).is_zero())

    def test_serre_generators_vanish(self):
        for matrix in (A2, B2, AFFINE_SL2, HYPERBOLIC):
            A = validate_gcm(matrix)
            ctx = BandContext(A, 6, ScalarField.rationals())
            for i in range(2):
                j = 1 - i
                x = ctx.e(j)
                for _ in range(1 - A[i, j]):
                    x = ctx.bracket(ctx.e(i), x)
                self.assertTrue(x.is_zero(), (matrix, i))
                self.assertTrue(ctx.ad_divided_power(i, "+", 1 - A[i, j], ctx.e(j)).is_zero())

    def test_lowering_formula(self):
        """[f_i, (ad e_i)^m e_j] = m(m-1-|a_ij|)(ad e_i)^(m-1) e_j."""
        for matrix in (HYPERBOLIC, [[2, -4], [-1, 2]]):
            A = validate_gcm(matrix)
            ctx = BandContext(A, 6, ScalarField.rationals())
            powers = [ctx.e(1)]
            for _ in range(-A[0, 1]):
                powers.append(ctx.bracket(ctx.e(0), powers[-1]))
            for m in range(1, len(powers)):
                lowered = ctx.bracket(ctx.f(0), powers[m])
                self.assertEqual(lowered, powers[m - 1].scale(m * (m - 1 + A[0, 1])), (matrix, m))

    def test_overflow_above_band(self):
        ctx = BandContext(validate_gcm(A2), 1, ScalarField.rationals())
        with self.assertRaises(BandOverflow):
            ctx.bracket(ctx.e(0), ctx.e(1))

    def test_non_root_degrees_vanish(self):
        ctx = BandContext(validate_gcm(A2), 2, ScalarField.rationals())
        x = ctx.bracket(ctx.e(0), ctx.e(1))
        self.assertTrue(ctx.bracket(ctx.e(0), x).is_zero())


class TestJacobi(unittest.TestCase):
    """Random homogeneous triples across several contexts."""

    contexts = [
        (A2, ScalarField.integers()),
        (AFFINE_SL2, ScalarField.prime(5)),
        (HYPERBOLIC, ScalarField.prime(7)),
        (A3, ScalarField.integers()),
    ]

    def check(self, triples):
        rng = random.Random(11)
        for matrix, field in self.contexts:
            ctx = BandContext(validate_gcm(matrix), 6, field)
            degrees = low_degrees(ctx, 2)
            for _ in range(triples):
                x, y, z = (random_homogeneous(ctx, rng, degrees) for _ in range(3))
                total = (ctx.bracket(x, ctx.bracket(y, z)) + ctx.bracket(y, ctx.bracket(z, x))
                         + ctx.bracket(z, ctx.bracket(x, y)))
                self.assertTrue(total.is_zero(), (matrix, x, y, z))
                self.assertTrue(ctx.bracket(x, x).is_zero())

    def test_jacobi_sample(self):
        self.check(25)

    @pytest.mark.slow
    def test_jacobi_full(self):
        self.check(200)


class TestDividedPowers(unittest.TestCase):
    """Exact division on the working lattice."""

    def test_affine_square_is_half_a_generator(self):
        A = validate_gcm(AFFINE_SL2)
        rational = BandContext(A, 4, ScalarField.rationals())
        x = rational.ad_divided_power(0, "+", 2, rational.e(1))
        values = list(x.terms.values())
        self.assertEqual(len(values), 1)
        self.assertIn(values[0], (QQ(1, 2), QQ(-1, 2)))
        odd = rational.with_field(ScalarField.prime(3))
        self.assertFalse(odd.ad_divided_power(0, "+", 2, odd.e(1)).is_zero())
        even = rational.with_field(ScalarField.prime(2))
        with self.assertRaises(NonIntegralDividedPower):
            even.ad_divided_power(0, "+", 2, even.e(1))

    def test_lowering_leaves_grading(self):
        """(ad f_i)^(s) x = 0 when deg(x) - s alpha_i is not a degree of g."""
        ctx = BandContext(validate_gcm(A2), 3, ScalarField.rationals())
        x = ctx.bracket(ctx.e(0), ctx.e(1))
        self.assertTrue(ctx.ad_divided_power(0, "-", 2, x).is_zero())
        self.assertFalse(ctx.ad_divided_power(0, "-", 1, x).is_zero())

    def test_negative_exponent(self):
        ctx = BandContext(validate_gcm(A2), 3, ScalarField.rationals())
        with self.assertRaises(InvalidInput):
            ctx.ad_divided_power(0, "+", -1, ctx.e(1))


class TestGKKernel(unittest.TestCase):
    """Kernels of the divided lowering operators."""

    def test_affine_sl2_depends_on_characteristic(self):
        A = validate_gcm(AFFINE_SL2)
        dim2, basis2 = services.gk_degree_kernel(BandContext(A, 3, ScalarField.prime(2)), (1, 1))
        dim3, _ = services.gk_degree_kernel(BandContext(A, 3, ScalarField.prime(3)), (1, 1))
        self.assertEqual(dim2, 1)
        self.assertEqual(len(basis2), 1)
        self.assertEqual(dim3, 0)

    def test_real_degree_is_rejected(self):
        with self.assertRaises(NotImaginary):
            services.gk_degree_kernel(BandContext(validate_gcm(AFFINE_SL2), 4, ScalarField.prime(2)), (2, 1))


class TestRootVectors(unittest.TestCase):
    """e_alpha along descent words and the s_i* automorphism."""

    def setUp(self):
        self.a2 = BandContext(validate_gcm(A2), 3, ScalarField.rationals())

    def test_simple_root_vectors(self):
        self.assertEqual(self.a2.real_root_vector((1, 0)), self.a2.e(0))

    def test_affine_root_vector_is_divided_power(self):
        ctx = BandContext(validate_gcm(AFFINE_SL2), 3, ScalarField.rationals())
        e = services.real_root_vector(ctx, (2, 1))
        d = ctx.ad_divided_power(0, "+", 2, ctx.e(1))
        self.assertIn(e, (d, -d))
        self.assertEqual(e.homogeneous_degree(2), (2, 1))

    def test_imaginary_root_is_rejected(self):
        ctx = BandContext(validate_gcm(AFFINE_SL2), 3, ScalarField.rationals())
        with self.assertRaises(NotRealRoot):
            ctx.real_root_vector((1, 1))

    def test_s_star_swaps_e_and_f(self):
        ctx = self.a2
        for i in range(2):
            self.assertEqual(services.s_i_star_lie(ctx, i, ctx.e(i)), ctx.f(i))
            self.assertEqual(ctx.s_i_star(i, ctx.f(i)), ctx.e(i))

    def test_s_star_moves_degrees(self):
        ctx = self.a2
        x = ctx.bracket(ctx.e(0), ctx.e(1))
        image = ctx.s_i_star(0, x)
        self.assertEqual(image.homogeneous_degree(2), weyl.reflect_root(ctx.gcm, 0, (1, 1)))

    def test_s_star_is_involutive_up_to_sign(self):
        ctx = self.a2
        elements = [ctx.e(0), ctx.e(1), ctx.f(0), ctx.bracket(ctx.e(0), ctx.e(1)),
                    ctx.bracket(ctx.f(1), ctx.f(0))]
        for i in range(2):
            for x in elements:
                twice = ctx.s_i_star(i, ctx.s_i_star(i, x))
                self.assertIn(twice, (x, -x))

    def test_s_star_respects_brackets(self):
        ctx = self.a2
        rng = random.Random(5)
        degrees = low_degrees(ctx, 2)
        for _ in range(20):
            x, y = random_homogeneous(ctx, rng, degrees), random_homogeneous(ctx, rng, degrees)
            for i in range(2):
                self.assertEqual(ctx.s_i_star(i, ctx.bracket(x, y)),
                                 ctx.bracket(ctx.s_i_star(i, x), ctx.s_i_star(i, y)))
