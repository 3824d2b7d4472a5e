import random
import unittest
from math import comb

import pytest
from sympy import QQ

from cartan_app.services import validate_gcm
from enveloping_app import services
from enveloping_app.models import GroupElement
from enveloping_app.services import TruncCtx
from exact_app.errors import (
    CharacteristicConstraint,
    InvalidInput,
    NotClosed,
    NotGroupLike,
    UnsupportedDegree,
)
from exact_app.scalars import ScalarField
from roots_app import weyl

A2 = [[2, -1], [-1, 2]]
AFFINE_SL2 = [[2, -2], [-2, 2]]


def random_element(ctx, rng, max_terms=4, constant=True):
    keys = ctx.keys()
    terms = {}
    for key in rng.sample(keys, min(max_terms, len(keys))):
        terms[key] = ctx.field(rng.randrange(1, 7))
    if constant:
        terms[ctx.tits.unit_key] = ctx.field(rng.randrange(0, 3))
    return services.EnvElement(ctx.field, terms)


def psi_words(ctx, i):
    """PBW words without the letter e_i whose s_i-image stays inside the truncation."""
    words = []
    for content in ctx.contents():
        image = weyl.reflect_root(ctx.gcm, i, content)
        if weyl.height(image) > ctx.N:
            continue
        for word in ctx.pbw.monomials(content):
            if all(letter[1] != weyl.unit(ctx.rank, i) for letter in word):
                words.append(word)
    return words


class TestProducts(unittest.TestCase):
    """Straightening, divided powers and associativity."""

    def setUp(self):
        self.ctx = TruncCtx(validate_gcm(A2), 4, ScalarField.rationals())

    def test_unit(self):
        u = self.ctx.e(0) + self.ctx.divided_power(1, 2)
        self.assertEqual(self.ctx.mul(u, self.ctx.one()), u)
        self.assertEqual(self.ctx.mul(self.ctx.one(), u), u)

    def test_straightening_is_the_bracket(self):
        ctx = self.ctx
        e1, e2 = ctx.e(0), ctx.e(1)
        bracket = ctx.band.bracket(ctx.band.e(0), ctx.band.e(1))
        self.assertEqual(ctx.mul(e1, e2) - ctx.mul(e2, e1), ctx.lie_to_env(bracket))

    def test_divided_power_identity(self):
        for a in range(0, 3):
            for b in range(0, 3):
                left = self.ctx.mul(self.ctx.divided_power(0, a), self.ctx.divided_power(0, b))
                self.assertEqual(left, self.ctx.divided_power(0, a + b).scale(comb(a + b, a)))

    def test_truncation_discards_high_degrees(self):
        x = self.ctx.divided_power(0, 3)
        self.assertTrue(self.ctx.mul(x, self.ctx.divided_power(1, 2)).is_zero())

    def test_associativity(self):
        rng = random.Random(11)
        for matrix, p in ((A2, 5), (AFFINE_SL2, 3)):
            ctx = TruncCtx(validate_gcm(matrix), 4, ScalarField.prime(p))
            for _ in range(30):
                u, v, w = (random_element(ctx, rng) for _ in range(3))
                self.assertEqual(ctx.mul(ctx.mul(u, v), w), ctx.mul(u, ctx.mul(v, w)))

    @pytest.mark.slow
    def test_associativity_exhaustive_sample(self):
        rng = random.Random(12)
        ctx = TruncCtx(validate_gcm(AFFINE_SL2), 5, ScalarField.prime(7))
        for _ in range(100):
            u, v, w = (random_element(ctx, rng, 6) for _ in range(3))
            self.assertEqual(ctx.mul(ctx.mul(u, v), w), ctx.mul(u, ctx.mul(v, w)))

    def test_integral_form_at_small_prime(self):
        """Over F_2 the square of e_1 vanishes while e_1^(2) survives."""
        ctx = TruncCtx(validate_gcm(AFFINE_SL2), 4, ScalarField.prime(2))
        self.assertTrue(ctx.mul(ctx.e(0), ctx.e(0)).is_zero())
        self.assertFalse(ctx.divided_power(0, 2).is_zero())

    def test_integers_are_refused(self):
        with self.assertRaises(InvalidInput):
            TruncCtx(validate_gcm(A2), 3, ScalarField.integers())


class TestHopfStructure(unittest.TestCase):
    """Coproduct, counit and antipode in Tits coordinates."""

    def setUp(self):
        self.ctx = TruncCtx(validate_gcm(AFFINE_SL2), 4, ScalarField.prime(5))
        self.one = self.ctx.tits.unit_key

    def key(self, u):
        (k,) = u.terms
        return k

    def test_primitive_generator(self):
        e = self.key(self.ctx.e(0))
        self.assertEqual(self.ctx.coproduct(self.ctx.e(0)), {(e, self.one): 1, (self.one, e): 1})

    def test_divided_square(self):
        e = self.key(self.ctx.e(0))
        e2 = self.key(self.ctx.divided_power(0, 2))
        self.assertEqual(self.ctx.divided_power(0, 2).terms[e2], 1)
        self.assertEqual(
            self.ctx.coproduct(self.ctx.divided_power(0, 2)),
            {(e2, self.one): 1, (e, e): 1, (self.one, e2): 1},
        )

    def test_antipode_of_divided_cube(self):
        x = self.ctx.divided_power(1, 3)
        self.assertEqual(self.ctx.antipode(x), -x)

    def test_hopf_identities(self):
        rng = random.Random(5)
        ctx = self.ctx
        for _ in range(15):
            u, v = random_element(ctx, rng), random_element(ctx, rng)
            self.assertEqual(ctx.coproduct(ctx.mul(u, v)), ctx.tensor_mul(ctx.coproduct(u), ctx.coproduct(v)))
            self.assertEqual(ctx.counit_left(ctx.coproduct(u)), u)
            self.assertEqual(ctx.antipode_convolution(ctx.coproduct(u)), ctx.one().scale(ctx.counit(u)))


class TestGroupLikes(unittest.TestCase):
    """Group-like tests, exponentials and exponential sequences."""

    def setUp(self):
        self.ctx = TruncCtx(validate_gcm(A2), 3, ScalarField.prime(5))

    def test_exponential_is_grouplike(self):
        g = services.twisted_exp(self.ctx, self.ctx.band.e(0), 3)
        self.assertTrue(services.is_grouplike(self.ctx, g.series))

    def test_sum_of_generators_is_not(self):
        u = self.ctx.one() + self.ctx.e(0) + self.ctx.e(1)
        self.assertFalse(services.is_grouplike(self.ctx, u))
        with self.assertRaises(NotGroupLike):
            services.normal_form(self.ctx, u)

    def test_products_and_inverses(self):
        ctx = self.ctx
        g = services.twisted_exp(ctx, ctx.band.e(0), 2)
        h = ctx.real_root_element((1, 1), 4)
        gh = ctx.mul(g.series, h.series)
        self.assertTrue(ctx.is_grouplike(gh))
        inverse = ctx.inverse(GroupElement(gh))
        self.assertTrue(ctx.is_grouplike(inverse.series))
        self.assertEqual(ctx.mul(gh, inverse.series), ctx.one())

    def test_zero_parameter(self):
        g = services.twisted_exp(self.ctx, self.ctx.band.e(1), 0)
        self.assertTrue(g.is_identity())

    def test_one_parameter_subgroup(self):
        x = self.ctx.band.e(0)
        for lam, mu in ((1, 2), (3, 4)):
            left = self.ctx.mul(self.ctx.twisted_exp(x, lam).series, self.ctx.twisted_exp(x, mu).series)
            self.assertEqual(left, self.ctx.twisted_exp(x, (lam + mu) % 5).series)

    def test_exponential_sequence_axioms(self):
        """x^[0] = 1, x^[1] = x and ∇x^[n] = Σ x^[k] ⊗ x^[l] for every basis letter."""
        ctx = TruncCtx(validate_gcm(AFFINE_SL2), 4, ScalarField.prime(5))
        for letter in ctx.basis_letters():
            series = ctx.letter_series(letter)
            self.assertEqual(series[0], ctx.one())
            self.assertEqual(series[1], ctx.letter_element(letter))
            for n in range(len(series)):
                expected = {}
                for k in range(n + 1):
                    for pair, c in ctx.tensor(series[k], series[n - k]).items():
                        expected[pair] = (expected.get(pair, 0) + c) % 5
                expected = {pair: c for pair, c in expected.items() if c}
                self.assertEqual(ctx.coproduct(series[n]), expected)

    def test_real_root_element_below_the_bound(self):
        """Real root groups exist at p <= N because e_alpha^(n) is integral."""
        ctx = TruncCtx(validate_gcm(AFFINE_SL2), 6, ScalarField.prime(3))
        g = ctx.real_root_element((2, 1), 1)
        self.assertTrue(ctx.is_grouplike(g.series))
        self.assertEqual(g.leading_height(), 3)

    def test_imaginary_exponential_needs_large_characteristic(self):
        ctx = TruncCtx(validate_gcm(AFFINE_SL2), 4, ScalarField.prime(2))
        x = ctx.letter_lie((2, (1, 1), 0))
        with self.assertRaises(CharacteristicConstraint):
            ctx.twisted_exp(x, 1)


class TestNormalForm(unittest.TestCase):
    """Peeling group-likes into ordered products of twisted exponentials."""

    def setUp(self):
        self.ctx = TruncCtx(validate_gcm(A2), 2, ScalarField.prime(5))

    def test_single_exponential(self):
        letter = (1, (1, 0), 0)
        coords = services.normal_form(self.ctx, self.ctx.exp_letter(letter, 3))
        self.assertEqual(dict(coords), {(1, (0, 1), 0): 0, letter: 3, (2, (1, 1), 0): 0})

    def test_product_of_generators(self):
        ctx = self.ctx
        g = ctx.mul(ctx.twisted_exp(ctx.band.e(0), 1).series, ctx.twisted_exp(ctx.band.e(1), 1).series)
        coords = dict(services.normal_form(ctx, g))
        kappa = ctx.band.bracket(ctx.band.e(0), ctx.band.e(1)).coefficient(("+", (1, 1), 0))
        self.assertEqual(coords[(1, (0, 1), 0)], 1)
        self.assertEqual(coords[(1, (1, 0), 0)], 1)
        self.assertEqual(coords[(2, (1, 1), 0)], kappa)
        self.assertNotEqual(kappa, 0)

    def test_round_trip(self):
        rng = random.Random(3)
        ctx = TruncCtx(validate_gcm(AFFINE_SL2), 4, ScalarField.prime(5))
        letters = ctx.basis_letters()
        for _ in range(20):
            coords = [(letter, rng.randrange(5)) for letter in letters]
            g = ctx.from_normal_form(coords)
            self.assertEqual(services.normal_form(ctx, g), coords)

    def test_rebuilds_random_products(self):
        """from_normal_form(normal_form(g)) == g for products taken out of order."""
        rng = random.Random(11)
        for matrix, N in ((A2, 3), (AFFINE_SL2, 4)):
            ctx = TruncCtx(validate_gcm(matrix), N, ScalarField.prime(5))
            letters = ctx.basis_letters()
            for _ in range(15):
                g = ctx.one()
                for _ in range(rng.randrange(1, 6)):
                    g = ctx.mul(g, ctx.exp_letter(rng.choice(letters), rng.randrange(1, 5)))
                coords = services.normal_form(ctx, g)
                self.assertEqual(ctx.from_normal_form(coords).series, g)

    def test_needs_large_characteristic(self):
        ctx = TruncCtx(validate_gcm(A2), 3, ScalarField.prime(3))
        with self.assertRaises(CharacteristicConstraint):
            services.normal_form(ctx, ctx.one())


class TestWeylAction(unittest.TestCase):
    """s_i* on 𝒰(Δ₊ ∖ {α_i}) and the bialgebra property."""

    def test_generator_image_is_the_lie_image(self):
        ctx = TruncCtx(validate_gcm(AFFINE_SL2), 4, ScalarField.prime(7))
        image = services.s_i_star_env(ctx, 0, ctx.e(1))
        expected = ctx.lie_to_env(ctx.band.s_i_star(0, ctx.band.e(1)))
        self.assertEqual(image, expected)
        self.assertEqual(image.contents(), [(2, 1)])

    def test_grading(self):
        ctx = TruncCtx(validate_gcm(A2), 4, ScalarField.prime(7))
        u = ctx.mul(ctx.e(1), ctx.e(1))
        self.assertEqual(services.s_i_star_env(ctx, 0, u).contents(), [(2, 2)])

    def test_letter_e_i_is_unsupported(self):
        ctx = TruncCtx(validate_gcm(A2), 3, ScalarField.prime(7))
        with self.assertRaises(UnsupportedDegree):
            services.s_i_star_env(ctx, 0, ctx.e(0))

    def test_bialgebra_morphism(self):
        """∇ s_i* u = (s_i* ⊗ s_i*) ∇u and ε s_i* = ε for 20 random u per index."""
        rng = random.Random(8)
        for matrix in (A2, AFFINE_SL2):
            ctx = TruncCtx(validate_gcm(matrix), 5, ScalarField.prime(7))
            for i in range(2):
                words = psi_words(ctx, i)
                for _ in range(20):
                    chosen = rng.sample(words, min(3, len(words)))
                    u = ctx.from_pbw({w: QQ(rng.randrange(1, 7)) for w in chosen})
                    report = services.bialgebra_check(ctx, i, u)
                    self.assertTrue(report["holds"], report)


class TestSubalgebras(unittest.TestCase):
    """Membership in 𝒰(Ψ) for closed Ψ."""

    def setUp(self):
        self.ctx = TruncCtx(validate_gcm(AFFINE_SL2), 4, ScalarField.prime(5))
        from roots_app.services import enumerate_roots, height_ideal

        self.table = enumerate_roots(self.ctx.gcm, 4)
        self.psi2 = height_ideal(self.table, 2)

    def test_height_ideal_members(self):
        ctx = self.ctx
        x = ctx.letter_element((2, (1, 1), 0))
        y = ctx.letter_element((3, (2, 1), 0))
        self.assertTrue(services.restrict_to(ctx, self.psi2, x))
        self.assertTrue(services.restrict_to(ctx, self.psi2, ctx.mul(x, x) + y))

    def test_simple_letter_is_not_a_member(self):
        self.assertFalse(services.restrict_to(self.ctx, self.psi2, self.ctx.e(0)))
        self.assertFalse(services.restrict_to(self.ctx, self.psi2, self.ctx.mul(self.ctx.e(0), self.ctx.e(1))))

    def test_not_closed(self):
        with self.assertRaises(NotClosed):
            services.restrict_to(self.ctx, [(1, 0), (0, 1)], self.ctx.e(0))
