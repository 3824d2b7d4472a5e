import itertools
import unittest

import pytest

from cartan_app.services import validate_gcm
from enveloping_app.models import EnvElement
from enveloping_app.services import TruncCtx
from exact_app.errors import HypothesisViolated, InvalidInput, NotGroupLike
from exact_app.scalars import ScalarField
from strip_app import services
from strip_app.models import StripGroupElt

HYPERBOLIC_32 = [[2, -3], [-2, 2]]
HYPERBOLIC_42 = [[2, -4], [-2, 2]]
AFFINE_SL2 = [[2, -2], [-2, 2]]


def strip(matrix, q, i=0, j=1):
    return services.StripCtx(validate_gcm(matrix), i, j, q)


class TestStripProduct(unittest.TestCase):
    """Divided-power products on the strip."""

    def setUp(self):
        self.ctx = strip(HYPERBOLIC_32, 2)

    def test_e_powers(self):
        ctx3 = strip(HYPERBOLIC_42, 3)
        self.assertEqual(services.strip_mul(ctx3, ctx3.E(1), ctx3.E(1)), ctx3.E(2).scale(2))
        self.assertTrue(self.ctx.mul(self.ctx.E(1), self.ctx.E(1)).is_zero())

    def test_right_multiplication_by_e(self):
        for s in range(3):
            self.assertEqual(self.ctx.mul(self.ctx.F(0, 0), self.ctx.E(s)), self.ctx.F(0, s))

    def test_two_e_j_letters_vanish(self):
        self.assertTrue(self.ctx.mul(self.ctx.F(0, 0), self.ctx.F(1, 0)).is_zero())

    def test_leaving_the_strip(self):
        self.assertTrue(self.ctx.mul(self.ctx.E(2), self.ctx.F(1, 0)).is_zero())

    def test_associativity_on_basis_triples(self):
        for ctx in (self.ctx, strip(HYPERBOLIC_42, 3)):
            basis = [ctx.element({k: 1}) for k in ctx.basis]
            for x, y, z in itertools.product(basis, repeat=3):
                self.assertEqual(ctx.mul(ctx.mul(x, y), z), ctx.mul(x, ctx.mul(y, z)))

    def test_agrees_with_the_enveloping_algebra(self):
        """The strip product is the product in 𝒰⁺ with the outside degrees dropped."""
        env = TruncCtx(self.ctx.gcm, 3, ScalarField.prime(2))
        inside = set(self.ctx.strip_degrees())
        for x, y in itertools.product(self.ctx.basis, repeat=2):
            u, v = self.ctx.element({x: 1}), self.ctx.element({y: 1})
            full = env.mul(self.ctx.to_env(env, u), self.ctx.to_env(env, v))
            projected = EnvElement(env.field, {k: c for k, c in full.terms.items() if k[0] in inside})
            self.assertEqual(self.ctx.to_env(env, self.ctx.mul(u, v)), projected, (x, y))

    def test_divided_adjoint_power_expansion(self):
        ctx = strip(HYPERBOLIC_42, 3)
        env = TruncCtx(ctx.gcm, 4, ScalarField.prime(3))
        band = env.band
        x = band.e(1)
        for s in range(1, 3):
            x_s = band.ad_divided_power(0, "+", s, band.e(1))
            self.assertEqual(ctx.to_env(env, ctx.ad_power(s)), env.lie_to_env(x_s))
        self.assertEqual(ctx.to_env(env, ctx.ad_power(0)), env.lie_to_env(x))

    def test_small_entry_is_refused(self):
        """|a_ij| = 2 < q = 3 for the affine matrix; (2,1) of [[2,-3],[-2,2]] likewise."""
        with self.assertRaises(HypothesisViolated):
            strip(AFFINE_SL2, 3)
        with self.assertRaises(HypothesisViolated):
            strip(HYPERBOLIC_32, 3, 1, 0)

    def test_entry_equal_to_q_is_accepted(self):
        self.assertEqual(strip(HYPERBOLIC_32, 3).group_order, 3 ** 5)

    def test_composite_q_is_refused(self):
        with self.assertRaises(InvalidInput):
            strip(HYPERBOLIC_42, 4)

    def test_equal_indices_are_refused(self):
        with self.assertRaises(InvalidInput):
            strip(HYPERBOLIC_32, 2, 0, 0)


class TestStripGroup(unittest.TestCase):
    """Group-likes and their coordinates."""

    def setUp(self):
        self.ctx = strip(HYPERBOLIC_32, 2)

    def test_exp_of_e_i(self):
        u = services.glambda(self.ctx, [1, 0, 0, 0])
        self.assertEqual(u, self.ctx.exp_e(1))

    def test_exp_of_e_j(self):
        u = services.glambda(self.ctx, [0, 1, 0, 0])
        self.assertEqual(u, self.ctx.one() + self.ctx.F(0, 0))

    def test_census_q2(self):
        found = services.grouplike_census(self.ctx)
        self.assertEqual(len(found), 16)
        coords = {services.normal_form(self.ctx, u) for u in found}
        self.assertEqual(len(coords), 16)

    def test_census_q3(self):
        ctx = strip(HYPERBOLIC_42, 3)
        found = services.grouplike_census(ctx)
        self.assertEqual(len(found), 3 ** 5)

    def test_normal_form_inverts_glambda(self):
        for ctx in (self.ctx, strip(HYPERBOLIC_42, 3)):
            for g in ctx.elements():
                self.assertEqual(ctx.normal_form(ctx.glambda(g)), g)

    def test_every_glambda_is_grouplike(self):
        for ctx in (self.ctx, strip(HYPERBOLIC_42, 3)):
            for g in ctx.elements():
                self.assertTrue(ctx.is_grouplike(ctx.glambda(g)), g.coords)

    def test_tensor_square_stays_in_the_strip(self):
        u = self.ctx.one() + self.ctx.F(0, 0) + self.ctx.F(1, 0)
        square = self.ctx.tensor(u, u)
        self.assertNotIn((("F", 0, 0), ("F", 1, 0)), square)
        self.assertIn((("F", 0, 0), ("E", 0)), square)
        self.assertNotIn((("E", 2), ("E", 1)), self.ctx.tensor(self.ctx.E(2), self.ctx.E(1)))

    def test_not_grouplike(self):
        with self.assertRaises(NotGroupLike):
            self.ctx.normal_form(self.ctx.one() + self.ctx.E(1))

    def test_inverse(self):
        g = self.ctx.coords([1, 1, 0, 1])
        self.assertTrue(self.ctx.group_mul(g, self.ctx.group_inv(g)).is_identity)

    def test_wrong_coordinate_count(self):
        with self.assertRaises(InvalidInput):
            self.ctx.glambda(StripGroupElt(0, (1, 0)))


class TestStripCommutator(unittest.TestCase):
    """C_1 = C_q on the strip group."""

    def setUp(self):
        self.ctx = strip(HYPERBOLIC_32, 2)

    def test_self_commutator(self):
        g = self.ctx.coords([1, 1, 0, 1])
        self.assertTrue(services.strip_commutator(self.ctx, g, g)["commutator"].is_identity)

    def test_lambda_coordinate_vanishes(self):
        for g, h in itertools.product(self.ctx.elements(), repeat=2):
            self.assertEqual(self.ctx.commutator(g, h).lam, 0)

    def test_exhaustive_q2(self):
        result = services.c1_cq_check(self.ctx)
        self.assertEqual(result["pairs"], 256)
        self.assertEqual(result["violations"], 0)

    @pytest.mark.slow
    def test_exhaustive_q3(self):
        result = services.c1_cq_check(strip(HYPERBOLIC_42, 3))
        self.assertTrue(result["holds"])


class TestNondensityWitness(unittest.TestCase):
    """Derived subgroup and root-group closure certificates."""

    def test_q2(self):
        report = services.nondensity_witness(validate_gcm(HYPERBOLIC_32), 2, 0, 1)
        self.assertEqual(report["ambient_order"], 16)
        self.assertTrue(report["verdicts"]["part1"])
        self.assertTrue(report["verdicts"]["part2"])
        self.assertTrue(report["verdicts"]["derived_coordinates_linked"])
        self.assertTrue(report["roots_outside_psi"]["holds"])
        self.assertEqual(report["witness_coords"], [0, 0, 1, 0])
        self.assertLess(report["uplus_image_order"], 16)

    def test_affine_refuses_part_two(self):
        report = services.nondensity_witness(validate_gcm(AFFINE_SL2), 2, 0, 1)
        self.assertTrue(report["verdicts"]["part1"])
        self.assertIsNone(report["verdicts"]["part2"])
        self.assertFalse(report["hypotheses"]["|a_ij| >= q+1"])

    def test_q3(self):
        report = services.nondensity_witness(validate_gcm(HYPERBOLIC_42), 3, 0, 1)
        self.assertEqual(report["ambient_order"], 243)
        self.assertTrue(report["verdicts"]["part1"])
        self.assertTrue(report["verdicts"]["part2"])

    def test_part_one_hypothesis(self):
        with self.assertRaises(HypothesisViolated) as cm:
            services.nondensity_witness(validate_gcm(AFFINE_SL2), 3, 0, 1)
        self.assertEqual(cm.exception.details["inequality"], "|a_ij| >= q")
