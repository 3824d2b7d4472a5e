import random
import unittest
from unittest.mock import patch

import pytest

from cartan_app.services import validate_gcm
from exact_app.errors import (
    CapExceeded,
    CharacteristicConstraint,
    InvalidInput,
    NotPrenilpotent,
    OrderCapExceeded,
    UnsupportedDegree,
)
from groupquot_app import services
from groupquot_app.models import TorusElement
from groupquot_app.pcgs import Pcgs

A2 = [[2, -1], [-1, 2]]
A3 = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
B2 = [[2, -2], [-1, 2]]
AFFINE_SL2 = [[2, -2], [-2, 2]]


def context(matrix, N, p, **kwargs):
    return services.QuotCtx(validate_gcm(matrix), N, p, **kwargs)


class TestGroupArithmetic(unittest.TestCase):
    """Products, inverses and commutators of group-like series."""

    def setUp(self):
        self.ctx = context(AFFINE_SL2, 4, 5)
        self.rng = random.Random(7)

    def test_identity_and_inverse(self):
        g = self.ctx.random_element(self.rng)
        self.assertEqual(services.group_mul(self.ctx, g, self.ctx.identity()), g)
        self.assertTrue(services.group_mul(self.ctx, g, services.group_inv(self.ctx, g)).is_identity())

    def test_associativity(self):
        for _ in range(5):
            a, b, c = (self.ctx.random_element(self.rng) for _ in range(3))
            self.assertEqual(
                self.ctx.mul(self.ctx.mul(a, b), c),
                self.ctx.mul(a, self.ctx.mul(b, c)),
            )

    def test_commutator_of_simple_root_elements(self):
        c = services.commutator(self.ctx, self.ctx.x((1, 0)), self.ctx.x((0, 1)))
        self.assertEqual(c.leading_height(), 2)

    def test_root_groups_are_one_parameter(self):
        alpha = (2, 1)
        product = self.ctx.mul(self.ctx.x(alpha, 2), self.ctx.x(alpha, 4))
        self.assertEqual(product, self.ctx.x(alpha, 1))

    def test_order_of_the_quotient(self):
        self.assertEqual(self.ctx.height_dims, [2, 1, 2, 1])
        self.assertEqual(self.ctx.order, 5 ** 6)
        self.assertEqual(self.ctx.coordinate_log(3), 3)

    def test_rejects_composite_characteristic(self):
        with self.assertRaises(InvalidInput):
            context(A2, 2, 6)


class TestTorusAndLowering(unittest.TestCase):
    """Conjugation by H(F_p) and by exp(λ f_i)."""

    def setUp(self):
        self.ctx = context(A2, 2, 5)

    def test_torus_scales_root_groups(self):
        t = TorusElement((2, 3), 5)
        g = self.ctx.x((1, 1), 1)
        self.assertEqual(services.torus_conj(self.ctx, t, g), self.ctx.x((1, 1), 6))
        self.assertEqual(services.torus_conj(self.ctx, t, self.ctx.x((1, 0), 1)), self.ctx.x((1, 0), 2))

    def test_torus_rejects_zero(self):
        with self.assertRaises(InvalidInput):
            TorusElement((0, 1), 5)

    def test_torus_rank_mismatch(self):
        with self.assertRaises(InvalidInput):
            services.torus_conj(self.ctx, TorusElement((1, 1, 1), 5), self.ctx.identity())

    def test_lowering_moves_weight_down(self):
        g = self.ctx.x((1, 1), 1)
        image = services.lowering_conj(self.ctx, 0, 1, g)
        coords = {letter[1]: c for letter, c in self.ctx.env.normal_form(image)}
        self.assertIn(coords[(1, 1)], (1, 4))
        self.assertIn(coords[(0, 1)], (1, 4))
        self.assertEqual(coords[(1, 0)], 0)

    def test_lowering_by_zero_is_trivial(self):
        g = self.ctx.x((1, 1), 3)
        self.assertEqual(services.lowering_conj(self.ctx, 0, 0, g), g)

    def test_lowering_is_a_homomorphism(self):
        g, h = self.ctx.x((0, 1), 2), self.ctx.x((1, 1), 3)
        self.assertEqual(
            services.lowering_conj(self.ctx, 0, 2, self.ctx.mul(g, h)),
            self.ctx.mul(services.lowering_conj(self.ctx, 0, 2, g), services.lowering_conj(self.ctx, 0, 2, h)),
        )

    def test_lowering_refuses_the_simple_root(self):
        with self.assertRaises(UnsupportedDegree):
            services.lowering_conj(self.ctx, 0, 1, self.ctx.x((1, 0), 1))

    def test_lowering_needs_large_characteristic(self):
        ctx = context(AFFINE_SL2, 4, 3)
        with self.assertRaises(CharacteristicConstraint):
            services.lowering_conj(ctx, 0, 1, ctx.x((0, 1), 1))


class TestCommutationConstants(unittest.TestCase):
    """Chevalley commutator formula over prenilpotent intervals."""

    def test_a2(self):
        result = services.commutation_constants(context(A2, 3, 7), (1, 0), (0, 1))
        self.assertEqual(len(result["constants"]), 1)
        entry = result["constants"][0]
        self.assertEqual(entry["gamma"], [1, 1])
        self.assertIn(entry["constant"], (1, -1))
        self.assertTrue(result["validated"])

    def test_orthogonal_roots_commute(self):
        result = services.commutation_constants(context(A3, 3, 7), (1, 0, 0), (0, 0, 1))
        self.assertEqual(result["constants"], [])
        self.assertTrue(result["validated"])

    def test_b2_has_two_terms(self):
        result = services.commutation_constants(context(B2, 4, 7), (1, 0), (0, 1))
        self.assertEqual(sorted(c["gamma"] for c in result["constants"]), [[1, 1], [2, 1]])
        self.assertTrue(result["validated"])

    def test_non_prenilpotent_pair(self):
        with self.assertRaises(NotPrenilpotent):
            services.commutation_constants(context(AFFINE_SL2, 4, 5), (1, 0), (0, 1))


class TestSubgroups(unittest.TestCase):
    """Generated subgroups, the full quotient and the order cap."""

    def test_full_group_has_the_coordinate_order(self):
        ctx = context(AFFINE_SL2, 4, 5)
        G = ctx.full_group()
        self.assertEqual(G.order, 5 ** 6)
        self.assertTrue(ctx.equals_coordinate(G, 1))

    def test_minimal_image_inside_the_full_group(self):
        ctx = context(AFFINE_SL2, 4, 5)
        U = services.minimal_U_image(ctx)
        self.assertTrue(U.is_subgroup_of(ctx.full_group()))
        self.assertLessEqual(U.order, ctx.order)

    def test_finite_type_minimal_image_is_everything(self):
        ctx = context(A2, 2, 5)
        self.assertEqual(services.minimal_U_image(ctx).order, 125)

    def test_closure_of_one_root_group(self):
        ctx = context(A2, 2, 5)
        H = services.subgroup_closure(ctx, [ctx.x((1, 0))])
        self.assertEqual(H.order, 5)
        self.assertTrue(H.contains(ctx.x((1, 0), 3)))
        self.assertFalse(H.contains(ctx.x((0, 1), 1)))

    def test_order_cap(self):
        ctx = context(AFFINE_SL2, 4, 5, order_cap=100)
        with self.assertRaises(OrderCapExceeded):
            ctx.full_group()

    @patch.dict("os.environ", {"KMFORGE_ORDER_CAP": "30"})
    def test_order_cap_from_environment(self):
        ctx = context(A2, 2, 5)
        self.assertEqual(ctx.order_cap, 30)
        with self.assertRaises(OrderCapExceeded):
            ctx.full_group()

    def test_pcgs_exponents_refuse_non_members(self):
        ctx = context(A2, 2, 5)
        pcgs = Pcgs(ctx).close([ctx.x((1, 0))])
        with self.assertRaises(InvalidInput):
            pcgs.exponents(ctx.x((0, 1)))


class TestLowerCentralSeries(unittest.TestCase):
    """gamma_n against the coordinate subgroups."""

    def test_affine_sl2_over_f5(self):
        ctx = context(AFFINE_SL2, 4, 5)
        report = services.lower_central_series(ctx)
        self.assertEqual(report.orders(), [5 ** 6, 5 ** 4, 5 ** 3, 5])
        self.assertTrue(report.equals_coordinate)

    def test_report_is_cached(self):
        ctx = context(A2, 2, 5)
        self.assertIs(services.lower_central_series(ctx), services.lower_central_series(ctx))

    def test_abelianization(self):
        self.assertEqual(services.abelianization_order(context(AFFINE_SL2, 4, 5)), 25)

    def test_abelianization_in_characteristic_two(self):
        self.assertGreater(services.abelianization_order(context(AFFINE_SL2, 3, 2)), 4)


@pytest.mark.slow
class TestDimensionSubgroups(unittest.TestCase):
    """Zassenhaus series and its restricted Lie algebra."""

    def setUp(self):
        self.ctx = context(AFFINE_SL2, 6, 3)

    def test_series_matches_gamma_and_coordinates(self):
        report = services.dimension_subgroups(self.ctx)
        self.assertTrue(report.all_checks("gamma_le_D"))
        self.assertTrue(report.all_checks("D_le_U"))
        self.assertTrue(report.all_checks("D_equals_gamma"))
        self.assertEqual(report.level(1).subgroup.order, 3 ** 9)

    def test_zjl_algebra_is_n_plus(self):
        zjl = services.zjl_lie_algebra(self.ctx)
        self.assertEqual(zjl.dims, [2, 1, 2, 1, 2, 1])
        self.assertTrue(zjl.is_isomorphic, zjl.to_json())
        first = [entry for entry in zjl.p_operation if entry["level"] == 1]
        self.assertTrue(all(entry["coords"] is not None for entry in first))
        self.assertTrue(all(entry["vanishes"] for entry in zjl.p_operation if entry["level"] >= 3))

    @patch("groupquot_app.services.get_setting", return_value=10)
    def test_power_scan_cap(self, mock_setting):
        with self.assertRaises(CapExceeded):
            services.dimension_subgroups(self.ctx)


class TestPPowers(unittest.TestCase):
    """g^p lies in U_{np} for g in U_n."""

    def test_affine_sl2_over_f2(self):
        ctx = context(AFFINE_SL2, 4, 2)
        rng = random.Random(11)
        for n in (1, 2):
            self.assertTrue(services.p_power_check(ctx, n, samples=50, rng=rng)["holds"])

    @pytest.mark.slow
    def test_affine_sl2_over_f3(self):
        ctx = context(AFFINE_SL2, 6, 3)
        rng = random.Random(13)
        for n in (1, 2):
            self.assertTrue(services.p_power_check(ctx, n, samples=50, rng=rng)["holds"])


class TestRootIdealQuotient(unittest.TestCase):
    """U_{Ψ_{I∖J}} and the quotient by it."""

    def test_a2(self):
        result = services.root_ideal_quotient(context(A2, 2, 5), [0])
        self.assertTrue(result["psi_ideal"])
        self.assertTrue(result["complement_closed"])
        self.assertTrue(result["normal"])
        self.assertEqual(result["kernel_order"], 25)
        self.assertEqual(result["quotient_order"], result["expected_quotient_order"])

    def test_affine(self):
        result = services.root_ideal_quotient(context(AFFINE_SL2, 4, 5), [1])
        self.assertEqual(result["kernel_order"], result["expected_kernel_order"])
        self.assertEqual(result["quotient_order"], 5)
        self.assertTrue(result["normal"])

    def test_rejects_everything_or_nothing(self):
        ctx = context(A2, 2, 5)
        with self.assertRaises(InvalidInput):
            services.root_ideal_quotient(ctx, [])
        with self.assertRaises(InvalidInput):
            services.root_ideal_quotient(ctx, [0, 1])
