import unittest
from unittest.mock import patch

from cartan_app.services import validate_gcm
from exact_app.errors import HypothesisViolated, InvalidInput
from exact_app.scalars import ScalarField
from liealg_app import services
from liealg_app.witness import bracket_witness


class TestBracketWitness(unittest.TestCase):
    """Imaginary degrees with a nonzero lowering, in both branches."""

    def test_branch_one_after_swapping(self):
        report = bracket_witness(3, 2, ScalarField.prime(5))
        self.assertTrue(report["swapped"])
        self.assertEqual(report["branch"], 1)
        self.assertEqual(report["coefficient"], -4)
        self.assertEqual(report["coefficient_in_field"], 1)
        self.assertEqual(report["delta"], [3, 2])
        self.assertEqual(report["certificates"]["delta_kind"], "Imaginary")
        self.assertFalse(report["certificates"]["gamma_minus_alpha_i_is_root"])
        self.assertTrue(report["engine_checked"])

    def test_branch_two(self):
        report = bracket_witness(4, 3, ScalarField.prime(5))
        self.assertFalse(report["swapped"])
        self.assertEqual(report["branch"], 2)
        self.assertEqual(report["coefficient"], -27)
        self.assertEqual(report["delta"], [11, 4])
        self.assertEqual(report["gamma"], [11, 3])
        self.assertEqual(report["certificates"]["delta_kind"], "Imaginary")
        # height 15 is above the replay bound
        self.assertFalse(report["engine_checked"])

    def test_engine_replay_with_raised_bound(self):
        with patch("liealg_app.witness.get_setting", return_value=16):
            report = bracket_witness(3, 3, ScalarField.rationals())
        self.assertEqual(report["branch"], 1)
        self.assertEqual(report["coefficient"], -7)
        self.assertTrue(report["engine_checked"])

    def test_hypothesis(self):
        with self.assertRaises(HypothesisViolated):
            bracket_witness(2, 2, ScalarField.prime(5))
        with self.assertRaises(HypothesisViolated):
            bracket_witness(4, 2, ScalarField.prime(2))
        with self.assertRaises(InvalidInput):
            bracket_witness(0, 5, ScalarField.prime(5))


class TestIsomorphismInvariants(unittest.TestCase):
    """Height profiles and Serre onsets."""

    def test_onset_recovers_entries(self):
        pattern = services.serre_onset_pattern(validate_gcm([[2, -1], [-2, 2]]), 5)
        self.assertEqual(pattern["first_onset"], 3)
        self.assertEqual(pattern["first_dim"], 1)
        self.assertEqual(pattern["second_onset"], 4)
        self.assertEqual(pattern["recovered_entries"], [1, 2])
        equal = services.serre_onset_pattern(validate_gcm([[2, -2], [-2, 2]]), 5)
        self.assertEqual((equal["first_onset"], equal["first_dim"]), (4, 2))
        self.assertEqual(equal["recovered_entries"], [2, 2])

    def test_profiles_distinguish(self):
        result = services.compare_isomorphism_invariants(
            validate_gcm([[2, -2], [-2, 2]]), validate_gcm([[2, -3], [-3, 2]]), 5
        )
        self.assertEqual(result["verdict"], "distinguished")
        self.assertEqual(result["first_difference"], 4)

    def test_transpose_is_consistent(self):
        A = validate_gcm([[2, -1], [-2, 2]])
        result = services.compare_isomorphism_invariants(A, A.transpose(), 5)
        self.assertTrue(result["profiles_equal"])
        self.assertEqual(result["rank2_forced"], "B in {A, A^T}")
        self.assertEqual(result["verdict"], "consistent")

    def test_onset_needs_rank_two(self):
        with self.assertRaises(InvalidInput):
            services.serre_onset_pattern(validate_gcm([[2, -1, 0], [-1, 2, -1], [0, -1, 2]]), 4)
