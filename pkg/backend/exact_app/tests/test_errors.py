import os
import unittest
from unittest.mock import patch

from exact_app.conf import DEFAULTS, resolve_order_cap
from exact_app.errors import DiagonalNotTwo, InvalidGCM, InvalidInput, KMForgeError, OrderCapExceeded


class TestErrorFormatting(unittest.TestCase):
    """Errors carry a code, details and guidance in their message."""

    def test_message_includes_context(self):
        error = OrderCapExceeded("Group too large", details={"order": 5**20, "cap": 10**6})
        text = str(error)
        self.assertIn("Group too large", text)
        self.assertIn("Code: order_cap_exceeded", text)
        self.assertIn("cap=1000000", text)
        self.assertIn("--order-cap", text)

    def test_subclass_hierarchy(self):
        error = DiagonalNotTwo("bad diagonal", details={"i": 1})
        self.assertIsInstance(error, InvalidGCM)
        self.assertIsInstance(error, KMForgeError)
        self.assertEqual(error.as_dict(), {"code": "diagonal_not_two", "message": "bad diagonal",
                                           "details": {"i": 1}})

    def test_explicit_guidance_overrides_default(self):
        error = DiagonalNotTwo("bad", guidance="Fix row 2")
        self.assertIn("Fix row 2", str(error))
        self.assertNotIn("Axiom C1", str(error))


class TestOrderCapResolution(unittest.TestCase):
    """Flag beats environment beats settings."""

    def test_flag_wins(self):
        with patch.dict(os.environ, {"KMFORGE_ORDER_CAP": "7"}):
            self.assertEqual(resolve_order_cap(11), 11)

    def test_environment_beats_settings(self):
        with patch.dict(os.environ, {"KMFORGE_ORDER_CAP": "7"}):
            self.assertEqual(resolve_order_cap(), 7)

    def test_settings_default(self):
        with patch.dict(os.environ, {}, clear=False):
            os.environ.pop("KMFORGE_ORDER_CAP", None)
            self.assertEqual(resolve_order_cap(), DEFAULTS["ORDER_CAP"])

    def test_invalid_environment_value(self):
        with patch.dict(os.environ, {"KMFORGE_ORDER_CAP": "lots"}):
            with self.assertRaises(InvalidInput):
                resolve_order_cap()
