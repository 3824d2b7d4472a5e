"""
Shared plumbing for the report commands.

A report command parses its inputs through the serializers, calls one
builder from ``reports_app.services`` inside a compute-log context, and
writes the rendered report to stdout or ``--out``. Exit codes: 0 when the
checked property holds (or nothing is checked), 1 when it is violated,
2 on invalid input or a refused computation.
"""
import json
import logging
import os
from typing import Any, Dict, Optional

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers as drf

from exact_app.compute_logger import compute_context
from exact_app.errors import InvalidInput, KMForgeError

from .rendering import render_report
from .serializers import FieldSerializer, GCMSerializer, TruncationSerializer

logger = logging.getLogger(__name__)

INVALID = 2
VIOLATED = 1


def load_json_argument(raw: Any, what: str = "gcm") -> Any:
    """Inline JSON text, a path to a JSON file, or an already parsed value."""
    if not isinstance(raw, str):
        return raw
    if os.path.isfile(raw):
        with open(raw, "r", encoding="utf-8") as f:
            raw = f.read()
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"--{what} is neither JSON nor a readable file",
                           details={what: raw[:80], "error": str(e)}) from e


def validated(serializer_class, data: Any) -> Dict:
    serializer = serializer_class(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data


def load_gcm(raw: Any, what: str = "gcm"):
    return validated(GCMSerializer, load_json_argument(raw, what))["gcm"]


def load_field(char: int):
    return validated(FieldSerializer, {"char": char})["field"]


def load_height(height: int) -> int:
    return validated(TruncationSerializer, {"height": height})["height"]


class ReportCommand(BaseCommand):
    """Base class: subclasses declare their flags and implement ``build``."""

    takes_gcm = True
    takes_field = False
    takes_height = False
    takes_order_cap = False
    default_char: Optional[int] = 0
    default_height: Optional[int] = None

    def add_arguments(self, parser):
        if self.takes_gcm:
            parser.add_argument('--gcm', type=str, required=True,
                                help='GCM as JSON ([[...]] or {"labels", "matrix"}) or a path to a JSON file')
        if self.takes_field:
            parser.add_argument('--char', type=int, default=self.default_char, required=self.default_char is None,
                                help='Characteristic: 0 for the rationals or a prime')
        if self.takes_height:
            parser.add_argument('--height', type=int, default=self.default_height,
                                required=self.default_height is None, help='Truncation height N')
        if self.takes_order_cap:
            parser.add_argument('--order-cap', type=int, default=None,
                                help='Largest subgroup order to materialise (overrides KMFORGE_ORDER_CAP)')
        parser.add_argument('--out', type=str, default=None, help='Write the report here instead of stdout')
        parser.add_argument('--job', type=str, default=None, help='Job label for the compute log')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def build(self, **options):
        raise NotImplementedError

    @property
    def command_name(self) -> str:
        return self.__module__.rsplit('.', 1)[-1]

    def handle(self, *args, **options):
        name = self.command_name
        try:
            with compute_context(name, options.get('job')):
                payload, holds = self.build(**options)
        except KMForgeError as e:
            self.stderr.write(json.dumps({"error": e.as_dict()}, default=str))
            raise CommandError(f"{name}: {e.message} [{e.code}]", returncode=INVALID) from e
        except drf.ValidationError as e:
            self.stderr.write(json.dumps({"error": {"code": "invalid_input", "details": e.detail}}, default=str))
            raise CommandError(f"{name}: invalid input", returncode=INVALID) from e

        text = render_report(payload, name)
        out = options.get('out')
        if out:
            with open(out, "w", encoding="utf-8") as f:
                f.write(text + "\n")
            self.stderr.write(f"report written to {out}")
        else:
            self.stdout.write(text)

        if holds is False:
            logger.warning(f"{name}: checked property violated")
            raise CommandError(f"{name}: checked property violated", returncode=VIOLATED)
