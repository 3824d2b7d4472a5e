"""
JSON rendering for command reports.

Reports are plain dicts built by the services. Before rendering, tuples and
sets become lists, exact rationals become ``"p/q"`` strings, and integers
outside the IEEE double safe range become decimal strings, so any JSON reader
gets them exactly.
"""
from typing import Any, Dict

from rest_framework.renderers import JSONRenderer

from exact_app.conf import get_setting

SAFE_INTEGER = 2**53 - 1


def to_plain(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, (str, float)):
        return value
    if isinstance(value, int):
        return str(value) if abs(value) > SAFE_INTEGER else value
    if isinstance(value, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return [to_plain(v) for v in sorted(value)]
    to_json = getattr(value, "to_json", None)
    if callable(to_json):
        return to_plain(to_json())
    # sympy QQ / ZZ elements
    numerator = getattr(value, "numerator", None)
    denominator = getattr(value, "denominator", None)
    if numerator is not None and denominator is not None:
        if int(denominator) == 1:
            return to_plain(int(numerator))
        return f"{int(numerator)}/{int(denominator)}"
    return str(value)


def render_report(payload: Dict[str, Any], command: str) -> str:
    """Deterministic JSON text for a report, stamped with the schema and command."""
    data = {"schema": get_setting("REPORT_SCHEMA"), "command": command}
    data.update(to_plain(payload))
    rendered = JSONRenderer().render(data, renderer_context={"indent": 2})
    return rendered.decode("utf-8")
