"""Settings lookup with built-in defaults."""
import logging
import os
from typing import Any, Optional

from .errors import InvalidInput

logger = logging.getLogger(__name__)

DEFAULTS = {
    "ORDER_CAP": 10**6,
    "CENSUS_CAP": 10**6,
    "POWER_SCAN_CAP": 729,
    "WITNESS_MAX_HEIGHT": 8,
    "REPORT_SCHEMA": "kmforge.report/1",
    "RANDOM_SEED": 20240607,
}

ORDER_CAP_ENV = "KMFORGE_ORDER_CAP"


def get_setting(name: str) -> Any:
    """Read ``settings.KMFORGE[name]``; fall back to DEFAULTS outside a configured project."""
    try:
        from django.conf import settings
        if settings.configured:
            return getattr(settings, "KMFORGE", {}).get(name, DEFAULTS[name])
    except ImportError:  # pragma: no cover
        pass
    return DEFAULTS[name]


def resolve_order_cap(flag: Optional[int] = None) -> int:
    """CLI flag > KMFORGE_ORDER_CAP environment variable > settings default."""
    if flag is not None:
        return int(flag)
    raw = os.getenv(ORDER_CAP_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError as e:
            raise InvalidInput(
                f"{ORDER_CAP_ENV} must be an integer",
                details={"value": raw},
            ) from e
    return int(get_setting("ORDER_CAP"))
