"""
Compute logger for tracking and analyzing slow exact computations.
"""
import json
import logging
import os
import threading
import time
from contextlib import contextmanager
from datetime import datetime
from functools import wraps
from typing import Any, Dict, List, Optional

# Dedicated logger for timed computations
compute_logger = logging.getLogger("kmforge.compute")

DEFAULT_CONFIG = {
    "slow_threshold_ms": 500,     # Log computations taking longer than this
    "log_all": False,             # When True, log every decorated call
    "log_to_file": True,
    "log_file": "logs/kmforge_compute.log",
    "include_params": True,
    "redact_fields": ["password", "token", "secret", "key"],
}

CONTEXT_MARKER = " | context: "

# Thread-local storage for the running command
_local = threading.local()


@contextmanager
def compute_context(command: str, job: Optional[str] = None):
    """Tag every computation logged inside the block with the command (and job) name."""
    _local.command = command
    _local.job = job
    try:
        yield
    finally:
        for attr in ("command", "job"):
            if hasattr(_local, attr):
                delattr(_local, attr)


def configure_compute_logging(config: Optional[Dict[str, Any]] = None) -> None:
    """
    Configure the compute logger.

    Args:
        config: Dictionary of options overriding DEFAULT_CONFIG.
    """
    effective_config = {**DEFAULT_CONFIG, **(config or {})}

    if effective_config["log_to_file"]:
        log_file = effective_config["log_file"]
        if not os.path.isabs(log_file) and "DJANGO_SETTINGS_MODULE" in os.environ:
            from django.conf import settings
            base_dir = getattr(settings, "BASE_DIR", None)
            if base_dir:
                log_file = os.path.join(base_dir, log_file)

        log_dir = os.path.dirname(log_file)
        try:
            if log_dir:
                os.makedirs(log_dir, exist_ok=True)
        except OSError as e:
            logging.getLogger(__name__).warning(f"Failed to create log directory '{log_dir}': {e}")
            log_file = os.path.basename(log_file)

        already = any(
            isinstance(h, logging.FileHandler) and getattr(h, "baseFilename", None) == os.path.abspath(log_file)
            for h in compute_logger.handlers
        )
        if not already:
            file_handler = logging.FileHandler(log_file)
            file_handler.setLevel(logging.INFO)
            file_handler.setFormatter(logging.Formatter('%(asctime)s [%(levelname)s] %(message)s'))
            compute_logger.addHandler(file_handler)
        effective_config["log_file"] = log_file

    compute_logger.setLevel(logging.INFO)
    compute_logger.config = effective_config


def _summarize(value: Any) -> Any:
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)) and len(value) <= 8:
        return [_summarize(v) for v in value]
    name = getattr(value, "log_label", None)
    if callable(name):
        return name()
    return type(value).__name__


def log_computation(name: Optional[str] = None):
    """
    Decorator timing an exact computation.

    Usage:
        @log_computation("groupquot.lower_central_series")
        def lower_central_series(ctx, ...):
            ...

    Slow calls are logged at WARNING, every call when ``log_all`` is set, and
    failures at ERROR before the exception propagates.
    """
    def decorator(func):
        op_name = name or f"{func.__module__}.{func.__qualname__}"

        @wraps(func)
        def wrapper(*args, **kwargs):
            config = getattr(compute_logger, "config", DEFAULT_CONFIG)

            params = None
            if config["include_params"]:
                params = {
                    k: "[REDACTED]" if any(f.lower() in k.lower() for f in config["redact_fields"])
                    else _summarize(v)
                    for k, v in kwargs.items()
                }
                if args:
                    params["args"] = [_summarize(a) for a in args]

            context: Dict[str, Any] = {"operation": op_name, "params": params}
            if hasattr(_local, "command"):
                context["command"] = getattr(_local, "command", None)
                context["job"] = getattr(_local, "job", None)

            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                elapsed_ms = (time.perf_counter() - start_time) * 1000
                context.update(elapsed_ms=elapsed_ms, success=False, error=str(e).split("\n")[0],
                               error_type=e.__class__.__name__)
                compute_logger.error(
                    f"Computation error: {op_name} - {elapsed_ms:.2f}ms{CONTEXT_MARKER}"
                    f"{json.dumps(context, default=str)}"
                )
                raise

            elapsed_ms = (time.perf_counter() - start_time) * 1000
            context.update(elapsed_ms=elapsed_ms, success=True)
            is_slow = elapsed_ms > config["slow_threshold_ms"]
            if is_slow or config["log_all"]:
                level = logging.WARNING if is_slow else logging.INFO
                compute_logger.log(
                    level,
                    f"Computation: {op_name} {'(SLOW) ' if is_slow else ''}- {elapsed_ms:.2f}ms"
                    f"{CONTEXT_MARKER}{json.dumps(context, default=str)}",
                )
            return result

        return wrapper
    return decorator


def parse_log_line(line: str) -> Optional[Dict[str, Any]]:
    """Return the JSON context embedded in a compute log line, or None."""
    if CONTEXT_MARKER not in line:
        return None
    try:
        context = json.loads(line.split(CONTEXT_MARKER, 1)[1].strip())
    except ValueError:
        return None
    timestamp_str = line.split(' [')[0]
    try:
        context["timestamp"] = datetime.strptime(timestamp_str, "%Y-%m-%d %H:%M:%S,%f").isoformat()
    except ValueError:
        context["timestamp"] = None
    return context


def get_slow_computation_stats(log_file: Optional[str] = None, min_time_ms: Optional[float] = None,
                               group_by: str = "operation", top_n: int = 10) -> List[Dict[str, Any]]:
    """
    Parse the compute log and aggregate timings.

    Args:
        log_file: Path to the log file (uses configured file if None)
        min_time_ms: Minimum elapsed time to include (uses configured threshold if None)
        group_by: Context field to group by ("operation", "command", "error_type")
        top_n: Number of groups to return, slowest average first
    """
    config = getattr(compute_logger, "config", DEFAULT_CONFIG)
    log_file = log_file or config["log_file"]
    if min_time_ms is None:
        min_time_ms = config["slow_threshold_ms"]
    if not os.path.exists(log_file):
        return []

    stats: Dict[str, Dict[str, Any]] = {}
    with open(log_file, "r") as f:
        for line in f:
            context = parse_log_line(line)
            if context is None:
                continue
            elapsed = context.get("elapsed_ms", 0)
            if elapsed < min_time_ms:
                continue
            key = context.get(group_by) or "unknown"
            entry = stats.setdefault(key, {
                "count": 0, "failures": 0, "total_time_ms": 0.0, "avg_time_ms": 0.0,
                "max_time_ms": 0.0, "min_time_ms": float("inf"), "last_occurred": None,
                "slowest": None,
            })
            entry["count"] += 1
            if not context.get("success", True):
                entry["failures"] += 1
            entry["total_time_ms"] += elapsed
            entry["avg_time_ms"] = entry["total_time_ms"] / entry["count"]
            entry["min_time_ms"] = min(entry["min_time_ms"], elapsed)
            if elapsed >= entry["max_time_ms"]:
                entry["max_time_ms"] = elapsed
                entry["slowest"] = context
            if context.get("timestamp"):
                entry["last_occurred"] = context["timestamp"]

    result = [{"name": k, **v} for k, v in stats.items()]
    result.sort(key=lambda x: x["avg_time_ms"], reverse=True)
    return result[:top_n]
