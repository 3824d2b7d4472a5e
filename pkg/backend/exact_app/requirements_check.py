"""
Compare installed distributions with backend/requirements.txt.

Findings are one of OK, MISSING, OUT_OF_RANGE, PIN_MISMATCH or UNSPECIFIED;
every finding except OK and UNSPECIFIED is a mismatch.
"""
import logging
from importlib import metadata
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional

from packaging.requirements import InvalidRequirement, Requirement
from packaging.utils import canonicalize_name
from packaging.version import InvalidVersion, Version

logger = logging.getLogger(__name__)

REQUIREMENTS_FILE = Path(__file__).resolve().parent.parent / "requirements.txt"

OK = "OK"
MISSING = "MISSING"
OUT_OF_RANGE = "OUT_OF_RANGE"
PIN_MISMATCH = "PIN_MISMATCH"
UNSPECIFIED = "UNSPECIFIED"
SKIPPED = "SKIPPED"


class Finding(NamedTuple):
    name: str
    specifier: str
    installed: Optional[str]
    status: str

    @property
    def is_mismatch(self) -> bool:
        return self.status in (MISSING, OUT_OF_RANGE, PIN_MISMATCH)


def requirement_lines(text: str) -> List[str]:
    """Requirement specs with blank lines and comments removed."""
    out = []
    for raw in text.splitlines():
        spec = raw.split("#", 1)[0].strip()
        if spec and not spec.startswith("-"):
            out.append(spec)
    return out


def installed_versions() -> Dict[str, str]:
    return {
        canonicalize_name(dist.metadata["Name"]): dist.version
        for dist in metadata.distributions()
        if dist.metadata.get("Name")
    }


def check(lines: Iterable[str], installed: Dict[str, str]) -> List[Finding]:
    findings = []
    for line in lines:
        try:
            req = Requirement(line)
        except InvalidRequirement as e:
            logger.warning(f"skipping unparseable requirement {line!r}: {e}")
            findings.append(Finding(line, "", None, SKIPPED))
            continue
        version = installed.get(canonicalize_name(req.name))
        spec = str(req.specifier)
        if version is None:
            findings.append(Finding(req.name, spec, None, MISSING))
            continue
        if not req.specifier:
            findings.append(Finding(req.name, spec, version, UNSPECIFIED))
            continue
        try:
            parsed = Version(version)
        except InvalidVersion:
            findings.append(Finding(req.name, spec, version, OUT_OF_RANGE))
            continue
        pins = [s for s in req.specifier if s.operator == "=="]
        if not req.specifier.contains(parsed, prereleases=True):
            status = PIN_MISMATCH if pins else OUT_OF_RANGE
        else:
            status = OK
        findings.append(Finding(req.name, spec, version, status))
    return findings


def pinned_text(text: str, installed: Dict[str, str]) -> str:
    """``text`` with every installed requirement pinned to its installed version; comments are kept."""
    out = []
    for raw in text.splitlines():
        spec, sep, comment = raw.partition("#")
        try:
            req = Requirement(spec.strip()) if spec.strip() else None
        except InvalidRequirement:
            req = None
        version = installed.get(canonicalize_name(req.name)) if req else None
        if version is None:
            out.append(raw)
            continue
        line = f"{req.name}=={version}"
        out.append(f"{line}  #{comment}" if sep else line)
    return "\n".join(out) + "\n"
