"""
Oracle results. An oracle recomputes a table by an independent method; the
report passes exactly when both tables agree.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(x) for x in k)
    return str(k)


@dataclass
class OracleReport:
    oracle: str
    inputs: Dict[str, Any]
    expected: Dict[Any, Any] = field(default_factory=dict)
    computed: Dict[Any, Any] = field(default_factory=dict)

    @property
    def mismatches(self) -> List[Any]:
        keys = sorted(set(self.expected) | set(self.computed))
        return [k for k in keys if self.expected.get(k) != self.computed.get(k)]

    @property
    def verdict(self) -> str:
        return "pass" if not self.mismatches else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def counterexample(self) -> Optional[Dict[str, Any]]:
        """The first disagreeing entry."""
        if self.passed:
            return None
        k = self.mismatches[0]
        return {"key": _key(k), "expected": self.expected.get(k), "computed": self.computed.get(k)}

    def to_json(self) -> Dict[str, Any]:
        return {
            "oracle": self.oracle,
            "inputs": self.inputs,
            "expected": {_key(k): v for k, v in sorted(self.expected.items())},
            "computed": {_key(k): v for k, v in sorted(self.computed.items())},
            "verdict": self.verdict,
            "counterexample": self.counterexample(),
        }


@dataclass
class GroupLikeCensus:
    count: int
    candidates: int
    expected: int
    normal_forms_bijective: bool
    elements: List[Tuple] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.count == self.expected and self.normal_forms_bijective

    def to_json(self, with_elements: bool = False) -> Dict[str, Any]:
        out = {
            "count": self.count,
            "candidates": self.candidates,
            "expected": self.expected,
            "normal_forms_bijective": self.normal_forms_bijective,
            "verdict": "pass" if self.passed else "fail",
        }
        if with_elements:
            out["elements"] = [list(e) for e in self.elements]
        return out
