"""
Root tables: positive roots up to a height bound with multiplicity and kind.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from cartan_app.models import GCM

from .weyl import IMAGINARY, REAL, RootVec, height


@dataclass(frozen=True)
class RootEntry:
    coeffs: RootVec
    mult: int
    kind: str
    descent_word: Tuple[int, ...] = ()

    @property
    def height(self) -> int:
        return height(self.coeffs)

    @property
    def is_real(self) -> bool:
        return self.kind == REAL

    def to_json(self) -> Dict:
        return {
            "coeffs": list(self.coeffs),
            "height": self.height,
            "mult": self.mult,
            "kind": self.kind,
            "descent_word": [i + 1 for i in self.descent_word] if self.is_real else None,
        }


@dataclass
class RootTable:
    """Positive roots of g(A) with height <= max_height."""

    gcm: GCM
    max_height: int
    entries: Dict[RootVec, RootEntry] = field(default_factory=dict)

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self.entries

    def __iter__(self) -> Iterator[RootEntry]:
        return iter(self.sorted_entries())

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, alpha) -> Optional[RootEntry]:
        return self.entries.get(tuple(alpha))

    def mult(self, alpha) -> int:
        entry = self.get(alpha)
        return entry.mult if entry else 0

    def sorted_entries(self) -> List[RootEntry]:
        return sorted(self.entries.values(), key=lambda e: (e.height, e.coeffs))

    def roots(self, kind: Optional[str] = None) -> List[RootVec]:
        return [e.coeffs for e in self.sorted_entries() if kind is None or e.kind == kind]

    def real_roots(self) -> List[RootVec]:
        return self.roots(REAL)

    def imaginary_roots(self) -> List[RootVec]:
        return self.roots(IMAGINARY)

    def height_totals(self) -> List[int]:
        """Σ mult over roots of each height 1..max_height."""
        totals = [0] * self.max_height
        for entry in self.entries.values():
            totals[entry.height - 1] += entry.mult
        return totals

    def to_json(self) -> Dict:
        return {
            "gcm": self.gcm.to_json(),
            "max_height": self.max_height,
            "height_totals": self.height_totals(),
            "entries": [e.to_json() for e in self.sorted_entries()],
        }

    def log_label(self) -> str:
        return f"RootTable(h<={self.max_height},{len(self.entries)} roots)"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a set predicate, valid up to ``certified_to``."""

    holds: bool
    certified_to: int
    witness: Optional[Tuple] = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> Dict:
        return {
            "holds": self.holds,
            "certified_to": self.certified_to,
            "witness": [list(v) for v in self.witness] if self.witness else None,
        }


@dataclass(frozen=True)
class Interval:
    """[alpha, beta]_N, or None with the reason the pair was not accepted."""

    roots: Optional[Tuple[RootVec, ...]]
    reason: str
    certified_to: int

    @property
    def is_prenilpotent(self) -> bool:
        return self.roots is not None

    def to_json(self) -> Dict:
        return {
            "roots": [list(r) for r in self.roots] if self.roots is not None else None,
            "reason": self.reason,
            "certified_to": self.certified_to,
        }
