"""
Polycyclic generating sequences relative to the height filtration.

Every element g != 1 of the truncated group has a leading height n (the
least positive height of g - 1) and a leading component, a Lie element of
that height. A Pcgs keeps subgroup elements whose leading data is in
echelon form: distinct (height, pivot key) pairs, coefficient 1 at the
pivot. Then every subgroup element is a unique ordered product
∏ g_k^{c_k}, 0 <= c_k < p, and the order is p^len.

Closure adds the residue of each sifted generator and queues the p-th power
of every new entry and its commutators with the others (and with the
normalizing elements, for a normal closure); products that land above the
truncation are skipped.
"""
import logging
from collections import deque
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from enveloping_app.models import GroupElement, Key, key_sort_key
from exact_app.errors import InvalidInput

logger = logging.getLogger(__name__)


class PcgsEntry:
    __slots__ = ("element", "height", "pivot", "tag", "_inv_powers", "_powers")

    def __init__(self, element: GroupElement, height: int, pivot: Key, tag: str = ""):
        self.element = element
        self.height = height
        self.pivot = pivot
        self.tag = tag
        self._inv_powers: Optional[List[GroupElement]] = None
        self._powers: Optional[List[GroupElement]] = None

    @property
    def sort_key(self):
        return (self.height, key_sort_key(self.pivot))

    def __repr__(self) -> str:
        return f"PcgsEntry(h={self.height}, pivot={self.pivot}, tag={self.tag!r})"


def leading_data(g: GroupElement) -> Optional[Tuple[int, Key, object]]:
    """(height, pivot key, pivot coefficient) of g, or None for the identity."""
    n = g.leading_height()
    if n is None:
        return None
    component = g.series.height_component(n)
    pivot = min(component.terms, key=key_sort_key)
    return n, pivot, component.terms[pivot]


class Pcgs:
    """Induced pcgs of a subgroup of a ``QuotCtx`` group."""

    def __init__(self, ctx, entries: Iterable[PcgsEntry] = ()):
        self.ctx = ctx
        self.p = ctx.p
        self.entries: List[PcgsEntry] = []
        self._by_pivot: Dict[Tuple[int, Key], PcgsEntry] = {}
        for entry in entries:
            self._insert(entry)

    def __len__(self) -> int:
        return len(self.entries)

    def copy(self) -> "Pcgs":
        return Pcgs(self.ctx, self.entries)

    @property
    def order(self) -> int:
        return self.p ** len(self.entries)

    def _insert(self, entry: PcgsEntry) -> None:
        self._by_pivot[(entry.height, entry.pivot)] = entry
        self.entries.append(entry)
        self.entries.sort(key=lambda e: e.sort_key)

    # ---------- powers of entries ----------

    def _inverse_power(self, entry: PcgsEntry, c: int) -> GroupElement:
        if entry._inv_powers is None:
            inverse = self.ctx.inv(entry.element)
            powers = [self.ctx.identity()]
            for _ in range(1, self.p):
                powers.append(self.ctx.mul(powers[-1], inverse))
            entry._inv_powers = powers
        return entry._inv_powers[c]

    def power_of(self, entry: PcgsEntry, c: int) -> GroupElement:
        if entry._powers is None:
            powers = [self.ctx.identity()]
            for _ in range(1, self.p):
                powers.append(self.ctx.mul(powers[-1], entry.element))
            entry._powers = powers
        return entry._powers[c]

    # ---------- sifting ----------

    def sift(self, g: GroupElement) -> Tuple[GroupElement, List[Tuple[PcgsEntry, int]]]:
        """Strip leading data against the entries; g = ∏ entry^c · residue."""
        exponents: List[Tuple[PcgsEntry, int]] = []
        while True:
            data = leading_data(g)
            if data is None:
                return g, exponents
            n, pivot, c = data
            entry = self._by_pivot.get((n, pivot))
            if entry is None:
                return g, exponents
            g = self.ctx.mul(self._inverse_power(entry, c), g)
            exponents.append((entry, c))

    def contains(self, g: GroupElement) -> bool:
        residue, _ = self.sift(g)
        return residue.is_identity()

    def exponents(self, g: GroupElement, tag: Optional[str] = None) -> Dict[PcgsEntry, int]:
        """Exponent of each entry in the normal form of g; restricted to ``tag`` if given."""
        residue, steps = self.sift(g)
        if not residue.is_identity():
            raise InvalidInput("Element is not in the subgroup", details={"residue_terms": len(residue.series.terms)})
        out: Dict[PcgsEntry, int] = {}
        for entry, c in steps:
            if tag is None or entry.tag == tag:
                out[entry] = (out.get(entry, 0) + c) % self.p
        return out

    def add(self, residue: GroupElement, tag: str = "") -> PcgsEntry:
        """Normalise a sifted residue to pivot coefficient 1 and insert it."""
        n, pivot, c = leading_data(residue)
        if c != 1:
            residue = self.ctx.power(residue, pow(int(c), -1, self.p))
        entry = PcgsEntry(residue, n, pivot, tag)
        self._insert(entry)
        return entry

    # ---------- closure ----------

    def close(self, generators: Iterable[GroupElement], normalizers: Sequence[GroupElement] = (),
              tag: str = "", on_grow: Optional[Callable[[int], None]] = None) -> "Pcgs":
        """Grow to the (normal) closure of the current entries and ``generators``."""
        N = self.ctx.N
        normal = [(g, g.leading_height()) for g in normalizers if not g.is_identity()]
        queue = deque(generators)
        while queue:
            residue, _ = self.sift(queue.popleft())
            if residue.is_identity():
                continue
            if on_grow is not None:
                on_grow(len(self.entries) + 1)
            entry = self.add(residue, tag)
            if entry.height * self.p <= N:
                queue.append(self.ctx.power(entry.element, self.p))
            for other in self.entries:
                if other is not entry and other.height + entry.height <= N:
                    queue.append(self.ctx.commutator(entry.element, other.element))
            for g, h in normal:
                if h + entry.height <= N:
                    queue.append(self.ctx.commutator(g, entry.element))
        return self

    # ---------- enumeration ----------

    def elements(self) -> Iterator[GroupElement]:
        """Every ordered product ∏ entry^c; callers check the order cap first."""

        def walk(k: int, prefix: GroupElement):
            if k == len(self.entries):
                yield prefix
                return
            entry = self.entries[k]
            for c in range(self.p):
                yield from walk(k + 1, self.ctx.mul(prefix, self.power_of(entry, c)))

        yield from walk(0, self.ctx.identity())

    def product(self, exponents: Sequence[int], start: int = 0) -> GroupElement:
        """∏ entries[start + k]^{exponents[k]} in order."""
        out = self.ctx.identity()
        for entry, c in zip(self.entries[start:], exponents):
            if c % self.p:
                out = self.ctx.mul(out, self.power_of(entry, c % self.p))
        return out

    def tail_start(self, n: int) -> int:
        """Index of the first entry of leading height >= n."""
        for k, entry in enumerate(self.entries):
            if entry.height >= n:
                return k
        return len(self.entries)
