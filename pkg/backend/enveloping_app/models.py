"""
Elements of the truncated enveloping algebra.

An EnvElement is a sparse map from Tits basis keys (content, idx) to
scalars of one ScalarField; the constant term sits at the zero content.
A GroupElement wraps a group-like EnvElement of constant term 1.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from exact_app.scalars import ScalarField

Content = Tuple[int, ...]
Key = Tuple[Content, int]
EnvTensor = Dict[Tuple[Key, Key], object]
# (height, content, idx) of a basis vector of n⁺; the fixed normal-form order
BasisLetter = Tuple[int, Content, int]


def key_height(key: Key) -> int:
    return sum(key[0])


def key_sort_key(key: Key):
    return (key_height(key), key[0], key[1])


@dataclass
class EnvElement:
    field: ScalarField
    terms: Dict[Key, object] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: c for k, c in self.terms.items() if c != 0}

    # ---------- linear structure ----------

    def __add__(self, other: "EnvElement") -> "EnvElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = self.field.add(out.get(k, self.field.zero), c)
        return EnvElement(self.field, out)

    def __neg__(self) -> "EnvElement":
        return EnvElement(self.field, {k: self.field.neg(c) for k, c in self.terms.items()})

    def __sub__(self, other: "EnvElement") -> "EnvElement":
        return self + (-other)

    def scale(self, c) -> "EnvElement":
        c = self.field(c) if isinstance(c, int) else c
        return EnvElement(self.field, {k: self.field.mul(c, v) for k, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EnvElement) and self.field == other.field and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.frozen())

    def is_zero(self) -> bool:
        return not self.terms

    # ---------- grading ----------

    def constant_term(self):
        for k, c in self.terms.items():
            if key_height(k) == 0:
                return c
        return self.field.zero

    def augmentation(self) -> "EnvElement":
        """The element minus its constant term."""
        return EnvElement(self.field, {k: c for k, c in self.terms.items() if key_height(k) > 0})

    def component(self, content: Content) -> "EnvElement":
        content = tuple(content)
        return EnvElement(self.field, {k: c for k, c in self.terms.items() if k[0] == content})

    def height_component(self, n: int) -> "EnvElement":
        return EnvElement(self.field, {k: c for k, c in self.terms.items() if key_height(k) == n})

    def contents(self) -> List[Content]:
        return sorted({k[0] for k in self.terms}, key=lambda c: (sum(c), c))

    def min_positive_height(self) -> Optional[int]:
        heights = [key_height(k) for k in self.terms if key_height(k) > 0]
        return min(heights) if heights else None

    def max_height(self) -> int:
        return max((key_height(k) for k in self.terms), default=0)

    def coefficient(self, key: Key):
        return self.terms.get(key, self.field.zero)

    def coordinates(self, keys) -> List:
        return [self.coefficient(k) for k in keys]

    def sorted_terms(self) -> List[Tuple[Key, object]]:
        return sorted(self.terms.items(), key=lambda kv: key_sort_key(kv[0]))

    def frozen(self) -> Tuple:
        return tuple(self.sorted_terms())

    def to_json(self) -> List[Dict]:
        return [
            {"degree": list(k[0]), "basis": k[1] + 1, "coeff": self.field.to_json(c)}
            for k, c in self.sorted_terms()
        ]

    def log_label(self) -> str:
        return f"EnvElement[{len(self.terms)} terms]"

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*u{list(k[0])}#{k[1] + 1}" for k, c in self.sorted_terms())


class GroupElement:
    """A group-like truncated series of constant term 1."""

    __slots__ = ("series", "_frozen")

    def __init__(self, series: EnvElement):
        self.series = series
        self._frozen = series.frozen()

    @property
    def field(self) -> ScalarField:
        return self.series.field

    def is_identity(self) -> bool:
        return all(key_height(k) == 0 for k in self.series.terms)

    def leading_height(self) -> Optional[int]:
        return self.series.min_positive_height()

    def leading_component(self) -> EnvElement:
        n = self.leading_height()
        if n is None:
            return EnvElement(self.field)
        return self.series.height_component(n)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupElement) and self._frozen == other._frozen

    def __hash__(self) -> int:
        return hash(self._frozen)

    def to_json(self) -> List[Dict]:
        return self.series.to_json()

    def log_label(self) -> str:
        return f"GroupElement[{len(self.series.terms)} terms]"

    def __repr__(self) -> str:
        return f"GroupElement({self.series!r})"
