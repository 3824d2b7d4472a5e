"""
Elements of the strip quotient of 𝒰⁺ on the degrees mα_i + nα_j, n <= 1, m <= q.

Basis keys are ("E", m) for E_m = e_i^{(m)} and ("F", a, b) for
F_{a,b} = e_i^{(a)} e_j e_i^{(b)}. Coefficients are ints mod q.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

StripKey = Tuple

UNIT: StripKey = ("E", 0)


def key_degree(key: StripKey) -> Tuple[int, int]:
    """(m, n) for the degree mα_i + nα_j."""
    if key[0] == "E":
        return key[1], 0
    return key[1] + key[2], 1


def key_sort_key(key: StripKey):
    m, n = key_degree(key)
    return (n, m, key)


def key_label(key: StripKey) -> str:
    return f"E{key[1]}" if key[0] == "E" else f"F{key[1]},{key[2]}"


@dataclass
class StripElement:
    q: int
    terms: Dict[StripKey, int] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: c % self.q for k, c in self.terms.items() if c % self.q}

    def __add__(self, other: "StripElement") -> "StripElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return StripElement(self.q, out)

    def __sub__(self, other: "StripElement") -> "StripElement":
        return self + other.scale(-1)

    def scale(self, c: int) -> "StripElement":
        return StripElement(self.q, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, StripElement) and self.q == other.q and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.q, frozenset(self.terms.items())))

    def coefficient(self, key: StripKey) -> int:
        return self.terms.get(key, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> List[Dict]:
        return [{"basis": key_label(k), "coeff": c} for k, c in sorted(self.terms.items(), key=lambda kc: key_sort_key(kc[0]))]


@dataclass(frozen=True)
class StripGroupElt:
    """Coordinates (λ; λ_0, …, λ_q) of g = exp(λe_i) ∏_s [exp]λ_s (ad e_i)^{(s)} e_j."""

    lam: int
    lams: Tuple[int, ...]

    @property
    def coords(self) -> Tuple[int, ...]:
        return (self.lam,) + self.lams

    @property
    def is_identity(self) -> bool:
        return not any(self.coords)

    def to_json(self) -> Dict:
        return {"lambda": self.lam, "lambdas": list(self.lams)}

    @classmethod
    def from_coords(cls, coords) -> "StripGroupElt":
        coords = tuple(int(c) for c in coords)
        return cls(coords[0], coords[1:])
