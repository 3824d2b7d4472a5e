"""
Lie algebra elements.

A LieElement is a sparse map from atoms to scalars of one ScalarField:

  ("+", content, idx)  positive lattice basis vector
  ("h", i)             simple coroot alpha_i^vee
  ("-", content, idx)  mirrored negative basis vector
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from exact_app.scalars import ScalarField

Atom = Tuple


def atom_sort_key(atom: Atom):
    order = {"-": 0, "h": 1, "+": 2}[atom[0]]
    if atom[0] == "h":
        return (order, 0, (), atom[1])
    return (order, sum(atom[1]), atom[1], atom[2])


@dataclass
class LieElement:
    field: ScalarField
    terms: Dict[Atom, object] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {a: c for a, c in self.terms.items() if c != 0}

    # ---------- linear structure ----------

    def __add__(self, other: "LieElement") -> "LieElement":
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = self.field.add(out.get(a, self.field.zero), c)
        return LieElement(self.field, out)

    def __neg__(self) -> "LieElement":
        return LieElement(self.field, {a: self.field.neg(c) for a, c in self.terms.items()})

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def scale(self, c) -> "LieElement":
        c = self.field(c) if isinstance(c, int) else c
        return LieElement(self.field, {a: self.field.mul(c, v) for a, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LieElement) and self.field == other.field and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    # ---------- grading ----------

    def positive(self) -> Dict[Atom, object]:
        return {a: c for a, c in self.terms.items() if a[0] == "+"}

    def cartan(self) -> Dict[int, object]:
        return {a[1]: c for a, c in self.terms.items() if a[0] == "h"}

    def negative(self) -> Dict[Atom, object]:
        return {a: c for a, c in self.terms.items() if a[0] == "-"}

    def degrees(self, rank: int) -> List[Tuple[int, ...]]:
        out = set()
        for a in self.terms:
            if a[0] == "+":
                out.add(a[1])
            elif a[0] == "-":
                out.add(tuple(-x for x in a[1]))
            else:
                out.add((0,) * rank)
        return sorted(out)

    def homogeneous_degree(self, rank: int) -> Optional[Tuple[int, ...]]:
        degrees = self.degrees(rank)
        return degrees[0] if len(degrees) == 1 else None

    def coefficient(self, atom: Atom):
        return self.terms.get(atom, self.field.zero)

    def coordinates(self, atoms: Iterable[Atom]) -> List:
        return [self.coefficient(a) for a in atoms]

    def sorted_terms(self) -> List[Tuple[Atom, object]]:
        return sorted(self.terms.items(), key=lambda kv: atom_sort_key(kv[0]))

    def to_json(self, labels=None) -> List[Dict]:
        out = []
        for atom, c in self.sorted_terms():
            if atom[0] == "h":
                out.append({"sector": "h", "index": atom[1] + 1, "coeff": self.field.to_json(c)})
            else:
                out.append({"sector": atom[0], "degree": list(atom[1]), "basis": atom[2] + 1,
                            "coeff": self.field.to_json(c)})
        return out

    def log_label(self) -> str:
        return f"LieElement[{len(self.terms)} terms]"

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for atom, c in self.sorted_terms():
            if atom[0] == "h":
                parts.append(f"{c}*h{atom[1] + 1}")
            else:
                sym = "e" if atom[0] == "+" else "f"
                parts.append(f"{c}*{sym}{list(atom[1])}#{atom[2] + 1}")
        return " + ".join(parts)
