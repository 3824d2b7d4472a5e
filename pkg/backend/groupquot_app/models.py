"""
Domain types of the finite quotients U_A^{ma+}(F_p) / U^{ma}_{N+1}.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from exact_app.errors import InvalidInput

from .pcgs import Pcgs


@dataclass(frozen=True)
class TorusElement:
    """t(alpha_i) for each simple root, extended multiplicatively to Q+."""

    values: Tuple[int, ...]
    p: int

    def __post_init__(self):
        if any(v % self.p == 0 for v in self.values):
            raise InvalidInput("Torus values must be nonzero", details={"values": list(self.values), "p": self.p})

    def on(self, degree: Sequence[int]) -> int:
        out = 1
        for v, n in zip(self.values, degree):
            out = out * pow(v, n, self.p) % self.p
        return out

    def to_json(self) -> Dict:
        return {"values": list(self.values), "char": self.p}


@dataclass
class SubgroupHandle:
    """A subgroup of the quotient: a pcgs, or the coordinate subgroup U^{ma}_n."""

    name: str
    p: int
    pcgs: Optional[Pcgs] = None
    coordinate_height: Optional[int] = None
    coordinate_log: Optional[int] = None
    generators: List[Any] = field(default_factory=list)

    @property
    def log_order(self) -> int:
        if self.pcgs is not None:
            return len(self.pcgs)
        return self.coordinate_log

    @property
    def order(self) -> int:
        return self.p ** self.log_order

    def contains(self, g) -> bool:
        if self.pcgs is not None:
            return self.pcgs.contains(g)
        n = g.leading_height()
        return n is None or n >= self.coordinate_height

    def is_subgroup_of(self, other: "SubgroupHandle") -> bool:
        if self.pcgs is None:
            if other.pcgs is None:
                return self.coordinate_height >= other.coordinate_height
            raise InvalidInput("Coordinate subgroups compare against pcgs subgroups from the other side")
        return all(other.contains(entry.element) for entry in self.pcgs.entries)

    def equals(self, other: "SubgroupHandle") -> bool:
        return self.order == other.order and (
            self.is_subgroup_of(other) if self.pcgs is not None else other.is_subgroup_of(self)
        )

    def leading_heights(self) -> List[int]:
        return [entry.height for entry in self.pcgs.entries] if self.pcgs is not None else []

    def to_json(self) -> Dict:
        out = {"name": self.name, "order": self.order, "log_p_order": self.log_order}
        if self.pcgs is not None:
            out["leading_heights"] = self.leading_heights()
        else:
            out["coordinate_height"] = self.coordinate_height
        return out


@dataclass
class SeriesLevel:
    n: int
    subgroup: SubgroupHandle
    coordinate_order: int
    equals_coordinate: bool
    checks: Dict[str, bool] = field(default_factory=dict)

    def to_json(self) -> Dict:
        out = {
            "n": self.n,
            "order": self.subgroup.order,
            "log_p_order": self.subgroup.log_order,
            "coordinate_order": self.coordinate_order,
            "equals_coordinate": self.equals_coordinate,
        }
        out.update(self.checks)
        return out


@dataclass
class SeriesReport:
    name: str
    levels: List[SeriesLevel]

    def level(self, n: int) -> SeriesLevel:
        return self.levels[n - 1]

    def orders(self) -> List[int]:
        return [lvl.subgroup.order for lvl in self.levels]

    @property
    def equals_coordinate(self) -> bool:
        return all(lvl.equals_coordinate for lvl in self.levels)

    def all_checks(self, name: str) -> bool:
        return all(lvl.checks.get(name, True) for lvl in self.levels)

    def to_json(self) -> Dict:
        return {"name": self.name, "levels": [lvl.to_json() for lvl in self.levels]}


@dataclass
class ZJLAlgebra:
    """Graded F_p Lie algebra L = ⊕ D_n / D_{n+1} with its comparison to n⁺."""

    p: int
    dims: List[int]
    lie_dims: List[int]
    brackets: List[Dict] = field(default_factory=list)
    p_operation: List[Dict] = field(default_factory=list)
    leading_map_bijective: bool = False

    @property
    def dims_match(self) -> bool:
        return self.dims == self.lie_dims

    @property
    def brackets_match(self) -> bool:
        return all(entry["matches"] for entry in self.brackets)

    @property
    def is_isomorphic(self) -> bool:
        return self.dims_match and self.leading_map_bijective and self.brackets_match

    def to_json(self) -> Dict:
        return {
            "char": self.p,
            "dims": self.dims,
            "lie_dims": self.lie_dims,
            "leading_map_bijective": self.leading_map_bijective,
            "brackets_match": self.brackets_match,
            "zjl_iso": self.is_isomorphic,
            "brackets": self.brackets,
            "p_operation": self.p_operation,
        }
