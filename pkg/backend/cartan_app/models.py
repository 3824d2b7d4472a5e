"""
Domain types for generalised Cartan matrices.

Nothing here is persisted; the types are frozen value objects shared by every
other app. Indices are 0-based internally and 1-based in messages.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from exact_app.errors import InvalidInput


@dataclass(frozen=True)
class GCM:
    """A square integer matrix with labels; validated by ``validate_gcm``."""

    labels: Tuple[str, ...]
    entries: Tuple[Tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.entries)

    @property
    def indices(self) -> range:
        return range(self.rank)

    def __getitem__(self, ij: Tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> List[List[int]]:
        return [list(row) for row in self.entries]

    def transpose(self) -> "GCM":
        return GCM(self.labels, tuple(zip(*self.entries)))

    def submatrix(self, subset: Sequence[int]) -> "GCM":
        subset = list(subset)
        return GCM(
            tuple(self.labels[i] for i in subset),
            tuple(tuple(self.entries[i][j] for j in subset) for i in subset),
        )

    @property
    def is_symmetric(self) -> bool:
        return all(self.entries[i][j] == self.entries[j][i] for i in self.indices for j in self.indices)

    @property
    def is_simply_laced(self) -> bool:
        return all(self.entries[i][j] in (0, -1) for i in self.indices for j in self.indices if i != j)

    def neighbours(self, i: int) -> List[int]:
        return [j for j in self.indices if j != i and self.entries[i][j] != 0]

    def is_connected(self, subset: Optional[Iterable[int]] = None) -> bool:
        """Connectivity of the Dynkin diagram restricted to ``subset`` (default: all)."""
        nodes = set(self.indices if subset is None else subset)
        if not nodes:
            return False
        start = min(nodes)
        seen = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for j in self.neighbours(i):
                if j in nodes and j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen == nodes

    def components(self) -> List[List[int]]:
        remaining = set(self.indices)
        comps = []
        while remaining:
            start = min(remaining)
            comp = {start}
            stack = [start]
            while stack:
                i = stack.pop()
                for j in self.neighbours(i):
                    if j not in comp:
                        comp.add(j)
                        stack.append(j)
            comps.append(sorted(comp))
            remaining -= comp
        return comps

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise InvalidInput(f"Unknown index label {label!r}", details={"labels": list(self.labels)})

    def to_json(self) -> Dict:
        return {"labels": list(self.labels), "matrix": self.rows()}

    def log_label(self) -> str:
        return "GCM" + str(self.rows()).replace(" ", "")

    def __str__(self) -> str:
        return str(self.rows())


@dataclass(frozen=True)
class CoverSpec:
    """A simply laced cover of a symmetrizable GCM.

    ``vertices[v] = (i, r)`` is the r-th vertex of block i; ``edges`` maps an
    unordered pair of original indices to the bipartite edge list between the
    two blocks, as pairs of (r in block i, s in block j).
    """

    base: GCM
    block_sizes: Tuple[int, ...]
    edges: Dict[Tuple[int, int], Tuple[Tuple[int, int], ...]]
    cover_gcm: GCM
    vertices: Tuple[Tuple[int, int], ...] = field(default=())

    def vertex_index(self, i: int, r: int) -> int:
        return sum(self.block_sizes[:i]) + r

    def block(self, i: int) -> List[int]:
        start = sum(self.block_sizes[:i])
        return list(range(start, start + self.block_sizes[i]))

    def to_json(self) -> Dict:
        return {
            "base": self.base.to_json(),
            "block_sizes": list(self.block_sizes),
            "edges": {
                f"{self.base.labels[i]}-{self.base.labels[j]}": [[r + 1, s + 1] for r, s in pairs]
                for (i, j), pairs in sorted(self.edges.items())
            },
            "cover_gcm": self.cover_gcm.to_json(),
        }
