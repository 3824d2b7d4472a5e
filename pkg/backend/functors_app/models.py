"""
Graded maps between positive parts of Kac-Moody algebras.

A map is determined by the images of the generators e_i of the source; the
induced lattice map π̄ sends alpha_i to the degree of that image. Cover images
are homogeneous for the block collapse Q(B) -> Q(A) rather than for π̄, so
heights are tracked through ``generator_heights``.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from cartan_app.models import GCM, CoverSpec

SURJECTION = "Surjection"
SUBSYSTEM = "Subsystem"
COVER = "Cover"

RootVec = Tuple[int, ...]


@dataclass(frozen=True)
class GradedLatticeMap:
    kind: str
    source: GCM
    target: GCM
    # pi_bar[i] is the target degree of alpha_i (all zeros when e_i is dropped)
    pi_bar: Tuple[RootVec, ...]
    embedding: Optional[Tuple[int, ...]] = None
    betas: Optional[Tuple[RootVec, ...]] = None
    cover: Optional[CoverSpec] = field(default=None, compare=False, hash=False)
    certified_to: Optional[int] = None
    notes: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def image_degree(self, content: Sequence[int]) -> RootVec:
        out = [0] * self.target.rank
        for i, c in enumerate(content):
            if c:
                for k, v in enumerate(self.pi_bar[i]):
                    out[k] += c * v
        return tuple(out)

    def dropped(self, i: int) -> bool:
        return not any(self.pi_bar[i])

    def collapse(self, gamma: Sequence[int]) -> RootVec:
        """Cover degrees back to source degrees, alpha_(i,r) -> alpha_i."""
        out = [0] * self.source.rank
        for v, c in enumerate(gamma):
            if c:
                out[self.cover.vertices[v][0]] += c
        return tuple(out)

    @property
    def generator_heights(self) -> Tuple[int, ...]:
        # a cover image is a sum of simple root vectors, so it keeps height 1
        if self.kind == COVER:
            return (1,) * self.source.rank
        return tuple(sum(d) for d in self.pi_bar)

    def image_height(self, content: Sequence[int]) -> int:
        return sum(c * h for c, h in zip(content, self.generator_heights))

    @property
    def min_generator_height(self) -> int:
        heights = [h for h in self.generator_heights if h]
        return min(heights) if heights else 0

    @property
    def max_generator_height(self) -> int:
        return max(self.generator_heights, default=0)

    def target_height(self, N: int) -> int:
        """Largest target height reached by source degrees of height <= N."""
        return N * self.max_generator_height

    def pi_bar_matrix(self) -> List[List[int]]:
        """Rows indexed by target indices, columns by source indices."""
        return [[self.pi_bar[i][k] for i in self.source.indices] for k in self.target.indices]

    def to_json(self) -> Dict:
        images: List[Any]
        if self.kind == SURJECTION:
            position = {src: b for b, src in enumerate(self.embedding)}
            images = [
                {"source": self.source.labels[i],
                 "image": self.target.labels[position[i]] if i in position else None}
                for i in self.source.indices
            ]
        elif self.kind == SUBSYSTEM:
            images = [
                {"source": self.source.labels[i], "root": list(beta)}
                for i, beta in enumerate(self.betas)
            ]
        else:
            images = [
                {"source": self.source.labels[i],
                 "sum_of": [self.target.labels[v] for v in self.cover.block(i)]}
                for i in self.source.indices
            ]
        return {
            "kind": self.kind,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "images": images,
            "pi_bar": self.pi_bar_matrix(),
            "certified_to": self.certified_to,
            **({"notes": self.notes} if self.notes else {}),
        }
