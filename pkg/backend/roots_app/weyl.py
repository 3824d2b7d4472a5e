"""
Root-lattice arithmetic: reflections, the pairing, and the descent classifier.

A root vector is a tuple of integers over the simple roots, a coroot vector a
tuple over the simple coroots. Everything here is pure and exact at any
height; no table is consulted.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterator, List, Optional, Sequence, Tuple

from cartan_app.models import GCM

RootVec = Tuple[int, ...]
CorootVec = Tuple[int, ...]

REAL = "Real"
IMAGINARY = "Imaginary"


def height(alpha: Sequence[int]) -> int:
    return sum(alpha)


def is_positive(alpha: Sequence[int]) -> bool:
    return all(c >= 0 for c in alpha) and any(c > 0 for c in alpha)


def support(alpha: Sequence[int]) -> List[int]:
    return [i for i, c in enumerate(alpha) if c != 0]


def unit(rank: int, i: int) -> RootVec:
    return tuple(1 if j == i else 0 for j in range(rank))


def add(alpha: Sequence[int], beta: Sequence[int]) -> RootVec:
    return tuple(a + b for a, b in zip(alpha, beta))


def sub(alpha: Sequence[int], beta: Sequence[int]) -> RootVec:
    return tuple(a - b for a, b in zip(alpha, beta))


def scale(c: int, alpha: Sequence[int]) -> RootVec:
    return tuple(c * a for a in alpha)


def coroot_pairing(A: GCM, alpha: Sequence[int], i: int) -> int:
    """<alpha, alpha_i^vee> = Σ_j n_j a_ij."""
    row = A.entries[i]
    return sum(n * row[j] for j, n in enumerate(alpha))


def pairing(A: GCM, alpha: Sequence[int], h: Sequence[int]) -> int:
    """Bilinear extension of <alpha_j, alpha_i^vee> = a_ij."""
    return sum(h[i] * coroot_pairing(A, alpha, i) for i in A.indices if h[i])


def reflect_root(A: GCM, i: int, alpha: Sequence[int]) -> RootVec:
    c = coroot_pairing(A, alpha, i)
    return tuple(a - c if j == i else a for j, a in enumerate(alpha))


def reflect_coroot(A: GCM, i: int, h: Sequence[int]) -> CorootVec:
    """s_i(alpha_j^vee) = alpha_j^vee - a_ji alpha_i^vee."""
    c = sum(h[j] * A[j, i] for j in A.indices)
    return tuple(x - c if j == i else x for j, x in enumerate(h))


def apply_word(A: GCM, word: Sequence[int], alpha: Sequence[int]) -> RootVec:
    """Apply s_{w[0]} first, then s_{w[1]}, ..."""
    out = tuple(alpha)
    for i in word:
        out = reflect_root(A, i, out)
    return out


@dataclass(frozen=True)
class Descent:
    """Outcome of the descent classifier.

    ``kind`` is REAL, IMAGINARY or None (not a root). For real roots
    ``word`` applied in order sends the root to ``unit(terminal)``.
    """

    kind: Optional[str]
    word: Tuple[int, ...] = ()
    terminal: Optional[int] = None
    reason: str = ""

    @property
    def is_root(self) -> bool:
        return self.kind is not None


@lru_cache(maxsize=200_000)
def _descend(entries: Tuple[Tuple[int, ...], ...], alpha: RootVec) -> Descent:
    A = GCM(tuple(str(i + 1) for i in range(len(entries))), entries)
    beta = alpha
    word: List[int] = []
    if not is_positive(beta):
        return Descent(None, reason="not a positive vector")
    while True:
        supp = support(beta)
        if len(supp) == 1:
            i = supp[0]
            if beta[i] == 1:
                return Descent(REAL, tuple(word), i)
            return Descent(None, reason=f"multiple {beta[i]} of a simple root")
        step = next((i for i in A.indices if coroot_pairing(A, beta, i) > 0), None)
        if step is None:
            if A.is_connected(supp):
                return Descent(IMAGINARY, tuple(word))
            return Descent(None, reason="disconnected support in the fundamental chamber")
        beta = reflect_root(A, step, beta)
        word.append(step)
        if any(c < 0 for c in beta):
            return Descent(None, reason="descent left the positive cone")


def descend(A: GCM, alpha: Sequence[int]) -> Descent:
    """Classify a positive vector by repeatedly applying the least height-decreasing reflection."""
    return _descend(A.entries, tuple(int(a) for a in alpha))


def is_root(A: GCM, alpha: Sequence[int]) -> bool:
    return descend(A, alpha).is_root


def coroot_from_descent(A: GCM, descent: Descent) -> CorootVec:
    """w(alpha_j^vee) for the word that brings the root down to alpha_j."""
    h = unit(A.rank, descent.terminal)
    for i in reversed(descent.word):
        h = reflect_coroot(A, i, h)
    return h


def contents_of_height(rank: int, n: int) -> Iterator[RootVec]:
    """All nonnegative integer vectors of the given height, lexicographically descending."""
    for bars in combinations_with_replacement(range(rank), n):
        counts = [0] * rank
        for b in bars:
            counts[b] += 1
        yield tuple(counts)
