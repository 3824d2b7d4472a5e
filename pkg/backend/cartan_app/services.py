"""
Generalised Cartan matrices: validation, comparison, symmetrizers, type
classification, affine-submatrix search and simply laced covers.
"""
import itertools
import logging
from functools import lru_cache, reduce
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from exact_app.compute_logger import log_computation
from exact_app.errors import (
    AsymmetricZero,
    DecomposableMatrix,
    DiagonalNotTwo,
    InvalidInput,
    NotSymmetrizable,
    PositiveOffDiagonal,
)

from .models import GCM, CoverSpec

logger = logging.getLogger(__name__)

FINITE = "Finite"
AFFINE = "Affine"
INDEFINITE = "Indefinite"


def validate_gcm(matrix: Sequence[Sequence[int]], labels: Optional[Sequence[str]] = None) -> GCM:
    """Check axioms C1-C3 entry by entry and build a GCM."""
    if not isinstance(matrix, (list, tuple)) or not matrix:
        raise InvalidInput("A GCM must be a nonempty square matrix")
    n = len(matrix)
    rows = []
    for i, row in enumerate(matrix):
        if not isinstance(row, (list, tuple)) or len(row) != n:
            raise InvalidInput("Matrix is not square", details={"row": i + 1, "expected_length": n})
        clean = []
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, int):
                raise InvalidInput("Matrix entries must be integers", details={"at": (i + 1, j + 1), "value": x})
            clean.append(int(x))
        rows.append(tuple(clean))

    for i in range(n):
        for j in range(n):
            a = rows[i][j]
            if i == j:
                if a != 2:
                    raise DiagonalNotTwo(f"Diagonal entry at ({i + 1},{i + 1}) is {a}, not 2",
                                         details={"at": (i + 1, i + 1), "value": a})
                continue
            if a > 0:
                raise PositiveOffDiagonal(f"Off-diagonal entry at ({i + 1},{j + 1}) is positive",
                                          details={"at": (i + 1, j + 1), "value": a})
            if (a == 0) != (rows[j][i] == 0):
                raise AsymmetricZero(f"Entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) violate C3",
                                     details={"at": (i + 1, j + 1), "a_ij": a, "a_ji": rows[j][i]})

    if labels is None:
        labels = [str(i + 1) for i in range(n)]
    labels = tuple(str(x) for x in labels)
    if len(labels) != n or len(set(labels)) != n:
        raise InvalidInput("Labels must be distinct and match the matrix size",
                           details={"labels": list(labels), "size": n})
    return GCM(labels, tuple(rows))


def gcm_from_json(payload: Dict) -> GCM:
    """Build a GCM from ``{"labels": [...], "matrix": [[...]]}``."""
    if isinstance(payload, (list, tuple)):
        return validate_gcm(payload)
    if not isinstance(payload, dict) or "matrix" not in payload:
        raise InvalidInput("GCM JSON needs a 'matrix' field")
    return validate_gcm(payload["matrix"], payload.get("labels"))


def _check_embedding(B: GCM, A: GCM, embedding: Optional[Sequence[int]]) -> List[int]:
    emb = list(range(B.rank)) if embedding is None else [int(x) for x in embedding]
    if len(emb) != B.rank or len(set(emb)) != len(emb) or any(not 0 <= x < A.rank for x in emb):
        raise InvalidInput("Index embedding must be an injective map into A's indices",
                           details={"embedding": [x + 1 for x in emb], "rank_A": A.rank})
    return emb


def gcm_leq(B: GCM, A: GCM, embedding: Optional[Sequence[int]] = None) -> bool:
    """B <= A: every Serre relation of A holds in B, i.e. |b_ij| <= |a_e(i)e(j)|.

    Entries are nonpositive, so this is b_ij >= a_ij entrywise.
    """
    emb = _check_embedding(B, A, embedding)
    return all(
        B[i, j] >= A[emb[i], emb[j]]
        for i in B.indices for j in B.indices
    )


def principal_minor(A: GCM, subset: Sequence[int]) -> int:
    subset = list(subset)
    if not subset:
        return 1
    return _det(tuple(tuple(A[i, j] for j in subset) for i in subset))


@lru_cache(maxsize=4096)
def _det(rows: Tuple[Tuple[int, ...], ...]) -> int:
    mat = DomainMatrix([[ZZ(x) for x in row] for row in rows], (len(rows), len(rows)), ZZ)
    return int(mat.det())


def _proper_minors_positive(A: GCM) -> bool:
    n = A.rank
    return all(
        principal_minor(A, subset) > 0
        for size in range(1, n)
        for subset in itertools.combinations(range(n), size)
    )


def classify_type(A: GCM) -> str:
    """Finite, Affine or Indefinite by the principal-minor criterion."""
    if not A.is_connected():
        raise DecomposableMatrix("Type classification needs an indecomposable matrix",
                                 details={"components": [[i + 1 for i in c] for c in A.components()]})
    det = principal_minor(A, range(A.rank))
    proper = _proper_minors_positive(A)
    if proper and det > 0:
        return FINITE
    if proper and det == 0:
        return AFFINE
    return INDEFINITE


def is_finite_type(A: GCM) -> bool:
    """Finite type for possibly decomposable A: all principal minors positive."""
    return _proper_minors_positive(A) and principal_minor(A, range(A.rank)) > 0


def is_compact_hyperbolic(A: GCM) -> bool:
    return classify_type(A) == INDEFINITE and _proper_minors_positive(A)


def m_A(A: GCM) -> int:
    return max((abs(A[i, j]) for i in A.indices for j in A.indices if i != j), default=0)


def _affine_candidates(A: GCM, subset: Sequence[int], floor: int):
    """Matrices on ``subset`` with b_ij in [max(a_ij, floor), 0] and C3, lexicographic in entries."""
    pairs = list(itertools.combinations(range(len(subset)), 2))
    choices = []
    for (s, t) in pairs:
        i, j = subset[s], subset[t]
        lo_ij, lo_ji = max(A[i, j], floor), max(A[j, i], floor)
        opts = [(0, 0)] + [(x, y) for x in range(lo_ij, 0) for y in range(lo_ji, 0)]
        choices.append(sorted(opts))
    for combo in itertools.product(*choices):
        rows = [[2 if s == t else 0 for t in range(len(subset))] for s in range(len(subset))]
        for (s, t), (x, y) in zip(pairs, combo):
            rows[s][t], rows[t][s] = x, y
        yield rows


@log_computation("gcm.find_affine_sub")
def find_affine_sub(A: GCM) -> Optional[Tuple[GCM, List[int]]]:
    """First affine B <= A on an index subset, by subset size then lexicographic entries.

    Returns ``(B, subset)`` with ``subset`` the 0-based embedding, or None.
    """
    floor = -4 * A.rank
    for size in range(2, A.rank + 1):
        for subset in itertools.combinations(A.indices, size):
            if not A.is_connected(subset):
                continue
            for rows in _affine_candidates(A, subset, floor):
                B = GCM(tuple(A.labels[i] for i in subset), tuple(tuple(r) for r in rows))
                if not B.is_connected():
                    continue
                if classify_type(B) == AFFINE:
                    logger.debug(f"Affine submatrix {B} on indices {[i + 1 for i in subset]}")
                    return B, list(subset)
    return None


def symmetrizer(A: GCM) -> Optional[Tuple[int, ...]]:
    """Minimal positive d with d_i a_ij = d_j a_ji, or None when A is not symmetrizable."""
    d: List = [None] * A.rank
    for comp in A.components():
        root = comp[0]
        d[root] = QQ(1)
        stack = [root]
        while stack:
            i = stack.pop()
            for j in A.neighbours(i):
                # d_j = d_i a_ij / a_ji
                value = d[i] * QQ(A[i, j]) / QQ(A[j, i])
                if d[j] is None:
                    d[j] = value
                    stack.append(j)
                elif d[j] != value:
                    return None
        denom = reduce(lcm, (int(d[i].denominator) for i in comp), 1)
        ints = [int(d[i] * denom) for i in comp]
        g = reduce(gcd, ints)
        for i, v in zip(comp, ints):
            d[i] = v // g
    return tuple(int(x) for x in d)


def simply_laced_cover(A: GCM) -> CoverSpec:
    """Blocks of size (L/d_i)*t, bipartite edges laid out by the wrap rule.

    Edge k between blocks i and j joins block-i vertex floor(k/|a_ji|) to
    block-j vertex k mod n_j; every block-i vertex then has |a_ji| distinct
    neighbours in block j and every block-j vertex |a_ij| in block i.
    """
    d = symmetrizer(A)
    if d is None:
        raise NotSymmetrizable("Simply laced covers need a symmetrizable matrix", details={"gcm": A.rows()})
    L = reduce(lcm, d, 1)
    base = [L // di for di in d]
    t = 1
    while any(abs(A[j, i]) > base[j] * t for i in A.indices for j in A.indices if i != j):
        t += 1
    sizes = tuple(b * t for b in base)

    offsets = [sum(sizes[:i]) for i in A.indices]
    total = sum(sizes)
    rows = [[2 if u == v else 0 for v in range(total)] for u in range(total)]
    edges: Dict[Tuple[int, int], Tuple[Tuple[int, int], ...]] = {}
    for i, j in itertools.combinations(A.indices, 2):
        deg_i = abs(A[j, i])  # neighbours in block j of a block-i vertex
        if deg_i == 0:
            continue
        pairs = tuple((k // deg_i, k % sizes[j]) for k in range(sizes[i] * deg_i))
        edges[(i, j)] = pairs
        for r, s in pairs:
            u, v = offsets[i] + r, offsets[j] + s
            rows[u][v] = rows[v][u] = -1

    labels = tuple(f"{A.labels[i]}.{r + 1}" for i in A.indices for r in range(sizes[i]))
    vertices = tuple((i, r) for i in A.indices for r in range(sizes[i]))
    cover = CoverSpec(
        base=A,
        block_sizes=sizes,
        edges=edges,
        cover_gcm=validate_gcm(rows, labels),
        vertices=vertices,
    )
    check_cover(cover)
    return cover


def check_cover(cover: CoverSpec) -> None:
    """Raise when a block vertex has the wrong number of neighbours in another block."""
    A = cover.base
    C = cover.cover_gcm
    if not C.is_simply_laced:
        raise InvalidInput("Cover matrix is not simply laced")
    for v, (i, r) in enumerate(cover.vertices):
        for j in A.indices:
            count = sum(1 for u in cover.block(j) if C[v, u] != 0 and u != v)
            expected = 0 if j == i else abs(A[j, i])
            if count != expected:
                raise InvalidInput(
                    "Cover degree condition fails",
                    details={"vertex": f"{A.labels[i]}.{r + 1}", "block": A.labels[j],
                             "neighbours": count, "expected": expected},
                )
