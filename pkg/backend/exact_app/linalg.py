"""
Exact linear algebra on top of sympy's DomainMatrix.

Vectors are plain Python lists of domain elements; matrices are lists of
rows. All helpers are pure.
"""
from math import lcm
from typing import List, Optional, Sequence, Tuple

from sympy import GF, Matrix, QQ, ZZ
from sympy.matrices.normalforms import hermite_normal_form
from sympy.polys.matrices import DomainMatrix

Row = List


def rref_rows(rows: Sequence[Sequence], ncols: int, domain=QQ) -> Tuple[List[Row], Tuple[int, ...]]:
    """Reduced row echelon form; returns the nonzero rows and the pivot columns."""
    if not rows:
        return [], ()
    mat = DomainMatrix([[domain.convert(x) for x in row] for row in rows], (len(rows), ncols), domain)
    reduced, pivots = mat.rref()
    out = reduced.to_list()[:len(pivots)]
    return out, tuple(pivots)


def rank(rows: Sequence[Sequence], ncols: int, domain=QQ) -> int:
    if not rows or ncols == 0:
        return 0
    mat = DomainMatrix([[domain.convert(x) for x in row] for row in rows], (len(rows), ncols), domain)
    return mat.rank()


def gf(p: int):
    return GF(p, symmetric=False)


def nullspace_mod_p(rows: Sequence[Sequence[int]], ncols: int, p: int) -> List[List[int]]:
    """Basis of {x : rows · x = 0} over GF(p), as lists of ints in [0, p)."""
    K = gf(p)
    if ncols == 0:
        return []
    if not rows:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    mat = DomainMatrix([[K(int(x)) for x in row] for row in rows], (len(rows), ncols), K)
    null = mat.nullspace()
    return [[K.to_int(x) for x in vec] for vec in null.to_list()]


def solve_mod_p(columns: Sequence[Sequence[int]], target: Sequence[int], p: int) -> Optional[List[int]]:
    """Coefficients c with Σ c_j columns[j] = target over GF(p), or None.

    Columns need not be independent; any solution is returned.
    """
    n = len(columns)
    m = len(target)
    if n == 0:
        return [] if all(int(t) % p == 0 for t in target) else None
    K = gf(p)
    # augmented system [C | t] in row form
    rows = [[K(int(columns[j][i])) for j in range(n)] + [K(int(target[i]))] for i in range(m)]
    mat = DomainMatrix(rows, (m, n + 1), K)
    reduced, pivots = mat.rref()
    if n in pivots:
        return None
    red = reduced.to_list()
    sol = [0] * n
    for r, col in enumerate(pivots):
        sol[col] = K.to_int(red[r][n])
    return sol


def solve_rational(columns: Sequence[Sequence], target: Sequence) -> Optional[List]:
    """Rational analogue of ``solve_mod_p``."""
    n = len(columns)
    m = len(target)
    if n == 0:
        return [] if all(t == 0 for t in target) else None
    rows = [[QQ.convert(columns[j][i]) for j in range(n)] + [QQ.convert(target[i])] for i in range(m)]
    reduced, pivots = DomainMatrix(rows, (m, n + 1), QQ).rref()
    if n in pivots:
        return None
    red = reduced.to_list()
    sol = [QQ(0)] * n
    for r, col in enumerate(pivots):
        sol[col] = red[r][n]
    return sol


def inverse(matrix: Sequence[Sequence], domain=QQ) -> List[Row]:
    size = len(matrix)
    mat = DomainMatrix([[domain.convert(x) for x in row] for row in matrix], (size, size), domain)
    return mat.inv().to_list()


def mat_vec(matrix: Sequence[Sequence], vec: Sequence) -> List:
    return [sum((a * b for a, b in zip(row, vec)), QQ(0)) for row in matrix]


def lattice_basis(generators: Sequence[Sequence], dim: int) -> Tuple[List[List], bool]:
    """Hermite-reduced basis of the Z-span of rational ``generators`` in QQ^dim.

    Returns ``(basis, is_standard)`` where basis[t] is a rational vector whose
    last nonzero coordinate is t (upper triangular columns), and
    ``is_standard`` tells whether the lattice is exactly Z^dim.
    The span must have full rank ``dim``.
    """
    if dim == 0:
        return [], True
    denom = 1
    for vec in generators:
        for x in vec:
            d = int(QQ.convert(x).denominator)
            denom = lcm(denom, d)
    cols = [[int(QQ.convert(x) * denom) for x in vec] for vec in generators]
    # Matrix with generators as columns
    mat = Matrix(dim, len(cols), lambda i, j: cols[j][i])
    hnf = hermite_normal_form(mat)
    if hnf.shape != (dim, dim):
        raise ValueError(f"generators span rank {hnf.shape[1]} < {dim}")
    basis = [[QQ(int(hnf[i, t]), denom) for i in range(dim)] for t in range(dim)]
    for t in range(dim):
        if basis[t][t] == 0 or any(basis[t][i] != 0 for i in range(t + 1, dim)):
            raise ValueError("unexpected Hermite normal form shape")
    is_standard = all(
        basis[t][i] == (1 if i == t else 0) for t in range(dim) for i in range(dim)
    )
    if is_standard:
        basis = [[QQ(1) if i == t else QQ(0) for i in range(dim)] for t in range(dim)]
    return basis, is_standard


__all__ = [
    "rref_rows", "rank", "gf", "nullspace_mod_p", "solve_mod_p", "solve_rational", "inverse",
    "mat_vec", "lattice_basis", "QQ", "ZZ",
]
