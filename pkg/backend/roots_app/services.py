"""
Root-table operations.

Membership in Δ₊ is dim n⁺_alpha > 0 as computed by the Serre-quotient
engine; the descent classifier supplies the kind and the descent word and is
cross-checked against that dimension.
"""
import logging
from typing import Iterable, List, Optional, Sequence, Set

from sympy import QQ

from cartan_app.models import GCM
from cartan_app.services import symmetrizer
from exact_app.compute_logger import log_computation
from exact_app.errors import InvalidInput, NotRealRoot, NotSymmetrizable, UnknownRoot
from liealg_app.serre import SerreQuotient, contents_up_to

from . import weyl
from .models import Interval, RootEntry, RootTable, Verdict
from .weyl import IMAGINARY, REAL, CorootVec, RootVec

logger = logging.getLogger(__name__)

# re-exported lattice operations
reflect_root = weyl.reflect_root
reflect_coroot = weyl.reflect_coroot
pairing = weyl.pairing


@log_computation("roots.enumerate_roots")
def enumerate_roots(A: GCM, max_height: int) -> RootTable:
    if max_height < 1:
        raise InvalidInput("max_height must be at least 1", details={"max_height": max_height})
    engine = SerreQuotient.for_gcm(A)
    table = RootTable(A, int(max_height))
    for content in contents_up_to(A.rank, max_height):
        mult = engine.dim(content)
        descent = weyl.descend(A, content)
        if bool(mult) != descent.is_root or (descent.kind == REAL and mult != 1):
            logger.warning(f"descent and Serre dimension disagree at {list(content)}: {descent} vs dim {mult}")
        if not mult:
            continue
        kind = descent.kind or IMAGINARY
        word = descent.word if kind == REAL else ()
        table.entries[content] = RootEntry(content, mult, kind, word)
    logger.debug(f"enumerated {len(table)} positive roots of {A.log_label()} up to height {max_height}")
    return table


def coroot_of_real(A: GCM, alpha: Sequence[int], table: Optional[RootTable] = None) -> CorootVec:
    """w(alpha_j^vee) for the descent word w^-1 taking alpha to alpha_j."""
    alpha = tuple(alpha)
    entry = table.get(alpha) if table is not None else None
    if entry is not None:
        if not entry.is_real:
            raise NotRealRoot("Root is imaginary", details={"root": list(alpha)})
    descent = weyl.descend(A, alpha)
    if descent.kind != REAL:
        raise NotRealRoot("Vector is not a real root", details={"root": list(alpha), "reason": descent.reason})
    h = weyl.coroot_from_descent(A, descent)
    if weyl.pairing(A, alpha, h) != 2:
        raise RuntimeError(f"coroot normalisation failed at {list(alpha)}")
    return h


def sym_form(A: GCM, alpha: Sequence[int], beta: Sequence[int], d: Optional[Sequence[int]] = None) -> object:
    """(alpha, beta) with (alpha_i, alpha_j) = d_i a_ij for the minimal symmetrizer.

    For symmetric A the symmetrizer is all ones and the form is Σ n_i m_j a_ij.
    """
    if d is None:
        d = symmetrizer(A)
        if d is None:
            raise NotSymmetrizable("Bilinear form needs a symmetrizable matrix", details={"gcm": A.rows()})
    total = sum(d[i] * A[i, j] * alpha[i] * beta[j] for i in A.indices for j in A.indices)
    return QQ(total)


def _check_members(table: RootTable, psi: Iterable[Sequence[int]]) -> Set[RootVec]:
    members = {tuple(a) for a in psi}
    unknown = sorted(a for a in members if a not in table)
    if unknown:
        raise UnknownRoot("Set contains vectors that are not roots in the table",
                          details={"unknown": [list(a) for a in unknown], "max_height": table.max_height})
    return members


def is_closed_set(table: RootTable, psi: Iterable[Sequence[int]]) -> Verdict:
    members = _check_members(table, psi)
    for a in sorted(members):
        for b in sorted(members):
            s = weyl.add(a, b)
            if s in table and s not in members:
                return Verdict(False, table.max_height, (a, b, s))
    return Verdict(True, table.max_height)


def is_root_ideal(table: RootTable, psi: Iterable[Sequence[int]]) -> Verdict:
    members = _check_members(table, psi)
    for a in table.roots():
        for b in sorted(members):
            s = weyl.add(a, b)
            if s in table and s not in members:
                return Verdict(False, table.max_height, (a, b, s))
    return Verdict(True, table.max_height)


def height_ideal(table: RootTable, n: int) -> List[RootVec]:
    """Ψ(n): roots of height >= n."""
    return [a for a in table.roots() if weyl.height(a) >= n]


def subdiagram_roots(table: RootTable, J: Iterable[int]) -> List[RootVec]:
    """Δ₊(J): roots supported in J."""
    J = set(J)
    return [a for a in table.roots() if set(weyl.support(a)) <= J]


def complement_ideal(table: RootTable, J: Iterable[int]) -> List[RootVec]:
    """Ψ_{I∖J}: roots whose support is not contained in J."""
    J = set(J)
    return [a for a in table.roots() if not set(weyl.support(a)) <= J]


def prenilpotent_interval(A: GCM, table: RootTable, alpha: Sequence[int], beta: Sequence[int]) -> Interval:
    """[alpha, beta]_N when the N-span meets no imaginary root and a whole layer a+b=k vanishes."""
    alpha, beta = tuple(alpha), tuple(beta)
    for v in (alpha, beta):
        if not weyl.is_positive(v) or weyl.descend(A, v).kind != REAL:
            raise NotRealRoot("Prenilpotent pairs consist of positive real roots", details={"root": list(v)})
    if alpha == beta:
        raise InvalidInput("Pair must consist of distinct roots", details={"root": list(alpha)})
    bound = table.max_height
    step = max(weyl.height(alpha), weyl.height(beta))
    roots = set()
    for k in range(1, bound // step + 1):
        layer = []
        for a, b in ((a, k - a) for a in range(k + 1)):
            gamma = weyl.add(weyl.scale(a, alpha), weyl.scale(b, beta))
            entry = table.get(gamma)
            if entry is None:
                continue
            if not entry.is_real:
                return Interval(None, "Unbounded", bound)
            layer.append(gamma)
        if not layer:
            ordered = tuple(sorted(roots, key=lambda g: (weyl.height(g), g)))
            return Interval(ordered, "Stabilised", bound)
        roots.update(layer)
    logger.info(f"interval of {list(alpha)}, {list(beta)} did not stabilise below height {bound}")
    return Interval(None, "HeightBound", bound)


def weyl_stability_violations(table: RootTable) -> List[dict]:
    """Entries whose reflection stays positive within the bound but changes multiplicity."""
    out = []
    for entry in table.sorted_entries():
        for i in table.gcm.indices:
            image = weyl.reflect_root(table.gcm, i, entry.coeffs)
            if weyl.is_positive(image) and weyl.height(image) <= table.max_height:
                if table.mult(image) != entry.mult:
                    out.append({"root": list(entry.coeffs), "index": i + 1, "image": list(image)})
    return out


def pairing_matrix(A: GCM, betas: Sequence[Sequence[int]]) -> List[List[int]]:
    """[<beta_j, beta_i^vee>]_{ij} for real roots beta_i."""
    coroots = [coroot_of_real(A, b) for b in betas]
    return [[weyl.pairing(A, bj, hi) for bj in betas] for hi in coroots]

