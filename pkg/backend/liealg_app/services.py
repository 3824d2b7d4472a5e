"""
Band-truncated Kac-Moody algebra: contexts and public operations.

``BandContext`` binds a GCM, a height bound N and a ScalarField to the shared
per-GCM Serre engine. Brackets are computed over QQ on lifted coefficients
and mapped back into the field; any exact division that leaves the working
lattice raises NonIntegralDividedPower instead of being rounded.
"""
import logging
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ

from cartan_app.models import GCM
from cartan_app.services import m_A
from exact_app import linalg
from exact_app.compute_logger import log_computation
from exact_app.errors import BandOverflow, InvalidInput, NotImaginary, NotRealRoot
from exact_app.scalars import ScalarField
from roots_app import weyl

from . import free_lie
from .models import LieElement
from .serre import Raw, SerreQuotient, atom_degree, contents_up_to, degree_summary, raw_add, raw_scale

logger = logging.getLogger(__name__)


class BandContext:
    """Kac-Moody algebra g(A) over ``field`` with positive and negative heights <= N."""

    def __init__(self, gcm: GCM, N: int, field: ScalarField):
        if N < 1:
            raise InvalidInput("Height bound must be at least 1", details={"N": N})
        self.gcm = gcm
        self.N = int(N)
        self.field = field
        self.rank = gcm.rank
        self.engine = SerreQuotient.for_gcm(gcm)

    def with_bound(self, N: int) -> "BandContext":
        return BandContext(self.gcm, N, self.field)

    def with_field(self, field: ScalarField) -> "BandContext":
        return BandContext(self.gcm, self.N, field)

    def log_label(self) -> str:
        return f"BandContext(N={self.N},{self.field!r},{self.gcm.log_label()})"

    # ---------- basis ----------

    def dim(self, content: Sequence[int]) -> int:
        content = tuple(content)
        if not weyl.is_positive(content):
            return 0
        self._check_height(content)
        return self.engine.dim(content)

    def basis_atoms(self, content: Sequence[int], sign: str = "+") -> List[Tuple]:
        content = tuple(content)
        return [(sign, content, t) for t in range(self.dim(content))]

    def basis(self, content: Sequence[int], sign: str = "+") -> List[LieElement]:
        return [LieElement(self.field, {a: self.field.one}) for a in self.basis_atoms(content, sign)]

    def dimensions(self) -> Dict[Tuple[int, ...], int]:
        """dim n⁺_alpha for every positive content of height <= N with nonzero dimension."""
        out = {}
        for content in contents_up_to(self.rank, self.N):
            d = self.engine.dim(content)
            if d:
                out[content] = d
        return out

    def e(self, i: int) -> LieElement:
        return LieElement(self.field, {self.engine.unit_atom(i): self.field.one})

    def f(self, i: int) -> LieElement:
        return LieElement(self.field, {("-", weyl.unit(self.rank, i), 0): self.field.one})

    def h(self, i: int) -> LieElement:
        return LieElement(self.field, {("h", i): self.field.one})

    def _check_height(self, content: Sequence[int]) -> None:
        if weyl.height(content) > self.N:
            raise BandOverflow(
                f"Degree of height {weyl.height(content)} exceeds the band bound {self.N}",
                details={"degree": list(content), "N": self.N},
            )

    # ---------- conversions ----------

    def lift(self, x: LieElement) -> Raw:
        return {a: self.field.lift(c) for a, c in x.terms.items()}

    def from_raw(self, raw: Raw, **context) -> LieElement:
        return LieElement(self.field, {a: self.field.from_rational(QQ(c), **context) for a, c in raw.items()})

    # ---------- brackets ----------

    def bracket_atoms(self, a: Tuple, b: Tuple) -> Raw:
        if a[0] == b[0] and a[0] in "+-":
            gamma = weyl.add(a[1], b[1])
            if not weyl.is_root(self.gcm, gamma):
                return {}
            self._check_height(gamma)
        return self.engine.bracket_atoms(a, b)

    def raw_bracket(self, x: Raw, y: Raw) -> Raw:
        out: Raw = {}
        for a, ca in x.items():
            for b, cb in y.items():
                raw_add(out, self.bracket_atoms(a, b), ca * cb)
        return out

    def bracket(self, x: LieElement, y: LieElement) -> LieElement:
        return self.from_raw(self.raw_bracket(self.lift(x), self.lift(y)))

    def raw_ad(self, i: int, sign: str, raw: Raw) -> Raw:
        gen = {self.engine.unit_atom(i): QQ(1)} if sign == "+" else {("-", weyl.unit(self.rank, i), 0): QQ(1)}
        return self.raw_bracket(gen, raw)

    def raw_divided_power(self, i: int, sign: str, s: int, raw: Raw) -> Raw:
        out = raw
        for _ in range(s):
            if not out:
                return {}
            out = self.raw_ad(i, sign, out)
        return raw_scale(out, QQ(1, factorial(s)))

    @log_computation("liealg.ad_divided_power")
    def ad_divided_power(self, i: int, sign: str, s: int, x: LieElement) -> LieElement:
        """(ad e_{±alpha_i})^s x / s!, computed per basis atom over QQ and then mapped into the field."""
        if s < 0:
            raise InvalidInput("Divided power exponent must be nonnegative", details={"s": s})
        out = LieElement(self.field)
        for atom, c in x.terms.items():
            image = self.raw_divided_power(i, sign, s, {atom: QQ(1)})
            converted = self.from_raw(image, degree=list(atom_degree(atom, self.rank)),
                                      index=i + 1, sign=sign, s=s)
            out = out + converted.scale(c)
        return out

    def raw_exp_ad(self, i: int, sign: str, raw: Raw, limit: int = 64) -> Raw:
        total: Raw = dict(raw)
        term = raw
        for s in range(1, limit):
            term = raw_scale(self.raw_ad(i, sign, term), QQ(1, s))
            if not term:
                return total
            raw_add(total, term)
        raise BandOverflow("exp(ad) did not terminate", details={"index": i + 1})

    def raw_s_star(self, i: int, raw: Raw) -> Raw:
        """exp(ad e_i) exp(ad f_i) exp(ad e_i) over QQ."""
        out = self.raw_exp_ad(i, "+", raw)
        out = self.raw_exp_ad(i, "-", out)
        return self.raw_exp_ad(i, "+", out)

    @log_computation("liealg.s_i_star")
    def s_i_star(self, i: int, x: LieElement) -> LieElement:
        return self.from_raw(self.raw_s_star(i, self.lift(x)), index=i + 1, operation="s_i_star")

    # ---------- real root vectors ----------

    def raw_real_root_vector(self, alpha: Sequence[int]) -> Raw:
        alpha = tuple(alpha)
        descent = weyl.descend(self.gcm, alpha)
        if descent.kind != weyl.REAL:
            raise NotRealRoot("Vector is not a real root", details={"degree": list(alpha)})
        self._check_height(alpha)
        return _raw_root_vector(self, alpha, descent)

    def real_root_vector(self, alpha: Sequence[int]) -> LieElement:
        """e_alpha = s_{i1}*(... s_{ik}*(e_j)) along the canonical descent word."""
        return self.from_raw(self.raw_real_root_vector(alpha), degree=list(alpha))

    # ---------- GK-simplicity ----------

    @log_computation("liealg.gk_degree_kernel")
    def gk_degree_kernel(self, delta: Sequence[int]) -> Tuple[int, List[LieElement]]:
        """Common kernel of all (ad f_i)^(s), s >= 1, on n⁺_delta."""
        delta = tuple(delta)
        if weyl.descend(self.gcm, delta).kind != weyl.IMAGINARY:
            raise NotImaginary("GK degree test needs an imaginary root", details={"degree": list(delta)})
        atoms = self.basis_atoms(delta)
        if not atoms:
            return 0, []
        rows_by_atom: Dict[Tuple, List] = {}
        for i in range(self.rank):
            for s in range(1, delta[i] + 1):
                for col, atom in enumerate(atoms):
                    image = self.raw_divided_power(i, "-", s, {atom: QQ(1)})
                    for out_atom, c in image.items():
                        value = self.field.from_rational(QQ(c), degree=list(delta), index=i + 1, s=s)
                        row = rows_by_atom.setdefault((i, s, out_atom), [self.field.zero] * len(atoms))
                        row[col] = value
        rows = [row for row in rows_by_atom.values() if any(v != 0 for v in row)]
        if self.field.p:
            null = linalg.nullspace_mod_p(rows, len(atoms), self.field.p)
        else:
            null = _rational_nullspace(rows, len(atoms))
        kernel = [LieElement(self.field, {a: c for a, c in zip(atoms, vec)}) for vec in null]
        return len(kernel), kernel


def _rational_nullspace(rows, ncols):
    if not rows:
        return [[QQ(1) if i == j else QQ(0) for i in range(ncols)] for j in range(ncols)]
    from sympy.polys.matrices import DomainMatrix

    mat = DomainMatrix([[QQ(x) for x in row] for row in rows], (len(rows), ncols), QQ)
    return mat.nullspace().to_list()


def _widened(ctx: BandContext, height: int, compute):
    """Run ``compute(wide_ctx)``, widening the band until intermediate root strings fit."""
    bound = max(ctx.N, height)
    cap = height * (m_A(ctx.gcm) + 2) + 4
    while True:
        try:
            return compute(ctx.with_bound(bound))
        except BandOverflow:
            if bound >= cap:
                raise
            bound += 2


def _raw_root_vector(ctx: BandContext, alpha, descent) -> Raw:
    def chain(wide: BandContext) -> Raw:
        raw = {wide.engine.unit_atom(descent.terminal): QQ(1)}
        for i in reversed(descent.word):
            raw = wide.raw_s_star(i, raw)
        return raw

    return _widened(ctx, weyl.height(alpha), chain)


def raw_s_star_wide(ctx: BandContext, i: int, raw: Raw) -> Raw:
    """s_i* over QQ on a positive raw element whose image may pass through heights above ctx.N."""
    if not raw:
        return {}
    height = max(weyl.height(atom_degree(atom, ctx.rank)) for atom in raw)
    return _widened(ctx, height, lambda wide: wide.raw_s_star(i, raw))


# ---------- module-level operations ----------

def free_lie_basis(rank: int, degree: Sequence[int]) -> List[Dict]:
    """Lyndon words of the given content with their standard bracketings."""
    if len(degree) != rank:
        raise InvalidInput("Degree length must equal the alphabet size", details={"rank": rank})
    return [
        {"word": list(w), "bracketing": free_lie.bracket_tree(w), "degree": list(degree)}
        for w in free_lie.lyndon_words(tuple(degree))
    ]


@log_computation("liealg.serre_ideal_dims")
def serre_ideal_dims(A: GCM, max_total_degree: int) -> List[int]:
    """dim ĩ_n for n = 1..max_total_degree, checking dim ñ_n - dim ĩ_n = dim n_n."""
    engine = SerreQuotient.for_gcm(A)
    summary = degree_summary(engine, max_total_degree)
    dims = []
    for n in range(1, max_total_degree + 1):
        row = summary.get(n, {"free": 0, "ideal": 0, "quotient": 0})
        if row["free"] != free_lie.witt_dimension(A.rank, n) or row["free"] - row["ideal"] != row["quotient"]:
            raise RuntimeError(f"dimension identity failed at height {n}: {row}")
        dims.append(row["ideal"])
    return dims


@log_computation("liealg.positive_part")
def positive_part(A: GCM, N: int, field: Optional[ScalarField] = None) -> BandContext:
    ctx = BandContext(A, N, field or ScalarField.rationals())
    ctx.dimensions()
    return ctx


def bracket(ctx: BandContext, x: LieElement, y: LieElement) -> LieElement:
    return ctx.bracket(x, y)


def ad_divided_power(ctx: BandContext, i: int, sign: str, s: int, x: LieElement) -> LieElement:
    return ctx.ad_divided_power(i, sign, s, x)


def gk_degree_kernel(ctx: BandContext, delta: Sequence[int]):
    return ctx.gk_degree_kernel(delta)


def real_root_vector(ctx: BandContext, alpha: Sequence[int]) -> LieElement:
    return ctx.real_root_vector(alpha)


def s_i_star_lie(ctx: BandContext, i: int, x: LieElement) -> LieElement:
    return ctx.s_i_star(i, x)


def height_dimension_profile(A: GCM, N: int) -> List[int]:
    """Σ_{ht alpha = n} dim n⁺_alpha for n = 1..N."""
    summary = degree_summary(SerreQuotient.for_gcm(A), N)
    return [summary.get(n, {}).get("quotient", 0) for n in range(1, N + 1)]


def serre_onset_pattern(A: GCM, N: int) -> Dict:
    """Heights of the minimal defining relations of n⁺, for rank 2.

    A minimal relation count in height n is dim ĩ_n minus the dimension of
    [ñ_1, ĩ_{n-1}]; it is intrinsic to the graded algebra. Relations first
    appear at height m + 2 with m = min(|a_12|, |a_21|).
    """
    if A.rank != 2:
        raise InvalidInput("Serre onset patterns are defined for rank 2", details={"rank": A.rank})
    engine = SerreQuotient.for_gcm(A)
    onsets = []
    for n in range(2, N + 1):
        new = sum(engine.relation_count(content) for content in weyl.contents_of_height(2, n))
        if new:
            onsets.append((n, new))
    result = {"first_onset": None, "first_dim": None, "second_onset": None, "recovered_entries": None}
    if not onsets:
        return result
    first_height, first_dim = onsets[0]
    result["first_onset"] = first_height
    result["first_dim"] = first_dim
    if first_dim >= 2:
        result["recovered_entries"] = [first_height - 2, first_height - 2]
    elif len(onsets) > 1:
        result["second_onset"] = onsets[1][0]
        result["recovered_entries"] = [first_height - 2, onsets[1][0] - 2]
    return result


def compare_isomorphism_invariants(A: GCM, B: GCM, N: int) -> Dict:
    """Compare height profiles and, in rank 2, the Serre onset patterns."""
    profile_a = height_dimension_profile(A, N)
    profile_b = height_dimension_profile(B, N)
    first_difference = next((n + 1 for n, (a, b) in enumerate(zip(profile_a, profile_b)) if a != b), None)
    if A.rank != B.rank:
        first_difference = first_difference or 1
    rank2_forced = None
    if A.rank == B.rank == 2 and first_difference is None:
        pa, pb = serre_onset_pattern(A, N), serre_onset_pattern(B, N)
        if pa["recovered_entries"] and pa["recovered_entries"] == pb["recovered_entries"]:
            rank2_forced = "B in {A, A^T}"
    return {
        "profile_A": profile_a,
        "profile_B": profile_b,
        "profiles_equal": first_difference is None,
        "first_difference": first_difference,
        "rank2_forced": rank2_forced,
        "verdict": "distinguished" if first_difference is not None else "consistent",
    }
