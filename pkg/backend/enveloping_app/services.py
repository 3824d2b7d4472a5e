"""
Truncated integral enveloping algebra 𝒰⁺ over a field, with its bialgebra
structure.

``TruncCtx`` binds a GCM, a height bound N and a field to the shared Tits
form of the GCM. Elements live in Tits coordinates, so products, the
coproduct and the antipode are exact at every prime. Operations that pass
through rational PBW coordinates (normal forms, s_i*, membership in 𝒰(Ψ))
need characteristic 0 or p > N and raise CharacteristicConstraint otherwise.
"""
import logging
import threading
from math import factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import QQ

from cartan_app.models import GCM
from exact_app import linalg
from exact_app.compute_logger import log_computation
from exact_app.errors import (
    BandOverflow,
    CharacteristicConstraint,
    InvalidInput,
    NotClosed,
    NotGroupLike,
    UnsupportedDegree,
)
from exact_app.scalars import ScalarField
from liealg_app.models import LieElement
from liealg_app.serre import contents_up_to
from liealg_app.services import BandContext, raw_s_star_wide
from roots_app import weyl

from .models import BasisLetter, Content, EnvElement, EnvTensor, GroupElement, Key, key_height
from .pbw import PBWElement, add_into
from .tits import TitsForm

logger = logging.getLogger(__name__)


class TruncCtx:
    """𝒰⁺(A) over ``field``, truncated above height N."""

    def __init__(self, gcm: GCM, N: int, field: ScalarField):
        if not field.is_field:
            raise InvalidInput("Enveloping contexts need the rationals or a prime field",
                               details={"field": repr(field)})
        self.band = BandContext(gcm, N, field)
        self.gcm = gcm
        self.N = self.band.N
        self.field = field
        self.rank = gcm.rank
        self.engine = self.band.engine
        self.tits = TitsForm.for_engine(self.engine)
        self.pbw = self.tits.pbw
        self._series: Dict[Tuple, List[EnvElement]] = {}
        self._s_star: Dict[Tuple[int, BasisLetter], PBWElement] = {}
        self._lock = threading.RLock()

    @property
    def char_ok(self) -> bool:
        return self.field.p == 0 or self.field.p > self.N

    def require_char(self, operation: str, bound: Optional[int] = None) -> None:
        bound = self.N if bound is None else bound
        if self.field.p and self.field.p <= bound:
            raise CharacteristicConstraint(
                f"{operation} needs characteristic 0 or p > {bound}",
                details={"operation": operation, "char": self.field.p, "bound": bound},
            )

    def log_label(self) -> str:
        return f"TruncCtx(N={self.N},{self.field!r},{self.gcm.log_label()})"

    # ---------- bases ----------

    def contents(self) -> List[Content]:
        return list(contents_up_to(self.rank, self.N))

    def keys(self) -> List[Key]:
        out = [self.tits.unit_key]
        for content in self.contents():
            out.extend(self.tits.keys(content))
        return out

    def basis_letters(self) -> List[BasisLetter]:
        """Basis of n⁺ up to height N in the fixed order (height, content, idx)."""
        out = []
        for content in self.contents():
            for t in range(self.engine.dim(content)):
                out.append((weyl.height(content), content, t))
        return sorted(out)

    def letter_lie(self, letter: BasisLetter) -> LieElement:
        return LieElement(self.field, {("+", letter[1], letter[2]): self.field.one})

    # ---------- conversions ----------

    def zero(self) -> EnvElement:
        return EnvElement(self.field)

    def one(self) -> EnvElement:
        return EnvElement(self.field, {self.tits.unit_key: self.field.one})

    def _reduce(self, value):
        return value % self.field.p if self.field.p else value

    def convert(self, rational_terms: Dict[Key, object], **context) -> EnvElement:
        """Map rational Tits coordinates into the field; non-integral values raise."""
        terms = {}
        for k, c in rational_terms.items():
            if key_height(k) <= self.N:
                terms[k] = self.field.from_rational(QQ.convert(c), degree=list(k[0]), **context)
        return EnvElement(self.field, terms)

    def lift(self, u: EnvElement) -> Dict[Key, object]:
        return {k: self.field.lift(c) for k, c in u.terms.items()}

    def from_pbw(self, elem: PBWElement, **context) -> EnvElement:
        return self.convert(self.tits.from_pbw(elem), **context)

    def pbw_terms(self, u: EnvElement) -> PBWElement:
        """PBW coordinates of u over QQ, reduced to [0, p) over a prime field."""
        self.require_char("PBW coordinates")
        out: PBWElement = {}
        for k, c in u.terms.items():
            add_into(out, self.tits.to_pbw(k), self.field.lift(c))
        if self.field.p:
            out = {w: self.field.lift(self.field.from_rational(c)) for w, c in out.items()}
            out = {w: c for w, c in out.items() if c != 0}
        return out

    def pbw_view(self, u: EnvElement) -> List[Dict]:
        """EnvMonomial view: runs of equal letters with exponents, divided powers not applied."""
        out = []
        for word, c in sorted(self.pbw_terms(u).items()):
            runs: List[Dict] = []
            for letter in word:
                if runs and runs[-1]["letter"] == letter:
                    runs[-1]["exponent"] += 1
                else:
                    runs.append({"letter": letter, "exponent": 1})
            monomial = [{"degree": list(r["letter"][1]), "basis": r["letter"][2] + 1, "exponent": r["exponent"]}
                        for r in runs]
            out.append({"monomial": monomial, "coeff": self.field.to_json(self.field.from_rational(c))})
        return out

    def divided_power(self, i: int, n: int) -> EnvElement:
        content = weyl.scale(n, weyl.unit(self.rank, i))
        if n > self.N:
            return self.zero()
        coords = self.tits.coordinates(content, self.pbw.divided_power_simple(i, n))
        return self.convert({(content, t): c for t, c in coords.items()})

    def e(self, i: int) -> EnvElement:
        return self.divided_power(i, 1)

    def lie_to_env(self, x: LieElement) -> EnvElement:
        """Image of a positive Lie element under n⁺ → 𝒰⁺."""
        pbw: PBWElement = {}
        for atom, c in x.terms.items():
            if atom[0] != "+":
                raise InvalidInput("Only positive Lie elements embed in 𝒰⁺", details={"atom": str(atom)})
            self._check_height(atom[1])
            pbw[((weyl.height(atom[1]), atom[1], atom[2]),)] = x.field.lift(c)
        return self.from_pbw(pbw)

    def letter_element(self, letter: BasisLetter) -> EnvElement:
        return self.from_pbw({(letter,): QQ(1)})

    def _check_height(self, content: Sequence[int]) -> None:
        if weyl.height(content) > self.N:
            raise BandOverflow(
                f"Degree of height {weyl.height(content)} exceeds the truncation {self.N}",
                details={"degree": list(content), "N": self.N},
            )

    # ---------- algebra ----------

    def mul(self, u: EnvElement, v: EnvElement) -> EnvElement:
        N = self.N
        # right factor bucketed by height, so each left term only meets what fits below N
        by_height: List[List[Tuple[Key, object]]] = [[] for _ in range(N + 1)]
        for b, cb in v.terms.items():
            by_height[key_height(b)].append((b, cb))
        out: Dict[Key, object] = {}
        for a, ca in u.terms.items():
            ha = key_height(a)
            for bucket in by_height[:N - ha + 1]:
                for b, cb in bucket:
                    c = ca * cb
                    for k, s in self.tits.mul_basis(a, b).items():
                        out[k] = out.get(k, 0) + c * s
        return EnvElement(self.field, {k: self._reduce(c) for k, c in out.items()})

    def power(self, u: EnvElement, n: int) -> EnvElement:
        result = self.one()
        base = u
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    # ---------- Hopf structure ----------

    def coproduct(self, u: EnvElement) -> EnvTensor:
        out: Dict = {}
        for a, c in u.terms.items():
            for pair, m in self.tits.coproduct_basis(a).items():
                out[pair] = out.get(pair, 0) + c * m
        return {pair: v for pair, v in ((p, self._reduce(c)) for p, c in out.items()) if v != 0}

    def counit(self, u: EnvElement):
        return u.constant_term()

    def antipode(self, u: EnvElement) -> EnvElement:
        out: Dict[Key, object] = {}
        for a, c in u.terms.items():
            for k, s in self.tits.antipode_basis(a).items():
                out[k] = out.get(k, 0) + c * s
        return EnvElement(self.field, {k: self._reduce(c) for k, c in out.items()})

    def tensor(self, u: EnvElement, v: EnvElement) -> EnvTensor:
        """u ⊗ v, keeping pairs of combined height <= N."""
        out = {}
        for a, ca in u.terms.items():
            for b, cb in v.terms.items():
                if key_height(a) + key_height(b) <= self.N:
                    out[(a, b)] = self.field.mul(ca, cb)
        return out

    def tensor_mul(self, S: EnvTensor, T: EnvTensor) -> EnvTensor:
        out: Dict = {}
        for (a, b), cs in S.items():
            for (c, d), ct in T.items():
                if key_height(a) + key_height(b) + key_height(c) + key_height(d) > self.N:
                    continue
                coeff = cs * ct
                for k1, s1 in self.tits.mul_basis(a, c).items():
                    for k2, s2 in self.tits.mul_basis(b, d).items():
                        out[(k1, k2)] = out.get((k1, k2), 0) + coeff * s1 * s2
        return {pair: v for pair, v in ((p, self._reduce(c)) for p, c in out.items()) if v != 0}

    def counit_left(self, T: EnvTensor) -> EnvElement:
        """(ε ⊗ id) T."""
        out: Dict[Key, object] = {}
        for (a, b), c in T.items():
            if self.tits.is_unit(a):
                out[b] = self.field.add(out.get(b, self.field.zero), c)
        return EnvElement(self.field, out)

    def antipode_convolution(self, T: EnvTensor) -> EnvElement:
        """m ∘ (τ ⊗ id) T."""
        out = self.zero()
        for (a, b), c in T.items():
            left = EnvElement(self.field, {a: c})
            out = out + self.mul(self.antipode(left), EnvElement(self.field, {b: self.field.one}))
        return out

    def is_grouplike(self, g: EnvElement) -> bool:
        if g.constant_term() != self.field.one:
            return False
        return self.coproduct(g) == self.tensor(g, g)

    def require_grouplike(self, g) -> GroupElement:
        series = g.series if isinstance(g, GroupElement) else g
        if not self.is_grouplike(series):
            raise NotGroupLike("Element is not group-like at this truncation",
                               details={"terms": len(series.terms), "constant": str(series.constant_term())})
        return g if isinstance(g, GroupElement) else GroupElement(series)

    def inverse(self, g: GroupElement) -> GroupElement:
        return GroupElement(self.antipode(g.series))

    # ---------- exponentials ----------

    def _power_series(self, X: PBWElement, height: int, **context) -> List[EnvElement]:
        """[X^n / n! for n = 0 .. N // height] in Tits coordinates."""
        out = [self.one()]
        power: PBWElement = {(): QQ(1)}
        for n in range(1, self.N // height + 1):
            power = self.pbw.mul(power, X)
            scaled = {w: c / factorial(n) for w, c in power.items()}
            out.append(self.from_pbw(scaled, n=n, **context))
        return out

    def _combine(self, series: List[EnvElement], lam) -> EnvElement:
        f = self.field
        out: Dict[Key, object] = {}
        lam_n = f.one
        for n, term in enumerate(series):
            if n:
                lam_n = f.mul(lam_n, lam)
                if lam_n == 0:
                    break
            for k, c in term.terms.items():
                out[k] = f.add(out.get(k, f.zero), f.mul(lam_n, c))
        return EnvElement(f, out)

    def _positive_degree(self, x: LieElement) -> Content:
        degree = x.homogeneous_degree(self.rank)
        if degree is None or not weyl.is_positive(degree):
            raise InvalidInput("Twisted exponentials need a nonzero homogeneous positive element",
                               details={"degrees": [list(d) for d in x.degrees(self.rank)]})
        self._check_height(degree)
        return degree

    def divided_power_series(self, x: LieElement) -> List[EnvElement]:
        """x^{[n]} = x^n / n! for n = 0 .. N // ht(x)."""
        degree = self._positive_degree(x)
        height = weyl.height(degree)
        is_real = weyl.descend(self.gcm, degree).kind == weyl.REAL
        if not is_real:
            self.require_char("Exponential sequences of imaginary elements", self.N // height)
        X = {((height, degree, atom[2]),): x.field.lift(c) for atom, c in x.terms.items()}
        return self._power_series(X, height, operation="twisted_exp")

    def letter_series(self, letter: BasisLetter) -> List[EnvElement]:
        key = ("letter", letter)
        cached = self._series.get(key)
        if cached is None:
            cached = self.divided_power_series(self.letter_lie(letter))
            with self._lock:
                self._series[key] = cached
        return cached

    def exp_letter(self, letter: BasisLetter, lam) -> EnvElement:
        return self._combine(self.letter_series(letter), lam)

    def real_root_series(self, alpha: Sequence[int]) -> List[EnvElement]:
        alpha = tuple(alpha)
        key = ("real", alpha)
        cached = self._series.get(key)
        if cached is None:
            self._check_height(alpha)
            raw = self.band.raw_real_root_vector(alpha)
            height = weyl.height(alpha)
            X = {((height, atom[1], atom[2]),): c for atom, c in raw.items()}
            cached = self._power_series(X, height, operation="real_root_element", root=list(alpha))
            with self._lock:
                self._series[key] = cached
        return cached

    def real_root_element(self, alpha: Sequence[int], lam) -> GroupElement:
        """x_alpha(λ) = Σ λ^n e_alpha^{(n)}."""
        return GroupElement(self._combine(self.real_root_series(alpha), lam))

    def twisted_exp(self, x: LieElement, lam) -> GroupElement:
        return GroupElement(self._combine(self.divided_power_series(x), lam))

    def exp_lie(self, y: LieElement) -> GroupElement:
        """Σ y^n / n! for a positive, possibly inhomogeneous, y."""
        self.require_char("exp of an inhomogeneous Lie element")
        Y = self.lie_to_env(y)
        out = self.one()
        term = self.one()
        for n in range(1, self.N + 1):
            term = self.mul(term, Y).scale(self.field.inv(self.field(n)))
            if term.is_zero():
                break
            out = out + term
        return GroupElement(out)

    # ---------- normal form ----------

    def _solve(self, columns: List[List], target: List) -> Optional[List]:
        if self.field.p:
            return linalg.solve_mod_p(columns, target, self.field.p)
        return linalg.solve_rational(columns, target)

    def normal_form(self, g) -> List[Tuple[BasisLetter, object]]:
        """Coordinates λ_x with g = ∏ [exp]λ_x x over basis letters in the fixed order."""
        self.require_char("normal_form")
        g = self.require_grouplike(g)
        letters = self.basis_letters()
        rest = g.series
        coords: List[Tuple[BasisLetter, object]] = []
        for n in range(1, self.N + 1):
            level = [letter for letter in letters if letter[0] == n]
            if not level:
                continue
            found: List[Tuple[BasisLetter, object]] = []
            for content in sorted({letter[1] for letter in level}):
                block = [letter for letter in level if letter[1] == content]
                keys = self.tits.keys(content)
                columns = [self.letter_element(letter).coordinates(keys) for letter in block]
                target = rest.coordinates(keys)
                sol = self._solve(columns, target)
                if sol is None:
                    raise NotGroupLike("Degree component is not a Lie element", details={"degree": list(content)})
                found.extend(zip(block, sol))
            coords.extend(found)
            # peel from the left in the same order from_normal_form multiplies
            for letter, lam in found:
                if lam != 0:
                    rest = self.mul(self.exp_letter(letter, self.field.neg(lam)), rest)
        if rest != self.one():
            raise NotGroupLike("Peeling left a nontrivial remainder", details={"remainder_terms": len(rest.terms)})
        return coords

    def from_normal_form(self, coords: Iterable[Tuple[BasisLetter, object]]) -> GroupElement:
        out = self.one()
        for letter, lam in coords:
            if lam != 0:
                out = self.mul(out, self.exp_letter(letter, lam))
        return GroupElement(out)

    # ---------- s_i* ----------

    def letter_s_star(self, i: int, letter: BasisLetter) -> PBWElement:
        key = (i, letter)
        cached = self._s_star.get(key)
        if cached is not None:
            return cached
        content = letter[1]
        if content == weyl.unit(self.rank, i):
            raise UnsupportedDegree("s_i* does not preserve 𝒰⁺ on the letter e_i",
                                    details={"index": i + 1, "degree": list(content)})
        image_degree = weyl.reflect_root(self.gcm, i, content)
        self._check_height(image_degree)
        raw = raw_s_star_wide(self.band, i, {("+", content, letter[2]): QQ(1)})
        image: PBWElement = {}
        for atom, c in raw.items():
            if atom[0] != "+" or atom[1] != image_degree:
                raise RuntimeError(f"s_{i + 1}* left degree {list(image_degree)} at {atom}")
            image[((weyl.height(image_degree), image_degree, atom[2]),)] = c
        with self._lock:
            self._s_star[key] = image
        return image

    def s_i_star_pbw(self, i: int, elem: PBWElement) -> PBWElement:
        out: PBWElement = {}
        for word, c in elem.items():
            image: PBWElement = {(): QQ(1)}
            for letter in word:
                image = self.pbw.mul(image, self.letter_s_star(i, letter))
            add_into(out, image, c)
        return out

    def s_i_star_env(self, i: int, u: EnvElement) -> EnvElement:
        return self.from_pbw(self.s_i_star_pbw(i, self.pbw_terms(u)), index=i + 1, operation="s_i_star_env")

    def bialgebra_check(self, i: int, u: EnvElement) -> Dict:
        """Compare ∇ s_i* u with (s_i* ⊗ s_i*) ∇u and ε s_i* u with ε u."""
        terms = self.pbw_terms(u)
        image = self.s_i_star_pbw(i, terms)
        lhs: Dict = {}
        for word, c in image.items():
            for pair, m in self.pbw.coproduct_word(word).items():
                lhs[pair] = lhs.get(pair, 0) + c * m
        rhs: Dict = {}
        for word, c in terms.items():
            for (w1, w2), m in self.pbw.coproduct_word(word).items():
                left = self.s_i_star_pbw(i, {w1: QQ(1)})
                right = self.s_i_star_pbw(i, {w2: QQ(1)})
                for a, ca in left.items():
                    for b, cb in right.items():
                        rhs[(a, b)] = rhs.get((a, b), 0) + c * m * ca * cb

        def reduced(table):
            out = {}
            for pair, c in table.items():
                value = self.field.from_rational(QQ.convert(c))
                if value != 0:
                    out[pair] = value
            return out

        coproduct_holds = reduced(lhs) == reduced(rhs)
        counit_holds = self.field.from_rational(QQ.convert(image.get((), 0))) == \
            self.field.from_rational(QQ.convert(terms.get((), 0)))
        return {
            "index": i + 1,
            "pbw_terms": len(terms),
            "coproduct_holds": coproduct_holds,
            "counit_holds": counit_holds,
            "holds": coproduct_holds and counit_holds,
        }

    # ---------- subalgebras ----------

    def restrict_to(self, psi: Iterable[Sequence[int]], u: EnvElement) -> bool:
        from roots_app.services import enumerate_roots, is_closed_set

        members = {tuple(a) for a in psi}
        table = enumerate_roots(self.gcm, self.N)
        verdict = is_closed_set(table, members)
        if not verdict:
            a, b, s = verdict.witness
            raise NotClosed("Root set is not closed", details={"alpha": list(a), "beta": list(b), "sum": list(s)})
        return all(letter[1] in members for word in self.pbw_terms(u) for letter in word)


# ---------- module-level operations ----------

def trunc_context(A: GCM, N: int, field: ScalarField) -> TruncCtx:
    return TruncCtx(A, N, field)


def env_mul(ctx: TruncCtx, u: EnvElement, v: EnvElement) -> EnvElement:
    return ctx.mul(u, v)


def coproduct(ctx: TruncCtx, u: EnvElement) -> EnvTensor:
    return ctx.coproduct(u)


def counit(ctx: TruncCtx, u: EnvElement):
    return ctx.counit(u)


def antipode(ctx: TruncCtx, u: EnvElement) -> EnvElement:
    return ctx.antipode(u)


def is_grouplike(ctx: TruncCtx, g: EnvElement) -> bool:
    return ctx.is_grouplike(g)


def twisted_exp(ctx: TruncCtx, x: LieElement, lam) -> GroupElement:
    return ctx.twisted_exp(x, lam)


def real_root_element(ctx: TruncCtx, alpha: Sequence[int], lam) -> GroupElement:
    return ctx.real_root_element(alpha, lam)


@log_computation("enveloping.normal_form")
def normal_form(ctx: TruncCtx, g) -> List[Tuple[BasisLetter, object]]:
    return ctx.normal_form(g)


@log_computation("enveloping.s_i_star_env")
def s_i_star_env(ctx: TruncCtx, i: int, u: EnvElement) -> EnvElement:
    return ctx.s_i_star_env(i, u)


@log_computation("enveloping.bialgebra_check")
def bialgebra_check(ctx: TruncCtx, i: int, u: EnvElement) -> Dict:
    return ctx.bialgebra_check(i, u)


def restrict_to(ctx: TruncCtx, psi: Iterable[Sequence[int]], u: EnvElement) -> bool:
    return ctx.restrict_to(psi, u)


def normal_form_json(ctx: TruncCtx, coords: List[Tuple[BasisLetter, object]]) -> List[Dict]:
    return [
        {"degree": list(letter[1]), "basis": letter[2] + 1, "coeff": ctx.field.to_json(c)}
        for letter, c in coords
    ]
