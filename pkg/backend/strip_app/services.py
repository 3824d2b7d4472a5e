"""
The divided-power strip algebra and its finite group of group-likes.

The strip is 𝒰⁺ modulo every degree outside {mα_i + nα_j : n <= 1, m <= q}.
That set of excluded degrees is closed under adding positive degrees and
splitting, so the product and the coproduct descend. When |a_ij| >= q the
words F_{a,b} stay independent and the arithmetic is pure binomial
combinatorics mod q.
"""
import itertools
import logging
from collections import deque
from math import comb
from typing import Dict, Iterable, List, Optional, Set, Tuple

from cartan_app.models import GCM
from enveloping_app.models import EnvElement
from enveloping_app.services import TruncCtx
from exact_app.compute_logger import log_computation
from exact_app.errors import HypothesisViolated, InvalidInput, NotGroupLike
from exact_app.scalars import ScalarField
from roots_app.services import enumerate_roots

from .models import UNIT, StripElement, StripGroupElt, StripKey, key_degree, key_sort_key

logger = logging.getLogger(__name__)

StripTensor = Dict[Tuple[StripKey, StripKey], int]


class StripCtx:
    """Strip quotient for the ordered pair (i, j) over F_q."""

    def __init__(self, gcm: GCM, i: int, j: int, q: int):
        self.field = ScalarField.prime(q)
        if i == j or not (0 <= i < gcm.rank and 0 <= j < gcm.rank):
            raise InvalidInput("Strip pair must be two distinct indices", details={"pair": [i + 1, j + 1]})
        a_ij = gcm[i, j]
        if -a_ij < q:
            raise HypothesisViolated(
                "The strip words are independent only when |a_ij| >= q",
                details={"inequality": "|a_ij| >= q", "a_ij": a_ij, "q": q, "pair": [i + 1, j + 1]},
            )
        self.gcm = gcm
        self.i, self.j = i, j
        self.q = q
        self.basis: List[StripKey] = sorted(
            [("E", m) for m in range(q + 1)]
            + [("F", a, s - a) for s in range(q + 1) for a in range(s + 1)],
            key=key_sort_key,
        )
        self._coproducts: Dict[StripKey, StripTensor] = {}
        self._glambda: Dict[StripGroupElt, StripElement] = {}

    def log_label(self) -> str:
        return f"StripCtx(q={self.q},pair=({self.i + 1},{self.j + 1}),{self.gcm.log_label()})"

    @property
    def coordinate_count(self) -> int:
        return self.q + 2

    @property
    def group_order(self) -> int:
        return self.q ** self.coordinate_count

    # ---------- elements ----------

    def element(self, terms: Dict[StripKey, int]) -> StripElement:
        return StripElement(self.q, terms)

    def one(self) -> StripElement:
        return self.element({UNIT: 1})

    def E(self, m: int) -> StripElement:
        return self.element({("E", m): 1} if m <= self.q else {})

    def F(self, a: int, b: int) -> StripElement:
        return self.element({("F", a, b): 1} if a + b <= self.q else {})

    def ad_power(self, s: int) -> StripElement:
        """(ad e_i)^{(s)} e_j = Σ_{a+b=s} (−1)^b F_{a,b}."""
        return self.element({("F", a, s - a): (-1) ** (s - a) for a in range(s + 1)} if s <= self.q else {})

    def exp_e(self, lam: int) -> StripElement:
        """exp(λe_i) = Σ λ^m E_m."""
        return self.element({("E", m): pow(lam, m, self.q) for m in range(self.q + 1)})

    # ---------- product ----------

    def mul_basis(self, x: StripKey, y: StripKey) -> Tuple[Optional[StripKey], int]:
        """Product of two basis words as (key, coefficient); key None when it leaves the strip."""
        q = self.q
        if x[0] == "E" and y[0] == "E":
            m = x[1] + y[1]
            return (("E", m), comb(m, x[1])) if m <= q else (None, 0)
        if x[0] == "E":
            a, b = x[1] + y[1], y[2]
            return (("F", a, b), comb(a, x[1])) if a + b <= q else (None, 0)
        if y[0] == "E":
            a, b = x[1], x[2] + y[1]
            return (("F", a, b), comb(b, x[2])) if a + b <= q else (None, 0)
        return None, 0

    def mul(self, u: StripElement, v: StripElement) -> StripElement:
        out: Dict[StripKey, int] = {}
        for x, cx in u.terms.items():
            for y, cy in v.terms.items():
                key, c = self.mul_basis(x, y)
                if key is not None and c % self.q:
                    out[key] = out.get(key, 0) + c * cx * cy
        return self.element(out)

    # ---------- coproduct ----------

    def coproduct_basis(self, key: StripKey) -> StripTensor:
        cached = self._coproducts.get(key)
        if cached is not None:
            return cached
        out: StripTensor = {}

        def put(k1, k2, c):
            if c % self.q:
                out[(k1, k2)] = (out.get((k1, k2), 0) + c) % self.q

        if key[0] == "E":
            m = key[1]
            for k in range(m + 1):
                put(("E", k), ("E", m - k), 1)
        else:
            a, b = key[1], key[2]
            for a1 in range(a + 1):
                for b1 in range(b + 1):
                    a2, b2 = a - a1, b - b1
                    # e_j goes left or right; the other side is e_i^{(a)} e_i^{(b)}
                    put(("F", a1, b1), ("E", a2 + b2), comb(a2 + b2, a2))
                    put(("E", a1 + b1), ("F", a2, b2), comb(a1 + b1, a1))
        self._coproducts[key] = out
        return out

    def coproduct(self, u: StripElement) -> StripTensor:
        out: StripTensor = {}
        for key, c in u.terms.items():
            for pair, d in self.coproduct_basis(key).items():
                out[pair] = (out.get(pair, 0) + c * d) % self.q
        return {k: v for k, v in out.items() if v}

    def in_strip(self, x: StripKey, y: StripKey) -> bool:
        """Whether x ⊗ y has total degree mα_i + nα_j with n <= 1 and m <= q."""
        (m1, n1), (m2, n2) = key_degree(x), key_degree(y)
        return n1 + n2 <= 1 and m1 + m2 <= self.q

    def tensor(self, u: StripElement, v: StripElement) -> StripTensor:
        """u ⊗ v in the strip truncation of the tensor square."""
        out = {}
        for x, cx in u.terms.items():
            for y, cy in v.terms.items():
                c = cx * cy % self.q
                if c and self.in_strip(x, y):
                    out[(x, y)] = c
        return out

    def is_grouplike(self, u: StripElement) -> bool:
        """Constant term 1 and ∇u = u ⊗ u in the strip truncation of the tensor square.

        Both sides keep only total degrees mα_i + nα_j with n <= 1 and m <= q, so
        F ⊗ F pairs are cut.
        """
        return u.coefficient(UNIT) == 1 and self.coproduct(u) == self.tensor(u, u)

    # ---------- group-likes ----------

    def glambda(self, g: StripGroupElt) -> StripElement:
        """exp(λe_i) ∏_s [exp]λ_s (ad e_i)^{(s)} e_j; the F-words square to zero."""
        if len(g.lams) != self.q + 1:
            raise InvalidInput("Strip coordinates need q + 2 entries", details={"coords": list(g.coords), "q": self.q})
        cached = self._glambda.get(g)
        if cached is None:
            tail = self.one()
            for s, lam_s in enumerate(g.lams):
                tail = tail + self.ad_power(s).scale(lam_s)
            cached = self.mul(self.exp_e(g.lam), tail)
            self._glambda[g] = cached
        return cached

    def normal_form(self, u: StripElement, check: bool = True) -> StripGroupElt:
        """Coordinates of a group-like; ``check=False`` trusts products of known group-likes."""
        if check and not self.is_grouplike(u):
            raise NotGroupLike("Strip element is not group-like",
                               details={"terms": len(u.terms), "constant": u.coefficient(UNIT)})
        lam = u.coefficient(("E", 1))
        tail = self.mul(self.exp_e(-lam), u)
        lams = tuple(tail.coefficient(("F", s, 0)) for s in range(self.q + 1))
        g = StripGroupElt(lam, lams)
        if check and self.glambda(g) != u:
            raise NotGroupLike("Strip element does not factor through the coordinates", details={"coords": list(g.coords)})
        return g

    def coords(self, values: Iterable[int]) -> StripGroupElt:
        values = [int(v) % self.q for v in values]
        return StripGroupElt.from_coords(values)

    def identity(self) -> StripGroupElt:
        return self.coords([0] * self.coordinate_count)

    def inverse_series(self, g: StripGroupElt) -> StripElement:
        """(exp(λe_i) t)⁻¹ = t⁻¹ exp(−λe_i), t⁻¹ = 1 − (t − 1)."""
        tail = self.one()
        for s, lam_s in enumerate(g.lams):
            tail = tail + self.ad_power(s).scale(-lam_s)
        return self.mul(tail, self.exp_e(-g.lam))

    def group_mul(self, g: StripGroupElt, h: StripGroupElt) -> StripGroupElt:
        return self.normal_form(self.mul(self.glambda(g), self.glambda(h)), check=False)

    def group_inv(self, g: StripGroupElt) -> StripGroupElt:
        return self.normal_form(self.inverse_series(g), check=False)

    def commutator(self, g: StripGroupElt, h: StripGroupElt) -> StripGroupElt:
        """g h g⁻¹ h⁻¹."""
        u = self.mul(self.mul(self.glambda(g), self.glambda(h)), self.mul(self.inverse_series(g), self.inverse_series(h)))
        return self.normal_form(u, check=False)

    def elements(self) -> Iterable[StripGroupElt]:
        for values in itertools.product(range(self.q), repeat=self.coordinate_count):
            yield StripGroupElt.from_coords(values)

    def generators(self) -> List[StripGroupElt]:
        """Unit coordinate vectors; they generate the whole group."""
        out = []
        for k in range(self.coordinate_count):
            values = [0] * self.coordinate_count
            values[k] = 1
            out.append(self.coords(values))
        return out

    # ---------- subgroups ----------

    def closure(self, generators: Iterable[StripGroupElt]) -> Set[StripGroupElt]:
        gens = [g for g in generators if not g.is_identity]
        seen = {self.identity()}
        queue = deque(seen)
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.group_mul(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def normal_closure(self, generators: Iterable[StripGroupElt]) -> Set[StripGroupElt]:
        conjugates = set(generators)
        queue = deque(conjugates)
        normalizers = self.generators()
        while queue:
            x = queue.popleft()
            for g in normalizers:
                y = self.group_mul(self.group_mul(g, x), self.group_inv(g))
                if y not in conjugates:
                    conjugates.add(y)
                    queue.append(y)
        return self.closure(conjugates)

    def derived_subgroup(self) -> Set[StripGroupElt]:
        gens = self.generators()
        return self.normal_closure(self.commutator(a, b) for a, b in itertools.combinations(gens, 2))

    # ---------- comparison with 𝒰⁺ ----------

    def to_env(self, env: TruncCtx, u: StripElement) -> EnvElement:
        """Image of a strip element under the section F_{a,b} -> e_i^{(a)} e_j e_i^{(b)}."""
        out = env.zero()
        for key, c in u.terms.items():
            if key[0] == "E":
                word = env.divided_power(self.i, key[1]) if key[1] else env.one()
            else:
                left = env.divided_power(self.i, key[1]) if key[1] else env.one()
                right = env.divided_power(self.i, key[2]) if key[2] else env.one()
                word = env.mul(env.mul(left, env.e(self.j)), right)
            out = out + word.scale(c)
        return out

    def strip_degrees(self) -> List[Tuple[int, ...]]:
        out = []
        for key in self.basis:
            m, n = key_degree(key)
            vec = [0] * self.gcm.rank
            vec[self.i] += m
            vec[self.j] += n
            out.append(tuple(vec))
        return sorted(set(out))


# ---------- module-level operations ----------

def strip_context(A: GCM, q: int, i: int, j: int) -> StripCtx:
    return StripCtx(A, i, j, q)


def strip_mul(ctx: StripCtx, u: StripElement, v: StripElement) -> StripElement:
    return ctx.mul(u, v)


def glambda(ctx: StripCtx, coords: Iterable[int]) -> StripElement:
    return ctx.glambda(ctx.coords(coords))


def normal_form(ctx: StripCtx, u: StripElement) -> StripGroupElt:
    return ctx.normal_form(u)


def c_polynomials(ctx: StripCtx, g: StripGroupElt, h: StripGroupElt) -> Tuple[int, int]:
    """(λμ_0 − μλ_0, λ^q μ_0 − μ^q λ_0) mod q."""
    q = ctx.q
    c1 = (g.lam * h.lams[0] - h.lam * g.lams[0]) % q
    cq = (pow(g.lam, q, q) * h.lams[0] - pow(h.lam, q, q) * g.lams[0]) % q
    return c1, cq


def strip_commutator(ctx: StripCtx, g: StripGroupElt, h: StripGroupElt) -> Dict:
    """[g, h] with its degree-(1,1) and degree-(q,1) coordinates against C_1 and C_q."""
    c = ctx.commutator(g, h)
    c1, cq = c_polynomials(ctx, g, h)
    return {
        "commutator": c,
        "coord_1": c.lams[1],
        "coord_q": c.lams[ctx.q],
        "C_1": c1,
        "C_q": cq,
        "holds": c.lams[1] == c1 and c.lams[ctx.q] == cq and c1 == cq,
    }


@log_computation("strip.c1_cq_check")
def c1_cq_check(ctx: StripCtx) -> Dict:
    """C_1 = C_q over every pair of strip group elements."""
    elements = list(ctx.elements())
    violations = []
    for g in elements:
        for h in elements:
            result = strip_commutator(ctx, g, h)
            if not result["holds"]:
                violations.append({"g": list(g.coords), "h": list(h.coords)})
    return {"pairs": len(elements) ** 2, "violations": len(violations), "first": violations[:1], "holds": not violations}


@log_computation("strip.grouplike_census")
def grouplike_census(ctx: StripCtx) -> List[StripElement]:
    """All group-like strip elements, solved degree by degree.

    Δu = u ⊗ u in degree d only involves components of degree <= d, so the
    search assigns one degree at a time and prunes on that equation.
    """
    q = ctx.q
    degrees = sorted({key_degree(k) for k in ctx.basis if k != UNIT}, key=lambda d: (d[1], d[0]))
    keys_of = {d: [k for k in ctx.basis if key_degree(k) == d] for d in degrees}
    pairs_of: Dict[Tuple[int, int], List[Tuple[StripKey, StripKey]]] = {d: [] for d in degrees}
    for x in ctx.basis:
        for y in ctx.basis:
            dx, dy = key_degree(x), key_degree(y)
            d = (dx[0] + dy[0], dx[1] + dy[1])
            if d in pairs_of:
                pairs_of[d].append((x, y))
    found: List[StripElement] = []

    def search(level: int, terms: Dict[StripKey, int]):
        if level == len(degrees):
            found.append(ctx.element(terms))
            return
        d = degrees[level]
        keys = keys_of[d]
        for values in itertools.product(range(q), repeat=len(keys)):
            trial = dict(terms)
            trial.update(zip(keys, values))
            delta: Dict = {}
            for k, c in zip(keys, values):
                if c:
                    for pair, e in ctx.coproduct_basis(k).items():
                        delta[pair] = delta.get(pair, 0) + c * e
            if all((delta.get((x, y), 0) - trial.get(x, 0) * trial.get(y, 0)) % q == 0 for x, y in pairs_of[d]):
                search(level + 1, trial)

    search(0, {UNIT: 1})
    logger.debug(f"{ctx.log_label()}: {len(found)} group-likes")
    return found


def _simple_only_outside_psi(ctx: StripCtx) -> Dict:
    """Real roots among the strip degrees, other than α_i and α_j."""
    table = enumerate_roots(ctx.gcm, ctx.q + 1)
    simple = set()
    for k in (ctx.i, ctx.j):
        vec = [0] * ctx.gcm.rank
        vec[k] = 1
        simple.add(tuple(vec))
    extra = []
    for degree in ctx.strip_degrees():
        if sum(degree) == 0 or degree in simple:
            continue
        entry = table.get(degree)
        if entry is not None and entry.is_real:
            extra.append(list(degree))
    return {"holds": not extra, "real_non_simple": extra}


@log_computation("strip.nondensity_witness")
def nondensity_witness(A: GCM, q: int, i: int, j: int) -> Dict:
    """Strip-level certificates that [exp][e_i, e_j] escapes the derived subgroup and the root-group closure."""
    ctx = StripCtx(A, i, j, q)
    a_ij, a_ji = A[i, j], A[j, i]
    zeros = [0] * ctx.coordinate_count
    witness = ctx.coords(zeros[:2] + [1] + zeros[3:])
    alternative = ctx.coords(zeros[:-1] + [1])

    derived = ctx.derived_subgroup()
    linked = all((g.lams[1] == 0) == (g.lams[q] == 0) for g in derived)
    verdicts: Dict[str, Optional[bool]] = {
        "part1": witness not in derived,
        "part1_alternative": alternative not in derived,
        "derived_coordinates_linked": linked,
        "part2": None,
    }
    hypotheses = {
        "|a_ij| >= q": -a_ij >= q,
        "|a_ij| >= q+1": -a_ij >= q + 1,
        "|a_ji| >= 2": -a_ji >= 2,
    }
    uplus_order = None
    roots_check = None
    if hypotheses["|a_ij| >= q+1"] and hypotheses["|a_ji| >= 2"]:
        roots_check = _simple_only_outside_psi(ctx)
        if roots_check["holds"]:
            gens = [ctx.coords([lam] + [0] * (q + 1)) for lam in range(1, q)]
            gens += [ctx.coords([0, mu] + [0] * q) for mu in range(1, q)]
            image = ctx.closure(gens)
            uplus_order = len(image)
            verdicts["part2"] = witness not in image
    else:
        failed = [name for name in ("|a_ij| >= q+1", "|a_ji| >= 2") if not hypotheses[name]]
        logger.info(f"part 2 refused for q={q}, pair ({i + 1},{j + 1}): {', '.join(failed)} fails")

    return {
        "q": q,
        "pair": [i + 1, j + 1],
        "ambient_order": ctx.group_order,
        "derived_order": len(derived),
        "uplus_image_order": uplus_order,
        "witness_coords": list(witness.coords),
        "alternative_witness_coords": list(alternative.coords),
        "hypotheses": hypotheses,
        "roots_outside_psi": roots_check,
        "verdicts": verdicts,
        "note": "strip-level facts; non-density of the minimal group follows by the reduction to the strip quotient",
    }
