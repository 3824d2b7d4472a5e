"""
The finite quotients U_A^{ma+}(F_p) / U^{ma}_{N+1}.

A QuotCtx is a TruncCtx over F_p. Group elements are group-like truncated
series; subgroups are induced pcgs (see ``pcgs``), so orders and membership
are exact without listing elements. The context works at every prime:
real root elements are integral, and only the operations that pass through
normal forms or exponentials of imaginary elements need p > N.
"""
import logging
import random
import threading
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import QQ

from cartan_app.models import GCM
from enveloping_app.models import EnvElement, GroupElement
from enveloping_app.services import TruncCtx
from exact_app import linalg
from exact_app.compute_logger import log_computation
from exact_app.conf import get_setting, resolve_order_cap
from exact_app.errors import (
    CapExceeded,
    InvalidInput,
    NotPrenilpotent,
    OrderCapExceeded,
    UnsupportedDegree,
)
from exact_app.scalars import ScalarField
from liealg_app.models import LieElement
from roots_app import weyl
from roots_app.services import (
    complement_ideal,
    enumerate_roots,
    is_closed_set,
    is_root_ideal,
    prenilpotent_interval,
    subdiagram_roots,
)

from .models import SeriesLevel, SeriesReport, SubgroupHandle, TorusElement, ZJLAlgebra
from .pcgs import Pcgs, PcgsEntry

logger = logging.getLogger(__name__)


class QuotCtx:
    """U_A^{ma+}(F_p) modulo heights above N."""

    def __init__(self, gcm: GCM, N: int, p: int, order_cap: Optional[int] = None):
        field = ScalarField.prime(p)
        self.env = TruncCtx(gcm, N, field)
        self.gcm = gcm
        self.N = self.env.N
        self.p = field.p
        self.field = field
        self.rank = gcm.rank
        self.order_cap = resolve_order_cap(order_cap)
        self.height_dims = [0] * self.N
        for content in self.env.contents():
            self.height_dims[weyl.height(content) - 1] += self.env.engine.dim(content)
        self._full: Optional[SubgroupHandle] = None
        self._series: Dict[str, SeriesReport] = {}
        self._lock = threading.RLock()

    def log_label(self) -> str:
        return f"QuotCtx(N={self.N},p={self.p},{self.gcm.log_label()})"

    # ---------- orders ----------

    @property
    def log_order(self) -> int:
        return sum(self.height_dims)

    @property
    def order(self) -> int:
        return self.p ** self.log_order

    def coordinate_log(self, n: int) -> int:
        """log_p |U^{ma}_n| in the quotient."""
        return sum(self.height_dims[n - 1:]) if n >= 1 else self.log_order

    def check_order(self, log: int, what: str = "subgroup") -> None:
        order = self.p ** log
        if order > self.order_cap:
            raise OrderCapExceeded(
                f"{what} order {self.p}^{log} exceeds the cap",
                details={"order": order, "cap": self.order_cap, "char": self.p, "N": self.N},
            )

    # ---------- group arithmetic ----------

    def identity(self) -> GroupElement:
        return GroupElement(self.env.one())

    def mul(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return GroupElement(self.env.mul(g.series, h.series))

    def inv(self, g: GroupElement) -> GroupElement:
        return self.env.inverse(g)

    def power(self, g: GroupElement, n: int) -> GroupElement:
        if n < 0:
            return self.power(self.inv(g), -n)
        return GroupElement(self.env.power(g.series, n))

    def commutator(self, g: GroupElement, h: GroupElement) -> GroupElement:
        """g h g⁻¹ h⁻¹."""
        return self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))

    def element(self, u: EnvElement) -> GroupElement:
        return self.env.require_grouplike(u)

    def x(self, alpha: Sequence[int], lam=1) -> GroupElement:
        return self.env.real_root_element(alpha, self.field(lam))

    def element_json(self, g: GroupElement) -> Dict:
        out = {"series": g.to_json()}
        if self.env.char_ok:
            out["normal_form"] = self.env.normal_form_json(self.env.normal_form(g))
        return out

    # ---------- subgroups ----------

    def grow_guard(self, name: str):
        return lambda log: self.check_order(log, name)

    def closure(self, generators: Iterable[GroupElement], normalizers: Sequence[GroupElement] = (),
                name: str = "H", seed: Optional[Pcgs] = None) -> SubgroupHandle:
        generators = list(generators)
        pcgs = seed.copy() if seed is not None else Pcgs(self)
        pcgs.close(generators, normalizers, on_grow=self.grow_guard(name))
        return SubgroupHandle(name, self.p, pcgs=pcgs, generators=generators)

    def coordinate_subgroup(self, n: int) -> SubgroupHandle:
        return SubgroupHandle(f"U_{n}", self.p, coordinate_height=n, coordinate_log=self.coordinate_log(n))

    def equals_coordinate(self, H: SubgroupHandle, n: int) -> bool:
        return H.log_order == self.coordinate_log(n) and all(h >= n for h in H.leading_heights())

    def group_generators(self) -> List[GroupElement]:
        """x_alpha(1) for real alpha, and [exp]x for imaginary basis letters where defined."""
        table = enumerate_roots(self.gcm, self.N)
        gens = [self.x(alpha) for alpha in table.real_roots()]
        for letter in self.env.basis_letters():
            content = letter[1]
            if table.get(content).is_real:
                continue
            if self.p > self.N // letter[0]:
                gens.append(GroupElement(self.env.exp_letter(letter, 1)))
            else:
                logger.debug(f"no exponential for imaginary letter {letter} at p={self.p}, N={self.N}")
        return gens

    def full_group(self) -> SubgroupHandle:
        if self._full is None:
            with self._lock:
                if self._full is None:
                    G = self.closure(self.group_generators(), name="G")
                    if G.log_order != self.log_order:
                        logger.warning(f"{self.log_label()}: generated group has order "
                                       f"{self.p}^{G.log_order}, expected {self.p}^{self.log_order}")
                    self._full = G
        return self._full

    def random_element(self, rng: random.Random, subgroup: Optional[SubgroupHandle] = None,
                       min_height: int = 1) -> GroupElement:
        """Uniform element of subgroup ∩ U^{ma}_{min_height} (default: the full group)."""
        pcgs = (subgroup or self.full_group()).pcgs
        start = pcgs.tail_start(min_height)
        exps = [rng.randrange(self.p) for _ in pcgs.entries[start:]]
        return pcgs.product(exps, start)


# ---------- module-level operations ----------

def quot_context(A: GCM, N: int, p: int, order_cap: Optional[int] = None) -> QuotCtx:
    return QuotCtx(A, N, p, order_cap)


def group_mul(ctx: QuotCtx, g: GroupElement, h: GroupElement) -> GroupElement:
    return ctx.mul(g, h)


def group_inv(ctx: QuotCtx, g: GroupElement) -> GroupElement:
    return ctx.inv(g)


def commutator(ctx: QuotCtx, g: GroupElement, h: GroupElement) -> GroupElement:
    return ctx.commutator(g, h)


def torus_conj(ctx: QuotCtx, t: TorusElement, g: GroupElement) -> GroupElement:
    """t g t⁻¹: the degree-alpha part of the series scales by t(alpha)."""
    if t.p != ctx.p or len(t.values) != ctx.rank:
        raise InvalidInput("Torus element does not match the context", details={"torus": t.to_json()})
    f = ctx.field
    terms = {k: f.mul(t.on(k[0]), c) for k, c in g.series.terms.items()}
    return GroupElement(EnvElement(f, terms))


def _ad_lowering(ctx: QuotCtx, i: int, lam, x: LieElement) -> LieElement:
    """Σ λ^n (ad f_i)^{(n)} x."""
    band = ctx.env.band
    out = x
    lam_n = ctx.field.one
    for n in range(1, ctx.N + 1):
        lam_n = ctx.field.mul(lam_n, lam)
        term = band.ad_divided_power(i, "-", n, x)
        if term.is_zero():
            break
        out = out + term.scale(lam_n)
    return out


@log_computation("groupquot.lowering_conj")
def lowering_conj(ctx: QuotCtx, i: int, lam, g: GroupElement) -> GroupElement:
    """exp(λf_i) g exp(−λf_i) for g supported on Δ₊ ∖ {alpha_i}."""
    env = ctx.env
    env.require_char("lowering_conj")
    lam = ctx.field(lam)
    coords = env.normal_form(g)
    simple = weyl.unit(ctx.rank, i)
    for letter, c in coords:
        if c and letter[1] == simple:
            raise UnsupportedDegree("lowering_conj needs g supported away from alpha_i",
                                    details={"index": i + 1, "coefficient": int(c)})
    if lam == 0:
        return g
    out = ctx.identity()
    for letter, c in coords:
        if c:
            y = _ad_lowering(ctx, i, lam, env.letter_lie(letter).scale(c))
            out = ctx.mul(out, env.exp_lie(y))
    return out


@log_computation("groupquot.commutation_constants")
def commutation_constants(ctx: QuotCtx, alpha: Sequence[int], beta: Sequence[int],
                          samples: int = 20, seed: Optional[int] = None) -> Dict:
    """C^{alpha beta}_{ij} with [x_alpha(r), x_beta(s)] = ∏ x_gamma(C r^i s^j), gamma = i alpha + j beta."""
    alpha, beta = tuple(alpha), tuple(beta)
    table = enumerate_roots(ctx.gcm, ctx.N)
    interval = prenilpotent_interval(ctx.gcm, table, alpha, beta)
    if not interval.is_prenilpotent:
        raise NotPrenilpotent("Pair is not prenilpotent within the truncation",
                              details={"alpha": list(alpha), "beta": list(beta), "reason": interval.reason})
    gammas: List[Tuple[Tuple[int, ...], int, int]] = []
    for gamma in interval.roots:
        for a in range(1, ctx.N + 1):
            b = _second_coefficient(gamma, alpha, beta, a)
            if b:
                gammas.append((gamma, a, b))
                break

    # read off at r = s = 1 over QQ
    rational = TruncCtx(ctx.gcm, ctx.N, ScalarField.rationals())
    x_a, x_b = rational.real_root_element(alpha, QQ(1)), rational.real_root_element(beta, QQ(1))
    rest = rational.mul(
        rational.mul(x_a.series, x_b.series),
        rational.mul(rational.real_root_element(alpha, QQ(-1)).series, rational.real_root_element(beta, QQ(-1)).series),
    )
    constants = []
    for gamma, a, b in gammas:
        keys = rational.tits.keys(gamma)
        e_gamma = rational.lie_to_env(rational.band.real_root_vector(gamma))
        sol = linalg.solve_rational([e_gamma.coordinates(keys)], rest.coordinates(keys))
        if sol is None or QQ.convert(sol[0]).denominator != 1:
            raise RuntimeError(f"commutator component at {list(gamma)} is not an integral multiple of e_gamma")
        C = int(QQ.convert(sol[0]).numerator)
        constants.append({"gamma": list(gamma), "i": a, "j": b, "constant": C})
        if C:
            rest = rational.mul(rational.real_root_element(gamma, QQ(-C)).series, rest)
    if rest != rational.one():
        raise RuntimeError(f"commutator of {list(alpha)}, {list(beta)} is not a product over the interval")

    # re-validate at random (r, s) over the context field
    rng = random.Random(get_setting("RANDOM_SEED") if seed is None else seed)
    failures = 0
    for _ in range(samples):
        r, s = rng.randrange(1, ctx.p), rng.randrange(1, ctx.p)
        lhs = ctx.commutator(ctx.x(alpha, r), ctx.x(beta, s))
        rhs = ctx.identity()
        for entry in constants:
            value = entry["constant"] * pow(r, entry["i"], ctx.p) * pow(s, entry["j"], ctx.p)
            rhs = ctx.mul(rhs, ctx.x(entry["gamma"], value))
        if lhs != rhs:
            failures += 1
    return {
        "alpha": list(alpha),
        "beta": list(beta),
        "interval": [list(g) for g in interval.roots],
        "constants": [c for c in constants if c["constant"]],
        "samples": samples,
        "validation_failures": failures,
        "validated": failures == 0,
    }


def _second_coefficient(gamma, alpha, beta, a: int) -> int:
    """b >= 1 with gamma = a alpha + b beta, else 0."""
    rest = weyl.sub(gamma, weyl.scale(a, alpha))
    for b in range(1, weyl.height(gamma) + 1):
        if weyl.scale(b, beta) == rest:
            return b
    return 0


@log_computation("groupquot.subgroup_closure")
def subgroup_closure(ctx: QuotCtx, generators: Iterable[GroupElement], name: str = "H") -> SubgroupHandle:
    return ctx.closure(generators, name=name)


@log_computation("groupquot.minimal_U_image")
def minimal_U_image(ctx: QuotCtx) -> SubgroupHandle:
    """Closure of the real root groups x_alpha(F_p), alpha real of height <= N."""
    table = enumerate_roots(ctx.gcm, ctx.N)
    return ctx.closure((ctx.x(alpha) for alpha in table.real_roots()), name="U+")


@log_computation("groupquot.lower_central_series")
def lower_central_series(ctx: QuotCtx) -> SeriesReport:
    """gamma_1 = G, gamma_{n+1} = [G, gamma_n], compared with U^{ma}_n."""
    if "lcs" in ctx._series:
        return ctx._series["lcs"]
    G = ctx.full_group()
    normalizers = [e.element for e in G.pcgs.entries]
    levels = [SeriesLevel(1, G, ctx.p ** ctx.coordinate_log(1), ctx.equals_coordinate(G, 1))]
    current = G
    for n in range(2, ctx.N + 1):
        gens = [
            ctx.commutator(x.element, y.element)
            for x in G.pcgs.entries
            for y in current.pcgs.entries
            if x.height + y.height <= ctx.N
        ]
        current = ctx.closure(gens, normalizers, name=f"gamma_{n}")
        levels.append(SeriesLevel(n, current, ctx.p ** ctx.coordinate_log(n), ctx.equals_coordinate(current, n)))
    report = SeriesReport("lower_central_series", levels)
    ctx._series["lcs"] = report
    return report


def _pth_powers(ctx: QuotCtx, D: SubgroupHandle, k: int) -> List[GroupElement]:
    """{x^p : x in D_k}; x^p only depends on x modulo U_m, m = N - (p-1)k + 1."""
    p, N = ctx.p, ctx.N
    if p * k > N:
        return []
    m = N - (p - 1) * k + 1
    heads = [e for e in D.pcgs.entries if e.height < m]
    count = p ** len(heads)
    cap = int(get_setting("POWER_SCAN_CAP"))
    if count > cap:
        raise CapExceeded(
            "p-th power scan is too large",
            details={"k": k, "candidates": count, "cap": cap},
            guidance="Raise KMFORGE['POWER_SCAN_CAP'] or lower the truncation height.",
        )
    one = ctx.env.one()
    seen = set()
    out: List[GroupElement] = []

    def walk(j: int, prefix: GroupElement):
        if j == len(heads):
            a = prefix.series - one
            power = GroupElement(ctx.env.power(a, p) + one)
            if not power.is_identity() and power not in seen:
                seen.add(power)
                out.append(power)
            return
        for c in range(p):
            nxt = prefix if c == 0 else ctx.mul(prefix, D.pcgs.power_of(heads[j], c))
            walk(j + 1, nxt)

    walk(0, ctx.identity())
    logger.debug(f"p-th powers of D_{k}: {count} heads, {len(out)} distinct nontrivial powers")
    return out


@log_computation("groupquot.dimension_subgroups")
def dimension_subgroups(ctx: QuotCtx) -> SeriesReport:
    """D_1 = G, D_n = D_{⌈n/p⌉}^p ∏_{i+j=n} [D_i, D_j], checked against gamma_n and U^{ma}_n."""
    if "zjl" in ctx._series:
        return ctx._series["zjl"]
    lcs = lower_central_series(ctx)
    G = ctx.full_group()
    normalizers = [e.element for e in G.pcgs.entries]
    D: Dict[int, SubgroupHandle] = {1: G}
    powers: Dict[int, List[GroupElement]] = {}
    for n in range(2, ctx.N + 1):
        k = -(-n // ctx.p)
        if k not in powers:
            powers[k] = _pth_powers(ctx, D[k], k)
        gens = list(powers[k])
        for i in range(1, n // 2 + 1):
            j = n - i
            for a in D[i].pcgs.entries:
                for b in D[j].pcgs.entries:
                    if a.height + b.height <= ctx.N:
                        gens.append(ctx.commutator(a.element, b.element))
        D[n] = ctx.closure(gens, normalizers, name=f"D_{n}")
    levels = []
    for n in range(1, ctx.N + 1):
        gamma = lcs.level(n).subgroup
        checks = {
            "gamma_le_D": gamma.is_subgroup_of(D[n]),
            "D_le_U": all(h >= n for h in D[n].leading_heights()),
            "D_equals_gamma": D[n].equals(gamma),
        }
        levels.append(SeriesLevel(n, D[n], ctx.p ** ctx.coordinate_log(n), ctx.equals_coordinate(D[n], n), checks))
    report = SeriesReport("dimension_subgroups", levels)
    ctx._series["zjl"] = report
    return report


def _graded_quotients(ctx: QuotCtx, series: SeriesReport) -> Dict[int, Pcgs]:
    """For each n a pcgs of D_n whose entries tagged "L" map onto a basis of D_n / D_{n+1}."""
    out: Dict[int, Pcgs] = {}
    below = Pcgs(ctx)
    for n in range(ctx.N, 0, -1):
        D = series.level(n).subgroup
        ext = below.copy()
        ext.close([e.element for e in D.pcgs.entries], tag="L")
        out[n] = ext
        below = D.pcgs
    return out


def _lie_columns(ctx: QuotCtx, n: int):
    env = ctx.env
    keys = [k for content in env.contents() if weyl.height(content) == n for k in env.tits.keys(content)]
    letters = [letter for letter in env.basis_letters() if letter[0] == n]
    columns = [env.letter_element(letter).coordinates(keys) for letter in letters]
    return keys, letters, columns


@log_computation("groupquot.zjl_lie_algebra")
def zjl_lie_algebra(ctx: QuotCtx, series: Optional[SeriesReport] = None) -> ZJLAlgebra:
    """L = ⊕ D_n / D_{n+1}, its brackets and p-operation, compared with n⁺ over F_p."""
    series = series or dimension_subgroups(ctx)
    env, p, N = ctx.env, ctx.p, ctx.N
    quotients = _graded_quotients(ctx, series)
    basis = {n: [e for e in quotients[n].entries if e.tag == "L"] for n in range(1, N + 1)}
    dims = [len(basis[n]) for n in range(1, N + 1)]

    # leading components: L_n -> (n⁺)_n inside the height-n part of 𝒰
    psi: Dict[PcgsEntry, LieElement] = {}
    leads: Dict[int, Tuple[List, List[List]]] = {}
    bijective = True
    for n in range(1, N + 1):
        keys, letters, columns = _lie_columns(ctx, n)
        lead_vectors = []
        for t in basis[n]:
            vec = t.element.series.height_component(n).coordinates(keys)
            lead_vectors.append(vec)
            sol = linalg.solve_mod_p(columns, vec, p) if t.height == n else None
            if sol is None:
                bijective = False
                continue
            psi[t] = LieElement(ctx.field, {("+", letter[1], letter[2]): c for letter, c in zip(letters, sol)})
        if lead_vectors and linalg.rank(lead_vectors, len(keys), linalg.gf(p)) != len(letters):
            bijective = False
        leads[n] = (keys, lead_vectors)

    def lie_coords(y: LieElement, n: int):
        keys, lead_vectors = leads[n]
        if not lead_vectors:
            return [] if y.is_zero() else None
        return linalg.solve_mod_p(lead_vectors, env.lie_to_env(y).coordinates(keys), p)

    def group_coords(g: GroupElement, n: int):
        exps = quotients[n].exponents(g, tag="L") if quotients[n].contains(g) else None
        if exps is None:
            return None
        return [exps.get(t, 0) for t in basis[n]]

    brackets = []
    for i in range(1, N + 1):
        for j in range(i, N + 1 - i):
            for a_idx, a in enumerate(basis[i]):
                for b_idx, b in enumerate(basis[j]):
                    if i == j and b_idx <= a_idx:
                        continue
                    group = group_coords(ctx.commutator(a.element, b.element), i + j)
                    lie = None
                    if a in psi and b in psi:
                        lie = lie_coords(env.band.bracket(psi[a], psi[b]), i + j)
                    brackets.append({
                        "left": [i, a_idx + 1],
                        "right": [j, b_idx + 1],
                        "group": group,
                        "lie": lie,
                        "matches": group is not None and group == lie,
                    })

    p_operation = []
    for n in range(1, N + 1):
        for idx, t in enumerate(basis[n]):
            entry = {"level": n, "basis": idx + 1, "target_level": n * p}
            if n * p > N:
                entry.update({"coords": None, "vanishes": True})
            else:
                coords = group_coords(ctx.power(t.element, p), n * p)
                entry.update({"coords": coords, "vanishes": coords is not None and not any(coords)})
            p_operation.append(entry)

    return ZJLAlgebra(
        p=p,
        dims=dims,
        lie_dims=list(ctx.height_dims),
        brackets=brackets,
        p_operation=p_operation,
        leading_map_bijective=bijective,
    )


@log_computation("groupquot.p_power_check")
def p_power_check(ctx: QuotCtx, n: int, samples: int = 50, rng: Optional[random.Random] = None) -> Dict:
    """g^p lies in U^{ma}_{np} for random g in U^{ma}_n."""
    rng = rng or random.Random(get_setting("RANDOM_SEED"))
    violations = []
    for _ in range(samples):
        g = ctx.random_element(rng, min_height=n)
        h = ctx.power(g, ctx.p).leading_height()
        if h is not None and h < n * ctx.p:
            violations.append({"leading_height": h})
    return {"n": n, "samples": samples, "violations": len(violations), "holds": not violations}


@log_computation("groupquot.abelianization_order")
def abelianization_order(ctx: QuotCtx) -> int:
    """|G / gamma_2(G)|."""
    lcs = lower_central_series(ctx)
    G = lcs.level(1).subgroup
    gamma2 = lcs.level(2).subgroup if ctx.N >= 2 else SubgroupHandle("gamma_2", ctx.p, pcgs=Pcgs(ctx))
    return ctx.p ** (G.log_order - gamma2.log_order)


@log_computation("groupquot.root_ideal_quotient")
def root_ideal_quotient(ctx: QuotCtx, J: Iterable[int]) -> Dict:
    """U_{Ψ_{I∖J}} is normal and G / U_{Ψ_{I∖J}} has order p^{Σ_{Δ₊(J)} mult}."""
    J = sorted(set(int(j) for j in J))
    if not J or len(J) >= ctx.rank or any(j < 0 or j >= ctx.rank for j in J):
        raise InvalidInput("J must be a proper nonempty subset of the indices", details={"J": [j + 1 for j in J]})
    ctx.env.require_char("root_ideal_quotient")
    table = enumerate_roots(ctx.gcm, ctx.N)
    psi = complement_ideal(table, J)
    inner = subdiagram_roots(table, J)
    members = set(psi)
    G = ctx.full_group()
    kernel = ctx.closure(
        (GroupElement(ctx.env.exp_letter(letter, 1)) for letter in ctx.env.basis_letters() if letter[1] in members),
        name="U_psi",
    )
    normal = all(
        kernel.contains(ctx.commutator(g.element, k.element))
        for g in G.pcgs.entries
        for k in kernel.pcgs.entries
    )
    expected_kernel = sum(table.mult(a) for a in psi)
    expected_quotient = sum(table.mult(a) for a in inner)
    return {
        "J": [j + 1 for j in J],
        "psi_ideal": bool(is_root_ideal(table, psi)),
        "complement_closed": bool(is_closed_set(table, inner)),
        "kernel_order": kernel.order,
        "expected_kernel_order": ctx.p ** expected_kernel,
        "quotient_order": ctx.p ** (G.log_order - kernel.log_order),
        "expected_quotient_order": ctx.p ** expected_quotient,
        "normal": normal,
    }
