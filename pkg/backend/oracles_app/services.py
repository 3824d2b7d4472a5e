"""
Independent oracles for the algebra engines.

witt_dim is the necklace formula, peterson_mult the Peterson recursion on
the symmetrized form, grouplike_census an exhaustive scan of a tiny
truncated enveloping algebra. None of them shares code with the engine it
checks.
"""
import itertools
import logging
from functools import lru_cache, reduce
from math import gcd
from typing import Dict, Sequence, Tuple

from sympy import QQ, divisors, mobius

from cartan_app.models import GCM
from cartan_app.services import symmetrizer
from enveloping_app.models import EnvElement
from enveloping_app.services import TruncCtx
from exact_app.compute_logger import log_computation
from exact_app.conf import get_setting
from exact_app.errors import CapExceeded, InvalidInput, NotSymmetrizable
from liealg_app.serre import SerreQuotient, contents_up_to
from liealg_app import free_lie
from roots_app import weyl
from roots_app.services import sym_form

from .models import GroupLikeCensus, OracleReport

logger = logging.getLogger(__name__)

Content = Tuple[int, ...]


def witt_dim(r: int, n: int) -> int:
    """Dimension of the degree-n part of the free Lie algebra on r letters."""
    if n < 1 or r < 1:
        raise InvalidInput("witt_dim needs r >= 1 and n >= 1", details={"r": r, "n": n})
    return sum(int(mobius(d)) * r ** (n // d) for d in divisors(n)) // n


# ---------- Peterson recursion ----------

def _below(beta: Content):
    """Nonzero gamma < beta componentwise, gamma != beta."""
    for gamma in itertools.product(*(range(b + 1) for b in beta)):
        if any(gamma) and gamma != beta:
            yield gamma


@lru_cache(maxsize=32)
def _peterson_table(A: GCM, max_height: int) -> Dict[Content, object]:
    d = symmetrizer(A)
    if d is None:
        raise NotSymmetrizable("Peterson recursion needs a symmetrizable matrix", details={"gcm": A.rows()})
    rank = A.rank

    def form(a, b):
        return sym_form(A, a, b, d)

    def rho_pairing(beta):
        # (rho, alpha_i) = (alpha_i, alpha_i) / 2 = d_i
        return QQ(sum(d[i] * beta[i] for i in range(rank)))

    c: Dict[Content, object] = {}
    mult: Dict[Content, object] = {}
    for beta in contents_up_to(rank, max_height):
        # c_beta = sum over n | beta of mult(beta / n) / n
        lower = QQ(0)
        for n in divisors(reduce(gcd, beta)):
            if n > 1:
                lower += mult[tuple(x // n for x in beta)] / n
        if weyl.height(beta) == 1:
            c[beta] = QQ(1)
        else:
            rhs = QQ(0)
            for gamma in _below(beta):
                other = weyl.sub(beta, gamma)
                if c[gamma] and c[other]:
                    rhs += form(gamma, other) * c[gamma] * c[other]
            lhs = form(beta, beta) - 2 * rho_pairing(beta)
            if lhs == 0:
                # (beta, beta - 2rho) vanishes on no positive root but the simple ones, so mult(beta) = 0
                if rhs != 0:
                    raise RuntimeError(f"Peterson recursion is inconsistent at {list(beta)}")
                c[beta] = lower
            else:
                c[beta] = rhs / lhs
        value = c[beta] - lower
        if value.denominator != 1 or value < 0:
            raise RuntimeError(f"Peterson multiplicity at {list(beta)} is {value}")
        mult[beta] = value
    return {beta: int(m.numerator) for beta, m in mult.items()}


def peterson_mult(A: GCM, alpha: Sequence[int]) -> int:
    """mult(alpha) by the Peterson recursion in exact rationals."""
    alpha = tuple(int(x) for x in alpha)
    if len(alpha) != A.rank or not weyl.is_positive(alpha):
        raise InvalidInput("Peterson recursion needs a nonzero vector in Q+", details={"alpha": list(alpha)})
    return _peterson_table(A, weyl.height(alpha))[alpha]


# ---------- reports ----------

@log_computation("oracles.multiplicity_report")
def multiplicity_report(A: GCM, max_height: int) -> OracleReport:
    """Serre-quotient dimensions against Peterson multiplicities, degree by degree."""
    engine = SerreQuotient.for_gcm(A)
    report = OracleReport("peterson", {"gcm": A.rows(), "max_height": max_height})
    for content in contents_up_to(A.rank, max_height):
        report.expected[content] = peterson_mult(A, content)
        report.computed[content] = engine.dim(content)
    if not report.passed:
        logger.error(f"Peterson oracle disagrees with the Serre engine: {report.counterexample()}")
    return report


@log_computation("oracles.witt_report")
def witt_report(r: int, max_length: int) -> OracleReport:
    """Counted Lyndon words against the necklace formula."""
    report = OracleReport("witt", {"r": r, "max_length": max_length})
    for n in range(1, max_length + 1):
        report.expected[n] = witt_dim(r, n)
        report.computed[n] = free_lie.witt_dimension(r, n)
    return report


# ---------- group-like census ----------

@log_computation("oracles.grouplike_census")
def grouplike_census(ctx: TruncCtx, cap=None) -> GroupLikeCensus:
    """Scan every truncated series with constant term 1 for the group-like condition."""
    if not ctx.field.p:
        raise InvalidInput("Group-like census needs a finite field", details={"field": repr(ctx.field)})
    ctx.require_char("grouplike_census")
    cap = int(get_setting("CENSUS_CAP")) if cap is None else int(cap)
    keys = [k for k in ctx.keys() if not ctx.tits.is_unit(k)]
    q = ctx.field.p
    candidates = q ** len(keys)
    if candidates > cap:
        raise CapExceeded(
            "Group-like census would scan too many candidates",
            details={"candidates": candidates, "cap": cap},
            guidance="Lower the truncation height or use a smaller field.",
        )
    unit = ctx.tits.unit_key
    found = []
    for values in itertools.product(range(q), repeat=len(keys)):
        terms = dict(zip(keys, values))
        terms[unit] = ctx.field.one
        g = EnvElement(ctx.field, terms)
        if ctx.is_grouplike(g):
            found.append((values, g))

    letters = ctx.basis_letters()
    expected = q ** len(letters)
    seen = set()
    bijective = True
    for values, g in found:
        coords = ctx.normal_form(g)
        tup = tuple(c for _, c in coords)
        if tup in seen or ctx.from_normal_form(coords).series != g:
            bijective = False
        seen.add(tup)
    bijective = bijective and len(seen) == expected
    logger.info(f"census {ctx.log_label()}: {len(found)} group-likes among {candidates} candidates")
    return GroupLikeCensus(
        count=len(found),
        candidates=candidates,
        expected=expected,
        normal_forms_bijective=bijective,
        elements=[values for values, _ in found],
    )
