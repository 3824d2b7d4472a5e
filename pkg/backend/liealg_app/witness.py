"""
Bracket witnesses for rank-2 indefinite matrices [[2,-m],[-n,2]].

The witness is an imaginary degree delta, a simple index i with delta - alpha_i
real, and x in n⁺_delta with [f_i, x] = c * e_gamma for an explicit integer c
not divisible by the characteristic. The coefficient is a pairing value, so it
is certified for every height; the Lie engine replays the bracket when delta
is small enough.
"""
import logging
from typing import Dict, Optional

from sympy import QQ

from cartan_app.services import validate_gcm
from exact_app.compute_logger import log_computation
from exact_app.conf import get_setting
from exact_app.errors import HypothesisViolated, InvalidInput
from exact_app.scalars import ScalarField
from roots_app import weyl

from .services import BandContext

logger = logging.getLogger(__name__)


def _orient(m: int, n: int, p: int) -> Optional[bool]:
    """Whether the indices must be swapped so that n >= 3 (and n odd when p = 2)."""

    def usable(nn: int) -> bool:
        return nn >= 3 and (p != 2 or nn % 2 == 1)

    if usable(n):
        return False
    if usable(m):
        return True
    return None


@log_computation("liealg.bracket_witness")
def bracket_witness(m: int, n: int, field: ScalarField) -> Dict:
    """Exhibit x in an imaginary root space of n⁺_k with [f_i, x] != 0 in n⁺_k."""
    m, n = int(m), int(n)
    p = field.p
    if m < 1 or n < 1:
        raise InvalidInput("Entries m and n must be positive", details={"m": m, "n": n})
    if m * n <= 4:
        raise HypothesisViolated(
            "Witness needs mn > 4",
            details={"m": m, "n": n, "mn": m * n},
            guidance="For mn <= 4 the matrix is of finite or affine type.",
        )
    swapped = _orient(m, n, p)
    if swapped is None:
        raise HypothesisViolated(
            "In characteristic 2 one of m, n must be odd and at least 3",
            details={"m": m, "n": n, "char": p},
        )
    if swapped:
        m, n = n, m
    A = validate_gcm([[2, -m], [-n, 2]])

    gamma = (1, n)
    if p == 0 or (2 - m * n) % p != 0:
        branch = 1
        index = 0
        root = gamma
        coefficient = 2 - m * n
    else:
        branch = 2
        index = 1
        root = weyl.reflect_root(A, 0, gamma)
        coefficient = n * (3 - m * n)
    delta = weyl.add(root, weyl.unit(2, index))
    if coefficient != weyl.coroot_pairing(A, root, index):
        raise RuntimeError(f"pairing mismatch for (m, n) = ({m}, {n})")
    if p and coefficient % p == 0:
        raise HypothesisViolated("Coefficient vanishes in the field", details={"coefficient": coefficient, "char": p})

    delta_descent = weyl.descend(A, delta)
    root_descent = weyl.descend(A, root)
    below = weyl.sub(root, weyl.unit(2, index))
    certificates = {
        "delta_kind": delta_descent.kind,
        "delta_descent_word": [i + 1 for i in delta_descent.word],
        "e_gamma_kind": root_descent.kind,
        "gamma_minus_alpha_i_is_root": weyl.is_positive(below) and weyl.is_root(A, below),
    }
    if delta_descent.kind != weyl.IMAGINARY or root_descent.kind != weyl.REAL:
        raise RuntimeError(f"descent certificates failed for (m, n) = ({m}, {n}): {certificates}")

    def original(vec):
        return list(reversed(vec)) if swapped else list(vec)

    report = {
        "m": m if not swapped else n,
        "n": n if not swapped else m,
        "char": p,
        "swapped": swapped,
        "branch": branch,
        "delta": original(delta),
        "i": (1 - index if swapped else index) + 1,
        "gamma": original(root),
        "x": f"[e_{(1 - index if swapped else index) + 1}, e_gamma]",
        "coefficient": coefficient,
        "coefficient_in_field": field.to_json(field.from_rational(QQ(coefficient))),
        "nonzero": True,
        "certificates": certificates,
        "engine_checked": False,
    }

    max_height = get_setting("WITNESS_MAX_HEIGHT")
    if weyl.height(delta) <= max_height:
        report["engine_checked"] = _engine_check(A, index, root, delta, coefficient)
    else:
        logger.info(f"witness delta {list(delta)} above height {max_height}; engine replay skipped")
    return report


def _engine_check(A, index: int, root, delta, coefficient: int) -> bool:
    """Replay [f_i, [e_i, e_gamma]] over QQ and compare with coefficient * e_gamma."""
    ctx = BandContext(A, weyl.height(delta), ScalarField.rationals())
    e_root = ctx.real_root_vector(root)
    x = ctx.bracket(ctx.e(index), e_root)
    image = ctx.bracket(ctx.f(index), x)
    expected = e_root.scale(QQ(coefficient))
    if x.is_zero() or image != expected:
        raise RuntimeError(f"engine replay disagrees at delta {list(delta)}: {image!r} vs {expected!r}")
    return True
