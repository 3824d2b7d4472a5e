"""
Report builders behind the management commands.

Each builder takes validated inputs and returns ``(payload, holds)``:
``payload`` is the report body and ``holds`` is the verdict of the checked
property, or None for commands that only compute.
"""
import logging
import random
from typing import Dict, List, Optional, Sequence, Tuple

from cartan_app.models import GCM
from cartan_app.services import (
    classify_type,
    find_affine_sub,
    is_compact_hyperbolic,
    m_A,
    simply_laced_cover,
    symmetrizer,
    validate_gcm,
)
from enveloping_app.services import TruncCtx
from exact_app.conf import get_setting
from exact_app.errors import DecomposableMatrix, InvalidInput
from exact_app.scalars import ScalarField
from functors_app import services as functors
from functors_app.models import COVER, SUBSYSTEM, SURJECTION
from groupquot_app.services import (
    QuotCtx,
    abelianization_order,
    dimension_subgroups,
    lower_central_series,
    p_power_check,
    root_ideal_quotient,
    zjl_lie_algebra,
)
from liealg_app.services import (
    compare_isomorphism_invariants,
    height_dimension_profile,
    positive_part,
    serre_ideal_dims,
    serre_onset_pattern,
)
from liealg_app.witness import bracket_witness
from oracles_app.services import grouplike_census, multiplicity_report
from roots_app import weyl
from roots_app.services import enumerate_roots
from strip_app.services import StripCtx, c1_cq_check, nondensity_witness

logger = logging.getLogger(__name__)

Report = Tuple[Dict, Optional[bool]]


def _submatrix(A: GCM, indices: Sequence[int]) -> GCM:
    return validate_gcm([[A[i, j] for j in indices] for i in indices], [A.labels[i] for i in indices])


def _classify(A: GCM) -> Dict:
    found = find_affine_sub(A)
    d = symmetrizer(A)
    return {
        "type": classify_type(A),
        "M_A": m_A(A),
        "symmetrizer": list(d) if d is not None else None,
        "compact_hyperbolic": is_compact_hyperbolic(A),
        "affine_sub": found[0].rows() if found else None,
        "affine_sub_indices": [i + 1 for i in found[1]] if found else None,
    }


def analyze_report(A: GCM, require_indecomposable: bool = False) -> Report:
    if A.is_connected():
        return {"gcm": A.to_json(), **_classify(A)}, None
    components = [[i + 1 for i in comp] for comp in A.components()]
    if require_indecomposable:
        raise DecomposableMatrix("Matrix is decomposable", details={"components": components})
    d = symmetrizer(A)
    return {
        "gcm": A.to_json(),
        "type": "Decomposable",
        "M_A": m_A(A),
        "symmetrizer": list(d) if d is not None else None,
        "components": [
            {"indices": idx, **_classify(_submatrix(A, [i - 1 for i in idx]))} for idx in components
        ],
    }, None


def roots_report(A: GCM, height: int) -> Report:
    table = enumerate_roots(A, height)
    payload = table.to_json()
    payload["real_count"] = len(table.real_roots())
    payload["imaginary_count"] = len(table) - payload["real_count"]
    return payload, None


def serre_dims_report(A: GCM, max_height: int) -> Report:
    payload = {
        "gcm": A.to_json(),
        "max": max_height,
        "ideal_dims": serre_ideal_dims(A, max_height),
        "quotient_dims": height_dimension_profile(A, max_height),
    }
    if A.rank == 2:
        payload["onset"] = serre_onset_pattern(A, max_height)
    return payload, None


def gk_check_report(A: GCM, delta: Sequence[int], field: ScalarField) -> Report:
    if len(delta) != A.rank:
        raise InvalidInput("Degree length must equal the rank", details={"delta": list(delta), "rank": A.rank})
    band = positive_part(A, weyl.height(delta), field)
    dim, kernel = band.gk_degree_kernel(delta)
    return {
        "gcm": A.to_json(),
        "delta": list(delta),
        "char": field.p,
        "degree_dim": band.dim(delta),
        "kernel_dim": dim,
        "kernel": [x.to_json() for x in kernel],
        "gk_simple_at_degree": dim == 0,
    }, dim == 0


def lcs_report(ctx: QuotCtx, p_power_samples: int = 0) -> Report:
    lcs = lower_central_series(ctx)
    payload = {
        "gcm": ctx.gcm.to_json(),
        "char": ctx.p,
        "height": ctx.N,
        "order": ctx.order,
        "series": lcs.to_json(),
        "gamma_equals_coordinate": lcs.equals_coordinate,
    }
    holds = lcs.equals_coordinate
    if p_power_samples:
        rng = random.Random(get_setting("RANDOM_SEED"))
        checks = [p_power_check(ctx, n, p_power_samples, rng) for n in range(1, ctx.N // ctx.p + 1)]
        payload["p_power"] = checks
        holds = holds and all(c["holds"] for c in checks)
    return payload, holds


def zjl_report(ctx: QuotCtx) -> Report:
    series = dimension_subgroups(ctx)
    algebra = zjl_lie_algebra(ctx, series)
    d_equals_gamma = series.all_checks("D_equals_gamma")
    return {
        "gcm": ctx.gcm.to_json(),
        "char": ctx.p,
        "height": ctx.N,
        "series": series.to_json(),
        "D_equals_gamma": d_equals_gamma,
        "D_equals_coordinate": series.equals_coordinate,
        "zjl_iso": algebra.is_isomorphic,
        "lie_algebra": algebra.to_json(),
    }, d_equals_gamma and series.equals_coordinate and algebra.is_isomorphic


def nondensity_report(A: GCM, q: int, pair: Sequence[int], exhaustive: bool = False) -> Report:
    i, j = pair[0] - 1, pair[1] - 1
    payload = nondensity_witness(A, q, i, j)
    verdicts = payload["verdicts"]
    holds = bool(verdicts["part1"]) and verdicts["part2"] is not False
    if exhaustive:
        payload["c1_cq"] = c1_cq_check(StripCtx(A, i, j, q))
        holds = holds and payload["c1_cq"]["holds"]
    return payload, holds


def functor_report(spec: Dict, N: int, field: ScalarField, minimal_image: bool = False) -> Report:
    """Build the map named by a validated FunctorSerializer payload and check it up to height N."""
    kind = spec["kind"]
    if kind == SURJECTION:
        embedding = [b - 1 for b in spec["embedding"]] if spec.get("embedding") else None
        gmap = functors.make_pi_AB(spec["source"]["gcm"], spec["target"]["gcm"], embedding)
    elif kind == SUBSYSTEM:
        _, gmap = functors.make_subsystem_map(spec["target"]["gcm"], spec["betas"])
    else:
        gmap = functors.make_cover_map(spec["source"]["gcm"])
    band_A = positive_part(gmap.source, N, field)
    band_B = positive_part(gmap.target, functors.target_bound(gmap, N), field)
    payload: Dict = {"map": gmap.to_json(), "height": N, "char": field.p}

    if kind == SURJECTION:
        surjectivity = functors.surjectivity_report(gmap, band_A, band_B)
        payload["surjectivity"] = surjectivity
        payload["killed_real_roots"] = functors.kernel_detect(gmap, band_A, band_B)
        if minimal_image:
            if not field.p:
                raise InvalidInput("Minimal images need a prime field", details={"char": field.p})
            payload["minimal_image"] = functors.minimal_image_report(gmap, N, field.p)
        return payload, surjectivity["surjective"]

    serre = functors.serre_images(gmap, band_B, skip_beyond=True)
    payload["serre_images"] = serre
    payload["serre_beyond_truncation"] = sum(1 for entry in serre if entry["vanishes"] is None)
    if kind == COVER:
        payload["cover"] = gmap.cover.to_json()
    return payload, all(entry["vanishes"] is not False for entry in serre)


def slcover_report(A: GCM) -> Report:
    cover = simply_laced_cover(A)
    C = cover.cover_gcm
    return {
        **cover.to_json(),
        "neighbour_counts": [len(C.neighbours(v)) for v in C.indices],
        "cover_type": classify_type(C) if C.is_connected() else "Decomposable",
    }, None


def funny_chain_report(a: int, steps: int) -> Report:
    payload = functors.funny_chain(a, steps)
    return payload, payload["holds"]


def lie_witness_report(m: int, n: int, field: ScalarField) -> Report:
    payload = bracket_witness(m, n, field)
    return payload, payload["nonzero"]


def isom_check_report(A: GCM, B: GCM, N: int, p: Optional[int] = None, order_cap: Optional[int] = None) -> Report:
    payload = {"A": A.to_json(), "B": B.to_json(), "height": N}
    payload.update(compare_isomorphism_invariants(A, B, N))
    if p:
        orders = {
            name: abelianization_order(QuotCtx(gcm, N, p, order_cap))
            for name, gcm in (("A", A), ("B", B))
        }
        payload["abelianization"] = {
            "char": p,
            "orders": orders,
            "distinguished": orders["A"] != orders["B"],
            "M_A": m_A(A),
            "M_B": m_A(B),
        }
        if orders["A"] != orders["B"]:
            payload["verdict"] = "distinguished"
    return payload, None


def ideal_quotient_report(ctx: QuotCtx, subset: Sequence[int]) -> Report:
    payload = root_ideal_quotient(ctx, [j - 1 for j in subset])
    payload.update({"gcm": ctx.gcm.to_json(), "char": ctx.p, "height": ctx.N})
    holds = (
        payload["psi_ideal"]
        and payload["complement_closed"]
        and payload["normal"]
        and payload["kernel_order"] == payload["expected_kernel_order"]
        and payload["quotient_order"] == payload["expected_quotient_order"]
    )
    return payload, holds


def mult_check_report(A: GCM, height: int) -> Report:
    report = multiplicity_report(A, height)
    return report.to_json(), report.passed


def census_report(A: GCM, N: int, field: ScalarField, cap: Optional[int] = None,
                  with_elements: bool = False) -> Report:
    census = grouplike_census(TruncCtx(A, N, field), cap)
    payload = {"gcm": A.to_json(), "char": field.p, "height": N}
    payload.update(census.to_json(with_elements=with_elements))
    return payload, census.passed


def parse_indices(raw: str, what: str = "indices") -> List[int]:
    """``"1,2"`` -> ``[1, 2]``."""
    try:
        return [int(x) for x in str(raw).split(",") if x.strip()]
    except ValueError as e:
        raise InvalidInput(f"Could not parse {what}", details={what: raw},
                           guidance="Use comma-separated integers, e.g. 1,2") from e

