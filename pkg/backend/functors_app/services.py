"""
Functorial maps between positive parts: surjections π_AB for B <= A,
subsystem maps e_i -> e_{beta_i}, and simply laced cover embeddings.

A map is evaluated on a lattice basis vector of n⁺(A) by rewriting it in
Lyndon coordinates and replaying the standard bracketing on the generator
images in the target engine. Group elements are pushed forward PBW word by
PBW word; the algebra map restricted to 𝒰⁺ is multiplicative, so group-likes
go to group-likes.
"""
import logging
import threading
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ

from cartan_app.models import GCM
from cartan_app.services import gcm_leq, simply_laced_cover, validate_gcm
from enveloping_app.models import GroupElement
from enveloping_app.pbw import PBWElement, add_into
from enveloping_app.services import TruncCtx
from exact_app import linalg
from exact_app.compute_logger import log_computation
from exact_app.errors import (
    BandOverflow,
    DifferenceIsRoot,
    InvalidGCM,
    InvalidInput,
    NotComparable,
    NotGCM,
    NotRealRoot,
)
from exact_app.scalars import ScalarField
from groupquot_app.services import QuotCtx, minimal_U_image
from liealg_app import free_lie
from liealg_app.models import LieElement
from liealg_app.serre import Raw, SerreQuotient, contents_up_to, raw_add
from liealg_app.services import BandContext, positive_part
from roots_app import weyl
from roots_app.services import enumerate_roots, pairing_matrix, sym_form

from .models import COVER, SUBSYSTEM, SURJECTION, GradedLatticeMap

logger = logging.getLogger(__name__)

DEFAULT_CONTAINMENT_HEIGHT = 6


# ---------- constructors ----------

@log_computation("functors.make_pi_AB")
def make_pi_AB(A: GCM, B: GCM, embedding: Optional[Sequence[int]] = None,
               check_height: int = DEFAULT_CONTAINMENT_HEIGHT) -> GradedLatticeMap:
    """e_{emb(b)} -> e_b and every other generator of A -> 0.

    ``embedding[b]`` is the index of A that the b-th index of B sits on.
    """
    if not gcm_leq(B, A, embedding):
        emb = list(range(B.rank)) if embedding is None else list(embedding)
        offending = [
            {"at": (i + 1, j + 1), "b_ij": B[i, j], "a_ij": A[emb[i], emb[j]]}
            for i in B.indices for j in B.indices if B[i, j] < A[emb[i], emb[j]]
        ]
        raise NotComparable("B is not <= A under the index embedding",
                            details={"embedding": [x + 1 for x in emb], "entries": offending})
    emb = tuple(range(B.rank)) if embedding is None else tuple(int(x) for x in embedding)
    position = {a: b for b, a in enumerate(emb)}
    pi_bar = tuple(
        weyl.unit(B.rank, position[k]) if k in position else (0,) * B.rank
        for k in A.indices
    )

    # Δ₊(B) ⊆ Δ₊(A) through the embedding, by descent in both matrices
    missing = []
    for n in range(1, check_height + 1):
        for beta in weyl.contents_of_height(B.rank, n):
            if weyl.is_root(B, beta):
                alpha = [0] * A.rank
                for b, c in enumerate(beta):
                    alpha[emb[b]] = c
                if not weyl.is_root(A, alpha):
                    missing.append(list(beta))
    if missing:
        logger.warning(f"roots of {B.log_label()} missing from {A.log_label()}: {missing[:5]}")
    return GradedLatticeMap(
        kind=SURJECTION,
        source=A,
        target=B,
        pi_bar=pi_bar,
        embedding=emb,
        certified_to=check_height,
        notes={"roots_contained": not missing, "missing": missing[:10]},
    )


def _check_real_positive(B: GCM, beta: Sequence[int]) -> None:
    descent = weyl.descend(B, beta)
    if descent.kind != weyl.REAL:
        raise NotRealRoot("Subsystem maps need positive real roots",
                          details={"root": list(beta), "reason": descent.reason or "imaginary"})


@log_computation("functors.make_subsystem_map")
def make_subsystem_map(B: GCM, betas: Sequence[Sequence[int]]) -> Tuple[GCM, GradedLatticeMap]:
    """A = (<beta_j, beta_i^vee>)_{ij} and the map e_i -> e_{beta_i}."""
    betas = tuple(tuple(int(c) for c in beta) for beta in betas)
    if not betas or any(len(beta) != B.rank for beta in betas):
        raise InvalidInput("Each root must have one coefficient per simple root of B",
                           details={"rank": B.rank, "betas": [list(b) for b in betas]})
    for beta in betas:
        _check_real_positive(B, beta)
    if linalg.rank([list(b) for b in betas], B.rank) != len(betas):
        raise InvalidInput("Subsystem roots must be linearly independent",
                           details={"betas": [list(b) for b in betas]})

    # a difference that is not sign-definite is never a root
    checked_to = 0
    for i, bi in enumerate(betas):
        for j, bj in enumerate(betas):
            if i >= j:
                continue
            diff = weyl.sub(bi, bj)
            for candidate in (diff, weyl.scale(-1, diff)):
                if weyl.is_positive(candidate):
                    checked_to = max(checked_to, weyl.height(candidate))
                    if weyl.is_root(B, candidate):
                        raise DifferenceIsRoot(
                            "Difference of two subsystem roots is a root",
                            details={"i": i + 1, "j": j + 1, "difference": list(candidate)},
                        )

    matrix = pairing_matrix(B, betas)
    try:
        A = validate_gcm(matrix)
    except InvalidGCM as e:
        raise NotGCM("Pairing matrix of the subsystem roots is not a GCM",
                     details={"matrix": matrix, "violation": e.code, **e.details}) from e
    logger.info(f"subsystem of {B.log_label()} with betas {[list(b) for b in betas]}: A={matrix}")
    return A, GradedLatticeMap(
        kind=SUBSYSTEM,
        source=A,
        target=B,
        pi_bar=betas,
        betas=betas,
        certified_to=checked_to,
        notes={"difference_check": "descent"},
    )


@log_computation("functors.make_cover_map")
def make_cover_map(A: GCM) -> GradedLatticeMap:
    """e_i -> Σ_r e_{(i,r)} into the simply laced cover of A."""
    cover = simply_laced_cover(A)
    C = cover.cover_gcm
    pi_bar = []
    for i in A.indices:
        image = [0] * C.rank
        for v in cover.block(i):
            image[v] = 1
        pi_bar.append(tuple(image))
    return GradedLatticeMap(kind=COVER, source=A, target=C, pi_bar=tuple(pi_bar), cover=cover)


def compose_subsystem(outer: GradedLatticeMap, inner: GradedLatticeMap) -> GradedLatticeMap:
    """inner: A0 -> A1 and outer: A1 -> B give A0 -> B with betas pushed through outer."""
    if outer.kind != SUBSYSTEM or inner.kind != SUBSYSTEM:
        raise InvalidInput("Only subsystem maps compose into subsystem maps",
                           details={"outer": outer.kind, "inner": inner.kind})
    if inner.target.entries != outer.source.entries:
        raise InvalidInput("Inner target and outer source differ",
                           details={"inner_target": inner.target.rows(), "outer_source": outer.source.rows()})
    betas = [outer.image_degree(beta) for beta in inner.betas]
    A, composite = make_subsystem_map(outer.target, betas)
    if A.entries != inner.source.entries:
        raise RuntimeError(f"composite pairing {A.rows()} differs from {inner.source.rows()}")
    return composite


@log_computation("functors.funny_chain")
def funny_chain(a: int, steps: int) -> Dict:
    """a_{k+1} = a_k (a_k^2 - 3), each step certified by a subsystem map.

    Step k takes B = [[2,-a_k],[-a_k,2]] with beta_1 = s_1 alpha_2 and
    beta_2 = s_2 alpha_1; the pairing <beta_2, beta_1^vee> must be -a_{k+1}.
    """
    if a < 2 or steps < 0:
        raise InvalidInput("Chains start at a >= 2 with a nonnegative step count",
                           details={"a": a, "steps": steps})
    values = [int(a)]
    for _ in range(steps):
        values.append(values[-1] * (values[-1] ** 2 - 3))
    certificates = []
    for k in range(steps):
        ak, nxt = values[k], values[k + 1]
        B = validate_gcm([[2, -ak], [-ak, 2]])
        betas = [(ak, 1), (1, ak)]
        A, _ = make_subsystem_map(B, betas)
        certificates.append({
            "step": k,
            "a_k": ak,
            "betas": [list(b) for b in betas],
            # <beta_1, beta_2^vee> is the (2,1) entry of the subsystem matrix
            "pairing": A[1, 0],
            "expected": -nxt,
            "subsystem_gcm": A.rows(),
            "holds": A[0, 1] == -nxt and A[1, 0] == -nxt,
        })
    return {
        "a": int(a),
        "steps": steps,
        "values": values,
        "certificates": certificates,
        "holds": all(c["holds"] for c in certificates),
        "fixed_point": a == 2,
    }


# ---------- evaluation ----------

class LieImages:
    """Raw images of words and lattice basis vectors of n⁺(A) in a band of B."""

    def __init__(self, gmap: GradedLatticeMap, band: BandContext):
        self.map = gmap
        self.band = band
        self.source_engine = SerreQuotient.for_gcm(gmap.source)
        self._generators: Dict[int, Raw] = {}
        self._words: Dict[Tuple[int, ...], Raw] = {}
        self._atoms: Dict[Tuple, Raw] = {}
        self.key_images: Dict[Tuple, Dict] = {}
        self._lock = threading.RLock()

    def check_degree(self, content: Sequence[int]) -> None:
        height = self.map.image_height(content)
        if height > self.band.N:
            raise BandOverflow(
                f"Image of height {height} exceeds the target bound {self.band.N}",
                details={"degree": list(content), "image_height": height, "N": self.band.N},
            )

    def generator(self, i: int) -> Raw:
        if i not in self._generators:
            gmap = self.map
            engine = self.band.engine
            if gmap.kind == SUBSYSTEM:
                raw = self.band.raw_real_root_vector(gmap.betas[i])
            else:
                raw = {}
                for k, c in enumerate(gmap.pi_bar[i]):
                    if c:
                        raw_add(raw, {engine.unit_atom(k): QQ(1)})
            self._generators[i] = raw
        return self._generators[i]

    def word(self, w: Tuple[int, ...]) -> Raw:
        cached = self._words.get(w)
        if cached is not None:
            return cached
        if len(w) == 1:
            result = self.generator(w[0])
        else:
            u, v = free_lie.standard_factorization(w)
            left = self.word(u)
            result = self.band.raw_bracket(left, self.word(v)) if left else {}
        with self._lock:
            self._words[w] = result
        return result

    def free(self, coords: Dict[Tuple[int, ...], object]) -> Raw:
        """Image of a free Lie element given in Lyndon coordinates."""
        out: Raw = {}
        for w, c in coords.items():
            if c:
                raw_add(out, self.word(w), QQ(c))
        return out

    def atom(self, atom: Tuple) -> Raw:
        cached = self._atoms.get(atom)
        if cached is not None:
            return cached
        _, content, idx = atom
        self.check_degree(content)
        rep = self.source_engine.degree(content).reps[idx]
        result = self.free(rep)
        with self._lock:
            self._atoms[atom] = result
        return result


_IMAGE_CACHE: Dict[Tuple, LieImages] = {}
_IMAGE_LOCK = threading.Lock()


def lie_images(gmap: GradedLatticeMap, band: BandContext) -> LieImages:
    key = (gmap, band.gcm.entries, band.N)
    with _IMAGE_LOCK:
        images = _IMAGE_CACHE.get(key)
        if images is None:
            images = _IMAGE_CACHE[key] = LieImages(gmap, band)
    return images


def _check_contexts(gmap: GradedLatticeMap, source_gcm: GCM, target_gcm: GCM,
                    source_field: ScalarField, target_field: ScalarField) -> None:
    if source_gcm.entries != gmap.source.entries or target_gcm.entries != gmap.target.entries:
        raise InvalidInput("Contexts do not match the map's source and target",
                           details={"source": gmap.source.rows(), "target": gmap.target.rows()})
    if source_field != target_field:
        raise InvalidInput("Source and target contexts must share a field",
                           details={"source": repr(source_field), "target": repr(target_field)})


@log_computation("functors.apply_lie")
def apply_lie(gmap: GradedLatticeMap, band_A: BandContext, band_B: BandContext, x: LieElement) -> LieElement:
    _check_contexts(gmap, band_A.gcm, band_B.gcm, band_A.field, band_B.field)
    images = lie_images(gmap, band_B)
    out: Raw = {}
    for atom, c in x.terms.items():
        if atom[0] != "+":
            raise InvalidInput("Functorial maps act on positive elements", details={"atom": str(atom)})
        band_A._check_height(atom[1])
        raw_add(out, images.atom(atom), band_A.field.lift(c))
    return band_B.from_raw(out, operation="apply_lie", kind=gmap.kind)


def _key_image(images: LieImages, env_A: TruncCtx, env_B: TruncCtx, key) -> Dict:
    """Rational Tits coordinates in 𝒰⁺(B) of the image of one Tits basis vector of A."""
    cached = images.key_images.get(key)
    if cached is not None:
        return cached
    gmap = images.map
    total: PBWElement = {}
    if gmap.image_height(key[0]) <= env_B.N:
        for word, coeff in env_A.tits.to_pbw(key).items():
            product: PBWElement = {(): QQ(1)}
            for letter in word:
                raw = images.atom(("+", letter[1], letter[2]))
                factor: PBWElement = {
                    ((weyl.height(atom[1]), atom[1], atom[2]),): c for atom, c in raw.items()
                }
                product = env_B.pbw.mul(product, factor, env_B.N)
                if not product:
                    break
            add_into(total, product, coeff)
    result = env_B.tits.from_pbw(total)
    images.key_images[key] = result
    return result


@log_computation("functors.apply_group")
def apply_group(gmap: GradedLatticeMap, env_A: TruncCtx, env_B: TruncCtx, g) -> GroupElement:
    """π̂(g) in the target truncation, checked group-like on both ends."""
    _check_contexts(gmap, env_A.gcm, env_B.gcm, env_A.field, env_B.field)
    lowest = gmap.min_generator_height
    if lowest and env_B.N >= (env_A.N + 1) * lowest:
        raise BandOverflow(
            "Target truncation sees images of degrees cut off in the source",
            details={"N_source": env_A.N, "N_target": env_B.N, "min_generator_height": lowest},
            guidance=f"Use a target bound below {(env_A.N + 1) * lowest}.",
        )
    g = env_A.require_grouplike(g)
    images = lie_images(gmap, env_B.band)
    out: Dict = {}
    for key, c in g.series.terms.items():
        if env_A.tits.is_unit(key):
            out[env_B.tits.unit_key] = out.get(env_B.tits.unit_key, 0) + env_A.field.lift(c)
            continue
        lifted = env_A.field.lift(c)
        for k, v in _key_image(images, env_A, env_B, key).items():
            out[k] = out.get(k, 0) + lifted * v
    image = env_B.convert(out, operation="apply_group", kind=gmap.kind)
    return env_B.require_grouplike(image)


def target_bound(gmap: GradedLatticeMap, N: int) -> int:
    """Largest target truncation compatible with source truncation N."""
    lowest = max(gmap.min_generator_height, 1)
    return max(1, min(gmap.target_height(N), (N + 1) * lowest - 1))


def contexts_for(gmap: GradedLatticeMap, N: int, p: int) -> Tuple[TruncCtx, TruncCtx]:
    field = ScalarField.from_char(p)
    return TruncCtx(gmap.source, N, field), TruncCtx(gmap.target, target_bound(gmap, N), field)


# ---------- diagnostics ----------

def _domain(field: ScalarField):
    return linalg.gf(field.p) if field.p else QQ


@log_computation("functors.surjectivity_report")
def surjectivity_report(gmap: GradedLatticeMap, band_A: BandContext, band_B: BandContext) -> Dict:
    """Per target degree, the rank of the image of ⊕ n⁺_A over the preimage degrees."""
    _check_contexts(gmap, band_A.gcm, band_B.gcm, band_A.field, band_B.field)
    if gmap.kind == COVER:
        raise InvalidInput("Cover images are not graded by π̄; surjectivity is reported for the other kinds",
                           details={"kind": gmap.kind})
    images = lie_images(gmap, band_B)
    preimages: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
    for content in contents_up_to(gmap.source.rank, band_A.N):
        target = gmap.image_degree(content)
        if any(target) and weyl.height(target) <= band_B.N and band_A.dim(content):
            preimages.setdefault(target, []).append(content)

    degrees = []
    domain = _domain(band_B.field)
    for gamma, dim in sorted(band_B.dimensions().items(), key=lambda kv: (weyl.height(kv[0]), kv[0])):
        basis = band_B.basis_atoms(gamma)
        rows = []
        for content in preimages.get(gamma, []):
            for atom in band_A.basis_atoms(content):
                image = band_B.from_raw(images.atom(atom))
                rows.append(image.coordinates(basis))
        rank = linalg.rank(rows, len(basis), domain)
        degrees.append({"degree": list(gamma), "dim": dim, "rank": rank, "full": rank == dim})

    root_groups = []
    for alpha in enumerate_roots(gmap.source, band_A.N).real_roots():
        target = gmap.image_degree(alpha)
        if weyl.height(target) > band_B.N:
            continue
        alive = any(target) and not apply_lie(gmap, band_A, band_B, band_A.real_root_vector(alpha)).is_zero()
        root_groups.append({
            "root": list(alpha),
            "image_degree": list(target),
            "image": "root_group" if alive else "trivial",
        })
    return {
        "kind": gmap.kind,
        "N_source": band_A.N,
        "N_target": band_B.N,
        "degrees": degrees,
        "surjective": all(d["full"] for d in degrees),
        "root_groups": root_groups,
    }


@log_computation("functors.minimal_image_report")
def minimal_image_report(gmap: GradedLatticeMap, N: int, p: int) -> Dict:
    """Orders of the real-root-group closure of A, its image under π̂ and the B quotient."""
    source = QuotCtx(gmap.source, N, p)
    target = QuotCtx(gmap.target, target_bound(gmap, N), p)
    U = minimal_U_image(source)
    image = target.closure(
        (apply_group(gmap, source.env, target.env, entry.element) for entry in U.pcgs.entries),
        name="image",
    )
    full = target.full_group()
    return {
        "N_source": source.N,
        "N_target": target.N,
        "char": p,
        "source_minimal_order": U.order,
        "source_order": source.order,
        "image_order": image.order,
        "target_order": full.order,
        "image_is_proper": image.order < full.order,
    }


def _decreased_pairs(gmap: GradedLatticeMap) -> List[Tuple[int, int]]:
    """Pairs (k, l) of A-indices whose entry strictly shrinks, plus dropped indices as (k, k)."""
    A, B, emb = gmap.source, gmap.target, gmap.embedding
    pairs = [(k, k) for k in A.indices if k not in emb]
    for i in B.indices:
        for j in B.indices:
            if i != j and B[i, j] > A[emb[i], emb[j]]:
                pairs.append((emb[i], emb[j]))
    return pairs


@log_computation("functors.kernel_detect")
def kernel_detect(gmap: GradedLatticeMap, band_A: BandContext, band_B: Optional[BandContext] = None) -> List[Dict]:
    """Real roots of A whose root vectors die under π_AB, with certificates.

    The form certificate uses (alpha,alpha)_A = 2 < (π̄alpha,π̄alpha)_B, which
    rules out π̄alpha as a root of B; the rank certificate is the vanishing of
    the image of e_alpha in the band of B.
    """
    if gmap.kind != SURJECTION:
        raise InvalidInput("Kernel detection applies to surjections π_AB", details={"kind": gmap.kind})
    A, B = gmap.source, gmap.target
    if band_B is None:
        band_B = positive_part(B, band_A.N, band_A.field)
    symmetric = A.is_symmetric and B.is_symmetric
    pairs = _decreased_pairs(gmap)
    killed = []
    for alpha in enumerate_roots(A, band_A.N).real_roots():
        supp = set(weyl.support(alpha))
        if not any(k in supp and l in supp for k, l in pairs):
            continue
        image_degree = gmap.image_degree(alpha)
        entry = {"root": list(alpha), "image_degree": list(image_degree)}
        by_form = False
        if symmetric:
            form_A = sym_form(A, alpha, alpha, (1,) * A.rank)
            form_B = sym_form(B, image_degree, image_degree, (1,) * B.rank)
            by_form = form_A < form_B
            entry["form"] = {"A": int(form_A), "B": int(form_B)}
        by_rank = None
        if weyl.height(image_degree) <= band_B.N:
            image = apply_lie(gmap, band_A, band_B, band_A.real_root_vector(alpha))
            by_rank = image.is_zero()
        entry["certificates"] = {"form": by_form if symmetric else None, "rank": by_rank}
        if by_form and by_rank is False:
            raise RuntimeError(f"form and rank certificates disagree at {list(alpha)}")
        if by_form or by_rank:
            killed.append(entry)
    logger.info(f"{len(killed)} killed real roots of {A.log_label()} up to height {band_A.N}")
    return killed


@log_computation("functors.serre_images")
def serre_images(gmap: GradedLatticeMap, band_B: BandContext, skip_beyond: bool = False) -> List[Dict]:
    """Images of the Serre generators x_ij⁺ of the source; all vanish for a well-defined map.

    With ``skip_beyond`` a generator whose image lies above the band is
    reported with ``vanishes: None`` instead of raising BandOverflow.
    """
    A = gmap.source
    images = lie_images(gmap, band_B)
    engine = SerreQuotient.for_gcm(A)
    out = []
    for i in A.indices:
        for j in A.indices:
            if i == j:
                continue
            content = [0] * A.rank
            content[i] += 1 - A[i, j]
            content[j] += 1
            content = tuple(content)
            if skip_beyond and gmap.image_height(content) > band_B.N:
                out.append({"i": i + 1, "j": j + 1, "degree": list(content), "vanishes": None})
                continue
            images.check_degree(content)
            for gen in engine.serre_generators(content):
                image = band_B.from_raw(images.free(gen))
                out.append({"i": i + 1, "j": j + 1, "degree": list(content), "vanishes": image.is_zero()})
    return out
