"""
Lazy Serre-quotient engine for one GCM.

For each content (degree) the engine computes, on first use:

  - the Lyndon words of that content (a basis of the free Lie algebra ñ⁺),
  - the Serre ideal ĩ in RREF over QQ, from the generators x_ij⁺ of that
    degree plus [e_k, ĩ_{α-α_k}],
  - the quotient n⁺_α, coordinatised by the non-pivot Lyndon words,
  - the working lattice: the Z-span of the images of all Lyndon brackets
    (the Lie ring generated by the e_i), Hermite-reduced.

Elements of the full algebra are handled as raw dicts of atoms with QQ
coefficients:

  ("+", content, idx)   idx-th lattice basis vector of n⁺_content
  ("h", i)              the simple coroot alpha_i^vee
  ("-", content, idx)   the image of ("+", content, idx) under ω

where ω swaps e_i and f_i and negates the Cartan part. The sign
convention is [e_i, f_j] = -δ_ij alpha_i^vee.

Raw brackets are cached per engine and are independent of any height bound;
band checks live in ``BandContext``.
"""
import logging
import threading
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from sympy import QQ

from cartan_app.models import GCM
from exact_app import linalg
from roots_app import weyl

from . import free_lie
from .free_lie import Content, Word

logger = logging.getLogger(__name__)

Atom = Tuple
Raw = Dict[Atom, object]


@dataclass
class DegreeData:
    content: Content
    words: Tuple[Word, ...]
    ideal_rows: List[List]          # RREF rows over all words
    pivots: Tuple[int, ...]
    free: Tuple[int, ...]
    basis: List[List]               # basis[t][f]: lattice vectors over free coordinates
    basis_inv: Optional[List[List]]  # None when the lattice is standard
    standard: bool
    reps: List[Dict[Word, object]]  # Lyndon coordinates of each basis vector
    relations: int = 0              # minimal relations: ideal dim minus dim [ñ_1, ĩ_lower]

    @property
    def dim(self) -> int:
        return len(self.free)

    @property
    def ideal_dim(self) -> int:
        return len(self.pivots)

    @property
    def free_dim(self) -> int:
        return len(self.words)


def raw_add(out: Raw, raw: Raw, scale=1) -> None:
    for atom, c in raw.items():
        value = out.get(atom, 0) + scale * c
        if value == 0:
            out.pop(atom, None)
        else:
            out[atom] = value


def raw_scale(raw: Raw, c) -> Raw:
    if c == 0:
        return {}
    return {a: c * v for a, v in raw.items()}


def mirror_atom(atom: Atom) -> Tuple[Atom, int]:
    if atom[0] == "+":
        return ("-",) + atom[1:], 1
    if atom[0] == "-":
        return ("+",) + atom[1:], 1
    return atom, -1


def mirror(raw: Raw) -> Raw:
    """Apply the Chevalley involution ω."""
    out: Raw = {}
    for atom, c in raw.items():
        image, sign = mirror_atom(atom)
        out[image] = sign * c
    return out


def atom_degree(atom: Atom, rank: int) -> Tuple[int, ...]:
    if atom[0] == "+":
        return atom[1]
    if atom[0] == "-":
        return tuple(-c for c in atom[1])
    return (0,) * rank


class SerreQuotient:
    """Per-GCM engine; get one with ``SerreQuotient.for_gcm(A)``."""

    def __init__(self, gcm: GCM):
        self.gcm = gcm
        self.rank = gcm.rank
        self._degrees: Dict[Content, DegreeData] = {}
        self._pos_cache: Dict[Tuple, Raw] = {}
        self._atom_cache: Dict[Tuple, Raw] = {}
        self._neg_word_cache: Dict[Tuple, Raw] = {}
        self._f_cache: Dict[Tuple, Raw] = {}
        self._lock = threading.RLock()

    @classmethod
    def for_gcm(cls, gcm: GCM) -> "SerreQuotient":
        return _engine_for(gcm.entries)

    # ---------- degree data ----------

    def degree(self, content: Content) -> DegreeData:
        content = tuple(content)
        data = self._degrees.get(content)
        if data is None:
            with self._lock:
                data = self._degrees.get(content)
                if data is None:
                    data = self._build_degree(content)
                    self._degrees[content] = data
        return data

    def dim(self, content: Content) -> int:
        if not weyl.is_positive(content):
            return 0
        return self.degree(content).dim

    def relation_count(self, content: Content) -> int:
        if not weyl.is_positive(content):
            return 0
        return self.degree(content).relations

    def serre_generators(self, content: Content) -> List[Dict[Word, object]]:
        gens = []
        A = self.gcm
        for i in A.indices:
            for j in A.indices:
                if i == j:
                    continue
                power = 1 - A[i, j]
                deg = [0] * self.rank
                deg[i] += power
                deg[j] += 1
                if tuple(deg) != content:
                    continue
                x: Dict[Word, object] = {(j,): QQ(1)}
                for _ in range(power):
                    x = free_lie.bracket({(i,): QQ(1)}, x)
                if x:
                    gens.append(x)
        return gens

    def _build_degree(self, content: Content) -> DegreeData:
        words = free_lie.lyndon_words(content)
        index = {w: c for c, w in enumerate(words)}
        generators = []
        for k in range(self.rank):
            if content[k] == 0 or weyl.height(content) == 1:
                continue
            lower = tuple(c - (1 if t == k else 0) for t, c in enumerate(content))
            lower_data = self.degree(lower)
            for row in lower_data.ideal_rows:
                vec = {lower_data.words[c]: v for c, v in enumerate(row) if v != 0}
                image = free_lie.bracket({(k,): QQ(1)}, vec)
                if image:
                    generators.append(image)
        lifted_count = len(generators)
        generators.extend(self.serre_generators(content))

        ncols = len(words)
        rows = [[QQ(0)] * ncols for _ in generators]
        for r, gen in enumerate(generators):
            for w, c in gen.items():
                rows[r][index[w]] = QQ(c)
        ideal_rows, pivots = linalg.rref_rows(rows, ncols) if rows else ([], ())
        relations = len(pivots) - linalg.rank(rows[:lifted_count], ncols)
        pivot_set = set(pivots)
        free = tuple(c for c in range(ncols) if c not in pivot_set)

        images = []
        for c in range(ncols):
            images.append(self._reduce_to_free({c: QQ(1)}, ideal_rows, pivots, free))
        if free:
            basis, standard = linalg.lattice_basis(images, len(free))
        else:
            basis, standard = [], True
        basis_inv = None
        if free and not standard:
            matrix = [[basis[t][f] for t in range(len(free))] for f in range(len(free))]
            basis_inv = linalg.inverse(matrix)
        reps = [
            {words[free[f]]: basis[t][f] for f in range(len(free)) if basis[t][f] != 0}
            for t in range(len(free))
        ]
        if ideal_rows or not standard:
            logger.debug(
                f"degree {content}: free {ncols}, ideal {len(pivots)}, quotient {len(free)}, "
                f"lattice {'standard' if standard else 'refined'}"
            )
        return DegreeData(content, words, ideal_rows, tuple(pivots), free, basis, basis_inv, standard, reps,
                          relations)

    @staticmethod
    def _reduce_to_free(vec: Dict[int, object], ideal_rows, pivots, free) -> List:
        out = [vec.get(c, QQ(0)) for c in free]
        for r, p in enumerate(pivots):
            coeff = vec.get(p, 0)
            if coeff == 0:
                continue
            row = ideal_rows[r]
            for f, c in enumerate(free):
                if row[c] != 0:
                    out[f] -= coeff * row[c]
        return out

    def project(self, content: Content, coords: Dict[Word, object]) -> Dict[int, object]:
        """Lattice coordinates in n⁺_content of a free Lie element given in Lyndon coordinates."""
        if not coords or not weyl.is_positive(content):
            return {}
        data = self.degree(content)
        if not data.dim:
            return {}
        index = {w: c for c, w in enumerate(data.words)}
        vec = {index[w]: QQ(c) for w, c in coords.items() if c != 0}
        reduced = self._reduce_to_free(vec, data.ideal_rows, data.pivots, data.free)
        if data.basis_inv is not None:
            reduced = linalg.mat_vec(data.basis_inv, reduced)
        return {t: c for t, c in enumerate(reduced) if c != 0}

    def unit_atom(self, i: int) -> Atom:
        return ("+", weyl.unit(self.rank, i), 0)

    # ---------- raw brackets ----------

    def pos_bracket(self, a: Atom, b: Atom) -> Raw:
        """[a, b] for two positive lattice basis vectors."""
        key = (a, b)
        cached = self._pos_cache.get(key)
        if cached is not None:
            return cached
        alpha, s = a[1], a[2]
        beta, t = b[1], b[2]
        gamma = weyl.add(alpha, beta)
        if not weyl.is_root(self.gcm, gamma):
            result: Raw = {}
        else:
            x = self.degree(alpha).reps[s]
            y = self.degree(beta).reps[t]
            coords = free_lie.bracket(x, y)
            result = {("+", gamma, idx): c for idx, c in self.project(gamma, coords).items()}
        self._pos_cache[key] = result
        return result

    def f_on_pos(self, k: int, atom: Atom) -> Raw:
        """[f_k, b] for a positive lattice basis vector b."""
        key = (k, atom)
        cached = self._f_cache.get(key)
        if cached is not None:
            return cached
        alpha, s = atom[1], atom[2]
        if alpha == weyl.unit(self.rank, k):
            result: Raw = {("h", k): QQ(1)}
        else:
            target = tuple(c - (1 if j == k else 0) for j, c in enumerate(alpha))
            if not weyl.is_positive(target) or not weyl.is_root(self.gcm, target):
                result = {}
            else:
                poly = free_lie.lie_poly(self.degree(alpha).reps[s])
                image = free_lie.derivation_f(k, poly, self.gcm.entries[k])
                coords = free_lie.to_lyndon_coords(image)
                result = {("+", target, idx): c for idx, c in self.project(target, coords).items()}
        self._f_cache[key] = result
        return result

    def neg_word_on(self, word: Word, atom: Atom) -> Raw:
        """[ω P_word, atom], unfolding the standard bracketing of ``word``."""
        key = (word, atom)
        cached = self._neg_word_cache.get(key)
        if cached is not None:
            return cached
        if len(word) == 1:
            k = word[0]
            if atom[0] == "+":
                result = self.f_on_pos(k, atom)
            elif atom[0] == "h":
                # [f_k, alpha_i^vee] = a_ik f_k
                coeff = self.gcm[atom[1], k]
                result = {("-", weyl.unit(self.rank, k), 0): QQ(coeff)} if coeff else {}
            else:
                # [f_k, ωy] = ω[e_k, y]
                result = mirror(self.pos_bracket(self.unit_atom(k), ("+",) + atom[1:]))
        else:
            u, v = free_lie.standard_factorization(word)
            result = {}
            raw_add(result, self.neg_word_on_raw(u, self.neg_word_on(v, atom)))
            raw_add(result, self.neg_word_on_raw(v, self.neg_word_on(u, atom)), -1)
        self._neg_word_cache[key] = result
        return result

    def neg_word_on_raw(self, word: Word, raw: Raw) -> Raw:
        out: Raw = {}
        for atom, c in raw.items():
            raw_add(out, self.neg_word_on(word, atom), c)
        return out

    def bracket_atoms(self, a: Atom, b: Atom) -> Raw:
        key = (a, b)
        cached = self._atom_cache.get(key)
        if cached is not None:
            return cached
        ka, kb = a[0], b[0]
        if ka == "+" and kb == "+":
            result = self.pos_bracket(a, b)
        elif ka == "-" and kb == "-":
            result = mirror(self.pos_bracket(mirror_atom(a)[0], mirror_atom(b)[0]))
        elif ka == "h" and kb == "h":
            result = {}
        elif ka == "h":
            pairing = weyl.coroot_pairing(self.gcm, b[1], a[1])
            if kb == "-":
                pairing = -pairing
            result = {b: QQ(pairing)} if pairing else {}
        elif kb == "h":
            result = raw_scale(self.bracket_atoms(b, a), -1)
        elif ka == "+":
            result = self._mixed(a, b)
        else:
            result = raw_scale(self._mixed(b, a), -1)
        self._atom_cache[key] = result
        return result

    def _mixed(self, x: Atom, wy: Atom) -> Raw:
        """[x, ωy] for positive x and negative ωy; unfold the lower operand."""
        alpha, beta = x[1], wy[1]
        out: Raw = {}
        if weyl.height(beta) <= weyl.height(alpha):
            # [x, ωy] = -[ωy, x]
            for w, c in self.degree(beta).reps[wy[2]].items():
                raw_add(out, self.neg_word_on(w, x), -c)
        else:
            # [x, ωy] = -ω[y, ωx] = ω Σ x_w [ω P_w, y]
            y = ("+", beta, wy[2])
            inner: Raw = {}
            for w, c in self.degree(alpha).reps[x[2]].items():
                raw_add(inner, self.neg_word_on(w, y), c)
            out = mirror(inner)
        return out

    def bracket_raw(self, x: Raw, y: Raw) -> Raw:
        out: Raw = {}
        for a, ca in x.items():
            for b, cb in y.items():
                raw_add(out, self.bracket_atoms(a, b), ca * cb)
        return out

    def cache_sizes(self) -> Dict[str, int]:
        return {
            "degrees": len(self._degrees),
            "positive_brackets": len(self._pos_cache),
            "atom_brackets": len(self._atom_cache),
        }


@lru_cache(maxsize=64)
def _engine_for(entries: Tuple[Tuple[int, ...], ...]) -> SerreQuotient:
    labels = tuple(str(i + 1) for i in range(len(entries)))
    return SerreQuotient(GCM(labels, entries))


def free_lie_dims(gcm_rank: int, height: int) -> int:
    return free_lie.witt_dimension(gcm_rank, height)


def contents_up_to(rank: int, max_height: int):
    for n in range(1, max_height + 1):
        yield from weyl.contents_of_height(rank, n)


def degree_summary(engine: SerreQuotient, max_height: int) -> Dict[int, Dict[str, int]]:
    """Per height: dimensions of ñ⁺, ĩ and n⁺."""
    out: Dict[int, Dict[str, int]] = defaultdict(lambda: {"free": 0, "ideal": 0, "quotient": 0})
    for content in contents_up_to(engine.rank, max_height):
        data = engine.degree(content)
        n = weyl.height(content)
        out[n]["free"] += data.free_dim
        out[n]["ideal"] += data.ideal_dim
        out[n]["quotient"] += data.dim
    return dict(out)
