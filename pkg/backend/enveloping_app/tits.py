"""
The Tits integral form of 𝒰⁺, degree by degree.

In each degree the ℤ-span of the divided-power words
e_{i1}^{(n1)} ⋯ e_{ik}^{(nk)} (consecutive indices distinct) is
Hermite-reduced inside the rational PBW coordinates of that degree. Basis
keys are (content, idx); the constant 1 is ((0, ..., 0), 0).

Structure constants, the coproduct and the antipode have integer entries in
these coordinates, so the same tables serve every prime field, including
primes at or below the truncation height.
"""
import logging
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from sympy import QQ

from exact_app import linalg
from liealg_app.serre import SerreQuotient
from roots_app import weyl

from .pbw import PBWAlgebra, PBWElement, PBWWord, add_into, word_content

logger = logging.getLogger(__name__)

Content = Tuple[int, ...]
Key = Tuple[Content, int]
DividedWord = Tuple[Tuple[int, int], ...]


@dataclass
class TitsDegree:
    content: Content
    monomials: Tuple[PBWWord, ...]
    basis: List[List]                # basis[t][f]: lattice vector t over monomials
    basis_inv: Optional[List[List]]  # None when the lattice is standard
    spanning_words: int

    @property
    def dim(self) -> int:
        return len(self.monomials)


def _as_int(value, what: str) -> int:
    value = QQ.convert(value)
    if value.denominator != 1:
        raise RuntimeError(f"{what} is not integral: {value}")
    return int(value.numerator)


class TitsForm:
    """Integral form of 𝒰⁺(A); get one with ``TitsForm.for_engine(engine)``."""

    def __init__(self, pbw: PBWAlgebra):
        self.pbw = pbw
        self.rank = pbw.rank
        self.zero_content: Content = (0,) * self.rank
        self._degrees: Dict[Content, TitsDegree] = {}
        self._word_values: Dict[DividedWord, PBWElement] = {(): {(): QQ(1)}}
        self._mul_cache: Dict[Tuple[Key, Key], Dict[Key, int]] = {}
        self._coproduct_cache: Dict[Key, Dict[Tuple[Key, Key], int]] = {}
        self._antipode_cache: Dict[Key, Dict[Key, int]] = {}
        self._lock = threading.RLock()

    @classmethod
    def for_engine(cls, engine: SerreQuotient) -> "TitsForm":
        return _tits_for(engine)

    @property
    def unit_key(self) -> Key:
        return (self.zero_content, 0)

    def is_unit(self, key: Key) -> bool:
        return key[0] == self.zero_content

    # ---------- degrees ----------

    def degree(self, content: Content) -> TitsDegree:
        content = tuple(content)
        data = self._degrees.get(content)
        if data is None:
            with self._lock:
                data = self._degrees.get(content)
                if data is None:
                    data = self._build(content)
                    self._degrees[content] = data
        return data

    def dim(self, content: Content) -> int:
        content = tuple(content)
        if content == self.zero_content:
            return 1
        if not weyl.is_positive(content):
            return 0
        return self.degree(content).dim

    def keys(self, content: Content) -> List[Key]:
        content = tuple(content)
        return [(content, t) for t in range(self.dim(content))]

    def divided_power_words(self, content: Content) -> List[DividedWord]:
        out: List[DividedWord] = []

        def extend(remaining: List[int], prefix: List[Tuple[int, int]]):
            if not any(remaining):
                out.append(tuple(prefix))
                return
            last = prefix[-1][0] if prefix else None
            for i in range(self.rank):
                if i == last or remaining[i] == 0:
                    continue
                for n in range(1, remaining[i] + 1):
                    remaining[i] -= n
                    prefix.append((i, n))
                    extend(remaining, prefix)
                    prefix.pop()
                    remaining[i] += n

        extend(list(content), [])
        return out

    def word_value(self, word: DividedWord) -> PBWElement:
        """PBW expansion of a divided-power word over QQ."""
        value = self._word_values.get(word)
        if value is None:
            i, n = word[-1]
            value = self.pbw.mul(self.word_value(word[:-1]), self.pbw.divided_power_simple(i, n))
            with self._lock:
                self._word_values[word] = value
        return value

    def _build(self, content: Content) -> TitsDegree:
        monomials = self.pbw.monomials(content)
        index = {w: f for f, w in enumerate(monomials)}
        words = self.divided_power_words(content)
        generators = []
        for word in words:
            vec = [QQ(0)] * len(monomials)
            for w, c in self.word_value(word).items():
                vec[index[w]] = c
            generators.append(vec)
        basis, standard = linalg.lattice_basis(generators, len(monomials))
        basis_inv = None
        if not standard:
            matrix = [[basis[t][f] for t in range(len(monomials))] for f in range(len(monomials))]
            basis_inv = linalg.inverse(matrix)
        logger.debug(f"Tits degree {content}: {len(monomials)} monomials from {len(words)} words")
        return TitsDegree(content, monomials, basis, basis_inv, len(words))

    # ---------- coordinates ----------

    def to_pbw(self, key: Key) -> PBWElement:
        content, t = key
        if content == self.zero_content:
            return {(): QQ(1)}
        data = self.degree(content)
        return {data.monomials[f]: c for f, c in enumerate(data.basis[t]) if c != 0}

    def coordinates(self, content: Content, vec: PBWElement) -> Dict[int, object]:
        """Tits coordinates of a homogeneous PBW vector of the given content."""
        content = tuple(content)
        if content == self.zero_content:
            value = vec.get((), 0)
            return {0: QQ.convert(value)} if value != 0 else {}
        data = self.degree(content)
        index = {w: f for f, w in enumerate(data.monomials)}
        dense = [QQ(0)] * data.dim
        for w, c in vec.items():
            dense[index[w]] += c
        if data.basis_inv is not None:
            dense = linalg.mat_vec(data.basis_inv, dense)
        return {t: c for t, c in enumerate(dense) if c != 0}

    def from_pbw(self, elem: PBWElement) -> Dict[Key, object]:
        by_content: Dict[Content, PBWElement] = {}
        for w, c in elem.items():
            by_content.setdefault(word_content(w, self.rank), {})[w] = c
        out: Dict[Key, object] = {}
        for content, vec in by_content.items():
            for t, c in self.coordinates(content, vec).items():
                out[(content, t)] = c
        return out

    # ---------- structure constants ----------

    def mul_basis(self, a: Key, b: Key) -> Dict[Key, int]:
        if self.is_unit(a):
            return {b: 1}
        if self.is_unit(b):
            return {a: 1}
        key = (a, b)
        cached = self._mul_cache.get(key)
        if cached is None:
            product = self.pbw.mul(self.to_pbw(a), self.to_pbw(b))
            content = weyl.add(a[0], b[0])
            cached = {(content, t): _as_int(c, f"structure constant {a}*{b}")
                      for t, c in self.coordinates(content, product).items()}
            with self._lock:
                self._mul_cache[key] = cached
        return cached

    def coproduct_basis(self, key: Key) -> Dict[Tuple[Key, Key], int]:
        cached = self._coproduct_cache.get(key)
        if cached is not None:
            return cached
        pairs: Dict[Tuple[PBWWord, PBWWord], object] = {}
        for word, c in self.to_pbw(key).items():
            for pair, m in self.pbw.coproduct_word(word).items():
                value = pairs.get(pair, 0) + c * m
                if value == 0:
                    pairs.pop(pair, None)
                else:
                    pairs[pair] = value
        # right factor first, then the left factor of each right coordinate
        grouped: Dict[Tuple[Content, Content], Dict[PBWWord, PBWElement]] = {}
        for (w1, w2), c in pairs.items():
            contents = (word_content(w1, self.rank), word_content(w2, self.rank))
            grouped.setdefault(contents, {}).setdefault(w1, {})[w2] = c
        out: Dict[Tuple[Key, Key], int] = {}
        for (c1, c2), rows in grouped.items():
            columns: Dict[int, PBWElement] = {}
            for w1, right in rows.items():
                for t, c in self.coordinates(c2, right).items():
                    columns.setdefault(t, {})[w1] = c
            for t, left in columns.items():
                for s, c in self.coordinates(c1, left).items():
                    out[((c1, s), (c2, t))] = _as_int(c, f"coproduct of {key}")
        with self._lock:
            self._coproduct_cache[key] = out
        return out

    def antipode_basis(self, key: Key) -> Dict[Key, int]:
        cached = self._antipode_cache.get(key)
        if cached is not None:
            return cached
        image: PBWElement = {}
        for word, c in self.to_pbw(key).items():
            add_into(image, self.pbw.antipode_word(word), c)
        out = {k: _as_int(c, f"antipode of {key}") for k, c in self.from_pbw(image).items()}
        with self._lock:
            self._antipode_cache[key] = out
        return out

    def cache_sizes(self) -> Dict[str, int]:
        return {
            "degrees": len(self._degrees),
            "products": len(self._mul_cache),
            "coproducts": len(self._coproduct_cache),
        }


@lru_cache(maxsize=64)
def _tits_for(engine: SerreQuotient) -> TitsForm:
    return TitsForm(PBWAlgebra.for_engine(engine))
