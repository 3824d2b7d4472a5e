"""
Rational PBW arithmetic in the enveloping algebra of n⁺.

A letter is a positive lattice basis vector of n⁺, written as the sortable
tuple (height, content, idx); a PBW word is a nondecreasing tuple of
letters. Elements are dicts word -> QQ. Products are straightened with
x_a x_b = x_b x_a + [x_a, x_b], the bracket coming from the Serre engine.
Everything here is homogeneous, so truncation only drops whole products.
"""
import logging
import threading
from functools import lru_cache
from itertools import product
from math import comb, factorial
from typing import Dict, List, Optional, Tuple

from sympy import QQ

from liealg_app.serre import SerreQuotient
from roots_app import weyl

logger = logging.getLogger(__name__)

Letter = Tuple[int, Tuple[int, ...], int]
PBWWord = Tuple[Letter, ...]
PBWElement = Dict[PBWWord, object]


def letter_of(atom) -> Letter:
    return (weyl.height(atom[1]), atom[1], atom[2])


def atom_of(letter: Letter):
    return ("+", letter[1], letter[2])


def word_height(word: PBWWord) -> int:
    return sum(letter[0] for letter in word)


def word_content(word: PBWWord, rank: int) -> Tuple[int, ...]:
    out = [0] * rank
    for letter in word:
        for j, c in enumerate(letter[1]):
            out[j] += c
    return tuple(out)


def add_into(out: PBWElement, elem: PBWElement, scale=1) -> None:
    for w, c in elem.items():
        value = out.get(w, 0) + scale * c
        if value == 0:
            out.pop(w, None)
        else:
            out[w] = value


class PBWAlgebra:
    """Straightening and coproducts for one GCM; use ``PBWAlgebra.for_engine``."""

    def __init__(self, engine: SerreQuotient):
        self.engine = engine
        self.rank = engine.rank
        self._mul_cache: Dict[Tuple[PBWWord, Letter], PBWElement] = {}
        self._lock = threading.RLock()

    @classmethod
    def for_engine(cls, engine: SerreQuotient) -> "PBWAlgebra":
        return _pbw_for(engine)

    def simple_letter(self, i: int) -> Letter:
        return letter_of(self.engine.unit_atom(i))

    def letter_bracket(self, a: Letter, b: Letter) -> PBWElement:
        raw = self.engine.pos_bracket(atom_of(a), atom_of(b))
        return {(letter_of(atom),): c for atom, c in raw.items()}

    # ---------- products ----------

    def mul_letter(self, word: PBWWord, b: Letter) -> PBWElement:
        """word * x_b as a straightened element."""
        if not word or word[-1] <= b:
            return {word + (b,): QQ(1)}
        key = (word, b)
        cached = self._mul_cache.get(key)
        if cached is not None:
            return cached
        a = word[-1]
        head = word[:-1]
        out: PBWElement = {}
        # head x_a x_b = (head x_b) x_a + head [x_a, x_b]
        for w, c in self.mul_letter(head, b).items():
            add_into(out, self.mul_letter(w, a), c)
        for (letter,), c in self.letter_bracket(a, b).items():
            add_into(out, self.mul_letter(head, letter), c)
        with self._lock:
            self._mul_cache[key] = out
        return out

    def mul_element_letter(self, u: PBWElement, b: Letter) -> PBWElement:
        out: PBWElement = {}
        for w, c in u.items():
            add_into(out, self.mul_letter(w, b), c)
        return out

    def mul(self, u: PBWElement, v: PBWElement, N: Optional[int] = None) -> PBWElement:
        out: PBWElement = {}
        for wv, cv in v.items():
            hv = word_height(wv)
            left = {w: c for w, c in u.items() if N is None or word_height(w) + hv <= N}
            if not left:
                continue
            for letter in wv:
                left = self.mul_element_letter(left, letter)
            add_into(out, left, cv)
        return out

    def power(self, u: PBWElement, n: int, N: Optional[int] = None) -> PBWElement:
        out: PBWElement = {(): QQ(1)}
        for _ in range(n):
            out = self.mul(out, u, N)
        return out

    def divided_power_simple(self, i: int, n: int) -> PBWElement:
        """e_i^(n) = e_i^n / n!."""
        return {(self.simple_letter(i),) * n: QQ(1, factorial(n))}

    # ---------- Hopf structure ----------

    @staticmethod
    def coproduct_word(word: PBWWord) -> Dict[Tuple[PBWWord, PBWWord], int]:
        """∇ of a PBW word; letters are primitive, so runs split binomially."""
        runs: List[Tuple[Letter, int]] = []
        for letter in word:
            if runs and runs[-1][0] == letter:
                runs[-1] = (letter, runs[-1][1] + 1)
            else:
                runs.append((letter, 1))
        out: Dict[Tuple[PBWWord, PBWWord], int] = {}
        for split in product(*(range(k + 1) for _, k in runs)):
            left: List[Letter] = []
            right: List[Letter] = []
            coeff = 1
            for (letter, k), j in zip(runs, split):
                left.extend([letter] * j)
                right.extend([letter] * (k - j))
                coeff *= comb(k, j)
            out[(tuple(left), tuple(right))] = coeff
        return out

    def antipode_word(self, word: PBWWord) -> PBWElement:
        """τ(x_1 ... x_k) = (-1)^k x_k ... x_1."""
        out: PBWElement = {(): QQ((-1) ** len(word))}
        for letter in reversed(word):
            out = self.mul_element_letter(out, letter)
        return out

    def monomials(self, content: Tuple[int, ...]) -> Tuple[PBWWord, ...]:
        return _monomials(self, tuple(content))

    def letters_below(self, content: Tuple[int, ...]) -> List[Letter]:
        """Letters whose content is componentwise <= ``content``."""
        out = []
        for sub in _sub_contents(tuple(content)):
            for t in range(self.engine.dim(sub)):
                out.append((weyl.height(sub), sub, t))
        return sorted(out)


def _sub_contents(content: Tuple[int, ...]):
    for sub in product(*(range(c + 1) for c in content)):
        if any(sub):
            yield sub


@lru_cache(maxsize=4096)
def _monomials(algebra: PBWAlgebra, content: Tuple[int, ...]) -> Tuple[PBWWord, ...]:
    letters = algebra.letters_below(content)
    out: List[PBWWord] = []

    def extend(start: int, remaining: Tuple[int, ...], prefix: List[Letter]):
        if not any(remaining):
            out.append(tuple(prefix))
            return
        for k in range(start, len(letters)):
            letter = letters[k]
            rest = tuple(r - c for r, c in zip(remaining, letter[1]))
            if min(rest) < 0:
                continue
            prefix.append(letter)
            extend(k, rest, prefix)
            prefix.pop()

    extend(0, content, [])
    return tuple(sorted(out))


@lru_cache(maxsize=64)
def _pbw_for(engine: SerreQuotient) -> PBWAlgebra:
    return PBWAlgebra(engine)
