"""
Free Lie algebra on Lyndon words.

Words are tuples of 0-based letters. ``expand(w)`` is the standard bracketing
P_w written in the free associative algebra; P_w equals w plus strictly
lex-larger words of the same content, so any Lie polynomial is converted to
Lyndon coordinates by repeatedly peeling its lex-least word.
"""
from collections import defaultdict
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple

from sympy import QQ

Word = Tuple[int, ...]
Content = Tuple[int, ...]
Poly = Dict[Word, object]


def duval(alphabet: int, max_length: int) -> Iterator[Word]:
    """All Lyndon words of length <= max_length, in lexicographic order."""
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < max_length:
            w.append(w[-m])
        while w and w[-1] == alphabet - 1:
            w.pop()


@lru_cache(maxsize=None)
def _words_by_content(alphabet: int, length: int) -> Dict[Content, Tuple[Word, ...]]:
    buckets: Dict[Content, List[Word]] = defaultdict(list)
    for w in duval(alphabet, length):
        if len(w) == length:
            buckets[content_of(w, alphabet)].append(w)
    return {c: tuple(ws) for c, ws in buckets.items()}


def content_of(word: Word, alphabet: int) -> Content:
    counts = [0] * alphabet
    for letter in word:
        counts[letter] += 1
    return tuple(counts)


def lyndon_words(content: Content) -> Tuple[Word, ...]:
    """Lyndon words with the given letter multiplicities, lexicographically sorted."""
    length = sum(content)
    if length == 0 or any(c < 0 for c in content):
        return ()
    return _words_by_content(len(content), length).get(tuple(content), ())


def is_lyndon(word: Word) -> bool:
    return len(word) > 0 and all(word < word[i:] for i in range(1, len(word)))


@lru_cache(maxsize=None)
def standard_factorization(word: Word) -> Tuple[Word, Word]:
    """w = uv with v the longest proper Lyndon suffix."""
    for i in range(1, len(word)):
        if is_lyndon(word[i:]):
            return word[:i], word[i:]
    raise ValueError(f"{word} has no standard factorization")


def bracket_tree(word: Word):
    """Nested tuple form of the standard bracketing, for reports."""
    if len(word) == 1:
        return word[0]
    u, v = standard_factorization(word)
    return (bracket_tree(u), bracket_tree(v))


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Dict[Word, object] = defaultdict(int)
    for u, a in p.items():
        for v, b in q.items():
            out[u + v] += a * b
    return {w: c for w, c in out.items() if c != 0}


def poly_commutator(p: Poly, q: Poly) -> Poly:
    out: Dict[Word, object] = defaultdict(int)
    for u, a in p.items():
        for v, b in q.items():
            out[u + v] += a * b
            out[v + u] -= a * b
    return {w: c for w, c in out.items() if c != 0}


@lru_cache(maxsize=None)
def _expand_cached(word: Word) -> Tuple[Tuple[Word, int], ...]:
    if len(word) == 1:
        return ((word, 1),)
    u, v = standard_factorization(word)
    return tuple(sorted(poly_commutator(expand(u), expand(v)).items()))


def expand(word: Word) -> Dict[Word, int]:
    """P_w as a dict word -> integer coefficient."""
    return dict(_expand_cached(word))


def to_lyndon_coords(poly: Poly) -> Dict[Word, object]:
    """Lyndon coordinates of a Lie polynomial (raises if ``poly`` is not Lie)."""
    work = {w: c for w, c in poly.items() if c != 0}
    coords: Dict[Word, object] = {}
    while work:
        lead = min(work)
        c = work[lead]
        if not is_lyndon(lead):
            raise ValueError(f"not a Lie polynomial: leading word {lead} is not Lyndon")
        coords[lead] = c
        for w, a in _expand_cached(lead):
            value = work.get(w, 0) - c * a
            if value == 0:
                work.pop(w, None)
            else:
                work[w] = value
    return coords


def lie_poly(coords: Dict[Word, object]) -> Poly:
    """Inverse of ``to_lyndon_coords``: Σ c_w P_w as an associative polynomial."""
    out: Dict[Word, object] = defaultdict(int)
    for w, c in coords.items():
        for u, a in _expand_cached(w):
            out[u] += c * a
    return {w: c for w, c in out.items() if c != 0}


@lru_cache(maxsize=None)
def _bracket_words_cached(u: Word, v: Word) -> Tuple[Tuple[Word, object], ...]:
    coords = to_lyndon_coords(poly_commutator(expand(u), expand(v)))
    return tuple(sorted(coords.items()))


def bracket_words(u: Word, v: Word) -> Dict[Word, object]:
    """[P_u, P_v] in Lyndon coordinates (integer coefficients)."""
    if u == v:
        return {}
    if u > v:
        return {w: -c for w, c in _bracket_words_cached(v, u)}
    return dict(_bracket_words_cached(u, v))


def bracket(x: Dict[Word, object], y: Dict[Word, object]) -> Dict[Word, object]:
    """Bracket of two free Lie elements given in Lyndon coordinates."""
    out: Dict[Word, object] = defaultdict(lambda: QQ(0))
    for u, a in x.items():
        for v, b in y.items():
            for w, c in bracket_words(u, v).items():
                out[w] += a * b * c
    return {w: c for w, c in out.items() if c != 0}


def derivation_f(k: int, poly: Poly, gcm_row: Tuple[int, ...]) -> Poly:
    """The action of ad f_k on a positive word polynomial of height >= 2.

    Each occurrence of k at position t is deleted and weighted by
    Σ_{s>t} a_{k,w_s}; ``gcm_row`` is row k of the matrix.
    """
    out: Dict[Word, object] = defaultdict(int)
    for w, c in poly.items():
        for t, letter in enumerate(w):
            if letter != k:
                continue
            weight = sum(gcm_row[x] for x in w[t + 1:])
            if weight:
                out[w[:t] + w[t + 1:]] += c * weight
    return {w: c for w, c in out.items() if c != 0}


def witt_dimension(alphabet: int, length: int) -> int:
    """Number of Lyndon words of the given length (counted, not via the formula)."""
    return sum(len(ws) for ws in _words_by_content(alphabet, length).values())
