"""Single-vertex k-graphs given by permutation families theta.

Generators of color ``i`` are ``e^(i)_0 .. e^(i)_{m_i - 1}``. For ``i < j``
the relation is ``e^(i)_l e^(j)_n = e^(j)_{n'} e^(i)_{l'}`` whenever
``theta[i, j](l, n) = (l', n')``.  Words are tuples of ``(color, index)``
letters; the normal form lists colors in ascending order.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "ThetaKGraph",
    "ThetaError",
    "Word",
    "validate_theta",
    "normal_form",
    "degree",
    "words_of_degree",
    "identity_theta",
]

Letter = tuple[int, int]
Word = tuple[Letter, ...]


class ThetaError(ValueError):
    """Malformed permutation data."""


@dataclass(frozen=True)
class ThetaKGraph:
    k: int
    m: tuple[int, ...]
    theta: Mapping[tuple[int, int], Mapping[tuple[int, int], tuple[int, int]]]

    def __post_init__(self):
        m = tuple(int(x) for x in self.m)
        object.__setattr__(self, "m", m)
        if self.k < 1 or len(m) != self.k or any(x < 1 for x in m):
            raise ThetaError(f"need k >= 1 and k positive edge counts, got k={self.k}, m={m}")
        theta = {}
        for i in range(self.k):
            for j in range(i + 1, self.k):
                perm = dict(self.theta.get((i, j), {}))
                dom = set(product(range(m[i]), range(m[j])))
                for key, val in perm.items():
                    if tuple(key) not in dom or tuple(val) not in dom:
                        raise ThetaError(f"theta[{i + 1},{j + 1}] has pair outside range: {key}->{val}")
                full = {p: tuple(perm.get(p, p)) for p in sorted(dom)}
                if len(set(full.values())) != len(dom):
                    raise ThetaError(f"theta[{i + 1},{j + 1}] is not a bijection")
                theta[(i, j)] = full
        extra = set(self.theta) - set(theta)
        if extra:
            raise ThetaError(f"theta keys must be color pairs i<j, got {sorted(extra)}")
        object.__setattr__(self, "theta", theta)
        inverse = {key: {v: p for p, v in perm.items()} for key, perm in theta.items()}
        object.__setattr__(self, "_inverse", inverse)

    def swap(self, hi: Letter, lo: Letter) -> tuple[Letter, Letter]:
        """Rewrite ``hi lo`` (color hi > color lo) as ``lo' hi'``."""
        (j, n), (i, l) = hi, lo
        lp, np_ = self._inverse[(i, j)][(l, n)]
        return (i, lp), (j, np_)

    def check_word(self, w: Sequence[Letter]) -> Word:
        out = []
        for letter in w:
            c, idx = (int(x) for x in letter)
            if not (0 <= c < self.k and 0 <= idx < self.m[c]):
                raise ValueError(f"invalid letter {letter!r}")
            out.append((c, idx))
        return tuple(out)


def identity_theta(m: Sequence[int]) -> ThetaKGraph:
    return ThetaKGraph(len(m), tuple(m), {})


def _sort(g: ThetaKGraph, w: list[Letter], order: Sequence[int] | None = None,
          rng: np.random.Generator | None = None) -> Word:
    """Bubble the word into color order; ``rng`` picks random inversions."""
    w = list(w)
    while True:
        inv = [p for p in range(len(w) - 1) if w[p][0] > w[p + 1][0]]
        if not inv:
            return tuple(w)
        p = inv[0] if rng is None else inv[int(rng.integers(len(inv)))]
        w[p], w[p + 1] = g.swap(w[p], w[p + 1])


def normal_form(g: ThetaKGraph, w: Sequence[Letter]) -> Word:
    return _sort(g, list(g.check_word(w)))


def degree(w: Sequence[Letter], k: int | None = None) -> tuple[int, ...]:
    if k is None:
        k = 1 + max((c for c, _ in w), default=-1)
    d = [0] * k
    for c, _ in w:
        d[c] += 1
    return tuple(d)


def validate_theta(g: ThetaKGraph, random_words: int = 200, seed: int = 0) -> tuple[bool, str]:
    """Check that rewriting is confluent on every color triple.

    The reversed word ``c b a`` (colors l > j > i) can be sorted by two
    routes; both must agree for every generator triple.  Random words of
    length up to 5 are also sorted with random inversion choices.
    """
    for i, j, l in ((i, j, l) for i in range(g.k) for j in range(i + 1, g.k)
                    for l in range(j + 1, g.k)):
        for a, b, c in product(range(g.m[i]), range(g.m[j]), range(g.m[l])):
            word = [(l, c), (j, b), (i, a)]
            # route 1: swap the left pair first
            x, y = g.swap(word[0], word[1])
            w1 = [x, y, word[2]]
            w1[1], w1[2] = g.swap(w1[1], w1[2])
            w1[0], w1[1] = g.swap(w1[0], w1[1])
            # route 2: swap the right pair first
            x, y = g.swap(word[1], word[2])
            w2 = [word[0], x, y]
            w2[0], w2[1] = g.swap(w2[0], w2[1])
            w2[1], w2[2] = g.swap(w2[1], w2[2])
            if w1 != w2:
                lab = lambda w: " ".join(f"e{cc + 1}_{ii + 1}" for cc, ii in w)
                return False, (f"colors ({i + 1},{j + 1},{l + 1}): {lab(word)} -> {lab(w1)} "
                               f"vs {lab(w2)}")
    rng = np.random.default_rng(seed)
    for _ in range(random_words if g.k >= 3 else 0):
        n = int(rng.integers(1, 6))
        w = [(c := int(rng.integers(g.k)), int(rng.integers(g.m[c]))) for _ in range(n)]
        ref = _sort(g, w)
        if _sort(g, w, rng=rng) != ref:
            return False, f"rewriting of random word {w} is not confluent"
    return True, "consistent"


def words_of_degree(g: ThetaKGraph, n: Sequence[int]) -> list[Word]:
    """Normal-form words of degree n in lexicographic order."""
    n = tuple(int(x) for x in n)
    if len(n) != g.k or any(x < 0 for x in n):
        raise ValueError(f"degree must be a nonnegative {g.k}-vector, got {n}")
    per_color = [list(product(range(g.m[c]), repeat=n[c])) for c in range(g.k)]
    words = []
    for choice in product(*per_color):
        words.append(tuple((c, idx) for c in range(g.k) for idx in choice[c]))
    return words
