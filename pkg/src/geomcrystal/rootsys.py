"""Type A root data and Weyl group combinatorics for SL(n), 2 <= n <= 6.

Vectors of the Cartan subalgebra are length-n arrays with zero sum.  The
simple root alpha_i reads x_i - x_{i+1} and its coroot is e_i - e_{i+1}, so
roots and coroots share the same (a, b) index pair.  Weyl elements are
permutations acting on coordinates: (w x)[w(j)] = x[j].
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, PreconditionError

Word = tuple[int, ...]

MIN_N = 2
MAX_N = 6


@dataclass(frozen=True)
class WeylElt:
    """Permutation of {0..n-1}; perm[j] is the image of j."""

    perm: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, n: int) -> "WeylElt":
        return cls(tuple(range(n)))

    @classmethod
    def longest(cls, n: int) -> "WeylElt":
        return cls(tuple(reversed(range(n))))

    @classmethod
    def simple(cls, n: int, i: int) -> "WeylElt":
        p = list(range(n))
        p[i - 1], p[i] = p[i], p[i - 1]
        return cls(tuple(p))

    @classmethod
    def from_word(cls, n: int, word: Sequence[int]) -> "WeylElt":
        w = cls.identity(n)
        for i in word:
            w = w * cls.simple(n, i)
        return w

    def __mul__(self, other: "WeylElt") -> "WeylElt":
        return WeylElt(tuple(self.perm[j] for j in other.perm))

    def inverse(self) -> "WeylElt":
        inv = [0] * self.n
        for j, wj in enumerate(self.perm):
            inv[wj] = j
        return WeylElt(tuple(inv))

    def length(self) -> int:
        p = self.perm
        return sum(1 for a in range(len(p)) for b in range(a + 1, len(p)) if p[a] > p[b])

    def is_identity(self) -> bool:
        return all(j == wj for j, wj in enumerate(self.perm))

    def act(self, x):
        """Apply w to the last axis of x (a vector or a stack of vectors)."""
        x = np.asarray(x)
        out = np.empty_like(x)
        out[..., list(self.perm)] = x
        return out

    def right_descent(self, i: int) -> bool:
        """True when l(w s_i) < l(w)."""
        return self.perm[i - 1] > self.perm[i]

    def left_descent(self, i: int) -> bool:
        """True when l(s_i w) < l(w)."""
        inv = self.inverse().perm
        return inv[i - 1] > inv[i]


@dataclass(frozen=True)
class Root:
    """Positive root e_a - e_b (a < b) used both as functional and coroot."""

    a: int
    b: int

    def __call__(self, x):
        x = np.asarray(x)
        return x[..., self.a] - x[..., self.b]

    def coroot(self, n: int, dtype=float) -> np.ndarray:
        v = np.zeros(n, dtype=dtype)
        if dtype is object:
            v[:] = Fraction(0)
        v[self.a] += 1
        v[self.b] -= 1
        return v

    def height(self) -> int:
        return self.b - self.a


@dataclass(frozen=True)
class RootSystem:
    n: int
    rank: int
    cartan_matrix: tuple[tuple[int, ...], ...]
    rho_check_exact: tuple[Fraction, ...]
    fundamental_coweights_exact: tuple[tuple[Fraction, ...], ...]
    simple: tuple[Root, ...] = field(repr=False)

    @property
    def rho_check(self) -> np.ndarray:
        return np.array([float(v) for v in self.rho_check_exact])

    def fundamental_coweight(self, i: int) -> np.ndarray:
        return np.array([float(v) for v in self.fundamental_coweights_exact[i - 1]])

    def alpha(self, i: int, x):
        """Simple root alpha_i evaluated on x (last axis)."""
        x = np.asarray(x)
        return x[..., i - 1] - x[..., i]

    def coroot(self, i: int, dtype=float) -> np.ndarray:
        return self.simple[i - 1].coroot(self.n, dtype)

    def star(self, i: int) -> int:
        return self.n - i

    def w0(self) -> WeylElt:
        return WeylElt.longest(self.n)

    def s(self, i: int) -> WeylElt:
        return WeylElt.simple(self.n, i)

    def identity(self) -> WeylElt:
        return WeylElt.identity(self.n)

    def elements(self) -> list[WeylElt]:
        return [WeylElt(p) for p in itertools.permutations(range(self.n))]

    def positive_roots(self) -> list[Root]:
        return [Root(a, b) for a in range(self.n) for b in range(a + 1, self.n)]

    @property
    def m(self) -> int:
        """Length of the longest element."""
        return self.n * (self.n - 1) // 2

    def check_word(self, word: Iterable[int]) -> Word:
        word = tuple(int(i) for i in word)
        for i in word:
            if not 1 <= i <= self.rank:
                raise PreconditionError(f"letter {i} outside 1..{self.rank}")
        return word

    def is_reduced(self, word: Sequence[int]) -> bool:
        word = self.check_word(word)
        return WeylElt.from_word(self.n, word).length() == len(word)

    def check_reduced(self, word: Sequence[int]) -> Word:
        word = self.check_word(word)
        if WeylElt.from_word(self.n, word).length() != len(word):
            raise PreconditionError(f"word {word} is not reduced")
        return word

    def check_w0_word(self, word: Sequence[int]) -> Word:
        word = self.check_reduced(word)
        if len(word) != self.m:
            raise PreconditionError(f"word {word} is not a reduced word of w0")
        return word

    def default_word(self) -> Word:
        """The reduced word (1, 2, 1, 3, 2, 1, ...) of the longest element."""
        return tuple(i for top in range(1, self.n) for i in range(top, 0, -1))

    def reflect(self, i: int, x):
        """s_i x: swap coordinates i and i+1."""
        return self.s(i).act(x)


def build_type_a(n: int) -> RootSystem:
    if not isinstance(n, (int, np.integer)) or not MIN_N <= n <= MAX_N:
        raise ConfigError(f"group size n={n!r} must be an integer in [{MIN_N}, {MAX_N}]")
    n = int(n)
    r = n - 1
    simple = tuple(Root(i, i + 1) for i in range(r))
    cartan = tuple(
        tuple(int(simple[j](simple[i].coroot(n, int))) for j in range(r)) for i in range(r)
    )
    rho = tuple(Fraction(n - 1, 2) - j for j in range(n))
    coweights = tuple(
        tuple(Fraction(n - i, n) if j < i else Fraction(-i, n) for j in range(n))
        for i in range(1, n)
    )
    return RootSystem(n, r, cartan, rho, coweights, simple)


@lru_cache(maxsize=None)
def _reduced_words(perm: tuple[int, ...]) -> frozenset[Word]:
    w = WeylElt(perm)
    if w.is_identity():
        return frozenset({()})
    out = set()
    for i in range(1, w.n):
        if w.right_descent(i):
            shorter = w * WeylElt.simple(w.n, i)
            out.update(word + (i,) for word in _reduced_words(shorter.perm))
    return frozenset(out)


def reduced_words(w: WeylElt) -> set[Word]:
    """All reduced words of w."""
    return set(_reduced_words(w.perm))


def braid_neighbors(word: Sequence[int]) -> set[Word]:
    """Words reachable by a single commutation or length-3 braid move."""
    word = tuple(word)
    out = set()
    for k in range(len(word) - 1):
        a, b = word[k], word[k + 1]
        if abs(a - b) >= 2:
            out.add(word[:k] + (b, a) + word[k + 2:])
    for k in range(len(word) - 2):
        a, b, c = word[k:k + 3]
        if a == c and abs(a - b) == 1:
            out.add(word[:k] + (b, a, b) + word[k + 3:])
    return out


def braid_component(word: Sequence[int]) -> set[Word]:
    """Breadth-first closure of a word under braid moves."""
    start = tuple(word)
    seen = {start}
    queue = deque([start])
    while queue:
        for nb in braid_neighbors(queue.popleft()):
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return seen


def roots_enumeration(rs: RootSystem, word: Sequence[int]) -> list[Root]:
    """beta_k = s_{i_1} ... s_{i_{k-1}} alpha_{i_k} along a reduced word."""
    word = rs.check_reduced(word)
    out = []
    prefix = rs.identity()
    for i in word:
        a, b = prefix.perm[i - 1], prefix.perm[i]
        if a > b:
            raise PreconditionError(f"word {word} is not reduced")
        out.append(Root(a, b))
        prefix = prefix * rs.s(i)
    return out


def inversion_set(w: WeylElt) -> list[Root]:
    """Positive roots beta with w^{-1} beta negative."""
    inv = w.inverse().perm
    return [Root(a, b) for a in range(w.n) for b in range(a + 1, w.n) if inv[a] > inv[b]]


def c_w_constant(rs: RootSystem, w: WeylElt) -> np.ndarray:
    """Closed form w^{-1} sum_{beta in Inv(w)} log(beta(rho)) beta^vee."""
    total = np.zeros(rs.n)
    for beta in inversion_set(w):
        total += math.log(beta.height()) * beta.coroot(rs.n)
    return w.inverse().act(total)


def c_w_recursive(rs: RootSystem, word: Sequence[int]) -> np.ndarray:
    """Constant built letter by letter: c_{u s} = s c_u - alpha^vee log((u alpha)(rho))."""
    word = rs.check_reduced(word)
    c = np.zeros(rs.n)
    u = rs.identity()
    for i in word:
        height = abs(u.perm[i] - u.perm[i - 1])
        c = rs.reflect(i, c) - math.log(height) * rs.coroot(i)
        u = u * rs.s(i)
    return c


def log_slope(rs: RootSystem, w: WeylElt) -> np.ndarray:
    """rho^vee - w^{-1} rho^vee, the log(t) coefficient of a high path of type w."""
    rho = np.array(rs.rho_check_exact, dtype=object)
    return np.array([float(v) for v in rho - w.inverse().act(rho)])


def kumar_sum(rs: RootSystem, word: Sequence[int], lam) -> tuple[np.ndarray, np.ndarray]:
    """(sum alpha_{i_k}(lam) beta_k^vee, sum beta_k(lam) alpha_{i_k}^vee).

    Works exactly when lam holds Fractions.
    """
    lam = np.asarray(lam)
    exact = lam.dtype == object
    dtype = object if exact else float
    betas = roots_enumeration(rs, word)
    first = np.array([Fraction(0)] * rs.n, dtype=object) if exact else np.zeros(rs.n)
    second = first.copy()
    for i, beta in zip(word, betas):
        first = first + rs.alpha(i, lam) * beta.coroot(rs.n, dtype)
        second = second + beta(lam) * rs.coroot(i, dtype)
    return first, second
