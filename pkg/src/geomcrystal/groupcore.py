"""SL(n) matrices over two scalar backends.

A matrix with dtype=object holds Fractions (exact backend); anything else is
treated as float64.  Every routine preserves the backend of its input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import NotInBigCell, NotTotallyPositive, PreconditionError
from .rootsys import RootSystem, WeylElt, build_type_a

MINOR_RTOL = 1e-12


def is_exact(g) -> bool:
    return np.asarray(g).dtype == object


def _want_exact(*scalars) -> bool:
    return all(isinstance(s, Rational) for s in scalars)


def identity(n: int, exact: bool = False) -> np.ndarray:
    if exact:
        out = np.full((n, n), Fraction(0), dtype=object)
        for k in range(n):
            out[k, k] = Fraction(1)
        return out
    return np.eye(n)


def to_exact(g) -> np.ndarray:
    g = np.asarray(g)
    out = np.empty(g.shape, dtype=object)
    for idx, v in np.ndenumerate(g):
        out[idx] = Fraction(v)
    return out


def to_float(g) -> np.ndarray:
    return np.asarray(g, dtype=float)


def mul(*mats) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return out


def chevalley_x(n: int, i: int, t, exact: bool | None = None) -> np.ndarray:
    """x_i(t) = I + t E_{i,i+1}."""
    _check_index(n, i)
    exact = _want_exact(t) if exact is None else exact
    g = identity(n, exact)
    g[i - 1, i] = Fraction(t) if exact else float(t)
    return g


def chevalley_y(n: int, i: int, t, exact: bool | None = None) -> np.ndarray:
    """y_i(t) = I + t E_{i+1,i}."""
    _check_index(n, i)
    exact = _want_exact(t) if exact is None else exact
    g = identity(n, exact)
    g[i, i - 1] = Fraction(t) if exact else float(t)
    return g


def coroot_power(n: int, i: int, c, exact: bool | None = None) -> np.ndarray:
    """c^{h_i}: diag with c at position i and 1/c at position i+1."""
    _check_index(n, i)
    exact = _want_exact(c) if exact is None else exact
    g = identity(n, exact)
    c = Fraction(c) if exact else float(c)
    g[i - 1, i - 1] = c
    g[i, i] = 1 / c
    return g


def x_minus(n: int, i: int, c, exact: bool | None = None) -> np.ndarray:
    """x_{-i}(c) = y_i(c) c^{-h_i}."""
    exact = _want_exact(c) if exact is None else exact
    return chevalley_y(n, i, c, exact) @ coroot_power(n, i, 1 / (Fraction(c) if exact else float(c)), exact)


def x_word(n: int, word: Sequence[int], params: Sequence, exact: bool | None = None) -> np.ndarray:
    """x_{i_1}(t_1) ... x_{i_m}(t_m)."""
    exact = _want_exact(*params) if exact is None else exact
    g = identity(n, exact)
    for i, t in zip(word, params):
        g = g @ chevalley_x(n, i, t, exact)
    return g


def x_minus_word(n: int, word: Sequence[int], params: Sequence, exact: bool | None = None) -> np.ndarray:
    """x_{-i_1}(c_1) ... x_{-i_m}(c_m)."""
    exact = _want_exact(*params) if exact is None else exact
    g = identity(n, exact)
    for i, c in zip(word, params):
        g = g @ x_minus(n, i, c, exact)
    return g


def exp_cartan(v) -> np.ndarray:
    return np.diag(np.exp(np.asarray(v, dtype=float)))


def torus(entries) -> np.ndarray:
    """Diagonal matrix from explicit entries (exact when they are Fractions)."""
    entries = list(entries)
    exact = _want_exact(*entries)
    n = len(entries)
    g = identity(n, exact)
    for k, e in enumerate(entries):
        g[k, k] = Fraction(e) if exact else float(e)
    return g


def weyl_rep(w: WeylElt, exact: bool = False) -> np.ndarray:
    """w-bar: product of s-bar_i = [[0,-1],[1,0]] blocks along a reduced word."""
    return _signed_perm(w, exact, inverse_blocks=False)


def weyl_rep_bb(w: WeylElt, exact: bool = False) -> np.ndarray:
    """The second representative: product of s-bar_i^{-1} along a reduced word."""
    return _signed_perm(w, exact, inverse_blocks=True)


def _signed_perm(w: WeylElt, exact: bool, inverse_blocks: bool) -> np.ndarray:
    n = w.n
    g = identity(n, exact)
    word = _some_reduced_word(w)
    for i in word:
        s = identity(n, exact)
        one = Fraction(1) if exact else 1.0
        s[i - 1, i - 1] = one - one
        s[i, i] = one - one
        s[i, i - 1] = -one if inverse_blocks else one
        s[i - 1, i] = one if inverse_blocks else -one
        g = g @ s
    return g


def _some_reduced_word(w: WeylElt) -> tuple[int, ...]:
    word = []
    cur = w
    while not cur.is_identity():
        for i in range(1, w.n):
            if cur.right_descent(i):
                word.append(i)
                cur = cur * WeylElt.simple(w.n, i)
                break
    return tuple(reversed(word))


def det(g) -> object:
    g = np.asarray(g)
    if g.shape[0] == 0:
        return Fraction(1) if is_exact(g) else 1.0
    if not is_exact(g):
        return float(np.linalg.det(g))
    m = g.copy()
    n = m.shape[0]
    out = Fraction(1)
    for k in range(n):
        piv = next((r for r in range(k, n) if m[r, k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            m[[k, piv]] = m[[piv, k]]
            out = -out
        out *= m[k, k]
        for r in range(k + 1, n):
            f = m[r, k] / m[k, k]
            if f != 0:
                m[r, k:] = m[r, k:] - f * m[k, k:]
    return out


def inverse(g) -> np.ndarray:
    g = np.asarray(g)
    if not is_exact(g):
        return np.linalg.inv(g)
    n = g.shape[0]
    aug = np.concatenate([g.copy(), identity(n, True)], axis=1)
    for k in range(n):
        piv = next((r for r in range(k, n) if aug[r, k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        if piv != k:
            aug[[k, piv]] = aug[[piv, k]]
        aug[k] = aug[k] / aug[k, k]
        for r in range(n):
            if r != k and aug[r, k] != 0:
                aug[r] = aug[r] - aug[r, k] * aug[k]
    return aug[:, n:]


@dataclass(frozen=True)
class GaussTriple:
    n_part: np.ndarray
    a_part: np.ndarray
    u_part: np.ndarray

    @property
    def lower0(self) -> np.ndarray:
        return self.n_part @ self.a_part

    @property
    def upper0(self) -> np.ndarray:
        return self.a_part @ self.u_part

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.a_part).copy()


def gauss_decompose(g) -> GaussTriple:
    """g = n a u with n lower unitriangular, a diagonal, u upper unitriangular."""
    g = np.asarray(g)
    exact = is_exact(g)
    if not exact:
        g = g.astype(float)
    n = g.shape[0]
    work = g.copy()
    low = identity(n, exact)
    scale = max(float(np.max(np.abs(g.astype(float)))), 1e-300) if not exact else None
    minor = Fraction(1) if exact else 1.0
    for k in range(n):
        piv = work[k, k]
        minor = minor * piv
        if exact:
            if piv == 0:
                raise NotInBigCell(k + 1)
        elif not abs(minor) > MINOR_RTOL * scale ** (k + 1):
            raise NotInBigCell(k + 1)
        for r in range(k + 1, n):
            f = work[r, k] / piv
            low[r, k] = f
            work[r, k:] = work[r, k:] - f * work[k, k:]
            work[r, k] = 0 * work[r, k]
    d = np.array([work[k, k] for k in range(n)], dtype=object if exact else float)
    a = identity(n, exact)
    up = identity(n, exact)
    for k in range(n):
        a[k, k] = d[k]
        for c in range(k + 1, n):
            up[k, c] = work[k, c] / d[k]
    return GaussTriple(low, a, up)


def part_minus(g) -> np.ndarray:
    return gauss_decompose(g).n_part


def part_zero(g) -> np.ndarray:
    return gauss_decompose(g).a_part


def part_plus(g) -> np.ndarray:
    return gauss_decompose(g).u_part


def part_minus_zero(g) -> np.ndarray:
    return gauss_decompose(g).lower0


def part_zero_plus(g) -> np.ndarray:
    return gauss_decompose(g).upper0


def minor(g, rows: Sequence[int], cols: Sequence[int]):
    g = np.asarray(g)
    return det(g[np.ix_(list(rows), list(cols))])


def minor_principal(g, i: int):
    """Leading i x i minor, Delta^{omega_i}."""
    return minor(g, range(i), range(i))


def minor_generalized(g, u: WeylElt, v: WeylElt, i: int):
    """Delta_{u omega_i, v omega_i}(g) = Delta^{omega_i}(u-bar^{-1} g v-bar)."""
    exact = is_exact(g)
    ubar_inv = inverse(weyl_rep(u, exact))
    return minor_principal(ubar_inv @ np.asarray(g) @ weyl_rep(v, exact), i)


def generalized_minors_N(x) -> dict[tuple[tuple[int, ...], int], object]:
    """All Delta_{w omega_i, omega_i}(x), keyed by (w.perm, i)."""
    x = np.asarray(x)
    n = x.shape[0]
    rs = build_type_a(n)
    ident = rs.identity()
    out = {}
    for w in rs.elements():
        for i in range(1, n):
            out[(w.perm, i)] = minor_generalized(x, w, ident, i)
    return out


def is_totally_positive_N(x, tol: float = 0.0) -> bool:
    """Total positivity test for a lower unitriangular matrix."""
    x = np.asarray(x)
    if not _is_lower_unitriangular(x):
        raise PreconditionError("expected a lower unitriangular matrix")
    return all(v > tol for v in generalized_minors_N(x).values())


def _is_lower_unitriangular(x, atol: float = 1e-12) -> bool:
    n = x.shape[0]
    for r in range(n):
        for c in range(n):
            target = 1 if r == c else 0
            if c >= r and abs(float(x[r, c]) - target) > (0 if is_exact(x) else atol):
                return False
    return True


def sign_matrix(n: int, exact: bool = False) -> np.ndarray:
    """D = diag(+1, -1, +1, ...)."""
    d = identity(n, exact)
    for k in range(1, n, 2):
        d[k, k] = -d[k, k]
    return d


def involution_transpose(g) -> np.ndarray:
    return np.asarray(g).T.copy()


def involution_iota(g) -> np.ndarray:
    """Kashiwara involution D g^{-1} D; fixes x_i(t), y_i(t) and inverts the torus."""
    g = np.asarray(g)
    d = sign_matrix(g.shape[0], is_exact(g))
    return d @ inverse(g) @ d


def involution_schutz(g) -> np.ndarray:
    """Schutzenberger involution w0-bar D g^T D w0-bar^{-1}."""
    g = np.asarray(g)
    n = g.shape[0]
    exact = is_exact(g)
    w0 = weyl_rep(WeylElt.longest(n), exact)
    d = sign_matrix(n, exact)
    return w0 @ d @ g.T @ d @ inverse(w0)


def t_of_w(w: WeylElt, exact: bool = False) -> np.ndarray:
    """w-bar times (w^{-1})-bar, a diagonal matrix of signs."""
    return weyl_rep(w, exact) @ weyl_rep(w.inverse(), exact)


def factor_upper(u, word: Sequence[int]) -> list:
    """Parameters t with u = x_{i_1}(t_1) ... x_{i_m}(t_m) along a reduced word.

    Each step peels the leftmost factor: for u in the cell of w = s_i v the
    ratio Delta_{R,C}(u) / Delta_{s_i R, C}(u), with C the last j columns and
    R = w(C), equals the parameter since the numerator vanishes on the cell
    of v.
    """
    u = np.asarray(u)
    exact = is_exact(u)
    n = u.shape[0]
    word = tuple(word)
    w = WeylElt.from_word(n, word)
    if w.length() != len(word):
        raise PreconditionError(f"word {word} is not reduced")
    params = []
    cur = u.copy()
    for i in word:
        winv = w.inverse().perm
        pos = winv[i - 1]
        cols = list(range(pos, n))
        rows = sorted(w.perm[q] for q in cols)
        rows_swapped = sorted(i if r == i - 1 else r for r in rows)
        den = minor(cur, rows_swapped, cols)
        num = minor(cur, rows, cols)
        if (exact and den == 0) or (not exact and abs(den) == 0):
            raise NotTotallyPositive(f"vanishing denominator while peeling letter {i}")
        t = num / den
        if not t > 0:
            raise NotTotallyPositive(f"non-positive parameter {float(t):.6g} for letter {i}")
        params.append(t)
        cur = chevalley_x(n, i, -t, exact) @ cur
        w = WeylElt.simple(n, i) * w
    resid = cur - identity(n, exact)
    if exact:
        if any(v != 0 for v in resid.flat):
            raise NotTotallyPositive("matrix does not factor along the given word")
    elif np.max(np.abs(resid.astype(float))) > 1e-7 * max(1.0, float(np.max(np.abs(u.astype(float))))):
        raise NotTotallyPositive("matrix does not factor along the given word")
    return params


def _check_index(n: int, i: int) -> None:
    if not 1 <= i <= n - 1:
        raise PreconditionError(f"index {i} outside 1..{n - 1}")


def principal_minors_batch(stack: np.ndarray) -> np.ndarray:
    """Leading principal minors 1..n of a float stack (..., n, n)."""
    stack = np.asarray(stack, dtype=float)
    n = stack.shape[-1]
    return np.stack([np.linalg.det(stack[..., :i, :i]) for i in range(1, n + 1)], axis=-1)


def rootsystem_of(g) -> RootSystem:
    return build_type_a(np.asarray(g).shape[0])
