"""The group picture: totally positive lower triangular matrices as a geometric crystal.

Elements are plain n x n arrays on either backend.  Charts attach positive
coordinates along a reduced word of w0 to the unipotent parameter of an
element; the highest weight is carried separately as the diagonal of e^lambda.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import groupcore as gc
from .crystalcore import CrystalOps
from .errors import NotInBigCell, NotTotallyPositive, PreconditionError
from .rootsys import RootSystem, WeylElt, build_type_a, roots_enumeration

KINDS = ("lusztig", "string", "twisted")


@dataclass(frozen=True)
class ChartCoords:
    """Chart coordinates; torus holds the diagonal of e^lambda (positive, product 1)."""

    word: tuple[int, ...]
    kind: str
    params: tuple
    torus: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"chart kind must be one of {KINDS}")
        if any(not p > 0 for p in self.params):
            raise PreconditionError("chart parameters must be positive")
        if any(not d > 0 for d in self.torus):
            raise PreconditionError("torus entries must be positive")

    @classmethod
    def from_lam(cls, word, kind, params, lam) -> "ChartCoords":
        lam = np.asarray(lam, dtype=float)
        return cls(tuple(word), kind, tuple(params), tuple(float(v) for v in np.exp(lam)))

    @property
    def lam(self) -> np.ndarray:
        return np.log(np.array([float(d) for d in self.torus]))

    @property
    def exact(self) -> bool:
        return gc._want_exact(*self.params, *self.torus)


def _backend_like(x) -> bool:
    return gc.is_exact(x)


def _w0bar(n: int, exact: bool) -> np.ndarray:
    return gc.weyl_rep(WeylElt.longest(n), exact)


def gamma(x) -> np.ndarray:
    """log [x]_0."""
    d = gc.gauss_decompose(x).diagonal
    return np.log(np.array([float(v) for v in d]))


def eps_exp(x, i: int):
    """e^{eps_i(x)}: the (i+1, i) entry of [x]_-, on the backend of x."""
    return gc.part_minus(x)[i, i - 1]


def eps(x, i: int) -> float:
    return math.log(float(eps_exp(x, i)))


def phi(x, i: int) -> float:
    g = gamma(x)
    return eps(x, i) + float(g[i - 1] - g[i])


def structural(x, i: int):
    g = gamma(x)
    e = eps(x, i)
    return g, e, e + float(g[i - 1] - g[i])


def act_group(x, i: int, c: float):
    """x_i((e^c - 1) e^{-eps}) x x_i((e^{-c} - 1) e^{-phi})."""
    x = np.asarray(x)
    n = x.shape[0]
    ee = eps_exp(x, i)
    if gc.is_exact(x):
        raise PreconditionError("the crystal action uses real exponentials; convert to float first")
    g = gamma(x)
    e = math.log(ee)
    f = e + float(g[i - 1] - g[i])
    left = gc.chevalley_x(n, i, math.expm1(c) * math.exp(-e), exact=False)
    right = gc.chevalley_x(n, i, math.expm1(-c) * math.exp(-f), exact=False)
    return left @ x @ right


def act_group_gauss(x, i: int, c: float):
    """The same action written as [x_i((e^c - 1) e^{-eps}) x]_{-0}."""
    x = np.asarray(x, dtype=float)
    left = gc.chevalley_x(x.shape[0], i, math.expm1(c) * math.exp(-eps(x, i)), exact=False)
    return gc.part_minus_zero(left @ x)


def hw(x) -> np.ndarray:
    """log [w0bar^{-1} x]_0."""
    x = np.asarray(x)
    w0 = _w0bar(x.shape[0], gc.is_exact(x))
    d = gc.gauss_decompose(gc.inverse(w0) @ x).diagonal
    return np.log(np.array([float(v) for v in d]))


def hw_torus(x) -> np.ndarray:
    """Diagonal of [w0bar^{-1} x]_0 on the backend of x."""
    x = np.asarray(x)
    w0 = _w0bar(x.shape[0], gc.is_exact(x))
    return gc.gauss_decompose(gc.inverse(w0) @ x).diagonal


def lw(x) -> np.ndarray:
    x = np.asarray(x)
    return WeylElt.longest(x.shape[0]).act(hw(x))


def is_member(x, tol: float = 0.0) -> bool:
    """x is lower triangular with positive diagonal, [x]_- is totally positive and hw is defined."""
    x = np.asarray(x)
    n = x.shape[0]
    exact = gc.is_exact(x)
    for r in range(n):
        for c in range(r + 1, n):
            if (x[r, c] != 0) if exact else abs(float(x[r, c])) > 1e-12 * max(1.0, float(np.max(np.abs(x.astype(float))))):
                return False
        if not x[r, r] > 0:
            return False
    try:
        hw_torus(x)
    except NotInBigCell:
        return False
    return gc.is_totally_positive_N(gc.part_minus(x), tol)


def eta_e_w0(u):
    """Lusztig to string side: [w0bar^{-1} u^T]_{-0}^{-1}."""
    u = np.asarray(u)
    w0 = _w0bar(u.shape[0], gc.is_exact(u))
    return gc.inverse(gc.part_minus_zero(gc.inverse(w0) @ u.T))


def eta_w0_e(v):
    """String to Lusztig side: [(w0bar v^T)^{-1}]_+."""
    v = np.asarray(v)
    w0 = _w0bar(v.shape[0], gc.is_exact(v))
    return gc.part_plus(gc.inverse(w0 @ v.T))


def _torus_matrix(coords: ChartCoords, exact: bool) -> np.ndarray:
    entries = [Fraction(d) if exact else float(d) for d in coords.torus]
    return gc.torus(entries) if exact else np.diag(np.array(entries, dtype=float))


def chart_build(coords: ChartCoords, n: int | None = None):
    """b^L, b^K or b^T: coordinates to a crystal element."""
    n = len(coords.torus) if n is None else n
    rs = build_type_a(n)
    word = rs.check_w0_word(coords.word)
    exact = coords.exact
    params = [Fraction(p) for p in coords.params] if exact else [float(p) for p in coords.params]
    lam = _torus_matrix(coords, exact)
    w0 = _w0bar(n, exact)
    if coords.kind == "lusztig":
        z = gc.x_word(n, word, params, exact)
        return gc.part_minus_zero(z @ w0) @ lam
    if coords.kind == "string":
        v = gc.x_minus_word(n, word, params, exact)
        return gc.part_minus_zero(eta_w0_e(v) @ w0) @ lam
    u = gc.x_word(n, word, params, exact)
    inner = gc.inverse(lam) @ gc.part_plus(gc.inverse(w0) @ u.T) @ lam
    z = gc.involution_schutz(gc.involution_iota(inner))
    return z @ w0 @ lam @ u


def lusztig_parameter(x):
    """z = [w0bar^{-1} x^iota]_+^iota."""
    x = np.asarray(x)
    w0 = _w0bar(x.shape[0], gc.is_exact(x))
    return gc.involution_iota(gc.part_plus(gc.inverse(w0) @ gc.involution_iota(x)))


def string_parameter(x):
    """v = [w0bar^{-1} [x]_-]_{0+}^T."""
    x = np.asarray(x)
    w0 = _w0bar(x.shape[0], gc.is_exact(x))
    return gc.part_zero_plus(gc.inverse(w0) @ gc.part_minus(x)).T


def twisted_parameter(x):
    """u = [w0bar^{-1} x]_+."""
    x = np.asarray(x)
    w0 = _w0bar(x.shape[0], gc.is_exact(x))
    return gc.part_plus(gc.inverse(w0) @ x)


def chart_read(x, kind: str, word: Sequence[int]) -> ChartCoords:
    """rho^L, rho^K or rho^T followed by factorization along the word."""
    x = np.asarray(x)
    n = x.shape[0]
    rs = build_type_a(n)
    word = rs.check_w0_word(word)
    torus = tuple(hw_torus(x))
    if kind == "lusztig":
        params = gc.factor_upper(lusztig_parameter(x), word)
    elif kind == "string":
        params = factor_lower(rs, string_parameter(x), word)
    elif kind == "twisted":
        params = gc.factor_upper(twisted_parameter(x), word)
    else:
        raise PreconditionError(f"chart kind must be one of {KINDS}")
    return ChartCoords(word, kind, tuple(params), torus)


def factor_lower(rs: RootSystem, v, word: Sequence[int]) -> list:
    """Parameters c with v = x_{-i_1}(c_1) ... x_{-i_m}(c_m)."""
    v = np.asarray(v)
    exact = gc.is_exact(v)
    n = v.shape[0]
    diag = [v[k, k] for k in range(n)]
    unip = v @ gc.inverse(gc.torus(diag) if exact else np.diag(np.array(diag, dtype=float)))
    t_rev = gc.factor_upper(unip.T, tuple(reversed(word)))
    t = list(reversed(t_rev))
    c = change_of_coords(rs, word, t, "t_to_c")
    check = gc.x_minus_word(n, word, c, exact)
    err = check - v
    if exact:
        if any(e != 0 for e in err.flat):
            raise NotTotallyPositive("torus part does not match the string factorization")
    elif np.max(np.abs(err.astype(float))) > 1e-7 * max(1.0, float(np.max(np.abs(v.astype(float))))):
        raise NotTotallyPositive("torus part does not match the string factorization")
    return c


def change_of_coords(rs: RootSystem, word: Sequence[int], params: Sequence, direction: str) -> list:
    """t_k = c_k prod_{l<k} c_l^{alpha_{i_k}(alpha_{i_l}^vee)} and its inverse.

    The inverse uses c_k = t_k prod_{l<k} t_l^{beta_k(beta_l^vee)} with the
    positive-root enumeration of the word.
    """
    word = rs.check_reduced(word)
    params = list(params)
    cartan = rs.cartan_matrix
    if direction == "c_to_t":
        out = []
        for k, ik in enumerate(word):
            val = params[k]
            for l in range(k):
                val = val * params[l] ** cartan[word[l] - 1][ik - 1]
            out.append(val)
        return out
    if direction == "t_to_c":
        betas = roots_enumeration(rs, word)
        out = []
        for k in range(len(word)):
            val = params[k]
            for l in range(k):
                power = int(round(float(betas[k](betas[l].coroot(rs.n)))))
                val = val * params[l] ** power
            out.append(val)
        return out
    raise PreconditionError("direction must be 'c_to_t' or 't_to_c'")


def weight_in_coords(coords: ChartCoords, n: int | None = None) -> np.ndarray:
    """The weight map written in chart coordinates."""
    n = len(coords.torus) if n is None else n
    rs = build_type_a(n)
    word = rs.check_w0_word(coords.word)
    lam = coords.lam
    logs = np.log(np.array([float(p) for p in coords.params]))
    if coords.kind == "string":
        return lam + sum(lk * rs.coroot(i) for lk, i in zip(logs, word))
    betas = roots_enumeration(rs, word)
    total = lam + sum(lk * b.coroot(n) for lk, b in zip(logs, betas))
    if coords.kind == "lusztig":
        return total
    return rs.w0().act(total)


def random_coords(rng, n: int, word=None, kind: str = "string", spread: float = 0.7, lam_scale: float = 1.0) -> ChartCoords:
    rs = build_type_a(n)
    word = rs.default_word() if word is None else tuple(word)
    params = np.exp(rng.normal(scale=spread, size=len(word)))
    lam = rng.normal(scale=lam_scale, size=n)
    lam -= lam.mean()
    return ChartCoords.from_lam(word, kind, params, lam)


def random_rational_coords(rng, n: int, word=None, kind: str = "string", top: int = 9) -> ChartCoords:
    """Positive rational coordinates and a rational torus with product 1."""
    rs = build_type_a(n)
    word = rs.default_word() if word is None else tuple(word)
    params = tuple(Fraction(int(rng.integers(1, top + 1)), int(rng.integers(1, top + 1))) for _ in word)
    torus = [Fraction(int(rng.integers(1, top + 1)), int(rng.integers(1, top + 1))) for _ in range(n - 1)]
    prod = Fraction(1)
    for d in torus:
        prod *= d
    torus.append(1 / prod)
    return ChartCoords(word, kind, params, tuple(torus))


def random_element(rng, n: int, **kw) -> np.ndarray:
    return chart_build(random_coords(rng, n, **kw))


def crystal_ops(n: int) -> CrystalOps:
    """CrystalOps for the float group picture; distance is entrywise relative."""
    rs = build_type_a(n)

    def distance(a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))

    return CrystalOps(rs, gamma, eps, phi, act_group, distance)


def schutz_element(x):
    return gc.involution_schutz(np.asarray(x))


def element_to_json(x, word: Sequence[int] | None = None) -> str:
    x = np.asarray(x)
    n = x.shape[0]
    payload = {"n": n, "matrix": [[float(v) for v in row] for row in x]}
    if word is not None:
        coords = chart_read(x.astype(float), "string", word)
        payload["word"] = list(coords.word)
        payload["string_params"] = [float(p) for p in coords.params]
        payload["hw"] = [float(v) for v in coords.lam]
    return json.dumps(payload)


def element_from_json(text: str) -> np.ndarray:
    payload = json.loads(text)
    return np.array(payload["matrix"], dtype=float)
