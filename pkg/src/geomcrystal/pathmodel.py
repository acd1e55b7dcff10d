"""Piecewise-linear paths in the Cartan subalgebra and the h-family of crystal maps.

A Path is given by its values at strictly increasing knots; linear
interpolation defines it in between.  Every integral of exp(-alpha(path)/h)
is computed exactly segment by segment, so operator outputs are exact at
the knots and are re-linearized there.

An ExtPath is a path with one open end.  It is stored as a regular part
plus an explicit logarithmic singularity: on the high side (open at 0)
eta(t) = regular(t) + slope log(t), on the low side (open at T)
eta(t) = regular(t) + slope log(T - t).  The regular part holds the finite
limit at the open end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quadrature as quad
from .crystalcore import CrystalOps
from .errors import PreconditionError
from .rootsys import WeylElt, build_type_a

SUM_TOL = 1e-9
HIGH = "high"
LOW = "low"


@dataclass(frozen=True, eq=False)
class Path:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.size < 1:
            raise PreconditionError("grid must be a non-empty 1-d array")
        if values.shape[0] != grid.size or values.ndim != 2:
            raise PreconditionError(f"values shape {values.shape} does not match grid of {grid.size} knots")
        if grid[0] != 0.0:
            raise PreconditionError("grid must start at 0")
        if np.any(np.diff(grid) <= 0):
            raise PreconditionError("grid must be strictly increasing")
        scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
        if np.max(np.abs(values.sum(axis=1))) > SUM_TOL * scale:
            raise PreconditionError("path values must have zero coordinate sum")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def T(self) -> float:
        return float(self.grid[-1])

    @property
    def K(self) -> int:
        return self.grid.size - 1

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def starts_at_zero(self) -> bool:
        return bool(np.all(self.values[0] == 0.0))

    @property
    def endpoint(self) -> np.ndarray:
        return self.values[-1].copy()

    def alpha(self, i: int) -> np.ndarray:
        return self.values[:, i - 1] - self.values[:, i]

    def at(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.stack([np.interp(t, self.grid, self.values[:, j]) for j in range(self.n)], axis=-1)

    @classmethod
    def zero(cls, n: int, T: float = 1.0, K: int = 100) -> "Path":
        return cls(np.linspace(0.0, T, K + 1), np.zeros((K + 1, n)))

    @classmethod
    def linear(cls, drift, T: float = 1.0, K: int = 100) -> "Path":
        grid = np.linspace(0.0, T, K + 1)
        return cls(grid, grid[:, None] * np.asarray(drift, dtype=float)[None, :])


@dataclass(frozen=True, eq=False)
class ExtPath:
    """Path with an open end carrying a declared log-singularity and type."""

    grid: np.ndarray
    regular: np.ndarray
    slope: np.ndarray
    side: str
    type_w: WeylElt

    def __post_init__(self):
        if self.side not in (HIGH, LOW):
            raise PreconditionError(f"side must be '{HIGH}' or '{LOW}'")
        grid = np.asarray(self.grid, dtype=float)
        regular = np.asarray(self.regular, dtype=float)
        if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
            raise PreconditionError("grid must start at 0 and increase strictly")
        if regular.shape != (grid.size, self.type_w.n):
            raise PreconditionError("regular part does not match grid and group size")
        for arr in (grid, regular):
            arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "regular", regular)
        object.__setattr__(self, "slope", np.asarray(self.slope, dtype=float))

    @property
    def T(self) -> float:
        return float(self.grid[-1])

    @property
    def n(self) -> int:
        return self.regular.shape[1]

    @property
    def K(self) -> int:
        return self.grid.size - 1

    def distance(self) -> np.ndarray:
        """Distance of each knot to the open end."""
        return self.grid if self.side == HIGH else self.T - self.grid

    @property
    def values(self) -> np.ndarray:
        """Path values at the knots; the open end holds +-inf where the slope is nonzero."""
        with np.errstate(divide="ignore", invalid="ignore"):
            logd = np.log(self.distance())
            out = self.regular + logd[:, None] * self.slope[None, :]
        open_idx = 0 if self.side == HIGH else -1
        out[open_idx] = np.where(self.slope > 0, -np.inf, np.where(self.slope < 0, np.inf, self.regular[open_idx]))
        return out

    def interior(self) -> np.ndarray:
        """Values at every knot except the open end."""
        v = self.values
        return v[1:] if self.side == HIGH else v[:-1]

    def interior_grid(self) -> np.ndarray:
        return self.grid[1:] if self.side == HIGH else self.grid[:-1]

    @property
    def endpoint(self) -> np.ndarray:
        if self.side == LOW:
            raise PreconditionError("a low path has no endpoint")
        return self.values[-1].copy()

    def with_regular(self, regular, slope=None, type_w=None) -> "ExtPath":
        return ExtPath(
            self.grid,
            regular,
            self.slope if slope is None else slope,
            self.side,
            self.type_w if type_w is None else type_w,
        )

    @classmethod
    def from_path(cls, path: Path, side: str = HIGH) -> "ExtPath":
        """A regular path viewed as an extended path of type e."""
        return cls(path.grid, path.values, np.zeros(path.n), side, WeylElt.identity(path.n))

    def to_path(self) -> Path:
        if np.any(self.slope != 0):
            raise PreconditionError("only a path of type e can be closed")
        return Path(self.grid, self.regular)


def _root_values(values: np.ndarray, i: int) -> np.ndarray:
    return values[..., i - 1] - values[..., i]


def segment_logs(path, i: int, h: float = 1.0) -> np.ndarray:
    """log of the integral of exp(-alpha_i(path)/h) over each segment, in time order."""
    if isinstance(path, Path):
        return quad.segment_log_integrals(path.grid, -path.alpha(i) / h)
    power = -_root_values(path.slope, i) / h
    g = -_root_values(path.regular, i) / h
    if path.side == HIGH:
        return quad.weighted_segment_log_integrals(path.grid, g, power)
    u = path.T - path.grid[::-1]
    return quad.weighted_segment_log_integrals(u, g[::-1], power)[::-1]


def log_integrals(path, i: int, h: float = 1.0):
    """(log prefix integrals, log suffix integrals, log total) of exp(-alpha_i/h)."""
    seg = segment_logs(path, i, h)
    pre = quad.log_cumulative(seg)
    suf = quad.log_tail(seg)
    return pre, suf, pre[-1]


def _check_index(path, i: int) -> None:
    if not 1 <= i <= path.n - 1:
        raise PreconditionError(f"root index {i} outside 1..{path.n - 1}")


def _check_h(h: float) -> float:
    h = float(h)
    if not h >= 0:
        raise PreconditionError(f"temperature h={h} must be nonnegative")
    return h


def gamma(path) -> np.ndarray:
    """Weight map: the endpoint."""
    return path.endpoint


def eps(path, i: int, h: float = 1.0) -> float:
    _check_index(path, i)
    h = _check_h(h)
    if h == 0:
        if isinstance(path, ExtPath):
            raise PreconditionError("the h=0 maps are defined on regular paths only")
        return float(-np.min(path.alpha(i)))
    return float(h * log_integrals(path, i, h)[2])


def phi(path, i: int, h: float = 1.0) -> float:
    return eps(path, i, h) + float(_root_values(gamma(path), i))


def act(path, i: int, c: float, h: float = 1.0):
    """Crystal action e^c_{alpha_i} at temperature h.

    c = -inf returns the lowest path of the rank-one string as a low ExtPath
    (temperature h > 0).  On an extended path the action only moves the
    regular part; when eps is infinite it is the identity.
    """
    _check_index(path, i)
    h = _check_h(h)
    c = float(c)
    n = path.n
    coroot = np.zeros(n)
    coroot[i - 1], coroot[i] = 1.0, -1.0
    if h == 0:
        if isinstance(path, ExtPath):
            raise PreconditionError("the h=0 action is defined on regular paths only")
        return _act_tropical(path, i, c, coroot)
    if c == np.inf:
        raise PreconditionError("c = +inf is not supported")
    pre, suf, total = log_integrals(path, i, h)
    if c == -np.inf:
        if not isinstance(path, Path):
            raise PreconditionError("c = -inf applies to regular paths; see transforms.low_e_inf")
        return _lowest_rank_one(path, i, h, suf, total, coroot)
    if not np.isfinite(total):
        return path
    with np.errstate(divide="ignore"):
        shift = h * np.logaddexp(suf - total, c / h + pre - total)
    if isinstance(path, Path):
        shift[0], shift[-1] = 0.0, c
        return Path(path.grid, path.values + shift[:, None] * coroot[None, :])
    open_idx = 0 if path.side == HIGH else -1
    shift[open_idx] = 0.0 if path.side == HIGH else c
    return path.with_regular(path.regular + shift[:, None] * coroot[None, :])


def _lowest_rank_one(path: Path, i, h, suf, total, coroot) -> ExtPath:
    dist = path.T - path.grid
    with np.errstate(divide="ignore", invalid="ignore"):
        reg_shift = h * (suf - np.log(dist) - total)
    reg_shift[-1] = -path.alpha(i)[-1] - h * total
    s = WeylElt.simple(path.n, i)
    return ExtPath(path.grid, path.values + reg_shift[:, None] * coroot[None, :], h * coroot, LOW, s)


def _act_tropical(path: Path, i: int, c: float, coroot) -> Path:
    a = path.alpha(i)
    m_pre = np.minimum.accumulate(a)
    m_suf = np.minimum.accumulate(a[::-1])[::-1]
    m_total = m_pre[-1]
    shift = m_total - np.minimum(m_pre - c, m_suf)
    shift[0], shift[-1] = 0.0, c
    return Path(path.grid, path.values + shift[:, None] * coroot[None, :])


def dual(path: Path) -> Path:
    """pi^iota(t) = pi(T - t) - pi(T)."""
    if not isinstance(path, Path):
        raise PreconditionError("dual needs both endpoints; use transforms.ext_dual for extended paths")
    source = getattr(path, "_dual_of", None)
    if source is not None:
        # recomputing would round (v - v_T) + v_T; the dual of a dual is its source
        return source
    grid = path.T - path.grid[::-1]
    grid[0] = 0.0
    out = Path(grid, path.values[::-1] - path.values[-1])
    object.__setattr__(out, "_dual_of", path)
    return out


def concat(first: Path, second: Path) -> Path:
    """pi_1 * pi_2: run pi_1, then pi_2 translated to start at pi_1(T)."""
    if second.K == 0:
        return first
    grid = np.concatenate([first.grid, first.T + second.grid[1:]])
    tail = second.values[1:] - second.values[0] + first.values[-1]
    return Path(grid, np.concatenate([first.values, tail]))


def rescale(path: Path, h: float, h_new: float) -> Path:
    if not (h > 0 and h_new > 0):
        raise PreconditionError("rescaling needs positive temperatures")
    return Path(path.grid, path.values * (h_new / h))


def pitman_tropical(path: Path, i: int) -> Path:
    """pi(t) - inf_{s<=t} alpha(pi(s)) alpha^vee."""
    _check_index(path, i)
    m = np.minimum.accumulate(path.alpha(i))
    coroot = np.zeros(path.n)
    coroot[i - 1], coroot[i] = 1.0, -1.0
    return Path(path.grid, path.values - m[:, None] * coroot[None, :])


def random_path(seed: int, n: int, T: float = 1.0, K: int = 1000, volatility: float = 1.0) -> Path:
    """Gaussian random walk with centered increments, interpolated linearly."""
    build_type_a(n)
    if K < 1:
        raise PreconditionError("K must be at least 1")
    rng = np.random.default_rng(seed)
    steps = rng.standard_normal((K, n)) * volatility * np.sqrt(T / K)
    steps -= steps.mean(axis=1, keepdims=True)
    values = np.zeros((K + 1, n))
    values[1:] = np.cumsum(steps, axis=0)
    return Path(np.linspace(0.0, T, K + 1), values)


def refine(path: Path, grid) -> Path:
    """Resample onto a finer grid; exact when grid contains the original knots."""
    grid = np.union1d(np.asarray(grid, dtype=float), path.grid)
    grid = grid[(grid >= 0) & (grid <= path.T)]
    return Path(grid, path.at(grid))


def refine_open_end(path: Path, side: str = HIGH, span: float = 1000.0, ratio: float = 1.01, floor: float = 1e-6) -> Path:
    """Insert geometric knots next to one end; exact since the path is linear between knots.

    Knots sit at distances first * floor * ratio^k below first * span, where
    first is the width of the end segment.
    """
    if not (ratio > 1 and 0 < floor < 1 < span):
        raise PreconditionError("need ratio > 1 and floor < 1 < span")
    first = float(path.grid[1] - path.grid[0]) if side == HIGH else float(path.grid[-1] - path.grid[-2])
    count = int(np.ceil(np.log(span / floor) / np.log(ratio)))
    dist = first * floor * ratio ** np.arange(count + 1)
    dist = dist[dist < min(span * first, path.T)]
    return refine(path, dist if side == HIGH else path.T - dist)


def sup_distance(a, b, skip_open: bool = True) -> float:
    """Sup-norm over shared knots; open ends of extended paths are excluded."""
    if a.grid.shape != b.grid.shape or np.max(np.abs(a.grid - b.grid)) > 1e-9 * max(a.T, 1.0):
        raise PreconditionError("paths live on different grids")
    va, vb = a.values, b.values
    keep = np.ones(a.grid.size, dtype=bool)
    for p in (a, b):
        if isinstance(p, ExtPath) and skip_open:
            keep[0 if p.side == HIGH else -1] = False
    return float(np.max(np.abs(va[keep] - vb[keep]))) if keep.any() else 0.0


def smooth_function(seed: int, n: int, T: float = 1.0, modes: int = 4, amplitude: float = 1.0):
    """Random trigonometric curve t -> values (zero at t = 0, zero coordinate sum)."""
    build_type_a(n)
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal((modes, n)) * amplitude / np.arange(1, modes + 1)[:, None]
    coef -= coef.mean(axis=1, keepdims=True)
    freqs = np.arange(1, modes + 1)

    def curve(t):
        t = np.asarray(t, dtype=float)
        return np.sin(np.pi * np.multiply.outer(t / T, freqs) / 2.0) @ coef

    return curve


def smooth_path(seed: int, n: int, T: float = 1.0, K: int = 1000, modes: int = 4, amplitude: float = 1.0) -> Path:
    """Interpolant of smooth_function on K uniform segments, so discretization error is visible."""
    grid = np.linspace(0.0, T, K + 1)
    return Path(grid, smooth_function(seed, n, T, modes, amplitude)(grid))


def crystal_ops(n: int, h: float = 1.0) -> CrystalOps:
    """The path crystal at temperature h as a CrystalOps record."""
    rs = build_type_a(n)
    return CrystalOps(
        rs,
        gamma,
        lambda p, i: eps(p, i, h),
        lambda p, i: phi(p, i, h),
        lambda p, i, c: act(p, i, c, h),
        sup_distance,
    )


def _weighted_prefix(path: Path, weight_root: int, inner_root: int, c: float) -> np.ndarray:
    """Prefix integrals of e^{-alpha}(1 + (e^c - 1) F_beta(s)), F_beta the normalized prefix of e^{-beta}.

    Returned relative to exp(max(-alpha)) so the normalized ratio is safe.
    """
    g_out = -path.alpha(weight_root)
    g_in = -path.alpha(inner_root)
    pre_in = quad.log_cumulative(quad.segment_log_integrals(path.grid, g_in))
    total_in = pre_in[-1]
    top = float(np.max(g_out))

    def integrand(k, frac):
        inner = np.logaddexp(
            pre_in[k], quad.partial_log_integral(path.grid[k], path.grid[k + 1], g_in[k], g_in[k + 1], frac)
        )
        weight = np.exp(g_out[k] + frac * (g_out[k + 1] - g_out[k]) - top)
        return weight * (1.0 + np.expm1(c) * np.exp(inner - total_in))

    seg = quad.gauss_legendre_segments(path.grid, integrand)
    return np.concatenate([[0.0], np.cumsum(seg)])


def verma_a2_formula(path: Path, c1: float, c2: float, i: int = 1, j: int = 2) -> Path:
    """Closed form of e^{c1}_i e^{c1+c2}_j e^{c2}_i applied to a path, for roots with pairing -1."""
    _check_index(path, i)
    _check_index(path, j)
    if abs(i - j) != 1:
        raise PreconditionError("the A2 formula needs adjacent simple roots")
    out = path.values.copy()
    for root, other, c in ((i, j, c1), (j, i, c2)):
        prefix = _weighted_prefix(path, root, other, c)
        shift = np.log1p(np.expm1(c1 + c2) * prefix / prefix[-1])
        shift[0], shift[-1] = 0.0, c1 + c2
        coroot = np.zeros(path.n)
        coroot[root - 1], coroot[root] = 1.0, -1.0
        out = out + shift[:, None] * coroot[None, :]
    return Path(path.grid, out)


def pitman_h(path: Path, i: int, h: float = 1.0):
    """Pitman operator at temperature h: pi + h log(int_0^t exp(-alpha_i(pi)/h)) alpha_i^vee.

    h = 0 gives pitman_tropical; h > 0 gives a high ExtPath of type s_i whose
    log-singularity at 0 has slope h alpha_i^vee.
    """
    _check_index(path, i)
    h = _check_h(h)
    if h == 0:
        return pitman_tropical(path, i)
    coroot = np.zeros(path.n)
    coroot[i - 1], coroot[i] = 1.0, -1.0
    pre = log_integrals(path, i, h)[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        reg_shift = h * (pre - np.log(path.grid))
    reg_shift[0] = -path.alpha(i)[0]
    return ExtPath(path.grid, path.values + reg_shift[:, None] * coroot[None, :], h * coroot, HIGH, WeylElt.simple(path.n, i))


def tropical_gaps(path: Path, i: int, c: float, h: float) -> dict:
    """Distances between the temperature-h maps and their h = 0 limits.

    Pitman values are compared on the interior knots, away from the log-singularity.
    """
    trop_pitman = pitman_tropical(path, i)
    hot = pitman_h(path, i, h)
    return {
        "h": float(h),
        "eps": abs(eps(path, i, h) - eps(path, i, 0.0)),
        "phi": abs(phi(path, i, h) - phi(path, i, 0.0)),
        "act": sup_distance(act(path, i, c, h), act(path, i, c, 0.0)),
        "pitman": float(np.max(np.abs(np.asarray(hot.values)[1:] - trop_pitman.values[1:]))),
    }
