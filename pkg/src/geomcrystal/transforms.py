"""Geometric Pitman transforms, low transforms and the parametrizations they induce.

Every transform returns an ExtPath: the singular log-term at the open end
is carried exactly in the slope and the declared Weyl type, while the
regular part is evaluated at the knots.  Integrals near the open end weight
the regular exponential by the exact power law dist^p, p = -alpha(slope).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import flow
from . import groupcore as gc
from . import groupcrystal as gcr
from . import pathmodel as pm
from . import quadrature as quad
from .errors import DriftNotDominant, NotInImage, PreconditionError, TypeOrderViolation, UnrecognizedType
from .pathmodel import HIGH, LOW, ExtPath, Path
from .rootsys import WeylElt, build_type_a, c_w_constant, log_slope

KINDS = ("string", "lusztig")
MIN_DECADE_KNOTS = 50
RS_COMPAT_TOL = 1e-6


@dataclass(frozen=True)
class ParamExtraction:
    word: tuple[int, ...]
    kind: str
    params: tuple[float, ...]
    residual: ExtPath


@dataclass(frozen=True)
class RSOutput:
    group_elt: np.ndarray
    highest_path: ExtPath

    @property
    def hw(self) -> np.ndarray:
        return self.highest_path.endpoint


@dataclass(frozen=True)
class TypeDetection:
    type_w: WeylElt
    slope: np.ndarray
    constant: np.ndarray
    residual: float


def _coroot(n: int, i: int) -> np.ndarray:
    v = np.zeros(n)
    v[i - 1], v[i] = 1.0, -1.0
    return v


def _root(x, i: int):
    x = np.asarray(x)
    return x[..., i - 1] - x[..., i]


def _as_ext(path, side: str, refine: bool = False) -> ExtPath:
    if isinstance(path, Path):
        if refine:
            path = pm.refine_open_end(path, side)
        return ExtPath.from_path(path, side)
    if not isinstance(path, ExtPath):
        raise PreconditionError("expected a Path or an ExtPath")
    if path.side != side:
        raise PreconditionError(f"expected a {side} path, got a {path.side} one")
    return path


def _power(ext: ExtPath, i: int) -> int:
    """Exponent p of the integrand dist^p near the open end."""
    return int(round(-float(_root(ext.slope, i))))


def _climbs(w: WeylElt, i: int) -> bool:
    return (w * WeylElt.simple(w.n, i)).length() == w.length() + 1


def _log_dist(ext: ExtPath) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(ext.distance())


def _check_root(ext: ExtPath, i: int) -> None:
    if not 1 <= i <= ext.n - 1:
        raise PreconditionError(f"root index {i} outside 1..{ext.n - 1}")


def _raise_step(ext: ExtPath, i: int) -> tuple[ExtPath, float]:
    """Shared kernel of T_alpha (high side) and e^{-inf}_alpha (low side).

    Adds log(integral from the open end) alpha^vee, normalized by the total
    on the low side.  Returns the new path and log of the total integral.
    """
    _check_root(ext, i)
    if not _climbs(ext.type_w, i):
        raise TypeOrderViolation(
            f"exp(-alpha_{i}) is not integrable at the open end of a {ext.side} path of type {ext.type_w.perm}"
        )
    p = _power(ext, i)
    seg = pm.segment_logs(ext, i)
    if ext.side == HIGH:
        from_open = quad.log_cumulative(seg)
        total = float(from_open[-1])
        norm = 0.0
        open_idx = 0
    else:
        from_open = quad.log_tail(seg)
        total = float(from_open[0])
        norm = total
        open_idx = -1
    with np.errstate(invalid="ignore"):
        shift = from_open - norm - (p + 1) * _log_dist(ext)
    # open-end limit of the normalized integral: exp(-alpha(regular)) dist^{p+1} / (p+1)
    shift[open_idx] = -float(_root(ext.regular[open_idx], i)) - math.log(p + 1) - norm
    cor = _coroot(ext.n, i)
    out = ExtPath(
        ext.grid,
        ext.regular + shift[:, None] * cor[None, :],
        ext.slope + (p + 1) * cor,
        ext.side,
        ext.type_w * WeylElt.simple(ext.n, i),
    )
    return out, total


def pitman_T(path, i: int) -> ExtPath:
    """T_alpha pi(t) = pi(t) + log(int_0^t exp(-alpha(pi))) alpha^vee, a high path."""
    return _raise_step(_as_ext(path, HIGH), i)[0]


def low_e_inf(path, i: int) -> ExtPath:
    """e^{-inf}_alpha pi(t) = pi(t) + log(1 - int_0^t / int_0^T) alpha^vee, a low path.

    When the total integral diverges (the type already has s_alpha as a
    right descent) the transform is the identity.
    """
    ext = _as_ext(path, LOW)
    _check_root(ext, i)
    if not _climbs(ext.type_w, i):
        return ext
    return _raise_step(ext, i)[0]


def pitman_T_w(path, word: Sequence[int], refine: bool = True) -> ExtPath:
    """T_w = T_{i_l} ... T_{i_1} along a reduced word.

    A regular input is first refined geometrically near t = 0 (refine=True),
    where the iterated integrals vary fastest relative to their size.
    """
    ext = _as_ext(path, HIGH, refine)
    for i in build_type_a(ext.n).check_reduced(word):
        ext = _raise_step(ext, i)[0]
    return ext


def low_e_inf_w(path, word: Sequence[int], refine: bool = True) -> ExtPath:
    """e^{-inf}_w = e^{-inf}_{i_l} ... e^{-inf}_{i_1} along a reduced word, refined near T."""
    ext = _as_ext(path, LOW, refine)
    for i in build_type_a(ext.n).check_reduced(word):
        ext = low_e_inf(ext, i)
    return ext


def ext_dual(path):
    """Duality extended to one-sided paths.

    A Path maps to its usual dual.  A high path eta maps to the low path
    eta(T - t) - eta(T).  A low path of type w maps to the unique high path
    whose dual it is, pi(T - t) - C with C the constant of its asymptotics.
    """
    if isinstance(path, Path):
        return pm.dual(path)
    grid = path.T - path.grid[::-1]
    grid[0] = 0.0
    rev = path.regular[::-1]
    if path.side == HIGH:
        return ExtPath(grid, rev - path.endpoint, path.slope, LOW, path.type_w)
    rs = build_type_a(path.n)
    constant = path.regular[-1] - c_w_constant(rs, path.type_w)
    return ExtPath(grid, rev - constant, path.slope, HIGH, path.type_w)


def path_type_detect(path, threshold: float = 1e-3, max_slope_gap: float = 0.25) -> TypeDetection:
    """Fit value ~ log(dist) slope + constant over the decade of knots nearest the open end.

    A regular Path is of type e.  The fitted slope is matched to the nearest
    rho^vee - w^{-1} rho^vee; a large fit residual or slope gap raises
    UnrecognizedType.
    """
    n = path.n
    rs = build_type_a(n)
    if isinstance(path, Path):
        return TypeDetection(rs.identity(), np.zeros(n), path.values[0].copy(), 0.0)
    dist = path.distance()
    vals = path.values
    positive = dist > 0
    d_min = float(np.min(dist[positive]))
    near = positive & (dist <= 10.0 * d_min * (1 + 1e-12))
    if int(near.sum()) < MIN_DECADE_KNOTS:
        raise PreconditionError(
            f"only {int(near.sum())} knots in the decade nearest the open end; need {MIN_DECADE_KNOTS}"
        )
    design = np.stack([np.log(dist[near]), np.ones(int(near.sum()))], axis=1)
    coef, *_ = np.linalg.lstsq(design, vals[near], rcond=None)
    slope, constant = coef[0], coef[1]
    resid = float(np.sqrt(np.mean((design @ coef - vals[near]) ** 2)))
    best = min(rs.elements(), key=lambda w: float(np.linalg.norm(log_slope(rs, w) - slope)))
    gap = float(np.linalg.norm(log_slope(rs, best) - slope))
    if resid > threshold or gap > max_slope_gap:
        raise UnrecognizedType(f"log-fit residual {resid:.3g}, slope gap {gap:.3g}")
    return TypeDetection(best, slope, constant, resid)


def extract_params(path: Path, word: Sequence[int], kind: str = "string", refine: bool = True) -> ParamExtraction:
    """String parameters (via T_alpha) or Lusztig parameters (via e^{-inf}_alpha) along a word for w0.

    The residual lives on the input grid, refined near the open end unless refine=False.
    """
    if kind not in KINDS:
        raise PreconditionError(f"kind must be one of {KINDS}")
    rs = build_type_a(path.n)
    word = rs.check_w0_word(word)
    ext = _as_ext(path, HIGH if kind == "string" else LOW, refine)
    params = []
    for i in word:
        ext, total = _raise_step(ext, i)
        params.append(math.exp(-total))
    return ParamExtraction(word, kind, tuple(params), ext)


def _lower_step(ext: ExtPath, i: int, c: float) -> ExtPath:
    """Inverse of one raise step given its parameter.

    High side: eta + log(c + int_t^T exp(-alpha(eta))) alpha^vee.
    Low side: eta + log(1 + c int_0^t exp(-alpha(eta))) alpha^vee.
    The integral diverges at the open end like dist^{-q}/q, q = -p - 1.
    """
    _check_root(ext, i)
    w_prev = ext.type_w * WeylElt.simple(ext.n, i)
    if w_prev.length() != ext.type_w.length() - 1:
        raise TypeOrderViolation(f"type {ext.type_w.perm} does not end with s_{i}")
    if not c > 0:
        raise PreconditionError("parameters must be positive")
    p = _power(ext, i)
    q = -p - 1
    seg = pm.segment_logs(ext, i)
    log_c = math.log(c)
    if ext.side == HIGH:
        from_closed = quad.log_tail(seg)
        with np.errstate(invalid="ignore"):
            shift = np.logaddexp(log_c, from_closed) + q * _log_dist(ext)
        shift[0] = -float(_root(ext.regular[0], i)) - math.log(q)
    else:
        from_closed = quad.log_cumulative(seg)
        with np.errstate(invalid="ignore"):
            shift = np.logaddexp(0.0, log_c + from_closed) + q * _log_dist(ext)
        shift[-1] = log_c - float(_root(ext.regular[-1], i)) - math.log(q)
    cor = _coroot(ext.n, i)
    return ExtPath(ext.grid, ext.regular + shift[:, None] * cor[None, :], ext.slope + (p + 1) * cor, ext.side, w_prev)


def reconstruct(residual: ExtPath, word: Sequence[int], params: Sequence[float], kind: str = "string") -> Path:
    """Rebuild the path from its highest (string) or lowest (Lusztig) path and parameters."""
    if kind not in KINDS:
        raise PreconditionError(f"kind must be one of {KINDS}")
    rs = build_type_a(residual.n)
    word = rs.check_w0_word(word)
    if len(params) != len(word):
        raise PreconditionError("one parameter per letter is required")
    side = HIGH if kind == "string" else LOW
    if residual.side != side or residual.type_w != rs.w0():
        raise TypeOrderViolation(f"{kind} reconstruction needs a {side} path of type w0")
    ext = residual
    for i, c in zip(reversed(word), reversed(list(params))):
        ext = _lower_step(ext, i, float(c))
    regular = ext.regular.copy()
    regular[0] = 0.0
    return Path(ext.grid, regular)


def inversion_check(path: Path, word: Sequence[int], traj: flow.FlowTrajectory | None = None) -> dict:
    """Both inversion lemmas: group matrices read off B_T against products built from path parameters."""
    n = path.n
    rs = build_type_a(n)
    word = rs.check_w0_word(word)
    traj = flow.solve(path) if traj is None else traj
    b_t = traj.B_T
    report = {"word": list(word)}
    for kind in KINDS:
        params = extract_params(path, word, kind).params
        if kind == "string":
            from_path = gc.x_minus_word(n, word, params, exact=False)
            from_group = gcr.string_parameter(b_t)
        else:
            from_path = gc.x_word(n, word, params, exact=False)
            from_group = gcr.lusztig_parameter(b_t)
        scale = float(np.max(np.abs(from_group)))
        report[kind] = {
            "params": list(params),
            "relative_error": float(np.max(np.abs(from_path - from_group)) / scale),
        }
    return report


def rs_forward(path: Path, word: Sequence[int] | None = None, refine: bool = True) -> RSOutput:
    """pi -> (B_T(pi), T_{w0} pi); the highest path lives on the refined grid."""
    rs = build_type_a(path.n)
    word = rs.default_word() if word is None else rs.check_w0_word(word)
    return RSOutput(flow.project_p(path), pitman_T_w(path, word, refine))


def rs_inverse(out: RSOutput, word: Sequence[int] | None = None, tol: float = RS_COMPAT_TOL) -> Path:
    """Read string parameters from the group element and rebuild from the highest path."""
    x = np.asarray(out.group_elt, dtype=float)
    rs = build_type_a(x.shape[0])
    word = rs.default_word() if word is None else rs.check_w0_word(word)
    hp = out.highest_path
    if hp.side != HIGH or hp.type_w != rs.w0():
        raise NotInImage("the highest path must be a high path of type w0")
    gap = float(np.max(np.abs(gcr.hw(x) - hp.endpoint)))
    if gap > tol:
        raise NotInImage(f"hw(group element) differs from the highest path endpoint by {gap:.3g}")
    coords = gcr.chart_read(x, "string", word)
    return reconstruct(hp, word, [float(c) for c in coords.params], "string")


def rs_to_json(out: RSOutput) -> str:
    hp = out.highest_path
    values = [[None if not np.isfinite(v) else float(v) for v in row] for row in hp.values]
    payload = {
        "matrix": np.asarray(out.group_elt, dtype=float).tolist(),
        "hw": [float(v) for v in out.hw],
        "highest_path": {
            "grid": hp.grid.tolist(),
            "values": values,
            "slope": hp.slope.tolist(),
            "type": list(hp.type_w.perm),
            "open_end_limit": hp.regular[0].tolist(),
        },
    }
    return json.dumps(payload)


def rs_from_json(text: str) -> RSOutput:
    data = json.loads(text)
    hp = data["highest_path"]
    grid = np.asarray(hp["grid"], dtype=float)
    slope = np.asarray(hp["slope"], dtype=float)
    raw = np.array([[np.nan if v is None else v for v in row] for row in hp["values"]], dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        regular = raw - np.log(grid)[:, None] * slope[None, :]
    regular[0] = np.asarray(hp["open_end_limit"], dtype=float)
    ext = ExtPath(grid, regular, slope, HIGH, WeylElt(tuple(hp["type"])))
    return RSOutput(np.asarray(data["matrix"], dtype=float), ext)


def action_in_coords_check(path: Path, word: Sequence[int], xi: float, h: float = 1.0) -> dict:
    """Acting by e^xi along the first letter scales the first coordinate and fixes the rest."""
    rs = build_type_a(path.n)
    word = rs.check_w0_word(word)
    moved = pm.act(path, word[0], xi, h)
    report = {"xi": float(xi)}
    for kind in KINDS:
        before = np.array(extract_params(path, word, kind).params)
        after = np.array(extract_params(moved, word, kind).params)
        report[kind] = {
            "before": before.tolist(),
            "after": after.tolist(),
            "first_error": float(abs(after[0] / (math.exp(xi) * before[0]) - 1.0)),
            "rest_error": float(np.max(np.abs(after[1:] / before[1:] - 1.0))) if len(before) > 1 else 0.0,
        }
    return report


def schutz_path(path: Path) -> Path:
    """S(pi) = -w0 pi^iota."""
    rs = build_type_a(path.n)
    d = pm.dual(path)
    return Path(d.grid, -rs.w0().act(d.values))


@dataclass(frozen=True)
class DriftedPath:
    """A path on [0, T_max] continued linearly with drift mu for all later times."""

    path: Path
    drift: np.ndarray

    def __post_init__(self):
        drift = np.asarray(self.drift, dtype=float)
        if drift.shape != (self.path.n,) or abs(drift.sum()) > 1e-12 * max(1.0, np.abs(drift).max()):
            raise PreconditionError("drift must be a zero-sum vector of the path's size")
        object.__setattr__(self, "drift", drift)


def drifted_path(
    seed: int, n: int, drift, T_max: float = 10.0, K: int = 2000, volatility: float = 1.0, settle: float = 0.5
) -> DriftedPath:
    """Random walk up to settle * T_max, pure drift afterwards and beyond T_max."""
    base = pm.random_path(seed, n, T_max, K, volatility)
    drift = np.asarray(drift, dtype=float)
    cut = int(np.searchsorted(base.grid, settle * T_max))
    noise = base.values.copy()
    noise[cut:] = noise[cut]
    return DriftedPath(Path(base.grid, noise + base.grid[:, None] * drift[None, :]), drift)


def low_e_inf_infinite(dp: DriftedPath, i: int) -> tuple[DriftedPath, float]:
    """e^{-inf}_alpha on an infinite-horizon path; returns the new path and log of the total integral."""
    rate = float(_root(dp.drift, i))
    if not rate > 0:
        raise DriftNotDominant(f"alpha_{i}(drift) = {rate:.6g} is not positive")
    p = dp.path
    tail_beyond = -float(p.alpha(i)[-1]) - math.log(rate)
    seg = pm.segment_logs(p, i)
    inside = quad.log_tail(seg)
    from_t = np.logaddexp(inside, tail_beyond)
    total = float(from_t[0])
    cor = _coroot(p.n, i)
    values = p.values + (from_t - total)[:, None] * cor[None, :]
    values[0] = 0.0
    rs = build_type_a(p.n)
    return DriftedPath(Path(p.grid, values), rs.reflect(i, dp.drift)), total


def infinite_horizon_params(dp: DriftedPath, word: Sequence[int]) -> tuple[float, ...]:
    """Lusztig parameters of a path with dominant drift, tail integrals in closed form."""
    rs = build_type_a(dp.path.n)
    word = rs.check_w0_word(word)
    for i in range(1, rs.rank + 1):
        if not float(_root(dp.drift, i)) > 0:
            raise DriftNotDominant(f"drift is not in the open Weyl chamber (alpha_{i} = {_root(dp.drift, i):.6g})")
    params = []
    cur = dp
    for i in word:
        cur, total = low_e_inf_infinite(cur, i)
        params.append(math.exp(-total))
    return tuple(params)


def hw_path(path: Path, word: Sequence[int] | None = None) -> np.ndarray:
    """hw(pi) = T_{w0} pi(T)."""
    rs = build_type_a(path.n)
    word = rs.default_word() if word is None else word
    return pitman_T_w(path, word).endpoint


def group_pitman_values(path: Path, w: WeylElt, traj: flow.FlowTrajectory | None = None) -> np.ndarray:
    """log [w̄^{-1} B_t]_0 at every knot t > 0, the group route to T_w."""
    traj = flow.solve(path) if traj is None else traj
    rep = gc.inverse(gc.weyl_rep(w))
    mats = np.einsum("ij,kjl->kil", rep, traj.B_stack[1:])
    minors = gc.principal_minors_batch(mats)
    prev = np.concatenate([np.ones((minors.shape[0], 1)), minors[:, :-1]], axis=1)
    return np.log(minors / prev)
