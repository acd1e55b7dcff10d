"""Log-domain integrals of exp(g) for g piecewise linear on a grid.

Paths are piecewise linear between knots, so exp(-alpha(path)/h) is an
exponential of a linear function on each segment and integrates in closed
form.  Weighted integrands u^p exp(g) (which appear near the open end of an
extended path) fall back to Gauss-Legendre on each segment.
"""

from __future__ import annotations

import numpy as np

GL_ORDER = 12
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


def _log_mean_exp_linear(ga, gb):
    """log of the average of exp over a segment where the exponent runs ga -> gb."""
    ga = np.asarray(ga, dtype=float)
    gb = np.asarray(gb, dtype=float)
    hi = np.maximum(ga, gb)
    spread = np.abs(gb - ga)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(spread > 0, -np.expm1(-spread) / np.where(spread > 0, spread, 1.0), 1.0)
        out = hi + np.log(ratio)
    return np.where(np.isneginf(hi), -np.inf, out)


def segment_log_integrals(grid, g) -> np.ndarray:
    """log of the integral of exp(g) over each segment [t_k, t_{k+1}]."""
    grid = np.asarray(grid, dtype=float)
    g = np.asarray(g, dtype=float)
    return np.log(np.diff(grid)) + _log_mean_exp_linear(g[:-1], g[1:])


def partial_log_integral(ta, tb, ga, gb, fraction):
    """log of the integral over [ta, ta + fraction (tb - ta)] of exp(linear g)."""
    fraction = np.asarray(fraction, dtype=float)
    gmid = ga + fraction * (gb - ga)
    with np.errstate(divide="ignore"):
        return np.log(fraction * (tb - ta)) + _log_mean_exp_linear(ga, gmid)


def log_cumulative(seg_logs) -> np.ndarray:
    """Prefix integrals from the first knot: entry k is log of the integral over [t_0, t_k]."""
    seg_logs = np.asarray(seg_logs, dtype=float)
    out = np.empty(seg_logs.size + 1)
    out[0] = -np.inf
    out[1:] = np.logaddexp.accumulate(seg_logs)
    return out


def log_tail(seg_logs) -> np.ndarray:
    """Suffix integrals to the last knot: entry k is log of the integral over [t_k, t_K]."""
    seg_logs = np.asarray(seg_logs, dtype=float)
    out = np.empty(seg_logs.size + 1)
    out[-1] = -np.inf
    out[:-1] = np.logaddexp.accumulate(seg_logs[::-1])[::-1]
    return out


def weighted_segment_log_integrals(u, g, power: float) -> np.ndarray:
    """log of the integral of u^power exp(g) over each segment of an increasing grid u >= 0.

    g is linear in u on each segment.  Segments starting at u = 0 are finite
    only for power > -1; otherwise they return +inf.
    """
    u = np.asarray(u, dtype=float)
    g = np.asarray(g, dtype=float)
    if power == 0:
        return segment_log_integrals(u, g)
    ua, ub = u[:-1], u[1:]
    ga, gb = g[:-1], g[1:]
    out = np.empty(ua.size)
    at_zero = ua <= 0.0
    # interior segments: substitute u = exp(v) so the power becomes exp((p+1) v)
    idx = np.nonzero(~at_zero)[0]
    if idx.size:
        va, vb = np.log(ua[idx]), np.log(ub[idx])
        width = vb - va
        v = va[:, None] + width[:, None] * _GL_NODES[None, :]
        uu = np.exp(v)
        frac = (uu - ua[idx, None]) / (ub[idx, None] - ua[idx, None])
        expo = (power + 1.0) * v + ga[idx, None] + frac * (gb[idx, None] - ga[idx, None])
        out[idx] = np.log(width) + _logsumexp_rows(expo, _GL_WEIGHTS)
    idx = np.nonzero(at_zero)[0]
    if idx.size:
        if power <= -1:
            out[idx] = np.inf
        else:
            width = ub[idx] - ua[idx]
            frac = _GL_NODES[None, :]
            uu = ua[idx, None] + width[:, None] * frac
            expo = power * np.log(uu) + ga[idx, None] + frac * (gb[idx, None] - ga[idx, None])
            out[idx] = np.log(width) + _logsumexp_rows(expo, _GL_WEIGHTS)
    return out


def _logsumexp_rows(expo: np.ndarray, weights: np.ndarray) -> np.ndarray:
    top = np.max(expo, axis=1)
    safe = np.where(np.isfinite(top), top, 0.0)
    return safe + np.log(np.sum(weights[None, :] * np.exp(expo - safe[:, None]), axis=1))


def gauss_legendre_segments(grid, integrand_at) -> np.ndarray:
    """Integral over each segment of a smooth integrand evaluated at Gauss nodes.

    integrand_at(k, frac) receives segment indices (shape (K, 1)) and node
    fractions (shape (1, q)) and returns integrand values of shape (K, q).
    """
    grid = np.asarray(grid, dtype=float)
    width = np.diff(grid)
    k = np.arange(width.size)[:, None]
    vals = integrand_at(k, _GL_NODES[None, :])
    return width * np.sum(vals * _GL_WEIGHTS[None, :], axis=1)
