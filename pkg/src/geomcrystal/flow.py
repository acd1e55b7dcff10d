"""The left-invariant flow dB = B (sum_i f_i dt + dX) written as B = N A.

On each segment the driving path is linear with velocity v, so the flow
advances by exactly B_{k+1} = B_k expm(delta (F + diag v)), F = sum_i f_i.
Conjugating by A = exp(X) turns that into a lower unitriangular step for N
whose subdiagonal entries are the exact segment integrals of exp(-alpha_i(X)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import groupcore as gc
from .errors import DomainExit, PreconditionError
from .pathmodel import Path

MINOR_TOL = 0.0


@dataclass(frozen=True, eq=False)
class FlowTrajectory:
    grid: np.ndarray
    N: np.ndarray
    X: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def T(self) -> float:
        return float(self.grid[-1])

    @property
    def A(self) -> np.ndarray:
        out = np.zeros_like(self.N)
        idx = np.arange(self.n)
        out[:, idx, idx] = np.exp(self.X)
        return out

    def B(self, k: int = -1) -> np.ndarray:
        return self.N[k] * np.exp(self.X[k])[None, :]

    @property
    def B_stack(self) -> np.ndarray:
        return self.N * np.exp(self.X)[:, None, :]

    @property
    def B_T(self) -> np.ndarray:
        return self.B(-1)

    def index_of(self, t: float) -> int:
        k = int(np.argmin(np.abs(self.grid - t)))
        if abs(self.grid[k] - t) > 1e-9 * max(1.0, self.T):
            raise PreconditionError(f"t={t} is not a knot of the trajectory")
        return k


def step_matrices(path: Path) -> np.ndarray:
    """Unitriangular increments E_k with N_{k+1} = N_k E_k."""
    n = path.n
    dt = np.diff(path.grid)
    dX = np.diff(path.values, axis=0)
    gen = np.zeros((dt.size, n, n))
    idx = np.arange(n - 1)
    gen[:, idx + 1, idx] = dt[:, None]
    gen[:, np.arange(n), np.arange(n)] = dX
    M = scipy.linalg.expm(gen)
    left = np.exp(path.values[:-1])
    right = np.exp(-path.values[1:])
    E = left[:, :, None] * M * right[:, None, :]
    E = np.tril(E)
    E[:, np.arange(n), np.arange(n)] = 1.0
    return E


def solve(path: Path) -> FlowTrajectory:
    n = path.n
    E = step_matrices(path)
    N = np.empty((path.grid.size, n, n))
    N[0] = np.eye(n)
    cur = N[0]
    for k in range(E.shape[0]):
        cur = cur @ E[k]
        N[k + 1] = cur
    return FlowTrajectory(path.grid, N, path.values)


def project_p(path: Path) -> np.ndarray:
    """p(pi) = B_T(pi)."""
    return solve(path).B_T


def transform_T(g, path: Path, traj: FlowTrajectory | None = None) -> Path:
    """T_g X(t) = log [g B_t(X)]_0, checked for positivity of every leading minor."""
    g = np.asarray(g, dtype=float)
    traj = solve(path) if traj is None else traj
    G = np.einsum("ij,kjl->kil", g, traj.N)
    minors = gc.principal_minors_batch(G)
    scale = np.maximum(1.0, np.max(np.abs(G), axis=(1, 2)))
    ok = minors > MINOR_TOL * scale[:, None] ** np.arange(1, path.n + 1)[None, :]
    if not ok.all():
        k, i = np.argwhere(~ok)[0]
        raise DomainExit(float(path.grid[k]), int(i) + 1)
    prev = np.concatenate([np.ones((minors.shape[0], 1)), minors[:, :-1]], axis=1)
    return Path(path.grid, np.log(minors / prev) + traj.X)


def certify_positivity(traj: FlowTrajectory, t: float) -> dict:
    """Check every generalized minor Delta_{w omega_i, omega_i}(N_t) for positivity."""
    if t < 0:
        raise PreconditionError("t must be nonnegative")
    k = traj.index_of(t)
    minors = gc.generalized_minors_N(traj.N[k])
    nontrivial = {key: float(v) for key, v in minors.items() if not _is_identity_minor(key)}
    values = np.array(list(nontrivial.values()))
    lowest = float(values.min())
    if k == 0:
        status = "boundary"
    else:
        status = "positive" if lowest > 0 else "not_positive"
    return {
        "time": float(traj.grid[k]),
        "minors_checked": len(minors),
        "nontrivial_minors": len(nontrivial),
        "min_minor": lowest,
        "status": status,
    }


def _is_identity_minor(key) -> bool:
    """Minors with w omega_i = omega_i equal 1 on N for every input."""
    perm, i = key
    return set(perm[:i]) == set(range(i))


def trajectory_to_json(traj: FlowTrajectory, stride: int = 1) -> str:
    idx = list(range(0, traj.grid.size, stride))
    if idx[-1] != traj.grid.size - 1:
        idx.append(traj.grid.size - 1)
    payload = {
        "n": traj.n,
        "grid": [float(traj.grid[k]) for k in idx],
        "N": [traj.N[k].reshape(-1).tolist() for k in idx],
        "A": [np.diag(np.exp(traj.X[k])).reshape(-1).tolist() for k in idx],
    }
    return json.dumps(payload)


def sl2_closed_form(path: Path, integral) -> np.ndarray:
    """B_t for SL(2) given the integral of exp(-2 X) up to t (caller supplies it)."""
    x = path.values[:, 0]
    out = np.zeros((x.size, 2, 2))
    out[:, 0, 0] = np.exp(x)
    out[:, 1, 0] = np.exp(x) * integral
    out[:, 1, 1] = np.exp(-x)
    return out
