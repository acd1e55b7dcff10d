"""Reading and writing paths as CSV (t,x1,...,xn) or JSON ({"T": ..., "values": [[...]]})."""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path as FilePath

import numpy as np

from .errors import PathFormatError
from .pathmodel import SUM_TOL, ExtPath, Path

log = logging.getLogger(__name__)


def _header(n: int) -> list[str]:
    return ["t"] + [f"x{j}" for j in range(1, n + 1)]


def parse_csv(text: str) -> Path:
    """Parse CSV text; line numbers in errors are 1-based file lines."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise PathFormatError("empty file", 1)
    head = [c.strip() for c in rows[0]]
    n = len(head) - 1
    if n < 2 or head != _header(n):
        raise PathFormatError(f"header must read t,x1,...,xn with n >= 2, got {','.join(head)!r}", 1)
    times, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != n + 1:
            raise PathFormatError(f"expected {n + 1} fields, found {len(row)}", lineno)
        try:
            nums = [float(c) for c in row]
        except ValueError as exc:
            raise PathFormatError(f"non-numeric field ({exc})", lineno) from None
        if not all(np.isfinite(nums)):
            raise PathFormatError("non-finite value", lineno)
        if times and nums[0] <= times[-1]:
            raise PathFormatError(f"time {nums[0]} does not increase strictly", lineno)
        if not times and nums[0] != 0.0:
            raise PathFormatError("the first time must be 0", lineno)
        times.append(nums[0])
        values.append(nums[1:])
    if len(times) < 2:
        raise PathFormatError("a path needs at least two rows", len(rows))
    return Path(np.array(times), _project(np.array(values)))


def parse_json(text: str) -> Path:
    try:
        data = json.loads(text)
        T = float(data["T"])
        values = np.asarray(data["values"], dtype=float)
    except (ValueError, KeyError, TypeError) as exc:
        raise PathFormatError(f"expected {{'T': ..., 'values': [[...]]}} ({exc})") from None
    if values.ndim != 2 or values.shape[0] < 2 or values.shape[1] < 2 or not T > 0:
        raise PathFormatError("values must be a K+1 by n array with K >= 1, n >= 2 and T > 0")
    grid = np.linspace(0.0, T, values.shape[0])
    return Path(grid, _project(values))


def _project(values: np.ndarray) -> np.ndarray:
    """Re-project rows onto zero sum when the drift exceeds tolerance, with a warning.

    Rows already on the plane are kept bit for bit so that files round-trip exactly.
    """
    sums = values.sum(axis=1)
    scale = max(1.0, float(np.max(np.abs(values))))
    if np.max(np.abs(sums)) <= SUM_TOL * scale:
        return values
    log.warning("path values off the zero-sum plane by up to %.3g; re-projecting", float(np.max(np.abs(sums))))
    return values - sums[:, None] / values.shape[1]


def read_path(source) -> Path:
    """Load a path from a .csv or .json file."""
    p = FilePath(source)
    try:
        text = p.read_text()
    except OSError as exc:
        raise PathFormatError(f"cannot read {p}: {exc.strerror}") from None
    if p.suffix.lower() == ".json":
        return parse_json(text)
    return parse_csv(text)


def format_csv(path) -> str:
    """CSV text for a Path or an ExtPath (the open end reads inf or -inf)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_header(path.n))
    for t, row in zip(path.grid, path.values):
        writer.writerow([repr(float(t))] + [repr(float(v)) for v in row])
    return buf.getvalue()


def format_json(path: Path) -> str:
    grid = path.grid
    if not np.allclose(np.diff(grid), grid[-1] / (grid.size - 1), rtol=1e-9, atol=0.0):
        raise PathFormatError("the JSON form stores uniform grids only; use CSV")
    return json.dumps({"T": float(path.T), "values": path.values.tolist()})


def write_text(target, text: str) -> None:
    """Write atomically: a temporary sibling is renamed over the target."""
    target = FilePath(target)
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(target)


def write_path(target, path) -> None:
    target = FilePath(target)
    if target.suffix.lower() == ".json" and isinstance(path, Path):
        write_text(target, format_json(path))
    else:
        write_text(target, format_csv(path))


def read_ext_csv(source, slope, type_w, open_end_limit, side: str = "high") -> ExtPath:
    """Rebuild an ExtPath from a CSV of its values plus its declared asymptotic data."""
    p = FilePath(source)
    rows = list(csv.reader(io.StringIO(p.read_text())))
    if not rows or rows[0][:1] != ["t"]:
        raise PathFormatError("header must read t,x1,...,xn", 1)
    try:
        data = np.array([[float(c) for c in row] for row in rows[1:] if row], dtype=float)
    except ValueError as exc:
        raise PathFormatError(f"non-numeric field ({exc})") from None
    grid, values = data[:, 0], data[:, 1:]
    slope = np.asarray(slope, dtype=float)
    dist = grid if side == "high" else grid[-1] - grid
    with np.errstate(divide="ignore", invalid="ignore"):
        regular = values - np.log(dist)[:, None] * slope[None, :]
    regular[0 if side == "high" else -1] = np.asarray(open_end_limit, dtype=float)
    return ExtPath(grid, regular, slope, side, type_w)
