"""Command-line front end.

Every command reads a path CSV/JSON (or builds a seeded random path when no
file is given) and writes CSV for paths and JSON for matrices and reports.
Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 domain error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path as FilePath
from typing import Sequence

import numpy as np

from . import crystalcore as cc
from . import flow
from . import pathio
from . import pathmodel as pm
from . import transforms as tr
from . import verify
from .errors import ConfigError, GeomCrystalError
from .rootsys import WeylElt, build_type_a

SEED_ENV = "GEOMCRYSTAL_SEED"
DEFAULT_K = 10000
SUITE_CHOICES = tuple(verify.SUITES) + ("all",)


@dataclass(frozen=True)
class RunConfig:
    n: int = 3
    T: float = 1.0
    K: int = DEFAULT_K
    h: float = 1.0
    word: tuple[int, ...] | None = None
    seed: int = 0
    backend: str = "float"
    tol: float | None = None

    def __post_init__(self):
        rs = build_type_a(self.n)
        if self.K < 16:
            raise ConfigError("--grid must be at least 16")
        if not self.h >= 0:
            raise ConfigError("--h must be nonnegative")
        if not self.T > 0:
            raise ConfigError("--T must be positive")
        if self.backend not in verify.BACKENDS:
            raise ConfigError(f"--backend must be one of {', '.join(verify.BACKENDS)}")
        if self.word is not None:
            rs.check_reduced(self.word)

    def word_or_default(self, n: int) -> tuple[int, ...]:
        rs = build_type_a(n)
        return rs.default_word() if self.word is None else rs.check_reduced(self.word)


def parse_word(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"word must be comma-separated integers, got {text!r}") from None


def parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=3, help="group size for generated paths")
    parser.add_argument("--T", type=float, default=1.0, help="horizon for generated paths")
    parser.add_argument("--grid", type=int, default=None, help=f"grid size K (default {DEFAULT_K}; {verify.DEFAULT_K} for verify)")
    parser.add_argument("--h", default="1.0", help="temperature (a comma list for tropicalize)")
    parser.add_argument("--word", default=None, help="reduced word, comma-separated 1-based letters")
    parser.add_argument("--seed", type=int, default=None, help=f"seed (falls back to ${SEED_ENV}, then 0)")
    parser.add_argument("--backend", default="float", help="float or rational")
    parser.add_argument("--tol", type=float, default=None, help="override every verification tolerance")
    parser.add_argument("--out", default=None, help="output directory (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _common(common)
    parser = argparse.ArgumentParser(prog="geomcrystal", description="Geometric crystals on paths and on SL(n).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rs", parents=[common], help="geometric Robinson-Schensted bijection")
    p.add_argument("inputs", nargs="*", help="path file, or with --inverse the RS JSON and highest-path CSV")
    p.add_argument("--inverse", action="store_true", help="rebuild the path from RS JSON and highest-path CSV")

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", default="all", help=f"one of {', '.join(SUITE_CHOICES)}")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--paths", type=int, default=10)

    for name, text in (
        ("pitman", "Pitman transform along a reduced word"),
        ("lowpath", "lowest path along a reduced word"),
        ("flow", "left-invariant flow B_t of a path"),
    ):
        q = sub.add_parser(name, parents=[common], help=text)
        q.add_argument("input", nargs="?", help="path file (seeded random path when omitted)")
        if name == "flow":
            q.add_argument("--stride", type=int, default=1, help="keep every stride-th knot")

    q = sub.add_parser("params", parents=[common], help="string or Lusztig parameters of a path")
    q.add_argument("input", nargs="?")
    q.add_argument("--kind", default="string", choices=tr.KINDS)

    q = sub.add_parser("tensor", parents=[common], help="tensor product of two paths against their concatenation")
    q.add_argument("first")
    q.add_argument("second")

    q = sub.add_parser("tropicalize", parents=[common], help="temperature-h maps against their h = 0 limits")
    q.add_argument("input", nargs="?")
    q.add_argument("--root", type=int, default=1, help="simple root index")
    q.add_argument("--c", type=float, default=1.0, help="action parameter")
    return parser


def _config(args, h: float | None = None, K: int = DEFAULT_K) -> RunConfig:
    hs = parse_floats(args.h)
    return RunConfig(
        n=args.n,
        T=args.T,
        K=K if args.grid is None else args.grid,
        h=hs[0] if h is None and hs else (1.0 if h is None else h),
        word=None if args.word is None else parse_word(args.word),
        seed=resolve_seed(args.seed),
        backend=args.backend,
        tol=args.tol,
    )


def _load(source, cfg: RunConfig) -> pm.Path:
    if source is None:
        return pm.random_path(cfg.seed, cfg.n, cfg.T, cfg.K)
    return pathio.read_path(source)


class _Sink:
    """Routes named outputs to files under --out, or to stdout."""

    def __init__(self, out: str | None, stream=None):
        self.dir = None if out is None else FilePath(out)
        self.stream = sys.stdout if stream is None else stream
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def emit(self, name: str, text: str) -> None:
        if self.dir is None:
            self.stream.write(text if text.endswith("\n") else text + "\n")
        else:
            pathio.write_text(self.dir / name, text if text.endswith("\n") else text + "\n")


def _dumps(payload) -> str:
    return json.dumps(payload, indent=2)


def cmd_rs(args, sink: _Sink) -> int:
    cfg = _config(args)
    if args.inverse:
        if len(args.inputs) != 2:
            raise ConfigError("rs --inverse needs the RS JSON and the highest-path CSV")
        json_file, csv_file = args.inputs
        try:
            data = json.loads(FilePath(json_file).read_text())
            hp = data["highest_path"]
            matrix = np.asarray(data["matrix"], dtype=float)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot read RS JSON {json_file}: {exc}") from None
        ext = pathio.read_ext_csv(csv_file, hp["slope"], WeylElt(tuple(hp["type"])), hp["open_end_limit"])
        path = tr.rs_inverse(tr.RSOutput(matrix, ext), cfg.word)
        knots = data.get("source_knots")
        if knots is not None:
            path = pm.Path(path.grid[knots], path.values[knots])
        sink.emit("path.csv", pathio.format_csv(path))
        return 0
    if len(args.inputs) > 1:
        raise ConfigError("rs takes at most one path file")
    path = _load(args.inputs[0] if args.inputs else None, cfg)
    out = tr.rs_forward(path, cfg.word)
    payload = json.loads(tr.rs_to_json(out))
    payload["source_knots"] = np.searchsorted(out.highest_path.grid, path.grid).tolist()
    if sink.dir is None:
        sink.dir = FilePath(".")
    sink.emit("rs.json", json.dumps(payload))
    sink.emit("highest_path.csv", pathio.format_csv(out.highest_path))
    return 0


def cmd_verify(args, sink: _Sink) -> int:
    cfg = _config(args, K=verify.DEFAULT_K)
    if args.suite not in SUITE_CHOICES:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITE_CHOICES)}")
    vcfg = verify.VerifyConfig(
        n=cfg.n, seed=cfg.seed, K=cfg.K, T=cfg.T, trials=args.trials,
        paths=args.paths, backend=cfg.backend, tol=cfg.tol,
    )
    results = verify.run(args.suite, vcfg)
    for r in results:
        if r.note:
            print(f"note: {r.suite}/{r.name}: {r.note}", file=sys.stderr)
    sink.emit("verify.json", verify.report_json(results))
    return 0 if all(r.passed for r in results) else 1


def cmd_pitman(args, sink: _Sink) -> int:
    cfg = _config(args)
    path = _load(args.input, cfg)
    sink.emit("pitman.csv", pathio.format_csv(tr.pitman_T_w(path, cfg.word_or_default(path.n))))
    return 0


def cmd_lowpath(args, sink: _Sink) -> int:
    cfg = _config(args)
    path = _load(args.input, cfg)
    sink.emit("lowpath.csv", pathio.format_csv(tr.low_e_inf_w(path, cfg.word_or_default(path.n))))
    return 0


def cmd_params(args, sink: _Sink) -> int:
    cfg = _config(args)
    path = _load(args.input, cfg)
    word = cfg.word_or_default(path.n)
    ext = tr.extract_params(path, word, args.kind)
    sink.emit("params.json", _dumps({"kind": args.kind, "word": list(word), "params": [float(p) for p in ext.params]}))
    return 0


def cmd_flow(args, sink: _Sink) -> int:
    cfg = _config(args)
    if args.stride < 1:
        raise ConfigError("--stride must be positive")
    path = _load(args.input, cfg)
    traj = flow.solve(path)
    payload = json.loads(flow.trajectory_to_json(traj, args.stride))
    payload["B_T"] = traj.B_T.tolist()
    sink.emit("flow.json", json.dumps(payload))
    return 0


def cmd_tensor(args, sink: _Sink) -> int:
    cfg = _config(args)
    first, second = pathio.read_path(args.first), pathio.read_path(args.second)
    if first.n != second.n:
        raise ConfigError("both paths must have the same group size")
    ops = pm.crystal_ops(first.n, cfg.h)
    joined = pm.concat(first, second)
    pair = cc.TensorPair(first, second, cfg.h)
    roots = []
    for i in range(1, first.n):
        _, e, f = cc.tensor_maps(pair, ops, ops, i)
        roots.append({
            "root": i,
            "eps_tensor": float(e),
            "eps_concat": pm.eps(joined, i, cfg.h),
            "phi_tensor": float(f),
            "phi_concat": pm.phi(joined, i, cfg.h),
        })
    report = {
        "h": cfg.h,
        "endpoint": joined.endpoint.tolist(),
        "endpoint_sum": (first.endpoint + second.endpoint).tolist(),
        "roots": roots,
    }
    sink.emit("tensor.json", _dumps(report))
    if sink.dir is not None:
        sink.emit("concat.csv", pathio.format_csv(joined))
    return 0


def cmd_tropicalize(args, sink: _Sink) -> int:
    hs = parse_floats(args.h)
    if not hs or any(not h >= 0 for h in hs):
        raise ConfigError("--h needs a list of nonnegative temperatures")
    cfg = _config(args, h=hs[0])
    path = _load(args.input, cfg)
    i = args.root
    lines = ["h,eps,phi,act_endpoint_gap,dist_eps,dist_phi,dist_act,dist_pitman"]
    target = path.endpoint + args.c * build_type_a(path.n).coroot(i)
    for h in hs:
        acted = pm.act(path, i, args.c, h)
        gaps = pm.tropical_gaps(path, i, args.c, h)
        lines.append(",".join(repr(float(v)) for v in (
            h, pm.eps(path, i, h), pm.phi(path, i, h), np.max(np.abs(acted.endpoint - target)),
            gaps["eps"], gaps["phi"], gaps["act"], gaps["pitman"],
        )))
        if sink.dir is not None:
            sink.emit(f"act_h{h:g}.csv", pathio.format_csv(acted))
            sink.emit(f"pitman_h{h:g}.csv", pathio.format_csv(pm.pitman_h(path, i, h)))
    sink.emit("tropicalize.csv", "\n".join(lines))
    return 0


COMMANDS = {
    "rs": cmd_rs,
    "verify": cmd_verify,
    "pitman": cmd_pitman,
    "lowpath": cmd_lowpath,
    "params": cmd_params,
    "flow": cmd_flow,
    "tensor": cmd_tensor,
    "tropicalize": cmd_tropicalize,
}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        code = COMMANDS[args.command](args, _Sink(args.out))
        sys.stdout.flush()
        return code
    except GeomCrystalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except BrokenPipeError:
        # the reader closed stdout early (e.g. piped into head); drop what is still buffered
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
