"""Command-line front end.

Every subcommand prints one JSON report (schema ``mudom.report.v1``) and
optionally writes it to ``--out``.  Membership-style commands exit with
0 (Inside), 1 (Outside) or 2 (Boundary / Undetermined); errors exit with a
code >= 10 and an error report.
"""
from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import scipy

from . import __version__
from .clinalg import pi_map
from .domains import (
    Method,
    Status,
    embed_symmetrized,
    handle_for,
    member,
    member_closure,
    minkowski_interval,
    sample_members,
    separating_hyperplane,
)
from .errors import (
    BudgetError,
    InconsistentStateError,
    InvalidArgumentError,
    InvalidSpecError,
    InvalidStateError,
    NumericFailure,
    SizeError,
    UndeterminedError,
)
from .io import SCHEMA_VERSION, decode_matrix, decode_point, encode_point, load_json_arg
from .multiindex import build_table
from .pentablock import member_penta, member_penta_closure, penta_minkowski_interval
from .prober import (
    UnitBall,
    line_section_scan,
    starlike_witness_search,
    verify_separator,
)
from .selftest import selftest
from .ssv import mu, psh_circle_test

__all__ = ["ERROR_CODES", "RunConfig", "main", "run"]

ERROR_CODES = {
    InvalidSpecError: 10,
    InvalidArgumentError: 11,
    SizeError: 12,
    BudgetError: 12,
    OSError: 13,
    UndeterminedError: 14,
    NumericFailure: 14,
    InvalidStateError: 14,
    InconsistentStateError: 14,
}
GENERIC_ERROR = 15


@dataclass
class RunConfig:
    """Everything a run depends on; echoed into every report."""

    command: str
    blocks: Optional[list[int]] = None
    tol: float = 1e-7
    grid: int = 64
    resolution: int = 8
    seed: int = 0
    threads: int = 1
    out: Optional[str] = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tol <= 0:
            raise InvalidArgumentError("--tol must be positive")
        if self.grid < 4 or self.resolution < 2:
            raise InvalidArgumentError("--grid must be >= 4 and --resolution >= 2")
        if self.threads < 1:
            raise InvalidArgumentError("--threads must be >= 1")
        if self.blocks is not None:
            self.blocks = list(build_table(self.blocks).blocks)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "RunConfig":
        return cls(**obj)


def _versions() -> dict:
    return {
        "mudom": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def _handle(cfg: RunConfig):
    if cfg.blocks is None:
        raise InvalidArgumentError(f"'{cfg.command}' needs --blocks")
    return handle_for(cfg.blocks, resolution=cfg.resolution)


def _point_opt(cfg: RunConfig, key: str = "point") -> np.ndarray:
    raw = cfg.options.get(key)
    if raw is None:
        raise InvalidArgumentError(f"'{cfg.command}' needs --{key}")
    return decode_point(load_json_arg(raw))


def _matrix_opt(cfg: RunConfig, key: str = "matrix") -> np.ndarray:
    raw = cfg.options.get(key)
    if raw is None:
        raise InvalidArgumentError(f"'{cfg.command}' needs --{key.replace('_', '-')}")
    return decode_matrix(load_json_arg(raw))


def _status_code(status: Status) -> int:
    return status.exit_code


# ------------------------------------------------------------ commands


def _cmd_table(cfg):
    return build_table(cfg.blocks or []).to_json(), 0


def _cmd_member(cfg):
    h = _handle(cfg)
    method = cfg.options.get("method")
    res = member(h, _point_opt(cfg), Method(method) if method else None)
    return res.to_json(), _status_code(res.status)


def _cmd_closure(cfg):
    res = member_closure(_handle(cfg), _point_opt(cfg))
    return res.to_json(), _status_code(res.status)


def _cmd_mink(cfg):
    lo, hi, exact = minkowski_interval(_handle(cfg), _point_opt(cfg), cfg.tol)
    return {"value": 0.5 * (lo + hi), "lo": lo, "hi": hi, "exact": exact}, 0


def _cmd_mu(cfg):
    t = build_table(cfg.blocks) if cfg.blocks else None
    A = _matrix_opt(cfg)
    if t is None:
        t = build_table([A.shape[0]])
    certify = cfg.options.get("certify", False)
    res = mu(t, A, cfg.grid, cfg.tol if certify else None, cfg.resolution)
    return res.to_json(), 0


def _cmd_pi(cfg):
    t = build_table(cfg.blocks or [])
    return {"x": encode_point(pi_map(t, _matrix_opt(cfg)))}, 0


def _cmd_embed(cfg):
    return embed_symmetrized(_handle(cfg), _point_opt(cfg)).to_json(), 0


def _cmd_sample(cfg):
    h = _handle(cfg)
    count = int(cfg.options.get("count", 10))
    cap = float(cfg.options.get("norm_cap", 0.95))
    # chunks are drawn from per-sample streams, so the thread count never
    # changes the result
    bounds = list(range(0, count, 256)) + [count]
    chunks = list(zip(bounds[:-1], bounds[1:]))

    def work(ab):
        a, b = ab
        X = sample_members(h, b - a, cfg.seed, cap, offset=a)
        return X, [member(h, x).status.value for x in X]

    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        parts = list(pool.map(work, chunks))
    X = np.concatenate([p[0] for p in parts]) if parts else np.zeros((0, h.dim))
    statuses = [s for p in parts for s in p[1]]
    return {"points": [encode_point(x) for x in X], "statuses": statuses}, 0


def _cmd_separate(cfg):
    h = _handle(cfg)
    x0 = _point_opt(cfg)
    f = separating_hyperplane(h, x0)
    out = f.to_json()
    out["value_at_x0"] = abs(f(x0))
    return out, 0


def _cmd_penta(cfg):
    pt = _point_opt(cfg)
    if pt.shape != (3,):
        raise InvalidArgumentError("a pentablock point is (a, s, p)")
    if cfg.options.get("mink"):
        lo, hi, exact = penta_minkowski_interval(pt, int(cfg.options.get("k", 1)), cfg.tol)
        return {"value": 0.5 * (lo + hi), "lo": lo, "hi": hi, "exact": exact}, 0
    res = member_penta_closure(pt) if cfg.options.get("closure") else member_penta(pt)
    return res.to_json(), _status_code(res.status)


def _cmd_probe(cfg):
    mode = cfg.options.get("mode", "starlike")
    if mode == "psh":
        t = build_table(cfg.blocks or [])
        res = psh_circle_test(t, _matrix_opt(cfg), _matrix_opt(cfg, "matrix_b"),
                              float(cfg.options.get("radius", 0.1)), 64, cfg.grid, cfg.tol)
        return {"passed": res.passed, "deficit": res.deficit, "center": res.center, "mean": res.mean}, 0
    h = UnitBall(int(cfg.options["ball_dim"])) if cfg.options.get("ball_dim") else _handle(cfg)
    if mode == "starlike":
        w = starlike_witness_search(h, int(cfg.options.get("budget", 10**5)), cfg.seed)
        return {"found": w is not None, "witness": None if w is None else w.to_json()}, 0
    if mode == "section":
        base = _point_opt(cfg, "basepoint")
        direction = _point_opt(cfg, "direction")
        win = cfg.options.get("window") or [-3.0, 3.0, -3.0, 3.0]
        sec = line_section_scan(h, base, direction, win, int(cfg.options.get("raster", 128)))
        csv_path = cfg.options.get("csv")
        if csv_path:
            Path(csv_path).write_text(sec.to_csv())
        return sec.to_json(), 0
    if mode == "separator":
        x0 = _point_opt(cfg)
        f = separating_hyperplane(h, x0)
        rep = verify_separator(h, f, int(cfg.options.get("samples", 10**4)), cfg.seed, x0)
        return {"functional": f.to_json(), "report": rep.to_json()}, 0 if rep.passed else 1
    raise InvalidArgumentError(f"unknown probe mode {mode!r}")


def _cmd_selftest(cfg):
    res = selftest(cfg.seed, bool(cfg.options.get("canary")))
    for name, v in res["suites"].items():
        print(f"{name:14s} passed {v['passed']:4d} failed {v['failed']:4d}", file=sys.stderr)
    return res, 0 if res["ok"] else 1


COMMANDS = {
    "table": _cmd_table,
    "member": _cmd_member,
    "closure": _cmd_closure,
    "mink": _cmd_mink,
    "mu": _cmd_mu,
    "pi": _cmd_pi,
    "embed": _cmd_embed,
    "sample": _cmd_sample,
    "separate": _cmd_separate,
    "penta": _cmd_penta,
    "probe": _cmd_probe,
    "selftest": _cmd_selftest,
}


def _error_code(exc: BaseException) -> int:
    for cls in type(exc).__mro__:
        if cls in ERROR_CODES:
            return ERROR_CODES[cls]
    return GENERIC_ERROR


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute ``cfg``; returns the exit code and the report."""
    t0 = time.perf_counter()
    try:
        result, code = COMMANDS[cfg.command](cfg)
        report = {"schema": SCHEMA_VERSION, "command": cfg.command, "ok": True, "exit_code": code,
                  "config": cfg.to_json(), "result": result}
    except Exception as exc:
        code = _error_code(exc)
        report = {"schema": SCHEMA_VERSION, "command": cfg.command, "ok": False, "exit_code": code,
                  "config": cfg.to_json(),
                  "error": {"type": type(exc).__name__, "message": str(exc)}}
    report["versions"] = _versions()
    report["timings"] = {"seconds": time.perf_counter() - t0}
    return code, report


def _blocks(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"blocks must look like 2,1 (got {text!r})")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--blocks", type=_blocks, help="block sizes, e.g. 2,1")
    common.add_argument("--tol", type=float, default=1e-7)
    common.add_argument("--grid", type=int, default=64)
    common.add_argument("--resolution", type=int, default=8)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", help="also write the JSON report here")

    p = argparse.ArgumentParser(prog="mudom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    point = "point as JSON list of [re, im] pairs, or a path to a JSON file"
    matrix = "matrix as JSON rows of [re, im] pairs, or a JSON/CSV file"

    sub.add_parser("table", parents=[common], help="ordered exponent table")
    sp = sub.add_parser("member", parents=[common], help="domain membership")
    sp.add_argument("--point", required=True, help=point)
    sp.add_argument("--method", choices=[m.value for m in Method])
    sp = sub.add_parser("closure", parents=[common], help="closure membership")
    sp.add_argument("--point", required=True, help=point)
    sp = sub.add_parser("mink", parents=[common], help="quasibalanced Minkowski functional")
    sp.add_argument("--point", required=True, help=point)
    sp = sub.add_parser("mu", parents=[common], help="bounds on the structured singular value")
    sp.add_argument("--matrix", required=True, help=matrix)
    sp.add_argument("--certify", action="store_true", help="add a certified interval of width --tol")
    sp = sub.add_parser("pi", parents=[common], help="minor-sum map of a matrix")
    sp.add_argument("--matrix", required=True, help=matrix)
    sp = sub.add_parser("embed", parents=[common], help="embedding into a symmetrized polydisc")
    sp.add_argument("--point", required=True, help=point)
    sp = sub.add_parser("sample", parents=[common], help="random members")
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--norm-cap", type=float, default=0.95)
    sp = sub.add_parser("separate", parents=[common], help="separating complex hyperplane")
    sp.add_argument("--point", required=True, help=point)
    sp = sub.add_parser("penta", parents=[common], help="pentablock membership and gauge")
    sp.add_argument("--point", required=True, help="(a, s, p) as [re, im] pairs")
    sp.add_argument("--closure", action="store_true")
    sp.add_argument("--mink", action="store_true")
    sp.add_argument("--k", type=int, default=1)
    sp = sub.add_parser("probe", parents=[common], help="geometric probes")
    sp.add_argument("--mode", choices=["starlike", "section", "separator", "psh"], default="starlike")
    sp.add_argument("--budget", type=int, default=10**5)
    sp.add_argument("--point", help=point)
    sp.add_argument("--basepoint", help=point)
    sp.add_argument("--direction", help=point)
    sp.add_argument("--window", type=float, nargs=4, metavar=("RE0", "RE1", "IM0", "IM1"))
    sp.add_argument("--raster", type=int, default=128)
    sp.add_argument("--csv", help="section raster CSV output path")
    sp.add_argument("--samples", type=int, default=10**4)
    sp.add_argument("--matrix", help=matrix)
    sp.add_argument("--matrix-b", help="perturbation direction for psh mode")
    sp.add_argument("--radius", type=float, default=0.1)
    sp.add_argument("--ball-dim", type=int, help="probe the unit ball of this dimension instead")
    sp = sub.add_parser("selftest", parents=[common], help="run the invariant suites")
    sp.add_argument("--canary", action="store_true", help="run against a corrupted R (must fail)")
    return p


_COMMON = {"command", "blocks", "tol", "grid", "resolution", "seed", "threads", "out"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ns = vars(args)
    opts = {k: v for k, v in ns.items() if k not in _COMMON and v is not None and v is not False}
    try:
        cfg = RunConfig(args.command, args.blocks, args.tol, args.grid, args.resolution,
                        args.seed, args.threads, args.out, opts)
    except Exception as exc:
        code = _error_code(exc)
        report = {"schema": SCHEMA_VERSION, "command": args.command, "ok": False, "exit_code": code,
                  "error": {"type": type(exc).__name__, "message": str(exc)}, "versions": _versions()}
        print(json.dumps(report))
        return code
    code, report = run(cfg)
    text = json.dumps(report, indent=2)
    print(text)
    if cfg.out:
        try:
            Path(cfg.out).write_text(text + "\n")
        except OSError as exc:
            print(json.dumps({"error": {"type": "OSError", "message": str(exc)}}), file=sys.stderr)
            return ERROR_CODES[OSError]
    return code


if __name__ == "__main__":
    sys.exit(main())
