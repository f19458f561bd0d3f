"""Batch command line: one subcommand per check, one report file per run.

Exit status: 0 success, 1 I/O or configuration error, 2 domain error,
3 non-convergence.  Settings resolve as flag > CSL_WORKERS (workers only) >
``--config`` file > built-in default.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from .errors import DomainError, NonConvergence
from .report import ReportRecord, config_hash, write_report
from .types import CPoint, ScanGrid, StripWindow, TruncationSpec

COMMANDS = ("zeta-eval", "eta-eval", "fe-verify", "condition-scan", "appendix-c",
            "summability-check", "zeros-locate", "pringsheim-check")

DEFAULTS: Dict[str, Any] = {
    "eps": 0.05, "T": 30.0, "N": 4000, "K": 4000, "L": 1000, "M": 256, "P": 1_000_000,
    "tol": 1e-10, "passes": 8, "workers": 1, "A": 2.0, "format": "csv",
    "nx": 20, "ny": 20, "coarse_step": 0.05, "n": 2, "route": "eta",
    "kernel": "alternating", "zero_tol": 1e-8, "s": "0.75,10",
}
_INT_KEYS = {"N", "K", "L", "M", "P", "passes", "workers", "nx", "ny", "n"}
_FLOAT_KEYS = {"eps", "T", "tol", "A", "coarse_step", "zero_tol"}

EXIT_OK, EXIT_IO, EXIT_DOMAIN, EXIT_NONCONV = 0, 1, 2, 3


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors (exit 1), not domain errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    trunc: TruncationSpec
    window: Optional[StripWindow]
    grid: Optional[Tuple[int, int]]
    workers: int
    output_path: str
    format: str
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not self.output_path:
            raise ConfigError("output path must be non-empty")
        if (self.grid is not None) != (self.command == "condition-scan"):
            raise ConfigError("a grid is given exactly for condition-scan")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")

    def digest(self) -> str:
        """Hash of everything that determines the numbers (not workers or output)."""
        return config_hash({
            "command": self.command, "trunc": asdict(self.trunc),
            "window": asdict(self.window) if self.window else None,
            "grid": list(self.grid) if self.grid else None,
            "params": {k: (str(v) if isinstance(v, CPoint) else v)
                       for k, v in self.params.items() if k != "plot"},
        })


def read_config_file(path) -> Dict[str, Any]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out: Dict[str, Any] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = _coerce(key, value)
    return out


def _coerce(key: str, value):
    try:
        if key in _INT_KEYS:
            return int(float(value)) if float(value).is_integer() else float(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return value


def _resolve(args: argparse.Namespace, key: str, file_cfg: Dict[str, Any]):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key == "workers" and os.environ.get("CSL_WORKERS"):
        try:
            return int(os.environ["CSL_WORKERS"])
        except ValueError as exc:
            raise ConfigError(f"CSL_WORKERS must be an integer, got {os.environ['CSL_WORKERS']!r}") from exc
    if key in file_cfg:
        return file_cfg[key]
    return DEFAULTS.get(key)


def _point(text: Optional[str], what: str = "--s") -> CPoint:
    if text is None:
        raise ConfigError(f"{what} x,y is required")
    try:
        return CPoint.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ------------------------------------------------------------- commands

def _c(value: complex, prefix: str) -> Dict[str, float]:
    return {f"{prefix}_re": float(value.real), f"{prefix}_im": float(value.imag)}


def _cmd_zeta(cfg: RunConfig):
    from . import zeta as Z
    s = cfg.params["s"]
    route = cfg.params["route"]
    routes = ["eta", "dirichlet", "euler"] if route == "all" else [route]
    records, first = [], None
    for r in routes:
        if r == "eta":
            val, err = Z.zeta_from_eta(s, cfg.trunc.tol), cfg.trunc.tol / abs(1 - 2 ** (1 - s.s))
        elif r == "dirichlet":
            val = Z.zeta_dirichlet(s, cfg.trunc.N)
            err = Z.dirichlet_tail_bound(s.x, cfg.trunc.N)
        elif r == "euler":
            val = Z.zeta_euler_product(s, cfg.trunc.P)
            err = Z.euler_product_tail_bound(s.x, cfg.trunc.P, val)
        else:
            raise ConfigError(f"unknown route {r!r}")
        first = val if first is None else first
        records.append(({"x": s.x, "y": s.y, "route": r}, _c(val, "value"), {"error_bound": err}))
    return records, f"zeta({s}) = {_fmt(first)}", EXIT_OK, None


def _cmd_eta(cfg: RunConfig):
    from .zeta import eta
    s = cfg.params["s"]
    ev = eta(s, cfg.trunc.tol)
    rec = ({"x": s.x, "y": s.y}, {**_c(ev.value, "value"), "terms_used": ev.terms_used},
           {"error_estimate": ev.error_estimate})
    return [rec], f"eta({s}) = {_fmt(ev.value)}", EXIT_OK, None


def _cmd_fe(cfg: RunConfig):
    from . import zeros
    s, s2 = cfg.params["s"], cfg.params.get("s2")
    if s2 is not None:
        chk = zeros.fe_residual_region_a(s, s2, cfg.trunc)
        exact = zeros.fe_residual_region_a(s, s2, cfg.trunc, exact_zeta=True)
        rec = ({"x1": s.x, "y1": s.y, "x2": s2.x, "y2": s2.y, "N": cfg.trunc.N, "form": "region_a"},
               {"residual_matched": chk.residual, "residual_exact": exact.residual},
               {"tail_bound": chk.tail_bound})
        ok = exact.residual <= chk.tail_bound
        line = f"region A residual = {chk.residual:.3g} (exact zeta {exact.residual:.3g} <= bound {chk.tail_bound:.3g}: {ok})"
    else:
        res = zeros.fe_residual_strip(s, cfg.trunc)
        rec = ({"x": s.x, "y": s.y, "N": cfg.trunc.N, "K": cfg.trunc.K, "passes": cfg.trunc.passes,
                "form": "strip"}, {"residual": res}, {})
        line = f"strip residual at {s} = {res:.3g}"
    return [rec], line, EXIT_OK, None


def _cmd_scan(cfg: RunConfig):
    from .zeros import scan_condition
    nx, ny = cfg.grid
    summary = scan_condition(ScanGrid(cfg.window, nx, ny), cfg.trunc, cfg.workers)
    recs = [({"x": r.point.x, "y": r.point.y, "N": cfg.trunc.N, "K": cfg.trunc.K, "passes": cfg.trunc.passes},
             {"condition_value": r.condition_value, "deviation": r.deviation, "below_half": r.condition_value < 0.5},
             {"error_estimate": r.error_estimate}) for r in summary.reports]
    line = (f"condition max = {summary.max_value:.8g} at {summary.argmax} "
            f"over {len(recs)} points (below 1/2: {summary.max_value < 0.5})")
    return recs, line, EXIT_OK, None


def _cmd_log_square(cfg: RunConfig):
    from .zeros import log_square_check
    passes = cfg.params.get("passes_override") or 1
    res = log_square_check(cfg.trunc.K, cfg.trunc.N, passes)
    rec = ({"K": res.K, "N": res.N, "passes": res.passes},
           {"value": res.value, "target": res.target}, {"abs_error": res.error})
    return [rec], f"folded sum at s=1: {res.value:.8g} (target {res.target:.8g}, error {res.error:.2g})", EXIT_OK, None


def _cmd_summability(cfg: RunConfig):
    from . import summability as S
    p = cfg.params
    n, A, x, y = p["n"], p["A"], p["x"], p["y"]
    D = 64 * n
    mesh = S.Mesh(A, D)
    recs = []
    mb = S.mean_phi_bound(n, x, y, cfg.trunc.K, mesh, passes=cfg.trunc.passes)
    recs.append(("mean_phi", mb.value_at_1, mb.limit, mb.ok))
    for M in sorted({64, 256, 1024, cfg.trunc.M}):
        cd = S.cesaro_difference_check(1.0, cfg.trunc.N if cfg.trunc.N <= 2000 else 2000, M, x, y)
        recs.append((f"cesaro_difference_M{M}", cd.lhs, cd.rhs, cd.ok))
    ab = S.abel_column_bound_check(cfg.trunc.N, cfg.trunc.L, x, y, 1.0)
    recs.append(("abel_column", ab.lhs, ab.rhs, ab.ok))
    for m in (1, 2, 3):
        chi = S.chi_basis(n, m, A)
        res = S.antiperiodicity_residual(chi, n)
        recs.append((f"antiperiodic_m{m}", res, 1e-12, res <= 1e-12))
    rows = [({"check": name, "n": n, "x": x, "y": y, "A": A}, {"value": float(v), "bound": float(b), "ok": bool(ok)}, {})
            for name, v, b, ok in recs]
    passed = sum(1 for *_, ok in recs if ok)
    return rows, f"summability checks: {passed}/{len(recs)} ok", EXIT_OK, None


def _cmd_zeros(cfg: RunConfig):
    import numpy as np
    from .zeta import eta_critical_line, locate_critical_zeros
    T, step, tol = cfg.params["T"], cfg.params["coarse_step"], cfg.params["zero_tol"]
    ys = locate_critical_zeros(T, step, tol)
    recs = [({"T": T, "coarse_step": step, "index": i + 1}, {"y": y, "abs_eta": abs(eta_critical_line(y, 1e-13))}, {})
            for i, y in enumerate(ys)]
    extra = None
    if cfg.params.get("plot"):
        grid = np.arange(step, T + step / 2, step)
        extra = (grid, [max(abs(eta_critical_line(g, 1e-12)), 1e-16) for g in grid])
    line = f"{len(ys)} zeros up to T={T:g}: " + ", ".join(f"{y:.8g}" for y in ys)
    return recs, line, EXIT_OK, extra


def _cmd_pringsheim(cfg: RunConfig):
    from . import pringsheim as PR
    s, kernel_name, P = cfg.params["s"], cfg.params["kernel"], cfg.trunc.N
    kernel = {"alternating": lambda: PR.alternating_kernel(s), "inverse-square": PR.inverse_square_kernel,
              "grandi": PR.grandi_kernel}.get(kernel_name)
    if kernel is None:
        raise ConfigError(f"unknown kernel {kernel_name!r}")
    k = kernel()
    sched = PR.diagonal_schedule(P)
    v = PR.pringsheim_limit(k, sched, cfg.trunc.tol)
    res = {**_c(v.pringsheim_estimate, "estimate"), **_c(v.extrapolated, "extrapolated"),
           **_c(v.row_estimate, "row_estimate"), **_c(v.column_estimate, "column_estimate"),
           "pringsheim_ok": v.pringsheim_ok, "row_ok": v.row_ok, "column_ok": v.column_ok}
    rec = ({"kernel": kernel_name, "x": s.x, "y": s.y, "P": P, "tol": cfg.trunc.tol},
           res, {"residual": v.residual, "extrapolation_error": v.extrapolation_error})
    status = EXIT_OK if v.pringsheim_ok else EXIT_NONCONV
    line = (f"{kernel_name} kernel: rectangle {_fmt(v.pringsheim_estimate)}, extrapolated "
            f"{_fmt(v.extrapolated)}, pringsheim_ok={v.pringsheim_ok}")
    extra = ([p for p, _ in sched], [PR.partial_sum_rect(k, p, q).real for p, q in sched]) \
        if cfg.params.get("plot") else None
    return [rec], line, status, extra


_HANDLERS: Dict[str, Callable] = {
    "zeta-eval": _cmd_zeta, "eta-eval": _cmd_eta, "fe-verify": _cmd_fe, "condition-scan": _cmd_scan,
    "appendix-c": _cmd_log_square, "summability-check": _cmd_summability,
    "zeros-locate": _cmd_zeros, "pringsheim-check": _cmd_pringsheim,
}


def _fmt(value) -> str:
    value = complex(value)
    if value.imag == 0:
        return f"{value.real:.8g}"
    return f"{value.real:.8g}{value.imag:+.8g}i"


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="critstrip", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value settings file")
    common.add_argument("--output", "-o", help="report path (default <command>.<format>)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--workers", type=int)
    for key in ("N", "K", "L", "M", "P", "passes"):
        common.add_argument(f"--{key}", type=int, dest=key)
    common.add_argument("--tol", type=float)
    common.add_argument("--plot", action="store_true", help="also write a PNG next to the report")
    common.add_argument("--timing", action="store_true", help="record wall time in the report")

    p = sub.add_parser("zeta-eval", parents=[common], help="zeta(s) by a chosen route (--route all runs every one)")
    p.add_argument("--s", required=True, help="x,y")
    p.add_argument("--route", choices=["eta", "dirichlet", "euler", "all"])
    p = sub.add_parser("eta-eval", parents=[common], help="accelerated eta(s)")
    p.add_argument("--s", required=True, help="x,y")
    p = sub.add_parser("fe-verify", parents=[common], help="functional-equation residuals")
    p.add_argument("--s", required=True, help="x,y")
    p.add_argument("--s2", help="second point x,y for the Re(s) > 1 form")
    p = sub.add_parser("condition-scan", parents=[common], help="alternating Z-sum over the strip window")
    p.add_argument("--eps", type=float)
    p.add_argument("--T", type=float, dest="T")
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    sub.add_parser("appendix-c", parents=[common], help="folded double series at s = 1")
    p = sub.add_parser("summability-check", parents=[common], help="operator and Cesaro checks")
    p.add_argument("--n", type=int)
    p.add_argument("--A", type=float, dest="A")
    p.add_argument("--s", help="x,y (default 0.75,10)")
    p = sub.add_parser("zeros-locate", parents=[common], help="zeros of eta on the critical line")
    p.add_argument("--T", type=float, dest="T")
    p.add_argument("--coarse-step", type=float, dest="coarse_step")
    p.add_argument("--zero-tol", type=float, dest="zero_tol")
    p = sub.add_parser("pringsheim-check", parents=[common], help="rectangle-sum convergence verdict")
    p.add_argument("--s", help="x,y (default 0.75,10)")
    p.add_argument("--kernel", choices=["alternating", "inverse-square", "grandi"])
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    file_cfg = read_config_file(args.config) if args.config else {}
    get = lambda key: _resolve(args, key, file_cfg)  # noqa: E731
    try:
        trunc = TruncationSpec(N=get("N"), K=get("K"), L=get("L"), M=get("M"), P=get("P"),
                               tol=get("tol"), passes=get("passes"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    cmd = args.command
    fmt = get("format")
    params: Dict[str, Any] = {}
    window = grid = None
    if cmd in ("zeta-eval", "eta-eval", "fe-verify"):
        params["s"] = _point(args.s)
    if cmd in ("pringsheim-check", "summability-check"):
        params["s"] = _point(get("s"))
    if cmd == "zeta-eval":
        params["route"] = get("route")
    if cmd == "fe-verify" and args.s2:
        params["s2"] = _point(args.s2, "--s2")
    if cmd == "condition-scan":
        try:
            window = StripWindow(get("eps"), get("T"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        grid = (get("nx"), get("ny"))
        if grid[0] < 1 or grid[1] < 1:
            raise ConfigError(f"nx and ny must be >= 1, got {grid}")
    if cmd == "zeros-locate":
        params.update(T=get("T"), coarse_step=get("coarse_step"), zero_tol=get("zero_tol"))
    if cmd == "summability-check":
        params.update(n=get("n"), A=get("A"), x=params["s"].x, y=params["s"].y)
    if cmd == "pringsheim-check":
        params["kernel"] = get("kernel")
    if cmd == "appendix-c" and args.passes is not None:
        params["passes_override"] = args.passes
    params["plot"] = bool(args.plot)
    output = args.output or get("output") or f"{cmd}.{fmt}"
    return RunConfig(cmd, trunc, window, grid, get("workers"), output, fmt, params)


def run(cfg: RunConfig, *, timing: bool = False) -> int:
    """Dispatch, write the report and print a one-line summary."""
    digest = cfg.digest()
    start = time.perf_counter()
    extra = None
    try:
        rows, line, status, extra = _HANDLERS[cfg.command](cfg)
    except DomainError as exc:
        rows, line, status = [({}, {"status": "error", "error_type": type(exc).__name__}, {})], None, EXIT_DOMAIN
        print(f"{cfg.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
    except NonConvergence as exc:
        rows, line, status = [({}, {"status": "error", "error_type": type(exc).__name__}, {})], None, EXIT_NONCONV
        print(f"{cfg.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
    elapsed = time.perf_counter() - start
    records = []
    for inputs, results, errors in rows:
        if status in (EXIT_OK, EXIT_NONCONV) and "status" not in results:
            results = {"status": "ok" if status == EXIT_OK else "not_converged", **results}
        records.append(ReportRecord(cfg.command, _inputs_for(cfg, inputs), results, errors,
                                    config_hash=digest, wall_time=elapsed if timing else None))
    path = write_report(records, cfg.format, cfg.output_path)
    if cfg.params.get("plot") and status in (EXIT_OK, EXIT_NONCONV):
        from .plotting import plot_records
        plot_records(cfg.command, [r.flat() for r in records], path, extra)
    if line:
        print(line)
    return status


def _inputs_for(cfg: RunConfig, inputs: Dict[str, Any]) -> Dict[str, Any]:
    if inputs:
        return inputs
    s = cfg.params.get("s")
    return {"x": s.x, "y": s.y} if isinstance(s, CPoint) else {}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        return run(cfg, timing=args.timing)
    except ConfigError as exc:
        print(f"{args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"{args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
