"""Command-line driver.

Exit status: 0 success, 1 verify failure, 2 bad arguments, 3 computation or
I/O error. Output is deterministic for fixed flags; random test functions are
drawn from ``numpy.random.default_rng(--seed)``.

CSV columns per subcommand:

    graph      index, k, x, y, power
    measure    level, kind, index, value
    energy     level, mode, function, value
    harmonic   level, raw, renormalized, measured, raw_ratio
    laplacian  quantity, level, point_level, point_k, value
    spectrum   level, segment, k, lambda_tilde, lambda_physical, residual
    decimate   step, path, lambda_tilde
    bounds     level, word, edge, width, height, lower, upper, ok
    verify     criterion, name, passed, detail
"""

from __future__ import annotations

import argparse
import logging
import sys
import traceback
from dataclasses import dataclass

import numpy as np

from .bounds import height_records
from .energy import EnergyMode, energy, harmonic_extension
from .errors import ParameterDomainError, WeierstrassGraphError
from .export import (
    dumps_csv,
    dumps_json,
    export_graph_json,
    render_eigenfunction,
    render_levels,
    table_document,
)
from .ifs import MAX_LEVEL, build_level
from .laplacian import DIRICHLET_SETS, gauss_green_terms, normal_derivative, renormalized_laplacian_seq, restrict
from .measure import measure_table, replication_weights
from .params import FractalParams
from .spectral import branch_phases, decimate_forward, direct_spectrum, from_phase, physical_eigenvalue
from .verify import run_suite

log = logging.getLogger("weierstrass_graph")

COMMANDS = ("graph", "measure", "energy", "harmonic", "laplacian", "spectrum",
            "decimate", "bounds", "render", "verify")
DEFAULT_FORMAT = {"graph": "json", "render": "svg"}
SVG_COMMANDS = ("graph", "render")


@dataclass(frozen=True)
class RunConfig:
    params: FractalParams
    level: int
    tol: float
    seed: int
    command: str
    output: str
    fmt: str
    dirichlet: str
    branch: str
    mode: str
    lambda_tilde: float | None
    steps: int


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", type=float, default=0.5, help="amplitude ratio, 0 < lambda < 1")
    common.add_argument("--nb", type=int, default=3, help="frequency ratio, integer n_b >= 3")
    common.add_argument("--level", type=int, default=2, help="graph level m")
    common.add_argument("--tol", type=float, default=1e-8, help="convergence tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for random test functions")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "svg"), default=None)
    common.add_argument("--output", default="-", help="output file, '-' for stdout")
    common.add_argument("--dirichlet", choices=DIRICHLET_SETS, default="v0")
    common.add_argument("--branch", choices=("principal", "all"), default="principal")
    common.add_argument("--mode", choices=[m.value for m in EnergyMode], default=None)
    common.add_argument("--lambda-tilde", dest="lambda_tilde", type=float, default=None,
                        help="dimensionless eigenvalue (decimate start value, render eigenfunction)")
    common.add_argument("--steps", type=int, default=1, help="decimation steps")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="weierstrass-graph",
        description="Prefractal graphs of the Weierstrass function: measures, energies, Laplacians, spectra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    try:
        params = FractalParams(args.lam, args.nb)
    except ParameterDomainError as exc:
        raise UsageError(str(exc)) from exc
    fmt = args.fmt or DEFAULT_FORMAT.get(args.command, "csv")
    if fmt == "svg" and args.command not in SVG_COMMANDS:
        raise UsageError(f"--format svg is only available for {', '.join(SVG_COMMANDS)}")
    if args.command == "render" and fmt != "svg":
        raise UsageError("render only writes svg")
    if not 0 <= args.level <= MAX_LEVEL:
        raise UsageError(f"--level must be in 0..{MAX_LEVEL}, got {args.level}")
    if not args.tol > 0:
        raise UsageError(f"--tol must be > 0, got {args.tol}")
    if args.steps < 0:
        raise UsageError(f"--steps must be >= 0, got {args.steps}")
    if args.command == "decimate" and args.lambda_tilde is None:
        raise UsageError("decimate needs --lambda-tilde")
    return RunConfig(params, args.level, args.tol, args.seed, args.command, args.output, fmt,
                     args.dirichlet, args.branch, args.mode, args.lambda_tilde, args.steps)


def _table(cfg: RunConfig, columns, rows) -> str:
    rows = list(rows)
    if cfg.fmt == "json":
        return dumps_json(table_document(cfg.command, cfg.params, columns, rows, cfg.level))
    return dumps_csv(columns, rows)


def cmd_graph(cfg: RunConfig) -> str:
    level = build_level(cfg.params, cfg.level)
    if cfg.fmt == "svg":
        return render_levels([level])
    if cfg.fmt == "json":
        return dumps_json(export_graph_json(level, measure_table(level)))
    rows = zip(level.k.tolist(), level.k.tolist(), level.x.tolist(), level.y.tolist(), level.powers.tolist())
    return dumps_csv(["index", "k", "x", "y", "power"], rows)


def cmd_measure(cfg: RunConfig) -> str:
    rows = []
    for m in range(cfg.level + 1):
        table = measure_table(build_level(cfg.params, m))
        rows += [(m, "polygon_measure", j, v) for j, v in enumerate(table.polygon_measure.tolist())]
        rows += [(m, "vertex_cell", i, v) for i, v in enumerate(table.vertex_cell.tolist())]
        if m >= 1:
            rows += [(m, "replication_weight", i, v)
                     for i, v in enumerate(replication_weights(cfg.params, m).tolist())]
        rows.append((m, "total", 0, table.total))
    return _table(cfg, ["level", "kind", "index", "value"], rows)


def _test_functions(cfg: RunConfig, level):
    rng = np.random.default_rng(cfg.seed)
    return {
        "abscissa": level.x,
        "ordinate": level.y,
        "random": rng.normal(size=level.n_vertices),
    }


def cmd_energy(cfg: RunConfig) -> str:
    modes = [EnergyMode(cfg.mode)] if cfg.mode else list(EnergyMode)
    rows = []
    for m in range(cfg.level + 1):
        level = build_level(cfg.params, m)
        for name, u in _test_functions(cfg, level).items():
            for mode in modes:
                rows.append((m, mode.value, name, energy(level, u, mode=mode)))
    return _table(cfg, ["level", "mode", "function", "value"], rows)


def cmd_harmonic(cfg: RunConfig) -> str:
    """Random level-0 data extended harmonically up to --level."""
    rng = np.random.default_rng(cfg.seed)
    level = build_level(cfg.params, 0)
    u = rng.normal(size=level.n_vertices)
    rows, prev = [], None
    while True:
        e = {mode: energy(level, u, mode=mode) for mode in EnergyMode}
        ratio = e[EnergyMode.RAW] / prev if prev else None
        rows.append((level.m, e[EnergyMode.RAW], e[EnergyMode.RENORMALIZED], e[EnergyMode.MEASURED], ratio))
        prev = e[EnergyMode.RAW]
        if level.m >= cfg.level:
            break
        u = harmonic_extension(level, u)
        level = build_level(cfg.params, level.m + 1)
    return _table(cfg, ["level", "raw", "renormalized", "measured", "raw_ratio"], rows)


def cmd_laplacian(cfg: RunConfig) -> str:
    """Renormalized Laplacian of x^2 at the first level-1 interior vertex,
    normal derivatives of x^2 at V_0, and a Gauss-Green residual."""
    if cfg.level < 1:
        raise UsageError("laplacian needs --level >= 1")
    u = restrict(lambda x, y: x**2)
    levels = list(range(1, cfg.level + 1))
    rows = [("renormalized_laplacian", m, 1, 1, v)
            for m, v in zip(levels, renormalized_laplacian_seq(cfg.params, u, 1, 1, levels))]
    for i in range(cfg.params.n_b):
        rep = normal_derivative(cfg.params, u, 0, i, levels, cfg.tol)
        rows += [("normal_derivative", k, 0, i, v) for k, v in zip(rep.levels, rep.approximants)]
    level = build_level(cfg.params, cfg.level)
    rng = np.random.default_rng(cfg.seed)
    t = gauss_green_terms(level, rng.normal(size=level.n_vertices), rng.normal(size=level.n_vertices),
                          cfg.dirichlet)
    rows.append(("gauss_green_residual", cfg.level, None, None, t.residual))
    return _table(cfg, ["quantity", "level", "point_level", "point_k", "value"], rows)


def cmd_spectrum(cfg: RunConfig) -> str:
    pairs = direct_spectrum(cfg.params, cfg.level, cfg.dirichlet)
    rows = [(p.m, p.segment, p.k_index, p.lambda_tilde,
             physical_eigenvalue(cfg.params, p.lambda_tilde, p.m), p.residual) for p in pairs]
    return _table(cfg, ["level", "segment", "k", "lambda_tilde", "lambda_physical", "residual"], rows)


def _decimate_rows(cfg: RunConfig):
    rows = [(0, "", cfg.lambda_tilde)]
    frontier = [("", cfg.lambda_tilde)]
    n = cfg.params.n_b
    for step in range(1, cfg.steps + 1):
        nxt = []
        for path, lt in frontier:
            prefix = path + "." if path else ""
            if cfg.branch == "all" and 0.0 < lt < 4.0:
                nxt += [(f"{prefix}{j}", from_phase(t)) for j, t in enumerate(branch_phases(lt, n))]
            else:
                nxt.append((f"{prefix}0", decimate_forward(lt, n)))
        rows += [(step, p, v) for p, v in nxt]
        frontier = nxt
    return rows


def cmd_decimate(cfg: RunConfig) -> str:
    return _table(cfg, ["step", "path", "lambda_tilde"], _decimate_rows(cfg))


def cmd_bounds(cfg: RunConfig) -> str:
    rows = []
    for m in range(cfg.level + 1):
        for r in height_records(cfg.params, m):
            rows.append((m, "".join(map(str, r.word)), r.j, r.width, r.height,
                         r.lower_bound, r.upper_bound, r.ok))
    bad = sum(1 for r in rows if not r[-1])
    if bad:
        log.warning("%d of %d cell heights outside the bounds", bad, len(rows))
    return _table(cfg, ["level", "word", "edge", "width", "height", "lower", "upper", "ok"], rows)


def cmd_render(cfg: RunConfig) -> str:
    if cfg.lambda_tilde is None:
        return render_levels([build_level(cfg.params, m) for m in range(cfg.level + 1)])
    if cfg.level < 1:
        raise UsageError("eigenfunction rendering needs --level >= 1")
    pairs = direct_spectrum(cfg.params, cfg.level, cfg.dirichlet)
    best = min(pairs, key=lambda p: (abs(p.lambda_tilde - cfg.lambda_tilde), p.segment))
    return render_eigenfunction(build_level(cfg.params, cfg.level), best.eigenfunction, best.lambda_tilde)


HANDLERS = {
    "graph": cmd_graph,
    "measure": cmd_measure,
    "energy": cmd_energy,
    "harmonic": cmd_harmonic,
    "laplacian": cmd_laplacian,
    "spectrum": cmd_spectrum,
    "decimate": cmd_decimate,
    "bounds": cmd_bounds,
    "render": cmd_render,
}


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _origin(exc: BaseException) -> str:
    """Name of the innermost package module in the traceback."""
    name = "weierstrass_graph"
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        mod = frame.f_globals.get("__name__", "")
        if mod.startswith("weierstrass_graph"):
            name = mod
    return name


def run_command(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = make_config(args)
        if cfg.command == "verify":
            results = run_suite(cfg.seed)
            for r in results:
                print(r.line())
            if cfg.output != "-":
                rows = [(r.criterion, r.name, r.passed, r.detail) for r in results]
                _write(_table(cfg, ["criterion", "name", "passed", "detail"], rows), cfg.output)
            return 0 if all(r.passed for r in results) else 1
        _write(HANDLERS[cfg.command](cfg), cfg.output)
        return 0
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"{_origin(exc)}: I/O error: {exc}", file=sys.stderr)
        return 3
    except (WeierstrassGraphError, ValueError, ArithmeticError, MemoryError) as exc:
        print(f"{_origin(exc)}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run_command())
