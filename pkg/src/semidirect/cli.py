"""Command-line interface: ``semidirect {simulate,verify,compare}``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime abort.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import math
import sys
from pathlib import Path

import jsonschema

from semidirect.dynamics import SOLVERS, SimulationConfig, TrajectoryRecord, breaking_indicator, initial_condition
from semidirect.dynamics import route_distance, simulate
from semidirect.errors import SimulationAbort
from semidirect.grid import Grid
from semidirect.lagrangian import PolytropicLaw
from semidirect.verify import SUITES, run_suite

logger = logging.getLogger("semidirect")

EXIT_OK, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2

_NUMBER = {"type": "number"}
CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["grid", "time"],
    "properties": {
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n"],
            "properties": {"n": {"type": "integer"}, "length": _NUMBER},
        },
        "law": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"kind": {"enum": ["polytropic"]}, "kappa": _NUMBER, "gamma": _NUMBER},
        },
        "time": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dt", "t_end"],
            "properties": {"dt": _NUMBER, "t_end": _NUMBER, "output_stride": {"type": "integer"}},
        },
        "solver": {"enum": list(SOLVERS)},
        "ic": {
            "type": "object",
            "additionalProperties": False,
            "required": ["name"],
            "properties": {"name": {"type": "string"}, "params": {"type": "object"}},
        },
    },
}

# characteristics cross when the indicator reaches 1; warn well before that
BREAKING_WARN = 0.5


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def load_config(path: str | Path, solver: str | None = None) -> SimulationConfig:
    """Read and validate a JSON run configuration."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {where}: {exc.message}") from None

    law = doc.get("law", {})
    time = doc["time"]
    ic = doc.get("ic", {"name": "acoustic"})
    try:
        grid = Grid(doc["grid"]["n"], doc["grid"].get("length", 2.0 * math.pi))
        return SimulationConfig(
            grid=grid,
            law=PolytropicLaw(law.get("kappa", 1.0), law.get("gamma", 1.4)),
            dt=time["dt"],
            t_end=time["t_end"],
            solver=solver or doc.get("solver", "flux_form"),
            ic_name=ic["name"],
            ic_params=ic.get("params", {}),
            output_stride=time.get("output_stride", 1),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_fields(record: TrajectoryRecord, path: Path) -> None:
    x = record.grid.nodes
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,x,rho,u,m\n")
        for k, t in enumerate(record.times):
            ts = _fmt(t)
            for i in range(len(x)):
                fh.write(f"{ts},{_fmt(x[i])},{_fmt(record.rho[k, i])},{_fmt(record.u[k, i])},{_fmt(record.m[k, i])}\n")


def write_diagnostics(record: TrajectoryRecord, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,mass,momentum,energy\n")
        for t, row in zip(record.times, record.diagnostics):
            fh.write(",".join(_fmt(v) for v in (t, *row)) + "\n")


def _warn_if_breaking(config: SimulationConfig) -> None:
    rho, u = initial_condition(config.grid, config.ic_name, config.ic_params)
    indicator = breaking_indicator(rho, u, config.law, config.t_end)
    if indicator >= BREAKING_WARN:
        logger.warning(
            "t_end * max|d_x(u +- c)| = %.2f: characteristics may cross before t_end; results past that are unreliable",
            indicator,
        )


def cmd_simulate(args) -> int:
    config = load_config(args.config, args.solver)
    _warn_if_breaking(config)
    record = simulate(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_fields(record, out / "fields.csv")
    write_diagnostics(record, out / "diagnostics.csv")
    mass, momentum, energy = (record.diagnostics[-1] - record.diagnostics[0]).tolist()
    print(
        f"{config.solver}: {len(record.times)} snapshots to t = {record.times[-1]:g}; "
        f"drift mass {mass:.3e}, momentum {momentum:.3e}, energy {energy:.3e}"
    )
    return EXIT_OK


def _parse_grids(text: str | None):
    if text is None:
        return None
    try:
        grids = [int(g) for g in text.split(",") if g.strip()]
    except ValueError:
        raise ConfigError(f"--grids must be comma-separated integers, got {text!r}") from None
    if not grids:
        raise ConfigError("--grids is empty")
    for n in grids:
        try:
            Grid(n)
        except ValueError as exc:
            raise ConfigError(f"--grids: {exc}") from None
    return grids


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}; expected one of {', '.join(SUITES)}")
    report = run_suite(args.suite, _parse_grids(args.grids), args.seed)
    if args.format == "json":
        # the report document has a fixed key set; the seed goes to stderr
        print(f"seed: {args.seed}", file=sys.stderr)
        sys.stdout.write(json.dumps(report.to_dict(), allow_nan=False) + "\n")
    else:
        print(report.to_text())
    return EXIT_OK if report.passed else EXIT_ABORT


def cmd_compare(args) -> int:
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    if len(solvers) < 2:
        raise ConfigError("--solvers needs at least two entries")
    unknown = [s for s in solvers if s not in SOLVERS]
    if unknown:
        raise ConfigError(f"unknown solver(s) {unknown}; expected from {SOLVERS}")
    config = load_config(args.config)
    _warn_if_breaking(config)
    records = {s: simulate(config.replace(solver=s)) for s in dict.fromkeys(solvers)}

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    worst = 0.0
    keys = ("linf_rho", "l2_rho", "linf_u", "l2_u")
    with (out / "compare.csv").open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,solver_a,solver_b," + ",".join(keys) + "\n")
        for a, b in itertools.combinations(solvers, 2):
            d = route_distance(records[a], records[b])
            for k, t in enumerate(records[a].times):
                fh.write(f"{_fmt(t)},{a},{b}," + ",".join(_fmt(d[key][k]) for key in keys) + "\n")
            final = max(d["linf_rho"][-1], d["linf_u"][-1])
            worst = max(worst, final)
            print(f"{a} vs {b}: final L-inf rho {d['linf_rho'][-1]:.3e}, u {d['linf_u'][-1]:.3e}")
    ok = worst <= args.threshold
    print(f"worst final distance {worst:.3e} {'<=' if ok else '>'} threshold {args.threshold:.3e}")
    return EXIT_OK if ok else EXIT_ABORT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="semidirect", description="Semidirect-product fluid mechanics on the circle.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="integrate one solver and write fields.csv and diagnostics.csv")
    p.add_argument("--config", required=True)
    p.add_argument("--solver", choices=SOLVERS, help="override the solver named in the config")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run an identity or convergence suite")
    p.add_argument("--suite", required=True, help=f"one of: {', '.join(SUITES)}")
    p.add_argument("--grids", help="comma-separated grid sizes, e.g. 64,128,256")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="run several solvers on one config and compare")
    p.add_argument("--config", required=True)
    p.add_argument("--solvers", required=True, help="comma-separated solver names")
    p.add_argument("--threshold", type=float, default=5e-4, help="pass if final L-inf distances are below this")
    p.add_argument("--out", default=".", help="output directory for compare.csv")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationAbort as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - last line of defence, keep exit codes meaningful
        logger.debug("unexpected failure", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
