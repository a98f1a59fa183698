"""Command-line front end: ``example``, ``run``, ``compare`` and ``sweep``.

Exit codes: 0 success, 1 invalid arguments/config, 2 worked-example mismatch,
3 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .example import check_against_published, run_example
from .granules import PreconditionError
from .grid import Grid, MessageAccounting
from .simulation import METRICS, ConfigError, SimConfig, run_batch, run_simulation, sweep
from .tracking import MotionParams, TrackerConfig

FORMAT_VERSION = 1
EXIT_OK, EXIT_INVALID, EXIT_MISMATCH, EXIT_IO = 0, 1, 2, 3

TRAJECTORY_COLUMNS = ["step", "sink_x", "sink_y", "target_x", "target_y", "hop_count", "active_time"]
STAT_COLUMNS = ["n", "not_caught"] + [f"{m}_{s}" for m in METRICS for s in ("mean", "sd")]
COMPARE_COLUMNS = ["algorithm", "vp"] + STAT_COLUMNS
SWEEP_COLUMNS = ["alpha", "beta", "gamma"] + STAT_COLUMNS


@dataclass
class ExperimentSpec:
    """Everything needed to replay one command invocation."""

    command: str
    config: dict = field(default_factory=dict)
    runs: int = 1
    axes: dict = field(default_factory=dict)
    velocities: list = field(default_factory=list)
    out: str | None = None
    trajectory: str | None = None
    format: str = "csv"


def _pair(text: str, sep: str = ",") -> tuple[int, int]:
    try:
        a, b = text.split(sep)
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers separated by '{sep}', got {text!r}")


def _grid(text: str) -> tuple[int, int]:
    return _pair(text.lower(), "x")


def _onoff(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _axis(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:step`` (stop inclusive)."""
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            start, stop, step = (float(t) for t in text.split(":"))
            if step <= 0:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            return [round(start + k * step, 10) for k in range(max(count, 0))]
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad axis specification {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wsn-extract", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--alg", type=int, default=5, help="tracking algorithm 1-5")
    sim.add_argument("--vp", type=int, default=3, help="target speed (segments/step)")
    sim.add_argument("--v", type=int, default=4, help="sink speed (segments/step)")
    sim.add_argument("--alpha", type=float, default=0.15)
    sim.add_argument("--beta", type=float, default=2.0)
    sim.add_argument("--gamma", type=float, default=1.3)
    sim.add_argument("--strategy", choices=["exhaustive", "minimum"], default=None)
    sim.add_argument("--seed", type=int, default=0, help="run seed, or base seed of a batch")
    sim.add_argument("--runs", type=int, default=100, help="replications per cell")
    sim.add_argument("--grid", type=_grid, default=(200, 200), metavar="WxH")
    sim.add_argument("--sink", type=_pair, default=(160, 160), metavar="X,Y")
    sim.add_argument("--target", type=_pair, default=(66, 66), metavar="X,Y")
    sim.add_argument("--max-steps", type=int, default=None)
    sim.add_argument("--count-queries", type=_onoff, default=True, metavar="on|off")
    sim.add_argument("--local-activation", type=_onoff, default=True, metavar="on|off")
    sim.add_argument("--out", default=None, metavar="PATH", help="output file (default stdout)")
    sim.add_argument("--format", choices=["csv", "json"], default=None)

    sub.add_parser("example", help="worked predator/prey example with self-check")
    r = sub.add_parser("run", parents=[sim], help="single simulation run")
    r.add_argument("--trajectory", default=None, metavar="PATH", help="per-step CSV trajectory")
    c = sub.add_parser("compare", parents=[sim], help="all algorithms over several target speeds")
    c.add_argument("--velocities", type=_axis, default=[1.0, 2.0, 3.0])
    s = sub.add_parser("sweep", parents=[sim], help="alpha x beta x gamma parameter sweep")
    s.add_argument("--alphas", type=_axis, default=None)
    s.add_argument("--betas", type=_axis, default=None)
    s.add_argument("--gammas", type=_axis, default=None)
    return p


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    if args.command == "example":
        return ExperimentSpec(command="example")
    config = {
        "algorithm": args.alg, "vp": args.vp, "v": args.v, "alpha": args.alpha,
        "beta": args.beta, "gamma": args.gamma, "strategy": args.strategy, "seed": args.seed,
        "grid": list(args.grid), "sink": list(args.sink), "target": list(args.target),
        "max_steps": args.max_steps, "count_queries": args.count_queries,
        "local_activation": args.local_activation,
    }
    spec = ExperimentSpec(command=args.command, config=config, runs=args.runs, out=args.out,
                          format=args.format or ("json" if args.command == "run" else "csv"))
    if args.command == "run":
        spec.trajectory = args.trajectory
        spec.runs = 1
    elif args.command == "compare":
        spec.velocities = [int(v) for v in args.velocities]
    elif args.command == "sweep":
        spec.axes = {
            "alpha": args.alphas if args.alphas is not None else [args.alpha],
            "beta": args.betas if args.betas is not None else [args.beta],
            "gamma": args.gammas if args.gammas is not None else [args.gamma],
        }
    return spec


def sim_config(spec: ExperimentSpec, **overrides) -> SimConfig:
    """Build and validate a :class:`SimConfig`; raises :class:`ConfigError` listing every problem."""
    c = {**spec.config, **overrides}
    problems = []
    parts = {}
    for key, build in (
        ("grid", lambda: Grid(*c["grid"])),
        ("params", lambda: MotionParams(v=c["v"], vp=c["vp"])),
        ("tracker", lambda: TrackerConfig(algorithm=c["algorithm"], alpha=c["alpha"],
                                          beta=c["beta"], gamma=c["gamma"],
                                          strategy=c["strategy"])),
    ):
        try:
            parts[key] = build()
        except PreconditionError as e:
            problems.append(str(e))
    if spec.runs < 1:
        problems.append("--runs must be >= 1")
    if problems:
        raise ConfigError(problems)
    cfg = SimConfig(
        grid=parts["grid"], sink_start=tuple(c["sink"]), target_start=tuple(c["target"]),
        params=parts["params"], tracker=parts["tracker"], seed=c["seed"],
        max_steps=c["max_steps"],
        accounting=MessageAccounting(c["count_queries"], c["local_activation"]),
    )
    cfg.validate()
    return cfg


def _fmt(x) -> str:
    if isinstance(x, float):
        if x != x:
            return "nan"
        return repr(round(x, 6))
    return str(x)


def _csv_text(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")


def _table_output(spec: ExperimentSpec, columns: list[str], rows: list[dict]) -> None:
    if spec.format == "json":
        doc = {"version": FORMAT_VERSION, "experiment": asdict(spec), "columns": columns, "rows": rows}
        _write(spec.out, json.dumps(doc, indent=2) + "\n")
        return
    _write(spec.out, _csv_text(columns, rows))
    if spec.out is not None:
        meta = {"version": FORMAT_VERSION, "experiment": asdict(spec), "columns": columns}
        _write(spec.out + ".meta.json", json.dumps(meta, indent=2) + "\n")


def trajectory_rows(result) -> list[dict]:
    rows = []
    for k, (s, t, led) in enumerate(zip(result.sink_trajectory, result.target_trajectory, result.cumulative)):
        rows.append({"step": k, "sink_x": s[0], "sink_y": s[1], "target_x": t[0], "target_y": t[1],
                     "hop_count": led["hop_count"], "active_time": led["active_time"]})
    return rows


def cmd_example(out=None) -> int:
    out = sys.stdout if out is None else out
    res = run_example()
    iv = lambda i: f"({i.lo:g},{i.hi:g})"
    print("Predator/prey worked example", file=out)
    print(f"{'readings':<18} {'granule':<16} {'F(1)':<8} {'F(2)':<8} a  UNC", file=out)
    for row in res.rows:
        h = row.hypothesis
        granule = f"{iv(row.granule[0])}x{iv(row.granule[1])}"
        readings = "(" + ",".join(map(str, row.readings)) + ")"
        print(f"{readings:<18} {granule:<16} {iv(h.forecast[0]):<8} {iv(h.forecast[1]):<8} "
              f"{h.decision.action + 1}  {h.decision.uncertainty:.2f}", file=out)
    print(f"F(1,S0) = {iv(res.baseline_forecast[0])}, F(2,S0) = {iv(res.baseline_forecast[1])}", file=out)
    print(f"P[F(1,S0) <= F(2,S0)] = {res.prob:.4f}", file=out)
    print(f"UNC(1,S0) = {res.baseline.uncertainty:.4f}", file=out)
    print(f"mean hypothesis UNC = {res.mean_unc:.4f}", file=out)
    print(f"dUNC = {res.delta_unc:.4f} (collect: {res.triggered})", file=out)
    print(f"exhaustive strategy: {sorted(res.exhaustive)}", file=out)
    print(f"minimum strategy: {sorted(res.minimum)}", file=out)
    errs = check_against_published(res)
    if errs:
        print("MISMATCH against published values:", file=out)
        for e in errs:
            print(f"  {e}", file=out)
        return EXIT_MISMATCH
    print("all values match the published example", file=out)
    return EXIT_OK


def cmd_run(spec: ExperimentSpec) -> int:
    cfg = sim_config(spec)
    result = run_simulation(cfg)
    if spec.format == "csv":
        _write(spec.out, _csv_text(TRAJECTORY_COLUMNS, trajectory_rows(result)))
    else:
        doc = {"version": FORMAT_VERSION, "experiment": asdict(spec), "config": cfg.to_dict(),
               "result": result.to_dict()}
        _write(spec.out, json.dumps(doc, indent=2) + "\n")
    if spec.trajectory:
        _write(spec.trajectory, _csv_text(TRAJECTORY_COLUMNS, trajectory_rows(result)))
    return EXIT_OK


def compare_rows(spec: ExperimentSpec) -> list[dict]:
    cfgs = {}
    for vp in spec.velocities:
        for alg in (1, 2, 3, 4, 5):
            cfgs[(alg, vp)] = sim_config(spec, algorithm=alg, vp=vp, strategy=None)
    rows = []
    for (alg, vp), cfg in cfgs.items():
        stats = run_batch(cfg, spec.runs, spec.config["seed"])
        rows.append({"algorithm": alg, "vp": vp, **stats.row()})
    return rows


def cmd_compare(spec: ExperimentSpec) -> int:
    _table_output(spec, COMPARE_COLUMNS, compare_rows(spec))
    return EXIT_OK


def sweep_rows(spec: ExperimentSpec) -> list[dict]:
    empty = [k for k, v in spec.axes.items() if not v]
    if empty:
        raise ConfigError([f"axis {k} is empty" for k in empty])
    cfg = sim_config(spec)
    for a in spec.axes["alpha"]:
        for b in spec.axes["beta"]:
            for g in spec.axes["gamma"]:
                sim_config(spec, alpha=a, beta=b, gamma=g)
    rows = []
    for (a, b, g), stats in sweep(cfg, spec.axes["alpha"], spec.axes["beta"], spec.axes["gamma"],
                                  spec.runs, spec.config["seed"]):
        rows.append({"alpha": a, "beta": b, "gamma": g, **stats.row()})
    return rows


def cmd_sweep(spec: ExperimentSpec) -> int:
    _table_output(spec, SWEEP_COLUMNS, sweep_rows(spec))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID
    try:
        if args.command == "example":
            return cmd_example()
        spec = spec_from_args(args)
        handler = {"run": cmd_run, "compare": cmd_compare, "sweep": cmd_sweep}[args.command]
        return handler(spec)
    except ConfigError as e:
        for problem in e.problems:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_INVALID
    except PreconditionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"error: cannot write {e.filename}: {e.strerror}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
