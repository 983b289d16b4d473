"""Command-line interface.

Exit codes: 0 success, 1 runtime failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from datetime import datetime
from pathlib import Path

import numpy as np

from . import __version__
from .benchmarks import benchmark_suite
from .config import RunConfig, load_config
from .decoherence import average_state_fidelity
from .fidelity import CCZObjective, score
from .propagator import SubspacePropagator, propagate
from .pulses import ControlTable
from .sussade import ConfigError, OptimizerConfig, optimize

log = logging.getLogger("transmon_ccz")

OUTPUT_ENV = "TRANSMON_CCZ_OUTPUT"
EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(v) -> str:
    return format(float(v), ".17g")


def _write_csv(path: Path | None, header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    text = buf.getvalue()
    if path is not None:
        path.write_text(text)
    return text


def _output_root(args, cfg: RunConfig | None = None) -> Path:
    if getattr(args, "output_root", None):
        return Path(args.output_root)
    if os.environ.get(OUTPUT_ENV):
        return Path(os.environ[OUTPUT_ENV])
    return Path(cfg.output_dir if cfg is not None else "runs")


def make_run_dir(root: Path, label: str) -> Path:
    stamp = datetime.now().strftime("%Y%m%dT%H%M%S")
    root.mkdir(parents=True, exist_ok=True)
    for n in range(1000):
        path = root / (f"{label}-{stamp}" + (f"-{n}" if n else ""))
        try:
            path.mkdir()
            return path
        except FileExistsError:
            continue
    raise OSError(f"could not create a run directory under {root}")


def _load(args) -> RunConfig:
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = RunConfig.model_validate(cfg.model_dump() | {"optimizer": cfg.optimizer.model_dump() | {"seed": args.seed}})
    return cfg


def _objective(cfg: RunConfig, chain=None) -> CCZObjective:
    p = cfg.pulse
    return CCZObjective(chain or cfg.chain.build(), p.dt_ns, p.shape, p.sigma_ns, p.n_sub, cfg.fidelity.refine_phases)


def evaluate_table(cfg: RunConfig, table: ControlTable, chain=None) -> tuple[float, np.ndarray]:
    """Intrinsic fidelity and compensation phases of ``table`` under ``cfg``."""
    chain = chain or cfg.chain.build()
    u_comp = SubspacePropagator(chain, table.dt, table.shape, table.sigma, cfg.pulse.n_sub)(table.points)
    return score(u_comp, refine=cfg.fidelity.refine_phases)


def run_optimization(cfg: RunConfig, chain=None, progress: bool = False):
    chain = chain or cfg.chain.build()
    obj = _objective(cfg, chain)
    opt_cfg = cfg.optimizer_config()

    def report(row):
        if progress and row.generation % 100 == 0:
            log.info("generation %d  evaluations %d  best F %.6f", row.generation, row.evaluations, row.best_fitness)

    batch = None if cfg.optimizer.workers > 1 else obj.batch
    result = optimize(obj, opt_cfg, batch_objective=batch, workers=cfg.optimizer.workers, callback=report)
    table = cfg.pulse.table(result.best.x.reshape(chain.n_transmons, -1))
    return result, table


def _trace_rows(result):
    return [(r.generation, r.evaluations, r.best_fitness, r.mean_fitness) for r in result.trace]


def cmd_optimize(args) -> int:
    cfg = _load(args)
    chain = cfg.chain.build()
    run_dir = make_run_dir(_output_root(args, cfg), cfg.label)
    log.info("optimising %d parameters, writing to %s", cfg.dimension, run_dir)
    result, table = run_optimization(cfg, chain, progress=True)
    fidelity, phases = evaluate_table(cfg, table, chain)
    summary = {
        "label": cfg.label,
        "intrinsic_fidelity": fidelity,
        "phases_rad": phases.tolist(),
        "evaluations": result.evaluations,
        "generations": result.generations,
        "subspace_generations": result.subspace_generations,
        "stop_reason": result.stop_reason,
        "wall_time_s": result.wall_time,
        "config_hash": cfg.semantic_hash(),
        "seed": cfg.optimizer.seed,
    }
    if cfg.decoherence is not None:
        summary["average_state_fidelity"] = average_state_fidelity(
            chain, table, cfg.decoherence.t1_us, cfg.decoherence.t2_us, cfg.pulse.n_sub
        )
    table.save(run_dir / "pulse.json")
    _write_csv(run_dir / "trace.csv", ["generation", "evaluations", "best_fitness", "mean_fitness"], _trace_rows(result))
    (run_dir / "config.json").write_text(cfg.to_json())
    (run_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps({"run_dir": str(run_dir), **summary}))
    return EXIT_OK


def _load_pulse(path) -> ControlTable:
    try:
        return ControlTable.load(path)
    except OSError as exc:
        raise UsageError(f"{path}: cannot read pulse file: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}: invalid pulse JSON: {exc.msg}") from None
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{path}: invalid pulse file: {exc}") from None


def _check_pulse(cfg: RunConfig, table: ControlTable) -> None:
    expected = (cfg.chain.n_transmons, cfg.pulse.n_steps)
    if table.points.shape != expected:
        raise UsageError(f"pulse has shape {table.points.shape}, configuration expects {expected}")


def cmd_evaluate(args) -> int:
    cfg = _load(args)
    table = _load_pulse(args.pulse)
    _check_pulse(cfg, table)
    chain = cfg.chain.build()
    fidelity, phases = evaluate_table(cfg, table, chain)
    out = {"intrinsic_fidelity": fidelity, "phases_rad": phases.tolist(), "duration_ns": table.duration}
    t1 = args.t1 if args.t1 is not None else args.decohere
    t2 = args.t2 if args.t2 is not None else args.decohere
    if t1 is not None or t2 is not None:
        out["t1_us"], out["t2_us"] = t1, t2
        out["average_state_fidelity"] = average_state_fidelity(chain, table, t1, t2, cfg.pulse.n_sub, squared=args.squared)
    if args.dump_unitary:
        res = propagate(chain, table, cfg.pulse.n_sub)
        dump = {
            name: {"real": m.real.tolist(), "imag": m.imag.tolist()}
            for name, m in (("u_full", res.u_full), ("u_comp", res.u_comp))
        }
        Path(args.dump_unitary).write_text(json.dumps(dump))
    print(json.dumps(out))
    return EXIT_OK


def parse_grid(text: str) -> list[float]:
    try:
        grid = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"grid must be comma-separated numbers, got {text!r}") from None
    if not grid:
        raise UsageError("grid must contain at least one value")
    return grid


def _with(cfg: RunConfig, section: str, **changes) -> RunConfig:
    doc = cfg.model_dump()
    doc[section] = doc[section] | changes
    return RunConfig.model_validate(doc)


def cmd_sweep(args) -> int:
    cfg = _load(args)
    grid = parse_grid(args.grid)
    run_dir = make_run_dir(_output_root(args, cfg), f"{cfg.label}-sweep-{args.axis}")
    rows = []
    if args.axis == "coherence":
        if not args.pulse:
            raise UsageError("--pulse is required for a coherence sweep")
        table = _load_pulse(args.pulse)
        _check_pulse(cfg, table)
        chain = cfg.chain.build()
        if any(t <= 0 for t in grid):
            raise UsageError("coherence times must be positive")
        header = ["t_us", "average_state_fidelity"]
        for t in grid:
            rows.append((t, average_state_fidelity(chain, table, t, t, cfg.pulse.n_sub)))
    else:
        header = ["theta_ns", "n_steps", "best_fidelity", "evaluations"] if args.axis == "theta" else [
            "coupling_mhz", "best_fidelity", "evaluations"]
        for value in grid:
            if args.axis == "theta":
                n_steps = round(value / cfg.pulse.dt_ns)
                if n_steps < 1 or abs(n_steps * cfg.pulse.dt_ns - value) > 1e-9:
                    raise UsageError(f"gate time {value} ns is not a multiple of dt = {cfg.pulse.dt_ns} ns")
                point = _with(cfg, "pulse", n_steps=n_steps)
            else:
                if value < 0:
                    raise UsageError("coupling must be non-negative")
                point = _with(cfg, "chain", coupling_ghz=value / 1000.0)
            result, table = run_optimization(point)
            fidelity, _ = evaluate_table(point, table)
            rows.append((value, n_steps, fidelity, result.evaluations) if args.axis == "theta" else (value, fidelity, result.evaluations))
            table.save(run_dir / f"pulse_{args.axis}_{value:g}.json")
            log.info("%s = %g: F = %.6f after %d evaluations", args.axis, value, fidelity, result.evaluations)
    text = _write_csv(run_dir / f"sweep_{args.axis}.csv", header, rows)
    (run_dir / "config.json").write_text(cfg.to_json())
    sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.dim < 1:
        raise UsageError("--dim must be a positive integer")
    if args.budget < args.population:
        raise UsageError("--budget must cover at least one population")
    rows = []
    variants = {
        "sussade": dict(switch_s=0.14, subspace_dims=(1,), kappa1=0.1, kappa2=0.1),
        "de": dict(switch_s=0.0, kappa1=0.0, kappa2=0.0),
    }
    suite = benchmark_suite()
    names = args.functions.split(",") if args.functions else list(suite)
    for name in names:
        if name not in suite:
            raise UsageError(f"unknown benchmark {name!r}; choose from {sorted(suite)}")
        bench = suite[name]
        for algo, params in variants.items():
            for seed in range(args.seed, args.seed + args.seeds):
                cfg = OptimizerConfig(
                    dimension=args.dim,
                    lower=bench.lower,
                    upper=bench.upper,
                    population=args.population,
                    seed=seed,
                    max_evaluations=args.budget,
                    target_fitness=-args.tol,
                    **params,
                )
                res = optimize(bench.fitness, cfg, batch_objective=bench.batch_fitness)
                rows.append((name, algo, seed, args.dim, res.best.fitness, res.evaluations, res.generations))
    sys.stdout.write(_write_csv(None, ["function", "algorithm", "seed", "dimension", "best_fitness", "evaluations", "generations"], rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transmon-ccz", description="Design CCZ pulses for three coupled transmons.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="optimise a pulse and write a run directory")
    p.add_argument("config")
    p.add_argument("--seed", type=int, help="override the optimiser seed")
    p.add_argument("--output-root", help=f"directory for run folders (default: ${OUTPUT_ENV} or config output_dir)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("evaluate", help="score a stored pulse")
    p.add_argument("pulse")
    p.add_argument("config")
    p.add_argument("--decohere", type=float, metavar="T_US", help="T1 = T2 = T_US microseconds")
    p.add_argument("--t1", type=float, metavar="US")
    p.add_argument("--t2", type=float, metavar="US")
    p.add_argument("--squared", action="store_true", help="report the mean population instead of its square-root average")
    p.add_argument("--dump-unitary", metavar="PATH", help="write the full and projected unitaries as JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="re-optimise or re-score over a parameter grid")
    p.add_argument("config")
    p.add_argument("--axis", required=True, choices=["theta", "coupling", "coherence"])
    p.add_argument("--grid", required=True, help="comma-separated values: ns (theta), MHz (coupling), us (coherence)")
    p.add_argument("--pulse", help="fixed pulse for the coherence axis")
    p.add_argument("--seed", type=int)
    p.add_argument("--output-root")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="compare SuSSADE and standard DE on analytic problems")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    p.add_argument("--population", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-6, help="stop once the minimum is within this value")
    p.add_argument("--functions", help="comma-separated subset of sphere,rosenbrock,rastrigin")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        log.debug("unhandled error", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
