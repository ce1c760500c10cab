"""Command-line front end for designs, sweeps, and Monte Carlo studies.

Exit codes: 0 success, 2 configuration error, 3 QoS infeasible,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments, linalg, scenario, svgplot, transmit

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isacbeam",
        description="Joint transmit beamforming and receive filter design "
        "for integrated sensing and communication arrays.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON scenario file; defaults apply if omitted")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--emit-plots", action="store_true", help="also write SVG charts")

    p = sub.add_parser("design", help="one design: convergence trace + summary")
    common(p)

    p = sub.add_parser("beampattern", help="pattern vs no-taper rerun and reference")
    common(p)

    p = sub.add_parser("convergence", help="traces across antenna counts")
    common(p)
    p.add_argument("--values", help="comma-separated antenna counts (default 8,12,16)")

    p = sub.add_parser("sweep", help="aggregate metrics across a parameter sweep")
    common(p)
    p.add_argument(
        "--param",
        required=True,
        choices=sorted(experiments.SWEEP_PARAMS),
        help="which knob to sweep",
    )
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--trials", type=int, default=50, help="trials per value")
    p.add_argument("--workers", type=int, default=1, help="parallel trial workers")

    p = sub.add_parser("montecarlo", help="independent trials of one scenario")
    common(p)
    p.add_argument("--trials", type=int, default=50, help="number of trials")
    p.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    return parser


def _load_config(path: str | None) -> scenario.ScenarioConfig:
    if path is None:
        return scenario.ScenarioConfig()
    return scenario.ScenarioConfig.from_file(path)


def _parse_values(text: str, as_int: bool) -> tuple:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        out.append(int(piece) if as_int else float(piece))
    if not out:
        raise scenario.ConfigError("--values contained no usable numbers")
    return tuple(out)


def cmd_design(args) -> int:
    spec = experiments.ExperimentSpec(
        kind="design", base=_load_config(args.config), master_seed=args.seed
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table, summary = experiments.run_design(spec)
    experiments.write_csv(table, out / "convergence.csv")
    with open(out / "summary.json", "w", encoding="utf-8", newline="") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.emit_plots:
        iters = table.column("outer_iter")
        svgplot.save_chart(
            [("SCNR", iters, table.column("scnr_db"))],
            "Convergence",
            "outer iteration",
            "SCNR (dB)",
            out / "convergence.svg",
        )
        svgplot.save_chart(
            [("MSE", iters, table.column("beampattern_mse"))],
            "Beampattern error",
            "outer iteration",
            "MSE",
            out / "beampattern_mse.svg",
        )
    print(
        f"converged={summary['converged']} after {summary['outer_iterations']} "
        f"iterations, SCNR {summary['scnr_db']:.2f} dB, "
        f"sum rate {summary['sum_rate_bits']:.3f} bits/s/Hz"
    )
    return EXIT_OK


def cmd_beampattern(args) -> int:
    spec = experiments.ExperimentSpec(
        kind="beampattern", base=_load_config(args.config), master_seed=args.seed
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = experiments.run_beampattern(spec)
    experiments.write_csv(table, out / "beampattern.csv")
    if args.emit_plots:
        angles = table.column("angle_deg")
        svgplot.save_chart(
            [
                ("designed", angles, table.column("gain_db_proposed")),
                ("no taper", angles, table.column("gain_db_no_taper")),
                ("reference", angles, table.column("gain_db_reference")),
            ],
            "Receive beampattern",
            "angle (deg)",
            "gain (dB)",
            out / "beampattern.svg",
        )
    print(f"wrote beampattern.csv with {len(table.rows)} angles")
    return EXIT_OK


def cmd_convergence(args) -> int:
    values = _parse_values(args.values, as_int=True) if args.values else ()
    spec = experiments.ExperimentSpec(
        kind="convergence",
        base=_load_config(args.config),
        master_seed=args.seed,
        sweep_values=values,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = experiments.run_convergence(spec)
    experiments.write_csv(table, out / "convergence_study.csv")
    if args.emit_plots:
        sizes = sorted(set(int(v) for v in table.column("num_antennas")))
        series = []
        for m in sizes:
            mask = table.column("num_antennas") == m
            series.append(
                (
                    f"M={m}",
                    table.column("outer_iter")[mask],
                    table.column("beampattern_mse")[mask],
                )
            )
        svgplot.save_chart(
            series,
            "Beampattern error vs iteration",
            "outer iteration",
            "MSE",
            out / "convergence_study.svg",
        )
    print(f"wrote convergence_study.csv with {len(table.rows)} rows")
    return EXIT_OK


def cmd_sweep(args) -> int:
    values = _parse_values(args.values, as_int=args.param == "num_antennas")
    spec = experiments.ExperimentSpec(
        kind="sweep",
        base=_load_config(args.config),
        master_seed=args.seed,
        trials=args.trials,
        sweep_param=args.param,
        sweep_values=values,
        workers=args.workers,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = experiments.run_sweep(spec)
    experiments.write_csv(table, out / "tradeoff.csv")
    if args.emit_plots:
        vals = table.column("param_value")
        svgplot.save_chart(
            [("SCNR", vals, table.column("scnr_db_mean"))],
            f"SCNR vs {args.param}",
            args.param,
            "mean SCNR (dB)",
            out / "tradeoff_scnr.svg",
        )
        svgplot.save_chart(
            [("sum rate", vals, table.column("sum_rate_mean"))],
            f"Sum rate vs {args.param}",
            args.param,
            "mean sum rate (bits/s/Hz)",
            out / "tradeoff_sum_rate.svg",
        )
    print(f"wrote tradeoff.csv with {len(table.rows)} sweep points")
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    spec = experiments.ExperimentSpec(
        kind="montecarlo",
        base=_load_config(args.config),
        master_seed=args.seed,
        trials=args.trials,
        workers=args.workers,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = experiments.run_montecarlo(spec)
    experiments.write_csv(table, out / "montecarlo.csv")
    if args.emit_plots:
        per_trial = [row for row in table.rows if row[0] >= 0]
        trials = [row[0] for row in per_trial]
        scnrs = [row[1] for row in per_trial]
        svgplot.save_chart(
            [("SCNR", trials, scnrs)],
            "Monte Carlo trials",
            "trial",
            "SCNR (dB)",
            out / "montecarlo.svg",
        )
    agg = next((row for row in table.rows if row[0] == -1), None)
    if agg is not None:
        print(
            f"{spec.trials} trials: mean SCNR {agg[1]:.2f} dB "
            f"(stderr {agg[2]:.3f}), mean sum rate {agg[3]:.3f} bits/s/Hz"
        )
    else:
        print(f"{spec.trials} trials: all failed")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the config slot
        return int(exc.code) if exc.code else EXIT_OK
    handlers = {
        "design": cmd_design,
        "beampattern": cmd_beampattern,
        "convergence": cmd_convergence,
        "sweep": cmd_sweep,
        "montecarlo": cmd_montecarlo,
    }
    try:
        return handlers[args.command](args)
    except transmit.QoSInfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (
        transmit.NumericalError,
        transmit.TightnessViolationError,
        linalg.NotHermitianError,
        linalg.NotPSDError,
        linalg.EigenConvergenceError,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (scenario.ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
