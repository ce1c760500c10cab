"""Experiment orchestration: single designs, sweeps, and Monte Carlo runs.

Every experiment resolves to a ResultTable whose CSV form is byte-stable
for a fixed (config, seed) pair: each trial owns an RNG stream derived
from the master seed and its trial index, aggregation sorts by trial
index, and wall-clock times stay out of the emitted files.
"""

from __future__ import annotations

import concurrent.futures
import time
from dataclasses import dataclass, field

import numpy as np

from . import driver, metrics, scenario, taper, transmit

SWEEP_PARAMS = {
    "delta": "taper_width",
    "gamma_db": "sinr_threshold_db",
    "alpha": "similarity_coeff",
    "num_antennas": "num_tx_antennas",
}


@dataclass
class ExperimentSpec:
    """One experiment request, fully determined by config plus seed."""

    kind: str  # design | beampattern | convergence | sweep | montecarlo
    base: scenario.ScenarioConfig
    master_seed: int = 0
    trials: int = 1
    sweep_param: str | None = None
    sweep_values: tuple = ()
    workers: int = 1

    def __post_init__(self):
        kinds = ("design", "beampattern", "convergence", "sweep", "montecarlo")
        if self.kind not in kinds:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.kind == "sweep":
            if self.sweep_param not in SWEEP_PARAMS:
                raise ValueError(
                    f"sweep parameter must be one of {sorted(SWEEP_PARAMS)}, "
                    f"got {self.sweep_param!r}"
                )
            if not self.sweep_values:
                raise ValueError("sweep requires a non-empty value list")


@dataclass
class ResultTable:
    """Rectangular numeric table plus reproducibility metadata."""

    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row width {len(row)} does not match {len(self.columns)} columns"
                )

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows], dtype=float)


def _format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(table: ResultTable, path) -> None:
    """CSV with '#' header comments; LF endings, '.' decimal, stable floats."""
    lines = []
    for key in sorted(table.metadata):
        lines.append(f"# {key}: {table.metadata[key]}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_format_value(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def trial_config(base: scenario.ScenarioConfig, param: str | None, value) -> scenario.ScenarioConfig:
    if param is None:
        return base
    if param == "num_antennas":
        # the receive array tracks the transmit array in every studied scenario
        m = int(value)
        return base.replace(num_tx_antennas=m, num_rx_antennas=m)
    return base.replace(**{SWEEP_PARAMS[param]: value})


def run_trial(cfg: scenario.ScenarioConfig, master_seed: int, trial: int) -> dict:
    """One full design with its own RNG stream; returns scalar metrics."""
    rng = np.random.default_rng([master_seed, trial])
    channels = scenario.draw_channels(cfg, rng)
    t0 = time.perf_counter()
    solution = driver.design_transceiver(cfg, channels)
    wall = time.perf_counter() - t0
    model = taper.build_interference_model(cfg)
    report = metrics.compute_metrics(cfg, model, channels, solution.filter, solution.design)
    return {
        "trial": trial,
        "scnr_db": report.scnr_db,
        "sum_rate_bits": report.sum_rate_bits,
        "min_sinr_db": min(report.sinr_db) if report.sinr_db else float("nan"),
        "similarity_error": report.similarity_error,
        "outer_iterations": solution.outer_iterations,
        "converged": bool(solution.converged),
        "wall_time_s": wall,
        "solution": solution,
        "report": report,
    }


def _trial_task(args):
    cfg, master_seed, trial = args
    try:
        out = run_trial(cfg, master_seed, trial)
        out.pop("solution")
        out.pop("report")
        return out
    except (transmit.QoSInfeasibleError, transmit.NumericalError) as exc:
        return {"trial": trial, "error": f"{type(exc).__name__}: {exc}"}


def _run_trials(cfg, master_seed, trials, workers) -> list:
    tasks = [(cfg, master_seed, t) for t in range(trials)]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_task, tasks))
    else:
        results = [_trial_task(t) for t in tasks]
    return sorted(results, key=lambda r: r["trial"])


def _stderr(values: np.ndarray) -> float:
    if values.size <= 1:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(values.size))


def run_montecarlo(spec: ExperimentSpec) -> ResultTable:
    """Per-trial rows plus one aggregate row (trial index -1)."""
    results = _run_trials(spec.base, spec.master_seed, spec.trials, spec.workers)
    columns = [
        "trial",
        "scnr_db",
        "scnr_db_stderr",
        "sum_rate_bits",
        "min_sinr_db",
        "outer_iterations",
        "converged",
    ]
    rows = []
    ok = [r for r in results if "error" not in r]
    for r in results:
        if "error" in r:
            rows.append([r["trial"], float("nan"), 0.0, float("nan"), float("nan"), 0, 0])
        else:
            rows.append([
                r["trial"],
                r["scnr_db"],
                0.0,
                r["sum_rate_bits"],
                r["min_sinr_db"],
                r["outer_iterations"],
                int(r["converged"]),
            ])
    scnrs = np.array([r["scnr_db"] for r in ok])
    rates = np.array([r["sum_rate_bits"] for r in ok])
    sinrs = np.array([r["min_sinr_db"] for r in ok])
    iters = np.array([r["outer_iterations"] for r in ok])
    conv = np.array([r["converged"] for r in ok])
    if ok:
        rows.append([
            -1,
            float(scnrs.mean()),
            _stderr(scnrs),
            float(rates.mean()),
            float(sinrs.mean()),
            float(iters.mean()),
            float(conv.mean()),
        ])
    failed = [r for r in results if "error" in r]
    return ResultTable(
        columns=columns,
        rows=rows,
        metadata={
            "config_hash": spec.base.config_hash(),
            "seed": spec.master_seed,
            "trials": spec.trials,
            "failed_trials": len(failed),
        },
    )


def run_sweep(spec: ExperimentSpec) -> ResultTable:
    """Aggregate metrics per sweep value; failed trials counted, not fatal."""
    columns = [
        "param_value",
        "scnr_db_mean",
        "scnr_db_stderr",
        "sum_rate_mean",
        "sum_rate_stderr",
        "trials_ok",
        "trials_failed",
    ]
    rows = []
    for value in spec.sweep_values:
        cfg = trial_config(spec.base, spec.sweep_param, value)
        results = _run_trials(cfg, spec.master_seed, spec.trials, spec.workers)
        ok = [r for r in results if "error" not in r]
        scnrs = np.array([r["scnr_db"] for r in ok])
        rates = np.array([r["sum_rate_bits"] for r in ok])
        rows.append([
            float(value),
            float(scnrs.mean()) if ok else float("nan"),
            _stderr(scnrs),
            float(rates.mean()) if ok else float("nan"),
            _stderr(rates),
            len(ok),
            len(results) - len(ok),
        ])
    return ResultTable(
        columns=columns,
        rows=rows,
        metadata={
            "config_hash": spec.base.config_hash(),
            "seed": spec.master_seed,
            "param": spec.sweep_param,
            "trials": spec.trials,
        },
    )


def run_convergence(spec: ExperimentSpec) -> ResultTable:
    """Traces versus outer iteration for one or more array sizes."""
    sizes = [int(v) for v in (spec.sweep_values or (8, 12, 16))]
    columns = ["num_antennas", "outer_iter", "scnr_db", "beampattern_mse"]
    rows = []
    for m in sizes:
        cfg = trial_config(spec.base, "num_antennas", m)
        rng = np.random.default_rng([spec.master_seed, 0])
        channels = scenario.draw_channels(cfg, rng)
        solution = driver.design_transceiver(cfg, channels)
        mse = dict(solution.mse_trace)
        for it, rho in solution.scnr_trace:
            rows.append([m, it, 10.0 * np.log10(rho), mse[it]])
    return ResultTable(
        columns=columns,
        rows=rows,
        metadata={
            "config_hash": spec.base.config_hash(),
            "seed": spec.master_seed,
        },
    )


def run_design(spec: ExperimentSpec) -> tuple[ResultTable, dict]:
    """Single design: convergence trace table plus a summary dictionary."""
    result = run_trial(spec.base, spec.master_seed, 0)
    solution, report = result["solution"], result["report"]
    mse = dict(solution.mse_trace)
    rows = [
        [it, 10.0 * np.log10(rho), mse[it]] for it, rho in solution.scnr_trace
    ]
    table = ResultTable(
        columns=["outer_iter", "scnr_db", "beampattern_mse"],
        rows=rows,
        metadata={
            "config_hash": spec.base.config_hash(),
            "seed": spec.master_seed,
        },
    )
    cfg = spec.base
    w_full = np.hstack([solution.design.w_comm, solution.design.w_sense])
    per_antenna = np.real(np.einsum("ij,ij->i", w_full, w_full.conj()))
    summary = {
        "config_hash": cfg.config_hash(),
        "seed": spec.master_seed,
        "converged": bool(solution.converged),
        "outer_iterations": solution.outer_iterations,
        "scnr_db": report.scnr_db,
        "sinr_db": list(report.sinr_db),
        "sum_rate_bits": report.sum_rate_bits,
        "beampattern_mse": report.beampattern_mse,
        "similarity_error": report.similarity_error,
        "similarity_bound": cfg.similarity_bound,
        "total_power_mw": float(per_antenna.sum()),
        "per_antenna_power_mw_max": float(per_antenna.max()),
        "per_antenna_cap_mw": cfg.total_power_mw / cfg.num_tx_antennas,
    }
    return table, summary


def run_beampattern(spec: ExperimentSpec) -> ResultTable:
    """Designed pattern against the no-taper rerun and the reference model.

    All three columns share the angle grid and the robust design's final
    receive filter, so differences isolate the transmit covariance.
    """
    cfg = spec.base
    rng_channels = np.random.default_rng([spec.master_seed, 0])
    channels = scenario.draw_channels(cfg, rng_channels)
    robust = driver.design_transceiver(cfg, channels)

    plain_cfg = cfg.replace(taper_width=0.0)
    plain = driver.design_transceiver(plain_cfg, channels)

    angles = metrics.angle_grid(cfg)
    w = robust.filter
    proposed = metrics.beampattern(cfg, robust.design.covariance, w, angles)
    no_taper = metrics.beampattern(cfg, plain.design.covariance, plain.filter, angles)
    reference = metrics.beampattern(cfg, scenario.reference_covariance(cfg), w, angles)
    rows = [
        [a, p[1], n[1], r[1]]
        for a, p, n, r in zip(angles, proposed, no_taper, reference)
    ]
    return ResultTable(
        columns=["angle_deg", "gain_db_proposed", "gain_db_no_taper", "gain_db_reference"],
        rows=rows,
        metadata={
            "config_hash": cfg.config_hash(),
            "seed": spec.master_seed,
        },
    )
