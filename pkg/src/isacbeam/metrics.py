"""Evaluation metrics: SCNR, per-user SINR, sum rate, beampatterns.

All metric functions are pure. Beampatterns are computed by default as
the ensemble expectation through the transmit covariance, which is
deterministic; a sample-based mode using synthesized blocks exists for
cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import scenario, taper

DB_FLOOR = -120.0


@dataclass
class MetricsReport:
    """Summary metrics for one finished design."""

    scnr_db: float
    sinr_db: tuple  # per user
    sum_rate_bits: float
    beampattern: list  # (angle degrees, gain dB relative to peak)
    beampattern_mse: float
    similarity_error: float

    def to_dict(self) -> dict:
        return {
            "scnr_db": self.scnr_db,
            "sinr_db": list(self.sinr_db),
            "sum_rate_bits": self.sum_rate_bits,
            "beampattern_mse": self.beampattern_mse,
            "similarity_error": self.similarity_error,
        }


def _as_covariance(transmit) -> np.ndarray:
    if isinstance(transmit, scenario.BeamformerSet):
        return transmit.covariance()
    if isinstance(transmit, tuple):
        w_comm, w_sense = transmit
        return w_comm @ w_comm.conj().T + w_sense @ w_sense.conj().T
    return np.asarray(transmit)


def scnr(model: taper.InterferenceModel, transmit, w) -> float:
    """Filter output power on the target over tapered clutter plus noise.

    ``transmit`` is a covariance matrix, a (W_c, W_s) pair, or a
    BeamformerSet; beamformers are folded into their covariance.
    """
    r = _as_covariance(transmit)
    num = taper.target_quadratic(model, r, w)
    den = taper.tapered_cn_quadratic(model, r, w)
    return float(num / den)


def user_sinr(channels: np.ndarray, w_comm: np.ndarray, w_sense: np.ndarray, noise_power: float) -> np.ndarray:
    """Per-user SINR from the actual beamformers.

    gamma_k = |h_k^H w_k|^2 over (other users' streams + sensing streams
    + noise), all evaluated at user k's channel.
    """
    channels = np.atleast_2d(np.asarray(channels, dtype=complex))
    k = channels.shape[0]
    gains_c = np.abs(channels.conj() @ w_comm) ** 2  # (K, K): user x stream
    gains_s = np.abs(channels.conj() @ w_sense) ** 2  # (K, M')
    out = np.empty(k)
    for i in range(k):
        signal = gains_c[i, i]
        interference = gains_c[i].sum() - signal + gains_s[i].sum()
        out[i] = signal / (interference + noise_power)
    return out


def sum_rate(gammas) -> float:
    gammas = np.asarray(gammas, dtype=float)
    if np.any(gammas < 0):
        raise ValueError("SINR values must be non-negative")
    return float(np.sum(np.log2(1.0 + gammas)))


def angle_grid(cfg: scenario.ScenarioConfig) -> np.ndarray:
    return np.arange(-90.0, 90.0, cfg.beampattern_grid_step_deg)


def beampattern_linear(cfg: scenario.ScenarioConfig, r: np.ndarray, w, angles) -> np.ndarray:
    """Expected receive power versus angle: |w^H a_r|^2 (a_t^H R a_t)."""
    angles = np.asarray(angles, dtype=float)
    a_r = np.stack([scenario.steering_rx(cfg, t) for t in angles])  # (N, Mr)
    a_t = np.stack([scenario.steering_tx(cfg, t) for t in angles])  # (N, Mt)
    rx_gain = np.abs(a_r.conj() @ np.asarray(w)) ** 2
    tx_gain = np.real(np.einsum("ni,ij,nj->n", a_t.conj(), np.asarray(r), a_t))
    return rx_gain * np.maximum(tx_gain, 0.0)


def beampattern(cfg: scenario.ScenarioConfig, r: np.ndarray, w, angles=None) -> list:
    """Beampattern in dB relative to its peak, floored at -120 dB."""
    if angles is None:
        angles = angle_grid(cfg)
    angles = np.asarray(angles, dtype=float)
    linear = beampattern_linear(cfg, r, w, angles)
    peak = float(np.max(linear))
    if peak <= 0:
        db = np.full(angles.shape, DB_FLOOR)
    else:
        with np.errstate(divide="ignore"):
            db = 10.0 * np.log10(linear / peak)
        db = np.maximum(db, DB_FLOOR)
    return list(zip(angles.tolist(), db.tolist()))


def beampattern_samples(
    cfg: scenario.ScenarioConfig,
    beams: scenario.BeamformerSet,
    w,
    angles,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample-average beampattern from one synthesized signal block."""
    angles = np.asarray(angles, dtype=float)
    x = scenario.synthesize_block(cfg, beams, rng)  # (M, N)
    n = x.shape[1]
    a_r = np.stack([scenario.steering_rx(cfg, t) for t in angles])
    a_t = np.stack([scenario.steering_tx(cfg, t) for t in angles])
    rx_gain = np.abs(a_r.conj() @ np.asarray(w)) ** 2
    tx_samples = a_t.conj() @ x  # (N_angles, N)
    tx_gain = np.sum(np.abs(tx_samples) ** 2, axis=1) / n
    return rx_gain * tx_gain


def beampattern_mse(reference, measured) -> float:
    """Mean squared difference of two same-grid linear-scale patterns."""
    ref = np.asarray(reference, dtype=float)
    got = np.asarray(measured, dtype=float)
    if ref.shape != got.shape:
        raise ValueError(f"pattern grids differ: {ref.shape} vs {got.shape}")
    if ref.ndim == 2:
        if not np.array_equal(ref[:, 0], got[:, 0]):
            raise ValueError("pattern grids differ: angle columns do not match")
        ref, got = ref[:, 1], got[:, 1]
    return float(np.mean((ref - got) ** 2))


def similarity_error(cfg: scenario.ScenarioConfig, r: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(r) - scenario.reference_covariance(cfg)))


def compute_metrics(
    cfg: scenario.ScenarioConfig,
    model: taper.InterferenceModel,
    channels: np.ndarray,
    w,
    design,
) -> MetricsReport:
    """Assemble the full report for a finalized design."""
    gammas = user_sinr(channels, design.w_comm, design.w_sense, cfg.user_noise_mw)
    angles = angle_grid(cfg)
    ref_linear = beampattern_linear(cfg, scenario.reference_covariance(cfg), w, angles)
    got_linear = beampattern_linear(cfg, design.covariance, w, angles)
    # unit-peak normalization so the figure is comparable across array
    # sizes and power budgets
    ref_linear = ref_linear / max(float(ref_linear.max()), 1e-30)
    got_linear = got_linear / max(float(got_linear.max()), 1e-30)
    with np.errstate(divide="ignore"):
        sinr_db = tuple(float(v) for v in 10.0 * np.log10(np.maximum(gammas, 1e-300)))
    return MetricsReport(
        scnr_db=10.0 * np.log10(scnr(model, design.covariance, w)),
        sinr_db=sinr_db,
        sum_rate_bits=sum_rate(gammas),
        beampattern=beampattern(cfg, design.covariance, w, angles),
        beampattern_mse=beampattern_mse(
            np.column_stack([angles, ref_linear]),
            np.column_stack([angles, got_linear]),
        ),
        similarity_error=similarity_error(cfg, design.covariance),
    )
