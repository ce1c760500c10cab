"""Clutter-plus-noise covariance maps and the Mailloux-Zatman taper.

The sensing receiver sees the target echo through A0 = a_rx(theta0) a_tx(theta0)^H
and each clutter scatterer through A_p at its own angle, all driven by the
transmit covariance R. Widening the clutter nulls against angle jitter is
done by a Hadamard taper on the clutter-plus-noise covariance; everything
here treats that covariance as an explicit linear map of R so the transmit
optimizer can consume it as coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, scenario


def mz_taper(num_antennas: int, width: float) -> np.ndarray:
    """Sinc-structured taper matrix, entry (m, n) = sinc((m - n) * width).

    Uses the normalized sinc sin(pi x)/(pi x). Unit diagonal, symmetric,
    positive semidefinite; width 0 gives the all-ones matrix (no tapering).
    """
    if width < 0:
        raise ValueError("taper width must be >= 0")
    idx = np.arange(num_antennas)
    return np.sinc(width * (idx[:, None] - idx[None, :]))


@dataclass(frozen=True)
class InterferenceModel:
    """Frozen per-scenario sensing geometry and noise/taper data."""

    target_response: np.ndarray  # A0, (M_rx, M_tx)
    clutter_responses: np.ndarray  # (P, M_rx, M_tx)
    target_gain: float  # |alpha_0|^2
    clutter_gains: np.ndarray  # (P,)
    noise_power: float  # linear mW at the sensing receiver
    taper: np.ndarray  # (M_rx, M_rx) real symmetric
    target_rx_steering: np.ndarray  # a_rx(theta0)
    target_tx_steering: np.ndarray  # a_tx(theta0)

    @property
    def num_clutter(self) -> int:
        return len(self.clutter_gains)


def build_interference_model(cfg: scenario.ScenarioConfig) -> InterferenceModel:
    """Assemble steering responses, gains, noise and taper from a config."""
    a0 = scenario.response_matrix(cfg, cfg.target_angle_deg)
    responses = np.array(
        [scenario.response_matrix(cfg, th) for th in cfg.clutter_angles_deg]
    ).reshape(len(cfg.clutter_angles_deg), cfg.num_rx_antennas, cfg.num_tx_antennas)
    gains = np.full(len(cfg.clutter_angles_deg), float(cfg.clutter_power_per_source))
    return InterferenceModel(
        target_response=a0,
        clutter_responses=responses,
        target_gain=float(cfg.target_power),
        clutter_gains=gains,
        noise_power=cfg.bs_noise_mw,
        taper=mz_taper(cfg.num_rx_antennas, cfg.taper_width),
        target_rx_steering=scenario.steering_rx(cfg, cfg.target_angle_deg),
        target_tx_steering=scenario.steering_tx(cfg, cfg.target_angle_deg),
    )


def target_quadratic(model: InterferenceModel, R, w) -> float:
    """Filtered target echo power |alpha0|^2 w^H A0 R A0^H w, real >= 0."""
    a0w = model.target_response.conj().T @ w
    val = model.target_gain * np.real(a0w.conj() @ R @ a0w)
    return float(max(val, 0.0))


def cn_matrix(model: InterferenceModel, R) -> np.ndarray:
    """Untapered clutter-plus-noise covariance sum_p |alpha_p|^2 A_p R A_p^H + noise I."""
    m_rx = model.target_response.shape[0]
    out = model.noise_power * np.eye(m_rx, dtype=complex)
    for gain, ap in zip(model.clutter_gains, model.clutter_responses):
        out += gain * (ap @ R @ ap.conj().T)
    return linalg.as_hermitian(out, atol=1e-8)


def tapered_cn_matrix(model: InterferenceModel, R) -> np.ndarray:
    """Hadamard-tapered clutter-plus-noise covariance."""
    return linalg.as_hermitian(cn_matrix(model, R) * model.taper, atol=1e-8)


def tapered_cn_quadratic(model: InterferenceModel, R, w) -> float:
    """Filtered tapered clutter-plus-noise power, strictly positive for noise > 0."""
    w = np.asarray(w)
    return float(np.real(w.conj() @ tapered_cn_matrix(model, R) @ w))


def cn_linear_coefficients(model: InterferenceModel, w) -> np.ndarray:
    """Coefficient matrix Q of the linear map R -> filtered tapered clutter power.

    Satisfies trace(Q R) + noise * ||w||^2 = tapered_cn_quadratic(model, R, w)
    for every Hermitian R. Q is PSD: it is a sum of congruences of the
    Schur product (w w^H) o T, itself PSD by the Schur product theorem.
    """
    w = np.asarray(w)
    weight = np.outer(w, w.conj()) * model.taper
    m_tx = model.target_response.shape[1]
    q = np.zeros((m_tx, m_tx), dtype=complex)
    for gain, ap in zip(model.clutter_gains, model.clutter_responses):
        q += gain * (ap.conj().T @ weight @ ap)
    return linalg.as_hermitian(q, atol=1e-8)


def target_linear_coefficients(model: InterferenceModel, w) -> np.ndarray:
    """Coefficient matrix C of the linear map R -> filtered target power.

    trace(C R) = target_quadratic(model, R, w); C is a scaled rank-one
    outer product of the transmit steering vector.
    """
    w = np.asarray(w)
    gain = model.target_gain * abs(np.vdot(w, model.target_rx_steering)) ** 2
    at = model.target_tx_steering
    return linalg.as_hermitian(gain * np.outer(at, at.conj()))
