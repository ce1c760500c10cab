"""Physical scenario model: array geometry, channels, clutter layout, units.

All powers are carried internally in linear milliwatts; dB/dBm conversion
happens once, at the config boundary. Angles are degrees in [-90, 90).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import linalg


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


def dbm_to_linear(x_dbm: float) -> float:
    """dBm to linear milliwatts: 10^(x/10)."""
    return 10.0 ** (x_dbm / 10.0)


@dataclass
class ScenarioConfig:
    """Scenario and algorithm parameters.

    Defaults follow the standard simulation setup: a 16-antenna
    half-wavelength ULA serving 2 users, a target at broadside, one
    strong discrete scatterer at 50 degrees plus a dense clutter ridge
    sampled at 1-degree spacing between -30 and -26 degrees.
    """

    num_tx_antennas: int = 16
    num_rx_antennas: int | None = None
    num_users: int = 2
    target_angle_deg: float = 0.0
    clutter_angles_deg: tuple[float, ...] = (50.0, -26.0, -27.0, -28.0, -29.0, -30.0)
    clutter_power_per_source: float = 1.0
    target_power: float = 1.0
    total_power_dbm: float = 43.0
    bs_noise_dbm: float = -80.0
    user_noise_dbm: float = -80.0
    sinr_threshold_db: float = 5.0
    similarity_coeff: float = 1.0
    taper_width: float = 0.03
    convergence_tol: float = 1e-3
    block_length: int = 1024
    element_spacing_over_wavelength: float = 0.5
    rng_seed: int = 0
    # reference covariance: "lfm" = rank-one chirp, "isotropic" = (P_t/M) I
    reference_model: str = "lfm"
    similarity_bound_mw: float | None = None
    max_outer_iterations: int = 50
    max_inner_iterations: int = 30
    solver_eps: float = 1e-6
    solver_max_iters: int = 8000
    beampattern_grid_step_deg: float = 0.5

    def __post_init__(self):
        if self.num_rx_antennas is None:
            self.num_rx_antennas = self.num_tx_antennas
        self.clutter_angles_deg = tuple(float(a) for a in self.clutter_angles_deg)
        if self.num_tx_antennas < 1 or self.num_rx_antennas < 1:
            raise ConfigError("antenna counts must be positive")
        if self.num_users < 0:
            raise ConfigError("num_users must be non-negative")
        if self.num_users > self.num_tx_antennas:
            raise ConfigError(
                f"num_users={self.num_users} exceeds num_tx_antennas={self.num_tx_antennas}"
            )
        if not (0.0 <= self.similarity_coeff <= 2.0):
            raise ConfigError("similarity_coeff must lie in [0, 2]")
        for name, angle in [("target_angle_deg", self.target_angle_deg)] + [
            ("clutter_angles_deg", a) for a in self.clutter_angles_deg
        ]:
            if not (-90.0 <= angle < 90.0):
                raise ConfigError(f"{name} entry {angle} outside [-90, 90)")
        if self.taper_width < 0:
            raise ConfigError("taper_width must be >= 0")
        if self.convergence_tol <= 0:
            raise ConfigError("convergence_tol must be > 0")
        if self.block_length < 1:
            raise ConfigError("block_length must be >= 1")
        if self.clutter_power_per_source < 0 or self.target_power <= 0:
            raise ConfigError("power gains must be positive (clutter may be zero)")
        for name in ("total_power_dbm", "bs_noise_dbm", "user_noise_dbm"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.reference_model not in ("lfm", "isotropic"):
            raise ConfigError("reference_model must be 'lfm' or 'isotropic'")
        if self.similarity_bound_mw is not None and self.similarity_bound_mw < 0:
            raise ConfigError("similarity_bound_mw must be >= 0")

    @property
    def total_power_mw(self) -> float:
        return dbm_to_linear(self.total_power_dbm)

    @property
    def bs_noise_mw(self) -> float:
        return dbm_to_linear(self.bs_noise_dbm)

    @property
    def user_noise_mw(self) -> float:
        return dbm_to_linear(self.user_noise_dbm)

    @property
    def sinr_threshold_linear(self) -> float:
        return 10.0 ** (self.sinr_threshold_db / 10.0)

    @property
    def similarity_bound(self) -> float:
        """Frobenius radius of the waveform-similarity ball, in mW."""
        if self.similarity_bound_mw is not None:
            return self.similarity_bound_mw
        return self.similarity_coeff * self.total_power_mw

    def to_dict(self) -> dict:
        d = asdict(self)
        d["clutter_angles_deg"] = list(self.clutter_angles_deg)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top-level JSON value must be an object")
        return cls.from_dict(data)

    def config_hash(self) -> str:
        """Short stable digest of the full parameter set."""
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]

    def replace(self, **changes) -> "ScenarioConfig":
        d = self.to_dict()
        d.update(changes)
        return ScenarioConfig.from_dict(d)


@dataclass
class BeamformerSet:
    """Transmit beamformers: communication columns and sensing columns."""

    w_comm: np.ndarray  # (M, K)
    w_sense: np.ndarray  # (M, M'), M' = number of sensing streams

    def __post_init__(self):
        self.w_comm = np.atleast_2d(np.asarray(self.w_comm, dtype=complex))
        self.w_sense = np.atleast_2d(np.asarray(self.w_sense, dtype=complex))
        if self.w_comm.shape[0] != self.w_sense.shape[0]:
            raise ValueError(
                f"row mismatch: w_comm {self.w_comm.shape} vs w_sense {self.w_sense.shape}"
            )

    @property
    def full(self) -> np.ndarray:
        return np.hstack([self.w_comm, self.w_sense])

    def covariance(self) -> np.ndarray:
        w = self.full
        gram = w @ w.conj().T
        # product rounding scales with the power carried by the beams
        tol = max(1e-12, 1e-14 * float(np.abs(gram).max()) * gram.shape[0])
        return linalg.as_hermitian(gram, atol=tol)


def _steering(num_antennas: int, spacing: float, theta_deg: float) -> np.ndarray:
    m = np.arange(num_antennas)
    phase = 2.0 * np.pi * spacing * m * np.sin(np.deg2rad(theta_deg))
    return np.exp(1j * phase) / np.sqrt(num_antennas)


def steering_tx(cfg: ScenarioConfig, theta_deg: float) -> np.ndarray:
    """Unit-norm transmit steering vector of the ULA toward ``theta_deg``."""
    return _steering(cfg.num_tx_antennas, cfg.element_spacing_over_wavelength, theta_deg)


def steering_rx(cfg: ScenarioConfig, theta_deg: float) -> np.ndarray:
    """Unit-norm receive steering vector toward ``theta_deg``."""
    return _steering(cfg.num_rx_antennas, cfg.element_spacing_over_wavelength, theta_deg)


def response_matrix(cfg: ScenarioConfig, theta_deg: float) -> np.ndarray:
    """Rank-one two-way array response A(theta) = a_rx a_tx^H, unit Frobenius norm."""
    return np.outer(steering_rx(cfg, theta_deg), steering_tx(cfg, theta_deg).conj())


def draw_channels(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw K flat-Rayleigh user channels, shape (K, M).

    Entries are circularly symmetric complex Gaussian with unit variance
    (real and imaginary parts each of variance 1/2).
    """
    shape = (cfg.num_users, cfg.num_tx_antennas)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def reference_waveform(cfg: ScenarioConfig) -> np.ndarray:
    """Chirp-phase reference snapshot x0 with |x0[m]|^2 = P_t/M."""
    m = np.arange(cfg.num_tx_antennas)
    amp = np.sqrt(cfg.total_power_mw / cfg.num_tx_antennas)
    return amp * np.exp(1j * np.pi * m**2 / cfg.num_tx_antennas)


def reference_covariance(cfg: ScenarioConfig) -> np.ndarray:
    """Reference transmit covariance R0 the design is pulled toward.

    The default rank-one model is the outer product of the chirp snapshot;
    the "isotropic" alternative spreads power uniformly, (P_t/M) I.
    """
    m = cfg.num_tx_antennas
    if cfg.reference_model == "isotropic":
        return (cfg.total_power_mw / m) * np.eye(m, dtype=complex)
    x0 = reference_waveform(cfg)
    return linalg.as_hermitian(np.outer(x0, x0.conj()))


def _orthogonal_rows(num_rows: int, length: int) -> np.ndarray:
    # DFT rows: exactly orthogonal with norm-squared = length
    m = np.arange(num_rows)[:, None]
    n = np.arange(length)[None, :]
    return np.exp(-2j * np.pi * m * n / length)


def synthesize_block(
    cfg: ScenarioConfig, beams: BeamformerSet, rng: np.random.Generator
) -> np.ndarray:
    """One transmit block X = W_c S_c + W_s S_s, shape (M, N).

    S_c carries unit-power QPSK symbols; S_s holds deterministic
    orthogonal rows with (1/N) S_s S_s^H = I.
    """
    n = cfg.block_length
    k = beams.w_comm.shape[1]
    n_sense = beams.w_sense.shape[1]
    if n < n_sense:
        raise ValueError(
            f"block_length {n} shorter than number of sensing streams {n_sense}"
        )
    x = np.zeros((beams.w_comm.shape[0], n), dtype=complex)
    if k:
        symbols = (rng.integers(0, 2, (k, n)) * 2 - 1) + 1j * (
            rng.integers(0, 2, (k, n)) * 2 - 1
        )
        x += beams.w_comm @ (symbols / np.sqrt(2.0))
    if n_sense:
        x += beams.w_sense @ _orthogonal_rows(n_sense, n)
    return x
