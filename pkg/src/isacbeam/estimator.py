"""Scikit-learn style front end for the joint transceiver design."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import driver, metrics, scenario, taper


class TransceiverDesigner(BaseEstimator):
    """Designs a transmit covariance and receive filter for one scenario.

    ``fit`` accepts the complex downlink channel matrix with one row per
    user; passing ``X=None`` draws channels from ``random_state``
    instead, which is the common Monte-Carlo usage. After fitting, the
    beamformers, the receive filter, and the convergence traces are
    available as trailing-underscore attributes, ``predict`` evaluates
    the receive beampattern, and ``score`` reports the sensing SCNR in
    dB, so model-selection utilities maximize the right quantity.

    Parameters mirror the scenario configuration; anything not exposed
    here keeps its default.
    """

    def __init__(
        self,
        num_tx_antennas: int = 16,
        num_users: int = 2,
        target_angle_deg: float = 0.0,
        clutter_angles_deg=(50.0, -26.0, -27.0, -28.0, -29.0, -30.0),
        taper_width: float = 0.03,
        total_power_dbm: float = 43.0,
        sinr_threshold_db: float = 5.0,
        similarity_coeff: float = 1.0,
        bs_noise_dbm: float = -80.0,
        user_noise_dbm: float = -80.0,
        reference_model: str = "lfm",
        convergence_tol: float = 1e-3,
        max_outer_iterations: int = 50,
        random_state=None,
    ):
        self.num_tx_antennas = num_tx_antennas
        self.num_users = num_users
        self.target_angle_deg = target_angle_deg
        self.clutter_angles_deg = clutter_angles_deg
        self.taper_width = taper_width
        self.total_power_dbm = total_power_dbm
        self.sinr_threshold_db = sinr_threshold_db
        self.similarity_coeff = similarity_coeff
        self.bs_noise_dbm = bs_noise_dbm
        self.user_noise_dbm = user_noise_dbm
        self.reference_model = reference_model
        self.convergence_tol = convergence_tol
        self.max_outer_iterations = max_outer_iterations
        self.random_state = random_state

    def _config(self) -> scenario.ScenarioConfig:
        return scenario.ScenarioConfig(
            num_tx_antennas=self.num_tx_antennas,
            num_users=self.num_users,
            target_angle_deg=self.target_angle_deg,
            clutter_angles_deg=tuple(self.clutter_angles_deg),
            taper_width=self.taper_width,
            total_power_dbm=self.total_power_dbm,
            sinr_threshold_db=self.sinr_threshold_db,
            similarity_coeff=self.similarity_coeff,
            bs_noise_dbm=self.bs_noise_dbm,
            user_noise_dbm=self.user_noise_dbm,
            reference_model=self.reference_model,
            convergence_tol=self.convergence_tol,
            max_outer_iterations=self.max_outer_iterations,
        )

    def fit(self, X=None, y=None):
        """Run the alternating design for the given channels.

        X: complex array of shape (num_users, num_tx_antennas), or None
        to draw Rayleigh channels from ``random_state``. y is ignored.
        """
        cfg = self._config()
        if X is None:
            rng = np.random.default_rng(self.random_state)
            channels = scenario.draw_channels(cfg, rng)
        else:
            channels = np.asarray(X, dtype=complex)
            if channels.ndim != 2:
                raise ValueError(f"expected a 2-d channel matrix, got ndim={channels.ndim}")
        solution = driver.design_transceiver(cfg, channels)

        self.config_ = cfg
        self.channels_ = channels
        self.filter_ = solution.filter
        self.covariance_ = solution.design.covariance
        self.w_comm_ = solution.design.w_comm
        self.w_sense_ = solution.design.w_sense
        self.scnr_trace_ = solution.scnr_trace
        self.mse_trace_ = solution.mse_trace
        self.converged_ = solution.converged
        self.n_iter_ = solution.outer_iterations
        self._solution = solution
        return self

    def predict(self, angles) -> np.ndarray:
        """Receive beampattern in dB relative to peak at the given angles."""
        check_is_fitted(self, "covariance_")
        pattern = metrics.beampattern(self.config_, self.covariance_, self.filter_, angles)
        return np.array([g for _, g in pattern])

    def score(self, X=None, y=None) -> float:
        """Final sensing SCNR in dB (higher is better)."""
        check_is_fitted(self, "covariance_")
        model = taper.build_interference_model(self.config_)
        return 10.0 * np.log10(metrics.scnr(model, self.covariance_, self.filter_))

    def report(self) -> metrics.MetricsReport:
        """Full metric report for the fitted design."""
        check_is_fitted(self, "covariance_")
        model = taper.build_interference_model(self.config_)
        return metrics.compute_metrics(
            self.config_, model, self.channels_, self.filter_, self._solution.design
        )
