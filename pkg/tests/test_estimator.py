import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from isacbeam import metrics, scenario, taper
from isacbeam.estimator import TransceiverDesigner


def small_designer(**kw):
    params = dict(
        num_tx_antennas=4,
        num_users=1,
        clutter_angles_deg=(50.0, -30.0),
        max_outer_iterations=10,
        random_state=0,
    )
    params.update(kw)
    return TransceiverDesigner(**params)


class TestSklearnProtocol:
    def test_params_roundtrip(self):
        est = small_designer(taper_width=0.05)
        params = est.get_params()
        assert params["taper_width"] == 0.05
        est.set_params(taper_width=0.01)
        assert est.taper_width == 0.01

    def test_clone_preserves_params(self):
        est = small_designer(sinr_threshold_db=7.0)
        twin = clone(est)
        assert twin.get_params() == est.get_params()

    def test_fit_returns_self_and_sets_attributes(self):
        est = small_designer().fit()
        assert est.covariance_.shape == (4, 4)
        assert est.filter_.shape == (4,)
        assert est.w_comm_.shape == (4, 1)
        assert est.w_sense_.shape[0] == 4
        assert est.n_iter_ == len(est.scnr_trace_) == len(est.mse_trace_)
        assert isinstance(est.converged_, bool)

    def test_predict_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            small_designer().predict([0.0])
        with pytest.raises(NotFittedError):
            small_designer().score()


class TestFitBehavior:
    def test_same_random_state_reproduces(self):
        a = small_designer().fit()
        b = small_designer().fit()
        assert np.array_equal(a.covariance_, b.covariance_)
        assert np.array_equal(a.filter_, b.filter_)

    def test_explicit_channels_match_drawn(self):
        est = small_designer().fit()
        cfg = est.config_
        channels = scenario.draw_channels(cfg, np.random.default_rng(0))
        direct = small_designer().fit(channels)
        assert np.array_equal(est.covariance_, direct.covariance_)

    def test_bad_channel_rank_rejected(self):
        with pytest.raises(ValueError, match="ndim"):
            small_designer().fit(np.zeros(4, dtype=complex))

    def test_predict_matches_beampattern(self):
        est = small_designer().fit()
        angles = np.linspace(-90.0, 89.5, 19)
        got = est.predict(angles)
        want = np.array(
            [g for _, g in metrics.beampattern(est.config_, est.covariance_, est.filter_, angles)]
        )
        assert np.array_equal(got, want)

    def test_score_is_final_scnr_db(self):
        est = small_designer().fit()
        model = taper.build_interference_model(est.config_)
        want = 10 * np.log10(metrics.scnr(model, est.covariance_, est.filter_))
        assert est.score() == pytest.approx(want, rel=1e-12)

    def test_report_fields(self):
        report = small_designer().fit().report()
        assert np.isfinite(report.scnr_db)
        assert len(report.sinr_db) == 1
        assert report.sum_rate_bits > 0.0
