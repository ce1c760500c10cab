import numpy as np
import pytest

from isacbeam import experiments, scenario


def tiny_config(**kw):
    params = dict(
        num_tx_antennas=4,
        num_users=1,
        clutter_angles_deg=(50.0, -30.0),
        max_outer_iterations=6,
    )
    params.update(kw)
    return scenario.ScenarioConfig(**params)


class TestSpecValidation:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            experiments.ExperimentSpec(kind="fancy", base=tiny_config())

    def test_zero_trials_rejected(self):
        with pytest.raises(ValueError, match="trials"):
            experiments.ExperimentSpec(kind="montecarlo", base=tiny_config(), trials=0)

    def test_sweep_needs_values(self):
        with pytest.raises(ValueError, match="value list"):
            experiments.ExperimentSpec(
                kind="sweep", base=tiny_config(), sweep_param="delta"
            )

    def test_sweep_needs_known_param(self):
        with pytest.raises(ValueError, match="sweep parameter"):
            experiments.ExperimentSpec(
                kind="sweep",
                base=tiny_config(),
                sweep_param="bandwidth",
                sweep_values=(1.0,),
            )


class TestResultTable:
    def test_ragged_rows_rejected(self):
        with pytest.raises(ValueError, match="row width"):
            experiments.ResultTable(columns=["a", "b"], rows=[[1.0]])

    def test_column_lookup(self):
        t = experiments.ResultTable(columns=["a", "b"], rows=[[1, 2], [3, 4]])
        assert np.array_equal(t.column("b"), [2.0, 4.0])


class TestCsvWriter:
    def test_format_and_determinism(self, tmp_path):
        t = experiments.ResultTable(
            columns=["x", "y"],
            rows=[[1, 0.5], [2, float("nan")]],
            metadata={"seed": 3, "config_hash": "abc123"},
        )
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        experiments.write_csv(t, p1)
        experiments.write_csv(t, p2)
        data = p1.read_bytes()
        assert data == p2.read_bytes()
        text = data.decode()
        assert "\r" not in text
        lines = text.splitlines()
        assert lines[0] == "# config_hash: abc123"
        assert lines[1] == "# seed: 3"
        assert lines[2] == "x,y"
        assert lines[3] == "1,0.5"
        assert lines[4] == "2,nan"


class TestTrialConfig:
    def test_delta_maps_to_taper_width(self):
        cfg = experiments.trial_config(tiny_config(), "delta", 0.05)
        assert cfg.taper_width == 0.05

    def test_antenna_count_tracks_both_arrays(self):
        cfg = experiments.trial_config(tiny_config(), "num_antennas", 6)
        assert cfg.num_tx_antennas == 6
        assert cfg.num_rx_antennas == 6

    def test_none_passes_through(self):
        base = tiny_config()
        assert experiments.trial_config(base, None, None) is base


class TestMonteCarlo:
    def test_aggregate_row_consistency(self):
        spec = experiments.ExperimentSpec(
            kind="montecarlo", base=tiny_config(), master_seed=1, trials=3
        )
        table = experiments.run_montecarlo(spec)
        trials = table.column("trial")
        assert list(trials) == [0.0, 1.0, 2.0, -1.0]
        scnrs = table.column("scnr_db")
        assert scnrs[-1] == pytest.approx(scnrs[:-1].mean(), rel=1e-12)
        want_stderr = np.std(scnrs[:-1], ddof=1) / np.sqrt(3)
        assert table.column("scnr_db_stderr")[-1] == pytest.approx(want_stderr, rel=1e-12)
        assert table.metadata["failed_trials"] == 0

    def test_reproducible_given_seed(self):
        spec = experiments.ExperimentSpec(
            kind="montecarlo", base=tiny_config(), master_seed=5, trials=2
        )
        a = experiments.run_montecarlo(spec)
        b = experiments.run_montecarlo(spec)
        assert a.rows == b.rows


class TestSweep:
    def test_rows_per_value(self):
        spec = experiments.ExperimentSpec(
            kind="sweep",
            base=tiny_config(),
            master_seed=2,
            trials=1,
            sweep_param="delta",
            sweep_values=(0.0, 0.03),
        )
        table = experiments.run_sweep(spec)
        assert list(table.column("param_value")) == [0.0, 0.03]
        assert all(v == 1 for v in table.column("trials_ok"))
        assert all(v == 0 for v in table.column("trials_failed"))

    def test_infeasible_values_recorded_not_fatal(self):
        base = tiny_config(num_users=2, user_noise_dbm=20.0)
        spec = experiments.ExperimentSpec(
            kind="sweep",
            base=base,
            master_seed=3,
            trials=1,
            sweep_param="gamma_db",
            sweep_values=(5.0, 60.0),
        )
        table = experiments.run_sweep(spec)
        ok = table.column("trials_ok")
        failed = table.column("trials_failed")
        assert ok[0] == 1 and failed[0] == 0
        assert ok[1] == 0 and failed[1] == 1
        assert np.isnan(table.column("scnr_db_mean")[1])


class TestDesign:
    def test_summary_and_trace(self):
        spec = experiments.ExperimentSpec(kind="design", base=tiny_config(), master_seed=4)
        table, summary = experiments.run_design(spec)
        assert table.columns == ["outer_iter", "scnr_db", "beampattern_mse"]
        assert len(table.rows) == summary["outer_iterations"]
        assert summary["converged"]
        cap = summary["per_antenna_cap_mw"]
        assert summary["per_antenna_power_mw_max"] <= cap * (1 + 1e-6)
        assert summary["similarity_error"] <= summary["similarity_bound"] * (1 + 1e-6)
        assert summary["config_hash"] == spec.base.config_hash()


class TestBeampattern:
    def test_columns_and_grid(self):
        spec = experiments.ExperimentSpec(
            kind="beampattern", base=tiny_config(), master_seed=6
        )
        table = experiments.run_beampattern(spec)
        assert table.columns == [
            "angle_deg",
            "gain_db_proposed",
            "gain_db_no_taper",
            "gain_db_reference",
        ]
        angles = table.column("angle_deg")
        assert angles[0] == -90.0
        assert angles[-1] == 89.5
        for name in table.columns[1:]:
            gains = table.column(name)
            assert gains.max() == pytest.approx(0.0, abs=1e-9)
            assert gains.min() >= -120.0
