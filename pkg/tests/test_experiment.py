"""Tests for the seeded experiment harness and report emission."""

import json

import numpy as np
import pytest

import gainlab.experiment as experiment
from gainlab.exceptions import InvalidParameter, NotPositiveDefinite
from gainlab.experiment import (CSV_HEADER, ExperimentConfig, ExperimentResult,
                                emit_report, make_problem, mix_seed,
                                render_report, run_experiment, run_trial)


SMALL = ExperimentConfig(state_dim=3, obs_dim=2, trials=6, master_seed=9,
                         cond_target=10.0)


class TestSeedMixing:
    def test_deterministic(self):
        assert mix_seed(1, 0) == mix_seed(1, 0)

    def test_distinct_indices_distinct_seeds(self):
        seeds = {mix_seed(123, i) for i in range(1000)}
        assert len(seeds) == 1000

    def test_distinct_masters_distinct_streams(self):
        assert mix_seed(1, 0) != mix_seed(2, 0)

    def test_fits_in_64_bits(self):
        assert 0 <= mix_seed(2**64 - 1, 2**31) < 2**64


class TestMakeProblem:
    def test_deterministic(self):
        a = make_problem(4, 3, 77, 10.0)
        b = make_problem(4, 3, 77, 10.0)
        np.testing.assert_array_equal(a.prior, b.prior)
        np.testing.assert_array_equal(a.obs_op, b.obs_op)
        np.testing.assert_array_equal(a.obs_noise, b.obs_noise)

    def test_shapes(self):
        problem = make_problem(5, 2, 3, 10.0)
        assert problem.prior.shape == (5, 5)
        assert problem.obs_op.shape == (2, 5)
        assert problem.obs_noise.shape == (2, 2)


class TestRunTrial:
    def test_success_record(self):
        record = run_trial(SMALL, 0)
        assert not record.failed
        assert record.seed_used == mix_seed(SMALL.master_seed, 0)
        assert all(d >= 0 for d in record.distances)
        assert set(record.iterations) == {"logdet", "trace", "entropy"}
        assert set(record.objective_at_analytic) == {"logdet", "trace", "entropy"}

    def test_scalar_family(self):
        config = ExperimentConfig(state_dim=1, obs_dim=1, trials=1,
                                  master_seed=4, cond_target=1.0)
        record = run_trial(config, 0)
        assert not record.failed
        assert max(record.distances) <= 1e-6

    def test_failure_becomes_data(self, monkeypatch):
        def explode(problem, config):
            raise NotPositiveDefinite("synthetic degeneracy")
        monkeypatch.setattr(experiment, "cross_objective_equivalence", explode)
        record = run_trial(SMALL, 3)
        assert record.failed
        assert "NotPositiveDefinite" in record.error
        assert record.seed_used == mix_seed(SMALL.master_seed, 3)


class TestRunExperiment:
    def test_reproducible(self):
        first = run_experiment(SMALL)
        second = run_experiment(SMALL)
        assert render_report(first) == render_report(second)

    def test_workers_do_not_change_output(self):
        sequential = run_experiment(SMALL, workers=1)
        parallel = run_experiment(SMALL, workers=3)
        assert render_report(sequential) == render_report(parallel)

    def test_records_ordered_by_index(self):
        result = run_experiment(SMALL, workers=2)
        assert [r.trial_index for r in result.trials] == list(range(SMALL.trials))

    def test_summary_matches_brute_force(self):
        result = run_experiment(SMALL)
        distances = [d for r in result.trials if not r.failed for d in r.distances]
        assert result.summary.max_gain_distance == max(distances)
        assert result.summary.mean_gain_distance == pytest.approx(
            sum(distances) / len(distances), rel=0, abs=0)
        assert result.summary.failures == 0
        assert result.summary.trials == SMALL.trials

    def test_failed_trials_counted(self, monkeypatch):
        real = experiment.cross_objective_equivalence
        def sometimes(problem, config):
            if problem.state_dim != SMALL.state_dim:
                raise AssertionError("unexpected problem")
            sometimes.calls += 1
            if sometimes.calls == 2:
                raise NotPositiveDefinite("synthetic")
            return real(problem, config)
        sometimes.calls = 0
        monkeypatch.setattr(experiment, "cross_objective_equivalence", sometimes)
        result = run_experiment(SMALL)
        assert result.summary.failures == 1
        assert sum(r.failed for r in result.trials) == 1
        assert not result.all_passed()

    def test_rejects_bad_workers(self):
        with pytest.raises(InvalidParameter):
            run_experiment(SMALL, workers=0)

    def test_heavy_batch(self):
        # the slowest corner the harness is expected to handle: square
        # observation operators and strongly conditioned covariances
        config = ExperimentConfig(state_dim=8, obs_dim=8, trials=100,
                                  master_seed=1, cond_target=100.0)
        result = run_experiment(config, workers=4)
        assert result.summary.failures == 0
        assert result.summary.max_gain_distance <= 1e-5


class TestConfigValidation:
    @pytest.mark.parametrize("kwargs", [
        {"state_dim": 0},
        {"trials": 0},
        {"cond_target": 0.9},
        {"grad_tol": 0.0},
        {"max_iters": 0},
        {"output_format": "xml"},
        {"master_seed": -1},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(InvalidParameter):
            ExperimentConfig(**kwargs)


@pytest.fixture(scope="module")
def result():
    return run_experiment(SMALL)


class TestReportRendering:
    def test_json_structure(self, result):
        payload = json.loads(render_report(result))
        assert set(payload) == {"config", "trials", "summary"}
        assert len(payload["trials"]) == SMALL.trials
        assert payload["config"]["master_seed"] == SMALL.master_seed
        assert payload["summary"]["failures"] == 0

    def test_json_floats_round_trip(self, result):
        payload = json.loads(render_report(result))
        assert payload["summary"]["max_gain_distance"] == (
            result.summary.max_gain_distance)
        first = payload["trials"][0]
        assert first["gain_distance_logdet"] == result.trials[0].gain_distance_logdet

    def test_json_ends_with_single_newline(self, result):
        text = render_report(result)
        assert text.endswith("\n") and not text.endswith("\n\n")

    def test_csv_header_and_shape(self, result):
        csv_result = ExperimentResult(
            config=ExperimentConfig(
                state_dim=SMALL.state_dim, obs_dim=SMALL.obs_dim,
                trials=SMALL.trials, master_seed=SMALL.master_seed,
                cond_target=SMALL.cond_target, output_format="csv"),
            trials=result.trials, summary=result.summary)
        lines = render_report(csv_result).splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == SMALL.trials + 2
        assert lines[-1].startswith("# summary ")
        row = lines[1].split(",")
        assert len(row) == len(CSV_HEADER.split(","))
        assert row[0] == "0"
        assert row[-1] in ("true", "false")

    def test_empty_records_rejected(self):
        empty = ExperimentResult(config=SMALL, trials=[],
                                 summary=experiment._summarize([]))
        with pytest.raises(InvalidParameter):
            render_report(empty)

    def test_emit_to_file(self, result, tmp_path):
        target = tmp_path / "report.json"
        emit_report(result, str(target))
        assert json.loads(target.read_text()) == json.loads(render_report(result))

    def test_emit_to_stdout(self, result, capsys):
        emit_report(result, "-")
        assert capsys.readouterr().out == render_report(result)

    def test_emit_to_unwritable_path(self, result, tmp_path):
        with pytest.raises(OSError):
            emit_report(result, str(tmp_path / "missing_dir" / "report.json"))
