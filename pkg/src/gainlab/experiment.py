"""Batch experiment harness: seeded random problems, equivalence runs, reports.

Every trial is a pure function of the experiment configuration and its own
index, so a report is reproducible byte-for-byte no matter how trials are
scheduled. Per-trial seeds come from a splitmix-style mix of the master seed
and the trial index, giving independent streams under any parallel schedule.
"""

import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Optional

import numpy as np

from .exceptions import GainlabError, InvalidParameter
from .kalman_update import FilterProblem
from .matrix_core import random_spd
from .objectives import ObjectiveKind, evaluate_objective
from .optimizer import OptimizerConfig, cross_objective_equivalence, stationarity_residual

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "SummaryRecord",
    "ExperimentResult",
    "DISTANCE_THRESHOLD",
    "mix_seed",
    "make_problem",
    "run_trial",
    "run_experiment",
    "emit_report",
    "render_report",
    "CSV_HEADER",
]

# A trial "passes" when it completes and every optimized gain lands within
# this Frobenius distance of the closed-form gain.
DISTANCE_THRESHOLD = 1e-5

CSV_HEADER = ("trial_index,seed_used,gain_distance_logdet,gain_distance_trace,"
              "gain_distance_entropy,stationarity_residual,iter_logdet,"
              "iter_trace,iter_entropy,converged_all")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

_KIND_ORDER = (ObjectiveKind.LOG_GENERALIZED_VARIANCE,
               ObjectiveKind.TOTAL_VARIANCE,
               ObjectiveKind.DIFFERENTIAL_ENTROPY)


def mix_seed(seed: int, index: int) -> int:
    """Output ``index`` of a splitmix64 stream seeded with ``seed``.

    Standard splitmix64 finalizer over the golden-ratio increment; used to
    derive independent per-trial and per-matrix seeds.
    """
    z = (seed + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class ExperimentConfig:
    """Batch settings; the report is a pure function of these fields."""

    state_dim: int = 4
    obs_dim: int = 3
    trials: int = 50
    master_seed: int = 1
    cond_target: float = 10.0
    grad_tol: float = 1e-9
    max_iters: int = 5000
    output_format: str = "json"
    output_path: str = "-"

    def __post_init__(self):
        if self.state_dim < 1 or self.obs_dim < 1:
            raise InvalidParameter("state_dim and obs_dim must be >= 1")
        if self.trials < 1:
            raise InvalidParameter("trials must be >= 1")
        if self.master_seed < 0:
            raise InvalidParameter("master_seed must be a non-negative integer")
        if not np.isfinite(self.cond_target) or self.cond_target < 1.0:
            raise InvalidParameter("cond_target must be >= 1")
        if not self.grad_tol > 0:
            raise InvalidParameter("grad_tol must be > 0")
        if self.max_iters < 1:
            raise InvalidParameter("max_iters must be >= 1")
        if self.output_format not in ("json", "csv"):
            raise InvalidParameter(
                f"output_format must be 'json' or 'csv', got {self.output_format!r}")

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(max_iters=self.max_iters, grad_tol=self.grad_tol)


@dataclass(frozen=True)
class TrialRecord:
    """Evidence from one trial; failures are recorded, never raised."""

    trial_index: int
    seed_used: int
    failed: bool = False
    error: Optional[str] = None
    gain_distance_logdet: Optional[float] = None
    gain_distance_trace: Optional[float] = None
    gain_distance_entropy: Optional[float] = None
    stationarity_residual: Optional[float] = None
    objective_at_analytic: Optional[dict] = None
    iterations: Optional[dict] = None
    converged: Optional[dict] = None

    @property
    def distances(self) -> tuple:
        return (self.gain_distance_logdet, self.gain_distance_trace,
                self.gain_distance_entropy)

    def passed(self, threshold: float = DISTANCE_THRESHOLD) -> bool:
        if self.failed:
            return False
        return all(d <= threshold for d in self.distances)


@dataclass(frozen=True)
class SummaryRecord:
    trials: int
    failures: int
    max_gain_distance: Optional[float]
    mean_gain_distance: Optional[float]
    max_stationarity_residual: Optional[float]


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    trials: list[TrialRecord]
    summary: SummaryRecord

    def all_passed(self, threshold: float = DISTANCE_THRESHOLD) -> bool:
        return all(record.passed(threshold) for record in self.trials)


def make_problem(state_dim: int, obs_dim: int, seed: int,
                 cond_target: float = 10.0) -> FilterProblem:
    """Seeded random filter problem.

    Prior and noise covariances come from :func:`gainlab.matrix_core.random_spd`;
    the observation operator gets independent standard-Gaussian entries (it is
    rectangular, so no structure beyond linearity is imposed). The three
    matrices use independent seeds mixed from ``seed``.
    """
    prior = random_spd(state_dim, mix_seed(seed, 0), cond_target)
    obs_noise = random_spd(obs_dim, mix_seed(seed, 1), cond_target)
    rng = np.random.default_rng(mix_seed(seed, 2))
    obs_op = rng.standard_normal((obs_dim, state_dim))
    return FilterProblem(prior=prior, obs_op=obs_op, obs_noise=obs_noise)


def run_trial(config: ExperimentConfig, index: int) -> TrialRecord:
    """Run one seeded trial; exceptions become a failed record with its seed."""
    seed = mix_seed(config.master_seed, index)
    try:
        problem = make_problem(config.state_dim, config.obs_dim, seed,
                               config.cond_target)
        equivalence = cross_objective_equivalence(problem,
                                                  config.optimizer_config())
        reference = equivalence.analytic
        at_analytic = {kind.short_name: evaluate_objective(problem, reference, kind)
                       for kind in _KIND_ORDER}
        return TrialRecord(
            trial_index=index,
            seed_used=seed,
            gain_distance_logdet=equivalence.distance_to_analytic[
                ObjectiveKind.LOG_GENERALIZED_VARIANCE],
            gain_distance_trace=equivalence.distance_to_analytic[
                ObjectiveKind.TOTAL_VARIANCE],
            gain_distance_entropy=equivalence.distance_to_analytic[
                ObjectiveKind.DIFFERENTIAL_ENTROPY],
            stationarity_residual=stationarity_residual(problem, reference),
            objective_at_analytic=at_analytic,
            iterations={kind.short_name: equivalence.reports[kind].iterations
                        for kind in _KIND_ORDER},
            converged={kind.short_name: equivalence.reports[kind].converged
                       for kind in _KIND_ORDER},
        )
    except GainlabError as exc:
        return TrialRecord(trial_index=index, seed_used=seed, failed=True,
                           error=f"{type(exc).__name__}: {exc}")


def _summarize(records: list[TrialRecord]) -> SummaryRecord:
    failures = sum(1 for r in records if r.failed)
    distances = [d for r in records if not r.failed for d in r.distances]
    residuals = [r.stationarity_residual for r in records if not r.failed]
    if distances:
        summary = SummaryRecord(
            trials=len(records),
            failures=failures,
            max_gain_distance=max(distances),
            mean_gain_distance=sum(distances) / len(distances),
            max_stationarity_residual=max(residuals),
        )
    else:
        summary = SummaryRecord(trials=len(records), failures=failures,
                                max_gain_distance=None, mean_gain_distance=None,
                                max_stationarity_residual=None)
    return summary


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run all trials and summarize.

    ``workers`` only controls scheduling: trials are independent, records are
    ordered by index, and the result is identical for any worker count.
    """
    if workers < 1:
        raise InvalidParameter(f"workers must be >= 1, got {workers}")
    indices = range(config.trials)
    if workers == 1:
        records = [run_trial(config, i) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(partial(run_trial, config), indices))
    return ExperimentResult(config=config, trials=records,
                            summary=_summarize(records))


def _config_dict(config: ExperimentConfig) -> dict:
    # output_path is deliberately omitted so report content does not depend
    # on where it is written.
    return {
        "state_dim": config.state_dim,
        "obs_dim": config.obs_dim,
        "trials": config.trials,
        "master_seed": config.master_seed,
        "cond_target": config.cond_target,
        "grad_tol": config.grad_tol,
        "max_iters": config.max_iters,
        "output_format": config.output_format,
    }


def _trial_dict(record: TrialRecord) -> dict:
    return {
        "trial_index": record.trial_index,
        "seed_used": record.seed_used,
        "failed": record.failed,
        "error": record.error,
        "gain_distance_logdet": record.gain_distance_logdet,
        "gain_distance_trace": record.gain_distance_trace,
        "gain_distance_entropy": record.gain_distance_entropy,
        "stationarity_residual": record.stationarity_residual,
        "objective_at_analytic": record.objective_at_analytic,
        "iterations": record.iterations,
        "converged": record.converged,
    }


def _summary_dict(summary: SummaryRecord) -> dict:
    return {
        "trials": summary.trials,
        "failures": summary.failures,
        "max_gain_distance": summary.max_gain_distance,
        "mean_gain_distance": summary.mean_gain_distance,
        "max_stationarity_residual": summary.max_stationarity_residual,
    }


def _float_cell(value: Optional[float]) -> str:
    # repr() of a float is the shortest decimal that round-trips.
    return "nan" if value is None else repr(float(value))


def _csv_row(record: TrialRecord) -> str:
    if record.failed:
        iters = {"logdet": 0, "trace": 0, "entropy": 0}
        converged_all = False
    else:
        iters = record.iterations
        converged_all = all(record.converged.values())
    cells = [
        str(record.trial_index),
        str(record.seed_used),
        _float_cell(record.gain_distance_logdet),
        _float_cell(record.gain_distance_trace),
        _float_cell(record.gain_distance_entropy),
        _float_cell(record.stationarity_residual),
        str(iters["logdet"]),
        str(iters["trace"]),
        str(iters["entropy"]),
        "true" if converged_all else "false",
    ]
    return ",".join(cells)


def render_report(result: ExperimentResult) -> str:
    """Render a result in its configured format, ending with one newline."""
    if not result.trials:
        raise InvalidParameter("cannot render a report with no trial records")
    if result.config.output_format == "json":
        payload = {
            "config": _config_dict(result.config),
            "trials": [_trial_dict(r) for r in result.trials],
            "summary": _summary_dict(result.summary),
        }
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"
    lines = [CSV_HEADER]
    lines.extend(_csv_row(r) for r in result.trials)
    s = result.summary
    lines.append(f"# summary trials={s.trials} failures={s.failures} "
                 f"max_gain_distance={_float_cell(s.max_gain_distance)} "
                 f"mean_gain_distance={_float_cell(s.mean_gain_distance)} "
                 f"max_stationarity_residual={_float_cell(s.max_stationarity_residual)}")
    return "\n".join(lines) + "\n"


def emit_report(result: ExperimentResult, path: Optional[str] = None) -> None:
    """Write the rendered report to ``path`` ('-' or None for stdout)."""
    text = render_report(result)
    target = result.config.output_path if path is None else path
    if target == "-":
        sys.stdout.write(text)
        return
    with open(target, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
