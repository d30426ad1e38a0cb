# analysis.py - Detection rates, postselected observable error rates and bootstrap intervals

import csv
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from experiment_types import (DEFAULT_RESAMPLES, EXCLUDE_DISCARD_RATE, EXCLUDE_MIN_POSTSELECTED,
                              EstimateError)
from frame_sampler import SampleBatch

CI_LEVEL = 0.95
CI_METHOD = "percentile95"

CSV_COLUMNS = ["name", "encoding", "size", "circuit", "depth", "mitigation", "readout", "model", "p",
               "n_samp", "n_discard", "R_det", "n_post", "R_obs_any", "R_obs_worst", "ci_low", "ci_high",
               "det_ci_low", "det_ci_high", "excluded", "reason", "vqed_est", "vqed_var", "vqed_sum_b",
               "ci_method", "seed"]

# statistic(unique_rows, weights) -> one value per weight row
Statistic = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class VqedEstimate:
    estimates: np.ndarray  # one quotient per observable
    worst: float  # smallest estimate
    variance: float  # delta-method variance of the worst estimate
    sum_b: float
    sum_o: np.ndarray
    interval: Optional[Tuple[float, float]] = None

    @property
    def error_rate(self) -> float:
        """Flip probability equivalent to the worst estimate"""
        return (1.0 - self.worst) / 2.0


@dataclass
class MetricsReport:
    n_samp: int
    n_discard: int
    R_det: float
    n_post: int
    R_obs_any: float = float("nan")
    R_obs_local: np.ndarray = field(default_factory=lambda: np.zeros(0))
    R_obs_worst: float = float("nan")
    intervals: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    excluded: bool = False
    reason: str = ""
    vqed: Optional[VqedEstimate] = None


def postselect(batch: SampleBatch) -> Tuple[SampleBatch, float]:
    """Keep the shots where no detector fired; returns the kept batch and R_det"""
    if batch.num_shots == 0:
        return batch, 0.0
    fired = batch.detectors.any(axis=1)
    kept = batch.select(~fired)
    return kept, float(fired.mean())


def observable_rates(batch: SampleBatch) -> Tuple[float, np.ndarray, float]:
    """(any-observable rate, per-observable rates, worst per-observable rate)"""
    if batch.num_shots == 0:
        raise EstimateError("observable rates need at least one postselected shot")
    observables = batch.observables
    if observables.shape[1] == 0:
        return 0.0, np.zeros(0), 0.0
    local = observables.mean(axis=0)
    return float(observables.any(axis=1).mean()), local, float(local.max())


def exclusion(R_det: float, n_post: int) -> Tuple[bool, str]:
    if R_det >= EXCLUDE_DISCARD_RATE:
        return True, f"R_det {R_det:.4f} >= {EXCLUDE_DISCARD_RATE}"
    if n_post < EXCLUDE_MIN_POSTSELECTED:
        return True, f"{n_post} postselected shots < {EXCLUDE_MIN_POSTSELECTED}"
    return False, ""


def bootstrap(rows: np.ndarray, statistic: Statistic, resamples: int = DEFAULT_RESAMPLES,
              seed: int = 0, point: Optional[float] = None) -> Tuple[float, float]:
    """Percentile interval over shot-level resamples with replacement.

    Identical shots are merged and each resample draws multinomial counts
    over the distinct rows. The interval is widened to contain the point
    estimate when one is given.
    """
    if resamples < 1:
        raise EstimateError(f"bootstrap needs at least one resample, got {resamples}")
    if len(rows) == 0:
        raise EstimateError("cannot bootstrap an empty batch")
    rows = rows.reshape(len(rows), -1)
    unique, counts = np.unique(rows, axis=0, return_counts=True)
    rng = np.random.default_rng(seed)
    weights = rng.multinomial(len(rows), counts / counts.sum(), size=resamples)
    values = np.asarray(statistic(unique, weights), dtype=float)
    alpha = (1.0 - CI_LEVEL) / 2.0
    low, high = np.percentile(values, [100.0 * alpha, 100.0 * (1.0 - alpha)])
    if point is not None:
        low, high = min(low, point), max(high, point)
    return float(low), float(high)


def worst_rate_statistic(unique: np.ndarray, weights: np.ndarray) -> np.ndarray:
    if unique.shape[1] == 0:
        return np.zeros(len(weights))
    local = weights @ unique.astype(float) / weights.sum(axis=1, keepdims=True)
    return local.max(axis=1)


def any_rate_statistic(unique: np.ndarray, weights: np.ndarray) -> np.ndarray:
    hits = unique.any(axis=1).astype(float)
    return weights @ hits / weights.sum(axis=1)


def shot_weights(aux_signs: np.ndarray) -> np.ndarray:
    """b per shot: product of the auxiliary outcomes of every layer"""
    return np.prod(aux_signs.astype(np.int64), axis=1)


def vqed_estimate(batch: SampleBatch, sign_corrections: Optional[Sequence[int]] = None) -> VqedEstimate:
    """Quotient estimator sum(o) / sum(b) per observable, reporting the worst one.

    b is the product of the auxiliary signs of all layers and o is b times
    the observable outcome. Layers whose prepared stabilizer value is -1 take
    a sign correction when their signs are raw outcomes.
    """
    if batch.aux_signs is None or batch.aux_signs.shape[1] == 0:
        raise EstimateError("batch carries no auxiliary signs")
    signs = batch.aux_signs.astype(np.int64)
    if sign_corrections is not None:
        signs = signs * np.where(np.asarray(sign_corrections, dtype=bool), -1, 1)
    b = shot_weights(signs).astype(float)
    outcomes = np.where(batch.observables, -1.0, 1.0)
    o = outcomes * b[:, None]
    sum_b = float(b.sum())
    if sum_b == 0:
        raise EstimateError("VQED denominator sum(b) is zero")
    sum_o = o.sum(axis=0)
    estimates = sum_o / sum_b
    if len(estimates) == 0:
        return VqedEstimate(estimates, 1.0, 0.0, sum_b, sum_o)
    worst = int(np.argmin(estimates))
    return VqedEstimate(estimates, float(estimates[worst]), _ratio_variance(o[:, worst], b),
                        sum_b, sum_o)


def _ratio_variance(o: np.ndarray, b: np.ndarray) -> float:
    """Delta-method variance of mean(o) / mean(b)"""
    n = len(b)
    if n < 2:
        return float("nan")
    ratio = o.mean() / b.mean()
    cov = np.cov(np.vstack([o, b]), ddof=1)
    spread = cov[0, 0] - 2 * ratio * cov[0, 1] + ratio ** 2 * cov[1, 1]
    return float(spread / (n * b.mean() ** 2))


def _vqed_statistic(num_observables: int) -> Statistic:
    """Worst quotient estimate over rows laid out as [observable flips..., b]"""
    def statistic(unique: np.ndarray, weights: np.ndarray) -> np.ndarray:
        outcomes = np.where(unique[:, :num_observables] > 0, -1.0, 1.0)
        b = unique[:, num_observables].astype(float)
        sum_b = weights @ b
        sum_o = weights @ (outcomes * b[:, None])
        with np.errstate(divide="ignore", invalid="ignore"):
            return (sum_o / sum_b[:, None]).min(axis=1)
    return statistic


def analyze_batch(batch: SampleBatch, resamples: int = DEFAULT_RESAMPLES, seed: int = 0,
                  vqed: bool = False) -> MetricsReport:
    """All metrics of one sampled experiment"""
    kept, R_det = postselect(batch)
    n_samp = batch.num_shots
    n_post = kept.num_shots
    report = MetricsReport(n_samp, n_samp - n_post, R_det, n_post)
    report.excluded, report.reason = exclusion(R_det, n_post)
    if n_samp:
        fired = batch.detectors.any(axis=1)
        report.intervals["R_det"] = bootstrap(fired, lambda u, w: w @ u[:, 0].astype(float) / w.sum(axis=1),
                                              resamples, seed, R_det)
    if n_post == 0:
        report.reason = report.reason or "no postselected shots"
        report.excluded = True
        return report
    report.R_obs_any, report.R_obs_local, report.R_obs_worst = observable_rates(kept)
    report.intervals["R_obs_worst"] = bootstrap(kept.observables, worst_rate_statistic, resamples, seed,
                                                report.R_obs_worst)
    report.intervals["R_obs_any"] = bootstrap(kept.observables, any_rate_statistic, resamples, seed,
                                              report.R_obs_any)
    if vqed:
        try:
            report.vqed = vqed_estimate(kept)
        except EstimateError as e:
            report.excluded = True
            report.reason = str(e)
            return report
        b = shot_weights(kept.aux_signs)
        rows = np.column_stack([kept.observables.astype(np.int64), b])
        report.vqed.interval = bootstrap(rows, _vqed_statistic(kept.observables.shape[1]),
                                         resamples, seed, report.vqed.worst)
    return report


def report_row(report: MetricsReport, labels: Dict[str, object]) -> Dict[str, object]:
    """One CSV row: identifying labels plus the metrics"""
    low, high = report.intervals.get("R_obs_worst", (float("nan"), float("nan")))
    det_low, det_high = report.intervals.get("R_det", (float("nan"), float("nan")))
    row = {column: "" for column in CSV_COLUMNS}
    row.update(labels)
    row.update({
        "n_samp": report.n_samp,
        "n_discard": report.n_discard,
        "R_det": _fmt(report.R_det),
        "n_post": report.n_post,
        "R_obs_any": _fmt(report.R_obs_any),
        "R_obs_worst": _fmt(report.R_obs_worst),
        "ci_low": _fmt(low),
        "ci_high": _fmt(high),
        "det_ci_low": _fmt(det_low),
        "det_ci_high": _fmt(det_high),
        "excluded": str(report.excluded).lower(),
        "reason": report.reason,
        "ci_method": CI_METHOD,
    })
    if report.vqed is not None:
        row["vqed_est"] = _fmt(report.vqed.worst)
        row["vqed_var"] = _fmt(report.vqed.variance)
        row["vqed_sum_b"] = _fmt(report.vqed.sum_b)
    return row


def _fmt(value: float) -> str:
    return "nan" if value is None or not np.isfinite(value) else f"{value:.6g}"


def write_csv(path: str, rows: Iterable[Dict[str, object]]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_csv(path: str) -> List[Dict[str, str]]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
