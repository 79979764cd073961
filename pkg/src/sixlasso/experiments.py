"""Seeded Monte Carlo harness: sweep grids, per-trial seeds, aggregation.

Every trial seed derives from the sweep's base seed and the trial's position
in the canonical enumeration, so records are reproducible bit-for-bit no
matter how (or whether) trials are parallelized.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from multiprocessing import get_context

import numpy as np

from .errors import EmptyRecords, SixLassoError
from .metrics import TrialMetrics, classify_accuracy, direction_error, norm_gap, support_metrics
from .model import (
    RANDOM_MAGNITUDE,
    TrueSignal,
    compute_lambda,
    generate_dataset,
    get_link,
    make_signal,
)
from .solver import SolverConfig, fit_lasso, pv_linear_fit

THREADS_ENV = "SIXLASSO_THREADS"

ESTIMATORS = ("lasso", "pv")

RADIUS_RULES = ("sqrt_s", "two_sqrt_s_over_lambda", "raw_s", "explicit")

_MASK64 = (1 << 64) - 1
_TEST_TAG = 0x74657374  # ascii "test": separates the held-out stream
_SIGNAL_TAG = 0x7369676E616C  # ascii "signal": separates the signal stream


def mix64(x: int) -> int:
    """SplitMix64 finalizer: the 64-bit mixing step behind all derived seeds."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition for one Monte Carlo sweep.

    radius_rule picks the l1 budget per trial: "sqrt_s" (sqrt(s), the
    effective-sparsity radius), "two_sqrt_s_over_lambda", "raw_s" (s), or
    "explicit" with radius_value.  estimators are canonicalized to
    ("lasso", "pv") order so that trial ids do not depend on input order.
    The signal is drawn once per sweep by default; set
    fresh_signal_per_trial for a new signal every trial.
    """

    p: int
    s: int
    n_grid: tuple[int, ...]
    link: str = "logistic"
    radius_rule: str = "sqrt_s"
    radius_value: float | None = None
    reps: int = 10
    base_seed: int = 0
    signal_mode: str = RANDOM_MAGNITUDE
    estimators: tuple[str, ...] = ("lasso",)
    test_n: int = 10_000
    fresh_signal_per_trial: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        requested = tuple(self.estimators)
        unknown = set(requested) - set(ESTIMATORS)
        if unknown:
            raise ValueError(f"unknown estimators {sorted(unknown)}; expected from {ESTIMATORS}")
        object.__setattr__(self, "estimators", tuple(e for e in ESTIMATORS if e in requested))
        if not self.estimators:
            raise ValueError(f"estimators must be a nonempty subset of {ESTIMATORS}")
        if not self.n_grid:
            raise ValueError("n_grid must be nonempty")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError(f"n_grid must be strictly ascending, got {self.n_grid}")
        if min(self.n_grid) < 1:
            raise ValueError("sample sizes must be >= 1")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not 1 <= self.s <= self.p:
            raise ValueError(f"need 1 <= s <= p, got s={self.s}, p={self.p}")
        if self.radius_rule not in RADIUS_RULES:
            raise ValueError(f"unknown radius_rule {self.radius_rule!r}")
        if self.radius_rule == "explicit":
            if self.radius_value is None or self.radius_value <= 0:
                raise ValueError("explicit radius_rule needs radius_value > 0")
        if self.test_n < 1:
            raise ValueError("test_n must be >= 1")
        get_link(self.link)  # validates the tag


@dataclass(frozen=True)
class TrialRecord:
    """One trial's identity, socket of metrics, and solver diagnostics."""

    trial_id: int
    seed: int
    n: int
    p: int
    s: int
    link: str
    estimator: str
    radius: float
    metrics: TrialMetrics
    iterations: int
    converged: bool
    runtime_ms: float


@dataclass(frozen=True)
class SummaryRow:
    """Quantiles of one metric in one (estimator, n) cell."""

    estimator: str
    n: int
    metric: str
    q25: float
    median: float
    q75: float


def trial_id_for(spec: SweepSpec, n: int, rep: int, estimator: str) -> int:
    """Position of a trial in the canonical (n, rep, estimator) enumeration."""
    if n not in spec.n_grid:
        raise ValueError(f"n={n} is not in the sweep grid {spec.n_grid}")
    if not 0 <= rep < spec.reps:
        raise ValueError(f"rep={rep} outside [0, {spec.reps})")
    if estimator not in spec.estimators:
        raise ValueError(f"estimator {estimator!r} not in {spec.estimators}")
    i_n = spec.n_grid.index(n)
    i_e = spec.estimators.index(estimator)
    return (i_n * spec.reps + rep) * len(spec.estimators) + i_e


def trial_seed(spec: SweepSpec, trial_id: int) -> int:
    return mix64(spec.base_seed ^ trial_id)


def resolve_lambda(spec: SweepSpec) -> float:
    """Link constant for the sweep's link (quadrature, 64 nodes)."""
    return compute_lambda(get_link(spec.link))


def resolve_radius(spec: SweepSpec, lam: float | None = None) -> float:
    if spec.radius_rule == "sqrt_s":
        return float(np.sqrt(spec.s))
    if spec.radius_rule == "raw_s":
        return float(spec.s)
    if spec.radius_rule == "explicit":
        return float(spec.radius_value)
    lam = resolve_lambda(spec) if lam is None else lam
    return float(2.0 * np.sqrt(spec.s) / lam)


def sweep_signal(spec: SweepSpec) -> TrueSignal:
    """The sweep-level signal (used by every trial unless regeneration is on)."""
    return make_signal(spec.p, spec.s, spec.signal_mode, mix64(spec.base_seed ^ _SIGNAL_TAG))


def _failed_metrics(lam: float) -> TrialMetrics:
    nan = float("nan")
    return TrialMetrics(
        direction_error=2.0,
        raw_l2_error=nan,
        norm_beta_hat=0.0,
        norm_gap=-lam,
        support_precision=1.0,
        support_recall=0.0,
        test_accuracy=nan,
    )


def run_trial(spec: SweepSpec, cell: tuple[int, int], estimator: str,
              solver_config: SolverConfig | None = None, *,
              signal: TrueSignal | None = None, radius: float | None = None,
              lam: float | None = None) -> TrialRecord:
    """Generate, fit, and measure one trial.

    cell is (n, rep_index).  signal/radius/lam may be passed in as sweep-level
    precomputations; when omitted they are recomputed from the spec, so the
    result is a pure function of (spec, cell, estimator, solver_config).
    Domain failures (degenerate fits) become a failed-trial record with
    direction_error pinned at 2; they never abort a sweep.
    """
    n, rep = cell
    tid = trial_id_for(spec, n, rep, estimator)
    seed = trial_seed(spec, tid)
    lam = resolve_lambda(spec) if lam is None else lam
    radius = resolve_radius(spec, lam) if radius is None else radius
    if spec.fresh_signal_per_trial:
        signal = make_signal(spec.p, spec.s, spec.signal_mode, mix64(seed ^ _SIGNAL_TAG))
    elif signal is None:
        signal = sweep_signal(spec)

    link = get_link(spec.link)
    train = generate_dataset(signal, n, link, seed)
    test = generate_dataset(signal, spec.test_n, link, mix64(seed ^ _TEST_TAG))
    if link.kind == "linear":
        # regression mode: score sign agreement against the sign of the response
        test = replace(test, y=np.where(test.y >= 0, 1.0, -1.0))

    t0 = time.perf_counter()
    try:
        if estimator == "lasso":
            fit = fit_lasso(train, radius, solver_config)
            beta_hat, iterations, converged = fit.beta_hat, fit.iterations, fit.converged
        else:
            beta_hat = pv_linear_fit(train, radius)
            iterations, converged = 0, True
        prec, rec = support_metrics(beta_hat, signal)
        metrics = TrialMetrics(
            direction_error=direction_error(beta_hat, signal.beta),
            raw_l2_error=float(np.linalg.norm(beta_hat - signal.beta)),
            norm_beta_hat=float(np.linalg.norm(beta_hat)),
            norm_gap=norm_gap(beta_hat, lam),
            support_precision=prec,
            support_recall=rec,
            test_accuracy=classify_accuracy(beta_hat, test),
        )
    except SixLassoError:
        metrics = _failed_metrics(lam)
        iterations, converged = 0, False
    runtime_ms = (time.perf_counter() - t0) * 1000.0

    return TrialRecord(
        trial_id=tid, seed=seed, n=n, p=spec.p, s=spec.s, link=spec.link,
        estimator=estimator, radius=radius, metrics=metrics,
        iterations=iterations, converged=converged, runtime_ms=runtime_ms,
    )


def _trial_task(args):
    spec, n, rep, estimator, solver_config, signal, radius, lam = args
    return run_trial(spec, (n, rep), estimator, solver_config,
                     signal=signal, radius=radius, lam=lam)


def _thread_budget(threads: int | None) -> int:
    if threads is not None:
        return max(0, int(threads))
    raw = os.environ.get(THREADS_ENV, "0")
    try:
        return max(0, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def run_sweep(spec: SweepSpec, solver_config: SolverConfig | None = None,
              threads: int | None = None) -> list[TrialRecord]:
    """Run every (n, rep, estimator) trial of the sweep.

    threads=None reads SIXLASSO_THREADS (0 or 1 = serial; k >= 2 = a pool of
    k worker processes).  Output is always sorted by trial_id and is
    identical whichever way the trials were scheduled.
    """
    workers = _thread_budget(threads)
    lam = resolve_lambda(spec)
    radius = resolve_radius(spec, lam)
    signal = None if spec.fresh_signal_per_trial else sweep_signal(spec)
    tasks = [
        (spec, n, rep, est, solver_config, signal, radius, lam)
        for n in spec.n_grid
        for rep in range(spec.reps)
        for est in spec.estimators
    ]
    if workers >= 2:
        ctx = get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            records = list(pool.map(_trial_task, tasks))
    else:
        records = [_trial_task(t) for t in tasks]
    return sorted(records, key=lambda r: r.trial_id)


METRIC_FIELDS = (
    "direction_error",
    "raw_l2_error",
    "norm_beta_hat",
    "norm_gap",
    "support_precision",
    "support_recall",
    "test_accuracy",
)


def summarize(records: list[TrialRecord]) -> list[SummaryRow]:
    """Per-(estimator, n) quantiles of every metric.

    Quantiles use the "lower" interpolation convention (always an observed
    value).  Rows come out sorted by (estimator, n, metric order).
    """
    if not records:
        raise EmptyRecords("no records to summarize")
    cells: dict[tuple[str, int], list[TrialRecord]] = {}
    for rec in records:
        cells.setdefault((rec.estimator, rec.n), []).append(rec)
    rows = []
    for (est, n) in sorted(cells):
        group = cells[(est, n)]
        for name in METRIC_FIELDS:
            vals = np.array([getattr(rec.metrics, name) for rec in group])
            q25, med, q75 = (np.quantile(vals, q, method="lower") for q in (0.25, 0.5, 0.75))
            rows.append(SummaryRow(est, n, name, float(q25), float(med), float(q75)))
    return rows
