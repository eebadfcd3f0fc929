"""Rolling-origin cross-validation and forecast accuracy metrics.

A fixed training window rolls over the series; at every origin each
configured method is fit on the (transformed) window and scored against
the actual values over all horizons. Errors are pooled across origins per
horizon, and methods are compared pairwise by percentage MAPE reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigMismatch,
    ConfigTooLargeForSeries,
    LengthMismatch,
    MalformedInput,
    NonPositiveValue,
    ZeroActual,
    ZeroBaseline,
)
from .models import ARFIMA, ARIMA, FAMILIES, MEAN, NAIVE, fit_arfima, fit_arima, fit_mean, fit_naive, forecast
from .series import TimeSeries, TransformSpec, transform


@dataclass(frozen=True)
class CvConfig:
    """Cross-validation protocol: training window length, maximum forecast
    horizon, origin stride, the methods to compare, the interval level, and
    the transform applied to every training window (None fits on the raw
    scale)."""

    window: int = 96
    max_horizon: int = 48
    step: int = 1
    methods: tuple = (NAIVE, MEAN, ARIMA, ARFIMA)
    level: float = 0.95
    transform: TransformSpec | None = TransformSpec(lmbda=0.0)

    def __post_init__(self):
        if self.window < 2 or self.max_horizon < 1:
            raise MalformedInput("window must be >= 2 and max_horizon >= 1")
        if self.step < 1:
            raise MalformedInput("step must be >= 1")
        if not self.methods:
            raise MalformedInput("at least one method is required")
        for m in self.methods:
            if m not in FAMILIES:
                raise MalformedInput(f"unknown method {m!r}")
        if len(set(self.methods)) != len(self.methods):
            raise MalformedInput("duplicate methods")
        if not 0.0 < self.level < 1.0:
            raise MalformedInput("level must lie in (0, 1)")


@dataclass(frozen=True)
class MetricSet:
    """Per-horizon accuracy of one method: pooled MAE and MAPE plus the
    underlying per-origin error matrices (origins x horizons)."""

    mae: np.ndarray
    mape: np.ndarray
    errors: np.ndarray
    pct_errors: np.ndarray
    count: int


@dataclass(frozen=True)
class Improvement:
    """Percentage MAPE reduction of a candidate method over a baseline,
    per horizon and for the mean over horizons, plus the best horizon."""

    per_horizon: np.ndarray
    mean: float
    max: float


@dataclass(frozen=True)
class CvReport:
    per_method: dict
    improvements: dict
    series_label: str
    config: CvConfig
    excluded_origins: tuple = ()
    boxplot: dict | None = None

    @property
    def total_experiments(self) -> int:
        return sum(m.count * self.config.max_horizon for m in self.per_method.values())


def mae(actual, forecast_values) -> float:
    """Mean absolute error."""
    actual = np.asarray(actual, dtype=float)
    forecast_values = np.asarray(forecast_values, dtype=float)
    if actual.shape != forecast_values.shape:
        raise LengthMismatch("actual and forecast lengths differ")
    return float(np.mean(np.abs(actual - forecast_values)))


def mape(actual, forecast_values) -> float:
    """Mean absolute percentage error, in percent."""
    actual = np.asarray(actual, dtype=float)
    forecast_values = np.asarray(forecast_values, dtype=float)
    if actual.shape != forecast_values.shape:
        raise LengthMismatch("actual and forecast lengths differ")
    if np.any(actual == 0):
        raise ZeroActual("percentage error undefined for zero actuals")
    return float(np.mean(np.abs(100.0 * (actual - forecast_values) / actual)))


def improvement(mape_baseline: float, mape_candidate: float) -> float:
    """Percentage reduction of the candidate's MAPE relative to the
    baseline's; negative when the candidate is worse."""
    if mape_baseline <= 0:
        raise ZeroBaseline("baseline MAPE must be positive")
    return float((mape_baseline - mape_candidate) / mape_baseline * 100.0)


_FITTERS = {
    NAIVE: fit_naive,
    MEAN: fit_mean,
    ARIMA: fit_arima,
    ARFIMA: fit_arfima,
}


def _improvement_table(per_method: dict, methods) -> dict:
    out = {}
    for a in methods:
        for b in methods:
            if a == b:
                continue
            ma, mb = per_method[a].mape, per_method[b].mape
            per_h = np.where(ma > 0, (ma - mb) / np.where(ma > 0, ma, 1.0) * 100.0, np.nan)
            mean_a, mean_b = float(ma.mean()), float(mb.mean())
            mean_impr = improvement(mean_a, mean_b) if mean_a > 0 else float("nan")
            max_impr = float(np.nanmax(per_h)) if np.any(np.isfinite(per_h)) else float("nan")
            out[(a, b)] = Improvement(per_horizon=per_h, mean=mean_impr, max=max_impr)
    return out


def _metrics_from_matrices(e: np.ndarray, pct: np.ndarray) -> MetricSet:
    return MetricSet(
        mae=np.abs(e).mean(axis=0),
        mape=np.abs(pct).mean(axis=0),
        errors=e,
        pct_errors=pct,
        count=e.shape[0],
    )


def rolling_cv(series: TimeSeries, config: CvConfig) -> CvReport:
    """Run the rolling-origin protocol on one series.

    For every origin the window [o - window, o) is transformed, each method
    is fit and asked for forecasts over 1..max_horizon, and the
    back-transformed points are scored against the actuals. An origin where
    any method fails is excluded for all methods, keeping every pairwise
    comparison paired.
    """
    n = len(series)
    if config.window + config.max_horizon > n:
        raise ConfigTooLargeForSeries(
            f"window {config.window} + horizon {config.max_horizon} exceeds length {n}"
        )
    if config.transform is not None and config.transform.lmbda == 0.0:
        if np.any(series.values <= 0):
            raise NonPositiveValue("log-scale cross-validation needs positive data")
    if np.any(series.values == 0):
        raise ZeroActual("zero actuals make MAPE undefined")

    errors = {m: [] for m in config.methods}
    pct = {m: [] for m in config.methods}
    excluded = []
    for origin in range(config.window, n - config.max_horizon + 1, config.step):
        win = TimeSeries(
            series.values[origin - config.window : origin],
            start_time=series.start_time + (origin - config.window) * series.interval,
            interval=series.interval,
            label=series.label,
        )
        if config.transform is not None:
            win = transform(win, config.transform)
        actual = series.values[origin : origin + config.max_horizon]
        points = {}
        try:
            for m in config.methods:
                model = _FITTERS[m](win)
                points[m] = forecast(model, config.max_horizon, config.level).point
        except Exception as exc:  # noqa: BLE001 - any failed fit excludes the origin
            excluded.append((origin, m, f"{type(exc).__name__}: {exc}"))
            continue
        for m in config.methods:
            e = actual - points[m]
            errors[m].append(e)
            pct[m].append(100.0 * e / actual)

    per_method = {}
    for m in config.methods:
        e = np.asarray(errors[m]) if errors[m] else np.empty((0, config.max_horizon))
        p = np.asarray(pct[m]) if pct[m] else np.empty((0, config.max_horizon))
        per_method[m] = _metrics_from_matrices(e, p)
    improvements = (
        _improvement_table(per_method, config.methods)
        if all(ms.count > 0 for ms in per_method.values())
        else {}
    )
    return CvReport(
        per_method=per_method,
        improvements=improvements,
        series_label=series.label,
        config=config,
        excluded_origins=tuple(excluded),
    )


def _boxplot_quantiles(per_method: dict) -> dict:
    out = {}
    for m, ms in per_method.items():
        absp = np.abs(ms.pct_errors)
        out[m] = np.percentile(absp, [0, 25, 50, 75, 100], axis=0).T  # h x 5
    return out


def aggregate_reports(reports) -> CvReport:
    """Pool per-origin errors across series and recompute all metrics.

    Configurations must match exactly. The pooled report also carries
    per-horizon quantiles (min, q1, median, q3, max) of the absolute
    percentage errors for boxplot-style presentation.
    """
    reports = list(reports)
    if not reports:
        raise MalformedInput("no reports to aggregate")
    config = reports[0].config
    for r in reports[1:]:
        if r.config != config:
            raise ConfigMismatch("reports were produced under different configs")
    per_method = {}
    for m in config.methods:
        e = np.vstack([r.per_method[m].errors for r in reports])
        p = np.vstack([r.per_method[m].pct_errors for r in reports])
        per_method[m] = _metrics_from_matrices(e, p)
    improvements = (
        _improvement_table(per_method, config.methods)
        if all(ms.count > 0 for ms in per_method.values())
        else {}
    )
    excluded = tuple(x for r in reports for x in r.excluded_origins)
    label = ";".join(r.series_label for r in reports)
    return CvReport(
        per_method=per_method,
        improvements=improvements,
        series_label=label,
        config=config,
        excluded_origins=excluded,
        boxplot=_boxplot_quantiles(per_method),
    )
