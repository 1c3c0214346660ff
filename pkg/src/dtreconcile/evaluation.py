"""Forecast accuracy metrics and the hyperparameter grid harness."""

from __future__ import annotations

import io
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .agent import AgentConfig, CycleData, ReconciliationTrace, reconcile_online, train
from .errors import ShapeError
from .forecasting import ForecastSet
from .seeding import derive_seed, rng_for


def mape(actuals, forecasts) -> float:
    """Mean absolute percentage error, in percent."""
    actuals = np.atleast_1d(np.asarray(actuals, dtype=float))
    forecasts = np.atleast_1d(np.asarray(forecasts, dtype=float))
    if actuals.shape != forecasts.shape:
        raise ShapeError(
            f"{actuals.size} actuals but {forecasts.size} forecasts"
        )
    if np.any(actuals == 0):
        raise ZeroDivisionError("MAPE undefined for zero actuals")
    return float(np.mean(np.abs(actuals - forecasts) / np.abs(actuals)) * 100.0)


def mape_rec(actual_total: float, rmf: float) -> float:
    """Percentage error of a revised monthly forecast vs the actual total."""
    if actual_total == 0:
        raise ZeroDivisionError("MAPE undefined for a zero actual total")
    return abs(actual_total - rmf) / abs(actual_total) * 100.0


def pct_improvement(base_total: float, rmf: float) -> float:
    """Percentage change of the revised total vs the unreconciled total."""
    if base_total == 0:
        raise ZeroDivisionError("undefined for a zero base total")
    return abs(base_total - rmf) / abs(base_total) * 100.0


@dataclass(frozen=True)
class MetricRow:
    label: str  # date or day label
    actual: float
    forecast: float
    rmf: float
    mape_rec_pct: float
    pct_f: float


@dataclass(frozen=True)
class MetricReport:
    """Per-day revision metrics for one test cycle."""

    rows: tuple[MetricRow, ...]
    base_total: float
    actual_total: float
    base_mape: float

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("date,actual,forecast,rmf,mape_rec_pct,pct_f\n")
        for row in self.rows:
            out.write(
                f"{row.label},{row.actual!r},{row.forecast!r},{row.rmf!r},"
                f"{row.mape_rec_pct!r},{row.pct_f!r}\n"
            )
        return out.getvalue()


def build_metric_report(
    trace: ReconciliationTrace,
    actuals,
    forecasts,
    labels: Sequence[str] | None = None,
) -> MetricReport:
    """Evaluate a trace against the full cycle's actuals.

    ``actuals``/``forecasts`` cover the whole cycle; the cycle-level
    totals anchor the per-day percentages.
    """
    actuals = np.atleast_1d(np.asarray(actuals, dtype=float))
    forecasts = np.atleast_1d(np.asarray(forecasts, dtype=float))
    if actuals.shape != forecasts.shape:
        raise ShapeError("actuals and forecasts must cover the same cycle")
    if labels is None:
        labels = [str(rec.day_index) for rec in trace.records]
    actual_total = float(actuals.sum())
    base_total = float(forecasts.sum())
    rows = tuple(
        MetricRow(
            label=str(label),
            actual=float(actuals[rec.day_index - 1]),
            forecast=float(forecasts[rec.day_index - 1]),
            rmf=rec.rmf,
            mape_rec_pct=mape_rec(actual_total, rec.rmf),
            pct_f=pct_improvement(base_total, rec.rmf),
        )
        for rec, label in zip(trace.records, labels)
    )
    return MetricReport(
        rows=rows,
        base_total=base_total,
        actual_total=actual_total,
        base_mape=mape_rec(actual_total, base_total),
    )


@dataclass(frozen=True)
class GridRow:
    tolerance: float
    epsilon: float
    mape_rec_pct: float
    pct_f: float
    error: str | None = None


@dataclass(frozen=True)
class GridReport:
    """Final-day metrics for every (tolerance, epsilon) grid cell."""

    rows: tuple[GridRow, ...]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("tolerance,epsilon,mape_rec_pct,pct_f\n")
        for row in self.rows:
            if row.error is not None:
                out.write(f"{row.tolerance!r},{row.epsilon!r},error,error\n")
            else:
                out.write(
                    f"{row.tolerance!r},{row.epsilon!r},"
                    f"{row.mape_rec_pct!r},{row.pct_f!r}\n"
                )
        return out.getvalue()


def run_grid(
    training: Sequence[CycleData],
    test: CycleData,
    tolerances: Sequence[float],
    epsilons: Sequence[float],
    base_cfg: AgentConfig,
) -> GridReport:
    """Train and reconcile one independent agent per grid cell.

    Cell seeds derive from the base seed and the cell coordinates, so
    rows do not depend on execution order. Failing cells are marked
    rather than aborting the sweep.
    """
    if not tolerances or not epsilons:
        raise ValueError("grid must have at least one tolerance and one epsilon")
    rows: list[GridRow] = []
    for i, tol in enumerate(tolerances):
        for j, eps in enumerate(epsilons):
            try:
                cfg = replace(
                    base_cfg,
                    tolerance=tol,
                    exploration=eps,
                    seed=derive_seed(base_cfg.seed, f"grid:{i}:{j}"),
                )
                table = train(training, cfg)
                forecast = ForecastSet.from_daily(test.forecasts, test.label,
                                                  monthly_total=test.monthly_total)
                trace = reconcile_online(
                    table, forecast, test.actuals, cfg, rng_for(cfg.seed, "online")
                )
                rows.append(
                    GridRow(
                        tolerance=float(tol),
                        epsilon=float(eps),
                        mape_rec_pct=mape_rec(float(test.actuals.sum()), trace.final_rmf),
                        pct_f=pct_improvement(float(test.forecasts.sum()), trace.final_rmf),
                    )
                )
            except Exception as exc:  # keep sweeping; mark the cell
                rows.append(
                    GridRow(
                        tolerance=float(tol),
                        epsilon=float(eps),
                        mape_rec_pct=float("nan"),
                        pct_f=float("nan"),
                        error=str(exc),
                    )
                )
    return GridReport(tuple(rows))
