"""Empirical power-law attenuation predictors and the comparison harness.

Each predictor has the scaled-energy form ppv = k * (sqrt(E) / d)^n with E
the hammer potential energy in joules and d the distance in meters. The two
shipped presets carry literature-conventional coefficients and are
configurable; they are comparison anchors, not calibrated fits.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .data import PileDrivingRecord, targets
from .nn import mae
from .train import TrainedModel


@dataclass(frozen=True)
class PowerLawParams:
    name: str
    k: float  # amplitude, mm/s per (sqrt(J)/m)^n
    n: float  # attenuation exponent

    def __post_init__(self):
        if self.k <= 0 or self.n <= 0:
            raise ValueError("power-law coefficients must be positive")


DEFAULT_BASELINES = (
    PowerLawParams("attewell_farmer", k=0.75, n=1.0),
    PowerLawParams("achmus", k=1.5, n=1.0),
)


def powerlaw_ppv(params: PowerLawParams, record: PileDrivingRecord) -> float:
    energy = record.hammer_energy_joules()
    if energy <= 0 or record.distance_m <= 0:
        raise ValueError("energy and distance must be positive")
    return params.k * (np.sqrt(energy) / record.distance_m) ** params.n


@dataclass
class ComparisonReport:
    predictor_mae: dict[str, float]  # mm/s, keyed by predictor name
    table: list[dict]  # per-record rows for plotting

    def table_csv(self) -> str:
        if not self.table:
            return ""
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(self.table[0].keys()))
        writer.writeheader()
        writer.writerows(self.table)
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["predictor", "mae_mm_s"])
        for name, value in self.predictor_mae.items():
            writer.writerow([name, repr(value)])
        return buf.getvalue()


def compare(model: TrainedModel, baselines: list[PowerLawParams],
            records: list[PileDrivingRecord]) -> ComparisonReport:
    """Per-predictor MAE plus a distance-vs-ppv table over the given records."""
    if not records:
        raise ValueError("need at least one record to compare predictors")
    observed = targets(records)
    neural = model.predict_records(records)

    columns = {"neural": neural}
    for bl in baselines:
        columns[bl.name] = np.array([powerlaw_ppv(bl, r) for r in records])

    rows = []
    for i, record in enumerate(records):
        row = {"distance_m": record.distance_m, "observed_ppv": observed[i],
               "neural_ppv": float(neural[i])}
        for bl in baselines:
            row[f"{bl.name}_ppv"] = float(columns[bl.name][i])
        rows.append(row)
    rows.sort(key=lambda r: r["distance_m"])

    predictor_mae = {name: mae(preds, observed) for name, preds in columns.items()}
    return ComparisonReport(predictor_mae=predictor_mae, table=rows)
