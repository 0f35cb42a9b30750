"""Exact Shapley attribution by full subset enumeration, plus the Kraskov
k-NN mutual information estimator.

Attributions are computed on mm/s predictions (after the inverse target
transform) against an interventional background: a subset value v(S) is the
mean prediction over the background set with features in S taken from the
instance and the rest from each background record.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .data import (FEATURE_NAMES, N_FEATURES, PileDrivingRecord,
                   feature_matrix, inverse_target, targets, transform_many)
from .train import TrainedModel


@dataclass
class ShapResult:
    phi: np.ndarray  # mm/s, one per feature, schema order
    baseline: float  # mean background prediction, mm/s
    prediction: float  # model prediction on the instance, mm/s


@dataclass
class BackgroundSet:
    records: list[PileDrivingRecord]

    def __post_init__(self):
        if not self.records:
            raise ValueError("background set must contain at least one record")

    @classmethod
    def from_records(cls, records: list[PileDrivingRecord], limit: int = 100,
                     seed: int = 0) -> "BackgroundSet":
        if len(records) <= limit:
            return cls(list(records))
        rng = np.random.default_rng(seed)
        idx = rng.choice(len(records), size=limit, replace=False)
        return cls([records[i] for i in sorted(idx)])


@dataclass
class MIResult:
    mi_nats: dict[str, float]
    k: int


def _subset_weights(n_features: int) -> np.ndarray:
    """weight(|S|) = |S|! (n-|S|-1)! / n! for S excluding the target feature."""
    fact = math.factorial
    return np.array([fact(s) * fact(n_features - s - 1) / fact(n_features)
                     for s in range(n_features)])


def _subset_values(model: TrainedModel, instance: PileDrivingRecord,
                   background: BackgroundSet) -> np.ndarray:
    """v(S) in mm/s for every one of the 2^7 feature subsets (bitmask index)."""
    z_inst = transform_many(model.scaler, [instance])[0]
    z_bg = transform_many(model.scaler, background.records)
    n_bg = z_bg.shape[0]
    n_subsets = 1 << N_FEATURES

    # One forward pass per subset, all on identically shaped (n_bg, 7)
    # matrices: subsets whose hybrid matrices have equal content then get
    # bit-identical v(S), which keeps the symmetry and dummy axioms exact.
    values = np.empty(n_subsets)
    for mask in range(n_subsets):
        hybrid = z_bg.copy()
        for i in range(N_FEATURES):
            if mask >> i & 1:
                hybrid[:, i] = z_inst[i]
        preds_norm = np.asarray(model.predict_normalized(hybrid))
        preds = np.asarray(inverse_target(model.scaler, preds_norm))
        # fsum keeps v(S) independent of background ordering effects
        values[mask] = math.fsum(preds) / n_bg
    return values


def shap_exact(model: TrainedModel, instance: PileDrivingRecord,
               background: BackgroundSet) -> ShapResult:
    """Exact Shapley values over all 128 subsets of the 7 features."""
    v = _subset_values(model, instance, background)
    weights = _subset_weights(N_FEATURES)
    full_mask = (1 << N_FEATURES) - 1

    phi = np.empty(N_FEATURES)
    for i in range(N_FEATURES):
        bit = 1 << i
        terms = []
        for mask in range(full_mask + 1):
            if mask & bit:
                continue
            s = bin(mask).count("1")
            terms.append(weights[s] * (v[mask | bit] - v[mask]))
        phi[i] = math.fsum(terms)

    return ShapResult(phi=phi, baseline=float(v[0]),
                      prediction=model.predict_record(instance))


def shap_sampled(model: TrainedModel, instance: PileDrivingRecord,
                 background: BackgroundSet, n_permutations: int = 10_000,
                 seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo permutation estimator; returns (phi, standard errors).

    Test oracle for the exact enumeration, not a production path.
    """
    v = _subset_values(model, instance, background)
    rng = np.random.default_rng(seed)
    contrib = np.zeros((n_permutations, N_FEATURES))
    for p in range(n_permutations):
        order = rng.permutation(N_FEATURES)
        mask = 0
        for i in order:
            new_mask = mask | (1 << i)
            contrib[p, i] = v[new_mask] - v[mask]
            mask = new_mask
    phi = contrib.mean(axis=0)
    se = contrib.std(axis=0, ddof=1) / math.sqrt(n_permutations)
    return phi, se


def mean_abs_shap(model: TrainedModel, records: list[PileDrivingRecord],
                  background: BackgroundSet) -> list[tuple[str, float]]:
    """Global ranking: per-feature mean |phi|, descending, ties by schema order."""
    if not records:
        raise ValueError("need at least one record to rank features")
    abs_sum = np.zeros(N_FEATURES)
    for record in records:
        abs_sum += np.abs(shap_exact(model, record, background).phi)
    mean_abs = abs_sum / len(records)
    order = sorted(range(N_FEATURES), key=lambda i: (-mean_abs[i], i))
    return [(FEATURE_NAMES[i], float(mean_abs[i])) for i in order]


def shap_summary_points(model: TrainedModel, records: list[PileDrivingRecord],
                        background: BackgroundSet) -> list[dict]:
    """Flat (record, feature, value, phi) table for beeswarm/dependence plots."""
    if not records:
        raise ValueError("need at least one record")
    rows = []
    for rid, record in enumerate(records):
        result = shap_exact(model, record, background)
        values = record.features()
        for i, name in enumerate(FEATURE_NAMES):
            rows.append({
                "record_id": rid,
                "feature": name,
                "feature_value": float(values[i]),
                "phi_mm_s": float(result.phi[i]),
            })
    return rows


def shap_points_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["record_id", "feature", "feature_value", "phi_mm_s"])
    for row in rows:
        writer.writerow([row["record_id"], row["feature"],
                         repr(row["feature_value"]), repr(row["phi_mm_s"])])
    return buf.getvalue()


def shap_summary_csv(ranking: list[tuple[str, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["feature", "mean_abs_phi"])
    for name, value in ranking:
        writer.writerow([name, repr(value)])
    return buf.getvalue()


def ksg_mi(x: np.ndarray, y: np.ndarray, k: int = 3) -> float:
    """Kraskov-Stoegbauer-Grassberger estimator (variant 1), in nats.

    MI = psi(k) + psi(n) - mean(psi(n_x + 1) + psi(n_y + 1)), with n_x/n_y
    counted strictly inside the Chebyshev distance to the k-th joint
    neighbor. Negative estimates are clamped to zero.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    n = x.size
    if y.size != n:
        raise ValueError("x and y must have the same length")
    if n <= k + 1:
        raise ValueError(f"need more than k+1={k + 1} samples, got {n}")

    # Standardize each marginal so the Chebyshev metric treats them evenly.
    xs = (x - x.mean()) / (x.std() or 1.0)
    ys = (y - y.mean()) / (y.std() or 1.0)
    joint = np.column_stack([xs, ys])
    tree = cKDTree(joint)
    # k+1 because the query point is its own nearest neighbor.
    eps = tree.query(joint, k=k + 1, p=np.inf)[0][:, k]

    x_sorted = np.sort(xs)
    y_sorted = np.sort(ys)

    def strict_counts(sorted_vals, vals):
        hi = np.searchsorted(sorted_vals, vals + eps, side="left")
        lo = np.searchsorted(sorted_vals, vals - eps, side="right")
        return hi - lo - 1  # exclude the point itself

    n_x = strict_counts(x_sorted, xs)
    n_y = strict_counts(y_sorted, ys)
    mi = (digamma(k) + digamma(n)
          - np.mean(digamma(n_x + 1) + digamma(n_y + 1)))
    return max(float(mi), 0.0)


def mutual_information(records: list[PileDrivingRecord], k: int = 3,
                       jitter_seed: int = 0) -> MIResult:
    """Per-feature MI against ppv. Categorical codes get tiny jitter so the
    estimator's distinct-distance assumption holds."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(records) <= k + 1:
        raise ValueError(f"need more than k+1 records, got {len(records)}")
    x = feature_matrix(records)
    y = targets(records)
    rng = np.random.default_rng(jitter_seed)
    estimates = {}
    for i, name in enumerate(FEATURE_NAMES):
        col = x[:, i]
        if name in ("sensor_location", "sensor_direction"):
            col = col + rng.uniform(-1e-10, 1e-10, col.shape)
        estimates[name] = ksg_mi(col, y, k=k)
    return MIResult(mi_nats=estimates, k=k)


def mi_csv(result: MIResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["feature", "mi_nats"])
    for name in FEATURE_NAMES:
        writer.writerow([name, repr(result.mi_nats[name])])
    return buf.getvalue()
