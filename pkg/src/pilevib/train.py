"""Training loop with mini-batching, best-on-validation checkpointing, and
the fixed-architecture ablation harness.

Reported MAE values are always in mm/s (computed after the inverse target
transform); the per-epoch training loss stays on the normalized [0,1] scale.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import nn
from .data import (DatasetSplit, PileDrivingRecord, ScalerParams, fit_scaler,
                   inverse_target, target_normalize, targets, transform_many)
from .errors import TrainingError
from .nn import NetworkSpec


@dataclass
class TrainConfig:
    spec: NetworkSpec = field(default_factory=NetworkSpec)
    batch_size: int = 50
    epochs: int = 500
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise TrainingError("batch_size must be >= 1")
        if self.epochs < 1:
            raise TrainingError("epochs must be >= 1")


@dataclass
class TrainReport:
    train_mse: list[float]
    val_mae_mm_s: list[float]
    best_epoch: int
    best_validation_mae: float
    test_mae_mm_s: float
    adam_steps: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["epoch", "train_mse", "val_mae_mm_s"])
        for epoch, (tr, va) in enumerate(zip(self.train_mse, self.val_mae_mm_s), 1):
            writer.writerow([epoch, repr(tr), repr(va)])
        return buf.getvalue()


@dataclass
class TrainedModel:
    spec: NetworkSpec
    params: nn.NetworkParams
    scaler: ScalerParams
    report: TrainReport | None = None
    seed: int = 0
    epochs: int = 0

    def predict_normalized(self, x: np.ndarray) -> np.ndarray | float:
        pred, _ = nn.forward(self.spec, self.params, x, mode="eval")
        return pred

    def predict_record(self, record: PileDrivingRecord) -> float:
        z = (record.features() - self.scaler.mean) / self.scaler.std
        return float(inverse_target(self.scaler, self.predict_normalized(z)))

    def predict_records(self, records: list[PileDrivingRecord]) -> np.ndarray:
        z = transform_many(self.scaler, records)
        return np.asarray(inverse_target(self.scaler, self.predict_normalized(z)))


def _normalized_targets(scaler: ScalerParams, records) -> np.ndarray:
    return np.array([target_normalize(scaler, r.ppv_mm_s) for r in records])


def train(config: TrainConfig, split: DatasetSplit) -> TrainedModel:
    """Run the full protocol and return the best-on-validation parameters."""
    if not split.train or not split.validation or not split.test:
        raise TrainingError("split must have nonempty train/validation/test parts")

    scaler = fit_scaler(split.train)
    x_train = transform_many(scaler, split.train)
    t_train = _normalized_targets(scaler, split.train)
    x_val = transform_many(scaler, split.validation)
    y_val = targets(split.validation)

    spec = config.spec
    rng = np.random.default_rng(config.seed)
    params = nn.init_params(spec, rng)
    state = nn.AdamState.for_params(params, lr=config.lr, beta1=config.beta1,
                                    beta2=config.beta2, epsilon=config.epsilon)

    n = len(split.train)
    train_mse_history: list[float] = []
    val_mae_history: list[float] = []
    best_epoch = -1
    best_val_mae = np.inf
    best_params = nn.clone_params(params)

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        sq_err_sum = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            xb, tb = x_train[idx], t_train[idx]
            pred, trace = nn.forward(spec, params, xb, mode="train", rng=rng)
            batch_loss = float(np.mean((tb - pred) ** 2))
            if not np.isfinite(batch_loss):
                raise TrainingError(
                    f"non-finite loss at epoch {epoch}, batch {start // config.batch_size}")
            sq_err_sum += float(np.sum((tb - pred) ** 2))
            grads = nn.backward(spec, params, trace, xb, tb)
            params, state = nn.adam_step(params, grads, state)
        train_mse_history.append(sq_err_sum / n)

        val_pred_norm, _ = nn.forward(spec, params, x_val, mode="eval")
        val_pred = inverse_target(scaler, val_pred_norm)
        val_mae = nn.mae(val_pred, y_val)
        val_mae_history.append(val_mae)
        if val_mae < best_val_mae:
            best_val_mae = val_mae
            best_epoch = epoch
            best_params = nn.clone_params(params)

    model = TrainedModel(spec=spec, params=best_params, scaler=scaler,
                         seed=config.seed, epochs=config.epochs)
    test_metrics = evaluate(model, split.test)
    model.report = TrainReport(
        train_mse=train_mse_history,
        val_mae_mm_s=val_mae_history,
        best_epoch=best_epoch,
        best_validation_mae=best_val_mae,
        test_mae_mm_s=test_metrics["mae_mm_s"],
        adam_steps=state.t,
    )
    return model


def evaluate(model: TrainedModel, records: list[PileDrivingRecord]) -> dict:
    """Eval-mode MAE in mm/s plus normalized-scale MSE."""
    if not records:
        raise TrainingError("cannot evaluate on an empty record set")
    y = targets(records)
    pred = model.predict_records(records)
    t_norm = _normalized_targets(model.scaler, records)
    pred_norm = np.asarray(model.predict_normalized(transform_many(model.scaler, records)))
    return {
        "mae_mm_s": nn.mae(pred, y),
        "mse_normalized": nn.mse(pred_norm, t_norm),
        "n": len(records),
    }


@dataclass
class AblationRow:
    label: str
    reference_mae: float
    config: TrainConfig | None  # None for static reference rows
    test_mae_mm_s: float | None = None
    error: str | None = None


def default_ablation_configs(seed: int = 0, epochs: int = 400,
                             batch_size: int = 50) -> list[AblationRow]:
    """The fixed comparison grid: two tree-ensemble reference rows plus six
    trained network rows (the proposed architecture last)."""
    def cfg(widths, act):
        return TrainConfig(
            spec=NetworkSpec(layer_widths=widths, hidden_activation=act, seed=seed),
            epochs=epochs, batch_size=batch_size, seed=seed)

    return [
        AblationRow("XGBoost (reference)", 0.315, None),
        AblationRow("CatBoost (reference)", 0.332, None),
        AblationRow("(7,200,1000,2000,200,20,5,1):ReLU", 0.289,
                    cfg((7, 200, 1000, 2000, 200, 20, 5, 1), "relu")),
        AblationRow("(7,50,100,20,5,1):ReLU", 0.283,
                    cfg((7, 50, 100, 20, 5, 1), "relu")),
        AblationRow("(7,100,200,20,5,1):Sigmoid", 0.432,
                    cfg((7, 100, 200, 20, 5, 1), "sigmoid")),
        AblationRow("(7,100,200,20,5,1):Tanh", 0.279,
                    cfg((7, 100, 200, 20, 5, 1), "tanh")),
        AblationRow("(7,100,200,20,5,1):LeakyReLU", 0.852,
                    cfg((7, 100, 200, 20, 5, 1), "leaky_relu")),
        AblationRow("Proposed (7,100,200,20,5,1):ReLU", 0.276,
                    cfg((7, 100, 200, 20, 5, 1), "relu")),
    ]


def run_ablation(split: DatasetSplit, rows: list[AblationRow] | None = None,
                 progress=None) -> list[AblationRow]:
    """Train every configured row on the given split; static rows pass through."""
    if rows is None:
        rows = default_ablation_configs()
    if not rows:
        raise TrainingError("ablation needs at least one configuration")
    for row in rows:
        if row.config is None:
            continue
        if progress:
            progress(row.label)
        try:
            model = train(row.config, split)
            row.test_mae_mm_s = model.report.test_mae_mm_s
        except TrainingError as exc:
            row.error = str(exc)
    return rows


def ablation_csv(rows: list[AblationRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["model", "reference_mae", "test_mae_mm_s", "error"])
    for row in rows:
        writer.writerow([
            row.label, row.reference_mae,
            "" if row.test_mae_mm_s is None else repr(row.test_mae_mm_s),
            row.error or "",
        ])
    return buf.getvalue()


def ablation_text(rows: list[AblationRow]) -> str:
    width = max(len(r.label) for r in rows)
    lines = [f"{'model'.ljust(width)}  reference_mae  test_mae_mm_s"]
    for row in rows:
        if row.error:
            got = f"error: {row.error}"
        elif row.test_mae_mm_s is None:
            got = "-"
        else:
            got = f"{row.test_mae_mm_s:.4f}"
        lines.append(f"{row.label.ljust(width)}  {row.reference_mae:>13.3f}  {got}")
    return "\n".join(lines) + "\n"
