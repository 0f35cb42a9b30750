"""Model persistence: a versioned JSON text format with exact float64
round-trips (shortest-repr decimal serialization)."""

from __future__ import annotations

import json
import os

import numpy as np

from .data import ScalerParams
from .errors import ModelFileError
from .nn import NetworkSpec, check_params
from .train import TrainedModel, TrainReport

FORMAT_VERSION = 1


def _model_payload(model: TrainedModel) -> dict:
    payload = {
        "format_version": FORMAT_VERSION,
        "spec": {
            "layer_widths": list(model.spec.layer_widths),
            "hidden_activation": model.spec.hidden_activation,
            "output_activation": model.spec.output_activation,
            "dropout_rate": model.spec.dropout_rate,
            "dropout_after_layer_index": model.spec.dropout_after_layer_index,
            "seed": model.spec.seed,
        },
        "params": [{"weight": w.tolist(), "bias": b.tolist()}
                   for w, b in model.params],
        "scaler": {
            "mean": model.scaler.mean.tolist(),
            "std": model.scaler.std.tolist(),
            "ppv_min": model.scaler.ppv_min,
            "ppv_max": model.scaler.ppv_max,
        },
        "metadata": {
            "seed": model.seed,
            "epochs": model.epochs,
            "best_validation_mae": (
                model.report.best_validation_mae if model.report else None),
        },
    }
    return payload


def save_model(model: TrainedModel, path: str) -> None:
    text = json.dumps(_model_payload(model), sort_keys=True, indent=1)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def load_model(path: str) -> TrainedModel:
    if not os.path.exists(path):
        raise ModelFileError(f"model file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFileError(f"{path}: not valid model JSON ({exc})") from None

    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFileError(
            f"{path}: unsupported format_version {version!r} "
            f"(this build reads version {FORMAT_VERSION})")

    try:
        spec_d = payload["spec"]
        spec = NetworkSpec(
            layer_widths=tuple(spec_d["layer_widths"]),
            hidden_activation=spec_d["hidden_activation"],
            output_activation=spec_d["output_activation"],
            dropout_rate=spec_d["dropout_rate"],
            dropout_after_layer_index=spec_d["dropout_after_layer_index"],
            seed=spec_d["seed"],
        )
        params = [(np.array(layer["weight"], dtype=float),
                   np.array(layer["bias"], dtype=float))
                  for layer in payload["params"]]
        scaler_d = payload["scaler"]
        scaler = ScalerParams(
            mean=np.array(scaler_d["mean"], dtype=float),
            std=np.array(scaler_d["std"], dtype=float),
            ppv_min=float(scaler_d["ppv_min"]),
            ppv_max=float(scaler_d["ppv_max"]),
        )
        meta = payload.get("metadata", {})
        seed = int(meta.get("seed", 0))
        epochs = int(meta.get("epochs", 0))
        best_mae = meta.get("best_validation_mae")
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"{path}: malformed model payload ({exc})") from None

    try:
        check_params(spec, params)
    except Exception as exc:
        raise ModelFileError(f"{path}: inconsistent parameters ({exc})") from None
    if scaler.mean.shape != (spec.n_features,) or scaler.std.shape != (spec.n_features,):
        raise ModelFileError(f"{path}: scaler shape does not match the feature count")
    if not (np.isfinite(scaler.mean).all() and np.isfinite(scaler.std).all()
            and np.isfinite(scaler.ppv_min) and np.isfinite(scaler.ppv_max)):
        raise ModelFileError(f"{path}: corrupted scaler numerics")

    report = None
    if best_mae is not None:
        report = TrainReport(train_mse=[], val_mae_mm_s=[], best_epoch=-1,
                             best_validation_mae=float(best_mae),
                             test_mae_mm_s=float("nan"), adam_steps=0)
    return TrainedModel(spec=spec, params=params, scaler=scaler,
                        report=report, seed=seed, epochs=epochs)
