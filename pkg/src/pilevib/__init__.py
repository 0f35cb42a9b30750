"""Explainable MLP regression engine for pile-driving peak particle velocity."""

from .data import (DatasetSplit, GeneratorParams, PileDrivingRecord,
                   ScalerParams, fit_scaler, generate_synthetic, load_csv,
                   split)
from .nn import AdamState, NetworkSpec, adam_step, backward, forward, mae, mse
from .train import TrainConfig, TrainedModel, TrainReport, evaluate, train
from .explain import (BackgroundSet, MIResult, ShapResult, mean_abs_shap,
                      mutual_information, shap_exact)
from .baseline import DEFAULT_BASELINES, PowerLawParams, compare, powerlaw_ppv
from .persist import load_model, save_model

__all__ = [
    "AdamState", "BackgroundSet", "DEFAULT_BASELINES", "DatasetSplit",
    "GeneratorParams", "MIResult", "NetworkSpec", "PileDrivingRecord",
    "PowerLawParams", "ScalerParams", "ShapResult", "TrainConfig",
    "TrainReport", "TrainedModel", "adam_step", "backward", "compare",
    "evaluate", "fit_scaler", "forward", "generate_synthetic", "load_csv",
    "load_model", "mae", "mean_abs_shap", "mse", "mutual_information",
    "powerlaw_ppv", "save_model", "shap_exact", "split", "train",
]
