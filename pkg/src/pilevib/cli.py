"""Command-line interface: data generation, training, evaluation, prediction,
explanation, ablation, baseline comparison, and the HTTP server."""

from __future__ import annotations

import sys

import click

from . import baseline as bl
from . import data as dt
from . import explain as ex
from . import persist
from .errors import PilevibError
from .train import (TrainConfig, ablation_csv, ablation_text,
                    default_ablation_configs, evaluate, run_ablation)
from .train import train as train_model
from .nn import HIDDEN_ACTIVATIONS, NetworkSpec
from .server import _DIRECTION_CODES, _LOCATION_CODES, create_app, default_background


def _fail(exc: Exception) -> None:
    raise click.ClickException(str(exc))


@click.group()
def main():
    """Pile-driving PPV prediction and explanation toolkit."""


@main.command("gen-data")
@click.option("--n", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--noise-sigma", type=float, default=None,
              help="Override the generator's log-normal noise sigma.")
@click.option("--out", type=click.Path(), required=True)
def gen_data(n, seed, noise_sigma, out):
    """Write a synthetic dataset CSV."""
    try:
        kwargs = {"seed": seed}
        if noise_sigma is not None:
            kwargs["noise_sigma"] = noise_sigma
        records = dt.generate_synthetic(n, dt.GeneratorParams(**kwargs))
        dt.save_csv(out, records)
    except (PilevibError, ValueError) as exc:
        _fail(exc)
    click.echo(f"wrote {len(records)} records to {out}")


@main.command("train")
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--out", "model_path", type=click.Path(), required=True)
@click.option("--report-out", type=click.Path(), default=None,
              help="Write the per-epoch loss history CSV here.")
@click.option("--epochs", type=int, default=500, show_default=True)
@click.option("--batch-size", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--lr", type=float, default=1e-3, show_default=True)
@click.option("--dropout-rate", type=float, default=0.1, show_default=True)
@click.option("--hidden-activation", type=click.Choice(HIDDEN_ACTIVATIONS),
              default="relu", show_default=True)
@click.option("--widths", default="7,100,200,20,5,1", show_default=True,
              help="Comma-separated layer widths.")
def train_cmd(data_path, model_path, report_out, epochs, batch_size, seed, lr,
              dropout_rate, hidden_activation, widths):
    """Train a model on a CSV dataset (80/10/10 split)."""
    try:
        records = dt.load_csv(data_path)
        split = dt.split(records, seed=seed)
        spec = NetworkSpec(
            layer_widths=tuple(int(w) for w in widths.split(",")),
            hidden_activation=hidden_activation,
            dropout_rate=dropout_rate, seed=seed)
        config = TrainConfig(spec=spec, batch_size=batch_size, epochs=epochs,
                                lr=lr, seed=seed)
        model = train_model(config, split)
        persist.save_model(model, model_path)
        if report_out:
            with open(report_out, "w", encoding="utf-8") as fh:
                fh.write(model.report.to_csv())
    except (PilevibError, ValueError) as exc:
        _fail(exc)
    click.echo(f"best epoch {model.report.best_epoch}: "
               f"validation MAE {model.report.best_validation_mae:.4f} mm/s, "
               f"test MAE {model.report.test_mae_mm_s:.4f} mm/s")
    click.echo(f"saved model to {model_path}")


@main.command("eval")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
def eval_cmd(model_path, data_path):
    """Evaluate a saved model on a labeled CSV."""
    try:
        model = persist.load_model(model_path)
        records = dt.load_csv(data_path)
        metrics = evaluate(model, records)
    except (PilevibError, ValueError) as exc:
        _fail(exc)
    click.echo(f"n: {metrics['n']}")
    click.echo(f"mae_mm_s: {metrics['mae_mm_s']}")
    click.echo(f"mse_normalized: {metrics['mse_normalized']}")


def _record_from_flags(pile_size, pile_length, hammer_weight, drop_height,
                       distance, location, direction) -> dt.PileDrivingRecord:
    def enum(value, table, label):
        if value.strip().lower() in table:
            return table[value.strip().lower()]
        try:
            return int(value)
        except ValueError:
            raise dt.DataValidationError(
                f"{label} must be a code 1-3 or one of {sorted(table)}") from None

    return dt.PileDrivingRecord(
        pile_size_mm=pile_size, pile_length_m=pile_length,
        hammer_weight_ton=hammer_weight, drop_height_m=drop_height,
        distance_m=distance,
        sensor_location=enum(location, _LOCATION_CODES, "location"),
        sensor_direction=enum(direction, _DIRECTION_CODES, "direction"))


@main.command("predict")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--csv", "csv_path", type=click.Path(exists=True), default=None,
              help="Predict every row of this CSV instead of using flags.")
@click.option("--pile-size", type=float, default=None, help="Pile size, mm.")
@click.option("--pile-length", type=float, default=None, help="Pile length, m.")
@click.option("--hammer-weight", type=float, default=None, help="Hammer weight, ton.")
@click.option("--drop-height", type=float, default=None, help="Drop height, m.")
@click.option("--distance", type=float, default=None, help="Distance, m.")
@click.option("--location", default=None, help="Sensor location: code or name.")
@click.option("--direction", default=None, help="Sensor direction: code or name.")
@click.option("--explain", "with_shap", is_flag=True,
              help="Also print exact Shapley values.")
def predict_cmd(model_path, csv_path, pile_size, pile_length, hammer_weight,
                drop_height, distance, location, direction, with_shap):
    """Predict PPV for one record (flags) or a CSV of records."""
    try:
        model = persist.load_model(model_path)
        if csv_path is not None:
            records = dt.load_csv(csv_path)
        else:
            flags = (pile_size, pile_length, hammer_weight, drop_height,
                     distance, location, direction)
            if any(v is None for v in flags):
                raise dt.DataValidationError(
                    "provide --csv or all seven feature flags")
            records = [_record_from_flags(*flags)]
        background = default_background(model) if with_shap else None
        for record in records:
            ppv = model.predict_record(record)
            click.echo(f"{ppv} mm/s")
            for note in record.extrapolation_warnings():
                click.echo(f"warning: {note}", err=True)
            if with_shap:
                result = ex.shap_exact(model, record, background)
                click.echo(f"  baseline: {result.baseline} mm/s")
                for name, phi in zip(dt.FEATURE_NAMES, result.phi):
                    click.echo(f"  phi[{name}]: {phi} mm/s")
    except (PilevibError, ValueError) as exc:
        _fail(exc)


@main.command("explain")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--background", "background_path", type=click.Path(exists=True),
              default=None, help="Background CSV (default: the data itself).")
@click.option("--background-size", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--points-out", type=click.Path(), required=True)
@click.option("--summary-out", type=click.Path(), required=True)
def explain_cmd(model_path, data_path, background_path, background_size, seed,
                points_out, summary_out):
    """Write per-record SHAP points and the mean-|phi| summary as CSVs."""
    try:
        model = persist.load_model(model_path)
        records = dt.load_csv(data_path)
        bg_records = dt.load_csv(background_path) if background_path else records
        background = ex.BackgroundSet.from_records(bg_records, limit=background_size,
                                                   seed=seed)
        points = ex.shap_summary_points(model, records, background)
        ranking = ex.mean_abs_shap(model, records, background)
        with open(points_out, "w", encoding="utf-8") as fh:
            fh.write(ex.shap_points_csv(points))
        with open(summary_out, "w", encoding="utf-8") as fh:
            fh.write(ex.shap_summary_csv(ranking))
    except (PilevibError, ValueError) as exc:
        _fail(exc)
    click.echo(f"wrote {len(points)} SHAP points; top feature: {ranking[0][0]}")


@main.command("mi")
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--k", type=int, default=3, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def mi_cmd(data_path, k, out):
    """Estimate per-feature mutual information with the target."""
    try:
        records = dt.load_csv(data_path)
        result = ex.mutual_information(records, k=k)
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(ex.mi_csv(result))
    except (PilevibError, ValueError) as exc:
        _fail(exc)
    top = max(result.mi_nats, key=result.mi_nats.get)
    click.echo(f"wrote MI estimates to {out}; top feature: {top}")


@main.command("ablate")
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--epochs", type=int, default=400, show_default=True)
@click.option("--batch-size", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--csv-out", type=click.Path(), default=None)
def ablate_cmd(data_path, epochs, batch_size, seed, csv_out):
    """Run the fixed architecture/activation ablation grid."""
    try:
        records = dt.load_csv(data_path)
        split = dt.split(records, seed=seed)
        rows = default_ablation_configs(seed=seed, epochs=epochs,
                                           batch_size=batch_size)
        run_ablation(split, rows,
                        progress=lambda label: click.echo(f"training {label} ...",
                                                          err=True))
    except (PilevibError, ValueError) as exc:
        _fail(exc)
    click.echo(ablation_text(rows), nl=False)
    if csv_out:
        with open(csv_out, "w", encoding="utf-8") as fh:
            fh.write(ablation_csv(rows))


@main.command("compare")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--table-out", type=click.Path(), default=None)
@click.option("--summary-out", type=click.Path(), default=None)
def compare_cmd(model_path, data_path, table_out, summary_out):
    """Compare the neural model against the power-law presets."""
    try:
        model = persist.load_model(model_path)
        records = dt.load_csv(data_path)
        report = bl.compare(model, list(bl.DEFAULT_BASELINES), records)
    except (PilevibError, ValueError) as exc:
        _fail(exc)
    for name, value in report.predictor_mae.items():
        click.echo(f"{name}: MAE {value:.4f} mm/s")
    if table_out:
        with open(table_out, "w", encoding="utf-8") as fh:
            fh.write(report.table_csv())
    if summary_out:
        with open(summary_out, "w", encoding="utf-8") as fh:
            fh.write(report.summary_csv())


@main.command("serve")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--port", type=int, default=None,
              help="Port (default: $PPV_PORT or 8080).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--background", "background_path", type=click.Path(exists=True),
              default=None, help="Background CSV for /explain.")
def serve_cmd(model_path, port, host, background_path):
    """Start the HTTP JSON API."""
    import os

    import uvicorn

    try:
        model = persist.load_model(model_path)
        background = None
        if background_path:
            background = ex.BackgroundSet.from_records(dt.load_csv(background_path))
        app = create_app(model, background=background)
    except (PilevibError, ValueError) as exc:
        _fail(exc)
    if port is None:
        port = int(os.environ.get("PPV_PORT", "8080"))
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
