import numpy as np
import pytest

from pilevib.data import DatasetSplit, GeneratorParams, generate_synthetic, split
from pilevib.errors import TrainingError
from pilevib.nn import NetworkSpec
from pilevib.train import (TrainConfig, ablation_csv, ablation_text,
                           default_ablation_configs, evaluate, run_ablation,
                           train)

pytestmark = pytest.mark.filterwarnings("ignore:ppv=.*clamping")


def tiny_split(n=60, seed=5, noise=0.18):
    records = generate_synthetic(n, GeneratorParams(seed=seed, noise_sigma=noise))
    return split(records, seed=seed)


def quick_config(epochs=5, **kwargs):
    spec = kwargs.pop("spec", NetworkSpec(layer_widths=(7, 16, 8, 1), seed=5))
    return TrainConfig(spec=spec, epochs=epochs, seed=5, **kwargs)


class TestTrain:
    def test_one_batch_one_step(self):
        s = tiny_split()
        config = quick_config(epochs=1, batch_size=1000)
        model = train(config, s)
        assert model.report.adam_steps == 1

    def test_batch_size_one_takes_n_steps(self):
        s = tiny_split()
        config = quick_config(epochs=1, batch_size=1)
        model = train(config, s)
        assert model.report.adam_steps == len(s.train)

    def test_seed_determinism(self):
        s = tiny_split()
        m1 = train(quick_config(), s)
        m2 = train(quick_config(), s)
        assert m1.report == m2.report
        for (w1, b1), (w2, b2) in zip(m1.params, m2.params):
            assert np.array_equal(w1, w2) and np.array_equal(b1, b2)

    def test_checkpoint_is_validation_minimum(self):
        s = tiny_split(n=120)
        model = train(quick_config(epochs=40), s)
        report = model.report
        assert report.best_validation_mae == min(report.val_mae_mm_s)
        assert report.val_mae_mm_s[report.best_epoch - 1] == report.best_validation_mae

    def test_history_lengths(self):
        s = tiny_split()
        model = train(quick_config(epochs=7), s)
        assert len(model.report.train_mse) == 7
        assert len(model.report.val_mae_mm_s) == 7

    def test_memorization_improves(self):
        records = generate_synthetic(50, GeneratorParams(seed=3, noise_sigma=0.0))
        s = DatasetSplit(train=records, validation=records, test=records, seed=3)
        config = TrainConfig(spec=NetworkSpec(dropout_rate=0.0, seed=3),
                             epochs=300, batch_size=10, seed=3)
        model = train(config, s)
        assert model.report.train_mse[-1] < model.report.train_mse[9]

    def test_scaler_fitted_on_train_only(self):
        s = tiny_split(n=200)
        model = train(quick_config(), s)
        from pilevib.data import fit_scaler
        expected = fit_scaler(s.train)
        assert np.array_equal(model.scaler.mean, expected.mean)
        assert model.scaler.ppv_min == expected.ppv_min

    def test_report_csv_format(self):
        s = tiny_split()
        model = train(quick_config(epochs=3), s)
        lines = model.report.to_csv().strip().splitlines()
        assert lines[0] == "epoch,train_mse,val_mae_mm_s"
        assert len(lines) == 4


class TestEvaluate:
    def test_perfect_model_zero_mae(self, small_model, small_split):
        # Evaluate against the model's own predictions as pseudo-targets.
        from pilevib.data import PileDrivingRecord
        preds = small_model.predict_records(small_split.test)
        relabeled = [
            PileDrivingRecord(r.pile_size_mm, r.pile_length_m, r.hammer_weight_ton,
                              r.drop_height_m, r.distance_m, r.sensor_location,
                              r.sensor_direction, float(p))
            for r, p in zip(small_split.test, preds)]
        metrics = evaluate(small_model, relabeled)
        assert metrics["mae_mm_s"] < 1e-12

    def test_single_record_offset(self, small_model, small_split):
        from pilevib.data import PileDrivingRecord
        r = small_split.test[0]
        pred = small_model.predict_record(r)
        shifted = PileDrivingRecord(
            r.pile_size_mm, r.pile_length_m, r.hammer_weight_ton, r.drop_height_m,
            r.distance_m, r.sensor_location, r.sensor_direction, pred + 0.5)
        metrics = evaluate(small_model, [shifted])
        assert metrics["mae_mm_s"] == pytest.approx(0.5)
        assert metrics["n"] == 1

    def test_empty_rejected(self, small_model):
        with pytest.raises(TrainingError):
            evaluate(small_model, [])


class TestAblation:
    def test_empty_config_list_rejected(self):
        with pytest.raises(TrainingError):
            run_ablation(tiny_split(), rows=[])

    def test_reference_column_carries_table_values(self):
        rows = default_ablation_configs()
        assert [r.reference_mae for r in rows] == [
            0.315, 0.332, 0.289, 0.283, 0.432, 0.279, 0.852, 0.276]
        assert sum(r.config is None for r in rows) == 2

    def test_smoke_run_small(self):
        # Shrunk grid: same row structure, tiny epoch count.
        s = tiny_split(n=100)
        rows = default_ablation_configs(seed=5, epochs=2)
        rows = [rows[0]] + rows[3:5]  # one static row, two trained rows
        run_ablation(s, rows)
        assert rows[0].test_mae_mm_s is None
        for row in rows[1:]:
            assert row.test_mae_mm_s is not None and np.isfinite(row.test_mae_mm_s)
        csv_text = ablation_csv(rows)
        assert csv_text.startswith("model,reference_mae,test_mae_mm_s")
        text = ablation_text(rows)
        assert "reference_mae" in text and len(text.splitlines()) == 4
