"""Feature schema, standardization, splitting, CSV I/O, synthetic generator.

Feature order everywhere: pile_size_mm, pile_length_m, hammer_weight_ton,
drop_height_m, distance_m, sensor_location, sensor_direction. Sensor codes
follow the field convention: location 1=ground, 2=footing, 3=building;
direction 1=longitudinal, 2=transverse, 3=vertical. The categorical codes are
standardized as plain numerics, matching how the model was designed.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DataValidationError, ScalerFitError, SplitError

FEATURE_NAMES = (
    "pile_size_mm",
    "pile_length_m",
    "hammer_weight_ton",
    "drop_height_m",
    "distance_m",
    "sensor_location",
    "sensor_direction",
)
TARGET_NAME = "ppv_mm_s"
CSV_HEADER = FEATURE_NAMES + (TARGET_NAME,)

N_FEATURES = len(FEATURE_NAMES)

SENSOR_LOCATIONS = {1: "ground", 2: "footing", 3: "building"}
SENSOR_DIRECTIONS = {1: "longitudinal", 2: "transverse", 3: "vertical"}

# Observed field ranges; used for extrapolation warnings, not rejection.
FEATURE_RANGES = {
    "pile_size_mm": (250.0, 800.0),
    "pile_length_m": (10.0, 32.0),
    "hammer_weight_ton": (3.0, 12.5),
    "drop_height_m": (0.3, 0.9),
    "distance_m": (3.0, 80.0),
}

GRAVITY = 9.81
KG_PER_TON = 1000.0


@dataclass(frozen=True)
class PileDrivingRecord:
    pile_size_mm: float
    pile_length_m: float
    hammer_weight_ton: float
    drop_height_m: float
    distance_m: float
    sensor_location: int
    sensor_direction: int
    ppv_mm_s: float | None = None

    def __post_init__(self):
        for name in FEATURE_NAMES[:5]:
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise DataValidationError(f"{name} must be positive, got {value}")
        if self.sensor_location not in SENSOR_LOCATIONS:
            raise DataValidationError(
                f"sensor_location must be 1, 2 or 3, got {self.sensor_location}")
        if self.sensor_direction not in SENSOR_DIRECTIONS:
            raise DataValidationError(
                f"sensor_direction must be 1, 2 or 3, got {self.sensor_direction}")
        if self.ppv_mm_s is not None and (
                not np.isfinite(self.ppv_mm_s) or self.ppv_mm_s <= 0):
            raise DataValidationError(
                f"ppv_mm_s must be positive when present, got {self.ppv_mm_s}")

    def features(self) -> np.ndarray:
        return np.array([
            self.pile_size_mm, self.pile_length_m, self.hammer_weight_ton,
            self.drop_height_m, self.distance_m,
            float(self.sensor_location), float(self.sensor_direction),
        ])

    def hammer_energy_joules(self) -> float:
        return self.hammer_weight_ton * KG_PER_TON * GRAVITY * self.drop_height_m

    def extrapolation_warnings(self) -> list[str]:
        notes = []
        for name, (lo, hi) in FEATURE_RANGES.items():
            value = getattr(self, name)
            if not lo <= value <= hi:
                notes.append(
                    f"{name}={value:g} is outside the training range [{lo:g}, {hi:g}]")
        return notes


def feature_matrix(records: list[PileDrivingRecord]) -> np.ndarray:
    return np.array([r.features() for r in records])


def targets(records: list[PileDrivingRecord]) -> np.ndarray:
    out = []
    for i, r in enumerate(records):
        if r.ppv_mm_s is None:
            raise DataValidationError(f"record {i} has no ppv_mm_s")
        out.append(r.ppv_mm_s)
    return np.array(out)


@dataclass
class ScalerParams:
    mean: np.ndarray
    std: np.ndarray
    ppv_min: float
    ppv_max: float


def fit_scaler(records: list[PileDrivingRecord]) -> ScalerParams:
    """Per-feature mean and population std, plus observed ppv extremes."""
    if len(records) < 2:
        raise ScalerFitError("need at least 2 records to fit the scaler")
    x = feature_matrix(records)
    y = targets(records)
    mean = x.mean(axis=0)
    std = x.std(axis=0)  # population convention (divide by n)
    for i, s in enumerate(std):
        if s <= 0.0:
            raise ScalerFitError(
                f"feature {FEATURE_NAMES[i]} has zero variance in the fitting set")
    ppv_min, ppv_max = float(y.min()), float(y.max())
    if not ppv_max > ppv_min:
        raise ScalerFitError("ppv is constant; target normalization is degenerate")
    return ScalerParams(mean=mean, std=std, ppv_min=ppv_min, ppv_max=ppv_max)


def transform(scaler: ScalerParams, record: PileDrivingRecord) -> np.ndarray:
    return (record.features() - scaler.mean) / scaler.std


def transform_many(scaler: ScalerParams, records: list[PileDrivingRecord]) -> np.ndarray:
    return (feature_matrix(records) - scaler.mean) / scaler.std


def inverse_transform(scaler: ScalerParams, z: np.ndarray) -> np.ndarray:
    return z * scaler.std + scaler.mean


def target_normalize(scaler: ScalerParams, ppv: float) -> float:
    t = (ppv - scaler.ppv_min) / (scaler.ppv_max - scaler.ppv_min)
    if t < 0.0 or t > 1.0:
        warnings.warn(
            f"ppv={ppv:g} mm/s outside the fitted range "
            f"[{scaler.ppv_min:g}, {scaler.ppv_max:g}]; clamping",
            stacklevel=2)
        t = min(max(t, 0.0), 1.0)
    return t


def inverse_target(scaler: ScalerParams, t: float | np.ndarray) -> float | np.ndarray:
    out = scaler.ppv_min + t * (scaler.ppv_max - scaler.ppv_min)
    return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


@dataclass
class DatasetSplit:
    train: list[PileDrivingRecord]
    validation: list[PileDrivingRecord]
    test: list[PileDrivingRecord]
    seed: int
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)


def split(records: list[PileDrivingRecord], seed: int) -> DatasetSplit:
    """Seeded shuffle, then contiguous 80/10/10 slices."""
    n = len(records)
    if n < 10:
        raise SplitError(f"need at least 10 records to split, got {n}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    shuffled = [records[i] for i in order]
    n_train = int(np.floor(0.8 * n))
    n_val = int(np.floor(0.1 * n))
    return DatasetSplit(
        train=shuffled[:n_train],
        validation=shuffled[n_train:n_train + n_val],
        test=shuffled[n_train + n_val:],
        seed=seed,
    )


@dataclass
class GeneratorParams:
    """Phenomenological attenuation law behind the synthetic dataset.

    ppv = amplitude * energy^energy_exp / distance^distance_exp
          * location_mult * direction_mult * lognormal(0, noise_sigma)

    Defaults are calibrated so ppv stays within roughly [0.1, 8] mm/s over
    the feature box, with distance the dominant driver.
    """

    amplitude: float = 0.95
    energy_exp: float = 0.25
    distance_exp: float = 0.8
    location_mult: tuple[float, float, float] = (1.2, 1.0, 0.85)
    direction_mult: tuple[float, float, float] = (1.0, 0.9, 1.1)
    noise_sigma: float = 0.18
    seed: int = 0

    def __post_init__(self):
        if self.amplitude <= 0 or self.energy_exp <= 0 or self.distance_exp <= 0:
            raise ValueError("amplitude and exponents must be positive")
        if any(m <= 0 for m in self.location_mult + self.direction_mult):
            raise ValueError("multipliers must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")

    def noiseless_ppv(self, record: PileDrivingRecord) -> float:
        energy = record.hammer_energy_joules()
        ppv = (self.amplitude * energy ** self.energy_exp
               / record.distance_m ** self.distance_exp)
        ppv *= self.location_mult[record.sensor_location - 1]
        ppv *= self.direction_mult[record.sensor_direction - 1]
        return ppv


def generate_synthetic(n: int, gp: GeneratorParams | None = None
                       ) -> list[PileDrivingRecord]:
    """Draw records mirroring the reported field feature distributions."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if gp is None:
        gp = GeneratorParams()
    rng = np.random.default_rng(gp.seed)

    pile_size = rng.uniform(250.0, 800.0, n)
    pile_length = rng.uniform(10.0, 32.0, n)
    hammer_weight = rng.uniform(3.0, 12.5, n)
    # Drop height is mode-weighted toward 0.3-0.4 m.
    narrow = rng.uniform(0.3, 0.4, n)
    wide = rng.uniform(0.3, 0.9, n)
    drop_height = np.where(rng.random(n) < 0.5, narrow, wide)
    distance = rng.uniform(3.0, 80.0, n)
    # Sensors mostly on buildings, mostly longitudinal.
    location = rng.choice([1, 2, 3], size=n, p=[0.2, 0.2, 0.6])
    direction = rng.choice([1, 2, 3], size=n, p=[0.5, 0.25, 0.25])
    noise = (np.exp(rng.normal(0.0, gp.noise_sigma, n))
             if gp.noise_sigma > 0 else np.ones(n))

    records = []
    for i in range(n):
        base = PileDrivingRecord(
            pile_size_mm=float(pile_size[i]),
            pile_length_m=float(pile_length[i]),
            hammer_weight_ton=float(hammer_weight[i]),
            drop_height_m=float(drop_height[i]),
            distance_m=float(distance[i]),
            sensor_location=int(location[i]),
            sensor_direction=int(direction[i]),
        )
        ppv = gp.noiseless_ppv(base) * float(noise[i])
        records.append(PileDrivingRecord(
            base.pile_size_mm, base.pile_length_m, base.hammer_weight_ton,
            base.drop_height_m, base.distance_m, base.sensor_location,
            base.sensor_direction, ppv_mm_s=ppv))
    return records


def load_csv(path: str) -> list[PileDrivingRecord]:
    """Read records from CSV; the ppv column may be absent or blank."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataValidationError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if header not in (list(CSV_HEADER), list(FEATURE_NAMES)):
            raise DataValidationError(
                f"{path}: header {header} does not match the schema "
                f"{','.join(CSV_HEADER)} (ppv column optional)")
        has_ppv = len(header) == len(CSV_HEADER)

        records = []
        for rownum, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataValidationError(
                    f"{path}:{rownum}: expected {len(header)} columns, got {len(row)}")
            values = {}
            for name, cell in zip(header, row):
                cell = cell.strip()
                if name == TARGET_NAME and cell == "":
                    values[name] = None
                    continue
                try:
                    values[name] = float(cell)
                except ValueError:
                    raise DataValidationError(
                        f"{path}:{rownum}: column {name}: non-numeric value {cell!r}"
                    ) from None
            for name in ("sensor_location", "sensor_direction"):
                code = values[name]
                if code != int(code):
                    raise DataValidationError(
                        f"{path}:{rownum}: column {name}: code must be an integer, "
                        f"got {code}")
                values[name] = int(code)
            if not has_ppv:
                values[TARGET_NAME] = None
            try:
                records.append(PileDrivingRecord(
                    values["pile_size_mm"], values["pile_length_m"],
                    values["hammer_weight_ton"], values["drop_height_m"],
                    values["distance_m"], values["sensor_location"],
                    values["sensor_direction"], values[TARGET_NAME]))
            except DataValidationError as exc:
                raise DataValidationError(f"{path}:{rownum}: {exc}") from None
    return records


def save_csv(path: str, records: list[PileDrivingRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([
                repr(r.pile_size_mm), repr(r.pile_length_m),
                repr(r.hammer_weight_ton), repr(r.drop_height_m),
                repr(r.distance_m), r.sensor_location, r.sensor_direction,
                "" if r.ppv_mm_s is None else repr(r.ppv_mm_s),
            ])
