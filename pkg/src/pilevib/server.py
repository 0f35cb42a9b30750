"""HTTP JSON API over a trained model: /predict, /explain, /health.

The loaded model and background set are immutable shared state; no request
mutates the server. Location/direction are accepted as integer codes 1-3 or
their names; responses echo the canonical names.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, field_validator

from .data import (FEATURE_NAMES, GeneratorParams, PileDrivingRecord,
                   SENSOR_DIRECTIONS, SENSOR_LOCATIONS, generate_synthetic)
from .errors import DataValidationError
from .explain import BackgroundSet, shap_exact
from .train import TrainedModel

_LOCATION_CODES = {name: code for code, name in SENSOR_LOCATIONS.items()}
_DIRECTION_CODES = {name: code for code, name in SENSOR_DIRECTIONS.items()}


def _coerce_enum(value, table: dict[str, int], label: str) -> int:
    if isinstance(value, str):
        key = value.strip().lower()
        if key in table:
            return table[key]
        raise ValueError(f"{label} must be 1-3 or one of {sorted(table)}, got {value!r}")
    code = int(value)
    if code not in table.values():
        raise ValueError(f"{label} code must be 1, 2 or 3, got {value!r}")
    return code


class PredictRequest(BaseModel):
    pile_size_mm: float
    pile_length_m: float
    hammer_weight_ton: float
    drop_height_m: float
    distance_m: float
    sensor_location: int | str
    sensor_direction: int | str
    explain: bool = False

    @field_validator("sensor_location")
    @classmethod
    def _location(cls, v):
        return _coerce_enum(v, _LOCATION_CODES, "sensor_location")

    @field_validator("sensor_direction")
    @classmethod
    def _direction(cls, v):
        return _coerce_enum(v, _DIRECTION_CODES, "sensor_direction")

    def to_record(self) -> PileDrivingRecord:
        return PileDrivingRecord(
            pile_size_mm=self.pile_size_mm,
            pile_length_m=self.pile_length_m,
            hammer_weight_ton=self.hammer_weight_ton,
            drop_height_m=self.drop_height_m,
            distance_m=self.distance_m,
            sensor_location=self.sensor_location,
            sensor_direction=self.sensor_direction,
        )


def default_background(model: TrainedModel, size: int = 100) -> BackgroundSet:
    # The training data is not stored in the model file; a seeded synthetic
    # sample over the field feature box stands in as the reference set.
    records = generate_synthetic(size, GeneratorParams(seed=model.seed))
    return BackgroundSet(records)


def create_app(model: TrainedModel, background: BackgroundSet | None = None,
               model_version: str = "1") -> FastAPI:
    app = FastAPI(title="pile-driving PPV prediction API")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])
    if background is None:
        background = default_background(model)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        malformed = any(e.get("type") == "json_invalid" for e in errors)
        detail = "; ".join(
            f"{'.'.join(str(p) for p in e.get('loc', ()) if p != 'body')}: {e.get('msg')}"
            for e in errors)
        return JSONResponse(status_code=400 if malformed else 422,
                            content={"error": detail})

    @app.exception_handler(DataValidationError)
    async def record_handler(request: Request, exc: DataValidationError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(Exception)
    async def fallback_handler(request: Request, exc: Exception):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    def respond(req: PredictRequest, with_shap: bool) -> dict:
        record = req.to_record()
        body = {
            "ppv_mm_s": model.predict_record(record),
            "model_version": model_version,
            "sensor_location": SENSOR_LOCATIONS[record.sensor_location],
            "sensor_direction": SENSOR_DIRECTIONS[record.sensor_direction],
            "warnings": record.extrapolation_warnings(),
        }
        if with_shap:
            result = shap_exact(model, record, background)
            body["shap"] = {
                "baseline": result.baseline,
                "prediction": result.prediction,
                "phi": {name: float(v) for name, v in
                        zip(FEATURE_NAMES, result.phi)},
            }
        return body

    @app.post("/predict")
    async def predict(req: PredictRequest):
        return respond(req, with_shap=req.explain)

    @app.post("/explain")
    async def explain(req: PredictRequest):
        return respond(req, with_shap=True)

    @app.get("/health")
    async def health():
        return {"status": "ok", "model_version": model_version}

    return app
