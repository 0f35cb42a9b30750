// Form state, validation, and (bijective) serialization to API requests.

import type { PredictRequest } from "./api.js";

export interface FormState {
  pileWidthMm: string;
  pileLengthM: string;
  weightTon: string;
  dropHeightM: string;
  distanceM: string;
  location: string; // dropdown label
  trigger: string; // dropdown label
}

export const LOCATION_CODES: Record<string, number> = {
  "On ground": 1,
  "On footing": 2,
  "On building": 3,
};

export const TRIGGER_CODES: Record<string, number> = {
  Longitudinal: 1,
  Transverse: 2,
  Vertical: 3,
};

const LOCATION_LABELS = Object.fromEntries(
  Object.entries(LOCATION_CODES).map(([label, code]) => [code, label]),
);
const TRIGGER_LABELS = Object.fromEntries(
  Object.entries(TRIGGER_CODES).map(([label, code]) => [code, label]),
);

/** Example scenario prefilled so the first prediction is one click away. */
export const DEFAULT_FORM: FormState = {
  pileWidthMm: "300",
  pileLengthM: "18",
  weightTon: "4.2",
  dropHeightM: "0.5",
  distanceM: "3",
  location: "On ground",
  trigger: "Transverse",
};

export const NUMERIC_FIELDS = [
  "pileWidthMm",
  "pileLengthM",
  "weightTon",
  "dropHeightM",
  "distanceM",
] as const;

export type NumericField = (typeof NUMERIC_FIELDS)[number];

export const FIELD_LABELS: Record<keyof FormState, string> = {
  pileWidthMm: "Pile width (mm)",
  pileLengthM: "Pile length (m)",
  weightTon: "Weight (ton)",
  dropHeightM: "Drop height (m)",
  distanceM: "Distance (m)",
  location: "Location",
  trigger: "Trigger",
};

export function validateField(field: keyof FormState, value: string): string | null {
  if ((NUMERIC_FIELDS as readonly string[]).includes(field)) {
    if (value.trim() === "") return "required";
    const parsed = Number(value);
    if (!Number.isFinite(parsed)) return "must be a number";
    if (parsed <= 0) return "must be positive";
    return null;
  }
  if (field === "location") {
    return value in LOCATION_CODES ? null : "select a location";
  }
  if (field === "trigger") {
    return value in TRIGGER_CODES ? null : "select a trigger";
  }
  return null;
}

export function validateForm(form: FormState): Partial<Record<keyof FormState, string>> {
  const errors: Partial<Record<keyof FormState, string>> = {};
  for (const field of Object.keys(form) as (keyof FormState)[]) {
    const error = validateField(field, form[field]);
    if (error) errors[field] = error;
  }
  return errors;
}

export function isValid(form: FormState): boolean {
  return Object.keys(validateForm(form)).length === 0;
}

export function toRequest(form: FormState): PredictRequest {
  const errors = validateForm(form);
  const bad = Object.keys(errors);
  if (bad.length > 0) {
    throw new Error(`invalid form fields: ${bad.join(", ")}`);
  }
  return {
    pile_size_mm: Number(form.pileWidthMm),
    pile_length_m: Number(form.pileLengthM),
    hammer_weight_ton: Number(form.weightTon),
    drop_height_m: Number(form.dropHeightM),
    distance_m: Number(form.distanceM),
    sensor_location: LOCATION_CODES[form.location],
    sensor_direction: TRIGGER_CODES[form.trigger],
  };
}

export function fromRequest(request: PredictRequest): FormState {
  return {
    pileWidthMm: String(request.pile_size_mm),
    pileLengthM: String(request.pile_length_m),
    weightTon: String(request.hammer_weight_ton),
    dropHeightM: String(request.drop_height_m),
    distanceM: String(request.distance_m),
    location: LOCATION_LABELS[request.sensor_location],
    trigger: TRIGGER_LABELS[request.sensor_direction],
  };
}
