import { describe, expect, it } from "vitest";
import {
  DEFAULT_FORM,
  fromRequest,
  isValid,
  toRequest,
  validateField,
  validateForm,
} from "../src/form.js";

describe("form validation", () => {
  it("accepts the prefilled defaults", () => {
    expect(isValid(DEFAULT_FORM)).toBe(true);
    expect(validateForm(DEFAULT_FORM)).toEqual({});
  });

  it("rejects empty, non-numeric, and non-positive numbers", () => {
    expect(validateField("distanceM", "")).toBe("required");
    expect(validateField("distanceM", "abc")).toBe("must be a number");
    expect(validateField("distanceM", "-3")).toBe("must be positive");
    expect(validateField("distanceM", "0")).toBe("must be positive");
    expect(validateField("distanceM", "3.5")).toBeNull();
  });

  it("rejects unknown dropdown labels", () => {
    expect(validateField("location", "Underwater")).not.toBeNull();
    expect(validateField("trigger", "Sideways")).not.toBeNull();
    expect(validateField("location", "On footing")).toBeNull();
    expect(validateField("trigger", "Vertical")).toBeNull();
  });
});

describe("request serialization", () => {
  it("maps the default form to the example request", () => {
    expect(toRequest(DEFAULT_FORM)).toEqual({
      pile_size_mm: 300,
      pile_length_m: 18,
      hammer_weight_ton: 4.2,
      drop_height_m: 0.5,
      distance_m: 3,
      sensor_location: 1,
      sensor_direction: 2,
    });
  });

  it("round-trips through fromRequest", () => {
    const form = { ...DEFAULT_FORM, distanceM: "7.5", location: "On building" };
    expect(fromRequest(toRequest(form))).toEqual(form);
  });

  it("throws and names the bad fields", () => {
    const form = { ...DEFAULT_FORM, distanceM: "", weightTon: "x" };
    expect(() => toRequest(form)).toThrowError(/weightTon.*distanceM|distanceM|weightTon/);
  });
});
