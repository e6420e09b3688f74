import { describe, expect, it } from "vitest";

import { validateConfig } from "../src/ui/validate.js";
import { beat, config, threeBeats } from "./helpers.js";

describe("validateConfig", () => {
  it("accepts a tiled three-beat config", () => {
    const report = validateConfig(threeBeats());
    expect(report.ok).toBe(true);
    expect(report.issues).toHaveLength(0);
  });

  it("flags overlapping ranges", () => {
    const doc = config([
      beat({ id: "b1", y_start_px: 0, y_end_px: 200 }),
      beat({ id: "b2", y_start_px: 150, y_end_px: 400 }),
    ]);
    doc.global_end_px = 400;
    const report = validateConfig(doc);
    expect(report.ok).toBe(false);
    expect(report.issues.some((i) => i.message.includes("overlap"))).toBe(true);
  });

  it("flags gaps between ranges", () => {
    const doc = config([
      beat({ id: "b1", y_start_px: 0, y_end_px: 200 }),
      beat({ id: "b2", y_start_px: 260, y_end_px: 400 }),
    ]);
    doc.global_end_px = 400;
    expect(validateConfig(doc).issues.some((i) => i.message.includes("gap"))).toBe(true);
  });

  it("flags an empty scroll interval", () => {
    const doc = config([beat({ id: "b1", y_start_px: 100, y_end_px: 100, text: "" })]);
    expect(
      validateConfig(doc).issues.some((i) => i.message.includes("empty scroll interval"))
    ).toBe(true);
  });

  it("allows empty text only on zero-width holds", () => {
    const hold = config([
      beat({ id: "b1", y_start_px: 0, y_end_px: 300 }),
      beat({ id: "h", y_start_px: 300, y_end_px: 300, text: "" }),
      beat({ id: "b2", y_start_px: 300, y_end_px: 600 }),
    ]);
    expect(validateConfig(hold).ok).toBe(true);

    const bad = threeBeats();
    bad.beats[1].text = "   ";
    expect(validateConfig(bad).ok).toBe(false);
  });

  it("flags duplicate beat ids", () => {
    const doc = config([
      beat({ id: "b1", y_start_px: 0, y_end_px: 200 }),
      beat({ id: "b1", y_start_px: 200, y_end_px: 400 }),
    ]);
    expect(validateConfig(doc).issues.some((i) => i.message.includes("duplicate"))).toBe(true);
  });

  it("flags boundary mismatches with the global interval", () => {
    const doc = threeBeats();
    doc.global_end_px = 1500;
    expect(
      validateConfig(doc).issues.some((i) => i.message.includes("does not end"))
    ).toBe(true);
  });
});
