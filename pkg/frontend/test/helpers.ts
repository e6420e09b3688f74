import type { BeatDoc, ConfigDoc } from "../src/ui/types.js";

export function beat(partial: Partial<BeatDoc> & { id: string }): BeatDoc {
  return {
    text: "some beat text",
    short_text: null,
    anchor: null,
    y_start_px: 0,
    y_end_px: 100,
    est_duration_s: 0,
    measured_duration_s: null,
    ...partial,
  };
}

export function config(beats: BeatDoc[], partial: Partial<ConfigDoc> = {}): ConfigDoc {
  const start = beats.length ? beats[0].y_start_px : 0;
  const end = beats.length ? beats[beats.length - 1].y_end_px : 0;
  return {
    page: "fixtures/five_boxes.html",
    viewport: { width_px: 540, height_px: 960, device_scale: 1 },
    global_start_px: start,
    global_end_px: end,
    speaking_rate_wpm: 160,
    fps: 30,
    narration_lead_s: 0,
    mode: "beats-slow",
    beats,
    ...partial,
  };
}

export function threeBeats(): ConfigDoc {
  return config([
    beat({ id: "b1", y_start_px: 0, y_end_px: 300, text: "first beat words" }),
    beat({ id: "b2", y_start_px: 300, y_end_px: 700, text: "second beat words" }),
    beat({ id: "b3", y_start_px: 700, y_end_px: 1200, text: "third beat words" }),
  ]);
}
