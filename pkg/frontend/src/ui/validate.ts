/** Client-side mirror of the server's config validation.
 *
 * Used only to disable saving early and point at the offending field; the
 * server remains the authority and re-validates every PUT.
 */

import type { ConfigDoc, Issue, ValidationReportDoc } from "./types.js";

const PX_TOL = 1e-6;

export function validateConfig(config: ConfigDoc): ValidationReportDoc {
  const issues: Issue[] = [];
  const err = (path: string, message: string) => issues.push({ severity: "error", path, message });

  if (config.viewport.width_px <= 0 || config.viewport.height_px <= 0) {
    err("viewport", "viewport dimensions must be positive");
  }
  if (config.speaking_rate_wpm <= 0) err("speaking_rate_wpm", "speaking rate must be positive");
  if (config.fps <= 0) err("fps", "fps must be positive");
  if (config.narration_lead_s < 0) err("narration_lead_s", "narration lead must be non-negative");
  if (config.global_end_px <= config.global_start_px + PX_TOL) {
    err("global_end_px", "empty scroll interval");
  }
  if (!config.beats.length) err("beats", "at least one beat is required");

  const seen = new Set<string>();
  config.beats.forEach((b, i) => {
    const path = `beats[${i}]`;
    if (!b.id) err(`${path}.id`, "beat id must be non-empty");
    else if (seen.has(b.id)) err(`${path}.id`, `duplicate beat id ${b.id}`);
    seen.add(b.id);
    if (b.y_end_px < b.y_start_px - PX_TOL) err(path, "range inverted: y_end_px < y_start_px");
    const isHold = Math.abs(b.y_end_px - b.y_start_px) <= PX_TOL;
    if (!b.text.trim() && !isHold) err(`${path}.text`, "text is empty for a non-hold beat");
    if (b.est_duration_s < 0) err(`${path}.est_duration_s`, "estimated duration must be non-negative");
    if (b.measured_duration_s !== null && b.measured_duration_s < 0) {
      err(`${path}.measured_duration_s`, "measured duration must be non-negative");
    }
  });

  if (config.beats.length) {
    for (let i = 0; i + 1 < config.beats.length; i++) {
      if (config.beats[i + 1].y_start_px < config.beats[i].y_start_px - PX_TOL) {
        err("beats", "beats not sorted");
        break;
      }
    }
    const first = config.beats[0];
    const last = config.beats[config.beats.length - 1];
    if (Math.abs(first.y_start_px - config.global_start_px) > PX_TOL) {
      err("beats[0].y_start_px", "first beat does not start at global_start_px");
    }
    if (Math.abs(last.y_end_px - config.global_end_px) > PX_TOL) {
      err(`beats[${config.beats.length - 1}].y_end_px`, "last beat does not end at global_end_px");
    }
    for (let i = 0; i + 1 < config.beats.length; i++) {
      const gap = config.beats[i + 1].y_start_px - config.beats[i].y_end_px;
      if (gap > PX_TOL) {
        err(`beats[${i + 1}].y_start_px`, "ranges gap: beat does not start where the previous ends");
      } else if (gap < -PX_TOL) {
        err(`beats[${i + 1}].y_start_px`, "ranges overlap");
      }
    }
  }

  return { ok: !issues.some((i) => i.severity === "error"), issues };
}
