/** Documents exchanged with the preview server. Shapes mirror the config
 * and timeline JSON schemas; the server is the single source of truth. */

export type ModeName = "beats-slow" | "beats-fast" | "nobeats-slow" | "nobeats-fast";

export const MODES: ModeName[] = ["beats-slow", "beats-fast", "nobeats-slow", "nobeats-fast"];

export interface BeatDoc {
  id: string;
  text: string;
  short_text: string | null;
  anchor: string | null;
  y_start_px: number;
  y_end_px: number;
  est_duration_s: number;
  measured_duration_s: number | null;
}

export interface ConfigDoc {
  page: string;
  viewport: { width_px: number; height_px: number; device_scale: number };
  global_start_px: number;
  global_end_px: number;
  speaking_rate_wpm: number;
  fps: number;
  narration_lead_s: number;
  mode: ModeName;
  beats: BeatDoc[];
}

export interface SegmentDoc {
  beat_id: string;
  t_start_s: number;
  t_end_s: number;
  y_start_px: number;
  y_end_px: number;
  speed_px_per_s: number;
}

export interface TimelineDoc {
  total_duration_s: number;
  segments: SegmentDoc[];
}

export interface Issue {
  severity: "error" | "warning";
  path: string;
  message: string;
}

export interface ValidationReportDoc {
  ok: boolean;
  issues: Issue[];
}

export interface EditorState {
  config: ConfigDoc | null;
  dirty: boolean;
  selectedBeatId: string | null;
  activeMode: ModeName;
  lastReport: ValidationReportDoc | null;
}
