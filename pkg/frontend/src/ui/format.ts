/** Display formatting helpers; all pure. */

export function wordCount(text: string): number {
  const trimmed = text.trim();
  return trimmed ? trimmed.split(/\s+/).length : 0;
}

/** Words-per-minute speaking time used for table display only; the chart
 * always shows server-computed durations. */
export function estimateSeconds(text: string, rateWpm: number): number {
  return (wordCount(text) / rateWpm) * 60;
}

export function fmtSeconds(seconds: number): string {
  if (!Number.isFinite(seconds)) return "-";
  if (seconds < 60) return `${seconds.toFixed(2)}s`;
  const m = Math.floor(seconds / 60);
  const s = seconds - m * 60;
  return `${m}m${s.toFixed(1).padStart(4, "0")}s`;
}

export function fmtRange(y0: number, y1: number): string {
  const fmt = (v: number) => (Number.isInteger(v) ? String(v) : v.toFixed(1));
  return `${fmt(y0)}–${fmt(y1)} px`;
}

export function truncate(text: string, max = 80): string {
  return text.length <= max ? text : text.slice(0, max - 1) + "…";
}
