/** Display formatting helpers; all pure. */
export function wordCount(text) {
    const trimmed = text.trim();
    return trimmed ? trimmed.split(/\s+/).length : 0;
}
/** Words-per-minute speaking time used for table display only; the chart
 * always shows server-computed durations. */
export function estimateSeconds(text, rateWpm) {
    return (wordCount(text) / rateWpm) * 60;
}
export function fmtSeconds(seconds) {
    if (!Number.isFinite(seconds))
        return "-";
    if (seconds < 60)
        return `${seconds.toFixed(2)}s`;
    const m = Math.floor(seconds / 60);
    const s = seconds - m * 60;
    return `${m}m${s.toFixed(1).padStart(4, "0")}s`;
}
export function fmtRange(y0, y1) {
    const fmt = (v) => (Number.isInteger(v) ? String(v) : v.toFixed(1));
    return `${fmt(y0)}–${fmt(y1)} px`;
}
export function truncate(text, max = 80) {
    return text.length <= max ? text : text.slice(0, max - 1) + "…";
}
