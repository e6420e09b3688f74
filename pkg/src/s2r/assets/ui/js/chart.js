/** Position-vs-time chart geometry.
 *
 * Maps server-computed timeline segments into SVG coordinate space; no
 * timing math happens here, so the chart cannot disagree with the server.
 */
export function timelineGeometry(timeline, width, height, pad = 8) {
    const segs = timeline.segments;
    if (!segs.length) {
        return { points: [], polyline: "", yMin: 0, yMax: 0, totalDuration: 0 };
    }
    const total = timeline.total_duration_s || 1;
    const yMin = segs[0].y_start_px;
    const yMax = Math.max(segs[segs.length - 1].y_end_px, yMin + 1);
    const sx = (t) => pad + (t / total) * (width - 2 * pad);
    // Screen y grows downward; larger scroll offsets plot lower, matching
    // the page moving up as the camera descends.
    const sy = (y) => pad + ((y - yMin) / (yMax - yMin)) * (height - 2 * pad);
    const points = [[sx(segs[0].t_start_s), sy(segs[0].y_start_px)]];
    for (const seg of segs) {
        points.push([sx(seg.t_end_s), sy(seg.y_end_px)]);
    }
    return {
        points,
        polyline: points.map(([x, y]) => `${round2(x)},${round2(y)}`).join(" "),
        yMin,
        yMax,
        totalDuration: timeline.total_duration_s,
    };
}
function round2(v) {
    return Math.round(v * 100) / 100;
}
/** Slope classes per segment for styling (hold beats draw flat). */
export function segmentKinds(timeline) {
    return timeline.segments.map((s) => (s.y_end_px > s.y_start_px ? "moving" : "hold"));
}
