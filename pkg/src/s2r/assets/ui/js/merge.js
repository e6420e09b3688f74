/** Beat merging: concatenate texts with a single space, union ranges. */
function joinTexts(a, b) {
    return [a, b]
        .map((t) => t.trim())
        .filter((t) => t)
        .join(" ");
}
/**
 * Merge the beat with the one that follows it. The merged beat keeps the
 * first beat's id and anchor, spans both ranges, and loses any measured
 * duration (the joined narration has never been synthesized).
 */
export function mergeWithNext(config, beatId) {
    const index = config.beats.findIndex((b) => b.id === beatId);
    if (index < 0)
        throw new Error(`no beat with id ${beatId}`);
    if (index + 1 >= config.beats.length)
        throw new Error(`beat ${beatId} has no following beat`);
    const a = config.beats[index];
    const b = config.beats[index + 1];
    const merged = {
        id: a.id,
        text: joinTexts(a.text, b.text),
        short_text: a.short_text !== null && b.short_text !== null ? joinTexts(a.short_text, b.short_text) : null,
        anchor: a.anchor,
        y_start_px: a.y_start_px,
        y_end_px: b.y_end_px,
        est_duration_s: 0,
        measured_duration_s: null,
    };
    const beats = config.beats.slice(0, index).concat([merged], config.beats.slice(index + 2));
    return { ...config, beats };
}
