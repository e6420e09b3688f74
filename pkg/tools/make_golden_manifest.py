#!/usr/bin/env python3
"""Regenerate golden/five_boxes.manifest.json from the recorded survey.

Independent oracle for the dry-run pipeline: recomputes triggers, ranges,
mock narration durations, segment speeds, frame timestamps and positions
with plain arithmetic over the fixture files, deliberately importing
nothing from the package it checks. Run from the repository root:

    python3 tools/make_golden_manifest.py
"""

import hashlib
import json
import math
import re
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

VIEWPORT_W, VIEWPORT_H = 540, 960
START, END = 0.0, 4000.0
ANCHOR_FRACTION = 0.5
RATE_WPM = 160.0
FPS = 30.0
SAMPLE_RATE = 44100
MOCK_FLOOR_S = 0.4


def canonical(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def last_compound_classes(selector: str) -> tuple[str | None, set[str]]:
    last = re.split(r"\s*>\s*|\s+", selector.strip())[-1]
    elem_id = None
    m = re.search(r"#([\w-]+)", last)
    if m:
        elem_id = m.group(1)
    classes = set(re.findall(r"\.([\w-]+)", last))
    return elem_id, classes


def main() -> None:
    survey = json.loads((ROOT / "fixtures" / "five_boxes.survey.json").read_text(encoding="utf-8"))

    boxes = []
    for el in survey["elements"]:
        elem_id, classes = last_compound_classes(el["selector"])
        if "overlay" not in classes:
            continue
        text = re.sub(r"\s+", " ", el["text"]).strip()
        if not text or el["box"]["y"] >= END + VIEWPORT_H:
            continue
        boxes.append((float(el["box"]["y"]), elem_id, el["selector"], text))
    boxes.sort()

    # Trigger per box, first range snapped to the start anchor.
    triggers = [min(max(y - ANCHOR_FRACTION * VIEWPORT_H, START), END) for y, *_ in boxes]
    bounds = [START] + triggers[1:] + [END]

    beats = []
    for (y, elem_id, selector, text), y0, y1 in zip(boxes, bounds[:-1], bounds[1:]):
        beats.append(
            {
                "id": elem_id,
                "text": text,
                "short_text": None,
                "anchor": selector,
                "y_start_px": y0,
                "y_end_px": y1,
                "est_duration_s": 0.0,
                "measured_duration_s": None,
            }
        )

    config = {
        "page": survey["page"],
        "viewport": {"width_px": VIEWPORT_W, "height_px": VIEWPORT_H, "device_scale": 1.0},
        "global_start_px": START,
        "global_end_px": END,
        "speaking_rate_wpm": RATE_WPM,
        "fps": FPS,
        "narration_lead_s": 0.0,
        "mode": "beats-slow",
        "beats": beats,
    }
    digest = hashlib.sha256(canonical(config)).hexdigest()

    # Mock narration: max(floor, words/rate*60) seconds, measured back from
    # the written WAV as whole samples.
    measured = []
    for b in beats:
        est = len(b["text"].split()) / RATE_WPM * 60.0
        measured.append(round(max(MOCK_FLOOR_S, est) * SAMPLE_RATE) / SAMPLE_RATE)

    t_bounds = [0.0]
    for d in measured:
        t_bounds.append(t_bounds[-1] + d)
    total = t_bounds[-1]
    speeds = [
        (b["y_end_px"] - b["y_start_px"]) / d for b, d in zip(beats, measured)
    ]

    def position(t: float) -> float:
        for i in range(len(beats)):
            if t_bounds[i] <= t < t_bounds[i + 1]:
                return beats[i]["y_start_px"] + speeds[i] * (t - t_bounds[i])
        return beats[-1]["y_end_px"]

    n = math.floor(total * FPS)
    frames = []
    for k in range(n + 1):
        t = min(k / FPS, total)
        frames.append({"index": k, "timestamp_s": t, "y_px": position(t), "path": f"frames/frame_{k:06d}.png"})
    if frames[-1]["timestamp_s"] < total:
        frames.append(
            {"index": n + 1, "timestamp_s": total, "y_px": position(total), "path": f"frames/frame_{n + 1:06d}.png"}
        )

    # Padding targets cumulative sample counts, so the track ends at the
    # rounded total.
    audio_duration = round(total * SAMPLE_RATE) / SAMPLE_RATE

    manifest = {
        "fps": FPS,
        "viewport": config["viewport"],
        "frames": frames,
        "audio_path": "narration.wav",
        "audio_duration_s": audio_duration,
        "captions_path": "captions.vtt",
        "mode": "beats-slow",
        "config_digest": digest,
        "narration_lead_s": 0.0,
        "total_duration_s": total,
    }

    out = ROOT / "golden" / "five_boxes.manifest.json"
    out.parent.mkdir(exist_ok=True)
    out.write_bytes(canonical(manifest))
    print(f"wrote {out}: {len(frames)} frames, total {total}s, digest {digest[:12]}")


if __name__ == "__main__":
    main()
