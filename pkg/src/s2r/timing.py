"""Scroll/narration alignment math.

Scrolling speed within one beat is constant: speed = (end position - start
position) / speaking time. A timeline is the ordered, contiguous list of
such segments; frames are sampled from it deterministically instead of
driving a live animation, so output never depends on wall-clock time.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass

from .errors import ConfigError
from .model import (
    Beat,
    BeatsConfig,
    Mode,
    config_digest,
    narration_text,
    validate_config,
)

# Eq-level identity between stored speed and distance/time.
SPEED_REL_TOL = 1e-9

# A beat with scroll distance but no narration would need infinite speed;
# give it a short dwell instead of an instantaneous jump.
MIN_DWELL_S = 0.3


class TimingError(ConfigError):
    """Timeline construction failed (bad durations or stale inputs)."""


@dataclass(frozen=True)
class ScrollSegment:
    beat_id: str
    t_start_s: float
    t_end_s: float
    y_start_px: float
    y_end_px: float
    speed_px_per_s: float

    def __post_init__(self):
        if self.t_end_s < self.t_start_s:
            raise TimingError(f"segment {self.beat_id!r}: negative duration")
        if self.y_end_px < self.y_start_px:
            raise TimingError(f"segment {self.beat_id!r}: negative scroll distance")
        dt = self.t_end_s - self.t_start_s
        if dt > 0:
            actual = (self.y_end_px - self.y_start_px) / dt
            if abs(self.speed_px_per_s - actual) > SPEED_REL_TOL * max(1.0, abs(actual)):
                raise TimingError(f"segment {self.beat_id!r}: speed inconsistent with distance/time")


@dataclass(frozen=True)
class ScrollTimeline:
    segments: tuple[ScrollSegment, ...]
    total_duration_s: float
    config_digest: str | None = None

    def __post_init__(self):
        segs = self.segments
        if segs:
            if segs[0].t_start_s != 0.0:
                raise TimingError("timeline must start at t=0")
            for a, b in zip(segs, segs[1:]):
                if abs(b.t_start_s - a.t_end_s) > 1e-9:
                    raise TimingError("timeline segments not contiguous in time")
                if abs(b.y_start_px - a.y_end_px) > 1e-6:
                    raise TimingError("timeline segments not contiguous in space")
            if abs(self.total_duration_s - segs[-1].t_end_s) > 1e-9:
                raise TimingError("total_duration_s must equal the last segment end")
        # Cached for position lookups; frame sampling hits this per frame.
        object.__setattr__(self, "_t_starts", [s.t_start_s for s in segs])


@dataclass(frozen=True)
class Frame:
    index: int
    timestamp_s: float
    y_px: float


@dataclass(frozen=True)
class FrameSchedule:
    fps: float
    frames: tuple[Frame, ...]
    config_digest: str | None = None


def estimate_speaking_time(text: str, rate_wpm: float) -> float:
    """Speaking time of whitespace-separated words at a constant rate."""
    if rate_wpm <= 0:
        raise ValueError("rate_wpm must be positive")
    return len(text.split()) / rate_wpm * 60.0


def segment_speed(y_start: float, y_end: float, duration_s: float) -> float:
    """Constant scroll speed for one beat: (end - start) / speaking time."""
    if y_end < y_start:
        raise ValueError("y_end must not be less than y_start")
    if duration_s < 0:
        raise ValueError("duration_s must be non-negative")
    if duration_s == 0:
        if y_end > y_start:
            raise TimingError("cannot traverse distance in zero time")
        return 0.0
    return (y_end - y_start) / duration_s


def _beat_durations(
    config: BeatsConfig, measured: dict[str, float] | None
) -> list[tuple[Beat, float]]:
    """Duration per surviving beat.

    measured wins over the per-beat estimate; a zero-duration zero-width
    beat is dropped; a zero-duration beat with scroll distance dwells for
    MIN_DWELL_S.
    """
    survivors: list[tuple[Beat, float]] = []
    for beat in config.beats:
        if measured is not None:
            if beat.id not in measured:
                raise TimingError(f"no measured duration for beat {beat.id!r}")
            duration = measured[beat.id]
        elif beat.measured_duration_s is not None:
            duration = beat.measured_duration_s
        else:
            duration = estimate_speaking_time(
                narration_text(beat, config.mode), config.speaking_rate_wpm
            )
        if duration < 0:
            raise TimingError(f"negative duration for beat {beat.id!r}")
        if duration == 0:
            if beat.is_hold:
                continue
            duration = MIN_DWELL_S
        survivors.append((beat, duration))
    return survivors


def _assemble(
    config: BeatsConfig, durations: list[tuple[Beat, float]], lead_s: float
) -> ScrollTimeline:
    if not durations:
        raise TimingError("timeline has no segments: every beat was dropped")
    if lead_s < 0:
        raise ValueError("lead_s must be non-negative")

    # Narration cue boundaries: cue i starts at T[i].
    cues = [0.0]
    for _, d in durations:
        cues.append(cues[-1] + d)
    total = cues[-1]

    # Scroll boundaries: each segment starts lead_s before its cue where
    # possible, clamped at 0 and at the previous segment's start; the last
    # boundary stays at the total so audio and video end together.
    starts = [0.0]
    for i in range(1, len(durations)):
        starts.append(max(cues[i] - lead_s, starts[-1]))
    bounds = starts + [total]

    segments = []
    for i, (beat, duration) in enumerate(durations):
        t0, t1 = bounds[i], bounds[i + 1]
        if t1 == t0 and beat.y_end_px > beat.y_start_px:
            raise TimingError(
                f"narration lead {lead_s}s collapses beat {beat.id!r} to zero time"
            )
        # With no lead the segment length is the speaking time itself;
        # dividing by it directly avoids re-deriving the duration from
        # cumulative boundaries (a last-ulp difference).
        dt = duration if lead_s == 0.0 else t1 - t0
        segments.append(
            ScrollSegment(
                beat_id=beat.id,
                t_start_s=t0,
                t_end_s=t1,
                y_start_px=beat.y_start_px,
                y_end_px=beat.y_end_px,
                speed_px_per_s=segment_speed(beat.y_start_px, beat.y_end_px, dt),
            )
        )
    return ScrollTimeline(
        segments=tuple(segments),
        total_duration_s=total,
        config_digest=config_digest(config),
    )


def build_timeline(config: BeatsConfig) -> ScrollTimeline:
    """One constant-speed segment per beat, back to back.

    Per-beat duration is the measured narration length when present, else
    the speaking-time estimate for the mode-appropriate text.
    """
    return scroll_timeline(config, lead_s=0.0)


def scroll_timeline(config: BeatsConfig, lead_s: float = 0.0) -> ScrollTimeline:
    """build_timeline plus an optional visual lead ahead of the narration."""
    report = validate_config(config)
    if not report.ok:
        first = next(i for i in report.issues if i.severity == "error")
        raise ConfigError(f"invalid config: {first.path}: {first.message}", report=report)
    return _assemble(config, _beat_durations(config, None), lead_s=lead_s)


def retime(
    config: BeatsConfig, measured: dict[str, float], lead_s: float = 0.0
) -> ScrollTimeline:
    """Rebuild the timeline from measured durations, optionally advancing
    each segment's scroll by lead_s (shrinking the previous segment's tail)
    while narration cues keep their original start times.

    With lead_s = 0 this equals build_timeline on measured durations.
    """
    report = validate_config(config)
    if not report.ok:
        first = next(i for i in report.issues if i.severity == "error")
        raise ConfigError(f"invalid config: {first.path}: {first.message}", report=report)
    return _assemble(config, _beat_durations(config, measured), lead_s=lead_s)


def narration_cues(config: BeatsConfig, measured: dict[str, float] | None = None) -> ScrollTimeline:
    """The lead-free timeline whose segment intervals are the narration cues."""
    if measured is None:
        return build_timeline(config)
    return retime(config, measured, lead_s=0.0)


def position_at(timeline: ScrollTimeline, t_s: float) -> float:
    """Piecewise-linear scroll position at time t.

    Segments are half-open [t_start, t_end) except the last, so boundary
    values come from the later segment's exact start position.
    """
    if not timeline.segments:
        raise TimingError("empty timeline")
    if t_s < 0 or t_s > timeline.total_duration_s:
        raise ValueError(
            f"t={t_s} outside [0, {timeline.total_duration_s}]"
        )
    i = bisect_right(timeline._t_starts, t_s) - 1
    if i < 0:
        i = 0
    seg = timeline.segments[i]
    if t_s >= seg.t_end_s:
        return seg.y_end_px
    return seg.y_start_px + seg.speed_px_per_s * (t_s - seg.t_start_s)


def sample_frames(timeline: ScrollTimeline, fps: float) -> FrameSchedule:
    """Frame timestamps at k/fps with full-precision positions.

    floor(total x fps) + 1 samples, plus one terminal frame at exactly the
    total duration when the sampling grid does not land on it, so the last
    frame always sits at the global end position. Capture rounds positions
    to device pixels; this op does not.
    """
    if fps <= 0:
        raise ValueError("fps must be positive")
    total = timeline.total_duration_s
    n = math.floor(total * fps)
    frames = []
    for k in range(n + 1):
        t = min(k / fps, total)
        frames.append(Frame(index=k, timestamp_s=t, y_px=position_at(timeline, t)))
    if frames[-1].timestamp_s < total:
        frames.append(Frame(index=n + 1, timestamp_s=total, y_px=position_at(timeline, total)))
    return FrameSchedule(fps=fps, frames=tuple(frames), config_digest=timeline.config_digest)


# --- timeline interchange document ---


def timeline_to_dict(timeline: ScrollTimeline) -> dict:
    return {
        "total_duration_s": timeline.total_duration_s,
        "segments": [
            {
                "beat_id": s.beat_id,
                "t_start_s": s.t_start_s,
                "t_end_s": s.t_end_s,
                "y_start_px": s.y_start_px,
                "y_end_px": s.y_end_px,
                "speed_px_per_s": s.speed_px_per_s,
            }
            for s in timeline.segments
        ],
    }


def timeline_to_json(timeline: ScrollTimeline) -> bytes:
    doc = json.dumps(timeline_to_dict(timeline), sort_keys=True, indent=2, ensure_ascii=False)
    return (doc + "\n").encode("utf-8")


def timeline_from_dict(obj: dict, digest: str | None = None) -> ScrollTimeline:
    try:
        segments = tuple(
            ScrollSegment(
                beat_id=s["beat_id"],
                t_start_s=float(s["t_start_s"]),
                t_end_s=float(s["t_end_s"]),
                y_start_px=float(s["y_start_px"]),
                y_end_px=float(s["y_end_px"]),
                speed_px_per_s=float(s["speed_px_per_s"]),
            )
            for s in obj["segments"]
        )
        return ScrollTimeline(
            segments=segments,
            total_duration_s=float(obj["total_duration_s"]),
            config_digest=digest,
        )
    except (KeyError, TypeError) as exc:
        raise TimingError(f"malformed timeline document: {exc}") from None
