"""Beats configuration data model, JSON file format, and validation.

A beats configuration is one JSON document that fully determines one reel
variant: the page, the mobile viewport, the scroll interval, the ordered
list of narrative beats tiling that interval, and the pacing mode.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import ConfigError

# Rendered layouts produce sub-pixel offsets; pixel comparisons use this
# absolute tolerance throughout.
PX_TOL = 1e-6

DEFAULT_SPEAKING_RATE_WPM = 160.0
DEFAULT_FPS = 30.0


class Mode(str, Enum):
    """Reel variant: beat-aligned or concatenated, original or shortened text."""

    BEATS_SLOW = "beats-slow"
    BEATS_FAST = "beats-fast"
    NOBEATS_SLOW = "nobeats-slow"
    NOBEATS_FAST = "nobeats-fast"

    @property
    def is_fast(self) -> bool:
        return self.value.endswith("-fast")

    @property
    def is_beats(self) -> bool:
        return self.value.startswith("beats-")


@dataclass(frozen=True)
class Viewport:
    """Emulated device viewport. Defaults to the common 9:16 reel size."""

    width_px: int = 540
    height_px: int = 960
    device_scale: float = 1.0


@dataclass(frozen=True)
class Beat:
    """One narrative unit: a text box and the scroll range it owns.

    Pixel offsets are absolute document-space values. A zero-width range
    (y_start_px == y_end_px) is a "hold" beat where the camera dwells.
    """

    id: str
    text: str
    y_start_px: float
    y_end_px: float
    short_text: str | None = None
    anchor: str | None = None
    est_duration_s: float = 0.0
    measured_duration_s: float | None = None

    @property
    def width_px(self) -> float:
        return self.y_end_px - self.y_start_px

    @property
    def is_hold(self) -> bool:
        return abs(self.width_px) <= PX_TOL


@dataclass(frozen=True)
class BeatsConfig:
    """Complete recipe for one reel variant."""

    page: str
    viewport: Viewport
    global_start_px: float
    global_end_px: float
    beats: tuple[Beat, ...]
    mode: Mode = Mode.BEATS_SLOW
    speaking_rate_wpm: float = DEFAULT_SPEAKING_RATE_WPM
    fps: float = DEFAULT_FPS
    narration_lead_s: float = 0.0


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" or "warning"
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[Issue, ...] = field(default=())

    @classmethod
    def from_issues(cls, issues: list[Issue]) -> "ValidationReport":
        ok = not any(i.severity == "error" for i in issues)
        return cls(ok=ok, issues=tuple(issues))

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "issues": [
                {"severity": i.severity, "path": i.path, "message": i.message}
                for i in self.issues
            ],
        }


# --- dict <-> dataclass conversion (strict schema) ---

_CONFIG_KEYS = {
    "page",
    "viewport",
    "global_start_px",
    "global_end_px",
    "speaking_rate_wpm",
    "fps",
    "narration_lead_s",
    "mode",
    "beats",
}
_VIEWPORT_KEYS = {"width_px", "height_px", "device_scale"}
_BEAT_KEYS = {
    "id",
    "text",
    "short_text",
    "anchor",
    "y_start_px",
    "y_end_px",
    "est_duration_s",
    "measured_duration_s",
}


def _need(obj: dict, key: str, path: str):
    if key not in obj:
        raise ConfigError(f"schema error: missing field '{path}{key}'")
    return obj[key]


def _num(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"schema error: '{path}' must be a number")
    return float(value)


def _text(value, path: str, optional: bool = False) -> str | None:
    if optional and value is None:
        return None
    if not isinstance(value, str):
        raise ConfigError(f"schema error: '{path}' must be a string")
    return value


def _reject_unknown(obj: dict, allowed: set, path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        name = sorted(unknown)[0]
        raise ConfigError(f"schema error: unknown field '{path}{name}'")


def viewport_from_dict(obj: dict, path: str = "viewport.") -> Viewport:
    if not isinstance(obj, dict):
        raise ConfigError(f"schema error: '{path[:-1]}' must be an object")
    _reject_unknown(obj, _VIEWPORT_KEYS, path)
    width = _need(obj, "width_px", path)
    height = _need(obj, "height_px", path)
    if isinstance(width, bool) or not isinstance(width, int):
        raise ConfigError(f"schema error: '{path}width_px' must be an integer")
    if isinstance(height, bool) or not isinstance(height, int):
        raise ConfigError(f"schema error: '{path}height_px' must be an integer")
    return Viewport(
        width_px=width,
        height_px=height,
        device_scale=_num(obj.get("device_scale", 1.0), path + "device_scale"),
    )


def beat_from_dict(obj: dict, path: str) -> Beat:
    if not isinstance(obj, dict):
        raise ConfigError(f"schema error: '{path[:-1]}' must be an object")
    _reject_unknown(obj, _BEAT_KEYS, path)
    measured = obj.get("measured_duration_s")
    return Beat(
        id=_text(_need(obj, "id", path), path + "id"),
        text=_text(_need(obj, "text", path), path + "text"),
        short_text=_text(obj.get("short_text"), path + "short_text", optional=True),
        anchor=_text(obj.get("anchor"), path + "anchor", optional=True),
        y_start_px=_num(_need(obj, "y_start_px", path), path + "y_start_px"),
        y_end_px=_num(_need(obj, "y_end_px", path), path + "y_end_px"),
        est_duration_s=_num(obj.get("est_duration_s", 0.0), path + "est_duration_s"),
        measured_duration_s=None if measured is None else _num(measured, path + "measured_duration_s"),
    )


def config_from_dict(obj: dict) -> BeatsConfig:
    """Build a BeatsConfig from a parsed JSON object. Structural checks only."""
    if not isinstance(obj, dict):
        raise ConfigError("schema error: top level must be an object")
    _reject_unknown(obj, _CONFIG_KEYS, "")
    mode_raw = _text(_need(obj, "mode", ""), "mode")
    try:
        mode = Mode(mode_raw)
    except ValueError:
        raise ConfigError(
            f"schema error: 'mode' must be one of {[m.value for m in Mode]}, got {mode_raw!r}"
        ) from None
    beats_raw = _need(obj, "beats", "")
    if not isinstance(beats_raw, list):
        raise ConfigError("schema error: 'beats' must be a list")
    beats = tuple(
        beat_from_dict(b, f"beats[{i}].") for i, b in enumerate(beats_raw)
    )
    return BeatsConfig(
        page=_text(_need(obj, "page", ""), "page"),
        viewport=viewport_from_dict(_need(obj, "viewport", "")),
        global_start_px=_num(_need(obj, "global_start_px", ""), "global_start_px"),
        global_end_px=_num(_need(obj, "global_end_px", ""), "global_end_px"),
        beats=beats,
        mode=mode,
        speaking_rate_wpm=_num(obj.get("speaking_rate_wpm", DEFAULT_SPEAKING_RATE_WPM), "speaking_rate_wpm"),
        fps=_num(obj.get("fps", DEFAULT_FPS), "fps"),
        narration_lead_s=_num(obj.get("narration_lead_s", 0.0), "narration_lead_s"),
    )


def config_to_dict(config: BeatsConfig) -> dict:
    return {
        "page": config.page,
        "viewport": {
            "width_px": config.viewport.width_px,
            "height_px": config.viewport.height_px,
            "device_scale": float(config.viewport.device_scale),
        },
        "global_start_px": float(config.global_start_px),
        "global_end_px": float(config.global_end_px),
        "speaking_rate_wpm": float(config.speaking_rate_wpm),
        "fps": float(config.fps),
        "narration_lead_s": float(config.narration_lead_s),
        "mode": config.mode.value,
        "beats": [
            {
                "id": b.id,
                "text": b.text,
                "short_text": b.short_text,
                "anchor": b.anchor,
                "y_start_px": float(b.y_start_px),
                "y_end_px": float(b.y_end_px),
                "est_duration_s": float(b.est_duration_s),
                "measured_duration_s": None
                if b.measured_duration_s is None
                else float(b.measured_duration_s),
            }
            for b in config.beats
        ],
    }


# --- validation ---


def validate_config(config: BeatsConfig) -> ValidationReport:
    """Check every invariant; issues are reported, never thrown."""
    issues: list[Issue] = []

    def err(path: str, message: str) -> None:
        issues.append(Issue("error", path, message))

    vp = config.viewport
    if vp.width_px <= 0 or vp.height_px <= 0:
        err("viewport", "viewport dimensions must be positive")
    if vp.device_scale <= 0:
        err("viewport.device_scale", "device scale must be positive")
    if config.speaking_rate_wpm <= 0:
        err("speaking_rate_wpm", "speaking rate must be positive")
    if config.fps <= 0:
        err("fps", "fps must be positive")
    if config.narration_lead_s < 0:
        err("narration_lead_s", "narration lead must be non-negative")

    if config.global_end_px <= config.global_start_px + PX_TOL:
        err("global_end_px", "empty scroll interval")

    if not config.beats:
        err("beats", "at least one beat is required")

    seen_ids: set[str] = set()
    for i, b in enumerate(config.beats):
        path = f"beats[{i}]"
        if not b.id:
            err(path + ".id", "beat id must be non-empty")
        elif b.id in seen_ids:
            err(path + ".id", f"duplicate beat id {b.id!r}")
        seen_ids.add(b.id)
        if b.y_end_px < b.y_start_px - PX_TOL:
            err(path, "range inverted: y_end_px < y_start_px")
        if not b.text.strip() and not b.is_hold:
            err(path + ".text", "text is empty for a non-hold beat")
        if b.est_duration_s < 0:
            err(path + ".est_duration_s", "estimated duration must be non-negative")
        if b.measured_duration_s is not None and b.measured_duration_s < 0:
            err(path + ".measured_duration_s", "measured duration must be non-negative")

    if config.beats:
        for i in range(len(config.beats) - 1):
            if config.beats[i + 1].y_start_px < config.beats[i].y_start_px - PX_TOL:
                err("beats", "beats not sorted")
                break
        first, last = config.beats[0], config.beats[-1]
        if abs(first.y_start_px - config.global_start_px) > PX_TOL:
            err("beats[0].y_start_px", "first beat does not start at global_start_px")
        if abs(last.y_end_px - config.global_end_px) > PX_TOL:
            err(f"beats[{len(config.beats) - 1}].y_end_px", "last beat does not end at global_end_px")
        for i in range(len(config.beats) - 1):
            cur, nxt = config.beats[i], config.beats[i + 1]
            gap = nxt.y_start_px - cur.y_end_px
            if gap > PX_TOL:
                err(f"beats[{i + 1}].y_start_px", "ranges gap: beat does not start where the previous ends")
            elif gap < -PX_TOL:
                err(f"beats[{i + 1}].y_start_px", "ranges overlap")

    return ValidationReport.from_issues(issues)


# --- serialization ---


def serialize_config(config: BeatsConfig) -> bytes:
    """Canonical UTF-8 JSON: sorted keys, two-space indent, trailing newline."""
    doc = json.dumps(config_to_dict(config), sort_keys=True, indent=2, ensure_ascii=False)
    return (doc + "\n").encode("utf-8")


def parse_config(data: bytes | str) -> BeatsConfig:
    """Parse and validate a beats configuration document.

    Raises ConfigError with line/column for malformed JSON, a schema error
    for structural problems, and the first validation error otherwise.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    config = config_from_dict(obj)
    report = validate_config(config)
    if not report.ok:
        first = next(i for i in report.issues if i.severity == "error")
        raise ConfigError(f"invalid config: {first.path}: {first.message}", report=report)
    return config


def load_config(path: str | Path) -> BeatsConfig:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(data)


def save_config(config: BeatsConfig, path: str | Path) -> None:
    Path(path).write_bytes(serialize_config(config))


def config_digest(config: BeatsConfig) -> str:
    """Content hash of the authored configuration.

    Measured durations are derived during a run (written back by the
    narrator), so they are normalized out: re-measuring must not move a
    run's artifacts to a new digest-named directory.
    """
    normalized = replace(
        config,
        beats=tuple(replace(b, measured_duration_s=None) for b in config.beats),
    )
    return hashlib.sha256(serialize_config(normalized)).hexdigest()


def narration_text(beat: Beat, mode: Mode) -> str:
    """The text this beat narrates under the given mode."""
    if mode.is_fast:
        if beat.short_text is None:
            if not beat.text.strip():
                return ""
            raise ConfigError(f"beat {beat.id!r} has no short_text for fast mode {mode.value!r}")
        return beat.short_text
    return beat.text
