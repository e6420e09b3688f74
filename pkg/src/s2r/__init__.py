"""Scrolly-to-reel retargeting pipeline.

Extracts narrative beats from a scrollytelling page, aligns synthesized
narration with scroll-linked visuals on a constant-speed-per-beat
timeline, and renders a 9:16 reel.
"""

from .model import (
    Beat,
    BeatsConfig,
    Mode,
    ValidationReport,
    Viewport,
    config_digest,
    load_config,
    parse_config,
    save_config,
    serialize_config,
    validate_config,
)
from .timing import (
    FrameSchedule,
    ScrollSegment,
    ScrollTimeline,
    build_timeline,
    estimate_speaking_time,
    position_at,
    retime,
    sample_frames,
    segment_speed,
)

__version__ = "0.1.0"

__all__ = [
    "Beat",
    "BeatsConfig",
    "Mode",
    "ValidationReport",
    "Viewport",
    "config_digest",
    "load_config",
    "parse_config",
    "save_config",
    "serialize_config",
    "validate_config",
    "FrameSchedule",
    "ScrollSegment",
    "ScrollTimeline",
    "build_timeline",
    "estimate_speaking_time",
    "position_at",
    "retime",
    "sample_frames",
    "segment_speed",
    "__version__",
]
