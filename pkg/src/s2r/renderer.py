"""Final assembly: the render manifest and the external muxer call.

The manifest is the acceptance artifact: it ties the frame schedule, the
narration track, and the caption file to one source config digest, and is
serialized deterministically so golden-file comparison is byte-exact.
Video encoding is delegated to ffmpeg; encoders are not bit-stable across
versions, so tests compare manifests, not MP4s.
"""

from __future__ import annotations

import json
import shutil
import subprocess
from dataclasses import dataclass
from pathlib import Path

from .errors import MuxError, StaleInputsError
from .model import BeatsConfig, Mode, Viewport, config_digest
from .narrator import NarrationTrack, vtt_config_digest
from .timing import FrameSchedule

FRAME_PATTERN = "frames/frame_%06d.png"
AUDIO_PATH = "narration.wav"
CAPTIONS_PATH = "captions.vtt"


def frame_path(index: int) -> str:
    return FRAME_PATTERN % index


@dataclass(frozen=True)
class ManifestFrame:
    index: int
    timestamp_s: float
    y_px: float
    path: str


@dataclass(frozen=True)
class RenderManifest:
    fps: float
    viewport: Viewport
    frames: tuple[ManifestFrame, ...]
    audio_path: str
    audio_duration_s: float
    captions_path: str
    mode: Mode
    config_digest: str
    narration_lead_s: float
    total_duration_s: float


def build_manifest(
    schedule: FrameSchedule,
    track: NarrationTrack,
    captions: str,
    config: BeatsConfig,
    narration_lead_s: float = 0.0,
    with_captions: bool = True,
) -> RenderManifest:
    """Tie all run artifacts together, rejecting anything stale.

    Every input must carry the digest of the config it was generated from;
    a mismatch names the offender instead of producing a silently
    misaligned reel.
    """
    digest = config_digest(config)
    if schedule.config_digest != digest:
        raise StaleInputsError("stale inputs: frame schedule was built from a different config")
    if track.config_digest != digest:
        raise StaleInputsError("stale inputs: narration track was built from a different config")
    if with_captions and vtt_config_digest(captions) != digest:
        raise StaleInputsError("stale inputs: captions were built from a different config")

    frames = schedule.frames
    total = frames[-1].timestamp_s
    if abs(track.total_duration_s - total) > 1.0 / schedule.fps:
        raise StaleInputsError(
            f"stale inputs: audio duration {track.total_duration_s:.3f}s differs from "
            f"video duration {total:.3f}s by more than one frame"
        )
    return RenderManifest(
        fps=schedule.fps,
        viewport=config.viewport,
        frames=tuple(
            ManifestFrame(f.index, f.timestamp_s, f.y_px, frame_path(f.index)) for f in frames
        ),
        audio_path=AUDIO_PATH,
        audio_duration_s=track.total_duration_s,
        captions_path=CAPTIONS_PATH if with_captions else "",
        mode=config.mode,
        config_digest=digest,
        narration_lead_s=narration_lead_s,
        total_duration_s=total,
    )


def manifest_to_dict(manifest: RenderManifest) -> dict:
    return {
        "fps": float(manifest.fps),
        "viewport": {
            "width_px": manifest.viewport.width_px,
            "height_px": manifest.viewport.height_px,
            "device_scale": float(manifest.viewport.device_scale),
        },
        "frames": [
            {
                "index": f.index,
                "timestamp_s": f.timestamp_s,
                "y_px": f.y_px,
                "path": f.path,
            }
            for f in manifest.frames
        ],
        "audio_path": manifest.audio_path,
        "audio_duration_s": manifest.audio_duration_s,
        "captions_path": manifest.captions_path,
        "mode": manifest.mode.value,
        "config_digest": manifest.config_digest,
        "narration_lead_s": float(manifest.narration_lead_s),
        "total_duration_s": manifest.total_duration_s,
    }


def manifest_to_json(manifest: RenderManifest) -> bytes:
    doc = json.dumps(manifest_to_dict(manifest), sort_keys=True, indent=2, ensure_ascii=False)
    return (doc + "\n").encode("utf-8")


def manifest_from_dict(obj: dict) -> RenderManifest:
    return RenderManifest(
        fps=float(obj["fps"]),
        viewport=Viewport(
            width_px=obj["viewport"]["width_px"],
            height_px=obj["viewport"]["height_px"],
            device_scale=float(obj["viewport"]["device_scale"]),
        ),
        frames=tuple(
            ManifestFrame(f["index"], float(f["timestamp_s"]), float(f["y_px"]), f["path"])
            for f in obj["frames"]
        ),
        audio_path=obj["audio_path"],
        audio_duration_s=float(obj["audio_duration_s"]),
        captions_path=obj["captions_path"],
        mode=Mode(obj["mode"]),
        config_digest=obj["config_digest"],
        narration_lead_s=float(obj["narration_lead_s"]),
        total_duration_s=float(obj["total_duration_s"]),
    )


def mux_command(
    manifest: RenderManifest,
    run_dir: Path,
    output: Path,
    no_audio: bool = False,
    burn_captions: bool = False,
) -> list[str]:
    """The exact ffmpeg invocation; reconstructable from the manifest alone.

    Output runs to the manifest duration (-t), so container duration stays
    within one frame period of the timeline even with the terminal frame
    appended to the schedule.
    """
    argv = [
        "ffmpeg",
        "-y",
        "-framerate",
        repr(manifest.fps) if manifest.fps != int(manifest.fps) else str(int(manifest.fps)),
        "-i",
        str(run_dir / FRAME_PATTERN),
    ]
    if not no_audio:
        argv += ["-i", str(run_dir / manifest.audio_path)]
    if burn_captions and manifest.captions_path:
        argv += ["-vf", f"subtitles={run_dir / manifest.captions_path}"]
    argv += ["-t", repr(manifest.total_duration_s)]
    argv += ["-c:v", "libx264", "-pix_fmt", "yuv420p"]
    if not no_audio:
        argv += ["-c:a", "aac"]
    argv += ["-movflags", "+faststart", str(output)]
    return argv


def mux_video(
    manifest: RenderManifest,
    run_dir: str | Path,
    output: str | Path,
    no_audio: bool = False,
    burn_captions: bool = False,
) -> Path:
    """Encode the reel: H.264 video from the frame files plus AAC audio."""
    run_dir = Path(run_dir)
    output = Path(output)
    for f in manifest.frames:
        if not (run_dir / f.path).exists():
            raise MuxError(f"missing frame file for index {f.index}: {f.path}")
    if not no_audio and not (run_dir / manifest.audio_path).exists():
        raise MuxError(f"missing audio track: {manifest.audio_path}")

    argv = mux_command(manifest, run_dir, output, no_audio=no_audio, burn_captions=burn_captions)
    if shutil.which(argv[0]) is None:
        raise MuxError(
            "muxer not found on PATH; install ffmpeg. Command attempted: "
            + " ".join(argv)
        )
    proc = subprocess.run(argv, capture_output=True, text=True)
    if proc.returncode != 0:
        raise MuxError(f"muxer exited {proc.returncode}: {proc.stderr.strip()[-500:]}")
    return output


def probe_duration(video: str | Path) -> float:
    """Container-reported duration in seconds, via ffprobe."""
    argv = [
        "ffprobe",
        "-v",
        "error",
        "-show_entries",
        "format=duration",
        "-of",
        "default=noprint_wrappers=1:nokey=1",
        str(video),
    ]
    if shutil.which(argv[0]) is None:
        raise MuxError("ffprobe not found on PATH")
    proc = subprocess.run(argv, capture_output=True, text=True)
    if proc.returncode != 0:
        raise MuxError(f"ffprobe exited {proc.returncode}: {proc.stderr.strip()[-200:]}")
    return float(proc.stdout.strip())
