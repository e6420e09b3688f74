"""Narration track synthesis and the caption track mirroring beat alignment.

Audio is synthesized offline per beat so true clip durations exist before
capture (enabling retiming) and muxing is deterministic. Internal format
is fixed at mono 16-bit 44100 Hz WAV: clips concatenate and pad without
resampling.
"""

from __future__ import annotations

import hashlib
import io
import math
import os
import shlex
import subprocess
import tempfile
import wave
from dataclasses import dataclass, replace
from pathlib import Path

import requests

from .errors import TtsError
from .model import BeatsConfig, config_digest, narration_text
from .timing import ScrollTimeline, estimate_speaking_time

SAMPLE_RATE = 44100
SAMPLE_WIDTH = 2  # bytes, 16-bit PCM
CHANNELS = 1

# The mock engine never emits a zero-length clip, even for empty text.
MOCK_FLOOR_S = 0.4
MOCK_RATE_WPM = 160.0


@dataclass(frozen=True)
class AudioClip:
    beat_id: str
    path: Path
    duration_s: float


@dataclass(frozen=True)
class NarrationTrack:
    clips: tuple[AudioClip, ...]
    total_duration_s: float
    path: Path | None = None  # set once clips are concatenated
    config_digest: str | None = None


def _write_wav(path: Path, frames: bytes) -> None:
    with wave.open(str(path), "wb") as w:
        w.setnchannels(CHANNELS)
        w.setsampwidth(SAMPLE_WIDTH)
        w.setframerate(SAMPLE_RATE)
        w.writeframes(frames)


def read_wav_info(path: Path) -> tuple[int, float]:
    """(frame count, duration in seconds) of a clip, validating the format."""
    try:
        with wave.open(str(path), "rb") as w:
            if w.getnchannels() != CHANNELS or w.getsampwidth() != SAMPLE_WIDTH \
                    or w.getframerate() != SAMPLE_RATE:
                raise TtsError(
                    f"{path}: expected mono 16-bit {SAMPLE_RATE} Hz WAV, got "
                    f"{w.getnchannels()}ch {8 * w.getsampwidth()}-bit {w.getframerate()} Hz"
                )
            n = w.getnframes()
    except (wave.Error, EOFError) as exc:
        raise TtsError(f"{path}: not a readable WAV file: {exc}") from None
    return n, n / SAMPLE_RATE


class MockSpeechEngine:
    """Deterministic stand-in: a short marker tone, then silence.

    Clip length is the speaking-time estimate at a fixed rate, floored so
    even empty text produces audible-length output. Identical text always
    yields identical bytes.
    """

    def __init__(self, rate_wpm: float = MOCK_RATE_WPM, floor_s: float = MOCK_FLOOR_S):
        self.rate_wpm = rate_wpm
        self.floor_s = floor_s

    def synthesize(self, text: str) -> bytes:
        duration = max(self.floor_s, estimate_speaking_time(text, self.rate_wpm))
        n_frames = round(duration * SAMPLE_RATE)
        tone_frames = min(n_frames, round(0.1 * SAMPLE_RATE))
        # Tone pitch varies with the text so clips are distinguishable by ear.
        seed = int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:2], "big")
        freq = 220.0 + (seed % 440)
        samples = bytearray()
        for k in range(tone_frames):
            v = int(0.2 * 32767 * math.sin(2 * math.pi * freq * k / SAMPLE_RATE))
            samples += v.to_bytes(2, "little", signed=True)
        samples += b"\x00\x00" * (n_frames - tone_frames)
        buf = io.BytesIO()
        with wave.open(buf, "wb") as w:
            w.setnchannels(CHANNELS)
            w.setsampwidth(SAMPLE_WIDTH)
            w.setframerate(SAMPLE_RATE)
            w.writeframes(bytes(samples))
        return buf.getvalue()


class CommandSpeechEngine:
    """Runs a system TTS tool from a command template.

    The template contains {text} and {out} placeholders, e.g.
    ``espeak-ng -w {out} {text}``. The tool must write a mono 16-bit
    44100 Hz WAV to {out}.
    """

    def __init__(self, template: str | None = None):
        self.template = template or os.environ.get("S2R_TTS_CMD")
        if not self.template:
            raise TtsError("no TTS command template: set S2R_TTS_CMD")
        if "{text}" not in self.template or "{out}" not in self.template:
            raise TtsError("S2R_TTS_CMD must contain {text} and {out} placeholders")

    def synthesize(self, text: str) -> bytes:
        with tempfile.TemporaryDirectory(prefix="s2r-tts-") as tmp:
            out = Path(tmp) / "clip.wav"
            argv = [
                part.replace("{text}", text).replace("{out}", str(out))
                for part in shlex.split(self.template)
            ]
            try:
                proc = subprocess.run(argv, capture_output=True, text=True, timeout=120)
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise TtsError(f"TTS command failed: {exc}") from None
            if proc.returncode != 0:
                raise TtsError(f"TTS command exited {proc.returncode}: {proc.stderr.strip()[:200]}")
            if not out.exists():
                raise TtsError("TTS command produced no output file")
            return out.read_bytes()


class HttpSpeechEngine:
    """POSTs {"text": ...} to an HTTP TTS service returning WAV bytes."""

    def __init__(self, url: str | None = None, timeout_s: float = 120.0):
        self.url = url or os.environ.get("S2R_TTS_URL")
        if not self.url:
            raise TtsError("no TTS service URL: set S2R_TTS_URL")
        self.timeout_s = timeout_s

    def synthesize(self, text: str) -> bytes:
        try:
            resp = requests.post(self.url, json={"text": text}, timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise TtsError(f"TTS request failed: {exc}") from None
        if resp.status_code != 200:
            raise TtsError(f"TTS service returned {resp.status_code}")
        return resp.content


def engine_from_name(name: str):
    """Resolve an engine: explicit name, or "auto" from the environment."""
    if name == "mock":
        return MockSpeechEngine()
    if name == "cmd":
        return CommandSpeechEngine()
    if name == "http":
        return HttpSpeechEngine()
    if name == "auto":
        if os.environ.get("S2R_TTS_CMD"):
            return CommandSpeechEngine()
        if os.environ.get("S2R_TTS_URL"):
            return HttpSpeechEngine()
        return MockSpeechEngine()
    raise TtsError(f"unknown speech engine {name!r}")


def synthesize_track(
    config: BeatsConfig, engine, out_dir: str | Path
) -> tuple[BeatsConfig, NarrationTrack]:
    """One clip per beat under out_dir/audio, durations measured from disk.

    Returns the config with measured_duration_s written back per beat
    (ready for retiming) alongside the track. Fails whole: an engine error
    on any beat aborts with that beat named, leaving no partial track.
    """
    audio_dir = Path(out_dir) / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)
    digest = config_digest(config)
    clips = []
    measured: dict[str, float] = {}
    for beat in config.beats:
        text = narration_text(beat, config.mode)
        try:
            data = engine.synthesize(text)
        except TtsError as exc:
            raise TtsError(f"speech synthesis failed on beat {beat.id!r}: {exc}") from None
        path = audio_dir / f"{beat.id}.wav"
        path.write_bytes(data)
        n_frames, duration = read_wav_info(path)
        if n_frames == 0 and text.strip():
            raise TtsError(f"engine produced an empty clip for beat {beat.id!r}")
        clips.append(AudioClip(beat_id=beat.id, path=path, duration_s=duration))
        measured[beat.id] = duration
    updated = replace(
        config,
        beats=tuple(replace(b, measured_duration_s=measured[b.id]) for b in config.beats),
    )
    track = NarrationTrack(
        clips=tuple(clips),
        total_duration_s=sum(c.duration_s for c in clips),
        config_digest=digest,
    )
    return updated, track


def pad_to_timeline(track: NarrationTrack, timeline: ScrollTimeline) -> NarrationTrack:
    """Pad each clip with trailing silence to exactly its segment length.

    Padding targets cumulative sample counts, so the padded track length
    matches the timeline duration within one sample instead of drifting.
    A clip longer than its segment means the timeline is stale: rerun
    retiming with the measured durations.
    """
    by_id = {c.beat_id: c for c in track.clips}
    seg_ids = [s.beat_id for s in timeline.segments]
    if sorted(by_id) != sorted(seg_ids):
        raise TtsError("clips and segments do not correspond 1:1 by beat id")

    padded = []
    cumulative = 0
    for seg in timeline.segments:
        clip = by_id[seg.beat_id]
        target_end = round(seg.t_end_s * SAMPLE_RATE)
        allotted = target_end - cumulative
        n_frames, _ = read_wav_info(clip.path)
        if n_frames > allotted:
            raise TtsError(
                f"narration overruns segment for beat {seg.beat_id!r} "
                f"({n_frames / SAMPLE_RATE:.3f}s > {allotted / SAMPLE_RATE:.3f}s); "
                "stale timeline, rerun retiming"
            )
        out_path = clip.path.with_suffix(".padded.wav")
        with wave.open(str(clip.path), "rb") as r:
            frames = r.readframes(n_frames)
        _write_wav(out_path, frames + b"\x00" * (SAMPLE_WIDTH * (allotted - n_frames)))
        padded.append(AudioClip(beat_id=seg.beat_id, path=out_path, duration_s=allotted / SAMPLE_RATE))
        cumulative = target_end
    return NarrationTrack(
        clips=tuple(padded),
        total_duration_s=cumulative / SAMPLE_RATE,
        config_digest=track.config_digest,
    )


def concat_clips(track: NarrationTrack, out_path: str | Path) -> NarrationTrack:
    """Concatenate clips into one WAV for muxing."""
    out_path = Path(out_path)
    frames = bytearray()
    for clip in track.clips:
        with wave.open(str(clip.path), "rb") as r:
            frames += r.readframes(r.getnframes())
    _write_wav(out_path, bytes(frames))
    total = len(frames) // SAMPLE_WIDTH / SAMPLE_RATE
    return NarrationTrack(
        clips=track.clips,
        total_duration_s=total,
        path=out_path,
        config_digest=track.config_digest,
    )


# --- captions ---


def format_vtt_timestamp(seconds: float) -> str:
    """Fixed-point cue timestamp: MM:SS.mmm, with hours once they appear."""
    ms = round(seconds * 1000)
    h, rem = divmod(ms, 3_600_000)
    m, rem = divmod(rem, 60_000)
    s, ms = divmod(rem, 1000)
    if h:
        return f"{h:02d}:{m:02d}:{s:02d}.{ms:03d}"
    return f"{m:02d}:{s:02d}.{ms:03d}"


def build_captions(config: BeatsConfig, timeline: ScrollTimeline) -> str:
    """WebVTT document with one cue per narrating beat.

    Cue intervals equal timeline segment intervals, making alignment a
    machine-checkable property of the artifact. Hold beats with nothing to
    say emit no cue.
    """
    digest = timeline.config_digest or config_digest(config)
    texts = {b.id: narration_text(b, config.mode) for b in config.beats}
    lines = ["WEBVTT", "", f"NOTE source-config {digest}", ""]
    for seg in timeline.segments:
        text = texts.get(seg.beat_id, "").strip()
        if not text:
            continue
        lines.append(seg.beat_id)
        lines.append(
            f"{format_vtt_timestamp(seg.t_start_s)} --> {format_vtt_timestamp(seg.t_end_s)}"
        )
        lines.append(text)
        lines.append("")
    return "\n".join(lines)


def parse_vtt_cues(document: str) -> list[tuple[str, str, str, str]]:
    """(cue id, start, end, text) per cue; the testing-side view of a VTT file."""
    cues = []
    blocks = [b for b in document.split("\n\n") if b.strip()]
    for block in blocks:
        rows = block.strip().split("\n")
        for i, row in enumerate(rows):
            if " --> " in row:
                cue_id = rows[i - 1] if i > 0 and not rows[i - 1].startswith(("WEBVTT", "NOTE")) else ""
                start, end = row.split(" --> ")
                cues.append((cue_id, start.strip(), end.strip(), "\n".join(rows[i + 1:])))
                break
    return cues


def vtt_config_digest(document: str) -> str | None:
    for line in document.splitlines():
        if line.startswith("NOTE source-config "):
            return line.split()[-1]
    return None
