"""Command-line entry point wiring the pipeline stages.

Subcommands: extract, shorten, plan, narrate, record, render, variants,
preview. Each stage failure maps to its own exit code (2 config,
10 browser, 20 LLM, 30 TTS, 40 mux) so CI scripts can triage without
parsing stderr. Artifacts for a run live under one digest-named run
directory, so reruns with identical inputs land in the same place.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import browser as bridge
from .errors import S2RError, ConfigError
from .extractor import load_survey, selector_matches, survey_to_beats
from .model import (
    BeatsConfig,
    Mode,
    Viewport,
    config_digest,
    load_config,
    save_config,
    serialize_config,
)
from .narrator import (
    build_captions,
    concat_clips,
    engine_from_name,
    pad_to_timeline,
    synthesize_track,
)
from .renderer import build_manifest, manifest_to_json, mux_video
from .scriptwriter import FallbackOnlyClient, HttpChatClient, make_variants, shorten_beats
from .server import config_in_mode, serve
from .timing import (
    estimate_speaking_time,
    retime,
    sample_frames,
    scroll_timeline,
    timeline_to_json,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunContext:
    """Where one pipeline run reads inputs and writes artifacts."""

    config_path: Path
    run_dir: Path
    verbosity: int = 0


def run_context(config_path: str | Path, config: BeatsConfig, workdir: str | None, verbosity: int = 0) -> RunContext:
    config_path = Path(config_path)
    base = Path(workdir) if workdir else config_path.resolve().parent / "runs"
    run_dir = base / config_digest(config)[:12]
    run_dir.mkdir(parents=True, exist_ok=True)
    return RunContext(config_path=config_path, run_dir=run_dir, verbosity=verbosity)


def parse_viewport(spec: str) -> Viewport:
    """Parse WxH or WxH@SCALE, e.g. 540x960 or 540x960@2."""
    scale = 1.0
    if "@" in spec:
        spec, scale_raw = spec.split("@", 1)
        try:
            scale = float(scale_raw)
        except ValueError:
            raise ConfigError(f"bad viewport scale {scale_raw!r}") from None
    try:
        w, h = spec.lower().split("x")
        return Viewport(width_px=int(w), height_px=int(h), device_scale=scale)
    except ValueError:
        raise ConfigError(f"bad viewport {spec!r}; expected WxH like 540x960") from None


def resolve_anchor(value: str, survey) -> float:
    """A start/end anchor is a pixel number or a selector resolved to a box top."""
    try:
        return float(value)
    except ValueError:
        pass
    matches = sorted(
        (el for el in survey.elements if selector_matches(value, el.selector)),
        key=lambda el: el.box.y,
    )
    if not matches:
        raise ConfigError(f"anchor selector {value!r} matches nothing in the survey")
    return matches[0].box.y


def _chat_client(use_llm: bool):
    if use_llm:
        return HttpChatClient()
    if os.environ.get("S2R_LLM_API_KEY"):
        return HttpChatClient()
    logger.warning("no LLM configured; using the deterministic fallback shortener")
    return FallbackOnlyClient()


def _needs_short_text(config: BeatsConfig) -> bool:
    return any(b.short_text is None for b in config.beats if b.text.strip())


def _hide_selectors(config: BeatsConfig) -> list[str]:
    return [b.anchor for b in config.beats if b.anchor]


def _print_beat_table(config: BeatsConfig) -> None:
    print(f"{'id':<12} {'y_start':>9} {'y_end':>9} {'words':>6} {'est_s':>7}  text")
    for b in config.beats:
        est = estimate_speaking_time(b.text, config.speaking_rate_wpm)
        preview = b.text if len(b.text) <= 48 else b.text[:45] + "..."
        print(f"{b.id:<12} {b.y_start_px:>9.1f} {b.y_end_px:>9.1f} {len(b.text.split()):>6} {est:>7.2f}  {preview}")


def _open_session(args, viewport: Viewport) -> bridge.BrowserSession:
    return bridge.open_page(
        args.url,
        viewport,
        devtools_url=getattr(args, "devtools_url", None),
        browser_path=os.environ.get("S2R_BROWSER_PATH"),
    )


# --- subcommands ---


def cmd_extract(args) -> int:
    viewport = parse_viewport(args.viewport)
    if args.survey:
        survey = load_survey(args.survey)
    else:
        session = _open_session(args, viewport)
        try:
            survey = bridge.survey_page(session, args.selector)
        finally:
            bridge.close_session(session)

    if args.selector is None:
        from .extractor import detect_textboxes

        candidates = detect_textboxes(survey)
        print("auto-detected text boxes:")
        for sel in candidates:
            print(f"  {sel}")

    start = resolve_anchor(args.start, survey)
    end = resolve_anchor(args.end, survey)
    config = survey_to_beats(
        survey,
        args.selector,
        start,
        end,
        anchor_fraction=args.anchor_fraction,
    )
    save_config(config, args.out)
    _print_beat_table(config)
    print(f"wrote {args.out} ({len(config.beats)} beats)")
    return 0


def cmd_shorten(args) -> int:
    config = load_config(args.config)
    shortened, result = shorten_beats(config, _chat_client(args.llm))
    out = args.out or args.config
    save_config(shortened, out)
    print(f"wrote {out} (source={result.source}, attempts={result.attempts})")
    return 0


def cmd_plan(args) -> int:
    config = load_config(args.config)
    if args.mode:
        config = config_in_mode(config, Mode(args.mode))
    # Lead 0 unless asked: plan shows the narration-aligned timeline, the
    # same document GET /api/timeline serves.
    data = timeline_to_json(scroll_timeline(config, lead_s=args.lead if args.lead is not None else 0.0))
    if args.out:
        Path(args.out).write_bytes(data)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(data.decode("utf-8"))
    return 0


def cmd_narrate(args) -> int:
    config = load_config(args.config)
    ctx = run_context(args.config, config, args.workdir)
    engine = engine_from_name(args.engine)
    updated, track = synthesize_track(config, engine, ctx.run_dir)
    save_config(updated, args.config)
    print(f"narrated {len(track.clips)} beats into {ctx.run_dir / 'audio'} "
          f"(total {track.total_duration_s:.2f}s); measured durations written back")
    return 0


def cmd_record(args) -> int:
    config = load_config(args.config)
    ctx = run_context(args.config, config, args.workdir)
    lead = args.lead if args.lead is not None else config.narration_lead_s
    timeline = scroll_timeline(config, lead_s=lead)
    schedule = sample_frames(timeline, config.fps)
    session = _open_session_for_config(args, config)
    try:
        hidden = bridge.hide_textboxes(session, _hide_selectors(config))
        frames = bridge.capture_frames(session, schedule, ctx.run_dir)
    finally:
        bridge.close_session(session)
    print(f"hid {hidden} text boxes; captured {len(frames)} frames into {ctx.run_dir / 'frames'}")
    return 0


def _open_session_for_config(args, config: BeatsConfig) -> bridge.BrowserSession:
    return bridge.open_page(
        config.page,
        config.viewport,
        devtools_url=getattr(args, "devtools_url", None),
        browser_path=os.environ.get("S2R_BROWSER_PATH"),
    )


def cmd_render(args) -> int:
    config = load_config(args.config)
    ctx = run_context(args.config, config, args.workdir)
    lead = args.lead if args.lead is not None else config.narration_lead_s

    engine = engine_from_name(args.engine)
    updated, track = synthesize_track(config, engine, ctx.run_dir)
    save_config(updated, ctx.run_dir / "config.json")
    measured = {b.id: b.measured_duration_s for b in updated.beats}

    narration = retime(config, measured, lead_s=0.0)
    scroll = retime(config, measured, lead_s=lead)
    schedule = sample_frames(scroll, config.fps)

    padded = pad_to_timeline(track, narration)
    final_track = concat_clips(padded, ctx.run_dir / "narration.wav")
    captions = build_captions(config, narration)
    (ctx.run_dir / "captions.vtt").write_text(captions, encoding="utf-8")

    manifest = build_manifest(schedule, final_track, captions, config, narration_lead_s=lead)
    manifest_path = ctx.run_dir / "manifest.json"
    manifest_path.write_bytes(manifest_to_json(manifest))

    if args.dry_run:
        print(f"dry run: wrote {manifest_path} ({len(manifest.frames)} frames, "
              f"{manifest.total_duration_s:.2f}s); no browser launched")
        return 0

    session = _open_session_for_config(args, config)
    try:
        bridge.hide_textboxes(session, _hide_selectors(config))
        bridge.capture_frames(session, schedule, ctx.run_dir)
    finally:
        bridge.close_session(session)

    out = ctx.run_dir / "reel.mp4"
    mux_video(manifest, ctx.run_dir, out, no_audio=args.no_audio)
    print(f"wrote {out} and {manifest_path}")
    return 0


def _variant_stem(config_path: Path) -> Path:
    stem = config_path.stem
    if stem.endswith(".beats"):
        stem = stem[: -len(".beats")]
    return config_path.parent / stem


def cmd_variants(args) -> int:
    config = load_config(args.config)
    if _needs_short_text(config):
        config, result = shorten_beats(config, _chat_client(args.llm))
        if result.source == "fallback" and args.llm:
            logger.warning("LLM shortening failed after %d attempts; used fallback", result.attempts)
    stem = _variant_stem(Path(args.config))
    for mode, variant in make_variants(config).items():
        out = Path(f"{stem}.{mode.value}.json")
        save_config(variant, out)
        print(f"wrote {out} ({len(variant.beats)} beats)")
    return 0


def cmd_preview(args) -> int:
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    serve(args.config, port=args.port, ui_dir=ui_dir)
    return 0


# --- argument parsing ---


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="s2r",
        description="Retarget a scrollytelling page into a narrated 9:16 reel.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="increase log verbosity")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="survey a page and write a tiled beats config")
    p.add_argument("--url", required=True, help="page URL or local HTML path")
    p.add_argument("--selector", default=None, help="text-box selector (omit to auto-detect)")
    p.add_argument("--start", required=True, help="start anchor: pixel offset or selector")
    p.add_argument("--end", required=True, help="end anchor: pixel offset or selector")
    p.add_argument("--viewport", default="540x960", help="WxH or WxH@SCALE (default 540x960)")
    p.add_argument("--anchor-fraction", type=float, default=0.5,
                   help="viewport fraction at which a box takes over (default 0.5)")
    p.add_argument("--survey", default=None, help="recorded survey JSON instead of a live browser")
    p.add_argument("--devtools-url", default=None, help="attach to a running browser instead of launching")
    p.add_argument("-o", "--out", default="beats.json", help="output config path")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("shorten", help="fill short_text on every beat")
    p.add_argument("--config", required=True)
    p.add_argument("--llm", action="store_true", help="use the configured chat-completion endpoint")
    p.add_argument("-o", "--out", default=None, help="output path (default: in place)")
    p.set_defaults(func=cmd_shorten)

    p = sub.add_parser("plan", help="print the scroll timeline as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    p.add_argument("--lead", type=float, default=None, help="visual lead ahead of narration, seconds")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("narrate", help="synthesize narration clips and measure durations")
    p.add_argument("--config", required=True)
    p.add_argument("--engine", choices=["auto", "mock", "cmd", "http"], default="auto")
    p.add_argument("--workdir", default=None, help="base directory for run artifacts")
    p.set_defaults(func=cmd_narrate)

    p = sub.add_parser("record", help="capture frames by executing the schedule in a browser")
    p.add_argument("--config", required=True)
    p.add_argument("--lead", type=float, default=None)
    p.add_argument("--workdir", default=None)
    p.add_argument("--devtools-url", default=None)
    p.set_defaults(func=cmd_record)

    p = sub.add_parser("render", help="full pipeline: narrate, retime, capture, mux")
    p.add_argument("--config", required=True)
    p.add_argument("--engine", choices=["auto", "mock", "cmd", "http"], default="auto")
    p.add_argument("--lead", type=float, default=None)
    p.add_argument("--dry-run", action="store_true", help="write the manifest only; no browser")
    p.add_argument("--no-audio", action="store_true", help="mux a silent video")
    p.add_argument("--workdir", default=None)
    p.add_argument("--devtools-url", default=None)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("variants", help="write the four pacing/alignment variant configs")
    p.add_argument("--config", required=True)
    p.add_argument("--llm", action="store_true", help="shorten via the chat-completion endpoint")
    p.set_defaults(func=cmd_variants)

    p = sub.add_parser("preview", help="serve the editor UI and local HTTP API")
    p.add_argument("--config", required=True)
    p.add_argument("--port", type=int, default=8137)
    p.add_argument("--ui-dir", default=None, help="override the packaged UI assets directory")
    p.set_defaults(func=cmd_preview)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except S2RError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
