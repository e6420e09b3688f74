import dataclasses
import shutil

import pytest

from s2r.errors import MuxError, StaleInputsError
from s2r.model import config_digest
from s2r.narrator import (
    MockSpeechEngine,
    NarrationTrack,
    build_captions,
    concat_clips,
    pad_to_timeline,
    synthesize_track,
)
from s2r.renderer import (
    build_manifest,
    frame_path,
    manifest_from_dict,
    manifest_to_dict,
    manifest_to_json,
    mux_command,
    mux_video,
)
from s2r.timing import retime, sample_frames


def dry_pipeline(config, out_dir):
    updated, track = synthesize_track(config, MockSpeechEngine(), out_dir)
    measured = {b.id: b.measured_duration_s for b in updated.beats}
    narration = retime(config, measured, 0.0)
    scroll = retime(config, measured, config.narration_lead_s)
    schedule = sample_frames(scroll, config.fps)
    padded = pad_to_timeline(track, narration)
    final = concat_clips(padded, out_dir / "narration.wav")
    captions = build_captions(config, narration)
    manifest = build_manifest(
        schedule, final, captions, config, narration_lead_s=config.narration_lead_s
    )
    return manifest, schedule, final, captions


class TestBuildManifest:
    def test_fixture_pipeline_manifest(self, ammo_config, tmp_path):
        manifest, schedule, final, _ = dry_pipeline(ammo_config, tmp_path)
        assert manifest.config_digest == config_digest(ammo_config)
        assert len(manifest.frames) == len(schedule.frames)
        assert manifest.audio_duration_s == final.total_duration_s
        assert manifest.frames[0].path == "frames/frame_000000.png"
        assert manifest.frames[-1].y_px == ammo_config.global_end_px

    def test_manifest_bytes_deterministic_across_runs(self, ammo_config, tmp_path):
        m1, *_ = dry_pipeline(ammo_config, tmp_path / "a")
        m2, *_ = dry_pipeline(ammo_config, tmp_path / "b")
        assert manifest_to_json(m1) == manifest_to_json(m2)

    def test_matches_golden(self, ammo_config, tmp_path, golden_dir, survey_path):
        from s2r.extractor import load_survey, survey_to_beats

        survey = load_survey(survey_path)
        config = survey_to_beats(survey, ".overlay", 0, 4000)
        manifest, *_ = dry_pipeline(config, tmp_path)
        assert manifest_to_json(manifest) == (golden_dir / "five_boxes.manifest.json").read_bytes()

    def test_stale_schedule_rejected(self, ammo_config, tmp_path):
        _, schedule, final, captions = dry_pipeline(ammo_config, tmp_path)
        other = dataclasses.replace(ammo_config, page="another.html")
        with pytest.raises(StaleInputsError, match="frame schedule"):
            build_manifest(schedule, final, captions, other)

    def test_stale_track_rejected(self, ammo_config, tmp_path):
        _, schedule, final, captions = dry_pipeline(ammo_config, tmp_path)
        impostor = dataclasses.replace(final, config_digest="0" * 64)
        with pytest.raises(StaleInputsError, match="narration track"):
            build_manifest(schedule, impostor, captions, ammo_config)

    def test_stale_captions_rejected(self, ammo_config, tmp_path):
        _, schedule, final, _ = dry_pipeline(ammo_config, tmp_path)
        with pytest.raises(StaleInputsError, match="captions"):
            build_manifest(schedule, final, "WEBVTT\n\nNOTE source-config beef\n", ammo_config)

    def test_audio_shorter_than_video_rejected(self, ammo_config, tmp_path):
        _, schedule, final, captions = dry_pipeline(ammo_config, tmp_path)
        short = NarrationTrack(
            clips=final.clips,
            total_duration_s=final.total_duration_s - 1.0,
            path=final.path,
            config_digest=final.config_digest,
        )
        with pytest.raises(StaleInputsError, match="audio duration"):
            build_manifest(schedule, short, captions, ammo_config)

    def test_captionless_render_allowed(self, ammo_config, tmp_path):
        _, schedule, final, _ = dry_pipeline(ammo_config, tmp_path)
        manifest = build_manifest(schedule, final, "", ammo_config, with_captions=False)
        assert manifest.captions_path == ""

    def test_round_trip_dict(self, ammo_config, tmp_path):
        manifest, *_ = dry_pipeline(ammo_config, tmp_path)
        assert manifest_from_dict(manifest_to_dict(manifest)) == manifest


class TestMuxCommand:
    def test_reconstructable_from_manifest(self, ammo_config, tmp_path):
        manifest, *_ = dry_pipeline(ammo_config, tmp_path)
        argv = mux_command(manifest, tmp_path, tmp_path / "reel.mp4")
        assert argv[0] == "ffmpeg"
        assert "-framerate" in argv and argv[argv.index("-framerate") + 1] == "30"
        assert "-t" in argv and argv[argv.index("-t") + 1] == repr(manifest.total_duration_s)
        assert str(tmp_path / "frames/frame_%06d.png") in argv
        assert "yuv420p" in argv

    def test_no_audio_drops_audio_input(self, ammo_config, tmp_path):
        manifest, *_ = dry_pipeline(ammo_config, tmp_path)
        argv = mux_command(manifest, tmp_path, tmp_path / "reel.mp4", no_audio=True)
        assert str(tmp_path / "narration.wav") not in argv
        assert "aac" not in argv


class TestMuxVideo:
    def test_missing_frame_names_index(self, ammo_config, tmp_path):
        manifest, *_ = dry_pipeline(ammo_config, tmp_path)
        with pytest.raises(MuxError, match="index 0"):
            mux_video(manifest, tmp_path, tmp_path / "reel.mp4")

    def test_missing_muxer_reports_exact_command(self, ammo_config, tmp_path, monkeypatch):
        manifest, *_ = dry_pipeline(ammo_config, tmp_path)
        frames_dir = tmp_path / "frames"
        frames_dir.mkdir()
        from fake_cdp import make_png

        png = make_png(540, 960)
        for f in manifest.frames:
            (tmp_path / f.path).write_bytes(png)
        monkeypatch.setattr(shutil, "which", lambda name: None)
        with pytest.raises(MuxError, match="ffmpeg .*-framerate"):
            mux_video(manifest, tmp_path, tmp_path / "reel.mp4")

    @pytest.mark.skipif(shutil.which("ffmpeg") is None, reason="ffmpeg not installed")
    def test_real_mux_duration(self, ammo_config, tmp_path):
        from s2r.renderer import probe_duration
        from fake_cdp import make_png

        manifest, *_ = dry_pipeline(ammo_config, tmp_path)
        png = make_png(540, 960)
        for f in manifest.frames:
            (tmp_path / f.path).parent.mkdir(exist_ok=True)
            (tmp_path / f.path).write_bytes(png)
        out = mux_video(manifest, tmp_path, tmp_path / "reel.mp4")
        assert abs(probe_duration(out) - manifest.total_duration_s) <= 0.1


def test_frame_path_padding():
    assert frame_path(7) == "frames/frame_000007.png"
    assert frame_path(123456) == "frames/frame_123456.png"
