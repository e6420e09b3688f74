import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from s2r.errors import ConfigError
from s2r.model import (
    Beat,
    BeatsConfig,
    Mode,
    Viewport,
    config_digest,
    config_to_dict,
    parse_config,
    serialize_config,
    validate_config,
)

from conftest import random_valid_config


def minimal_config_doc():
    return {
        "page": "fixtures/five_boxes.html",
        "viewport": {"width_px": 540, "height_px": 960, "device_scale": 1.0},
        "global_start_px": 0.0,
        "global_end_px": 100.0,
        "speaking_rate_wpm": 160.0,
        "fps": 30.0,
        "narration_lead_s": 0.0,
        "mode": "beats-slow",
        "beats": [
            {
                "id": "b1",
                "text": "one beat only",
                "short_text": None,
                "anchor": None,
                "y_start_px": 0.0,
                "y_end_px": 100.0,
                "est_duration_s": 0.0,
                "measured_duration_s": None,
            }
        ],
    }


class TestParseConfig:
    def test_minimal_single_beat(self):
        config = parse_config(json.dumps(minimal_config_doc()))
        assert len(config.beats) == 1
        assert config.beats[0].y_start_px == 0.0
        assert config.beats[0].y_end_px == 100.0

    def test_beats_out_of_order_rejected(self):
        doc = minimal_config_doc()
        doc["global_end_px"] = 200.0
        doc["beats"] = [
            dict(doc["beats"][0], id="b1", y_start_px=100.0, y_end_px=200.0),
            dict(doc["beats"][0], id="b2", y_start_px=0.0, y_end_px=100.0),
        ]
        with pytest.raises(ConfigError, match="not sorted"):
            parse_config(json.dumps(doc))

    def test_fixture_five_beats_slow(self, ammo_config):
        assert len(ammo_config.beats) == 5
        assert ammo_config.mode is Mode.BEATS_SLOW

    def test_malformed_json_reports_position(self):
        with pytest.raises(ConfigError, match=r"line 3"):
            parse_config(b'{\n "page": "x",\n !bad\n}')

    def test_missing_required_field(self):
        doc = minimal_config_doc()
        del doc["viewport"]
        with pytest.raises(ConfigError, match="missing field 'viewport'"):
            parse_config(json.dumps(doc))

    def test_unknown_field_rejected(self):
        doc = minimal_config_doc()
        doc["surprise"] = 1
        with pytest.raises(ConfigError, match="unknown field 'surprise'"):
            parse_config(json.dumps(doc))

    def test_bad_mode_rejected(self):
        doc = minimal_config_doc()
        doc["mode"] = "beats-medium"
        with pytest.raises(ConfigError, match="mode"):
            parse_config(json.dumps(doc))


class TestValidateConfig:
    def _three_beats(self):
        beats = tuple(
            Beat(id=f"b{i}", text=f"beat {i} text", y_start_px=100.0 * i, y_end_px=100.0 * (i + 1))
            for i in range(3)
        )
        return BeatsConfig(
            page="p", viewport=Viewport(), global_start_px=0.0, global_end_px=300.0, beats=beats
        )

    def test_valid_three_beats(self):
        report = validate_config(self._three_beats())
        assert report.ok
        assert report.issues == ()

    def test_overlapping_ranges(self):
        beats = (
            Beat(id="b1", text="t", y_start_px=0.0, y_end_px=200.0),
            Beat(id="b2", text="u", y_start_px=150.0, y_end_px=400.0),
        )
        config = BeatsConfig(
            page="p", viewport=Viewport(), global_start_px=0.0, global_end_px=400.0, beats=beats
        )
        report = validate_config(config)
        assert not report.ok
        assert any("overlap" in i.message for i in report.issues)

    def test_empty_scroll_interval(self):
        config = BeatsConfig(
            page="p",
            viewport=Viewport(),
            global_start_px=100.0,
            global_end_px=100.0,
            beats=(Beat(id="b1", text="t", y_start_px=100.0, y_end_px=100.0),),
        )
        report = validate_config(config)
        assert not report.ok
        assert any("empty scroll interval" in i.message for i in report.issues)

    def test_gap_between_ranges(self):
        beats = (
            Beat(id="b1", text="t", y_start_px=0.0, y_end_px=100.0),
            Beat(id="b2", text="u", y_start_px=150.0, y_end_px=300.0),
        )
        config = BeatsConfig(
            page="p", viewport=Viewport(), global_start_px=0.0, global_end_px=300.0, beats=beats
        )
        assert any("gap" in i.message for i in validate_config(config).issues)

    def test_empty_text_allowed_only_for_holds(self):
        config = self._three_beats()
        bad = config.beats[0]
        config = BeatsConfig(
            page="p",
            viewport=Viewport(),
            global_start_px=0.0,
            global_end_px=300.0,
            beats=(Beat(id="b0", text="  ", y_start_px=0.0, y_end_px=100.0),) + config.beats[1:],
        )
        assert not validate_config(config).ok
        del bad

    def test_ok_iff_no_error_issue(self):
        rng = random.Random(7)
        for _ in range(50):
            config = random_valid_config(rng)
            report = validate_config(config)
            assert report.ok == (not any(i.severity == "error" for i in report.issues))

    def test_tiling_sum_matches_interval(self):
        rng = random.Random(11)
        for _ in range(50):
            config = random_valid_config(rng)
            if validate_config(config).ok:
                span = sum(b.y_end_px - b.y_start_px for b in config.beats)
                assert span == pytest.approx(
                    config.global_end_px - config.global_start_px, abs=1e-6 * len(config.beats)
                )


class TestSerialization:
    def test_round_trip_fixture(self, ammo_config):
        assert parse_config(serialize_config(ammo_config)) == ammo_config

    def test_deterministic_bytes(self, ammo_config):
        assert serialize_config(ammo_config) == serialize_config(ammo_config)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_round_trip_generated(self, seed):
        config = random_valid_config(random.Random(seed))
        assert parse_config(serialize_config(config)) == config

    def test_digest_ignores_measured_durations(self, ammo_config):
        import dataclasses

        measured = dataclasses.replace(
            ammo_config,
            beats=tuple(
                dataclasses.replace(b, measured_duration_s=1.0) for b in ammo_config.beats
            ),
        )
        assert config_digest(measured) == config_digest(ammo_config)
        assert serialize_config(measured) != serialize_config(ammo_config)

    def test_digest_tracks_content(self, ammo_config):
        import dataclasses

        renamed = dataclasses.replace(ammo_config, page="elsewhere.html")
        assert config_digest(renamed) != config_digest(ammo_config)

    def test_schema_key_set(self, ammo_config):
        doc = config_to_dict(ammo_config)
        assert set(doc) == {
            "page", "viewport", "global_start_px", "global_end_px",
            "speaking_rate_wpm", "fps", "narration_lead_s", "mode", "beats",
        }
        assert set(doc["beats"][0]) == {
            "id", "text", "short_text", "anchor", "y_start_px", "y_end_px",
            "est_duration_s", "measured_duration_s",
        }


class TestViewport:
    def test_default_is_9_16(self):
        vp = Viewport()
        assert vp.width_px * 16 == vp.height_px * 9

    def test_zero_width_beat_is_hold(self):
        beat = Beat(id="h", text="", y_start_px=50.0, y_end_px=50.0)
        assert beat.is_hold
