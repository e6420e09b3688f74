import random

import pytest
from hypothesis import given, settings, strategies as st

from s2r.errors import ConfigError
from s2r.extractor import (
    compute_triggers,
    detect_textboxes,
    load_survey,
    normalize_text,
    selector_matches,
    survey_from_dict,
    survey_to_beats,
    survey_to_dict,
    tile_ranges,
)
from s2r.model import validate_config


class TestTileRanges:
    def test_three_triggers(self):
        assert tile_ranges([100, 400, 900], 100, 1500) == [(100, 400), (400, 900), (900, 1500)]

    def test_single_trigger_snapped_to_start(self):
        assert tile_ranges([250], 0, 1000) == [(0, 1000)]

    def test_duplicate_trigger_yields_hold_range(self):
        # A repeated trigger after the first produces a zero-width range.
        assert tile_ranges([100, 300, 300], 0, 1000) == [(0, 300), (300, 300), (300, 1000)]

    def test_leading_duplicate_folds_into_first_range(self):
        assert tile_ranges([300, 300, 800], 0, 1000) == [(0, 300), (300, 800), (800, 1000)]

    def test_empty_triggers_degenerate_range(self):
        assert tile_ranges([], 0.0, 1000.0) == [(0.0, 1000.0)]

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError, match="sorted"):
            tile_ranges([500, 100], 0, 1000)

    def test_empty_interval_rejected(self):
        with pytest.raises(ValueError, match="less than"):
            tile_ranges([10], 100, 100)

    def test_out_of_interval_triggers_clamped(self):
        assert tile_ranges([-50, 500, 2000], 0, 1000) == [(0, 500), (500, 1000), (1000, 1000)]

    @settings(max_examples=200, deadline=None)
    @given(
        triggers=st.lists(st.floats(-100, 2100, allow_nan=False), max_size=10).map(sorted),
        start=st.floats(0, 500, allow_nan=False),
        span=st.floats(1, 2000, allow_nan=False),
    )
    def test_always_tiles_interval(self, triggers, start, span):
        end = start + span
        ranges = tile_ranges(triggers, start, end)
        assert ranges[0][0] == start
        assert ranges[-1][1] == end
        for (a0, a1), (b0, b1) in zip(ranges, ranges[1:]):
            assert a1 == b0  # gapless and overlap-free
        for y0, y1 in ranges:
            assert y1 >= y0


class TestComputeTriggers:
    def test_fixture_oracle_values(self):
        # Boxes at 600..3800 in a 960px viewport, mid-viewport takeover:
        # trigger = y - 480, first later snapped to the interval start.
        got = compute_triggers([600, 1400, 2200, 3000, 3800], 960, 0.5, 0, 4000)
        assert got == [120, 920, 1720, 2520, 3320]

    def test_anchor_fraction_zero(self):
        assert compute_triggers([600, 1400], 960, 0.0, 0, 4000) == [600, 1400]

    def test_clamped_into_interval(self):
        assert compute_triggers([100, 5000], 960, 0.5, 0, 4000) == [0, 4000]

    def test_bad_fraction_rejected(self):
        with pytest.raises(ValueError):
            compute_triggers([0], 960, 1.5, 0, 100)


class TestSurveyToBeats:
    def test_fixture_five_boxes(self, survey_path):
        survey = load_survey(survey_path)
        config = survey_to_beats(survey, ".overlay", 0, 4000, anchor_fraction=0.5)
        assert [b.id for b in config.beats] == ["beat-1", "beat-2", "beat-3", "beat-4", "beat-5"]
        ranges = [(b.y_start_px, b.y_end_px) for b in config.beats]
        assert ranges == [(0.0, 920.0), (920.0, 1720.0), (1720.0, 2520.0), (2520.0, 3320.0), (3320.0, 4000.0)]
        assert all(b.est_duration_s == 0.0 for b in config.beats)
        assert config.beats[1].text.startswith("Lake City is an Army site")

    def test_output_passes_validation(self, survey_path):
        survey = load_survey(survey_path)
        config = survey_to_beats(survey, ".overlay", 0, 4000)
        assert validate_config(config).ok

    def test_box_beyond_end_plus_viewport_excluded(self, survey_path):
        survey = load_survey(survey_path)
        # End at 2800: the cutoff is 2800+960=3760, excluding the box at 3800.
        config = survey_to_beats(survey, ".overlay", 0, 2800)
        assert len(config.beats) == 4
        assert config.beats[-1].y_end_px == 2800.0

    def test_deterministic(self, survey_path):
        survey = load_survey(survey_path)
        a = survey_to_beats(survey, ".overlay", 0, 4000)
        b = survey_to_beats(survey, ".overlay", 0, 4000)
        assert a == b

    def test_monotone_and_contiguous(self, survey_path):
        survey = load_survey(survey_path)
        config = survey_to_beats(survey, ".overlay", 0, 4000)
        for cur, nxt in zip(config.beats, config.beats[1:]):
            assert nxt.y_start_px == cur.y_end_px

    def test_no_match_raises(self, survey_path):
        survey = load_survey(survey_path)
        with pytest.raises(ConfigError, match=r"no text boxes found.*\.nothing"):
            survey_to_beats(survey, ".nothing", 0, 4000)

    def test_none_selector_uses_heuristic(self, survey_path):
        survey = load_survey(survey_path)
        config = survey_to_beats(survey, None, 0, 4000)
        assert len(config.beats) == 5


class TestDetectTextboxes:
    def test_fixture_returns_exactly_the_overlays(self, survey_path):
        survey = load_survey(survey_path)
        assert detect_textboxes(survey) == [
            "div#beat-1.overlay",
            "div#beat-2.overlay",
            "div#beat-3.overlay",
            "div#beat-4.overlay",
            "div#beat-5.overlay",
        ]

    def test_static_only_survey_is_empty(self, survey_path):
        survey = load_survey(survey_path)
        static_only = survey_from_dict(
            {
                **survey_to_dict(survey),
                "elements": [
                    e for e in survey_to_dict(survey)["elements"] if e["positioning"] == "static"
                ],
            }
        )
        assert detect_textboxes(static_only) == []

    def test_sticky_and_fixed_sorted_by_y(self, survey_path):
        survey = load_survey(survey_path)
        doc = survey_to_dict(survey)
        doc["elements"] = [
            {
                "selector": "div#cap-b.caption",
                "text": "later caption",
                "box": {"x": 0.0, "y": 900.0, "width": 300.0, "height": 40.0},
                "positioning": "fixed",
                "z_layer": 0,
            },
            {
                "selector": "div#cap-a.caption",
                "text": "early caption",
                "box": {"x": 0.0, "y": 100.0, "width": 300.0, "height": 40.0},
                "positioning": "sticky",
                "z_layer": 0,
            },
        ]
        assert detect_textboxes(survey_from_dict(doc)) == ["div#cap-a.caption", "div#cap-b.caption"]


class TestSelectorMatching:
    @pytest.mark.parametrize(
        "query,selector,expected",
        [
            (".overlay", "div#beat-1.overlay", True),
            ("#beat-1", "div#beat-1.overlay", True),
            ("div", "div#beat-1.overlay", True),
            ("div.overlay", "div#beat-1.overlay", True),
            (".overlay", "body > div.story > p.caption:nth-of-type(3)", False),
            ("p.caption", "body > div.story > p.caption:nth-of-type(3)", True),
            ("#other", "div#beat-1.overlay", False),
            ("span", "div#beat-1.overlay", False),
        ],
    )
    def test_simple_queries(self, query, selector, expected):
        assert selector_matches(query, selector) is expected


class TestNormalizeText:
    def test_collapses_runs_and_trims(self):
        assert normalize_text("  a\n\t b   c ") == "a b c"

    def test_empty(self):
        assert normalize_text(" \n ") == ""


class TestSurveyInterchange:
    def test_round_trip(self, survey_path):
        survey = load_survey(survey_path)
        assert survey_from_dict(survey_to_dict(survey)) == survey

    def test_malformed_rejected(self):
        with pytest.raises(ConfigError, match="malformed page survey"):
            survey_from_dict({"page": "x"})


def test_survey_to_beats_random_surveys_always_validate(survey_path):
    rng = random.Random(3)
    survey = load_survey(survey_path)
    for _ in range(25):
        start = rng.uniform(0, 500)
        end = start + rng.uniform(600, 4000)
        config = survey_to_beats(survey, ".overlay", start, end)
        assert validate_config(config).ok
