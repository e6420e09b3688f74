import json

import pytest

import s2r.browser as bridge
from s2r.errors import BrowserError
from s2r.extractor import survey_from_dict
from s2r.model import Viewport
from s2r.timing import Frame, FrameSchedule

from fake_cdp import FakeCdpServer, make_png

STUB_AGENT = "window['__S2R_AGENT_NS__'] = { stub: true };"


@pytest.fixture()
def fast_quiet(monkeypatch):
    monkeypatch.setattr(bridge, "NETWORK_QUIET_S", 0.05)


@pytest.fixture()
def survey_doc(survey_path):
    return json.loads(survey_path.read_text(encoding="utf-8"))


@pytest.fixture()
def cdp(survey_doc):
    server = FakeCdpServer(survey_doc)
    yield server
    server.close()


def open_fixture_page(cdp, viewport=None):
    return bridge.open_page(
        "fixtures/five_boxes.html",
        viewport or Viewport(),
        agent=STUB_AGENT,
        ws_url=cdp.ws_url,
        timeout_s=5.0,
    )


def small_schedule(ys, fps=5.0):
    frames = tuple(
        Frame(index=i, timestamp_s=i / fps, y_px=float(y)) for i, y in enumerate(ys)
    )
    return FrameSchedule(fps=fps, frames=frames)


class TestOpenPage:
    def test_session_ready_with_emulated_viewport(self, cdp, fast_quiet):
        session = open_fixture_page(cdp)
        try:
            assert session.agent_installed
            assert cdp.emulation["width"] == 540
            assert cdp.emulation["height"] == 960
            assert cdp.emulation["mobile"] is True
            assert cdp.page.prepared
        finally:
            bridge.close_session(session)

    def test_agent_namespace_substituted(self, cdp, fast_quiet):
        session = open_fixture_page(cdp)
        try:
            assert len(cdp.injected_sources) == 1
            assert session.agent_ns in cdp.injected_sources[0]
            assert bridge.AGENT_NS_PLACEHOLDER not in cdp.injected_sources[0]
        finally:
            bridge.close_session(session)

    def test_local_path_becomes_file_url(self, cdp, fast_quiet):
        session = open_fixture_page(cdp)
        try:
            assert cdp.navigations[0].startswith("file://")
            assert cdp.navigations[0].endswith("five_boxes.html")
        finally:
            bridge.close_session(session)

    def test_missing_page_rejected(self, cdp):
        with pytest.raises(BrowserError, match="not found"):
            bridge.open_page("no_such_page.html", Viewport(), agent=STUB_AGENT, ws_url=cdp.ws_url)

    def test_unreachable_endpoint(self):
        with pytest.raises(BrowserError, match="cannot connect"):
            bridge.open_page(
                "fixtures/five_boxes.html",
                Viewport(),
                agent=STUB_AGENT,
                ws_url="ws://127.0.0.1:9/devtools/browser/dead",
            )

    def test_navigation_timeout(self, cdp, fast_quiet):
        cdp.withhold_load_event = True
        with pytest.raises(BrowserError, match="timeout"):
            bridge.open_page(
                "fixtures/five_boxes.html",
                Viewport(),
                agent=STUB_AGENT,
                ws_url=cdp.ws_url,
                timeout_s=0.6,
            )

    def test_scaled_viewport_honored(self, cdp, fast_quiet):
        session = open_fixture_page(cdp, Viewport(width_px=540, height_px=960, device_scale=2.0))
        try:
            assert cdp.emulation["deviceScaleFactor"] == 2.0
        finally:
            bridge.close_session(session)


class TestSurveyPage:
    def test_selector_survey_matches_fixture(self, cdp, fast_quiet, survey_doc):
        session = open_fixture_page(cdp)
        try:
            survey = bridge.survey_page(session, ".overlay")
            assert [el.box.y for el in survey.elements] == [600.0, 1400.0, 2200.0, 3000.0, 3800.0]
            expected = survey_from_dict(
                {**survey_doc, "elements": [e for e in survey_doc["elements"] if "overlay" in e["selector"]]}
            )
            assert survey == expected
        finally:
            bridge.close_session(session)

    def test_no_match_returns_empty(self, cdp, fast_quiet):
        session = open_fixture_page(cdp)
        try:
            assert bridge.survey_page(session, "#nope").elements == ()
        finally:
            bridge.close_session(session)

    def test_survey_idempotent(self, cdp, fast_quiet):
        session = open_fixture_page(cdp)
        try:
            assert bridge.survey_page(session, ".overlay") == bridge.survey_page(session, ".overlay")
        finally:
            bridge.close_session(session)


class TestHideTextboxes:
    def test_hide_counts_and_is_idempotent(self, cdp, fast_quiet):
        session = open_fixture_page(cdp)
        try:
            selectors = [f"#beat-{i}" for i in range(1, 6)]
            assert bridge.hide_textboxes(session, selectors) == 5
            assert bridge.hide_textboxes(session, selectors) == 5
        finally:
            bridge.close_session(session)

    def test_empty_list(self, cdp, fast_quiet):
        session = open_fixture_page(cdp)
        try:
            assert bridge.hide_textboxes(session, []) == 0
        finally:
            bridge.close_session(session)

    def test_geometry_unchanged_after_hide(self, cdp, fast_quiet):
        session = open_fixture_page(cdp)
        try:
            before = bridge.survey_page(session, ".overlay")
            bridge.hide_textboxes(session, [".overlay"])
            after = bridge.survey_page(session, ".overlay")
            for a, b in zip(before.elements, after.elements):
                assert abs(a.box.y - b.box.y) <= 1e-6
                assert a.text == b.text
        finally:
            bridge.close_session(session)


class TestCaptureFrames:
    def test_applied_offsets_equal_rounded_schedule(self, cdp, fast_quiet, tmp_path):
        session = open_fixture_page(cdp)
        try:
            schedule = small_schedule([0.0, 150.4, 300.5, 449.9, 600.0])
            frames = bridge.capture_frames(session, schedule, tmp_path)
            assert cdp.page.applied_log == [round(f.y_px) for f in schedule.frames]
            assert [f.y_px for f in frames] == [round(f.y_px) for f in schedule.frames]
        finally:
            bridge.close_session(session)

    def test_files_written_with_padded_indices(self, cdp, fast_quiet, tmp_path):
        session = open_fixture_page(cdp)
        try:
            frames = bridge.capture_frames(session, small_schedule([0, 100, 200]), tmp_path)
            names = sorted(p.name for p in (tmp_path / "frames").iterdir())
            assert names == ["frame_000000.png", "frame_000001.png", "frame_000002.png"]
            assert all(f.path.exists() for f in frames)
        finally:
            bridge.close_session(session)

    def test_single_frame_schedule(self, cdp, fast_quiet, tmp_path):
        session = open_fixture_page(cdp)
        try:
            frames = bridge.capture_frames(session, small_schedule([0.0]), tmp_path)
            assert len(frames) == 1
        finally:
            bridge.close_session(session)

    def test_beyond_max_scroll_is_an_error(self, cdp, fast_quiet, tmp_path):
        session = open_fixture_page(cdp)
        try:
            # Fixture document is 5000px tall with a 960px viewport: max 4040.
            with pytest.raises(BrowserError, match="exceeds scrollable height"):
                bridge.capture_frames(session, small_schedule([4100.0]), tmp_path)
        finally:
            bridge.close_session(session)

    def test_screenshot_retry_then_success(self, cdp, fast_quiet, tmp_path):
        session = open_fixture_page(cdp)
        try:
            cdp.fail_screenshots = 1
            frames = bridge.capture_frames(session, small_schedule([0.0, 100.0]), tmp_path)
            assert len(frames) == 2
        finally:
            bridge.close_session(session)

    def test_screenshot_double_failure_aborts_with_index(self, cdp, fast_quiet, tmp_path):
        session = open_fixture_page(cdp)
        try:
            cdp.fail_screenshots = 2
            with pytest.raises(BrowserError, match="frame 0"):
                bridge.capture_frames(session, small_schedule([0.0, 100.0]), tmp_path)
        finally:
            bridge.close_session(session)


class TestPngSize:
    def test_reads_ihdr(self):
        assert bridge.png_size(make_png(540, 960)) == (540, 960)

    def test_rejects_non_png(self):
        with pytest.raises(BrowserError):
            bridge.png_size(b"JFIF not a png")


def test_find_browser_error_when_absent(monkeypatch):
    monkeypatch.delenv("S2R_BROWSER_PATH", raising=False)
    monkeypatch.setattr("shutil.which", lambda name: None)
    with pytest.raises(BrowserError, match="no browser found"):
        bridge.find_browser()
