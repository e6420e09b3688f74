"""Chrome DevTools Protocol client: viewport emulation, page-agent
injection, layout surveying, text-box hiding, and stop-motion frame
capture.

Capture is stop-motion rather than screen recording: set an exact scroll
offset, wait for a paint, screenshot. The applied offsets are exactly the
rounded schedule positions, so frames align with the audio at mux time by
construction. Protocol commands are strictly serialized per session.
"""

from __future__ import annotations

import base64
import json
import logging
import secrets
import shutil
import struct
import subprocess
import tempfile
import time
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import requests
from websockets.sync.client import connect as ws_connect

from .errors import BrowserError
from .extractor import PageSurvey, survey_from_dict
from .model import Viewport
from .timing import FrameSchedule

logger = logging.getLogger(__name__)

DEFAULT_NAV_TIMEOUT_S = 30.0
NETWORK_QUIET_S = 0.5

_BROWSER_CANDIDATES = (
    "chromium",
    "chromium-browser",
    "google-chrome",
    "google-chrome-stable",
    "chrome",
    "headless_shell",
)

# Token substituted into the bundled agent source; the page global becomes
# __s2rAgent_<random suffix> so the agent never collides with page code.
AGENT_NS_PLACEHOLDER = "__S2R_AGENT_NS__"

_RAF_SETTLE_EXPR = (
    "new Promise(r => requestAnimationFrame(() => requestAnimationFrame(() => r(true))))"
)


def agent_source() -> str:
    """The bundled page-agent script (built from the frontend workspace)."""
    path = resources.files("s2r").joinpath("assets/page_agent.js")
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise BrowserError(
            "page agent asset missing (assets/page_agent.js); "
            "build it with `npm run build` in frontend/"
        ) from None


def find_browser(explicit: str | None = None) -> str:
    import os

    path = explicit or os.environ.get("S2R_BROWSER_PATH")
    if path:
        if shutil.which(path) or Path(path).exists():
            return path
        raise BrowserError(f"browser not found at {path!r}")
    for name in _BROWSER_CANDIDATES:
        found = shutil.which(name)
        if found:
            return found
    raise BrowserError(
        "no browser found on PATH; set S2R_BROWSER_PATH or attach with --devtools-url"
    )


def png_size(data: bytes) -> tuple[int, int]:
    if data[:8] != b"\x89PNG\r\n\x1a\n" or data[12:16] != b"IHDR":
        raise BrowserError("screenshot is not a PNG")
    width, height = struct.unpack(">II", data[16:24])
    return width, height


class CdpConnection:
    """One WebSocket to a DevTools endpoint; commands issued sequentially."""

    def __init__(self, ws_url: str, timeout_s: float = DEFAULT_NAV_TIMEOUT_S):
        self.timeout_s = timeout_s
        try:
            self._ws = ws_connect(ws_url, max_size=None, open_timeout=10)
        except Exception as exc:
            raise BrowserError(f"cannot connect to DevTools endpoint {ws_url}: {exc}") from None
        self._next_id = 1
        self.events: deque[dict] = deque()

    def close(self) -> None:
        try:
            self._ws.close()
        except Exception:
            pass

    def _recv(self, timeout_s: float) -> dict | None:
        try:
            raw = self._ws.recv(timeout=timeout_s)
        except TimeoutError:
            return None
        except Exception as exc:
            raise BrowserError(f"DevTools connection lost: {exc}") from None
        return json.loads(raw)

    def call(self, method: str, params: dict | None = None, session_id: str | None = None) -> dict:
        msg_id = self._next_id
        self._next_id += 1
        msg: dict = {"id": msg_id, "method": method, "params": params or {}}
        if session_id:
            msg["sessionId"] = session_id
        try:
            self._ws.send(json.dumps(msg))
        except Exception as exc:
            raise BrowserError(f"DevTools send failed: {exc}") from None
        deadline = time.monotonic() + self.timeout_s
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise BrowserError(f"timeout waiting for response to {method}")
            data = self._recv(remaining)
            if data is None:
                continue
            if data.get("id") == msg_id:
                if "error" in data:
                    err = data["error"]
                    raise BrowserError(f"{method}: {err.get('message', err)}")
                return data.get("result", {})
            if "method" in data:
                self.events.append(data)

    def pump(self, timeout_s: float) -> None:
        """Collect whatever events arrive within timeout_s."""
        deadline = time.monotonic() + timeout_s
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return
            data = self._recv(remaining)
            if data is not None and "method" in data:
                self.events.append(data)

    def take_events(self, name: str, session_id: str | None = None) -> list[dict]:
        taken, kept = [], deque()
        for ev in self.events:
            if ev.get("method") == name and (session_id is None or ev.get("sessionId") == session_id):
                taken.append(ev)
            else:
                kept.append(ev)
        self.events = kept
        return taken

    def wait_event(self, name: str, session_id: str | None, timeout_s: float) -> dict:
        deadline = time.monotonic() + timeout_s
        while True:
            found = self.take_events(name, session_id)
            if found:
                return found[0]
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise BrowserError(f"timeout waiting for {name}")
            self.pump(min(remaining, 0.25))


@dataclass
class BrowserSession:
    conn: CdpConnection
    target_id: str
    session_id: str
    viewport: Viewport
    agent_ns: str
    agent_installed: bool = False
    _proc: subprocess.Popen | None = None
    _profile_dir: tempfile.TemporaryDirectory | None = None
    _agent_call_id: int = field(default=0)


@dataclass(frozen=True)
class CapturedFrame:
    index: int
    y_px: int
    path: Path


def launch_browser(viewport: Viewport, browser_path: str | None = None):
    """Start a headless browser and return (process, ws_url, profile_dir)."""
    path = find_browser(browser_path)
    profile = tempfile.TemporaryDirectory(prefix="s2r-profile-")
    argv = [
        path,
        "--headless=new",
        "--remote-debugging-port=0",
        f"--user-data-dir={profile.name}",
        f"--window-size={viewport.width_px},{viewport.height_px}",
        "--no-first-run",
        "--no-sandbox",
        "--disable-gpu",
        "--hide-scrollbars",
        "--mute-audio",
        "--disable-background-networking",
    ]
    try:
        proc = subprocess.Popen(argv, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    except OSError as exc:
        profile.cleanup()
        raise BrowserError(f"failed to launch browser {path!r}: {exc}") from None
    port_file = Path(profile.name) / "DevToolsActivePort"
    deadline = time.monotonic() + 15
    while time.monotonic() < deadline:
        if port_file.exists():
            lines = port_file.read_text().splitlines()
            if len(lines) >= 2 and lines[0].strip().isdigit():
                ws_url = f"ws://127.0.0.1:{lines[0].strip()}{lines[1].strip()}"
                return proc, ws_url, profile
        if proc.poll() is not None:
            break
        time.sleep(0.05)
    proc.terminate()
    profile.cleanup()
    raise BrowserError("browser did not expose a DevTools endpoint")


def _browser_ws_url(devtools_url: str) -> str:
    try:
        resp = requests.get(devtools_url.rstrip("/") + "/json/version", timeout=5)
        resp.raise_for_status()
        return resp.json()["webSocketDebuggerUrl"]
    except (requests.RequestException, KeyError, ValueError) as exc:
        raise BrowserError(f"cannot reach DevTools at {devtools_url}: {exc}") from None


def page_url(url_or_path: str) -> str:
    if "://" in url_or_path:
        return url_or_path
    path = Path(url_or_path).resolve()
    if not path.exists():
        raise BrowserError(f"page not found: {url_or_path}")
    return path.as_uri()


def open_page(
    url_or_path: str,
    viewport: Viewport,
    devtools_url: str | None = None,
    browser_path: str | None = None,
    agent: str | None = None,
    ws_url: str | None = None,
    timeout_s: float = DEFAULT_NAV_TIMEOUT_S,
) -> BrowserSession:
    """Load the page in an emulated mobile viewport with the agent installed.

    Ready means: load event fired, no network activity for half a second
    (scrollies lazy-load media), and two animation frames elapsed. Smooth
    scrolling is disabled by the agent so applied offsets are exact.
    """
    url = page_url(url_or_path)
    proc = profile = None
    if ws_url is None:
        if devtools_url is not None:
            ws_url = _browser_ws_url(devtools_url)
        else:
            proc, ws_url, profile = launch_browser(viewport, browser_path)

    conn = CdpConnection(ws_url, timeout_s=timeout_s)
    session = None
    try:
        target = conn.call("Target.createTarget", {"url": "about:blank"})
        attached = conn.call(
            "Target.attachToTarget", {"targetId": target["targetId"], "flatten": True}
        )
        sid = attached["sessionId"]
        session = BrowserSession(
            conn=conn,
            target_id=target["targetId"],
            session_id=sid,
            viewport=viewport,
            agent_ns=f"__s2rAgent_{secrets.token_hex(4)}",
            _proc=proc,
            _profile_dir=profile,
        )
        conn.call("Page.enable", {}, sid)
        conn.call("Runtime.enable", {}, sid)
        conn.call("Network.enable", {}, sid)
        conn.call(
            "Emulation.setDeviceMetricsOverride",
            {
                "width": viewport.width_px,
                "height": viewport.height_px,
                "deviceScaleFactor": viewport.device_scale,
                "mobile": True,
            },
            sid,
        )
        source = (agent if agent is not None else agent_source()).replace(
            AGENT_NS_PLACEHOLDER, session.agent_ns
        )
        conn.call("Page.addScriptToEvaluateOnNewDocument", {"source": source}, sid)

        nav = conn.call("Page.navigate", {"url": url}, sid)
        if nav.get("errorText"):
            raise BrowserError(f"navigation failed: {nav['errorText']}")
        conn.wait_event("Page.loadEventFired", sid, timeout_s)
        _wait_network_quiet(session, timeout_s)
        _settle_paint(session)
        agent_call(session, "prepare", {})
        session.agent_installed = True
        return session
    except BaseException:
        if session is not None:
            close_session(session)
        else:
            conn.close()
            if proc is not None:
                proc.terminate()
            if profile is not None:
                profile.cleanup()
        raise


_NETWORK_EVENTS = (
    "Network.requestWillBeSent",
    "Network.loadingFinished",
    "Network.loadingFailed",
)


def _wait_network_quiet(session: BrowserSession, timeout_s: float) -> None:
    conn = session.conn
    deadline = time.monotonic() + timeout_s
    last_activity = time.monotonic()
    while True:
        conn.pump(0.1)
        seen = False
        for name in _NETWORK_EVENTS:
            if conn.take_events(name, session.session_id):
                seen = True
        now = time.monotonic()
        if seen:
            last_activity = now
        elif now - last_activity >= NETWORK_QUIET_S:
            return
        if now > deadline:
            raise BrowserError("timeout waiting for network to go quiet")


def _settle_paint(session: BrowserSession) -> None:
    _evaluate(session, _RAF_SETTLE_EXPR)


def _evaluate(session: BrowserSession, expression: str):
    result = session.conn.call(
        "Runtime.evaluate",
        {"expression": expression, "returnByValue": True, "awaitPromise": True},
        session.session_id,
    )
    if "exceptionDetails" in result:
        details = result["exceptionDetails"]
        text = details.get("exception", {}).get("description") or details.get("text", "")
        raise BrowserError(f"page evaluation failed: {text}")
    return result.get("result", {}).get("value")


def agent_call(session: BrowserSession, method: str, params: dict):
    """Evaluate one agent dispatch; the reply is a JSON document string."""
    session._agent_call_id += 1
    call = {"method": method, "params": params, "id": session._agent_call_id}
    expr = f"{session.agent_ns}.dispatch({json.dumps(json.dumps(call))})"
    raw = _evaluate(session, expr)
    if not isinstance(raw, str):
        raise BrowserError(f"agent returned no response for {method!r}")
    reply = json.loads(raw)
    if reply.get("error"):
        raise BrowserError(f"agent {method} failed: {reply['error'].get('message')}")
    return reply.get("result")


def survey_page(session: BrowserSession, selector: str | None) -> PageSurvey:
    """The agent's layout survey; coordinates are document-space."""
    result = agent_call(session, "survey", {"selector": selector})
    return survey_from_dict(result)


def hide_textboxes(session: BrowserSession, selectors: list[str]) -> int:
    """Hide matched elements layout-preservingly (visibility, not display)."""
    if not selectors:
        return 0
    result = agent_call(session, "hide", {"selectors": list(selectors)})
    return int(result["count"])


def scroll_to(session: BrowserSession, y_px: int) -> int:
    result = agent_call(session, "scrollTo", {"y": y_px})
    return int(round(float(result["applied"])))


def capture_frames(
    session: BrowserSession, schedule: FrameSchedule, run_dir: str | Path
) -> list[CapturedFrame]:
    """Execute the schedule: scroll, settle, screenshot, one PNG per frame.

    Applied offsets must equal the rounded schedule positions exactly; a
    clamped scroll means the end anchor lies beyond the page's scrollable
    height and the capture aborts rather than silently misaligning.
    """
    frames_dir = Path(run_dir) / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)
    expected_w = round(session.viewport.width_px * session.viewport.device_scale)
    expected_h = round(session.viewport.height_px * session.viewport.device_scale)

    captured = []
    for frame in schedule.frames:
        target = round(frame.y_px)
        applied = scroll_to(session, target)
        if applied != target:
            raise BrowserError(
                f"end anchor exceeds scrollable height: frame {frame.index} "
                f"requested y={target}, page applied y={applied}"
            )
        _settle_paint(session)
        data = None
        for attempt in (1, 2):
            try:
                result = session.conn.call(
                    "Page.captureScreenshot", {"format": "png"}, session.session_id
                )
                data = base64.b64decode(result["data"])
                break
            except BrowserError as exc:
                if attempt == 2:
                    raise BrowserError(f"screenshot failed at frame {frame.index}: {exc}") from None
                logger.warning("screenshot retry at frame %d: %s", frame.index, exc)
        size = png_size(data)
        if size != (expected_w, expected_h):
            raise BrowserError(
                f"frame {frame.index}: screenshot is {size[0]}x{size[1]}, "
                f"expected {expected_w}x{expected_h}"
            )
        path = frames_dir / f"frame_{frame.index:06d}.png"
        path.write_bytes(data)
        captured.append(CapturedFrame(index=frame.index, y_px=applied, path=path))
    return captured


def close_session(session: BrowserSession) -> None:
    try:
        session.conn.call("Target.closeTarget", {"targetId": session.target_id})
    except BrowserError:
        pass
    session.conn.close()
    if session._proc is not None:
        session._proc.terminate()
        try:
            session._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            session._proc.kill()
    if session._profile_dir is not None:
        try:
            session._profile_dir.cleanup()
        except OSError:
            pass
