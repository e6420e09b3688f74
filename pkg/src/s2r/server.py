"""Local HTTP API behind the editor UI.

Serves the beats config for reading and validated writing, server-computed
timelines for every mode, and the four-variant preview. The config file is
the single source of truth: the UI never computes timelines client-side,
and writes are serialized through one lock (last validated write wins).
Binds localhost only; this is a local authoring tool.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import os
import threading
from dataclasses import replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from importlib import resources
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .errors import ConfigError
from .model import (
    BeatsConfig,
    Mode,
    config_from_dict,
    config_to_dict,
    parse_config,
    serialize_config,
    validate_config,
)
from .scriptwriter import FallbackOnlyClient, shorten_beats
from .timing import build_timeline, timeline_to_json

logger = logging.getLogger(__name__)

_FALLBACK_INDEX = """<!doctype html>
<html><head><meta charset="utf-8"><title>s2r preview</title></head>
<body>
<h1>s2r preview API</h1>
<p>No editor UI assets are installed. The API is available at:</p>
<ul>
<li>GET /api/config</li>
<li>PUT /api/config</li>
<li>GET /api/timeline?mode=beats-slow|beats-fast|nobeats-slow|nobeats-fast</li>
<li>GET /api/variants</li>
</ul>
</body></html>
"""


def config_in_mode(config: BeatsConfig, mode: Mode) -> BeatsConfig:
    """View a config under another mode.

    Measured durations belong to the mode they were narrated in, so
    switching modes drops them and the timeline falls back to estimates.
    """
    if mode == config.mode:
        return config
    beats = tuple(replace(b, measured_duration_s=None) for b in config.beats)
    return replace(config, mode=mode, beats=beats)


def ensure_short_texts(config: BeatsConfig) -> BeatsConfig:
    """Fill any missing short_text with the deterministic fallback."""
    if all(b.short_text is not None for b in config.beats if b.text.strip()):
        return config
    shortened, _ = shorten_beats(config, FallbackOnlyClient())
    return shortened


def default_ui_dir() -> Path | None:
    try:
        path = Path(str(resources.files("s2r").joinpath("assets/ui")))
    except (FileNotFoundError, TypeError):
        return None
    return path if path.is_dir() else None


class PreviewHandler(BaseHTTPRequestHandler):
    server: "PreviewServer"

    # --- plumbing ---

    def log_message(self, fmt, *args):
        logger.debug("%s - %s", self.address_string(), fmt % args)

    def _send(self, status: int, body: bytes, content_type: str = "application/json") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Cache-Control", "no-store")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, obj: dict) -> None:
        body = (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8")
        self._send(status, body)

    def _error(self, status: int, message: str) -> None:
        self._send_json(status, {"error": message})

    # --- routes ---

    def do_GET(self):
        url = urlparse(self.path)
        try:
            if url.path == "/api/config":
                self._get_config()
            elif url.path == "/api/timeline":
                self._get_timeline(parse_qs(url.query))
            elif url.path == "/api/variants":
                self._get_variants()
            elif url.path.startswith("/api/"):
                self._error(404, f"unknown endpoint {url.path}")
            else:
                self._get_static(url.path)
        except ConfigError as exc:
            self._error(422, str(exc))
        except Exception:
            logger.exception("request failed: %s", self.path)
            self._error(500, "internal error")

    def do_PUT(self):
        if urlparse(self.path).path != "/api/config":
            self._error(404, "only /api/config accepts PUT")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length)
            try:
                obj = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                self._error(400, f"request body is not valid JSON: {exc}")
                return
            try:
                config = config_from_dict(obj)
            except ConfigError as exc:
                self._send_json(
                    422,
                    {"ok": False, "issues": [{"severity": "error", "path": "", "message": str(exc)}]},
                )
                return
            report = validate_config(config)
            if not report.ok:
                self._send_json(422, report.to_dict())
                return
            stored = serialize_config(config)
            with self.server.write_lock:
                tmp = self.server.config_path.with_suffix(".tmp")
                tmp.write_bytes(stored)
                os.replace(tmp, self.server.config_path)
            self._send(200, stored)
        except Exception:
            logger.exception("PUT failed")
            self._error(500, "internal error")

    def _load(self) -> BeatsConfig:
        return parse_config(self.server.config_path.read_bytes())

    def _get_config(self):
        self._send(200, serialize_config(self._load()))

    def _get_timeline(self, query: dict):
        mode_raw = query.get("mode", [None])[0]
        config = self._load()
        if mode_raw is not None:
            try:
                mode = Mode(mode_raw)
            except ValueError:
                self._error(400, f"unknown mode {mode_raw!r}")
                return
            config = config_in_mode(config, mode)
        self._send(200, timeline_to_json(build_timeline(config)))

    def _get_variants(self):
        from .scriptwriter import make_variants

        config = ensure_short_texts(self._load())
        variants = make_variants(config)
        doc = {mode.value: config_to_dict(v) for mode, v in variants.items()}
        body = (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
        self._send(200, body)

    def _get_static(self, path: str):
        if path in ("", "/"):
            path = "/index.html"
        ui_dir = self.server.ui_dir
        if ui_dir is not None:
            target = (ui_dir / path.lstrip("/")).resolve()
            if str(target).startswith(str(ui_dir.resolve())) and target.is_file():
                ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
                self._send(200, target.read_bytes(), content_type=ctype)
                return
        if path == "/index.html":
            self._send(200, _FALLBACK_INDEX.encode("utf-8"), content_type="text/html; charset=utf-8")
        else:
            self._error(404, f"no such asset {path}")


class PreviewServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, config_path: str | Path, port: int = 0, ui_dir: Path | None = None):
        self.config_path = Path(config_path)
        self.ui_dir = ui_dir if ui_dir is not None else default_ui_dir()
        self.write_lock = threading.Lock()
        super().__init__(("127.0.0.1", port), PreviewHandler)

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.server_address[1]}/"


def serve(config_path: str | Path, port: int = 8137, ui_dir: Path | None = None) -> None:
    server = PreviewServer(config_path, port=port, ui_dir=ui_dir)
    logger.info("preview server at %s", server.url)
    print(f"serving {config_path} at {server.url}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
