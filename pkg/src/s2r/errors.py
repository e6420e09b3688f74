"""Exception hierarchy shared by every pipeline stage.

Each stage maps to one exception family and one process exit code so CI
scripts can tell a bad config from a dead browser without parsing stderr.
"""


class S2RError(Exception):
    """Base class for all pipeline failures."""

    exit_code = 1


class ConfigError(S2RError):
    """Beats configuration is malformed, inconsistent, or fails validation."""

    exit_code = 2

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class BrowserError(S2RError):
    """DevTools endpoint unreachable, navigation failed, or capture aborted."""

    exit_code = 10


class LlmError(S2RError):
    """Chat-completion transport or protocol failure."""

    exit_code = 20


class TtsError(S2RError):
    """Speech-engine failure or unusable audio output."""

    exit_code = 30


class RenderError(S2RError):
    """Manifest assembly or muxing failure."""

    exit_code = 40


class MuxError(RenderError):
    """External muxer missing or exited nonzero."""


class StaleInputsError(RenderError):
    """An artifact was generated from a different config than the one given."""
