"""Beat text re-pacing: LLM shortening, a deterministic fallback, and
four-condition variant generation.

Alignment correctness depends on the shortened list having exactly one
entry per input snippet, so replies are parsed strictly and a wrong-length
or unparseable reply counts as a failed attempt. After the retry budget is
spent the deterministic fallback keeps the pipeline running.
"""

from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass, replace
from importlib import resources
from typing import Protocol

import requests

from .errors import ConfigError, LlmError
from .model import BeatsConfig, Beat, Mode

logger = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"
DEFAULT_MODEL = "gpt4-1106-preview"

# First sentence capped at 12 words: the prompt asks for 5-10 word
# sentences, with slack.
DEFAULT_MAX_WORDS = 12

MAX_ATTEMPTS = 3  # 1 try + 2 retries


@dataclass(frozen=True)
class ShorteningRequest:
    snippets: tuple[str, ...]
    endpoint: str
    model: str
    temperature: float = 0.0

    def __post_init__(self):
        if not self.snippets or any(not s.strip() for s in self.snippets):
            raise ValueError("snippets must be non-empty strings")


@dataclass(frozen=True)
class ShorteningResult:
    snippets: tuple[str, ...]
    source: str  # "llm" or "fallback"
    attempts: int


class ChatClient(Protocol):
    """Minimal chat-completion surface; test doubles implement this."""

    def complete(self, system_prompt: str, user_content: str) -> str: ...


def shortening_prompt() -> str:
    """System prompt shipped as package data (prompts/shorten.txt)."""
    return (
        resources.files("s2r").joinpath("prompts/shorten.txt").read_text(encoding="utf-8")
    )


class HttpChatClient:
    """POSTs chat-completion requests to an OpenAI-style endpoint."""

    def __init__(
        self,
        endpoint: str | None = None,
        model: str | None = None,
        api_key: str | None = None,
        timeout_s: float = 120.0,
    ):
        self.endpoint = endpoint or os.environ.get("S2R_LLM_URL", DEFAULT_ENDPOINT)
        self.model = model or os.environ.get("S2R_LLM_MODEL", DEFAULT_MODEL)
        self.api_key = api_key if api_key is not None else os.environ.get("S2R_LLM_API_KEY")
        self.timeout_s = timeout_s

    def complete(self, system_prompt: str, user_content: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": system_prompt},
                {"role": "user", "content": user_content},
            ],
        }
        try:
            resp = requests.post(self.endpoint, json=payload, headers=headers, timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise LlmError(f"chat-completion request failed: {exc}") from None
        if resp.status_code != 200:
            raise LlmError(f"chat-completion endpoint returned {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise LlmError(f"malformed chat-completion response: {exc}") from None


_FENCE_RE = re.compile(r"```[a-zA-Z0-9_-]*\n(.*?)```", re.DOTALL)


def parse_snippet_reply(reply: str, expected_len: int) -> tuple[str, ...]:
    """Strictly parse a reply into exactly expected_len non-empty strings.

    Accepts a fenced code block containing a JSON list, or a reply that is
    nothing but a JSON list.
    """
    m = _FENCE_RE.search(reply)
    body = m.group(1) if m else reply.strip()
    try:
        parsed = json.loads(body)
    except json.JSONDecodeError:
        raise LlmError("reply is not a parseable list") from None
    if not isinstance(parsed, list) or not all(isinstance(s, str) for s in parsed):
        raise LlmError("reply is not a list of strings")
    if len(parsed) != expected_len:
        raise LlmError(f"reply has {len(parsed)} snippets, expected {expected_len}")
    if any(not s.strip() for s in parsed):
        raise LlmError("reply contains an empty snippet")
    return tuple(s.strip() for s in parsed)


def fallback_shorten(text: str, max_words: int = DEFAULT_MAX_WORDS) -> str:
    """First sentence of text, truncated to at most max_words words.

    Sentence boundary: the first . ? or ! followed by whitespace or end of
    text. Deterministic and idempotent; never empty for non-empty input.
    """
    if max_words < 1:
        raise ValueError("max_words must be at least 1")
    m = re.search(r"[.?!](?=\s|$)", text)
    first = text[: m.end()] if m else text
    return " ".join(first.split()[:max_words])


def shorten_snippets(
    snippets: list[str] | tuple[str, ...],
    client: ChatClient,
    max_words: int = DEFAULT_MAX_WORDS,
) -> ShorteningResult:
    """Shorten snippets 1:1 via the client, falling back deterministically."""
    snippets = tuple(snippets)
    user_content = (
        json.dumps(list(snippets), ensure_ascii=False, indent=2)
        + "\n\nReply with only a fenced code block containing the JSON list of shortened snippets."
    )
    system_prompt = shortening_prompt()
    attempts = 0
    for attempts in range(1, MAX_ATTEMPTS + 1):
        try:
            reply = client.complete(system_prompt, user_content)
            return ShorteningResult(
                snippets=parse_snippet_reply(reply, len(snippets)),
                source="llm",
                attempts=attempts,
            )
        except LlmError as exc:
            logger.warning("shortening attempt %d failed: %s", attempts, exc)
    return ShorteningResult(
        snippets=tuple(fallback_shorten(s, max_words) for s in snippets),
        source="fallback",
        attempts=attempts,
    )


class FallbackOnlyClient:
    """A client that always fails, forcing the deterministic fallback."""

    def complete(self, system_prompt: str, user_content: str) -> str:
        raise LlmError("no chat-completion endpoint configured")


def shorten_beats(
    config: BeatsConfig, client: ChatClient, max_words: int = DEFAULT_MAX_WORDS
) -> tuple[BeatsConfig, ShorteningResult]:
    """Fill short_text on every narrating beat; ranges and order unchanged.

    Hold beats with empty text are skipped (nothing to narrate). The whole
    snippet list goes out in one exchange so the model can use neighboring
    context, as the prompt invites.
    """
    speaking = [(i, b.text) for i, b in enumerate(config.beats) if b.text.strip()]
    if not speaking:
        return config, ShorteningResult(snippets=(), source="llm", attempts=0)
    result = shorten_snippets([t for _, t in speaking], client, max_words)
    short_by_index = {i: s for (i, _), s in zip(speaking, result.snippets)}
    beats = tuple(
        replace(b, short_text=short_by_index.get(i, b.short_text))
        for i, b in enumerate(config.beats)
    )
    return replace(config, beats=beats), result


def _merged_beat(config: BeatsConfig) -> Beat:
    if len(config.beats) == 1:
        return config.beats[0]
    texts = [b.text for b in config.beats if b.text.strip()]
    shorts = [b.short_text for b in config.beats if b.text.strip()]
    joined_short = " ".join(s for s in shorts) if all(s is not None for s in shorts) else None
    return Beat(
        id="all",
        text=" ".join(texts),
        short_text=joined_short,
        anchor=None,
        y_start_px=config.global_start_px,
        y_end_px=config.global_end_px,
    )


def make_variants(config: BeatsConfig) -> dict[Mode, BeatsConfig]:
    """The four reel conditions from one source config.

    beats-slow keeps the input beats; beats-fast narrates from short_text;
    the nobeats pair concatenates all beats into one spanning the full
    scroll interval. Fast variants require short_text on every narrating
    beat. Variants whose narration text changes drop measured durations.
    """
    for b in config.beats:
        if b.text.strip() and b.short_text is None:
            raise ConfigError(f"beat {b.id!r} has no short_text; run shortening first")

    def strip_measured(beats: tuple[Beat, ...]) -> tuple[Beat, ...]:
        return tuple(replace(b, measured_duration_s=None) for b in beats)

    merged = _merged_beat(config)
    return {
        Mode.BEATS_SLOW: replace(config, mode=Mode.BEATS_SLOW),
        Mode.BEATS_FAST: replace(config, mode=Mode.BEATS_FAST, beats=strip_measured(config.beats)),
        Mode.NOBEATS_SLOW: replace(config, mode=Mode.NOBEATS_SLOW, beats=(merged,)),
        Mode.NOBEATS_FAST: replace(
            config, mode=Mode.NOBEATS_FAST, beats=strip_measured((merged,))
        ),
    }
