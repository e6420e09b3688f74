"""Maps a surveyed page layout plus user anchors to a tiled beats config.

The browser half records a PageSurvey (per-element selector, text, and
document-space geometry); everything here is pure and browser-free, so the
mapping is unit-testable against recorded survey fixtures.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .model import Beat, BeatsConfig, Mode, Viewport, viewport_from_dict

logger = logging.getLogger(__name__)

# Positioning kinds whose elements float over the artwork rather than sit
# in normal document flow.
OVERLAY_POSITIONING = {"absolute", "fixed", "sticky"}

DEFAULT_ANCHOR_FRACTION = 0.5


@dataclass(frozen=True)
class BoxRect:
    """Document-space rectangle in CSS pixels."""

    x: float
    y: float
    width: float
    height: float


@dataclass(frozen=True)
class SurveyedElement:
    selector: str
    text: str
    box: BoxRect
    positioning: str
    z_layer: int


@dataclass(frozen=True)
class PageSurvey:
    page: str
    viewport: Viewport
    document_height_px: float
    elements: tuple[SurveyedElement, ...]


def normalize_text(text: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends."""
    return re.sub(r"\s+", " ", text).strip()


# --- survey interchange document ---


def survey_from_dict(obj: dict) -> PageSurvey:
    try:
        elements = tuple(
            SurveyedElement(
                selector=el["selector"],
                text=el["text"],
                box=BoxRect(
                    x=float(el["box"]["x"]),
                    y=float(el["box"]["y"]),
                    width=float(el["box"]["width"]),
                    height=float(el["box"]["height"]),
                ),
                positioning=el["positioning"],
                z_layer=int(el["z_layer"]),
            )
            for el in obj["elements"]
        )
        return PageSurvey(
            page=obj["page"],
            viewport=viewport_from_dict(obj["viewport"]),
            document_height_px=float(obj["document_height_px"]),
            elements=elements,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed page survey: {exc}") from None


def survey_to_dict(survey: PageSurvey) -> dict:
    return {
        "page": survey.page,
        "viewport": {
            "width_px": survey.viewport.width_px,
            "height_px": survey.viewport.height_px,
            "device_scale": float(survey.viewport.device_scale),
        },
        "document_height_px": float(survey.document_height_px),
        "elements": [
            {
                "selector": el.selector,
                "text": el.text,
                "box": {
                    "x": el.box.x,
                    "y": el.box.y,
                    "width": el.box.width,
                    "height": el.box.height,
                },
                "positioning": el.positioning,
                "z_layer": el.z_layer,
            }
            for el in survey.elements
        ],
    }


def load_survey(path: str | Path) -> PageSurvey:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read survey {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"survey parse error at line {exc.lineno}: {exc.msg}") from None
    return survey_from_dict(obj)


# --- selector matching ---

_COMPOUND_RE = re.compile(
    r"^(?P<tag>[a-zA-Z][\w-]*|\*)?(?P<rest>(?:[#.][\w-]+)*)(?::[\w-]+(?:\([^)]*\))?)*$"
)


def _parse_compound(compound: str) -> tuple[str | None, str | None, set[str]]:
    """Split one compound selector into (tag, id, classes); pseudo-classes ignored."""
    m = _COMPOUND_RE.match(compound.strip())
    if not m:
        raise ConfigError(f"unsupported selector syntax: {compound!r}")
    tag = m.group("tag")
    elem_id = None
    classes: set[str] = set()
    for piece in re.findall(r"[#.][\w-]+", m.group("rest") or ""):
        if piece.startswith("#"):
            elem_id = piece[1:]
        else:
            classes.add(piece[1:])
    return (tag.lower() if tag and tag != "*" else None, elem_id, classes)


def selector_matches(query: str, element_selector: str) -> bool:
    """Whether a simple query (tag, .class, #id, or a compound of those)
    matches the final compound of an element's recorded unique selector.

    Survey selectors follow the page agent's convention: a descendant path
    whose last compound carries the element's tag, id, and classes, e.g.
    ``div#beat-1.overlay`` or ``body > div.story > p.caption:nth-of-type(3)``.
    """
    q_tag, q_id, q_classes = _parse_compound(query)
    last = re.split(r"\s*>\s*|\s+", element_selector.strip())[-1]
    e_tag, e_id, e_classes = _parse_compound(last)
    if q_tag is not None and q_tag != e_tag:
        return False
    if q_id is not None and q_id != e_id:
        return False
    return q_classes <= e_classes


# --- beat extraction ---


def tile_ranges(
    trigger_offsets: list[float], start_px: float, end_px: float
) -> list[tuple[float, float]]:
    """Tile [start_px, end_px] with one contiguous range per trigger.

    Range i runs from trigger i (clamped) to trigger i+1 (clamped); the
    first range is snapped to start_px and the last ends at end_px.
    Duplicate triggers yield zero-width hold ranges. An empty trigger list
    yields the single degenerate range covering the whole interval.
    """
    if start_px >= end_px:
        raise ValueError("start_px must be less than end_px")
    if any(b < a for a, b in zip(trigger_offsets, trigger_offsets[1:])):
        raise ValueError("trigger offsets must be sorted ascending")
    if not trigger_offsets:
        return [(start_px, end_px)]
    clamped = [min(max(t, start_px), end_px) for t in trigger_offsets]
    bounds = [start_px] + clamped[1:] + [end_px]
    return list(zip(bounds[:-1], bounds[1:]))


def compute_triggers(
    box_tops: list[float],
    viewport_height_px: float,
    anchor_fraction: float,
    start_px: float,
    end_px: float,
) -> list[float]:
    """Document offset at which each box takes over the viewport.

    A box owns the screen once it reaches anchor_fraction of the viewport
    height (0 = top edge, 0.5 = mid-viewport), clamped into [start, end].
    """
    if not 0.0 <= anchor_fraction <= 1.0:
        raise ValueError("anchor_fraction must be within [0, 1]")
    return [
        min(max(y - anchor_fraction * viewport_height_px, start_px), end_px)
        for y in box_tops
    ]


def _match_textboxes(
    survey: PageSurvey, textbox_selector: str | None
) -> list[SurveyedElement]:
    if textbox_selector is None:
        wanted = set(detect_textboxes(survey))
        matched = [el for el in survey.elements if el.selector in wanted]
    else:
        matched = [el for el in survey.elements if selector_matches(textbox_selector, el.selector)]
    return sorted(matched, key=lambda el: (el.box.y, el.selector))


_ID_SAFE_RE = re.compile(r"[^\w-]+")


def _beat_id(element: SurveyedElement, index: int) -> str:
    _, elem_id, _ = _parse_compound(re.split(r"\s*>\s*|\s+", element.selector.strip())[-1])
    if elem_id:
        return _ID_SAFE_RE.sub("-", elem_id)
    return f"b{index + 1:02d}"


def survey_to_beats(
    survey: PageSurvey,
    textbox_selector: str | None,
    start_px: float,
    end_px: float,
    anchor_fraction: float = DEFAULT_ANCHOR_FRACTION,
    mode: Mode = Mode.BEATS_SLOW,
) -> BeatsConfig:
    """One beat per matched text box, ranges tiling [start_px, end_px].

    Estimated durations are left at 0; the timing stage computes them from
    the narration text. Boxes at or below end_px + viewport can never be
    on screen within the scroll interval and are excluded.
    """
    start_px, end_px = float(start_px), float(end_px)
    candidates = _match_textboxes(survey, textbox_selector)
    cutoff = end_px + survey.viewport.height_px
    elements = []
    for el in candidates:
        if el.box.y >= cutoff:
            continue
        if not normalize_text(el.text):
            logger.warning("skipping %s: matched element has empty text", el.selector)
            continue
        elements.append(el)
    if not elements:
        raise ConfigError(
            f"no text boxes found for selector {textbox_selector!r} "
            f"within [{start_px}, {end_px}]"
        )

    triggers = compute_triggers(
        [el.box.y for el in elements],
        survey.viewport.height_px,
        anchor_fraction,
        start_px,
        end_px,
    )
    ranges = tile_ranges(triggers, start_px, end_px)
    beats = tuple(
        Beat(
            id=_beat_id(el, i),
            text=normalize_text(el.text),
            anchor=el.selector,
            y_start_px=y0,
            y_end_px=y1,
        )
        for i, (el, (y0, y1)) in enumerate(zip(elements, ranges))
    )
    return BeatsConfig(
        page=survey.page,
        viewport=survey.viewport,
        global_start_px=float(start_px),
        global_end_px=float(end_px),
        beats=beats,
        mode=mode,
    )


def detect_textboxes(survey: PageSurvey) -> list[str]:
    """Heuristic text-box candidates, sorted by document y.

    A candidate has visible text, fits the viewport width, and either
    floats over the artwork (absolute/fixed/sticky) or sits on a raised
    stacking layer. Purely advisory; callers may override with an explicit
    selector.
    """
    seen: set[str] = set()
    candidates = []
    for el in survey.elements:
        if not normalize_text(el.text):
            continue
        if el.box.width > survey.viewport.width_px:
            continue
        if el.positioning not in OVERLAY_POSITIONING and el.z_layer <= 0:
            continue
        if el.selector in seen:
            continue
        seen.add(el.selector)
        candidates.append(el)
    candidates.sort(key=lambda el: (el.box.y, el.selector))
    return [el.selector for el in candidates]
