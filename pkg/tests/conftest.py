import random
from pathlib import Path

import pytest

from s2r.model import Beat, BeatsConfig, Mode, Viewport, load_config

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
GOLDEN = ROOT / "golden"

WORDS = (
    "the", "a", "story", "scroll", "city", "plant", "rounds", "site",
    "military", "under", "over", "bullet", "casing", "page", "graphic",
    "reader", "camera", "moment", "factory", "supply",
)


def random_text(rng: random.Random, min_words: int = 1, max_words: int = 40) -> str:
    n = rng.randint(min_words, max_words)
    return " ".join(rng.choice(WORDS) for _ in range(n))


def random_valid_config(rng: random.Random, max_beats: int = 6) -> BeatsConfig:
    """A structurally valid config: sorted, non-overlapping, exact tiling."""
    n = rng.randint(1, max_beats)
    start = rng.uniform(0, 500)
    widths = []
    for _ in range(n):
        widths.append(0.0 if rng.random() < 0.15 else rng.uniform(5, 1500))
    if all(w == 0.0 for w in widths):
        widths[rng.randrange(n)] = rng.uniform(5, 1500)

    beats = []
    y = start
    for i, w in enumerate(widths):
        y_end = y + w
        text = random_text(rng) if w > 0 or rng.random() < 0.5 else ""
        short = " ".join(text.split()[: max(1, len(text.split()) // 2)]) if text else None
        measured = rng.uniform(0.2, 20.0) if rng.random() < 0.3 else None
        beats.append(
            Beat(
                id=f"b{i + 1:02d}",
                text=text,
                short_text=short,
                y_start_px=y,
                y_end_px=y_end,
                est_duration_s=0.0,
                measured_duration_s=measured,
            )
        )
        y = y_end
    mode = rng.choice(list(Mode))
    return BeatsConfig(
        page="fixtures/five_boxes.html",
        viewport=Viewport(),
        global_start_px=start,
        global_end_px=y,
        beats=tuple(beats),
        mode=mode,
        speaking_rate_wpm=rng.choice([120.0, 160.0, 200.0]),
        fps=rng.choice([24.0, 30.0, 60.0]),
    )


@pytest.fixture(scope="session")
def ammo_config():
    return load_config(FIXTURES / "ammo_plant.beats.json")


@pytest.fixture(scope="session")
def survey_path():
    return FIXTURES / "five_boxes.survey.json"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDEN
