"""Synthetic corpora for end-to-end checks.

:func:`concept_benefit_corpus` builds events whose geographic barrier label
is fully determined by their concepts while title and body are label-free
noise.  :func:`random_world` builds small random knowledge bases and events
for property tests of the annotator.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .corpus import NewsArticle, build_index, write_corpus
from .metadata import CountryProfile, KnowledgeBase, Publisher, write_country_profiles, write_publisher_registry

SYNTH_COUNTRIES = ("AR", "AU", "BR", "DE", "FR", "GB", "IN", "JP", "KE", "US")
ALIGNMENTS = ("centre-left", "centre", "centre-right")
LANGUAGES = ("en", "de", "fr", "es")
CONCEPT_BASE = "https://en.wikipedia.org/wiki/"


def _noise_words(n: int) -> list[str]:
    # pronounceable pseudo-words, fixed order
    cons, vows = "bdfgklmnprstvz", "aeiou"
    words = []
    i = 0
    while len(words) < n:
        a, b, c = i % len(cons), (i // len(cons)) % len(vows), (i // (len(cons) * len(vows))) % len(cons)
        words.append(cons[a] + vows[b] + cons[c] + vows[(a + c) % len(vows)] + "n")
        i += 1
    return words


def _random_profile(rng, code) -> CountryProfile:
    return CountryProfile(
        country_code=code,
        hofstede=tuple(float(v) for v in rng.uniform(0, 100, 6).round(1)),
        prosperity=tuple(float(v) for v in rng.uniform(20, 90, 12).round(2)),
        latitude=round(float(rng.uniform(-60, 70)), 3),
        longitude=round(float(rng.uniform(-170, 170)), 3),
    )


@dataclass(frozen=True)
class SyntheticDataset:
    articles: list
    countries: dict
    publishers: dict


def concept_benefit_corpus(n_events: int = 400, seed: int = 42, articles_per_event: int = 2,
                           body_tokens: int = 40, title_tokens: int = 6, noise_vocab: int = 300,
                           concepts_per_article: int = 3, concept_pool: int = 12,
                           category: str = "science") -> SyntheticDataset:
    """Two-class geographic corpus where only concepts carry the label.

    Even-numbered events are ``crossed`` (publishers from two countries),
    odd-numbered ones ``not-crossed``.  Each class draws concepts from its own
    pool; words come from one shared uniform distribution.
    """
    if articles_per_event < 2:
        raise ValueError("need at least two articles per event to form crossed events")
    rng = np.random.default_rng(seed)
    countries = {c: _random_profile(rng, c) for c in SYNTH_COUNTRIES}
    publishers = {}
    for i, code in enumerate(SYNTH_COUNTRIES):
        for j in range(3):
            pid = f"{code.lower()}-news{j}.example"
            publishers[pid] = Publisher(pid, f"{code} News {j}", code, ALIGNMENTS[(i + j) % 3], "en")
    by_country = {c: [p for p in publishers if publishers[p].headquarters_country == c] for c in SYNTH_COUNTRIES}

    words = _noise_words(noise_vocab)
    pools = {
        "crossed": [f"{CONCEPT_BASE}Crossing_topic_{k}" for k in range(concept_pool)],
        "not-crossed": [f"{CONCEPT_BASE}Local_topic_{k}" for k in range(concept_pool)],
    }
    start = datetime(2018, 1, 1, tzinfo=timezone.utc)
    articles = []
    for e in range(n_events):
        label = "crossed" if e % 2 == 0 else "not-crossed"
        first = SYNTH_COUNTRIES[rng.integers(len(SYNTH_COUNTRIES))]
        if label == "crossed":
            others = [c for c in SYNTH_COUNTRIES if c != first]
            second = others[rng.integers(len(others))]
            homes = [first, second] + [SYNTH_COUNTRIES[rng.integers(len(SYNTH_COUNTRIES))]
                                       for _ in range(articles_per_event - 2)]
        else:
            homes = [first] * articles_per_event
        for a, home in enumerate(homes):
            pubs = by_country[home]
            concepts = rng.choice(pools[label], size=concepts_per_article, replace=False)
            articles.append(NewsArticle(
                article_id=f"syn-{e:05d}-{a}",
                event_id=f"syn-{e:05d}",
                title=" ".join(rng.choice(words, title_tokens)),
                body=" ".join(rng.choice(words, body_tokens)),
                publisher_id=pubs[rng.integers(len(pubs))],
                published_at=start + timedelta(hours=int(e * 7 + a)),
                category=category,
                concepts=tuple(str(c) for c in concepts),
                language="en",
            ))
    return SyntheticDataset(articles, countries, publishers)


SYNTH_CONFIG = """\
seed = {seed}

[paths]
corpus = "corpus.jsonl"
countries = "countries.csv"
publishers = "publishers.csv"
out = "out"

[features]
min_df = 2
max_df_ratio = 0.95
concept_weight = 2

[grid]
barriers = ["geographic"]
categories = ["{category}"]
models = ["lr", "nb", "knn", "dt", "mlp"]
feature_modes = ["text", "text+concepts"]
"""


def write_synthetic_dataset(directory: str | Path, n_events: int = 400, seed: int = 42) -> Path:
    """Write corpus, metadata files and a matching ``config.toml``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data = concept_benefit_corpus(n_events=n_events, seed=seed)
    write_corpus(directory / "corpus.jsonl", data.articles)
    write_country_profiles(directory / "countries.csv", data.countries.values())
    write_publisher_registry(directory / "publishers.csv", data.publishers.values())
    cfg = directory / "config.toml"
    cfg.write_text(SYNTH_CONFIG.format(seed=seed, category=data.articles[0].category), encoding="utf-8")
    return cfg


def random_world(rng: np.random.Generator, n_countries: int = 6, n_publishers: int = 12,
                 missing_alignment: float = 0.0) -> KnowledgeBase:
    codes = [chr(65 + i // 26) + chr(65 + i % 26) for i in range(n_countries)]
    countries = {c: _random_profile(rng, c) for c in codes}
    publishers = {}
    for i in range(n_publishers):
        pid = f"pub{i}.example"
        align = None if rng.random() < missing_alignment else ALIGNMENTS[rng.integers(len(ALIGNMENTS))]
        publishers[pid] = Publisher(pid, pid, codes[rng.integers(len(codes))], align,
                                    LANGUAGES[rng.integers(len(LANGUAGES))])
    return KnowledgeBase.build(countries, publishers)


def random_event_corpus(rng: np.random.Generator, kb: KnowledgeBase, n_events: int, max_articles: int = 5,
                        language_missing: float = 0.3):
    """Events over ``kb``'s publishers; some articles omit their language."""
    pids = sorted(kb.publishers)
    start = datetime(2019, 1, 1, tzinfo=timezone.utc)
    articles = []
    for e in range(n_events):
        for a in range(int(rng.integers(1, max_articles + 1))):
            lang = None if rng.random() < language_missing else LANGUAGES[rng.integers(len(LANGUAGES))]
            articles.append(NewsArticle(
                article_id=f"r{e}-{a}", event_id=f"r{e}", title="t", body="b",
                publisher_id=pids[rng.integers(len(pids))], published_at=start,
                category="society", concepts=(), language=lang,
            ))
    return build_index(articles)
