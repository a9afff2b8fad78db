"""Event-level barrier labels derived from publisher metadata.

Cultural and economic barriers get a ternary label from the largest
normalized profile distance between the headquarters countries involved in
an event.  Geographic, political and linguistic barriers are binary: the
event is ``not-crossed`` when all its articles share one country, one
political alignment or one language respectively.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations
from pathlib import Path
from typing import Iterable

import numpy as np

from .corpus import CorpusIndex, Event
from .metadata import KnowledgeBase


class BarrierKind(str, Enum):
    CULTURAL = "cultural"
    ECONOMIC = "economic"
    POLITICAL = "political"
    LINGUISTIC = "linguistic"
    GEOGRAPHIC = "geographic"


BARRIERS = tuple(BarrierKind)

NOT_CROSSING = "information-not-crossing"
UNSURE = "unsure"
CROSSING = "information-crossing"
NOT_CROSSED = "not-crossed"
CROSSED = "crossed"

TERNARY_CLASSES = (NOT_CROSSING, UNSURE, CROSSING)
BINARY_CLASSES = (NOT_CROSSED, CROSSED)


def classes_for(kind: BarrierKind | str) -> tuple[str, ...]:
    kind = BarrierKind(kind)
    if kind in (BarrierKind.CULTURAL, BarrierKind.ECONOMIC):
        return TERNARY_CLASSES
    return BINARY_CLASSES


@dataclass(frozen=True)
class BarrierLabel:
    kind: BarrierKind
    cls: str

    def __post_init__(self):
        object.__setattr__(self, "kind", BarrierKind(self.kind))
        if self.cls not in classes_for(self.kind):
            raise ValueError(f"{self.cls!r} is not a {self.kind.value} class")


@dataclass(frozen=True)
class Thresholds:
    tau_low: float = 0.1
    tau_high: float = 0.4
    # km; None keeps the country-identity rule for the geographic barrier
    geo_max_km: float | None = None

    def __post_init__(self):
        if not 0 < self.tau_low < self.tau_high < 1:
            raise ValueError(f"need 0 < tau_low < tau_high < 1, got {self.tau_low}, {self.tau_high}")
        if self.geo_max_km is not None and self.geo_max_km <= 0:
            raise ValueError("geo_max_km must be positive")


class Unannotatable(Exception):
    """Raised when an event lacks the metadata a barrier needs."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


MISSING_PUBLISHER = "missing publisher"
MISSING_PROFILE = "missing country profile"
MISSING_ALIGNMENT = "missing alignment"
MISSING_LANGUAGE = "missing language"


@dataclass
class AnnotationReport:
    total_events: int = 0
    labeled: dict = field(default_factory=lambda: {b.value: 0 for b in BARRIERS})
    dropped: dict = field(default_factory=lambda: {b.value: 0 for b in BARRIERS})
    reasons: dict = field(default_factory=lambda: {b.value: {} for b in BARRIERS})

    def record(self, kind: BarrierKind, reason: str | None):
        if reason is None:
            self.labeled[kind.value] += 1
        else:
            self.dropped[kind.value] += 1
            bucket = self.reasons[kind.value]
            bucket[reason] = bucket.get(reason, 0) + 1

    def to_dict(self) -> dict:
        return {
            "total_events": self.total_events,
            "barriers": {
                b.value: {
                    "labeled": self.labeled[b.value],
                    "dropped": self.dropped[b.value],
                    "drop_reasons": dict(sorted(self.reasons[b.value].items())),
                }
                for b in BARRIERS
            },
        }


def profile_distance(a, b) -> float:
    """Euclidean distance divided by sqrt(d), so unit-cube vectors map into [0, 1]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)) / math.sqrt(a.size))


def ternary_label_from_distance(dist: float, t: Thresholds = Thresholds()) -> str:
    if dist <= t.tau_low:
        return NOT_CROSSING
    if dist <= t.tau_high:
        return UNSURE
    return CROSSING


def _publishers(event: Event, corpus: CorpusIndex, kb: KnowledgeBase):
    pubs = []
    for art in corpus.members(event):
        pub = kb.publishers.get(art.publisher_id)
        if pub is None:
            raise Unannotatable(MISSING_PUBLISHER)
        pubs.append(pub)
    return pubs


def event_countries(event: Event, corpus: CorpusIndex, kb: KnowledgeBase) -> list[str]:
    return sorted({p.headquarters_country for p in _publishers(event, corpus, kb)})


def _max_pairwise(vectors: dict, countries: list[str]) -> float:
    for c in countries:
        if c not in vectors:
            raise Unannotatable(MISSING_PROFILE)
    return max((profile_distance(vectors[a], vectors[b]) for a, b in combinations(countries, 2)), default=0.0)


def annotate_cultural(event, corpus, kb, thresholds: Thresholds = Thresholds()) -> BarrierLabel:
    countries = event_countries(event, corpus, kb)
    dist = _max_pairwise(kb.normalized.cultural, countries)
    return BarrierLabel(BarrierKind.CULTURAL, ternary_label_from_distance(dist, thresholds))


def annotate_economic(event, corpus, kb, thresholds: Thresholds = Thresholds()) -> BarrierLabel:
    countries = event_countries(event, corpus, kb)
    dist = _max_pairwise(kb.normalized.economic, countries)
    return BarrierLabel(BarrierKind.ECONOMIC, ternary_label_from_distance(dist, thresholds))


def haversine_km(lat1, lon1, lat2, lon2) -> float:
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * 6371.0088 * math.asin(min(1.0, math.sqrt(h)))


def annotate_geographic(event, corpus, kb, thresholds: Thresholds = Thresholds()) -> BarrierLabel:
    countries = event_countries(event, corpus, kb)
    if thresholds.geo_max_km is None:
        crossed = len(countries) > 1
    else:
        for c in countries:
            if c not in kb.countries:
                raise Unannotatable(MISSING_PROFILE)
        crossed = any(
            haversine_km(kb.countries[a].latitude, kb.countries[a].longitude,
                         kb.countries[b].latitude, kb.countries[b].longitude) > thresholds.geo_max_km
            for a, b in combinations(countries, 2)
        )
    return BarrierLabel(BarrierKind.GEOGRAPHIC, CROSSED if crossed else NOT_CROSSED)


def annotate_political(event, corpus, kb, thresholds: Thresholds = Thresholds()) -> BarrierLabel:
    alignments = set()
    for pub in _publishers(event, corpus, kb):
        if pub.political_alignment is None:
            raise Unannotatable(MISSING_ALIGNMENT)
        alignments.add(pub.political_alignment)
    return BarrierLabel(BarrierKind.POLITICAL, NOT_CROSSED if len(alignments) == 1 else CROSSED)


def _primary_language(tag: str) -> str:
    return tag.split("-")[0].lower()


def annotate_linguistic(event, corpus, kb, thresholds: Thresholds = Thresholds()) -> BarrierLabel:
    languages = set()
    for art in corpus.members(event):
        lang = art.language
        if lang is None:
            pub = kb.publishers.get(art.publisher_id)
            if pub is None:
                raise Unannotatable(MISSING_PUBLISHER)
            lang = pub.publishing_language
        if not lang:
            raise Unannotatable(MISSING_LANGUAGE)
        languages.add(_primary_language(lang))
    return BarrierLabel(BarrierKind.LINGUISTIC, NOT_CROSSED if len(languages) == 1 else CROSSED)


ANNOTATORS = {
    BarrierKind.CULTURAL: annotate_cultural,
    BarrierKind.ECONOMIC: annotate_economic,
    BarrierKind.POLITICAL: annotate_political,
    BarrierKind.LINGUISTIC: annotate_linguistic,
    BarrierKind.GEOGRAPHIC: annotate_geographic,
}


def annotate_event(event, corpus, kb, thresholds: Thresholds = Thresholds()):
    """Return ``({kind: label}, {kind: drop reason})`` for one event."""
    labels, drops = {}, {}
    for kind, fn in ANNOTATORS.items():
        try:
            labels[kind] = fn(event, corpus, kb, thresholds)
        except Unannotatable as exc:
            drops[kind] = exc.reason
    return labels, drops


def annotate_corpus(corpus: CorpusIndex, kb: KnowledgeBase, thresholds: Thresholds = Thresholds()):
    """Label every event for every barrier it has metadata for.

    Returns the events (with ``labels`` filled, in corpus order) and an
    :class:`AnnotationReport`.
    """
    report = AnnotationReport(total_events=len(corpus.events))
    labeled = []
    for event in corpus.events.values():
        labels, drops = annotate_event(event, corpus, kb, thresholds)
        for kind in BARRIERS:
            report.record(kind, drops.get(kind))
        labeled.append(replace(event, labels=labels))
    return labeled, report


def label_records(events: Iterable[Event]) -> list[dict]:
    rows = []
    for ev in events:
        for kind in BARRIERS:
            if kind in ev.labels:
                rows.append({"event_id": ev.event_id, "barrier": kind.value, "class": ev.labels[kind].cls})
    return rows


def write_labels(path: str | Path, events: Iterable[Event]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in label_records(events):
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_labels(path: str | Path) -> dict[str, dict[BarrierKind, BarrierLabel]]:
    out: dict[str, dict] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                kind = BarrierKind(rec["barrier"])
                out.setdefault(rec["event_id"], {})[kind] = BarrierLabel(kind, rec["class"])
    return out


def write_report(path: str | Path, report: AnnotationReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def class_counts(events: Iterable[Event], kind: BarrierKind) -> Counter:
    return Counter(ev.labels[kind].cls for ev in events if kind in ev.labels)
