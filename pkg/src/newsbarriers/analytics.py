"""Descriptive statistics over an annotated corpus."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .annotate import BARRIERS, BarrierKind, classes_for
from .corpus import CorpusIndex, Event


def exact_decimal(value: Fraction, places: int = 6) -> str:
    q = Decimal(value.numerator) / Decimal(value.denominator)
    return str(q.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


def _categories(events) -> list[str]:
    return sorted({ev.category for ev in events})


@dataclass(frozen=True)
class PublisherStats:
    barrier: str
    category: str
    publishers: int
    articles: int
    publisher_events: int  # sum over publishers of distinct events covered

    @property
    def avg_articles(self) -> Fraction:
        return Fraction(self.articles, self.publishers) if self.publishers else Fraction(0)

    @property
    def avg_events(self) -> Fraction:
        return Fraction(self.publisher_events, self.publishers) if self.publishers else Fraction(0)


def publisher_stats_cell(events: Iterable[Event], corpus: CorpusIndex, barrier, category) -> PublisherStats:
    """Publishers with at least one article in an event of this labeled cell."""
    kind = BarrierKind(barrier)
    articles: dict[str, int] = {}
    covered: dict[str, set] = {}
    for ev in events:
        if ev.category != category or kind not in ev.labels:
            continue
        for art in corpus.members(ev):
            articles[art.publisher_id] = articles.get(art.publisher_id, 0) + 1
            covered.setdefault(art.publisher_id, set()).add(ev.event_id)
    return PublisherStats(kind.value, category, len(articles), sum(articles.values()),
                          sum(len(v) for v in covered.values()))


def publisher_stats(events, corpus: CorpusIndex) -> list[PublisherStats]:
    events = list(events)
    return [publisher_stats_cell(events, corpus, b, c) for b in BARRIERS for c in _categories(events)]


@dataclass(frozen=True)
class ClassDistribution:
    barrier: str
    category: str
    counts: dict

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def imbalance_ratio(self) -> float:
        lo, hi = min(self.counts.values()), max(self.counts.values())
        if hi == 0:
            return 0.0
        return hi / lo if lo else float("inf")


def class_distribution(events) -> list[ClassDistribution]:
    events = list(events)
    out = []
    for b in BARRIERS:
        for c in _categories(events):
            counts = {k: 0 for k in classes_for(b)}
            for ev in events:
                if ev.category == c and b in ev.labels:
                    counts[ev.labels[b].cls] += 1
            out.append(ClassDistribution(b.value, c, counts))
    return out


@dataclass(frozen=True)
class ConceptOverlap:
    sizes: dict
    pairwise: dict  # (name_a, name_b) -> |A & B|
    full: int

    def venn_regions(self, groups: Mapping[str, set]) -> dict:
        """Exclusive region counts keyed by the tuple of member group names."""
        names = list(self.sizes)
        regions: dict = {}
        universe = set().union(*(groups[n] for n in names))
        for item in universe:
            key = tuple(n for n in names if item in groups[n])
            regions[key] = regions.get(key, 0) + 1
        return regions


def concept_overlap(groups: Mapping[str, set]) -> ConceptOverlap:
    if len(groups) < 2:
        raise ValueError("concept overlap needs at least two groups")
    sets = {name: set(v) for name, v in groups.items()}
    pairwise = {(a, b): len(sets[a] & sets[b]) for a, b in combinations(sets, 2)}
    full = len(set.intersection(*sets.values()))
    return ConceptOverlap({n: len(s) for n, s in sets.items()}, pairwise, full)


def concepts_by_barrier(events, corpus: CorpusIndex, category: str | None = None) -> dict[str, set]:
    groups = {b.value: set() for b in BARRIERS}
    for ev in events:
        if category is not None and ev.category != category:
            continue
        concepts = {c for art in corpus.members(ev) for c in art.concepts}
        for b in ev.labels:
            groups[BarrierKind(b).value] |= concepts
    return groups


def concepts_by_category(events, corpus: CorpusIndex, categories=None) -> dict[str, set]:
    groups: dict[str, set] = {}
    for ev in events:
        if categories is not None and ev.category not in categories:
            continue
        groups.setdefault(ev.category, set()).update(c for art in corpus.members(ev) for c in art.concepts)
    return dict(sorted(groups.items()))


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_publisher_stats(path, stats: Iterable[PublisherStats]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["barrier", "category", "publishers", "avg_articles_per_publisher", "avg_events_per_publisher"])
        for s in stats:
            w.writerow([s.barrier, s.category, s.publishers, exact_decimal(s.avg_articles), exact_decimal(s.avg_events)])


def write_class_distribution(path, dists: Iterable[ClassDistribution]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["barrier", "category", "class", "count", "cell_total", "imbalance_ratio"])
        for d in dists:
            ratio = d.imbalance_ratio
            ratio_text = "inf" if ratio == float("inf") else f"{ratio:.6f}"
            for cls, n in d.counts.items():
                w.writerow([d.barrier, d.category, cls, n, d.total, ratio_text])


def write_concept_overlap(path, overlap: ConceptOverlap | None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["kind", "groups", "count"])
        if overlap is None:
            return
        for name, n in overlap.sizes.items():
            w.writerow(["size", name, n])
        for (a, b), n in overlap.pairwise.items():
            w.writerow(["pairwise", f"{a}&{b}", n])
        w.writerow(["all", "&".join(overlap.sizes), overlap.full])
