"""Reading, validating and indexing a news corpus stored as JSON Lines.

Each line holds one article object.  Articles sharing an ``event_id`` form an
event; the event is the unit that later receives barrier labels.
"""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator
from urllib.parse import urlsplit

log = logging.getLogger(__name__)

CATEGORIES = (
    "business",
    "computers",
    "games",
    "health",
    "home",
    "recreation",
    "science",
    "shopping",
    "society",
    "sports",
)

REQUIRED_FIELDS = (
    "article_id",
    "event_id",
    "title",
    "body",
    "publisher_id",
    "published_at",
    "category",
    "concepts",
    "language",
)

# years outside this window are accepted with a warning
DATASET_YEARS = (2016, 2021)

_LANG_TAG = re.compile(r"^[A-Za-z]{2,3}(-[A-Za-z0-9]{1,8})*$")


class CorpusError(Exception):
    """The corpus stream could not be read at all."""


@dataclass(frozen=True)
class NewsArticle:
    article_id: str
    event_id: str
    title: str
    body: str
    publisher_id: str
    published_at: datetime
    category: str
    concepts: tuple[str, ...] = ()
    language: str | None = None

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["published_at"] = self.published_at.isoformat()
        rec["concepts"] = list(self.concepts)
        return rec


@dataclass(frozen=True)
class Event:
    event_id: str
    article_ids: tuple[str, ...]
    category: str
    labels: dict = field(default_factory=dict, compare=False, hash=False)


@dataclass(frozen=True)
class ValidationIssue:
    line: int
    field: str | None
    reason: str

    def to_dict(self) -> dict:
        return {"line": self.line, "field": self.field, "reason": self.reason}


@dataclass(frozen=True)
class CorpusIndex:
    """Immutable lookup structure over articles and events."""

    articles: dict[str, NewsArticle]
    events: dict[str, Event]
    by_publisher: dict[str, tuple[str, ...]]
    by_category: dict[str, tuple[str, ...]]

    def __len__(self):
        return len(self.articles)

    def members(self, event: Event | str) -> list[NewsArticle]:
        if isinstance(event, str):
            event = self.events[event]
        return [self.articles[a] for a in event.article_ids]


def is_absolute_uri(value: str) -> bool:
    try:
        parts = urlsplit(value)
    except ValueError:
        return False
    return bool(parts.scheme) and bool(parts.netloc) and " " not in value


def _parse_timestamp(value: str) -> datetime:
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _validate_record(rec) -> tuple[NewsArticle | None, tuple[str | None, str] | None]:
    if not isinstance(rec, dict):
        return None, (None, "record is not a JSON object")
    for name in REQUIRED_FIELDS:
        # a missing event id falls back to a singleton event
        if name not in rec and name != "event_id":
            return None, (name, "missing required field")
    for name in ("article_id", "publisher_id"):
        if not isinstance(rec[name], str) or not rec[name].strip():
            return None, (name, "must be a non-empty string")
    for name in ("title", "body"):
        if not isinstance(rec[name], str):
            return None, (name, "must be a string")
    event_id = rec.get("event_id")
    if event_id in (None, ""):
        event_id = rec["article_id"]
    elif not isinstance(event_id, str):
        return None, ("event_id", "must be a string")
    if rec["category"] not in CATEGORIES:
        return None, ("category", f"unknown category {rec['category']!r}")
    concepts = rec["concepts"]
    if not isinstance(concepts, list) or not all(isinstance(c, str) for c in concepts):
        return None, ("concepts", "must be an array of strings")
    for c in concepts:
        if not is_absolute_uri(c):
            return None, ("concepts", f"not an absolute URI: {c!r}")
    language = rec["language"]
    if language in (None, ""):
        language = None
    elif not isinstance(language, str) or not _LANG_TAG.match(language):
        return None, ("language", f"not a language tag: {language!r}")
    if not isinstance(rec["published_at"], str):
        return None, ("published_at", "must be an ISO-8601 string")
    try:
        ts = _parse_timestamp(rec["published_at"])
    except ValueError:
        return None, ("published_at", f"unparseable timestamp {rec['published_at']!r}")
    article = NewsArticle(
        article_id=rec["article_id"],
        event_id=event_id,
        title=rec["title"],
        body=rec["body"],
        publisher_id=rec["publisher_id"],
        published_at=ts,
        category=rec["category"],
        concepts=tuple(concepts),
        language=language,
    )
    return article, None


def category_of_event(articles: Iterable[NewsArticle]) -> str:
    """Most frequent category among ``articles``; ties go to the earlier category."""
    counts = Counter(a.category for a in articles)
    if not counts:
        raise ValueError("event has no articles")
    best = max(counts.values())
    return next(c for c in CATEGORIES if counts.get(c) == best)


def build_index(articles: Iterable[NewsArticle]) -> CorpusIndex:
    by_id: dict[str, NewsArticle] = {}
    grouped: dict[str, list[str]] = {}
    for art in articles:
        by_id[art.article_id] = art
        grouped.setdefault(art.event_id, []).append(art.article_id)

    events = {}
    for eid, ids in grouped.items():
        events[eid] = Event(eid, tuple(ids), category_of_event(by_id[i] for i in ids))

    by_publisher: dict[str, list[str]] = {}
    for art in by_id.values():
        by_publisher.setdefault(art.publisher_id, []).append(art.article_id)
    by_category: dict[str, list[str]] = {}
    for ev in events.values():
        by_category.setdefault(ev.category, []).append(ev.event_id)

    return CorpusIndex(
        articles=by_id,
        events=events,
        by_publisher={k: tuple(v) for k, v in by_publisher.items()},
        by_category={k: tuple(v) for k, v in by_category.items()},
    )


def _lines(stream) -> Iterator[str]:
    try:
        for raw in stream:
            if isinstance(raw, bytes):
                raw = raw.decode("utf-8")
            yield raw
    except UnicodeDecodeError as exc:
        raise CorpusError(f"corpus is not valid UTF-8: {exc}") from exc
    except OSError as exc:
        raise CorpusError(f"cannot read corpus: {exc}") from exc


def parse_corpus(stream: Iterable[str | bytes]) -> tuple[CorpusIndex, list[ValidationIssue]]:
    """Parse JSON Lines records into a :class:`CorpusIndex`.

    Malformed records are skipped and reported as :class:`ValidationIssue`
    with their 1-based line number.  Blank lines are ignored.
    """
    accepted: list[NewsArticle] = []
    seen: set[str] = set()
    issues: list[ValidationIssue] = []
    lo, hi = DATASET_YEARS
    for lineno, line in enumerate(_lines(stream), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            issues.append(ValidationIssue(lineno, None, f"invalid JSON: {exc.msg}"))
            continue
        article, problem = _validate_record(rec)
        if problem is not None:
            issues.append(ValidationIssue(lineno, *problem))
            continue
        if article.article_id in seen:
            issues.append(ValidationIssue(lineno, "article_id", "duplicate article_id"))
            continue
        if not lo <= article.published_at.year <= hi:
            log.warning("line %d: timestamp %s outside %d-%d", lineno, article.published_at.isoformat(), lo, hi)
        seen.add(article.article_id)
        accepted.append(article)
    return build_index(accepted), issues


def read_corpus(path: str | Path) -> tuple[CorpusIndex, list[ValidationIssue]]:
    try:
        with open(path, "rb") as fh:
            return parse_corpus(fh)
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc


def serialize_corpus(index: CorpusIndex) -> Iterator[str]:
    """Yield one JSON line per article, in index order."""
    for art in index.articles.values():
        yield json.dumps(art.to_record(), ensure_ascii=False, sort_keys=True) + "\n"


def write_corpus(path: str | Path, articles: Iterable[NewsArticle]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for art in articles:
            fh.write(json.dumps(art.to_record(), ensure_ascii=False, sort_keys=True) + "\n")


def write_validation_report(path: str | Path, issues: Iterable[ValidationIssue]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([i.to_dict() for i in issues], fh, indent=2)
        fh.write("\n")
