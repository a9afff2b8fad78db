"""Country profiles and publisher registry backing the barrier annotator."""

from __future__ import annotations

import csv
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

log = logging.getLogger(__name__)

HOFSTEDE_COLUMNS = tuple(f"h{i}" for i in range(1, 7))
PROSPERITY_COLUMNS = tuple(f"p{i}" for i in range(1, 13))
COUNTRY_COLUMNS = ("country_code",) + HOFSTEDE_COLUMNS + PROSPERITY_COLUMNS + ("lat", "lon")
PUBLISHER_COLUMNS = (
    "publisher_id",
    "name",
    "country_code",
    "political_alignment",
    "publishing_language",
)

_COUNTRY_CODE = re.compile(r"^[A-Z]{2}$")


class MetadataError(Exception):
    """A metadata file is structurally unusable."""


@dataclass(frozen=True)
class CountryProfile:
    country_code: str
    hofstede: tuple[float, ...]
    prosperity: tuple[float, ...]
    latitude: float
    longitude: float

    def __post_init__(self):
        if len(self.hofstede) != 6:
            raise ValueError(f"{self.country_code}: expected 6 Hofstede values, got {len(self.hofstede)}")
        if len(self.prosperity) != 12:
            raise ValueError(f"{self.country_code}: expected 12 prosperity values, got {len(self.prosperity)}")
        if not -90 <= self.latitude <= 90:
            raise ValueError(f"{self.country_code}: latitude {self.latitude} out of range")
        if not -180 <= self.longitude <= 180:
            raise ValueError(f"{self.country_code}: longitude {self.longitude} out of range")


@dataclass(frozen=True)
class Publisher:
    publisher_id: str
    name: str
    headquarters_country: str
    political_alignment: str | None
    publishing_language: str | None


@dataclass(frozen=True)
class NormalizedProfiles:
    """Per-dimension min-max scaled cultural and economic vectors."""

    hofstede_min: np.ndarray
    hofstede_max: np.ndarray
    prosperity_min: np.ndarray
    prosperity_max: np.ndarray
    cultural: Mapping[str, np.ndarray]
    economic: Mapping[str, np.ndarray]


@dataclass(frozen=True)
class KnowledgeBase:
    countries: Mapping[str, CountryProfile]
    publishers: Mapping[str, Publisher]
    normalized: NormalizedProfiles

    @classmethod
    def build(cls, countries, publishers):
        return cls(countries, publishers, normalize_profiles(countries))


def normalize_alignment(value: str | None) -> str | None:
    """Lower-case and hyphen-join an alignment label; blank becomes ``None``."""
    if value is None:
        return None
    text = re.sub(r"[\s_\-‐-―]+", "-", value.strip().lower())
    text = re.sub(r"-{2,}", "-", text).strip("-")
    return text or None


def _read_rows(path: str | Path, required: tuple[str, ...]):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise MetadataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if not header:
            return
        missing = [c for c in required if c not in header]
        if missing:
            raise MetadataError(f"{path}: missing required column(s) {', '.join(missing)}")
        for lineno, row in enumerate(reader, 2):
            yield lineno, row


def load_country_profiles(path: str | Path) -> dict[str, CountryProfile]:
    profiles: dict[str, CountryProfile] = {}
    for lineno, row in _read_rows(path, COUNTRY_COLUMNS):
        code = (row.get("country_code") or "").strip().upper()
        if not _COUNTRY_CODE.match(code):
            log.warning("%s:%d: bad country code %r, row skipped", path, lineno, code)
            continue
        try:
            values = [float(row[c]) for c in HOFSTEDE_COLUMNS + PROSPERITY_COLUMNS + ("lat", "lon")]
        except (TypeError, ValueError):
            log.warning("%s:%d: missing or non-numeric cell, row skipped", path, lineno)
            continue
        if not all(math.isfinite(v) for v in values):
            log.warning("%s:%d: non-finite value, row skipped", path, lineno)
            continue
        try:
            profile = CountryProfile(code, tuple(values[:6]), tuple(values[6:18]), values[18], values[19])
        except ValueError as exc:
            log.warning("%s:%d: %s, row skipped", path, lineno, exc)
            continue
        if code in profiles:
            log.warning("%s:%d: duplicate country %s, last row wins", path, lineno, code)
        profiles[code] = profile
    return profiles


def load_publisher_registry(path: str | Path, countries: Mapping[str, CountryProfile] | None = None) -> dict[str, Publisher]:
    """Load ``publishers.csv``.

    Publishers whose headquarters has no profile in ``countries`` are kept but
    logged; see :func:`unresolved_publishers`.
    """
    registry: dict[str, Publisher] = {}
    for lineno, row in _read_rows(path, PUBLISHER_COLUMNS):
        pid = (row.get("publisher_id") or "").strip()
        code = (row.get("country_code") or "").strip().upper()
        if not pid or not _COUNTRY_CODE.match(code):
            log.warning("%s:%d: missing publisher id or bad country code, row skipped", path, lineno)
            continue
        lang = (row.get("publishing_language") or "").strip() or None
        pub = Publisher(
            publisher_id=pid,
            name=(row.get("name") or "").strip(),
            headquarters_country=code,
            political_alignment=normalize_alignment(row.get("political_alignment")),
            publishing_language=lang,
        )
        if pid in registry:
            log.warning("%s:%d: duplicate publisher %s, last row wins", path, lineno, pid)
        registry[pid] = pub
    if countries is not None:
        for pub in unresolved_publishers(registry, countries):
            log.warning("publisher %s: no profile for country %s", pub.publisher_id, pub.headquarters_country)
    return registry


def unresolved_publishers(registry: Mapping[str, Publisher], countries: Mapping[str, CountryProfile]) -> list[Publisher]:
    return [p for p in registry.values() if p.headquarters_country not in countries]


def lookup_publisher(registry: Mapping[str, Publisher], publisher_id: str) -> Publisher | None:
    """Exact, case-sensitive lookup; ``None`` when the id is unknown."""
    return registry.get(publisher_id)


def _minmax(matrix: np.ndarray):
    lo = matrix.min(axis=0)
    hi = matrix.max(axis=0)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    scaled = np.where(span > 0, (matrix - lo) / safe, 0.0)
    return lo, hi, np.clip(scaled, 0.0, 1.0)


def normalize_profiles(profiles: Mapping[str, CountryProfile]) -> NormalizedProfiles:
    """Scale every dimension to [0, 1] over the loaded countries.

    Constant dimensions map to 0.
    """
    codes = list(profiles)
    if not codes:
        raise ValueError("need at least one country profile")
    hof = np.array([profiles[c].hofstede for c in codes], dtype=float)
    pro = np.array([profiles[c].prosperity for c in codes], dtype=float)
    h_lo, h_hi, h_scaled = _minmax(hof)
    p_lo, p_hi, p_scaled = _minmax(pro)
    return NormalizedProfiles(
        hofstede_min=h_lo,
        hofstede_max=h_hi,
        prosperity_min=p_lo,
        prosperity_max=p_hi,
        cultural={c: h_scaled[i] for i, c in enumerate(codes)},
        economic={c: p_scaled[i] for i, c in enumerate(codes)},
    )


def write_country_profiles(path: str | Path, profiles) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COUNTRY_COLUMNS)
        for p in profiles:
            w.writerow([p.country_code, *[repr(float(v)) for v in p.hofstede + p.prosperity],
                        repr(float(p.latitude)), repr(float(p.longitude))])


def write_publisher_registry(path: str | Path, publishers) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PUBLISHER_COLUMNS)
        for p in publishers:
            w.writerow([p.publisher_id, p.name, p.headquarters_country,
                        p.political_alignment or "", p.publishing_language or ""])
