from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

import pytest

from newsbarriers.corpus import NewsArticle, build_index
from newsbarriers.metadata import CountryProfile, KnowledgeBase, Publisher

EXAMPLES = Path(__file__).resolve().parents[1] / "src" / "newsbarriers" / "data" / "annotation_examples"
DATA = Path(__file__).resolve().parent / "data"

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "tests": 0})
    entry["tests"] += 1
    entry["ok"] &= report.outcome == "passed"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {e['title']} ({e['tests']} test(s))")


def article(aid, eid, publisher, *, category="society", concepts=(), language=None, title="t", body="b"):
    return NewsArticle(aid, eid, title, body, publisher, datetime(2019, 1, 1, tzinfo=timezone.utc),
                       category, tuple(concepts), language)


def profile(code, h, p=None, lat=0.0, lon=0.0):
    h = (float(h),) * 6 if not isinstance(h, tuple) else h
    p = (float(h[0]),) * 12 if p is None else ((float(p),) * 12 if not isinstance(p, tuple) else p)
    return CountryProfile(code, h, p, lat, lon)


@pytest.fixture
def small_kb():
    countries = {c: profile(c, v, p) for c, v, p in (("US", 10, 80), ("CA", 12, 82), ("DE", 40, 90), ("NG", 90, 10))}
    publishers = {
        "us1.example": Publisher("us1.example", "US One", "US", "centre", "en"),
        "us2.example": Publisher("us2.example", "US Two", "US", "centre-left", "en"),
        "ca1.example": Publisher("ca1.example", "CA One", "CA", "centre", "fr"),
        "de1.example": Publisher("de1.example", "DE One", "DE", None, "de"),
        "ng1.example": Publisher("ng1.example", "NG One", "NG", "centre", None),
        "xx1.example": Publisher("xx1.example", "Nowhere", "XX", "centre", "en"),
    }
    return KnowledgeBase.build(countries, publishers)


def index_of(*arts):
    return build_index(arts)
