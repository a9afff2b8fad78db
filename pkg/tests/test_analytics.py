from __future__ import annotations

import csv
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import article, index_of
from newsbarriers.analytics import (ClassDistribution, class_distribution, concept_overlap, concepts_by_barrier,
                                    concepts_by_category, exact_decimal, publisher_stats, publisher_stats_cell,
                                    write_class_distribution, write_concept_overlap, write_publisher_stats)
from newsbarriers.annotate import BarrierKind, BarrierLabel

K = BarrierKind


def labelled(index, labels):
    return [replace(ev, labels={k: BarrierLabel(k, c) for k, c in labels.get(ev.event_id, {}).items()})
            for ev in index.events.values()]


def five_events():
    arts = [
        article("a1", "e1", "p1", category="sports", concepts=("x", "y")),
        article("a2", "e1", "p2", category="sports", concepts=("y",)),
        article("a3", "e2", "p1", category="sports", concepts=("z",)),
        article("a4", "e3", "p1", category="sports", concepts=("w",)),
        article("a5", "e4", "p3", category="science", concepts=("x",)),
        article("a6", "e5", "p3", category="science", concepts=("q",)),
    ]
    index = index_of(*arts)
    labels = {
        "e1": {K.GEOGRAPHIC: "crossed", K.CULTURAL: "unsure"},
        "e2": {K.GEOGRAPHIC: "not-crossed", K.CULTURAL: "information-crossing"},
        "e3": {K.GEOGRAPHIC: "not-crossed"},
        "e4": {K.GEOGRAPHIC: "crossed", K.CULTURAL: "unsure"},
        "e5": {},
    }
    return labelled(index, labels), index


class TestPublisherStats:
    def test_one_publisher(self):
        index = index_of(article("a1", "e1", "p1"), article("a2", "e1", "p1"), article("a3", "e2", "p1"))
        events = labelled(index, {"e1": {K.ECONOMIC: "unsure"}, "e2": {K.ECONOMIC: "unsure"}})
        s = publisher_stats_cell(events, index, "economic", "society")
        assert (s.publishers, s.avg_articles, s.avg_events) == (1, 3, 2)

    def test_empty_cell_is_zero(self):
        events, index = five_events()
        s = publisher_stats_cell(events, index, "political", "sports")
        assert (s.publishers, s.avg_articles, s.avg_events) == (0, 0, 0)

    def test_average_of_two(self):
        # p1: 2 articles, p2: 4 articles -> 3.0
        arts = [article(f"a{i}", f"e{i}", "p1") for i in range(2)]
        arts += [article(f"b{i}", f"e{i % 2}", "p2") for i in range(4)]
        index = index_of(*arts)
        events = labelled(index, {"e0": {K.POLITICAL: "crossed"}, "e1": {K.POLITICAL: "crossed"}})
        s = publisher_stats_cell(events, index, "political", "society")
        assert s.avg_articles == Fraction(3)
        assert s.avg_events == Fraction(2)

    def test_only_labeled_events_count(self):
        events, index = five_events()
        sports = {(s.barrier, s.category): s for s in publisher_stats(events, index)}
        # cultural/sports covers e1 and e2 only, not e3
        s = sports[("cultural", "sports")]
        assert (s.publishers, s.articles, s.publisher_events) == (2, 3, 3)
        s = sports[("geographic", "sports")]
        assert (s.publishers, s.articles, s.publisher_events) == (2, 4, 4)

    def test_grid_shape(self):
        events, index = five_events()
        stats = publisher_stats(events, index)
        assert len(stats) == 5 * 2


class TestClassDistribution:
    def test_counts(self):
        events, _ = five_events()
        d = {(x.barrier, x.category): x for x in class_distribution(events)}
        assert d[("geographic", "sports")].counts == {"not-crossed": 2, "crossed": 1}
        assert d[("geographic", "science")].counts == {"not-crossed": 0, "crossed": 1}
        assert d[("cultural", "sports")].counts == {"information-not-crossing": 0, "unsure": 1,
                                                    "information-crossing": 1}
        assert d[("linguistic", "science")].total == 0

    def test_imbalance(self):
        assert ClassDistribution("geographic", "x", {"not-crossed": 2, "crossed": 1}).imbalance_ratio == 2.0
        assert ClassDistribution("geographic", "x", {"not-crossed": 0, "crossed": 3}).imbalance_ratio == float("inf")
        assert ClassDistribution("geographic", "x", {"not-crossed": 0, "crossed": 0}).imbalance_ratio == 0.0

    def test_empty(self):
        assert class_distribution([]) == []


class TestConceptOverlap:
    def test_two_groups(self):
        ov = concept_overlap({"A": {"x", "y", "z"}, "B": {"y", "z", "w"}})
        assert ov.pairwise == {("A", "B"): 2}
        assert ov.full == 2
        assert ov.sizes == {"A": 3, "B": 3}

    def test_identical_and_disjoint(self):
        assert concept_overlap({"A": {"x", "y"}, "B": {"x", "y"}}).full == 2
        assert concept_overlap({"A": {"x"}, "B": {"y"}}).full == 0

    def test_three_group_regions(self):
        groups = {"A": {"x", "y", "z"}, "B": {"y", "z", "w"}, "C": {"z", "v"}}
        ov = concept_overlap(groups)
        assert ov.full == 1
        assert ov.venn_regions(groups) == {("A",): 1, ("A", "B"): 1, ("A", "B", "C"): 1, ("B",): 1, ("C",): 1}

    def test_needs_two(self):
        with pytest.raises(ValueError):
            concept_overlap({"A": {"x"}})

    @given(st.sets(st.integers(0, 30)), st.sets(st.integers(0, 30)))
    def test_symmetry(self, a, b):
        assert concept_overlap({"A": a, "B": b}).full == concept_overlap({"B": b, "A": a}).full == len(a & b)

    def test_groupings(self):
        events, index = five_events()
        by_b = concepts_by_barrier(events, index)
        assert by_b["geographic"] == {"x", "y", "z", "w"}
        assert by_b["cultural"] == {"x", "y", "z"}
        assert by_b["political"] == set()
        assert concepts_by_barrier(events, index, "science")["geographic"] == {"x"}
        by_c = concepts_by_category(events, index)
        assert by_c == {"science": {"x", "q"}, "sports": {"x", "y", "z", "w"}}
        assert list(concepts_by_category(events, index, ["sports"])) == ["sports"]


class TestExactDecimal:
    def test_rounding(self):
        assert exact_decimal(Fraction(3)) == "3.000000"
        assert exact_decimal(Fraction(1, 3)) == "0.333333"
        assert exact_decimal(Fraction(2, 3)) == "0.666667"
        # ties to even at the last place
        assert exact_decimal(Fraction(5, 10**7)) == "0.000000"
        assert exact_decimal(Fraction(15, 10**7)) == "0.000002"


class TestWriters:
    def test_publisher_stats_csv(self, tmp_path):
        events, index = five_events()
        write_publisher_stats(tmp_path / "p.csv", publisher_stats(events, index))
        rows = list(csv.DictReader(open(tmp_path / "p.csv")))
        row = next(r for r in rows if (r["barrier"], r["category"]) == ("cultural", "sports"))
        assert row["avg_articles_per_publisher"] == "1.500000"

    def test_class_distribution_csv(self, tmp_path):
        events, _ = five_events()
        write_class_distribution(tmp_path / "c.csv", class_distribution(events))
        rows = list(csv.DictReader(open(tmp_path / "c.csv")))
        assert len(rows) == 2 * (2 * 3 + 3 * 2)
        geo = [r for r in rows if r["barrier"] == "geographic" and r["category"] == "science"]
        assert {r["imbalance_ratio"] for r in geo} == {"inf"}

    def test_overlap_csv(self, tmp_path):
        write_concept_overlap(tmp_path / "o.csv", concept_overlap({"A": {"x", "y"}, "B": {"y"}}))
        assert open(tmp_path / "o.csv").read().splitlines() == [
            "kind,groups,count", "size,A,2", "size,B,1", "pairwise,A&B,1", "all,A&B,1"]
        write_concept_overlap(tmp_path / "e.csv", None)
        assert open(tmp_path / "e.csv").read() == "kind,groups,count\n"
