"""Splitting, metrics and the baseline-vs-concepts experiment grid."""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .annotate import BarrierKind, classes_for
from .classifiers import (MODEL_NAMES, TrainConfig, model_to_json, predict, train_decision_tree, train_knn,
                          train_logistic, train_mlp, train_naive_bayes)
from .features import FeatureConfig, VocabularyError, featurize_dataset, to_csr
from .seeding import derive_seed, substream

log = logging.getLogger(__name__)

FEATURE_MODES = ("text", "text+concepts")
BASELINE, PROPOSED = FEATURE_MODES


class SplitError(ValueError):
    pass


class UndefinedMetricError(ValueError):
    pass


@dataclass(frozen=True)
class SplitPlan:
    seed: int = 42
    train_ratio: float = 0.8

    def __post_init__(self):
        if not 0 < self.train_ratio < 1:
            raise ValueError("train_ratio must be in (0, 1)")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_event_split(event_classes: Mapping[str, str], plan: SplitPlan = SplitPlan(), key=()):
    """Split event ids into train/test, stratified by class.

    Every class keeps at least one event on each side, so each class needs
    two events.  ``key`` names the substream, letting grid cells draw
    independent splits from one seed.
    """
    by_class: dict[str, list[str]] = {}
    for eid, cls in event_classes.items():
        by_class.setdefault(cls, []).append(eid)
    short = {c: len(v) for c, v in by_class.items() if len(v) < 2}
    if short:
        detail = ", ".join(f"{c}={n}" for c, n in sorted(short.items()))
        raise SplitError(f"insufficient events ({detail})")
    rng = substream(plan.seed, "split", *key)
    train, test = [], []
    for cls in sorted(by_class):
        ids = sorted(by_class[cls])
        ids = [ids[i] for i in rng.permutation(len(ids))]
        k = min(max(_round_half_up(plan.train_ratio * len(ids)), 1), len(ids) - 1)
        train += ids[:k]
        test += ids[k:]
    return sorted(train), sorted(test)


@dataclass(frozen=True)
class ConfusionMatrix:
    """``counts[i, j]`` = instances of true class i predicted as class j."""

    classes: tuple
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def tp(self):
        return np.diag(self.counts).astype(np.int64)

    def fp(self):
        return self.counts.sum(axis=0) - self.tp()

    def fn(self):
        return self.counts.sum(axis=1) - self.tp()

    def tn(self):
        return self.total - self.tp() - self.fp() - self.fn()


def confusion(y_true: Sequence, y_pred: Sequence, classes: Sequence) -> ConfusionMatrix:
    if len(y_true) != len(y_pred):
        raise ValueError("y_true and y_pred differ in length")
    pos = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(pos), len(pos)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        if t not in pos or p not in pos:
            raise ValueError(f"unknown class label {t if t not in pos else p!r}")
        counts[pos[t], pos[p]] += 1
    return ConfusionMatrix(tuple(classes), counts)


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise UndefinedMetricError("accuracy is undefined for an empty confusion matrix")
    return float(np.trace(cm.counts)) / cm.total


@dataclass(frozen=True)
class F1Report:
    precision: dict
    recall: dict
    f1: dict
    macro: float
    micro: float
    absent: tuple  # classes seen in neither y_true nor y_pred


def _ratio(num, den) -> float:
    return float(num) / float(den) if den else 0.0


def f1_scores(cm: ConfusionMatrix) -> F1Report:
    """Per-class precision/recall/F1 plus macro and micro F1.

    Zero denominators give 0 by convention.
    """
    if cm.total == 0:
        raise UndefinedMetricError("F1 is undefined for an empty confusion matrix")
    tp, fp, fn = cm.tp(), cm.fp(), cm.fn()
    prec, rec, f1, absent = {}, {}, {}, []
    for i, c in enumerate(cm.classes):
        p = _ratio(tp[i], tp[i] + fp[i])
        r = _ratio(tp[i], tp[i] + fn[i])
        prec[c], rec[c] = p, r
        f1[c] = 2 * p * r / (p + r) if p + r > 0 else 0.0
        if tp[i] + fp[i] + fn[i] == 0:
            absent.append(c)
    micro_p = _ratio(tp.sum(), tp.sum() + fp.sum())
    micro_r = _ratio(tp.sum(), tp.sum() + fn.sum())
    micro = 2 * micro_p * micro_r / (micro_p + micro_r) if micro_p + micro_r > 0 else 0.0
    macro = sum(f1.values()) / len(f1)
    return F1Report(prec, rec, f1, macro, micro, tuple(absent))


@dataclass(frozen=True)
class MetricReport:
    barrier: str
    category: str
    model: str
    features: str
    n_test: int
    accuracy: float
    macro_f1: float
    micro_f1: float
    per_class_f1: dict
    absent_classes: tuple = ()

    @classmethod
    def from_predictions(cls, coords, y_true, y_pred, classes):
        cm = confusion(y_true, y_pred, classes)
        f1 = f1_scores(cm)
        return cls(*coords, n_test=cm.total, accuracy=accuracy(cm), macro_f1=f1.macro, micro_f1=f1.micro,
                   per_class_f1=f1.f1, absent_classes=f1.absent)


@dataclass(frozen=True)
class ModelParams:
    knn_k: int = 5
    nb_alpha: float = 1.0
    tree_max_depth: int = 20
    tree_min_leaf: int = 2


@dataclass(frozen=True)
class Grid:
    barriers: tuple = tuple(b.value for b in BarrierKind)
    categories: tuple | None = None  # None = every category present in the corpus
    models: tuple = MODEL_NAMES
    feature_modes: tuple = FEATURE_MODES

    def __post_init__(self):
        bad = [m for m in self.models if m not in MODEL_NAMES]
        if bad:
            raise ValueError(f"unknown model(s) {', '.join(bad)}; valid names: {', '.join(MODEL_NAMES)}")
        bad = [f for f in self.feature_modes if f not in FEATURE_MODES]
        if bad:
            raise ValueError(f"unknown feature mode(s) {', '.join(bad)}; valid: {', '.join(FEATURE_MODES)}")
        for b in self.barriers:
            BarrierKind(b)


@dataclass(frozen=True)
class Skip:
    barrier: str
    category: str
    model: str
    features: str
    reason: str


@dataclass
class GridResult:
    reports: list = field(default_factory=list)
    skips: list = field(default_factory=list)
    models: dict = field(default_factory=dict)  # file stem -> serialized model

    @property
    def deltas(self):
        return improvement_deltas(paired_reports(self.reports))


def fit_model(name, Xtr, Ctr, y, classes, train_config, params: ModelParams, fingerprint):
    if name == "lr":
        return train_logistic(Xtr, y, train_config, classes, fingerprint)
    if name == "nb":
        return train_naive_bayes(Ctr, y, params.nb_alpha, classes, fingerprint)
    if name == "knn":
        return train_knn(Xtr, y, params.knn_k, classes, fingerprint)
    if name == "dt":
        return train_decision_tree(Xtr, y, params.tree_max_depth, params.tree_min_leaf, classes, fingerprint)
    if name == "mlp":
        return train_mlp(Xtr, y, train_config, classes, fingerprint)
    raise ValueError(f"unknown model {name!r}")


@dataclass(frozen=True)
class CellJob:
    barrier: str
    category: str
    event_classes: dict  # event id -> class
    articles: dict  # event id -> list of NewsArticle
    grid: Grid
    features: FeatureConfig
    train: TrainConfig
    params: ModelParams
    plan: SplitPlan
    keep_models: bool = True


def run_cell(job: CellJob) -> GridResult:
    out = GridResult()
    b, c = job.barrier, job.category

    def skip(reason, model="*", features="*"):
        out.skips.append(Skip(b, c, model, features, reason))
        return out

    if not job.event_classes:
        return skip("no labeled events")
    try:
        train_ids, test_ids = stratified_event_split(job.event_classes, job.plan, key=(b, c))
    except SplitError as exc:
        return skip(str(exc))
    if len({job.event_classes[e] for e in test_ids}) < 2:
        return skip("degenerate split")
    classes = tuple(k for k in classes_for(b) if k in set(job.event_classes.values()))

    def side(ids):
        arts, labels = [], []
        for eid in ids:
            for art in job.articles[eid]:
                arts.append(art)
                labels.append(job.event_classes[eid])
        return arts, labels

    train_arts, y_train = side(train_ids)
    test_arts, y_test = side(test_ids)
    for mode in job.grid.feature_modes:
        fconf = replace(job.features, use_concepts=(mode == PROPOSED))
        try:
            feats = featurize_dataset(train_arts, test_arts, fconf)
        except VocabularyError as exc:
            skip(f"empty vocabulary: {exc}", features=mode)
            continue
        dim = len(feats.vocab)
        Xtr, Xte = to_csr(feats.train, dim), to_csr(feats.test, dim)
        Ctr, Cte = to_csr(feats.train_counts, dim), to_csr(feats.test_counts, dim)
        fingerprint = feats.vocab.fingerprint()
        for name in job.grid.models:
            tconf = replace(job.train, seed=derive_seed(job.train.seed, "train", b, c, name))
            model = fit_model(name, Xtr, Ctr, y_train, classes, tconf, job.params, fingerprint)
            pred = predict(model, Cte if name == "nb" else Xte)
            out.reports.append(MetricReport.from_predictions((b, c, name, mode), y_test, pred.predicted, classes))
            if job.keep_models:
                out.models[f"{b}__{c}__{name}__{mode.replace('+', '_')}"] = model_to_json(model)
    return out


def build_jobs(events, corpus, grid: Grid, features, train, params, plan, keep_models=True) -> list[CellJob]:
    categories = grid.categories
    if categories is None:
        categories = tuple(sorted({ev.category for ev in events}))
    jobs = []
    for b in grid.barriers:
        kind = BarrierKind(b)
        for c in categories:
            cell = [ev for ev in events if ev.category == c and kind in ev.labels]
            jobs.append(CellJob(
                barrier=b,
                category=c,
                event_classes={ev.event_id: ev.labels[kind].cls for ev in cell},
                articles={ev.event_id: corpus.members(ev) for ev in cell},
                grid=grid, features=features, train=train, params=params, plan=plan, keep_models=keep_models,
            ))
    return jobs


def run_experiment_grid(events, corpus, grid: Grid = Grid(), features: FeatureConfig = FeatureConfig(),
                        train: TrainConfig = TrainConfig(), params: ModelParams = ModelParams(),
                        plan: SplitPlan = SplitPlan(), jobs: int = 1, keep_models: bool = True) -> GridResult:
    """Evaluate every (barrier, category, model, feature mode) cell.

    ``events`` are annotated events (``labels`` filled).  Cells run in a
    process pool when ``jobs > 1``; results are merged in grid order, so the
    output does not depend on scheduling.
    """
    cell_jobs = build_jobs(events, corpus, grid, features, train, params, plan, keep_models)
    if jobs > 1 and len(cell_jobs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(run_cell, cell_jobs))
    else:
        parts = [run_cell(j) for j in cell_jobs]
    result = GridResult()
    for part in parts:
        result.reports += part.reports
        result.skips += part.skips
        result.models.update(part.models)
    return result


def _pair(reports):
    table: dict = {}
    for r in reports:
        table.setdefault((r.barrier, r.category, r.model), {})[r.features] = r
    for coords, modes in table.items():
        if set(modes) != set(FEATURE_MODES):
            raise ValueError(f"unpaired report for {coords}: have {sorted(modes)}")
    return table


def paired_reports(reports) -> list[MetricReport]:
    """Drop reports whose (barrier, category, model) lacks one of the feature modes."""
    modes: dict = {}
    for r in reports:
        modes.setdefault((r.barrier, r.category, r.model), set()).add(r.features)
    return [r for r in reports if modes[(r.barrier, r.category, r.model)] == set(FEATURE_MODES)]


def improvement_deltas(reports) -> list[dict]:
    """Proposed minus baseline, per (barrier, category, model)."""
    rows = []
    for (b, c, m), modes in _pair(reports).items():
        base, prop = modes[BASELINE], modes[PROPOSED]
        rows.append({
            "barrier": b, "category": c, "model": m,
            "baseline_accuracy": base.accuracy, "proposed_accuracy": prop.accuracy,
            "delta_accuracy": prop.accuracy - base.accuracy,
            "baseline_macro_f1": base.macro_f1, "proposed_macro_f1": prop.macro_f1,
            "delta_macro_f1": prop.macro_f1 - base.macro_f1,
        })
    return rows


def improvement_table(reports) -> dict[str, dict]:
    """Per barrier, count categories that improve under concept features.

    A category improves when the best proposed-mode model beats the best
    baseline model on macro-F1 or on accuracy (strictly).
    """
    cells: dict = {}
    for (b, c, _), modes in _pair(reports).items():
        best = cells.setdefault((b, c), {"bf": -1.0, "ba": -1.0, "pf": -1.0, "pa": -1.0})
        best["bf"] = max(best["bf"], modes[BASELINE].macro_f1)
        best["ba"] = max(best["ba"], modes[BASELINE].accuracy)
        best["pf"] = max(best["pf"], modes[PROPOSED].macro_f1)
        best["pa"] = max(best["pa"], modes[PROPOSED].accuracy)
    table: dict = {}
    for (b, c), s in sorted(cells.items()):
        row = table.setdefault(b, {"improved": 0, "not_improved": 0, "improved_categories": []})
        if s["pf"] > s["bf"] or s["pa"] > s["ba"]:
            row["improved"] += 1
            row["improved_categories"].append(c)
        else:
            row["not_improved"] += 1
    return table


def category_summary(reports) -> list[dict]:
    """Barrier-averaged accuracy and macro-F1 per (category, model, features)."""
    groups: dict = {}
    for r in reports:
        groups.setdefault((r.category, r.model, r.features), []).append(r)
    rows = []
    for (c, m, f), rs in sorted(groups.items()):
        rows.append({
            "category": c, "model": m, "features": f, "n_barriers": len(rs),
            "mean_accuracy": sum(r.accuracy for r in rs) / len(rs),
            "mean_macro_f1": sum(r.macro_f1 for r in rs) / len(rs),
        })
    return rows


def _fmt(x) -> str:
    return f"{x:.6f}" if isinstance(x, float) else str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(row[h]) for h in header])


REPORT_COLUMNS = ("barrier", "category", "model", "features", "n_test", "accuracy", "macro_f1", "micro_f1",
                  "per_class_f1")


def write_reports(path, reports: Iterable[MetricReport]) -> None:
    rows = []
    for r in reports:
        rows.append({
            "barrier": r.barrier, "category": r.category, "model": r.model, "features": r.features,
            "n_test": r.n_test, "accuracy": r.accuracy, "macro_f1": r.macro_f1, "micro_f1": r.micro_f1,
            "per_class_f1": json.dumps({k: round(v, 6) for k, v in r.per_class_f1.items()}, sort_keys=True),
        })
    _write_csv(path, REPORT_COLUMNS, rows)


def write_deltas(path, deltas) -> None:
    header = ("barrier", "category", "model", "baseline_accuracy", "proposed_accuracy", "delta_accuracy",
              "baseline_macro_f1", "proposed_macro_f1", "delta_macro_f1")
    _write_csv(path, header, deltas)


def write_improvement(path, table) -> None:
    rows = [{"barrier": b, "improved": v["improved"], "not_improved": v["not_improved"],
             "improved_categories": ";".join(v["improved_categories"])} for b, v in table.items()]
    _write_csv(path, ("barrier", "improved", "not_improved", "improved_categories"), rows)


def write_category_summary(path, rows) -> None:
    _write_csv(path, ("category", "model", "features", "n_barriers", "mean_accuracy", "mean_macro_f1"), rows)


def write_skips(path, skips: Iterable[Skip]) -> None:
    rows = [vars(s) for s in skips]
    _write_csv(path, ("barrier", "category", "model", "features", "reason"), rows)


def write_model_files(directory: Path, models: Mapping[str, str]) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for stem, text in sorted(models.items()):
        p = directory / f"{stem}.json"
        p.write_text(text, encoding="utf-8")
        paths.append(p)
    return paths
