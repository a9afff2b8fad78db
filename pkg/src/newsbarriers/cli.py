"""Command-line entry point.

Subcommands: ``validate``, ``annotate``, ``train-eval``, ``stats`` and
``synth`` (writes the synthetic concept-benefit dataset).  Exit codes: 0 ok,
1 degraded (grid cells skipped), 2 usage/config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import analytics, plotting
from .annotate import BARRIERS, annotate_corpus, write_labels, write_report
from .classifiers import MODEL_NAMES
from .config import ConfigError, Paths, RunConfig, load_config
from .corpus import CATEGORIES, CorpusError, read_corpus, write_validation_report
from .evaluation import (category_summary, improvement_deltas, improvement_table, paired_reports,
                         run_experiment_grid, write_category_summary, write_deltas, write_improvement,
                         write_model_files, write_reports, write_skips)
from .metadata import (KnowledgeBase, MetadataError, load_country_profiles, load_publisher_registry,
                       unresolved_publishers)
from .synthetic import write_synthetic_dataset

log = logging.getLogger("newsbarriers")

EXIT_OK, EXIT_DEGRADED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def update_manifest(out: Path, produced) -> Path:
    """Merge ``produced`` files (with content hashes) into ``out/manifest.json``."""
    manifest = out / "manifest.json"
    files = {}
    if manifest.exists():
        try:
            files = json.loads(manifest.read_text(encoding="utf-8")).get("files", {})
        except json.JSONDecodeError:
            files = {}
    for p in produced:
        files[Path(p).relative_to(out).as_posix()] = _sha256(Path(p))
    manifest.write_text(json.dumps({"files": dict(sorted(files.items()))}, indent=2) + "\n", encoding="utf-8")
    return manifest


def load_inputs(cfg: RunConfig, need_kb: bool = True):
    cfg.require("corpus", "countries", "publishers") if need_kb else cfg.require("corpus")
    corpus, issues = read_corpus(cfg.paths.corpus)
    kb = None
    if need_kb:
        countries = load_country_profiles(cfg.paths.countries)
        if not countries:
            raise MetadataError(f"{cfg.paths.countries}: no usable country profiles")
        publishers = load_publisher_registry(cfg.paths.publishers, countries)
        kb = KnowledgeBase.build(countries, publishers)
    return corpus, issues, kb


def cmd_validate(cfg: RunConfig, args) -> int:
    corpus, issues, kb = load_inputs(cfg)
    out = cfg.paths.out
    out.mkdir(parents=True, exist_ok=True)
    report = out / "validation_report.json"
    write_validation_report(report, issues)
    used = sorted({a.publisher_id for a in corpus.articles.values()})
    resolved = [p for p in used if p in kb.publishers]
    n_art = len(corpus.articles)
    n_art_ok = sum(1 for a in corpus.articles.values() if a.publisher_id in kb.publishers)
    unmatched = unresolved_publishers(kb.publishers, kb.countries)
    print(f"articles accepted: {n_art}  events: {len(corpus.events)}  issues: {len(issues)}")
    print(f"publishers resolved: {len(resolved)}/{len(used)}  (articles covered: {n_art_ok}/{n_art})")
    print(f"registry publishers with a country profile: {len(kb.publishers) - len(unmatched)}/{len(kb.publishers)}")
    for issue in issues:
        print(f"  line {issue.line}: {issue.field or '-'}: {issue.reason}")
    update_manifest(out, [report])
    return EXIT_OK


def cmd_annotate(cfg: RunConfig, args) -> int:
    corpus, _, kb = load_inputs(cfg)
    events, report = annotate_corpus(corpus, kb, cfg.thresholds)
    out = cfg.paths.out
    out.mkdir(parents=True, exist_ok=True)
    labels, rep = out / "labels.jsonl", out / "annotation_report.json"
    write_labels(labels, events)
    write_report(rep, report)
    for b in BARRIERS:
        print(f"{b.value:<11} labeled {report.labeled[b.value]:>6}  dropped {report.dropped[b.value]:>6}")
    update_manifest(out, [labels, rep])
    return EXIT_OK


def cmd_train_eval(cfg: RunConfig, args) -> int:
    corpus, _, kb = load_inputs(cfg)
    events, _ = annotate_corpus(corpus, kb, cfg.thresholds)
    result = run_experiment_grid(events, corpus, cfg.grid, cfg.features, cfg.train, cfg.models, cfg.split,
                                 jobs=cfg.workers)
    out = cfg.paths.out
    figs = out / "figures"
    figs.mkdir(parents=True, exist_ok=True)
    produced = []

    def emit(name, writer, *data):
        path = out / name
        writer(path, *data)
        produced.append(path)

    emit("reports.csv", write_reports, result.reports)
    emit("reports_by_category.csv", write_category_summary, category_summary(result.reports))
    paired = paired_reports(result.reports)
    deltas = improvement_deltas(paired)
    table = improvement_table(paired)
    emit("deltas.csv", write_deltas, deltas)
    emit("improvement.csv", write_improvement, table)
    emit("skips.csv", write_skips, result.skips)
    produced += write_model_files(out / "models", result.models)
    if deltas:
        produced.append(plotting.plot_metric_comparison(deltas, figs / "macro_f1.svg", "macro_f1"))
        produced.append(plotting.plot_metric_comparison(deltas, figs / "accuracy.svg", "accuracy"))
        produced.append(plotting.plot_improvement(table, figs / "improvement.svg"))
    update_manifest(out, produced)
    for r in result.reports:
        print(f"{r.barrier:<11} {r.category:<10} {r.model:<4} {r.features:<14} "
              f"acc={r.accuracy:.4f} macroF1={r.macro_f1:.4f} n={r.n_test}")
    for s in result.skips:
        log.warning("skipped %s/%s/%s/%s: %s", s.barrier, s.category, s.model, s.features, s.reason)
    return EXIT_DEGRADED if result.skips else EXIT_OK


def cmd_stats(cfg: RunConfig, args) -> int:
    corpus, _, kb = load_inputs(cfg)
    events, _ = annotate_corpus(corpus, kb, cfg.thresholds)
    out = cfg.paths.out
    figs = out / "figures"
    figs.mkdir(parents=True, exist_ok=True)
    produced = []

    dists = analytics.class_distribution(events)
    stats = analytics.publisher_stats(events, corpus)
    if args.groups == "categories":
        groups = analytics.concepts_by_category(events, corpus, args.categories)
    else:
        groups = analytics.concepts_by_barrier(events, corpus, args.category)
    overlap = analytics.concept_overlap(groups) if len(groups) >= 2 else None

    for name, writer, data in (("class_distribution.csv", analytics.write_class_distribution, dists),
                               ("publisher_stats.csv", analytics.write_publisher_stats, stats),
                               ("concept_overlap.csv", analytics.write_concept_overlap, overlap)):
        writer(out / name, data)
        produced.append(out / name)
    if events:
        produced.append(plotting.plot_class_distribution(dists, figs / "class_distribution.svg"))
        produced.append(plotting.plot_publisher_stats(stats, figs / "publisher_stats.svg"))
    if overlap is not None:
        produced.append(plotting.plot_concept_overlap(groups, overlap, figs / "concept_overlap.svg"))
    update_manifest(out, produced)
    print(f"wrote {len(produced)} files to {out}")
    return EXIT_OK


def cmd_synth(cfg: RunConfig, args) -> int:
    path = write_synthetic_dataset(cfg.paths.out, n_events=args.events, seed=cfg.seed)
    print(f"wrote synthetic dataset; run: newsbarriers train-eval --config {path}")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "annotate": cmd_annotate,
    "train-eval": cmd_train_eval,
    "stats": cmd_stats,
    "synth": cmd_synth,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML run configuration")
    common.add_argument("--seed", type=int, help="override the run seed")
    common.add_argument("--jobs", type=int, help="worker processes (default: number of processors)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--corpus", type=Path)
    common.add_argument("--countries", type=Path)
    common.add_argument("--publishers", type=Path)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="newsbarriers", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check corpus and metadata coverage")
    sub.add_parser("annotate", parents=[common], help="label events for the five barriers")
    te = sub.add_parser("train-eval", parents=[common], help="train and evaluate the classifier grid")
    te.add_argument("--models", help=f"comma-separated subset of {','.join(MODEL_NAMES)}")
    st = sub.add_parser("stats", parents=[common], help="class distributions, publisher stats, concept overlap")
    st.add_argument("--groups", choices=("barriers", "categories"), default="barriers")
    st.add_argument("--category", choices=CATEGORIES, help="restrict barrier grouping to one category")
    st.add_argument("--categories", type=lambda s: s.split(","), help="categories to compare (comma-separated)")
    sy = sub.add_parser("synth", parents=[common], help="write the synthetic concept-benefit dataset")
    sy.add_argument("--events", type=int, default=400)
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    paths = Paths(**vars(cfg.paths))
    for name in ("corpus", "countries", "publishers", "out"):
        value = getattr(args, name)
        if value is not None:
            setattr(paths, name, value)
    cfg = replace(cfg, paths=paths)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.jobs is not None:
        cfg = replace(cfg, jobs=args.jobs)
    if getattr(args, "models", None):
        try:
            cfg = replace(cfg, grid=replace(cfg.grid, models=tuple(m.strip() for m in args.models.split(","))))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return cfg.seeded()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusError, MetadataError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
