"""Command-line interface: validate, annotate, evaluate, stats.

Exit codes: 0 success, 1 validation or evaluation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import multiprocessing
import os
import sys
from pathlib import Path

from . import __version__
from .annotate import AnnotationError, annotate, annotation_to_dict, parse_annotation
from .config import load_config
from .coref import resolve
from .docmodel import FormatError, ValidationError, parse_document
from .evaluate import evaluate_corpus, parse_gold
from .gender import GenderCache, GenderProvider
from .mentions import mention_heads
from .ner import person_entities
from .quotes import Quote
from .speakers import map_speakers
from .stats import (
    breakdown_to_csv,
    breakdown_to_json,
    outlet_breakdown,
    top_sources,
    top_sources_to_csv,
)
from .store import Store
from .unify import build_clusters, merge

log = logging.getLogger("quiparle")


def _iter_document_payloads(path: Path):
    """Yield (label, json_text) for a file holding one or many documents.

    A file is one pretty-printed JSON object or an NDJSON stream; whether the
    whole content parses decides which.
    """
    text = path.read_text(encoding="utf-8")
    stripped = text.strip()
    if not stripped:
        return
    try:
        json.loads(stripped)
    except json.JSONDecodeError:
        lines = [line for line in stripped.splitlines() if line.strip()]
        if len(lines) > 1:
            for i, line in enumerate(lines):
                yield f"{path}:{i + 1}", line
            return
    yield str(path), stripped


def _input_files(paths, suffixes=(".json", ".ndjson", ".jsonl")):
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            for sub in sorted(path.rglob("*")):
                if sub.suffix in suffixes and sub.is_file():
                    yield sub
        else:
            yield path


def cmd_validate(args) -> int:
    files = list(_input_files(args.paths))
    if not files:
        print("no input files", file=sys.stderr)
        return 2
    ok = bad = 0
    for path in files:
        try:
            payloads = list(_iter_document_payloads(path))
        except OSError as exc:
            print(f"{path}: I/O error: {exc}")
            bad += 1
            continue
        for label, payload in payloads:
            try:
                doc = parse_document(payload)
            except (FormatError, ValidationError) as exc:
                print(f"{label}: INVALID: {exc}")
                bad += 1
            else:
                print(f"{label}: OK ({len(doc.tokens)} tokens, "
                      f"{len(doc.entities)} entities)")
                ok += 1
    print(f"validated {ok + bad} document(s): {ok} ok, {bad} invalid")
    return 1 if bad else 0


def _providers(config):
    return tuple(GenderProvider(name=name, mode=mode, url=url)
                 for name, mode, url in config.provider_specs)


def _annotate_one(doc_payload, config, cache):
    doc = parse_document(doc_payload)
    return annotate(doc, config, providers=_providers(config), cache=cache)


def cmd_annotate(args) -> int:
    config = load_config(args.config)
    cache = GenderCache(config.gender_cache_path)
    store = Store(args.store) if args.store else None
    out_fh = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout

    payloads = []
    for path in _input_files(args.paths):
        payloads.extend(_iter_document_payloads(path))

    failures = 0
    written = 0

    def handle(result):
        nonlocal written
        if store is not None:
            store.put_annotation(result, config.config_hash)
        out_fh.write(json.dumps(annotation_to_dict(result), ensure_ascii=False)
                     + "\n")
        written += 1

    if args.jobs > 1 and len(payloads) > 1:
        with multiprocessing.Pool(args.jobs, initializer=_init_worker,
                                  initargs=(args.config,)) as pool:
            for outcome in pool.imap(_worker_annotate,
                                     [p for _label, p in payloads]):
                if isinstance(outcome, str):
                    log.error("%s", outcome)
                    failures += 1
                else:
                    handle(parse_annotation(outcome))
    else:
        for label, payload in payloads:
            try:
                handle(_annotate_one(payload, config, cache))
            except (FormatError, ValidationError, AnnotationError) as exc:
                log.error("%s: %s", label, exc)
                failures += 1

    cache.save()
    if out_fh is not sys.stdout:
        out_fh.close()
    log.info("annotated %d document(s), %d failure(s)", written, failures)
    return 0


_WORKER_CONFIG = None
_WORKER_CACHE = None


def _init_worker(config_path):
    global _WORKER_CONFIG, _WORKER_CACHE
    _WORKER_CONFIG = load_config(config_path)
    # a warm, process-local view of the shared cache; new provider responses
    # are persisted only by single-process runs
    _WORKER_CACHE = GenderCache(_WORKER_CONFIG.gender_cache_path)


def _worker_annotate(payload):
    try:
        result = annotate(parse_document(payload), _WORKER_CONFIG,
                          providers=_providers(_WORKER_CONFIG),
                          cache=_WORKER_CACHE)
        return annotation_to_dict(result)
    except Exception as exc:  # noqa: BLE001 - reported in the parent
        return f"annotation failed: {exc}"


def _reference_pairs(gold, config):
    """Run speaker mapping over gold speaker spans (references-SYS)."""
    if gold.get("_doc") is None:
        return []
    doc = gold["_doc"]
    annotation = gold["gold"]
    entities = person_entities(doc, config)
    chains = resolve(doc, mention_heads(doc), config, person_entities=entities)
    clusters = merge(build_clusters(doc, entities, chains, config), config)
    stubs = []
    for quote in annotation.quotes:
        if quote.speaker_span is None:
            continue
        stubs.append(Quote(
            content=doc.surface(quote.quote_span),
            span=quote.quote_span,
            speaker=doc.surface(quote.speaker_span),
            speaker_span=quote.speaker_span,
        ))
    mapped = map_speakers(stubs, clusters, doc, config)
    gold_refs = [q.reference for q in annotation.quotes
                 if q.speaker_span is not None]
    return list(zip(gold_refs, [q.reference for q in mapped]))


def _format_rate(value):
    return "N/A" if value is None else f"{100 * value:.1f}%"


def _print_report(report):
    print("Quote content")
    for threshold, metrics in sorted(report.quote_content.items()):
        print(f"  threshold {threshold}: "
              f"P={_format_rate(metrics.precision)} "
              f"R={_format_rate(metrics.recall)} "
              f"F1={_format_rate(metrics.f1)} "
              f"(matched {metrics.counts['matched']}/{metrics.counts['gold']} "
              f"gold, {metrics.counts['sys']} system)")
        print(f"    verb accuracy {_format_rate(report.verb_accuracy[threshold])}, "
              f"speaker accuracy {_format_rate(report.speaker_accuracy[threshold])}")
    if report.speaker_reference is not None:
        metrics = report.speaker_reference
        print("Speaker reference")
        print(f"  P={_format_rate(metrics.precision)} "
              f"R={_format_rate(metrics.recall)} F1={_format_rate(metrics.f1)} "
              f"({_metric_counts(metrics)})")
    print("People and sources")
    for family, metrics in report.people_sets.items():
        print(f"  {family}: P={_format_rate(metrics.precision)} "
              f"R={_format_rate(metrics.recall)} F1={_format_rate(metrics.f1)}")
    if report.ratios.get("system"):
        print("Gender ratio (system)")
        for family, values in report.ratios["system"].items():
            print(f"  {family}: men {values['men']:.1f}%, "
                  f"women {values['women']:.1f}%, other {values['other']:.1f}%")


def _metric_counts(metrics):
    return ", ".join(f"{k}={v}" for k, v in metrics.counts.items())


def cmd_evaluate(args) -> int:
    config = load_config(args.config)
    gold_files = list(_input_files([args.gold]))
    if not gold_files:
        print("empty gold directory", file=sys.stderr)
        return 1
    golds = []
    for path in gold_files:
        golds.append(parse_gold(path.read_text(encoding="utf-8")))

    annotations = []
    for path in _input_files([args.sys]):
        for _label, payload in _iter_document_payloads(path):
            annotations.append(parse_annotation(payload))
    known = {a.doc_id for a in annotations}
    for gold in golds:
        if gold.doc_id not in known:
            log.warning("gold document %s has no system annotation; excluded",
                        gold.doc_id)
    golds = [g for g in golds if g.doc_id in known]
    if not golds:
        print("no gold/system document id overlap", file=sys.stderr)
        return 1

    reference_pairs = []
    if args.docs:
        docs = {}
        for path in _input_files([args.docs]):
            for _label, payload in _iter_document_payloads(path):
                doc = parse_document(payload)
                docs[doc.doc_id] = doc
        for gold in golds:
            doc = docs.get(gold.doc_id)
            if doc is None:
                continue
            reference_pairs.extend(
                _reference_pairs({"_doc": doc, "gold": gold}, config))

    thresholds = tuple(args.threshold) if args.threshold \
        else (config["threshold_easy"], config["threshold_hard"])
    report = evaluate_corpus(
        golds, annotations, thresholds=thresholds,
        reference_pairs=reference_pairs or None,
        min_speaker_overlap=config["eval_speaker_overlap_chars"])
    _print_report(report)
    if args.out:
        Path(args.out).write_text(
            json.dumps(report.to_dict(), ensure_ascii=False, indent=2),
            encoding="utf-8")
    return 0


def _parse_date(value):
    try:
        return datetime.date.fromisoformat(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def cmd_stats(args) -> int:
    config = load_config(args.config)
    store = Store(args.store)
    window = (args.date_from, args.date_to)
    annotations = []
    for entry in store.list(window=window, outlet=args.outlet):
        if entry["has_annotation"]:
            annotation, _hash = store.get_annotation(entry["doc_id"])
            annotations.append(annotation)
    if not annotations:
        print("no annotations matched the selection")
        return 0
    breakdown = outlet_breakdown(
        annotations, window=window,
        count_occurrences=config["count_source_occurrences"])
    if args.format == "json":
        print(breakdown_to_json(breakdown))
    else:
        print(breakdown_to_csv(breakdown), end="")
    months = sorted({a.published_at.strftime("%Y-%m") for a in annotations})
    for month in months:
        top = top_sources(annotations, month, args.top)
        if top["men"] or top["women"]:
            print(f"\nTop sources {month}")
            print(top_sources_to_csv(top), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quiparle",
        description="Quote attribution and gender-representation statistics "
                    "for French news articles.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="check interchange documents")
    validate.add_argument("paths", nargs="+")
    validate.set_defaults(func=cmd_validate)

    annotate_cmd = sub.add_parser("annotate", help="run the pipeline")
    annotate_cmd.add_argument("paths", nargs="+")
    annotate_cmd.add_argument("--config")
    annotate_cmd.add_argument("--store", default=os.environ.get("QP_STORE"))
    annotate_cmd.add_argument("--jobs", type=int, default=1)
    annotate_cmd.add_argument("--out")
    annotate_cmd.set_defaults(func=cmd_annotate)

    evaluate_cmd = sub.add_parser("evaluate", help="score against gold files")
    evaluate_cmd.add_argument("--gold", required=True)
    evaluate_cmd.add_argument("--sys", required=True)
    evaluate_cmd.add_argument("--docs")
    evaluate_cmd.add_argument("--config")
    evaluate_cmd.add_argument("--threshold", type=float, action="append")
    evaluate_cmd.add_argument("--out")
    evaluate_cmd.set_defaults(func=cmd_evaluate)

    stats_cmd = sub.add_parser("stats", help="aggregate stored annotations")
    stats_cmd.add_argument("--store", default=os.environ.get("QP_STORE"),
                           required=os.environ.get("QP_STORE") is None)
    stats_cmd.add_argument("--config")
    stats_cmd.add_argument("--from", dest="date_from", type=_parse_date)
    stats_cmd.add_argument("--to", dest="date_to", type=_parse_date)
    stats_cmd.add_argument("--outlet")
    stats_cmd.add_argument("--top", type=int, default=100)
    stats_cmd.add_argument("--format", choices=("csv", "json"), default="csv")
    stats_cmd.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("QP_LOG", "WARNING"))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
