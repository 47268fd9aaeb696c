"""Evaluation against hand-annotated gold files.

Quote alignment uses overlap/gold-length scoring with easy (0.3) and hard
(0.8) thresholds; verbs must match spans exactly while speakers only need a
one-character overlap; speaker references count as correct within a
Levenshtein distance of 1 after lowercasing; people/source sets are compared
with plain set operations after lowercasing and trimming. Zero denominators
surface as None (printed N/A), never as zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .docmodel import CharSpan, span_overlap


class UndefinedScoreError(ValueError):
    pass


@dataclass(frozen=True)
class GoldQuote:
    quote_span: CharSpan
    speaker_span: CharSpan | None = None
    verb_span: CharSpan | None = None
    quote_text: str = ""
    speaker_text: str = ""
    verb_text: str = ""
    reference: str = ""


@dataclass
class GoldAnnotation:
    doc_id: str
    quotes: list
    people: list          # dicts {"name": ..., "gender": f|m|x, "source": bool}


def _span_from(value):
    if not value:
        return None
    start, end = value
    return CharSpan(int(start), int(end))


def parse_gold(raw) -> GoldAnnotation:
    """One gold file: spans as [start, end] pairs plus named people."""
    data = json.loads(raw) if isinstance(raw, (str, bytes)) else raw
    quotes = []
    for entry in data.get("quotes", []):
        quotes.append(GoldQuote(
            quote_span=_span_from(entry["quote"]),
            speaker_span=_span_from(entry.get("speaker")),
            verb_span=_span_from(entry.get("verb")),
            quote_text=entry.get("quote_text", ""),
            speaker_text=entry.get("speaker_text", ""),
            verb_text=entry.get("verb_text", ""),
            reference=entry.get("reference", ""),
        ))
    people = [
        {"name": p["name"], "gender": p.get("gender", "x"),
         "source": bool(p.get("source", False))}
        for p in data.get("people", [])
    ]
    names = [p["name"].lower().strip() for p in people]
    if len(names) != len(set(names)):
        raise ValueError(
            f"gold file {data['doc_id']!r} lists a person twice; each person "
            "appears once under their most complete name")
    return GoldAnnotation(doc_id=data["doc_id"], quotes=quotes, people=people)


def alignment_score(gold_span: CharSpan, sys_span: CharSpan) -> float:
    """Overlap length divided by the gold span length."""
    if len(gold_span) == 0:
        raise UndefinedScoreError("gold span has zero length")
    return span_overlap(gold_span, sys_span) / len(gold_span)


def match_quotes(gold_spans: list, sys_spans: list, threshold: float) -> list:
    """One-to-one (gold, sys) index pairs, greedily by descending score.

    Each gold quote wants its best-scoring system quote at or above the
    threshold; a system quote is consumed by at most one gold quote so
    precision cannot be double-counted.
    """
    scored = []
    for g, gold in enumerate(gold_spans):
        for s, sys in enumerate(sys_spans):
            score = alignment_score(gold, sys)
            if score >= threshold:
                scored.append((-score, g, s))
    scored.sort()
    matched = []
    gold_used = set()
    sys_used = set()
    for _neg, g, s in scored:
        if g in gold_used or s in sys_used:
            continue
        gold_used.add(g)
        sys_used.add(s)
        matched.append((g, s))
    return sorted(matched)


def _rate(numerator, denominator):
    return numerator / denominator if denominator else None


def f1_score(precision, recall):
    if precision is None or recall is None or precision + recall == 0:
        return None
    return 2 * precision * recall / (precision + recall)


@dataclass
class MetricSlice:
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    counts: dict = field(default_factory=dict)

    def to_dict(self):
        return {"precision": self.precision, "recall": self.recall,
                "f1": self.f1, **self.counts}


def quote_match_slice(matched_count, gold_count, sys_count) -> MetricSlice:
    precision = _rate(matched_count, sys_count)
    recall = _rate(matched_count, gold_count)
    return MetricSlice(
        precision=precision, recall=recall, f1=f1_score(precision, recall),
        counts={"matched": matched_count, "gold": gold_count, "sys": sys_count},
    )


def verb_speaker_accuracy(pairs: list, min_speaker_overlap: int = 1) -> dict:
    """Accuracies over matched (gold, sys) quote pairs only.

    Verbs need identical spans; speakers pass on any overlap of at least
    ``min_speaker_overlap`` characters. No pairs means undefined, not zero.
    """
    if not pairs:
        return {"verb_accuracy": None, "speaker_accuracy": None}
    verb_ok = speaker_ok = 0
    for gold, sys in pairs:
        if gold.verb_span == sys.verb_span:
            verb_ok += 1
        if gold.speaker_span is not None and sys.speaker_span is not None \
                and span_overlap(gold.speaker_span, sys.speaker_span) \
                >= min_speaker_overlap:
            speaker_ok += 1
        elif gold.speaker_span is None and sys.speaker_span is None:
            speaker_ok += 1
    return {"verb_accuracy": verb_ok / len(pairs),
            "speaker_accuracy": speaker_ok / len(pairs)}


def levenshtein(a: str, b: str) -> int:
    """Edit distance, two-row rolling variant."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i] + [0] * len(b)
        for j, cb in enumerate(b, 1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            )
        previous = current
    return previous[-1]


def references_equivalent(gold_ref: str, sys_ref: str,
                          max_distance: int = 2) -> bool:
    """Lowercased edit distance strictly below ``max_distance`` (typos pass)."""
    return levenshtein(gold_ref.lower(), sys_ref.lower()) < max_distance


def speaker_reference_eval(pairs: list, max_distance: int = 2) -> MetricSlice:
    """Reference scoring over pooled (gold_ref, sys_ref) speaker pairs.

    Pairs are weighted equally across the whole corpus, so documents with
    many speakers weigh more than documents with few.
    """
    gold_count = sum(1 for gold, _sys in pairs if gold)
    sys_count = sum(1 for _gold, sys in pairs if sys)
    correct = sum(
        1 for gold, sys in pairs
        if gold and sys and references_equivalent(gold, sys, max_distance)
    )
    precision = _rate(correct, sys_count)
    recall = _rate(correct, gold_count)
    return MetricSlice(
        precision=precision, recall=recall, f1=f1_score(precision, recall),
        counts={"correct_references": correct,
                "system_reference_count": sys_count,
                "gold_reference_count": gold_count},
    )


def _clean_names(names) -> set:
    return {n.lower().strip() for n in names if n and n.strip()}


def people_set_eval(article_pairs: list) -> MetricSlice:
    """Set metrics over (true_names, pred_names) pairs, summed per article."""
    tp = fp = fn = 0
    for true_names, pred_names in article_pairs:
        true_set = _clean_names(true_names)
        pred_set = _clean_names(pred_names)
        tp += len(true_set & pred_set)
        fp += len(pred_set - true_set)
        fn += len(true_set - pred_set)
    precision = _rate(tp, tp + fp)
    recall = _rate(tp, tp + fn)
    return MetricSlice(
        precision=precision, recall=recall, f1=f1_score(precision, recall),
        counts={"tp": tp, "fp": fp, "fn": fn},
    )


def gender_ratio(annotations: list) -> dict:
    """Percentage of men / women / other among people and among sources."""
    totals = {"people": {"men": 0, "women": 0, "other": 0},
              "sources": {"men": 0, "women": 0, "other": 0}}
    for annotation in annotations:
        totals["people"]["women"] += len(annotation.women_mentioned)
        totals["people"]["men"] += len(annotation.men_mentioned)
        totals["people"]["other"] += len(annotation.other_mentioned)
        totals["sources"]["women"] += len(annotation.women_sources)
        totals["sources"]["men"] += len(annotation.men_sources)
        totals["sources"]["other"] += len(annotation.other_sources)
    out = {}
    for family, counts in totals.items():
        total = sum(counts.values())
        if total == 0:
            raise UndefinedScoreError(f"no {family} to compute a ratio over")
        out[family] = {key: 100.0 * value / total for key, value in counts.items()}
    return out


GOLD_SET_FAMILIES = ("people", "women", "men", "sources",
                     "women_sources", "men_sources")


def _gold_name_sets(gold: GoldAnnotation) -> dict:
    sources = {p["name"] for p in gold.people if p["source"]}
    sources |= {q.reference for q in gold.quotes if q.reference}
    by_gender = {"f": set(), "m": set(), "x": set()}
    for person in gold.people:
        by_gender.setdefault(person["gender"], set()).add(person["name"])
    names = {p["name"] for p in gold.people}
    return {
        "people": names,
        "women": by_gender["f"],
        "men": by_gender["m"],
        "sources": sources & names if names else sources,
        "women_sources": sources & by_gender["f"],
        "men_sources": sources & by_gender["m"],
    }


def _system_name_sets(annotation) -> dict:
    return {
        "people": set(annotation.people_mentioned),
        "women": set(annotation.women_mentioned),
        "men": set(annotation.men_mentioned),
        "sources": set(annotation.sources),
        "women_sources": set(annotation.women_sources),
        "men_sources": set(annotation.men_sources),
    }


@dataclass
class EvalReport:
    quote_content: dict = field(default_factory=dict)     # threshold -> slice
    verb_accuracy: dict = field(default_factory=dict)     # threshold -> float|None
    speaker_accuracy: dict = field(default_factory=dict)
    speaker_reference: MetricSlice | None = None
    people_sets: dict = field(default_factory=dict)       # family -> slice
    ratios: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "quote_content": {str(t): s.to_dict()
                              for t, s in self.quote_content.items()},
            "verb_accuracy": {str(t): v for t, v in self.verb_accuracy.items()},
            "speaker_accuracy": {str(t): v
                                 for t, v in self.speaker_accuracy.items()},
            "speaker_reference": (self.speaker_reference.to_dict()
                                  if self.speaker_reference else None),
            "people_sets": {k: s.to_dict() for k, s in self.people_sets.items()},
            "gender_ratio": self.ratios,
        }


def _sys_quotes_as_gold(annotation) -> list:
    from .annotate import parse_index

    out = []
    for record in annotation.quotes:
        out.append(GoldQuote(
            quote_span=parse_index(record["quote_index"]),
            speaker_span=parse_index(record["speaker_index"]),
            verb_span=parse_index(record["verb_index"]),
            quote_text=record["quote"],
            speaker_text=record["speaker"],
            verb_text=record["verb"],
            reference=record.get("reference", ""),
        ))
    return out


def evaluate_corpus(golds: list, annotations: list, thresholds=(0.3, 0.8),
                    reference_pairs=None, min_speaker_overlap=1) -> EvalReport:
    """All metric families over matched (gold, system annotation) pairs."""
    by_doc = {a.doc_id: a for a in annotations}
    report = EvalReport()

    for threshold in thresholds:
        matched_total = gold_total = sys_total = 0
        pairs = []
        for gold in golds:
            annotation = by_doc.get(gold.doc_id)
            if annotation is None:
                continue
            sys_quotes = _sys_quotes_as_gold(annotation)
            gold_total += len(gold.quotes)
            sys_total += len(sys_quotes)
            matches = match_quotes([q.quote_span for q in gold.quotes],
                                   [q.quote_span for q in sys_quotes],
                                   threshold)
            matched_total += len(matches)
            pairs.extend((gold.quotes[g], sys_quotes[s]) for g, s in matches)
        report.quote_content[threshold] = quote_match_slice(
            matched_total, gold_total, sys_total)
        accuracy = verb_speaker_accuracy(pairs, min_speaker_overlap)
        report.verb_accuracy[threshold] = accuracy["verb_accuracy"]
        report.speaker_accuracy[threshold] = accuracy["speaker_accuracy"]

    if reference_pairs:
        report.speaker_reference = speaker_reference_eval(reference_pairs)

    for family in GOLD_SET_FAMILIES:
        pairs = []
        for gold in golds:
            annotation = by_doc.get(gold.doc_id)
            if annotation is None:
                continue
            pairs.append((_gold_name_sets(gold)[family],
                          _system_name_sets(annotation)[family]))
        report.people_sets[family] = people_set_eval(pairs)

    try:
        report.ratios["system"] = gender_ratio(
            [by_doc[g.doc_id] for g in golds if g.doc_id in by_doc])
    except UndefinedScoreError:
        report.ratios["system"] = None
    return report
