"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.
"""

import itertools
import json
import random
import time
from pathlib import Path

import pytest

from quiparle.annotate import annotate, parse_index, serialize_annotation, \
    validate_annotation
from quiparle.config import load_config
from quiparle.docmodel import CharSpan, parse_document
from quiparle.evaluate import (
    alignment_score,
    gender_ratio,
    levenshtein,
    match_quotes,
    people_set_eval,
    speaker_reference_eval,
    verb_speaker_accuracy,
)
from quiparle.ner import person_entities
from quiparle.quotes import extract_all, mark_pairs
from quiparle.stats import outlet_breakdown
from quiparle.unify import merge, parse_name, same_person

from corpus import diner_doc
from genarticles import make_random_article
from oracles import (
    greedy_match_bruteforce,
    levenshtein_matrix,
    naive_set_metrics,
    transitive_closure_components,
)
from test_ner import barnes_doc, juge_doc, lambert_doc, newline_doc
from test_stats_store import annotation as make_annotation
from test_unify import _cluster

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="module")
def config():
    return load_config()


def _report(name):
    print(f"ACCEPTANCE PASS: {name}")


def test_alignment_worked_example():
    started = time.monotonic()
    gold = CharSpan(0, 153)
    sys = CharSpan(84, 200)  # 69 characters of overlap
    score = alignment_score(gold, sys)
    assert score == pytest.approx(0.4510, abs=0.0005)
    assert match_quotes([gold], [sys], 0.3) == [(0, 0)]
    assert match_quotes([gold], [sys], 0.8) == []
    assert time.monotonic() - started < 1.0
    _report("alignment score 69/153 = 0.4510 +-0.0005; matched at 0.3, not 0.8")


def test_speaker_overlap_worked_example():
    sys_span = CharSpan(12, 25)
    gold_span = CharSpan(20, 25)
    from quiparle.docmodel import span_overlap
    assert span_overlap(sys_span, gold_span) == 5
    from quiparle.evaluate import GoldQuote
    pair = (GoldQuote(quote_span=CharSpan(0, 40), speaker_span=gold_span,
                      verb_span=None),
            GoldQuote(quote_span=CharSpan(0, 40), speaker_span=sys_span,
                      verb_span=None))
    result = verb_speaker_accuracy([pair], min_speaker_overlap=1)
    assert result["speaker_accuracy"] == 1.0
    _report("speaker spans [12,25) vs [20,25): overlap 5, correct at >=1 char")


def test_metric_oracle_equivalence():
    started = time.monotonic()
    rng = random.Random(2024)
    names = ["anne roy", "paul biya", "marie côté", "luc roy", "zoé blais",
             "tom lanneau", "eva joly", ""]
    for round_number in range(200):
        gold_spans, sys_spans = [], []
        for _ in range(rng.randint(0, 6)):
            start = rng.randint(0, 160)
            gold_spans.append(CharSpan(start, start + rng.randint(1, 50)))
        for _ in range(rng.randint(0, 6)):
            start = rng.randint(0, 160)
            sys_spans.append(CharSpan(start, start + rng.randint(1, 50)))
        threshold = rng.choice([0.3, 0.8])
        assert match_quotes(gold_spans, sys_spans, threshold) == \
            greedy_match_bruteforce(
                [(s.start, s.end) for s in gold_spans],
                [(s.start, s.end) for s in sys_spans], threshold)

        pairs = [(rng.choice(names), rng.choice(names))
                 for _ in range(rng.randint(0, 6))]
        result = speaker_reference_eval(pairs)
        correct = sum(
            1 for g, s in pairs
            if g and s and levenshtein_matrix(g.lower(), s.lower()) < 2)
        gold_count = sum(1 for g, _ in pairs if g)
        sys_count = sum(1 for _, s in pairs if s)
        assert result.counts["correct_references"] == correct
        assert result.counts["gold_reference_count"] == gold_count
        assert result.counts["system_reference_count"] == sys_count
        if sys_count:
            assert result.precision == pytest.approx(correct / sys_count)
        if gold_count:
            assert result.recall == pytest.approx(correct / gold_count)

        people_names = [n for n in names if n]
        articles = []
        for _ in range(rng.randint(1, 4)):
            true_set = set(rng.sample(people_names, rng.randint(0, 6)))
            pred_set = set(rng.sample(people_names, rng.randint(0, 6)))
            articles.append((true_set, pred_set))
        result = people_set_eval(articles)
        tp, fp, fn, precision, recall, f1 = naive_set_metrics(
            [a for a, _ in articles], [b for _, b in articles])
        assert result.counts == {"tp": tp, "fp": fp, "fn": fn}
        assert result.precision == precision
        assert result.recall == recall
        assert result.f1 == f1
    elapsed = time.monotonic() - started
    assert elapsed < 30.0
    _report(f"200 randomized metric sets match brute-force oracles "
            f"({elapsed:.1f}s)")


def test_entity_unification_oracle(config):
    rng = random.Random(99)
    firsts = ["Anne", "Paul", "Marie", "Luc", None]
    lasts = ["Roy", "Tremblay", "Côté", None]

    def canonical(clusters):
        return sorted(sorted(e.text for e in c.member_entities)
                      for c in clusters)

    for _ in range(50):
        texts = []
        for _ in range(rng.randint(1, 5)):
            first, last = rng.choice(firsts), rng.choice(lasts)
            if not first and not last:
                first = "Anne"
            texts.append(" ".join(p for p in (first, last) if p))
        base = [_cluster(t, i * 40, config) for i, t in enumerate(texts)]

        def related(a, b):
            return same_person(a.name_parts, b.name_parts) == "same"

        expected_groups = sorted(
            sorted(base[i].member_entities[0].text for i in group)
            for group in transitive_closure_components(base, related)
        )
        for perm in itertools.permutations(base):
            assert canonical(merge(list(perm), config)) == expected_groups

    trudeau = [
        _cluster("Justin Trudeau", 0, config),
        _cluster("Justin", 40, config),
        _cluster("Monsieur Trudeau", 80, config),
        _cluster("Trudeau", 120, config),
    ]
    for perm in itertools.permutations(trudeau):
        merged = merge(list(perm), config)
        assert len(merged) == 1
        assert merged[0].representative == "Justin Trudeau"
    _report("cluster merging equals union-find closure on all permutations; "
            "Trudeau fixture collapses to 'Justin Trudeau'")


def test_quote_type_coverage_golden_corpus(config):
    lines = []
    for path in sorted((FIXTURES / "corpus10").glob("*.json")):
        doc = parse_document(path.read_text(encoding="utf-8"))
        lines.append((doc.doc_id, serialize_annotation(annotate(doc, config))))
    golden = {}
    for line in (FIXTURES / "golden_annotations.ndjson").read_text(
            encoding="utf-8").strip().splitlines():
        golden[json.loads(line)["doc_id"]] = line
    assert len(golden) == 10
    for doc_id, line in lines:
        assert line == golden[doc_id], f"golden mismatch for {doc_id}"

    chang = json.loads(golden["technologie-chang"])
    record = chang["quotes"][0]
    assert list(record) == [
        "speaker", "speaker_index", "quote", "quote_index", "verb",
        "verb_index", "quote_token_count", "quote_type", "is_floating_quote",
        "reference",
    ]
    assert record["quote_type"] == "CVS"
    assert record["quote_token_count"] == 16
    kinds = set()
    for line in golden.values():
        for quote in json.loads(line)["quotes"]:
            kinds.add(quote["quote_type"])
    floating = [q for line in golden.values()
                for q in json.loads(line)["quotes"] if q["is_floating_quote"]]
    assert floating, "corpus must exercise floating quotes"
    _report("10-article corpus reproduces the golden quote set byte-for-byte "
            "(incl. CVS / 16 tokens)")


def test_pipeline_invariants_500_documents(config):
    rng = random.Random(7)
    for i in range(500):
        raw = make_random_article(rng, f"gen-{i}")
        doc = parse_document(raw)
        annotation = annotate(doc, config)
        validate_annotation(annotation, doc)
        for record in annotation.quotes:
            span = parse_index(record["quote_index"])
            assert doc.text[span.start:span.end] == record["quote"]
        pairs = mark_pairs(doc)
        for quote in extract_all(doc, config):
            if quote.kind == "direct":
                assert any(open_i < quote.span.start
                           and quote.span.end <= close_i
                           for open_i, close_i, _ in pairs), \
                    (doc.text, quote.content)
    _report("pipeline invariants hold on 500 random documents")


def test_gender_ratio_reproduction():
    fixture = [
        make_annotation("a", "La Gazette", "2022-01-10",
                        men=["A", "B"], women=["C"]),
        make_annotation("b", "La Gazette", "2022-01-11", men=["D"]),
    ]
    ratios = gender_ratio(fixture)
    assert ratios["sources"] == {"men": 75.0, "women": 25.0, "other": 0.0}
    breakdown = outlet_breakdown(fixture)
    assert breakdown["rows"][0]["men_pct"] == 75.0
    assert breakdown["rows"][0]["women_pct"] == 25.0
    assert breakdown["rows"][0]["other_pct"] == 0.0

    rng = random.Random(12)
    annotations = []
    for i in range(40):
        annotations.append(make_annotation(
            f"r{i}", rng.choice(["A", "B"]), "2022-03-01",
            men=[f"m{i}{j}" for j in range(rng.randint(0, 4))],
            women=[f"w{i}{j}" for j in range(rng.randint(0, 4))],
        ))
    result = outlet_breakdown(annotations)
    for row in result["rows"] + [result["total"]]:
        assert row["men_pct"] + row["women_pct"] + row["other_pct"] == \
            pytest.approx(100.0, abs=0.1)
    _report("planted corpus reproduces 75.0/25.0/0.0; random rows sum to 100")


def test_ner_worked_examples(config):
    cases = [
        (barnes_doc(), "Maître Robert Barnes"),
        (lambert_doc(), "Cassandre Lambert-Pellerin"),
        (juge_doc(), "Anne-Marie Jacques"),
        (newline_doc(), "Julien Jean"),
    ]
    for doc, expected in cases:
        texts = {e.text for e in person_entities(doc, config)}
        assert expected in texts, f"{expected!r} not in {texts!r}"
    diner = parse_document(diner_doc())
    texts = {e.text for e in person_entities(diner, config)}
    assert "Pierre Dupont et Marie Jugneau" in texts
    _report("five NER repair fixtures produce the corrected entities exactly")
