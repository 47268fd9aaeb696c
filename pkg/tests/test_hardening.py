"""Cross-cutting checks: concurrency, arithmetic on degraded input, unicode."""

import datetime
import json
import multiprocessing

import pytest

from quiparle.annotate import ArticleAnnotation
from quiparle.config import load_config
from quiparle.docmodel import CharSpan, parse_document, token_at_char
from quiparle.evaluate import evaluate_corpus, parse_gold
from quiparle.ner import person_entities
from quiparle.store import Store

from docbuild import build_doc
from strategies import documents
from hypothesis import given, settings


def test_offsets_count_unicode_scalars():
    text = "Zoé 🎉 fête ses 30 ans."
    doc = parse_document(build_doc("emoji", text, [[
        ("Zoé", "Zoé", "PROPN", "Gender=Fem", 4, "nsubj"),
        ("🎉", "🎉", "PUNCT", "", 4, "punct"),
        ("fête", "fêter", "VERB", "", 4, "root"),
        ("ses", "son", "DET", "Number=Plur|Person=3|Poss=Yes", 5, "det"),
        ("30", "30", "NUM", "", 5, "nummod"),
        ("ans", "an", "NOUN", "Gender=Masc|Number=Plur", 2, "obj"),
        (".", ".", "PUNCT", "", 2, "punct"),
    ]]))
    # the emoji is one scalar value: the next token starts two cells later
    party = doc.tokens[1]
    assert party.span.end - party.span.start == 1
    assert doc.text[party.span.start:party.span.end] == "🎉"
    assert token_at_char(doc, party.span.start) == 1


def _writer(args):
    root, doc = args
    store = Store(root)
    store.put_document(doc)
    return True


def test_store_parallel_writers(tmp_path):
    root = str(tmp_path / "store")
    docs = []
    for i in range(8):
        docs.append({
            "doc_id": f"doc-{i}", "outlet": f"Outlet {i % 3}",
            "published_at": "2022-01-01", "text": "", "tokens": [],
            "entities": [],
        })
    with multiprocessing.Pool(4) as pool:
        results = pool.map(_writer, [(root, d) for d in docs])
    assert all(results)
    store = Store(root)
    listed = store.list()
    assert len(listed) == 8
    for doc in docs:
        assert store.get_document(doc["doc_id"]) == doc


def _annotation(doc_id, quotes):
    return ArticleAnnotation(
        doc_id=doc_id, outlet="o", published_at=datetime.date(2022, 1, 1),
        people_mentioned=[], women_mentioned=[], men_mentioned=[],
        other_mentioned=[], sources=[], women_sources=[], men_sources=[],
        other_sources=[], quotes=quotes,
    )


def _sys_quote(start, end):
    return {
        "speaker": "", "speaker_index": "", "quote": "x" * (end - start),
        "quote_index": f"({start}, {end})", "verb": "", "verb_index": "",
        "quote_token_count": 1, "quote_type": "C", "is_floating_quote": False,
        "reference": "",
    }


def test_partial_match_arithmetic():
    gold = parse_gold(json.dumps({
        "doc_id": "d",
        "quotes": [{"quote": [0, 100]}, {"quote": [200, 300]}],
        "people": [],
    }))
    system = _annotation("d", [
        _sys_quote(0, 100),      # exact match
        _sys_quote(400, 450),    # spurious
        _sys_quote(500, 560),    # spurious
    ])
    report = evaluate_corpus([gold], [system], thresholds=(0.3,))
    content = report.quote_content[0.3]
    assert content.counts == {"matched": 1, "gold": 2, "sys": 3}
    assert content.precision == pytest.approx(1 / 3)
    assert content.recall == pytest.approx(1 / 2)
    assert content.f1 == pytest.approx(2 * (1 / 3) * (1 / 2) / (1 / 3 + 1 / 2))


def test_gold_duplicate_person_rejected():
    with pytest.raises(ValueError):
        parse_gold(json.dumps({
            "doc_id": "d", "quotes": [],
            "people": [{"name": "Anne Roy", "gender": "f"},
                       {"name": "anne roy ", "gender": "f"}],
        }))


@given(documents(min_tokens=1))
@settings(max_examples=80, deadline=None)
def test_ner_never_loses_nonoverlapping_entities(raw):
    config = load_config()
    doc = parse_document(raw)
    kept = []
    occupied = set()
    for entity in doc.entities:
        if entity.label != "PER":
            continue
        cells = set(range(entity.span.start, entity.span.end))
        if cells & occupied:
            continue
        occupied |= cells
        kept.append(entity)
    if len(kept) < len([e for e in doc.entities if e.label == "PER"]):
        return  # overlapping inputs are outside the guarantee
    result = person_entities(doc, config, ruleset={})
    dropped_empty = 0
    for entity in kept:
        surface = doc.surface(entity.span)
        if not any(ch.isalpha() for ch in surface.split("\n")[0]):
            dropped_empty += 1
    assert len(result) >= len(kept) - dropped_empty


def test_packaged_default_conf_matches_code_defaults():
    from importlib import resources
    from quiparle.config import DEFAULTS, parse_config_file

    with resources.as_file(
            resources.files("quiparle.data").joinpath("default.conf")) as path:
        parsed = parse_config_file(path)
    assert parsed == DEFAULTS


def test_threshold_boundary_flows_through_corpus_report():
    # a 45% overlap counts as matched at the easy threshold only
    gold = parse_gold(json.dumps({
        "doc_id": "d", "quotes": [{"quote": [0, 153]}], "people": [],
    }))
    system = _annotation("d", [_sys_quote(84, 200)])
    report = evaluate_corpus([gold], [system], thresholds=(0.3, 0.8))
    assert report.quote_content[0.3].counts["matched"] == 1
    assert report.quote_content[0.8].counts["matched"] == 0
    assert report.quote_content[0.8].precision == 0.0
    assert report.verb_accuracy[0.8] is None  # no matched pairs at 0.8
