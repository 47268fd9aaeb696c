import datetime
import json
import random

import pytest

from quiparle.annotate import ArticleAnnotation
from quiparle.stats import (
    breakdown_to_csv,
    outlet_breakdown,
    top_sources,
    top_sources_to_csv,
)
from quiparle.store import IntegrityError, NotFoundError, Store

from corpus import isolation_doc


def annotation(doc_id, outlet, date, men=(), women=(), quotes_per=None):
    quotes = []
    for name in list(men) + list(women):
        for _ in range((quotes_per or {}).get(name, 1)):
            quotes.append({
                "speaker": name, "speaker_index": "", "quote": "x",
                "quote_index": "(0, 1)", "verb": "", "verb_index": "",
                "quote_token_count": 1, "quote_type": "C",
                "is_floating_quote": False, "reference": name,
            })
    return ArticleAnnotation(
        doc_id=doc_id, outlet=outlet,
        published_at=datetime.date.fromisoformat(date),
        people_mentioned=list(men) + list(women),
        women_mentioned=list(women), men_mentioned=list(men),
        other_mentioned=[],
        sources=list(men) + list(women),
        women_sources=list(women), men_sources=list(men), other_sources=[],
        quotes=quotes,
    )


def test_breakdown_two_men_one_woman():
    result = outlet_breakdown([
        annotation("a", "La Gazette", "2022-01-10", men=["Paul Roy"]),
        annotation("b", "La Gazette", "2022-01-11",
                   men=["Luc Simard"], women=["Anne Roy"]),
    ])
    row = result["rows"][0]
    assert row["organization"] == "La Gazette"
    assert row["men_pct"] == pytest.approx(66.7, abs=0.05)
    assert row["women_pct"] == pytest.approx(33.3, abs=0.05)
    assert row["other_pct"] == 0.0
    assert row["articles"] == 2
    assert result["total"]["articles"] == 2


def test_breakdown_empty_window():
    result = outlet_breakdown(
        [annotation("a", "La Gazette", "2022-01-10", men=["Paul Roy"])],
        window=(datetime.date(2023, 1, 1), datetime.date(2023, 2, 1)),
    )
    assert result["rows"] == []
    assert result["total"] is None


def test_breakdown_csv_headers_and_rounding():
    result = outlet_breakdown([
        annotation("a", "La Gazette", "2022-01-10",
                   men=["A", "B"], women=["C"]),
    ])
    text = breakdown_to_csv(result)
    lines = text.strip().splitlines()
    assert lines[0] == "Organization,% Men,% Women,% Unknown/Other,Total articles"
    assert lines[1] == "La Gazette,66.7%,33.3%,0.0%,1"
    assert lines[-1].startswith("Total,")


def test_breakdown_percentages_sum_and_totals_recompute():
    rng = random.Random(4)
    annotations = []
    for i in range(30):
        annotations.append(annotation(
            f"d{i}", rng.choice(["A", "B", "C"]),
            f"2022-0{rng.randint(1, 9)}-15",
            men=[f"m{i}{j}" for j in range(rng.randint(0, 3))],
            women=[f"w{i}{j}" for j in range(rng.randint(0, 3))],
        ))
    result = outlet_breakdown(annotations)
    for row in result["rows"]:
        total = row["men_pct"] + row["women_pct"] + row["other_pct"]
        if row["men_pct"] or row["women_pct"] or row["other_pct"]:
            assert total == pytest.approx(100.0, abs=0.1)
    assert result["total"]["articles"] == sum(r["articles"] for r in result["rows"])


def test_occurrence_counting_flag():
    ann = annotation("a", "La Gazette", "2022-01-10",
                     men=["Paul Roy"], women=["Anne Roy"],
                     quotes_per={"Paul Roy": 3, "Anne Roy": 1})
    unique = outlet_breakdown([ann])
    occurrences = outlet_breakdown([ann], count_occurrences=True)
    assert unique["rows"][0]["men_pct"] == pytest.approx(50.0)
    assert occurrences["rows"][0]["men_pct"] == pytest.approx(75.0)


def test_top_sources_ranking_and_ties():
    annotations = [
        annotation("a", "A", "2022-03-02", men=["Paul Roy"], women=["Anne Roy"],
                   quotes_per={"Paul Roy": 2, "Anne Roy": 2}),
        annotation("b", "A", "2022-03-09", men=["Luc Simard", "Paul Roy"],
                   quotes_per={"Luc Simard": 2, "Paul Roy": 1}),
        annotation("c", "A", "2022-04-01", men=["Hors Mois"]),
    ]
    top = top_sources(annotations, "2022-03", k=10)
    assert top["men"] == [("Paul Roy", 3), ("Luc Simard", 2)]
    assert top["women"] == [("Anne Roy", 2)]

    tied = top_sources([
        annotation("d", "A", "2022-03-10", men=["Zéphir Q", "Albert Q"]),
    ], "2022-03", k=5)
    assert tied["men"] == [("Albert Q", 1), ("Zéphir Q", 1)]

    small = top_sources(annotations, "2022-03", k=1)
    assert small["men"] == [("Paul Roy", 3)]
    csv_text = top_sources_to_csv(top)
    assert csv_text.splitlines()[0] == "Gender,Source,Quotes"


def test_top_sources_k_validation():
    with pytest.raises(ValueError):
        top_sources([], "2022-03", k=0)


def test_store_roundtrip_and_idempotence(tmp_path):
    store = Store(tmp_path / "store")
    doc = isolation_doc()
    assert store.put_document(doc) is True
    assert store.put_document(doc) is False  # identical content, no-op
    assert store.get_document(doc["doc_id"]) == doc

    ann = annotation("isolation-annonce", "La Gazette", "2021-12-09",
                     men=["Legault"])
    assert store.put_annotation(ann, config_hash="abc") is True
    assert store.put_annotation(ann, config_hash="abc") is False
    loaded, config_hash = store.get_annotation("isolation-annonce")
    assert loaded == ann
    assert config_hash == "abc"


def test_store_survives_reopen(tmp_path):
    root = tmp_path / "store"
    Store(root).put_document(isolation_doc())
    again = Store(root)
    assert again.get_document("isolation-annonce")["outlet"] == "La Gazette"


def test_store_not_found(tmp_path):
    store = Store(tmp_path / "store")
    with pytest.raises(NotFoundError):
        store.get_document("absent")
    with pytest.raises(NotFoundError):
        store.get_annotation("absent")


def test_store_detects_corruption(tmp_path):
    store = Store(tmp_path / "store")
    store.put_document(isolation_doc())
    index = json.loads((tmp_path / "store" / "index.json").read_text())
    target = tmp_path / "store" / index["isolation-annonce"]["document"]
    envelope = json.loads(target.read_text())
    envelope["payload"]["outlet"] = "Tampered"
    target.write_text(json.dumps(envelope))
    with pytest.raises(IntegrityError):
        store.get_document("isolation-annonce")


def test_store_staleness_on_config_change(tmp_path):
    store = Store(tmp_path / "store")
    store.put_document(isolation_doc())
    ann = annotation("isolation-annonce", "La Gazette", "2021-12-09",
                     men=["Legault"])
    store.put_annotation(ann, config_hash="abc")
    fresh = store.list(current_config_hash="abc")
    assert fresh[0]["stale"] is False
    stale = store.list(current_config_hash="zzz")
    assert stale[0]["stale"] is True


def test_store_list_filters(tmp_path):
    store = Store(tmp_path / "store")
    store.put_annotation(
        annotation("a", "La Gazette", "2022-01-10", men=["X"]), "h")
    store.put_annotation(
        annotation("b", "Le Devoir", "2022-05-10", men=["Y"]), "h")
    assert [e["doc_id"] for e in store.list(outlet="Le Devoir")] == ["b"]
    window = (datetime.date(2022, 1, 1), datetime.date(2022, 2, 1))
    assert [e["doc_id"] for e in store.list(window=window)] == ["a"]
