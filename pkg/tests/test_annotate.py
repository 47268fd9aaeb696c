import pytest
from hypothesis import given, settings

from quiparle.annotate import (
    annotate,
    parse_annotation,
    parse_index,
    quote_record,
    serialize_annotation,
    validate_annotation,
)
from quiparle.config import load_config
from quiparle.docmodel import parse_document

from corpus import isolation_doc, mairie_doc
from docbuild import build_doc
from strategies import documents


@pytest.fixture(scope="module")
def config():
    return load_config()


def test_empty_document_annotation(config):
    doc = parse_document({
        "doc_id": "vide", "outlet": "x", "published_at": "2022-01-01",
        "text": "", "tokens": [], "entities": [],
    })
    annotation = annotate(doc, config)
    assert annotation.people_mentioned == []
    assert annotation.sources == []
    assert annotation.quotes == []
    validate_annotation(annotation, doc)


def test_isolation_trace_people_and_sources(config):
    doc = parse_document(isolation_doc())
    annotation = annotate(doc, config)
    assert set(annotation.people_mentioned) == {"Legault", "Manuel Dionne"}
    assert set(annotation.sources) == {"Legault", "Manuel Dionne"}
    validate_annotation(annotation, doc)
    references = {q["reference"] for q in annotation.quotes}
    assert {"Legault", "Manuel Dionne"} <= references
    floating = [q for q in annotation.quotes if q["is_floating_quote"]]
    assert floating == []


def test_unresolved_pronoun_not_a_source(config):
    doc = parse_document(build_doc(
        "anonyme", "«Tout va bien», dit-il.",
        [[
            ("«", "«", "PUNCT", "", 2, "punct"),
            ("Tout", "tout", "PRON", "", 2, "nsubj"),
            ("va", "aller", "VERB", "", 6, "ccomp"),
            ("bien", "bien", "ADV", "", 2, "advmod"),
            ("»", "»", "PUNCT", "", 2, "punct"),
            (",", ",", "PUNCT", "", 6, "punct"),
            ("dit", "dire", "VERB", "", 6, "root"),
            ("-", "-", "PUNCT", "", 8, "punct"),
            ("il", "il", "PRON", "Gender=Masc|Number=Sing|Person=3|PronType=Prs",
             6, "nsubj"),
            (".", ".", "PUNCT", "", 6, "punct"),
        ]],
    ))
    annotation = annotate(doc, config)
    assert annotation.sources == []
    assert annotation.people_mentioned == []
    assert len(annotation.quotes) == 1
    assert annotation.quotes[0]["reference"] == ""
    assert annotation.quotes[0]["speaker"] == "il"
    validate_annotation(annotation, doc)


def test_mairie_gender_partition_with_lookup_fixture(config, tmp_path):
    names = tmp_path / "names.tsv"
    names.write_text("christine\tf\t0.99\njean\tf\t0.6\n", encoding="utf-8")
    conf = tmp_path / "pipeline.conf"
    conf.write_text(f'first_names = "{names}"\n', encoding="utf-8")
    custom = load_config(str(conf))

    doc = parse_document(mairie_doc())
    annotation = annotate(doc, custom)
    assert set(annotation.people_mentioned) == \
        {"Kennedy Stewart", "Christine Boyle", "Jean Swanson"}
    assert set(annotation.women_mentioned) == {"Christine Boyle", "Jean Swanson"}
    assert annotation.men_mentioned == ["Kennedy Stewart"]  # title evidence
    assert annotation.other_mentioned == []
    assert annotation.sources == ["Kennedy Stewart"]
    assert annotation.men_sources == ["Kennedy Stewart"]
    validate_annotation(annotation, doc)


def test_introducing_noun_source_gets_grammatical_gender(config):
    doc = parse_document(build_doc(
        "temoin", "«Tout ira bien», assure une infirmière.",
        [[
            ("«", "«", "PUNCT", "", 2, "punct"),
            ("Tout", "tout", "PRON", "", 2, "nsubj"),
            ("ira", "aller", "VERB", "", 6, "ccomp"),
            ("bien", "bien", "ADV", "", 2, "advmod"),
            ("»", "»", "PUNCT", "", 2, "punct"),
            (",", ",", "PUNCT", "", 6, "punct"),
            ("assure", "assurer", "VERB", "", 6, "root"),
            ("une", "un", "DET", "Definite=Ind|PronType=Art", 8, "det"),
            ("infirmière", "infirmière", "NOUN", "Gender=Fem|Number=Sing",
             6, "nsubj"),
            (".", ".", "PUNCT", "", 6, "punct"),
        ]],
    ))
    annotation = annotate(doc, config)
    assert annotation.people_mentioned == ["une infirmière"]
    assert annotation.sources == ["une infirmière"]
    assert annotation.women_sources == ["une infirmière"]
    validate_annotation(annotation, doc)


def test_quote_record_field_layout(config):
    doc = parse_document(isolation_doc())
    annotation = annotate(doc, config)
    record = annotation.quotes[0]
    assert list(record) == [
        "speaker", "speaker_index", "quote", "quote_index", "verb",
        "verb_index", "quote_token_count", "quote_type", "is_floating_quote",
        "reference",
    ]
    span = parse_index(record["quote_index"])
    assert doc.text[span.start:span.end] == record["quote"]


def test_annotation_roundtrip(config):
    doc = parse_document(isolation_doc())
    annotation = annotate(doc, config)
    assert parse_annotation(serialize_annotation(annotation)) == annotation


def test_quote_without_verb_serializes_empty_strings(config):
    doc = parse_document(build_doc(
        "ouverture", "«La saison commence bien.»",
        [[
            ("«", "«", "PUNCT", "", 3, "punct"),
            ("La", "le", "DET", "Definite=Def", 2, "det"),
            ("saison", "saison", "NOUN", "Gender=Fem", 3, "nsubj"),
            ("commence", "commencer", "VERB", "", 3, "root"),
            ("bien", "bien", "ADV", "", 3, "advmod"),
            (".", ".", "PUNCT", "", 3, "punct"),
            ("»", "»", "PUNCT", "", 3, "punct"),
        ]],
    ))
    annotation = annotate(doc, config)
    record = annotation.quotes[0]
    assert record["verb"] == ""
    assert record["verb_index"] == ""
    assert record["speaker"] == ""
    assert record["speaker_index"] == ""
    assert record["is_floating_quote"] is True


@given(documents())
@settings(max_examples=60, deadline=None)
def test_annotation_invariants_on_random_documents(raw):
    config = load_config()
    doc = parse_document(raw)
    annotation = annotate(doc, config)
    validate_annotation(annotation, doc)


def test_coordination_groups_not_counted_as_people(config):
    from corpus import diner_doc
    doc = parse_document(diner_doc())
    annotation = annotate(doc, config)
    assert "Pierre Dupont" in annotation.people_mentioned
    assert "Marie Jugneau" in annotation.people_mentioned
    assert "Gérard Klein" in annotation.people_mentioned
    assert "Pierre Dupont et Marie Jugneau" not in annotation.people_mentioned
    assert "Gérard Klein et sa famille" not in annotation.people_mentioned
    validate_annotation(annotation, doc)


def test_quoted_coordination_group_becomes_source(config):
    from docbuild import build_doc
    doc = parse_document(build_doc(
        "groupe", "Awa Diallo et Lise Roy affirment que le projet avance.",
        [[
            ("Awa", "Awa", "PROPN", "Gender=Fem|Number=Sing", 5, "nsubj"),
            ("Diallo", "Diallo", "PROPN", "", 0, "flat:name"),
            ("et", "et", "CCONJ", "", 3, "cc"),
            ("Lise", "Lise", "PROPN", "Gender=Fem|Number=Sing", 0, "conj"),
            ("Roy", "Roy", "PROPN", "", 3, "flat:name"),
            ("affirment", "affirmer", "VERB", "", 5, "root"),
            ("que", "que", "SCONJ", "", 9, "mark"),
            ("le", "le", "DET", "Definite=Def", 8, "det"),
            ("projet", "projet", "NOUN", "Gender=Masc", 9, "nsubj"),
            ("avance", "avancer", "VERB", "", 5, "ccomp"),
            (".", ".", "PUNCT", "", 5, "punct"),
        ]],
        entities=[("PER", 0, 1), ("PER", 3, 4)],
    ))
    annotation = annotate(doc, config)
    assert "Awa Diallo et Lise Roy" in annotation.sources
    assert "Awa Diallo et Lise Roy" in annotation.people_mentioned
    assert "Awa Diallo" in annotation.people_mentioned
    assert "Lise Roy" in annotation.people_mentioned
    validate_annotation(annotation, doc)
