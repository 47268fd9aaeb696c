"""Per-article pipeline: from parsed document to the people/sources record.

Runs entity repair, mention analysis, coreference, unification, quote
extraction, speaker mapping and gender prediction, then materializes one
serializable record per article: people and sources partitioned by gender
plus the quote objects with their character indices.
"""

from __future__ import annotations

import datetime
import json
import logging
from dataclasses import dataclass, field

from .coref import resolve
from .docmodel import AnnotatedDocument, CharSpan
from .gender import FEMALE, MALE, gender_partition, predict
from .mentions import mention_heads
from .ner import person_entities
from .quotes import Quote, extract_all
from .speakers import map_speakers, _speaker_head
from .unify import build_clusters, merge

log = logging.getLogger(__name__)


class AnnotationError(RuntimeError):
    """Raised when one article cannot be annotated; carries the doc id."""

    def __init__(self, doc_id, cause):
        super().__init__(f"annotation failed for {doc_id}: {cause}")
        self.doc_id = doc_id
        self.cause = cause


@dataclass
class ArticleAnnotation:
    doc_id: str
    outlet: str
    published_at: datetime.date
    people_mentioned: list
    women_mentioned: list
    men_mentioned: list
    other_mentioned: list
    sources: list
    women_sources: list
    men_sources: list
    other_sources: list
    quotes: list = field(default_factory=list)  # serializable quote records


def format_index(span) -> str:
    if span is None:
        return ""
    return f"({span.start}, {span.end})"


def parse_index(value: str):
    if not value:
        return None
    inner = value.strip().strip("()")
    start, _, end = inner.partition(",")
    return CharSpan(int(start), int(end))


def quote_record(quote: Quote) -> dict:
    """The persisted shape of one quote, indices rendered "(start, end)"."""
    return {
        "speaker": quote.speaker,
        "speaker_index": format_index(quote.speaker_span),
        "quote": quote.content,
        "quote_index": format_index(quote.span),
        "verb": quote.verb,
        "verb_index": format_index(quote.verb_span),
        "quote_token_count": quote.token_count,
        "quote_type": quote.structure,
        "is_floating_quote": quote.is_floating,
        "reference": quote.reference,
    }


def _grammatical_gender(doc, config, quote) -> str | None:
    """Gender carried by an introducing noun itself (la députée -> female)."""
    head = _speaker_head(doc, quote.speaker_span) if quote.speaker_span else None
    if head is None:
        return None
    tok = doc.tokens[head]
    if tok.has_morph("Gender", "Fem"):
        return FEMALE
    if tok.has_morph("Gender", "Masc"):
        return MALE
    tag = config.person_noun_gender(tok.lemma)
    if tag == "f":
        return FEMALE
    if tag == "m":
        return MALE
    return None


def annotate(doc: AnnotatedDocument, config, providers=(), cache=None,
             overrides=None) -> ArticleAnnotation:
    """Run the whole pipeline for one document."""
    try:
        entities = person_entities(doc, config)
        mentions = mention_heads(doc)
        chains = resolve(doc, mentions, config, person_entities=entities)
        clusters = merge(build_clusters(doc, entities, chains, config), config)
        quotes = map_speakers(extract_all(doc, config), clusters, doc, config)

        named = [c for c in clusters if c.is_named]
        # plural coordination entities attribute quotes but are not
        # individual people; they join the lists only when actually quoted
        individuals = [c for c in named
                       if not all(e.is_group for e in c.member_entities)]
        groups = [c for c in named if c not in individuals]
        labels = [predict(c, config, providers=providers, cache=cache,
                          overrides=overrides) for c in individuals]
        parts = gender_partition(individuals, labels)
        women = {c.representative for c in parts["women"]}
        men = {c.representative for c in parts["men"]}

        people = [c.representative for c in individuals]
        referenced = {q.reference for q in quotes if q.reference}

        for cluster in groups:
            if cluster.representative in referenced:
                people.append(cluster.representative)

        # introducing-noun sources only count when their own grammatical
        # gender settles the question (there is no name to look up)
        for quote in quotes:
            if quote.resolved_step == 3 and quote.reference not in people:
                gender = _grammatical_gender(doc, config, quote)
                if gender is None:
                    referenced.discard(quote.reference)
                    continue
                people.append(quote.reference)
                (women if gender == FEMALE else men).add(quote.reference)

        sources = [p for p in people if p in referenced]
        annotation = ArticleAnnotation(
            doc_id=doc.doc_id,
            outlet=doc.outlet,
            published_at=doc.published_at,
            people_mentioned=people,
            women_mentioned=[p for p in people if p in women],
            men_mentioned=[p for p in people if p in men],
            other_mentioned=[p for p in people if p not in women and p not in men],
            sources=sources,
            women_sources=[p for p in sources if p in women],
            men_sources=[p for p in sources if p in men],
            other_sources=[p for p in sources if p not in women and p not in men],
            quotes=[quote_record(q) for q in quotes],
        )
        return annotation
    except Exception as exc:  # noqa: BLE001 - one bad article must not kill a run
        raise AnnotationError(doc.doc_id, exc) from exc


ANNOTATION_FIELDS = (
    "people_mentioned", "women_mentioned", "men_mentioned", "other_mentioned",
    "sources", "women_sources", "men_sources", "other_sources",
)


def annotation_to_dict(annotation: ArticleAnnotation) -> dict:
    out = {
        "doc_id": annotation.doc_id,
        "outlet": annotation.outlet,
        "published_at": annotation.published_at.isoformat(),
    }
    for name in ANNOTATION_FIELDS:
        out[name] = list(getattr(annotation, name))
    out["quotes"] = [dict(q) for q in annotation.quotes]
    return out


def serialize_annotation(annotation: ArticleAnnotation) -> str:
    return json.dumps(annotation_to_dict(annotation), ensure_ascii=False)


def parse_annotation(raw) -> ArticleAnnotation:
    data = json.loads(raw) if isinstance(raw, (str, bytes)) else raw
    return ArticleAnnotation(
        doc_id=data["doc_id"],
        outlet=data.get("outlet", ""),
        published_at=datetime.date.fromisoformat(data["published_at"]),
        quotes=[dict(q) for q in data.get("quotes", [])],
        **{name: list(data.get(name, [])) for name in ANNOTATION_FIELDS},
    )


def validate_annotation(annotation: ArticleAnnotation, doc=None):
    """Assert the structural promises every annotation must keep."""
    people = annotation.people_mentioned
    sources = annotation.sources
    assert set(sources) <= set(people), "sources must be people"
    for parent, split in (
        (people, (annotation.women_mentioned, annotation.men_mentioned,
                  annotation.other_mentioned)),
        (sources, (annotation.women_sources, annotation.men_sources,
                   annotation.other_sources)),
    ):
        combined = [name for part in split for name in part]
        assert sorted(combined) == sorted(parent), "gender lists must partition"
        for part in split:
            assert set(part) <= set(parent)
    if doc is not None:
        for record in annotation.quotes:
            span = parse_index(record["quote_index"])
            assert doc.text[span.start:span.end] == record["quote"]
            for key, index_key in (("speaker", "speaker_index"),
                                   ("verb", "verb_index")):
                span = parse_index(record[index_key])
                if span is not None:
                    assert doc.text[span.start:span.end] == record[key]
