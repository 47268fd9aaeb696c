"""Annotated-document data model and its JSON interchange format.

A document arrives fully pre-parsed (tokens, lemmas, POS, morphology,
dependency arcs, named entities, optional coreference chains); this module
only validates and exposes it. All character offsets count Unicode scalar
values in the original article text, never bytes.
"""

from __future__ import annotations

import datetime
import json
from bisect import bisect_right
from dataclasses import dataclass, field


class FormatError(ValueError):
    """Raised when a serialized document is not syntactically well-formed."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ValidationError(ValueError):
    """Raised when a document violates a structural invariant."""

    def __init__(self, message, field_name=None, token_index=None):
        details = []
        if field_name is not None:
            details.append(f"field {field_name!r}")
        if token_index is not None:
            details.append(f"token {token_index}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.field_name = field_name
        self.token_index = token_index


@dataclass(frozen=True, order=True)
class CharSpan:
    """Half-open character interval [start, end) into the article text."""

    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValidationError(
                f"invalid span [{self.start}, {self.end})", field_name="span"
            )

    def __len__(self):
        return self.end - self.start

    def contains_offset(self, offset: int) -> bool:
        return self.start <= offset < self.end


def span_overlap(a: CharSpan, b: CharSpan) -> int:
    """Number of characters shared by two spans; 0 when disjoint."""
    return max(0, min(a.end, b.end) - max(a.start, b.start))


def union_span(spans) -> CharSpan:
    spans = list(spans)
    return CharSpan(min(s.start for s in spans), max(s.end for s in spans))


@dataclass(frozen=True)
class Token:
    index: int            # ordinal in the document
    text: str
    lemma: str
    pos: str              # universal POS tag
    morph: dict           # e.g. {"Gender": "Masc", "Number": "Sing"}
    head: int             # document index of syntactic head; self for root
    deprel: str
    span: CharSpan
    sentence: int

    def has_morph(self, key: str, value: str) -> bool:
        return self.morph.get(key) == value

    @property
    def is_root(self) -> bool:
        return self.head == self.index


@dataclass(frozen=True)
class EntitySpan:
    label: str            # PER, ORG, LOC or MISC
    first_token: int
    last_token: int       # inclusive
    span: CharSpan

    @property
    def token_range(self):
        return range(self.first_token, self.last_token + 1)


@dataclass(frozen=True)
class CorefChainInput:
    """Externally supplied chain: one token-index list per mention."""

    mentions: tuple  # tuple of tuples of token indices


ENTITY_LABELS = ("PER", "ORG", "LOC", "MISC")


@dataclass(frozen=True)
class AnnotatedDocument:
    doc_id: str
    outlet: str
    published_at: datetime.date
    text: str
    tokens: tuple
    entities: tuple
    coref_chains: tuple | None = None
    _sentence_starts: tuple = field(default=(), repr=False, compare=False)

    @property
    def sentence_count(self) -> int:
        if not self.tokens:
            return 0
        return self.tokens[-1].sentence + 1

    def sentence_tokens(self, sentence: int):
        return [t for t in self.tokens if t.sentence == sentence]

    def children(self, index: int):
        tok = self.tokens[index]
        return [
            t for t in self.tokens
            if t.head == index and t.index != index and t.sentence == tok.sentence
        ]

    def subtree(self, index: int):
        """Token indices of the dependency subtree rooted at ``index``, sorted."""
        seen = {index}
        stack = [index]
        while stack:
            current = stack.pop()
            for child in self.children(current):
                if child.index not in seen:
                    seen.add(child.index)
                    stack.append(child.index)
        return sorted(seen)

    def surface(self, span: CharSpan) -> str:
        return self.text[span.start:span.end]


def _require(condition, message, field_name=None, token_index=None):
    if not condition:
        raise ValidationError(message, field_name=field_name, token_index=token_index)


def _parse_date(value):
    try:
        return datetime.date.fromisoformat(value)
    except (TypeError, ValueError):
        raise ValidationError(
            f"published_at must be an ISO-8601 date, got {value!r}",
            field_name="published_at",
        )


def document_from_dict(raw: dict) -> AnnotatedDocument:
    """Build and validate a document from an already-decoded JSON object."""
    if not isinstance(raw, dict):
        raise FormatError("document must be a JSON object")
    for key in ("doc_id", "outlet", "published_at", "text", "tokens", "entities"):
        if key not in raw:
            raise ValidationError("missing required field", field_name=key)

    text = raw["text"]
    _require(isinstance(text, str), "text must be a string", field_name="text")
    doc_id = raw["doc_id"]
    _require(isinstance(doc_id, str) and doc_id, "doc_id must be a non-empty string",
             field_name="doc_id")
    published = _parse_date(raw["published_at"])

    tokens = []
    previous_end = 0
    previous_sentence = 0
    sentence_first = {}
    for i, entry in enumerate(raw["tokens"]):
        for key in ("i", "text", "lemma", "pos", "head", "deprel", "start", "end", "sent"):
            if key not in entry:
                raise ValidationError("missing token field", field_name=key, token_index=i)
        _require(entry["i"] == i, f"token index {entry['i']} out of order",
                 field_name="i", token_index=i)
        start, end = entry["start"], entry["end"]
        _require(isinstance(start, int) and isinstance(end, int) and 0 <= start < end,
                 "token span must satisfy 0 <= start < end",
                 field_name="start", token_index=i)
        _require(end <= len(text), "token span exceeds text length",
                 field_name="end", token_index=i)
        _require(start >= previous_end, "token spans must be strictly ordered",
                 field_name="start", token_index=i)
        surface = text[start:end]
        _require(surface == entry["text"],
                 f"token surface {entry['text']!r} does not match text slice {surface!r}",
                 field_name="text", token_index=i)
        _require(entry["deprel"], "deprel must be non-empty",
                 field_name="deprel", token_index=i)
        sent = entry["sent"]
        _require(isinstance(sent, int) and sent >= previous_sentence,
                 "sentence ordinals must be non-decreasing",
                 field_name="sent", token_index=i)
        morph = entry.get("morph") or {}
        _require(isinstance(morph, dict), "morph must be an object",
                 field_name="morph", token_index=i)
        tokens.append(Token(
            index=i,
            text=entry["text"],
            lemma=entry["lemma"],
            pos=entry["pos"],
            morph=dict(morph),
            head=entry["head"],
            deprel=entry["deprel"],
            span=CharSpan(start, end),
            sentence=sent,
        ))
        sentence_first.setdefault(sent, i)
        previous_end = end
        previous_sentence = sent

    for tok in tokens:
        _require(0 <= tok.head < len(tokens), "head index out of range",
                 field_name="head", token_index=tok.index)
        _require(tokens[tok.head].sentence == tok.sentence,
                 "head must lie in the same sentence",
                 field_name="head", token_index=tok.index)

    entities = []
    for j, entry in enumerate(raw["entities"]):
        for key in ("label", "first_token", "last_token"):
            if key not in entry:
                raise ValidationError("missing entity field", field_name=key)
        label = entry["label"]
        _require(label in ENTITY_LABELS, f"unknown entity label {label!r}",
                 field_name="label")
        first, last = entry["first_token"], entry["last_token"]
        _require(isinstance(first, int) and isinstance(last, int)
                 and 0 <= first <= last < len(tokens),
                 "entity token range invalid", field_name="first_token",
                 token_index=first if isinstance(first, int) else None)
        entities.append(EntitySpan(
            label=label,
            first_token=first,
            last_token=last,
            span=union_span(tokens[k].span for k in range(first, last + 1)),
        ))

    chains = None
    if raw.get("coref_chains") is not None:
        chains = []
        for chain in raw["coref_chains"]:
            mentions = []
            for mention in chain:
                _require(len(mention) > 0, "chain mention must be non-empty",
                         field_name="coref_chains")
                for idx in mention:
                    _require(isinstance(idx, int) and 0 <= idx < len(tokens),
                             "chain token index out of range",
                             field_name="coref_chains",
                             token_index=idx if isinstance(idx, int) else None)
                mentions.append(tuple(mention))
            firsts = [m[0] for m in mentions]
            _require(firsts == sorted(firsts),
                     "chain mentions must be ordered by first token index",
                     field_name="coref_chains")
            chains.append(CorefChainInput(mentions=tuple(mentions)))
        chains = tuple(chains)

    return AnnotatedDocument(
        doc_id=doc_id,
        outlet=raw["outlet"],
        published_at=published,
        text=text,
        tokens=tuple(tokens),
        entities=tuple(entities),
        coref_chains=chains,
        _sentence_starts=tuple(sentence_first.get(s, 0)
                               for s in range(len(sentence_first))),
    )


def parse_document(raw: str | bytes | dict) -> AnnotatedDocument:
    """Parse one serialized document, raising FormatError / ValidationError."""
    if isinstance(raw, dict):
        return document_from_dict(raw)
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, position=exc.pos) from exc
    return document_from_dict(data)


def document_to_dict(doc: AnnotatedDocument) -> dict:
    out = {
        "doc_id": doc.doc_id,
        "outlet": doc.outlet,
        "published_at": doc.published_at.isoformat(),
        "text": doc.text,
        "tokens": [
            {
                "i": t.index,
                "text": t.text,
                "lemma": t.lemma,
                "pos": t.pos,
                "morph": dict(t.morph),
                "head": t.head,
                "deprel": t.deprel,
                "start": t.span.start,
                "end": t.span.end,
                "sent": t.sentence,
            }
            for t in doc.tokens
        ],
        "entities": [
            {"label": e.label, "first_token": e.first_token, "last_token": e.last_token}
            for e in doc.entities
        ],
    }
    if doc.coref_chains is not None:
        out["coref_chains"] = [
            [list(mention) for mention in chain.mentions]
            for chain in doc.coref_chains
        ]
    return out


def serialize_document(doc: AnnotatedDocument) -> str:
    return json.dumps(document_to_dict(doc), ensure_ascii=False)


def token_at_char(doc: AnnotatedDocument, offset: int):
    """Index of the token whose span contains ``offset``, or None in a gap."""
    if not (0 <= offset <= len(doc.text)):
        raise IndexError(f"offset {offset} outside [0, {len(doc.text)}]")
    starts = [t.span.start for t in doc.tokens]
    i = bisect_right(starts, offset) - 1
    if i >= 0 and doc.tokens[i].span.contains_offset(offset):
        return i
    return None
