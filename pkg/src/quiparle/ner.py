"""Repair of parser-provided person entities.

Statistical NER output drifts from the dependency tree (missing titles,
hyphens split off, coordinated groups unseen, trailing prepositional phrases
glued on), so person entities go through a fixed repair order: label
overrides, boundary extension over name links, hyphen rejoining, coordination
additions, then trimming. Trimming runs last so nothing re-expands over
removed material.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from .docmodel import AnnotatedDocument, CharSpan, EntitySpan, union_span
from .mentions import coordinated_siblings

log = logging.getLogger(__name__)

FLAT_DEPRELS = ("flat:name", "flat", "flat:foreign")

# characters a person name may contain; newlines are deliberately excluded
# so entities spanning line breaks get cut
_NAME_SPACES = (" ", " ", " ")
_HYPHENS = ("-", "‑")


@dataclass(frozen=True)
class PersonEntity:
    first_token: int
    last_token: int       # inclusive
    span: CharSpan
    text: str
    source_rule: str
    is_group: bool = False  # plural coordination entity ("X et Y")

    @property
    def token_range(self):
        return range(self.first_token, self.last_token + 1)


def _entity(doc: AnnotatedDocument, first: int, last: int, source: str,
            is_group=False) -> PersonEntity:
    span = union_span(doc.tokens[k].span for k in range(first, last + 1))
    return PersonEntity(
        first_token=first,
        last_token=last,
        span=span,
        text=doc.surface(span),
        source_rule=source,
        is_group=is_group,
    )


def entity_head(doc: AnnotatedDocument, ent: PersonEntity) -> int:
    """Token inside the entity whose syntactic head lies outside it."""
    for i in ent.token_range:
        tok = doc.tokens[i]
        if tok.is_root or not (ent.first_token <= tok.head <= ent.last_token):
            return i
    return ent.first_token


def apply_overrides(doc: AnnotatedDocument, ruleset: dict) -> list:
    """Relabel entities whose exact surface matches an override pattern."""
    out = []
    for ent in doc.entities:
        label = ruleset.get(doc.surface(ent.span), ent.label)
        out.append(EntitySpan(label=label, first_token=ent.first_token,
                              last_token=ent.last_token, span=ent.span))
    return out


def extend_boundaries(doc: AnnotatedDocument, ent: PersonEntity, config) -> PersonEntity:
    first, last = ent.first_token, ent.last_token
    while first > 0:
        prev = doc.tokens[first - 1]
        inside = doc.tokens[first]
        linked = (
            (inside.deprel in FLAT_DEPRELS and inside.head == prev.index)
            or (prev.deprel in FLAT_DEPRELS and first <= prev.head <= last)
        )
        if linked and prev.text in config.extension_titles:
            first -= 1
        else:
            break
    while last + 1 < len(doc.tokens):
        nxt = doc.tokens[last + 1]
        if nxt.deprel in FLAT_DEPRELS and first <= nxt.head <= last:
            last += 1
        else:
            break
    if (first, last) == (ent.first_token, ent.last_token):
        return ent
    return _entity(doc, first, last, ent.source_rule + "+boundary")


def _is_hyphen_token(tok) -> bool:
    return tok.text in _HYPHENS


def _starts_hyphenated(tok) -> bool:
    return (len(tok.text) > 1 and tok.text[0] in _HYPHENS
            and tok.text[1].isupper() and tok.text[1:].isalpha())


def _is_capitalized_name(tok) -> bool:
    body = tok.text.replace("-", "")
    return bool(body) and tok.text[0].isupper() and body.isalpha() and not body.isupper()


def _abuts(doc, left_index, right_index) -> bool:
    return doc.tokens[left_index].span.end == doc.tokens[right_index].span.start


def extend_hyphenated(doc: AnnotatedDocument, ent: PersonEntity) -> PersonEntity:
    """Grow the entity across hyphen-joined capitalized tokens.

    The parse tree is ignored on purpose: hyphens confuse the parser, so this
    works on raw adjacency. A hyphen may follow the entity immediately or sit
    one capitalized token beyond it.
    """
    last = ent.last_token
    n = len(doc.tokens)

    def hyphen_starts_at(j):
        if j >= n:
            return False
        if _is_hyphen_token(doc.tokens[j]) and _abuts(doc, j - 1, j):
            return j + 1 < n and _is_capitalized_name(doc.tokens[j + 1]) \
                and _abuts(doc, j, j + 1)
        return _starts_hyphenated(doc.tokens[j]) and _abuts(doc, j - 1, j)

    while True:
        j = last + 1
        if hyphen_starts_at(j):
            last = j + 1 if _is_hyphen_token(doc.tokens[j]) else j
        elif (j + 1 < n and _is_capitalized_name(doc.tokens[j])
              and hyphen_starts_at(j + 1)):
            # hyphen one token beyond: pull in the token bridging the gap
            k = j + 1
            last = k + 1 if _is_hyphen_token(doc.tokens[k]) else k
        else:
            break
    if last == ent.last_token:
        return ent
    return _entity(doc, ent.first_token, last, ent.source_rule + "+hyphen")


def _sibling_phrase(doc: AnnotatedDocument, sibling: int) -> tuple:
    """Token range of the sibling's own phrase, stripped of further conjuncts."""
    exclude = set()
    for other in coordinated_siblings(doc, sibling):
        exclude.update(doc.subtree(other))
    for child in doc.children(sibling):
        if child.deprel in ("cc", "punct"):
            exclude.add(child.index)
            exclude.update(doc.subtree(child.index))
    kept = [i for i in doc.subtree(sibling) if i not in exclude]
    return min(kept), max(kept)


def add_coordinated(doc: AnnotatedDocument, entities: list, config) -> list:
    """Add plural entities for coordinations anchored on a person entity.

    A sibling matching another person entity contributes that entity; a
    sibling matching nothing is hypothesized to denote people and added as a
    new entity of its own.
    """
    out = list(entities)
    existing = {(e.first_token, e.last_token) for e in out}

    def covering(index):
        for e in out:
            if e.first_token <= index <= e.last_token:
                return e
        return None

    for ent in list(entities):
        if ent.is_group:
            continue
        head = entity_head(doc, ent)
        if doc.tokens[head].deprel == "conj":
            continue  # the first conjunct owns the group
        siblings = coordinated_siblings(doc, head)
        if not siblings:
            continue
        members = [ent]
        for sib in siblings:
            match = covering(sib)
            if match is None:
                first, last = _sibling_phrase(doc, sib)
                match = _entity(doc, first, last, "coordination")
                if (first, last) not in existing:
                    out.append(match)
                    existing.add((first, last))
            members.append(match)
        first = min(m.first_token for m in members)
        last = max(m.last_token for m in members)
        if (first, last) not in existing:
            out.append(_entity(doc, first, last, "coordination", is_group=True))
            existing.add((first, last))
    return out


def _qualifies_as_name(tok) -> bool:
    text = tok.text
    if "@" in text or "://" in text or text.lower().startswith("www."):
        return False
    body = text.replace("-", "")
    return (tok.pos == "PROPN" and bool(body) and text[0].isupper()
            and not body.isupper() and body.isalpha())


def _trim_adpositional(doc: AnnotatedDocument, ent: PersonEntity, config):
    """Cut trailing prepositional phrases unless they are name particles."""
    first, last = ent.first_token, ent.last_token
    i = first + 1
    while i <= last:
        tok = doc.tokens[i]
        if tok.pos == "ADP":
            phrase = [j for j in range(i, last + 1)]
            if tok.text.lower() in config.particles:
                body = [doc.tokens[j] for j in phrase[1:]
                        if doc.tokens[j].text.lower() not in config.particles]
                if body and all(_qualifies_as_name(t) for t in body):
                    i = last + 1  # genuine particle name, keep the rest
                    continue
            last = i - 1
            break
        i += 1
    return first, last


def _allowed_char(ch: str) -> bool:
    return ch.isalpha() or ch in _HYPHENS or ch in _NAME_SPACES


def trim_entity(doc: AnnotatedDocument, ent: PersonEntity, config):
    """Drop non-name adpositional phrases, then cut at illegal characters.

    Returns None when nothing name-like survives.
    """
    first, last = _trim_adpositional(doc, ent, config)
    if last < first:
        return None
    span = union_span(doc.tokens[k].span for k in range(first, last + 1))
    text = doc.surface(span)

    # first run of legal characters, with junk stripped off both ends
    start = 0
    while start < len(text) and not _allowed_char(text[start]):
        start += 1
    end = start
    while end < len(text) and _allowed_char(text[end]):
        end += 1
    while start < end and not text[start].isalpha():
        start += 1
    while end > start and not text[end - 1].isalpha():
        end -= 1
    if start >= end:
        return None

    keep = CharSpan(span.start + start, span.start + end)
    kept_tokens = [k for k in range(first, last + 1)
                   if keep.start <= doc.tokens[k].span.start
                   and doc.tokens[k].span.end <= keep.end]
    if not kept_tokens:
        return None
    new_first, new_last = kept_tokens[0], kept_tokens[-1]
    result = _entity(doc, new_first, new_last,
                     ent.source_rule if (new_first, new_last) == (first, last)
                     and (first, last) == (ent.first_token, ent.last_token)
                     else ent.source_rule + "+trim",
                     is_group=ent.is_group)
    if result.text != text[start:end]:
        # snapping back to token boundaries reintroduced characters; re-trim
        return trim_entity(doc, result, config)
    return result


def _merge_overlaps(entities: list) -> list:
    """Collapse overlapping singular entities, keeping the longer span."""
    singles = sorted((e for e in entities if not e.is_group),
                     key=lambda e: (e.span.start, -(len(e.span))))
    kept = []
    for ent in singles:
        if kept and ent.span.start < kept[-1].span.end:
            if len(ent.span) > len(kept[-1].span):
                kept[-1] = ent
            continue
        kept.append(ent)
    groups = [e for e in entities if e.is_group]
    return sorted(kept + groups, key=lambda e: (e.span.start, e.span.end))


def person_entities(doc: AnnotatedDocument, config, ruleset=None) -> list:
    """Full repair pipeline over the document's person entities."""
    if ruleset is None:
        ruleset = config.label_overrides
    relabelled = apply_overrides(doc, ruleset)
    people = [
        _entity(doc, e.first_token, e.last_token, "model")
        for e in relabelled if e.label == "PER"
    ]
    people = [extend_boundaries(doc, e, config) for e in people]
    people = [extend_hyphenated(doc, e) for e in people]
    people = add_coordinated(doc, people, config)
    trimmed = []
    for ent in people:
        kept = trim_entity(doc, ent, config)
        if kept is None:
            log.info("dropped entity %r in %s: nothing name-like left",
                     ent.text, doc.doc_id)
        else:
            trimmed.append(kept)
    return _merge_overlaps(trimmed)
