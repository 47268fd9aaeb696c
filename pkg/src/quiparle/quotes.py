"""Quote extraction: direct, floating, incise, indirect and "selon" quotes.

Direct quotes come from balanced quotation marks; a verb of communication
next to (or governing) the quoted span supplies verb and speaker. Fully
quoted sentences without their own verb float back to the latest attributed
speaker. The French incise ("dit-il" inside the marks) is detected on raw
character adjacency and splits the quoted material around itself. Indirect
quotes follow clausal complements of allow-listed verbs; "selon" quotes
attach a clause to the person named in the prepositional phrase.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import regex

from .docmodel import AnnotatedDocument, CharSpan
from .mentions import is_referring_pronoun

log = logging.getLogger(__name__)

PAIRED_MARKS = {"«": "»", "“": "”"}
CLOSING_MARKS = {v: k for k, v in PAIRED_MARKS.items()}
ALL_MARKS = set(PAIRED_MARKS) | set(CLOSING_MARKS) | {'"'}

SUBJECT_DEPRELS = ("nsubj", "nsubj:pass")

_INCISE_CLITIC = regex.compile(r"^(?:-t)?-(il|elle|ils|elles|on)\b")

# priority when several extractors capture the same span
_ORIGIN_RANK = {"direct": 4, "incise": 3, "indirect": 2, "selon": 1}


@dataclass(frozen=True)
class Quote:
    content: str
    span: CharSpan
    speaker: str = ""
    speaker_span: CharSpan | None = None
    verb: str = ""
    verb_span: CharSpan | None = None
    kind: str = "direct"            # direct | indirect | selon
    is_floating: bool = False
    reference: str = ""
    origin: str = "direct"          # which extractor produced it
    resolved_step: int | None = None

    @property
    def token_count(self) -> int:
        return len(self.content.split())

    @property
    def structure(self) -> str:
        """Linear order of content, verb and speaker in the text (e.g. CVS)."""
        parts = [("C", self.span.start)]
        if self.verb_span is not None:
            parts.append(("V", self.verb_span.start))
        if self.speaker_span is not None:
            parts.append(("S", self.speaker_span.start))
        return "".join(letter for letter, _ in sorted(parts, key=lambda p: p[1]))


def mark_pairs(doc: AnnotatedDocument):
    """Top-level (open, close, balanced) mark offsets, nesting respected."""
    text = doc.text
    pairs = []
    stack = []
    for i, ch in enumerate(text):
        if ch == '"':
            if stack and stack[-1][0] == '"':
                start = stack.pop()[1]
                if not stack:
                    pairs.append((start, i, True))
            else:
                stack.append(('"', i))
        elif ch in PAIRED_MARKS:
            stack.append((ch, i))
        elif ch in CLOSING_MARKS:
            for j in range(len(stack) - 1, -1, -1):
                if PAIRED_MARKS.get(stack[j][0]) == ch:
                    start = stack[j][1]
                    outermost = j == 0
                    del stack[j:]
                    if outermost:
                        pairs.append((start, i, True))
                    break
    if stack:
        start = stack[0][1]
        end = text.find("\n\n", start)
        end = len(text) if end < 0 else end
        log.warning("unbalanced quotation mark at offset %d in %s; closing at "
                    "paragraph end", start, doc.doc_id)
        pairs.append((start, end, False))
    return sorted(pairs)


def _shrink(text: str, start: int, end: int, strip_marks=False) -> tuple:
    while True:
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if strip_marks and start < end - 1 and (
                PAIRED_MARKS.get(text[start]) == text[end - 1]
                or (text[start] == '"' and text[end - 1] == '"')):
            start += 1
            end -= 1
            continue
        return start, end


def _subtree_span(doc, index, drop=()) -> CharSpan | None:
    kept = [i for i in doc.subtree(index) if i not in drop]
    while kept and doc.tokens[kept[0]].pos == "PUNCT":
        kept.pop(0)
    while kept and doc.tokens[kept[-1]].pos == "PUNCT":
        kept.pop()
    if not kept:
        return None
    return CharSpan(doc.tokens[kept[0]].span.start, doc.tokens[kept[-1]].span.end)


def _subject_span(doc, verb_index) -> CharSpan | None:
    for child in doc.children(verb_index):
        if child.deprel in SUBJECT_DEPRELS:
            return _subtree_span(doc, child.index)
    return None


def _tokens_between(doc, start, end):
    return [t for t in doc.tokens if t.span.start >= start and t.span.end <= end]


def _quote_from_verb(doc, verb_token, span, origin, kind):
    speaker_span = _subject_span(doc, verb_token.index)
    return Quote(
        content=doc.surface(span),
        span=span,
        speaker=doc.surface(speaker_span) if speaker_span else "",
        speaker_span=speaker_span,
        verb=verb_token.text,
        verb_span=verb_token.span,
        kind=kind,
        origin=origin,
    )


def _attached_quotative(doc, config, open_i, close_i):
    """Allow-listed verb attached to a quoted span, or None.

    Tried in order: a verb governing the quoted clause, the quotative after
    the closing mark, the one before the opening mark.
    """
    inside = _tokens_between(doc, open_i, close_i + 1)
    inside_ids = {t.index for t in inside}
    for tok in inside:
        head = doc.tokens[tok.head]
        if (tok.deprel == "ccomp" and head.index not in inside_ids
                and config.is_quote_verb(head.lemma, head.text)):
            return head

    after = [t for t in doc.tokens if t.span.start > close_i]
    if after:
        sentence = after[0].sentence
        for tok in after[:8]:
            if tok.sentence != sentence or tok.text in ALL_MARKS:
                break  # never reach into neighbouring quoted material
            if tok.pos in ("PUNCT", "AUX", "ADV", "CCONJ", "PRON"):
                continue
            if tok.pos == "VERB" and config.is_quote_verb(tok.lemma, tok.text):
                return tok
            break

    before = [t for t in doc.tokens if t.span.end <= open_i]
    if before:
        sentence = before[-1].sentence
        for tok in reversed(before[-8:]):
            if tok.sentence != sentence or tok.text in ALL_MARKS:
                break
            if tok.pos in ("PUNCT", "AUX", "ADV", "PRON"):
                continue
            if tok.pos == "VERB" and config.is_quote_verb(tok.lemma, tok.text):
                return tok
            break
    return None


def extract_direct(doc: AnnotatedDocument, config) -> list:
    """One quote per balanced top-level mark pair (speaker may be empty)."""
    out = []
    for open_i, close_i, _balanced in mark_pairs(doc):
        start, end = _shrink(doc.text, open_i + 1, close_i)
        if start >= end:
            continue
        span = CharSpan(start, end)
        verb = _attached_quotative(doc, config, open_i, close_i)
        if verb is not None:
            out.append(_quote_from_verb(doc, verb, span, "direct", "direct"))
        else:
            out.append(Quote(content=doc.surface(span), span=span,
                             kind="direct", origin="direct"))
    return out


def _incise_groups(doc, config, start, end):
    """(group_start, group_end, verb_token, clitic_span) inside a span.

    An incise is an allow-listed verb immediately followed by an inverted
    clitic subject ("dit-il", "affirme-t-elle"); character adjacency is used
    because hyphens derail the parser.
    """
    groups = []
    for tok in _tokens_between(doc, start, end):
        if tok.pos != "VERB" or not config.is_quote_verb(tok.lemma, tok.text):
            continue
        match = _INCISE_CLITIC.match(doc.text[tok.span.end:end])
        if not match:
            continue
        clitic_start = tok.span.end + match.start(1)
        clitic_span = CharSpan(clitic_start, tok.span.end + match.end(1))
        group_start = tok.span.start
        probe = group_start - 1
        while probe >= start and doc.text[probe].isspace():
            probe -= 1
        if probe >= start and doc.text[probe] == ",":
            group_start = probe
        group_end = clitic_span.end
        if group_end < end and doc.text[group_end] == ",":
            group_end += 1
        groups.append((group_start, group_end, tok, clitic_span))
    return groups


def extract_incise(doc: AnnotatedDocument, config) -> list:
    """Quotes whose attribution sits inside the marks ("..., dit-il.")."""
    out = []
    for open_i, close_i, _balanced in mark_pairs(doc):
        start, end = _shrink(doc.text, open_i + 1, close_i)
        groups = _incise_groups(doc, config, start, end)
        if not groups:
            continue
        segments = []
        cursor = start
        for group_start, group_end, _verb, _clitic in groups:
            segments.append((cursor, group_start))
            cursor = group_end
        segments.append((cursor, end))
        verb_token = groups[0][2]
        clitic = groups[0][3]
        for seg_start, seg_end in segments:
            seg_start, seg_end = _shrink(doc.text, seg_start, seg_end)
            while seg_start < seg_end and doc.text[seg_start] in ".,;:!?":
                seg_start += 1
            seg_start, seg_end = _shrink(doc.text, seg_start, seg_end)
            if seg_start >= seg_end:
                continue
            span = CharSpan(seg_start, seg_end)
            out.append(Quote(
                content=doc.surface(span),
                span=span,
                speaker=doc.surface(clitic),
                speaker_span=clitic,
                verb=verb_token.text,
                verb_span=verb_token.span,
                kind="direct",
                origin="incise",
            ))
    return out


def extract_indirect(doc: AnnotatedDocument, config) -> list:
    """Clausal complements of allow-listed verbs, complementizer dropped."""
    out = []
    for tok in doc.tokens:
        if tok.pos != "VERB" or not config.is_quote_verb(tok.lemma, tok.text):
            continue
        for child in doc.children(tok.index):
            if child.deprel != "ccomp":
                continue
            kept = doc.subtree(child.index)
            while kept:
                first = doc.tokens[kept[0]]
                if first.deprel == "mark" and first.lemma.lower() in ("que", "qu'"):
                    kept.pop(0)
                elif first.pos == "PUNCT" and first.text not in ALL_MARKS:
                    kept.pop(0)
                else:
                    break
            while kept and doc.tokens[kept[-1]].pos == "PUNCT" \
                    and doc.tokens[kept[-1]].text not in ALL_MARKS:
                kept.pop()
            if not kept:
                continue
            start, end = _shrink(
                doc.text, doc.tokens[kept[0]].span.start,
                doc.tokens[kept[-1]].span.end, strip_marks=True)
            if start >= end:
                continue
            out.append(_quote_from_verb(doc, tok, CharSpan(start, end),
                                        "indirect", "indirect"))
    return out


def _person_compatible_np(doc, config, index) -> bool:
    tok = doc.tokens[index]
    if tok.pos == "PRON":
        return is_referring_pronoun(doc, index)
    if tok.pos == "NOUN":
        return config.is_person_noun(tok.lemma) or config.is_title(tok.text)
    if tok.pos == "PROPN":
        person_spans = [e.span for e in doc.entities if e.label == "PER"]
        phrase = _subtree_span(doc, index) or tok.span
        return any(s.start < phrase.end and phrase.start < s.end
                   for s in person_spans)
    return False


def extract_selon(doc: AnnotatedDocument, config) -> list:
    """Attribution through the preposition "selon" ("according to")."""
    out = []
    for tok in doc.tokens:
        if tok.lemma.lower() != "selon" or tok.pos != "ADP":
            continue
        np_head = tok.head
        if np_head == tok.index or not _person_compatible_np(doc, config, np_head):
            continue
        pp = set(doc.subtree(np_head)) | {tok.index}
        speaker_span = _subtree_span(doc, np_head, drop={tok.index})
        if speaker_span is None:
            continue
        sentence_tokens = doc.sentence_tokens(doc.tokens[np_head].sentence)
        left = [t for t in sentence_tokens if t.index < min(pp)]
        right = [t for t in sentence_tokens if t.index > max(pp)]

        def strip_edges(tokens_):
            while tokens_ and tokens_[0].pos == "PUNCT" \
                    and tokens_[0].text not in ALL_MARKS:
                tokens_.pop(0)
            while tokens_ and tokens_[-1].pos == "PUNCT" \
                    and tokens_[-1].text not in ALL_MARKS:
                tokens_.pop()
            return tokens_

        left, right = strip_edges(left), strip_edges(right)
        host = right if len(right) > len(left) else left
        if not host:
            continue
        start, end = _shrink(doc.text, host[0].span.start, host[-1].span.end)
        span = CharSpan(start, end)
        out.append(Quote(
            content=doc.surface(span),
            span=span,
            speaker=doc.surface(speaker_span),
            speaker_span=speaker_span,
            kind="selon",
            origin="selon",
        ))
    return out


def _is_fully_quoted_sentences(doc, open_i, close_i) -> bool:
    inside = _tokens_between(doc, open_i + 1, close_i)
    words = [t for t in inside if t.pos != "PUNCT"]
    if not words:
        return False
    for sentence in {t.sentence for t in words}:
        for tok in doc.sentence_tokens(sentence):
            if tok.pos == "PUNCT":
                continue
            if tok.span.start <= open_i or tok.span.end > close_i + 1:
                return False
    return True


def extract_floating(doc: AnnotatedDocument, config, prior: list) -> list:
    """Fully quoted sentences with no verb of their own.

    The speaker is inherited from the most recent attributed quote anywhere
    earlier in the document; with no antecedent the quote keeps an empty
    speaker.
    """
    attributed = sorted((q for q in prior if q.speaker),
                        key=lambda q: q.span.start)
    out = []
    for open_i, close_i, _balanced in mark_pairs(doc):
        start, end = _shrink(doc.text, open_i + 1, close_i)
        if start >= end:
            continue
        if _attached_quotative(doc, config, open_i, close_i) is not None:
            continue
        if _incise_groups(doc, config, start, end):
            continue
        if not _is_fully_quoted_sentences(doc, open_i, close_i):
            continue
        antecedent = None
        for quote in attributed:
            if quote.span.start < start:
                antecedent = quote
            else:
                break
        span = CharSpan(start, end)
        out.append(Quote(
            content=doc.surface(span),
            span=span,
            speaker=antecedent.speaker if antecedent else "",
            speaker_span=antecedent.speaker_span if antecedent else None,
            kind="direct",
            is_floating=True,
            origin="direct",
        ))
    return out


def extract_all(doc: AnnotatedDocument, config) -> list:
    """All quotes of a document, deduplicated and sorted by position."""
    incise = extract_incise(doc, config)
    incise_ranges = []
    for open_i, close_i, _balanced in mark_pairs(doc):
        start, end = _shrink(doc.text, open_i + 1, close_i)
        if _incise_groups(doc, config, start, end):
            incise_ranges.append((start, end))

    direct = []
    for quote in extract_direct(doc, config):
        covered = any(start <= quote.span.start and quote.span.end <= end
                      for start, end in incise_ranges)
        if not covered:
            direct.append(quote)

    indirect = extract_indirect(doc, config)
    selon = extract_selon(doc, config)

    attributed = [q for q in direct + incise + indirect + selon if q.speaker]
    floating = extract_floating(doc, config, attributed)
    floating_spans = {q.span for q in floating}
    direct = [q for q in direct if not (not q.speaker and q.span in floating_spans)]

    merged = {}
    for quote in direct + incise + indirect + selon + floating:
        key = (quote.span.start, quote.span.end)
        existing = merged.get(key)
        if existing is None or _ORIGIN_RANK[quote.origin] > _ORIGIN_RANK[existing.origin]:
            if existing is not None:
                log.info("span %s in %s: %s quote supersedes %s", key,
                         doc.doc_id, quote.origin, existing.origin)
            merged[key] = quote
    return sorted(merged.values(), key=lambda q: (q.span.start, q.span.end))
