"""Quote merging: assign each quote's speaker to a cluster representative.

Three steps in strict order: character overlap between the speaker span and
a cluster mention's heads, then exact text match against representatives,
then the introducing-common-noun fallback where the speaker string itself
becomes the reference. Whatever resists all three stays referenceless.
"""

from __future__ import annotations

from dataclasses import replace

from .docmodel import AnnotatedDocument, span_overlap
from .mentions import is_introducing_noun
from .unify import strip_titles


def _normalize(text: str, config) -> str:
    _titles, tokens = strip_titles(text.strip(), config)
    return " ".join(tokens).casefold()


def _overlap_candidate(quote, clusters, min_chars):
    """(cluster, total_overlap, mention_start) best matching the speaker span."""
    best = None
    for cluster in clusters:
        if not cluster.is_named:
            continue
        for heads in cluster.mentions:
            overlaps = [span_overlap(quote.speaker_span, h) for h in heads]
            if not all(o >= min_chars for o in overlaps):
                continue
            candidate = (sum(overlaps), heads[0].start, cluster)
            if best is None or candidate[:2] > best[:2]:
                best = candidate
    return best


def _speaker_head(doc: AnnotatedDocument, span):
    inside = [t for t in doc.tokens
              if t.span.start >= span.start and t.span.end <= span.end]
    indices = {t.index for t in inside}
    for tok in inside:
        if tok.is_root or tok.head not in indices:
            if tok.pos in ("NOUN", "PROPN", "PRON"):
                return tok.index
    return None


def map_speakers(quotes: list, clusters: list, doc: AnnotatedDocument,
                 config) -> list:
    """Quotes with their ``reference`` field resolved where possible."""
    min_chars = config["speaker_overlap_chars"]
    by_representative = {}
    for cluster in clusters:
        if cluster.is_named:
            by_representative.setdefault(cluster.representative.casefold(), cluster)

    out = []
    for quote in quotes:
        resolved = None
        step = None

        if quote.speaker_span is not None:
            best = _overlap_candidate(quote, clusters, min_chars)
            if best is not None:
                resolved, step = best[2].representative, 1

        if resolved is None and quote.speaker:
            normalized = _normalize(quote.speaker, config)
            match = by_representative.get(normalized)
            if match is not None:
                resolved, step = match.representative, 2

        if resolved is None and quote.speaker and quote.speaker_span is not None:
            head = _speaker_head(doc, quote.speaker_span)
            if head is not None and is_introducing_noun(doc, head, config):
                resolved, step = quote.speaker, 3

        out.append(replace(quote, reference=resolved or "", resolved_step=step))
    return out


def merge_stats(quotes: list) -> dict:
    """How many quotes each mapping step resolved."""
    counts = {"resolved_step1": 0, "resolved_step2": 0, "resolved_step3": 0,
              "unresolved": 0}
    for quote in quotes:
        if quote.resolved_step == 1:
            counts["resolved_step1"] += 1
        elif quote.resolved_step == 2:
            counts["resolved_step2"] += 1
        elif quote.resolved_step == 3:
            counts["resolved_step3"] += 1
        else:
            counts["unresolved"] += 1
    return counts
