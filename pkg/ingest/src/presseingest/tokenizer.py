"""Offset-preserving French tokenizer and sentence splitter.

Every token records its exact character span in the original text; nothing
is ever normalized or re-spaced, so downstream character indices always map
back onto the source article.
"""

from __future__ import annotations

import re

LETTER = r"[^\W\d_]"

# prefixes that elide before a vowel; the apostrophe stays on the prefix
_ELISION = r"(?:[lLdDjJnNmMtTsScC]|[Qq]u|[Jj]usqu|[Ll]orsqu|[Pp]uisqu|[Qq]uoiqu)['’]"

ABBREVIATIONS = {
    "M.", "MM.", "Mme.", "Mlle.", "Dr.", "Pr.", "St.", "Ste.",
    "etc.", "p.", "ex.", "art.", "no.",
}

# verb-clitic inversions split after the verb: dit-il, affirme-t-elle
CLITIC_SUFFIX = re.compile(
    r"(-t)?-(je|tu|il|elle|on|nous|vous|ils|elles|ce)$", re.IGNORECASE)

_TOKEN = re.compile(
    "|".join([
        _ELISION + f"(?!{LETTER})",        # standalone elided prefix (rare)
        _ELISION,                          # l' , qu' , s' ...
        r"\d+(?:[.,:]\d+)*%?",
        LETTER + r"+(?:[-'’]" + LETTER + r"+)*\.?",
        r"\.{3}|…",
        r"[^\s\w]",                        # single punctuation mark
    ])
)

_SENT_END = ".!?…"
_SINGLE_INITIAL = re.compile(r"[A-ZÀ-Ý]\.")


def _split_clitic(text: str, start: int):
    """Break dit-il style inversions into verb + clitic pieces."""
    match = CLITIC_SUFFIX.search(text)
    if not match or match.start() == 0:
        return [(text, start)]
    head = text[:match.start()]
    if "-" in head:  # hyphenated name like Jean-Michel, leave intact
        return [(text, start)]
    return [(head, start), (text[match.start():], start + len(head))]


def _split_trailing_period(text: str, start: int):
    if len(text) > 1 and text.endswith(".") and text not in ABBREVIATIONS \
            and not _SINGLE_INITIAL.fullmatch(text):
        return [(text[:-1], start), (".", start + len(text) - 1)]
    return [(text, start)]


def tokenize(text: str) -> list:
    """(surface, start) pairs covering the text in order."""
    out = []
    for match in _TOKEN.finditer(text):
        for part, offset in _split_trailing_period(match.group(0), match.start()):
            if part:
                out.extend(_split_clitic(part, offset))
    return out


def _opens_sentence(surface: str) -> bool:
    return surface[:1].isupper() or surface[:1] in "«“\""


def sentence_breaks(tokens: list) -> list:
    """Sentence ordinal for each token."""
    sentences = []
    current = 0
    for i, (surface, _start) in enumerate(tokens):
        sentences.append(current)
        if i + 1 >= len(tokens):
            continue
        nxt = tokens[i + 1][0]
        if surface in _SENT_END or surface == "...":
            if nxt == "»" or nxt == "”":
                continue  # the closing mark belongs to this sentence
            if _opens_sentence(nxt):
                current += 1
        elif surface in ("»", "”") and i > 0 and tokens[i - 1][0] in _SENT_END:
            if _opens_sentence(nxt):
                current += 1
    return sentences
