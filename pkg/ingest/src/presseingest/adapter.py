"""Assembly of interchange documents from raw article text.

The adapter owns none of the linguistics: a backend annotates, this module
assembles and sanity-checks the interchange shape (spans tiling the text,
heads within sentences) so that whatever reaches the output stream will pass
the consumer's validator.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .backends import pick_backend


class IngestError(RuntimeError):
    pass


def _check(tokens, text):
    previous_end = 0
    previous_sentence = 0
    sentence_of = {}
    for token in tokens:
        if token["i"] != len(sentence_of):
            raise IngestError(f"token ids not dense at {token['i']}")
        if not (previous_end <= token["start"] < token["end"] <= len(text)):
            raise IngestError(f"bad span for token {token['i']}")
        if text[token["start"]:token["end"]] != token["text"]:
            raise IngestError(
                f"offset drift at token {token['i']}: "
                f"{text[token['start']:token['end']]!r} != {token['text']!r}")
        if token["sent"] < previous_sentence:
            raise IngestError("sentence ordinals must not decrease")
        if not token["deprel"]:
            raise IngestError(f"empty deprel at token {token['i']}")
        sentence_of[token["i"]] = token["sent"]
        previous_end = token["end"]
        previous_sentence = token["sent"]
    for token in tokens:
        head = token["head"]
        if head not in sentence_of or sentence_of[head] != token["sent"]:
            raise IngestError(f"head of token {token['i']} leaves the sentence")


def ingest(text: str, outlet: str, published_at: str, doc_id: str | None = None,
           backend=None) -> dict:
    """One raw article to one interchange document."""
    if backend is None:
        backend = pick_backend()
    if doc_id is None:
        doc_id = hashlib.sha1(
            f"{outlet}\n{published_at}\n{text}".encode("utf-8")).hexdigest()[:16]
    annotated = backend.annotate(text)
    _check(annotated["tokens"], text)
    for entity in annotated["entities"]:
        first, last = entity["first_token"], entity["last_token"]
        if not (0 <= first <= last < len(annotated["tokens"])):
            raise IngestError(f"entity range {first}..{last} out of bounds")
    return {
        "doc_id": doc_id,
        "outlet": outlet,
        "published_at": published_at,
        "text": text,
        "tokens": annotated["tokens"],
        "entities": annotated["entities"],
    }


def batch(input_dir, manifest: dict, out_path, backend=None) -> dict:
    """Process every manifest entry; failures are collected, not fatal.

    ``manifest`` maps file names (relative to ``input_dir``) to
    ``{"outlet": ..., "date": ..., "doc_id": ...?}``. Returns
    ``{"written": n, "failures": [{"file", "error"}...]}`` and streams one
    NDJSON line per success to ``out_path``.
    """
    if backend is None:
        backend = pick_backend()
    input_dir = Path(input_dir)
    failures = []
    written = 0
    with open(out_path, "w", encoding="utf-8") as out:
        for name in sorted(manifest):
            meta = manifest[name]
            try:
                text = (input_dir / name).read_text(encoding="utf-8")
                document = ingest(
                    text,
                    outlet=meta["outlet"],
                    published_at=meta["date"],
                    doc_id=meta.get("doc_id"),
                    backend=backend,
                )
                out.write(json.dumps(document, ensure_ascii=False) + "\n")
                written += 1
            except (OSError, UnicodeDecodeError, KeyError, IngestError) as exc:
                failures.append({"file": name, "error": str(exc)})
    return {"written": written, "failures": failures}
