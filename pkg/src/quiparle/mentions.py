"""Mention-head extraction from the dependency tree.

A mention is represented by the head token(s) of its noun or pronoun phrase,
never by the full span: heads keep embedded phrases distinguishable (the
phrase around "Président" and the phrase around "Entreprise" embedded inside
it map to different head tokens) and a coordination contributes one extra
plural mention listing the sibling heads.
"""

from __future__ import annotations

from dataclasses import dataclass

from .docmodel import AnnotatedDocument

NOUN_POS = ("NOUN", "PROPN")

# dependency labels marking tokens that are fragments of a larger name or
# fixed expression rather than phrase heads
NON_HEAD_DEPRELS = ("flat:name", "flat:foreign", "flat", "fixed", "goeswith", "amod")

# lemmas of pronouns that in practice refer to clauses or to nobody specific
NON_REFERRING_PRONOUNS = ("ce", "ça", "cela", "ceci", "on", "y", "en", "dont")

COORD_DEPRELS = ("conj",)
COORD_LINK_DEPRELS = ("conj", "cc", "punct")


@dataclass(frozen=True)
class Mention:
    """One mention, as the indices of its head token(s).

    Multiple heads occur only for coordinations ("Pierre et Marie"), where
    the mention denotes the plural group.
    """

    heads: tuple

    @property
    def root_head(self) -> int:
        return self.heads[0]

    @property
    def is_plural_group(self) -> bool:
        return len(self.heads) > 1


def is_referring_pronoun(doc: AnnotatedDocument, index: int) -> bool:
    """Third-person personal or reflexive pronoun able to corefer."""
    tok = doc.tokens[index]
    if tok.pos != "PRON":
        return False
    if tok.lemma.lower() in NON_REFERRING_PRONOUNS:
        return False
    if tok.has_morph("PronType", "Rel") or tok.has_morph("PronType", "Int"):
        return False
    if tok.morph.get("Person") not in (None, "3"):
        return False
    return tok.has_morph("PronType", "Prs") or tok.has_morph("Reflex", "Yes")


def is_possessive_anaphor(doc: AnnotatedDocument, index: int) -> bool:
    """Third-person possessive determiner (son/sa/ses/leur)."""
    tok = doc.tokens[index]
    return (tok.pos == "DET" and tok.has_morph("Poss", "Yes")
            and tok.morph.get("Person") in (None, "3")
            and tok.lemma.lower() not in ("mon", "ton", "notre", "votre"))


def _is_head_token(doc: AnnotatedDocument, index: int) -> bool:
    tok = doc.tokens[index]
    if tok.deprel in NON_HEAD_DEPRELS:
        return False
    if tok.pos in NOUN_POS:
        return True
    return is_referring_pronoun(doc, index)


def coordinated_siblings(doc: AnnotatedDocument, head: int) -> list:
    """Heads conj-linked below ``head``, in document order, excluding it."""
    siblings = set()
    stack = [head]
    visited = {head}
    while stack:
        current = stack.pop()
        for child in doc.children(current):
            if child.index in visited:
                continue
            if child.deprel in COORD_LINK_DEPRELS:
                visited.add(child.index)
                if child.deprel in COORD_DEPRELS:
                    siblings.add(child.index)
                stack.append(child.index)
    return sorted(siblings)


def mention_heads(doc: AnnotatedDocument) -> list:
    """All mentions of the document, singles first, in document order."""
    single = [i for i in range(len(doc.tokens)) if _is_head_token(doc, i)]
    mentions = [Mention(heads=(i,)) for i in single]
    eligible = set(single)
    for i in single:
        if doc.tokens[i].deprel in COORD_DEPRELS:
            continue  # only the first conjunct carries the group
        group = [s for s in coordinated_siblings(doc, i)
                 if s in eligible or doc.tokens[s].pos in NOUN_POS]
        if group:
            mentions.append(Mention(heads=tuple([i] + group)))
    return mentions


def name_phrase_tokens(doc: AnnotatedDocument, head: int) -> list:
    """The head plus its flat:name continuation, in document order."""
    parts = [head]
    for child in doc.children(head):
        if child.deprel in ("flat:name", "flat"):
            parts.append(child.index)
    return sorted(parts)


def is_introducing_noun(doc: AnnotatedDocument, head: int, config) -> bool:
    """Common noun denoting a person not necessarily named before.

    True for person-lexicon nouns carrying an article (indefinite or, as an
    extension, definite) or no determiner at all; possessives and
    demonstratives anchor the noun to prior context and disqualify it.
    """
    tok = doc.tokens[head]
    if tok.pos != "NOUN":
        return False
    if not config.is_person_noun(tok.lemma) and not config.is_title(tok.text):
        return False
    for child in doc.children(head):
        if child.deprel != "det":
            continue
        if child.has_morph("Poss", "Yes") or child.has_morph("PronType", "Dem"):
            return False
    return True
