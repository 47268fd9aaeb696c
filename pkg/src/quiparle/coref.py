"""Coreference chains: external pass-through or the built-in resolver.

When a document ships chains from an external resolver they are converted
verbatim. Otherwise a deliberately conservative resolver links mentions by
agreement and recency: pronouns reach back at most 5 sentences, referring
common nouns 3, proper names join earlier name phrases only on exact surface
overlap (downstream unification catches what recency splits apart).
"""

from __future__ import annotations

from dataclasses import dataclass

from .docmodel import AnnotatedDocument
from .mentions import (
    Mention,
    is_possessive_anaphor,
    is_referring_pronoun,
    name_phrase_tokens,
)

PROVENANCE_EXTERNAL = "external"
PROVENANCE_BUILTIN = "builtin"


@dataclass(frozen=True)
class CorefChain:
    chain_id: int
    mentions: tuple      # Mention objects in document order
    provenance: str

    def head_indices(self):
        return [m.root_head for m in self.mentions]


def chain_to_cluster(doc: AnnotatedDocument, chain: CorefChain) -> list:
    """Character spans of each mention's heads, order preserved."""
    return [[doc.tokens[h].span for h in mention.heads]
            for mention in chain.mentions]


def _gender_number_flags(doc: AnnotatedDocument, mention: Mention):
    """(masc, fem, sing, plur) possibility flags; unknown axes stay open."""
    if mention.is_plural_group:
        per_head = [_gender_number_flags(doc, Mention(heads=(h,)))
                    for h in mention.heads]
        masc = any(f[0] for f in per_head)
        fem = all(f[1] for f in per_head)
        return masc or not fem, fem, False, True

    tok = doc.tokens[mention.root_head]
    if tok.has_morph("Poss", "Yes"):
        # possessive morphology marks the owned noun, only the lemma tells
        # the owner's number
        sing = tok.lemma.lower() in ("son", "sa", "ses", "mon", "ton")
        plur = tok.lemma.lower() in ("leur", "leurs")
        return True, True, sing or not plur, plur or not sing
    if tok.has_morph("Reflex", "Yes"):
        return True, True, True, True

    masc = tok.has_morph("Gender", "Masc")
    fem = tok.has_morph("Gender", "Fem")
    sing = tok.has_morph("Number", "Sing")
    plur = tok.has_morph("Number", "Plur")
    if tok.pos == "PROPN" and not plur:
        sing = True
    if not (masc or fem):
        masc = fem = True
    if not (sing or plur):
        sing = plur = True
    return masc, fem, sing, plur


def _compatible(doc, a: Mention, b: Mention) -> bool:
    am, af, asg, apl = _gender_number_flags(doc, a)
    bm, bf, bsg, bpl = _gender_number_flags(doc, b)
    return ((am and bm) or (af and bf)) and ((asg and bsg) or (apl and bpl))


def _person_compatible(doc, config, mention: Mention, person_spans) -> bool:
    """Can this mention denote a person (and so antecede a person anaphor)?"""
    tok = doc.tokens[mention.root_head]
    if mention.is_plural_group:
        return any(_person_compatible(doc, config, Mention(heads=(h,)), person_spans)
                   for h in mention.heads)
    if tok.pos == "PRON":
        return is_referring_pronoun(doc, tok.index)
    if tok.pos == "DET":
        return is_possessive_anaphor(doc, tok.index)
    if tok.pos == "NOUN":
        return config.is_person_noun(tok.lemma) or config.is_title(tok.text)
    if tok.pos == "PROPN":
        return any(s.start <= tok.span.start and tok.span.end <= s.end
                   for s in person_spans)
    return False


def _governing_verb(doc, index):
    seen = set()
    current = doc.tokens[index]
    while not current.is_root and current.head not in seen:
        seen.add(current.index)
        current = doc.tokens[current.head]
        if current.pos in ("VERB", "AUX"):
            return current.index
    return None


def _is_definite_noun(doc, index) -> bool:
    for child in doc.children(index):
        if child.deprel == "det":
            if child.has_morph("Poss", "Yes") or child.has_morph("PronType", "Dem"):
                return False
            return child.has_morph("Definite", "Def")
    return False


def _phrase_texts(doc, mention: Mention) -> set:
    parts = set()
    for head in mention.heads:
        for i in name_phrase_tokens(doc, head):
            parts.add(doc.tokens[i].text)
    return parts


def resolve(doc: AnnotatedDocument, mentions: list, config,
            person_entities=None) -> list:
    """Chains for the document; external ones win when present."""
    if doc.coref_chains is not None:
        return [
            CorefChain(
                chain_id=i,
                mentions=tuple(Mention(heads=tuple(m)) for m in chain.mentions),
                provenance=PROVENANCE_EXTERNAL,
            )
            for i, chain in enumerate(doc.coref_chains)
        ]

    if person_entities is not None:
        person_spans = [e.span for e in person_entities]
    else:
        person_spans = [e.span for e in doc.entities if e.label == "PER"]

    all_mentions = list(mentions)
    present = {m.heads for m in all_mentions}
    for i in range(len(doc.tokens)):
        if is_possessive_anaphor(doc, i) and (i,) not in present:
            all_mentions.append(Mention(heads=(i,)))
    all_mentions.sort(key=lambda m: (m.root_head, len(m.heads)))

    parent = list(range(len(all_mentions)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        parent[find(j)] = find(i)

    by_root = {}
    for idx, m in enumerate(all_mentions):
        if not m.is_plural_group:
            by_root.setdefault(m.root_head, idx)

    def candidates_before(idx, max_sentences):
        mention = all_mentions[idx]
        sent = doc.tokens[mention.root_head].sentence
        found = []
        for j in range(idx - 1, -1, -1):
            other = all_mentions[j]
            distance = sent - doc.tokens[other.root_head].sentence
            if distance > max_sentences:
                break
            if not _person_compatible(doc, config, other, person_spans):
                continue
            if not _compatible(doc, mention, other):
                continue
            found.append(j)
        return found

    def pick(idx, found):
        def key(j):
            other = all_mentions[j]
            root = doc.tokens[other.root_head]
            distance = (doc.tokens[all_mentions[idx].root_head].sentence
                        - root.sentence)
            is_subject = root.deprel in ("nsubj", "nsubj:pass")
            return (distance, not is_subject, -other.root_head)
        return min(found, key=key)

    for idx, mention in enumerate(all_mentions):
        if mention.is_plural_group:
            continue
        root = doc.tokens[mention.root_head]

        if root.deprel == "appos" and root.head in by_root:
            union(by_root[root.head], idx)
            continue

        if root.pos == "PRON" and root.has_morph("Reflex", "Yes"):
            verb = _governing_verb(doc, root.index)
            subject = None
            if verb is not None:
                for child in doc.children(verb):
                    if child.deprel in ("nsubj", "nsubj:pass"):
                        subject = child.index
                        break
            if subject is not None and subject in by_root \
                    and by_root[subject] != idx:
                union(by_root[subject], idx)
                continue

        if root.pos == "PRON" or root.pos == "DET":
            found = candidates_before(idx, config["pronoun_sentence_window"])
            if found:
                union(pick(idx, found), idx)
            continue

        if root.pos == "NOUN":
            if not (config.is_person_noun(root.lemma) and _is_definite_noun(doc, root.index)):
                continue
            found = [
                j for j in candidates_before(idx, config["noun_sentence_window"])
                if doc.tokens[all_mentions[j].root_head].pos == "PROPN"
                or doc.tokens[all_mentions[j].root_head].lemma == root.lemma
            ]
            if found:
                union(pick(idx, found), idx)
            continue

        if root.pos == "PROPN":
            parts = _phrase_texts(doc, mention)
            for j in range(idx - 1, -1, -1):
                other = all_mentions[j]
                if other.is_plural_group:
                    continue
                other_root = doc.tokens[other.root_head]
                if other_root.pos not in ("PROPN", "NOUN"):
                    continue
                other_parts = _phrase_texts(doc, other)
                if parts <= other_parts or other_parts <= parts:
                    union(j, idx)
                    break

    groups = {}
    for idx in range(len(all_mentions)):
        groups.setdefault(find(idx), []).append(idx)
    ordered = sorted(groups.values(),
                     key=lambda member: all_mentions[member[0]].root_head)
    return [
        CorefChain(
            chain_id=i,
            mentions=tuple(all_mentions[j] for j in sorted(
                member, key=lambda j: all_mentions[j].root_head)),
            provenance=PROVENANCE_BUILTIN,
        )
        for i, member in enumerate(ordered)
    ]
