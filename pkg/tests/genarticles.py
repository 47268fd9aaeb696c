"""Random French-like article generator for pipeline property suites.

Articles are assembled from sentence templates (narrative, direct quote,
indirect quote, selon quote, floating quote, incise) over a pool of names,
with dependency arcs and entity spans built alongside the text so every
generated document is a valid interchange document.
"""

from __future__ import annotations

from docbuild import build_doc

FIRSTS = ["Anne", "Paul", "Marie", "Luc", "Sophie", "Julien", "Claire",
          "Hugo", "Manon", "David", "Nadia", "Simon"]
LASTS = ["Roy", "Tremblay", "Côté", "Dupont", "Gagnon", "Lavoie", "Fortin",
         "Morin", "Bélanger", "Pelletier"]
TOPICS = ["le budget", "la réforme", "le projet", "la saison", "le rapport"]
VERBS = [("affirme", "affirmer"), ("explique", "expliquer"),
         ("déclare", "déclarer"), ("ajoute", "ajouter"),
         ("souligne", "souligner")]
CONTENT_WORDS = ["la", "réunion", "commence", "demain", "matin", "sans",
                 "faute", "ici", "tout", "va", "bien", "encore"]


class ArticleBuilder:
    def __init__(self, rng, doc_id):
        self.rng = rng
        self.doc_id = doc_id
        self.text_parts = []
        self.sentences = []
        self.entities = []
        self.offset = 0

    def _name(self):
        return self.rng.choice(FIRSTS), self.rng.choice(LASTS)

    def _add(self, text, tokens, per_ranges=()):
        self.text_parts.append(text)
        self.sentences.append(tokens)
        for first, last in per_ranges:
            self.entities.append(("PER", self.offset + first, self.offset + last))
        self.offset += len(tokens)

    def narrative(self):
        first, last = self._name()
        topic_det, topic_noun = self.rng.choice(TOPICS).split()
        text = f"{first} {last} prépare {topic_det} {topic_noun}."
        tokens = [
            (first, first, "PROPN", "Number=Sing", 2, "nsubj"),
            (last, last, "PROPN", "", 0, "flat:name"),
            ("prépare", "préparer", "VERB", "", 2, "root"),
            (topic_det, "le", "DET", "Definite=Def", 4, "det"),
            (topic_noun, topic_noun, "NOUN", "Gender=Masc", 2, "obj"),
            (".", ".", "PUNCT", "", 2, "punct"),
        ]
        self._add(text, tokens, [(0, 1)])

    def _content(self, n):
        words = [self.rng.choice(CONTENT_WORDS) for _ in range(n)]
        words[0] = words[0].capitalize()
        return words

    def direct(self):
        first, last = self._name()
        verb, lemma = self.rng.choice(VERBS)
        words = self._content(self.rng.randint(2, 5))
        text = f"«{' '.join(words)}», {verb} {first} {last}."
        n = len(words)
        tokens = [("«", "«", "PUNCT", "", 1, "punct")]
        tokens += [(w, w.lower(), "NOUN", "", 1, "dep") for w in words]
        tokens += [
            ("»", "»", "PUNCT", "", 1, "punct"),
            (",", ",", "PUNCT", "", n + 3, "punct"),
            (verb, lemma, "VERB", "", n + 3, "root"),
            (first, first, "PROPN", "Number=Sing", n + 3, "nsubj"),
            (last, last, "PROPN", "", n + 4, "flat:name"),
            (".", ".", "PUNCT", "", n + 3, "punct"),
        ]
        self._add(text, tokens, [(n + 4, n + 5)])

    def indirect(self):
        first, last = self._name()
        verb, lemma = self.rng.choice(VERBS)
        text = f"{first} {last} {verb} que la réunion commence demain."
        tokens = [
            (first, first, "PROPN", "Number=Sing", 2, "nsubj"),
            (last, last, "PROPN", "", 0, "flat:name"),
            (verb, lemma, "VERB", "", 2, "root"),
            ("que", "que", "SCONJ", "", 6, "mark"),
            ("la", "le", "DET", "Definite=Def", 5, "det"),
            ("réunion", "réunion", "NOUN", "Gender=Fem", 6, "nsubj"),
            ("commence", "commencer", "VERB", "", 2, "ccomp"),
            ("demain", "demain", "ADV", "", 6, "advmod"),
            (".", ".", "PUNCT", "", 2, "punct"),
        ]
        self._add(text, tokens, [(0, 1)])

    def selon(self):
        first, last = self._name()
        text = f"Selon {first} {last}, la réunion commence demain."
        tokens = [
            ("Selon", "selon", "ADP", "", 1, "case"),
            (first, first, "PROPN", "Number=Sing", 6, "obl:mod"),
            (last, last, "PROPN", "", 1, "flat:name"),
            (",", ",", "PUNCT", "", 6, "punct"),
            ("la", "le", "DET", "Definite=Def", 5, "det"),
            ("réunion", "réunion", "NOUN", "Gender=Fem", 6, "nsubj"),
            ("commence", "commencer", "VERB", "", 6, "root"),
            ("demain", "demain", "ADV", "", 6, "advmod"),
            (".", ".", "PUNCT", "", 6, "punct"),
        ]
        self._add(text, tokens, [(1, 2)])

    def floating(self):
        words = self._content(self.rng.randint(2, 4))
        text = f"«{' '.join(words)}.»"
        tokens = [("«", "«", "PUNCT", "", 1, "punct")]
        tokens += [(w, w.lower(), "NOUN", "", 1, "dep") for w in words]
        tokens += [
            (".", ".", "PUNCT", "", 1, "punct"),
            ("»", "»", "PUNCT", "", 1, "punct"),
        ]
        self._add(text, tokens)

    def incise(self):
        verb, lemma = self.rng.choice(VERBS)
        words = self._content(self.rng.randint(2, 3))
        text = f"«{' '.join(words)}, {verb}-il. On verra.»"
        n = len(words)
        tokens = [("«", "«", "PUNCT", "", 1, "punct")]
        tokens += [(w, w.lower(), "NOUN", "", 1, "dep") for w in words]
        tokens += [
            (",", ",", "PUNCT", "", n + 2, "punct"),
            (verb, lemma, "VERB", "", 1, "parataxis"),
            ("-il", "il", "PRON",
             "Gender=Masc|Number=Sing|Person=3|PronType=Prs", n + 2, "nsubj"),
            (".", ".", "PUNCT", "", 1, "punct"),
        ]
        second = [
            ("On", "on", "PRON", "Person=3", 1, "nsubj"),
            ("verra", "voir", "VERB", "", 1, "root"),
            (".", ".", "PUNCT", "", 1, "punct"),
            ("»", "»", "PUNCT", "", 1, "punct"),
        ]
        self.text_parts.append(text)
        self.sentences.append(tokens)
        self.sentences.append(second)
        self.offset += len(tokens) + len(second)

    def build(self):
        day = self.rng.randint(1, 28)
        month = self.rng.randint(1, 12)
        return build_doc(
            self.doc_id,
            " ".join(self.text_parts),
            self.sentences,
            entities=self.entities,
            outlet=self.rng.choice(["La Gazette", "Le Quotidien", "Radio Nord"]),
            date=f"2022-{month:02d}-{day:02d}",
        )


def make_random_article(rng, doc_id):
    builder = ArticleBuilder(rng, doc_id)
    moves = [builder.narrative, builder.direct, builder.indirect,
             builder.selon, builder.floating, builder.incise]
    for _ in range(rng.randint(1, 6)):
        rng.choice(moves)()
    if not builder.sentences:
        builder.narrative()
    return builder.build()
