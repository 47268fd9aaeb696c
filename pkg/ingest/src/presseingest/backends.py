"""Annotation backends: a statistical parser when available, rules otherwise.

The spaCy backend drives an installed French model and is preferred; the
rule backend is a dependency-free annotator (heuristic POS, lemma, morph,
shallow dependency attachment, title/first-name based person NER) that keeps
every structural promise of the interchange format, at the cost of parse
quality. Both return the same plain-dict token/entity shapes.
"""

from __future__ import annotations

from .tokenizer import sentence_breaks, tokenize

DETERMINERS = {
    "le": ("Def", "Masc", "Sing"), "la": ("Def", "Fem", "Sing"),
    "les": ("Def", None, "Plur"), "l'": ("Def", None, "Sing"),
    "un": ("Ind", "Masc", "Sing"), "une": ("Ind", "Fem", "Sing"),
    "des": ("Ind", None, "Plur"), "du": ("Def", "Masc", "Sing"),
    "au": ("Def", "Masc", "Sing"), "aux": ("Def", None, "Plur"),
    "ce": (None, "Masc", "Sing"), "cet": (None, "Masc", "Sing"),
    "cette": (None, "Fem", "Sing"), "ces": (None, None, "Plur"),
}

POSSESSIVES = {
    "son": ("Masc", "Sing"), "sa": ("Fem", "Sing"), "ses": (None, "Plur"),
    "leur": (None, "Sing"), "leurs": (None, "Plur"), "mon": ("Masc", "Sing"),
    "ma": ("Fem", "Sing"), "mes": (None, "Plur"), "notre": (None, "Sing"),
    "nos": (None, "Plur"), "votre": (None, "Sing"), "vos": (None, "Plur"),
}

PRONOUNS = {
    "il": ("Masc", "Sing", "3"), "elle": ("Fem", "Sing", "3"),
    "ils": ("Masc", "Plur", "3"), "elles": ("Fem", "Plur", "3"),
    "lui": ("Masc", "Sing", "3"), "eux": ("Masc", "Plur", "3"),
    "je": (None, "Sing", "1"), "tu": (None, "Sing", "2"),
    "nous": (None, "Plur", "1"), "vous": (None, "Plur", "2"),
    "on": (None, "Sing", "3"), "celle": ("Fem", "Sing", "3"),
    "celui": ("Masc", "Sing", "3"), "ceux": ("Masc", "Plur", "3"),
    "rien": (None, "Sing", "3"), "personne": (None, "Sing", "3"),
    "tout": ("Masc", "Sing", "3"), "cela": (None, "Sing", "3"),
    "ça": (None, "Sing", "3"), "y": (None, None, "3"), "en": (None, None, "3"),
}

ADPOSITIONS = {
    "de", "à", "dans", "sur", "sous", "avec", "sans", "pour", "par", "chez",
    "vers", "entre", "selon", "durant", "pendant", "après", "avant", "contre",
    "depuis", "dès", "malgré", "envers", "du", "des", "au", "aux", "d'",
}

CONJUNCTIONS = {"et", "ou", "mais", "ni", "car", "donc", "or"}
SUBORDINATORS = {"que", "qu'", "si", "s'", "quand", "lorsque", "puisque",
                 "comme", "parce"}
ADVERBS = {
    "ne", "n'", "pas", "plus", "très", "bien", "mal", "aussi", "encore",
    "déjà", "toujours", "jamais", "hier", "demain", "aujourd'hui", "ici",
    "là", "ensuite", "enfin", "cependant", "pourtant", "également", "trop",
    "peu", "beaucoup", "vite", "tôt", "tard", "souvent", "maintenant",
}

AUXILIARIES = {
    "est", "sont", "était", "étaient", "sera", "seront", "été", "être",
    "a", "ont", "avait", "avaient", "aura", "auront", "eu", "avoir",
    "suis", "es", "sommes", "êtes", "ai", "as", "avons", "avez",
}

# widespread communication / event verb forms, enough for quotative syntax
VERB_FORMS = {
    "dit": "dire", "disent": "dire", "disait": "dire", "dire": "dire",
    "affirme": "affirmer", "affirment": "affirmer", "affirmé": "affirmer",
    "déclare": "déclarer", "déclaré": "déclarer", "déclarent": "déclarer",
    "explique": "expliquer", "expliqué": "expliquer",
    "annonce": "annoncer", "annoncé": "annoncer", "annoncent": "annoncer",
    "ajoute": "ajouter", "ajouté": "ajouter",
    "précise": "préciser", "précisé": "préciser",
    "assure": "assurer", "assuré": "assurer",
    "estime": "estimer", "estimé": "estimer",
    "souligne": "souligner", "souligné": "souligner",
    "indique": "indiquer", "indiqué": "indiquer",
    "raconte": "raconter", "rappelle": "rappeler",
    "propose": "proposer", "proposé": "proposer",
    "demande": "demander", "demandé": "demander",
    "confirme": "confirmer", "confirmé": "confirmer",
    "croit": "croire", "pense": "penser", "juge": "juger",
    "veut": "vouloir", "voulait": "vouloir",
    "commence": "commencer", "commencé": "commencer",
    "travaille": "travailler", "arrive": "arriver", "arrivé": "arriver",
    "prépare": "préparer", "présente": "présenter",
}

VERB_ENDINGS = ("er", "ait", "aient", "ent", "ons", "ez", "ira", "iront",
                "era", "eront", "é", "ée", "és", "ées", "ir", "it")

TITLES = {"Monsieur", "Madame", "Mademoiselle", "M.", "Mme", "Mme.", "Mlle",
          "Dr", "Dr.", "Docteur", "Docteure", "Maître", "Me", "Professeur",
          "Professeure", "Pr", "Pr."}

FIRST_NAMES = {
    "anne", "antoine", "bernard", "brigitte", "camille", "caroline",
    "catherine", "charles", "christine", "claire", "claude", "daniel",
    "david", "denis", "diane", "dominique", "emma", "enrico", "éric",
    "étienne", "fanny", "françois", "françoise", "gabriel", "guillaume",
    "hélène", "hugo", "isabelle", "jacques", "jean", "jeanne", "julie",
    "julien", "justin", "laurent", "léa", "louis", "louise", "luc", "lucie",
    "manon", "manuel", "marc", "marie", "martin", "mathieu", "michel",
    "nadia", "nathalie", "nicolas", "nicole", "olivier", "pascal", "patrick",
    "paul", "philippe", "pierre", "rachel", "richard", "robert", "rose",
    "samuel", "sarah", "serge", "simon", "sophie", "stéphane", "sylvie",
    "thomas", "valérie", "vincent", "xavier", "yves", "zoé",
}

_PUNCT_CHARS = set("«»“”\"'’.,;:!?…()[]-–—")


def _is_punct(surface: str) -> bool:
    return all(ch in _PUNCT_CHARS or not ch.isalnum() for ch in surface) \
        and not any(ch.isalnum() for ch in surface)


class RuleBackend:
    """Deterministic annotator used when no statistical parser is installed."""

    name = "rules"

    def annotate(self, text: str) -> dict:
        pieces = tokenize(text)
        sentences = sentence_breaks(pieces)
        tokens = []
        for i, ((surface, start), sentence) in enumerate(zip(pieces, sentences)):
            pos, lemma, morph = self._tag(surface, i, pieces, sentences)
            tokens.append({
                "i": i, "text": surface, "lemma": lemma, "pos": pos,
                "morph": morph, "head": i, "deprel": "dep",
                "start": start, "end": start + len(surface), "sent": sentence,
            })
        self._attach(tokens)
        entities = self._entities(tokens)
        return {"tokens": tokens, "entities": entities}

    def _tag(self, surface, index, pieces, sentences):
        lower = surface.lower()
        sentence_initial = index == 0 or sentences[index - 1] != sentences[index]
        if _is_punct(surface):
            return "PUNCT", surface, {}
        if surface.replace(",", "").replace(".", "").replace("%", "").isdigit():
            return "NUM", surface, {}
        if lower in ("se", "s'", "me", "m'", "te", "t'"):
            return "PRON", "se", {"Person": "3", "Reflex": "Yes"}
        if lower in POSSESSIVES:
            gender, number = POSSESSIVES[lower]
            morph = {"Poss": "Yes", "Person": "1" if lower in
                     ("mon", "ma", "mes", "notre", "nos") else "3"}
            if gender:
                morph["Gender"] = gender
            if number:
                morph["Number"] = number
            return "DET", "son", morph
        if lower in DETERMINERS:
            definite, gender, number = DETERMINERS[lower]
            morph = {}
            if definite:
                morph["Definite"] = definite
            if gender:
                morph["Gender"] = gender
            if number:
                morph["Number"] = number
            lemma = "le" if definite == "Def" or lower == "l'" else "un"
            if lower.startswith("ce"):
                lemma, morph["PronType"] = "ce", "Dem"
            return "DET", lemma, morph
        if lower in PRONOUNS:
            gender, number, person = PRONOUNS[lower]
            morph = {"Person": person, "PronType": "Prs"}
            if gender:
                morph["Gender"] = gender
            if number:
                morph["Number"] = number
            lemma = {"elles": "il", "ils": "il", "elle": "il",
                     "eux": "lui"}.get(lower, lower)
            return "PRON", lemma, morph
        if lower.startswith("-") and CLITIC_LEMMAS.get(lower.lstrip("-t")):
            base = lower.lstrip("-").lstrip("t").lstrip("-") or "il"
            morph = {"Person": "3", "PronType": "Prs"}
            info = PRONOUNS.get(base)
            if info:
                if info[0]:
                    morph["Gender"] = info[0]
                if info[1]:
                    morph["Number"] = info[1]
            return "PRON", base, morph
        if lower in ADPOSITIONS:
            lemma = {"du": "de", "des": "de", "au": "à", "aux": "à",
                     "d'": "de"}.get(lower, lower)
            return "ADP", lemma, {}
        if lower in CONJUNCTIONS:
            return "CCONJ", lower, {}
        if lower in SUBORDINATORS:
            return "SCONJ", "que" if lower.startswith("qu") else lower, {}
        if lower in ADVERBS:
            return "ADV", lower.rstrip("'") if lower.endswith("'") else lower, {}
        if lower in AUXILIARIES:
            lemma = "être" if lower[0] in "esfé" and lower not in (
                "a", "ont", "avait", "avaient", "aura", "auront", "eu",
                "avoir", "ai", "as", "avons", "avez") else "avoir"
            return "AUX", lemma, {}
        if lower in VERB_FORMS:
            return "VERB", VERB_FORMS[lower], {}
        if surface[:1].isupper() and not sentence_initial:
            return "PROPN", surface, {"Number": "Sing"}
        if sentence_initial and surface[:1].isupper() \
                and lower in FIRST_NAMES:
            return "PROPN", surface, {"Number": "Sing"}
        if lower.endswith("ment") and len(lower) > 5:
            return "ADV", lower, {}
        if any(lower.endswith(end) for end in VERB_ENDINGS) and len(lower) > 4 \
                and not sentence_initial:
            return "VERB", lower, {}
        morph = {}
        if lower.endswith("s") and len(lower) > 3:
            morph["Number"] = "Plur"
            lemma = lower[:-1]
        else:
            morph["Number"] = "Sing"
            lemma = lower
        if lower.endswith(("ière", "euse", "trice", "ienne", "elle", "ée")):
            morph["Gender"] = "Fem"
        if surface[:1].isupper():
            return "PROPN", surface, {"Number": morph.get("Number", "Sing")}
        return "NOUN", lemma, morph

    def _attach(self, tokens):
        """Shallow dependency attachment, one tree fragment per sentence."""
        by_sentence = {}
        for token in tokens:
            by_sentence.setdefault(token["sent"], []).append(token)
        for sentence_tokens in by_sentence.values():
            root = next((t for t in sentence_tokens if t["pos"] == "VERB"),
                        None)
            if root is None:
                root = next((t for t in sentence_tokens
                             if t["pos"] in ("NOUN", "PROPN", "AUX")),
                            sentence_tokens[0])
            root["head"], root["deprel"] = root["i"], "root"
            subject_found = False
            for position, token in enumerate(sentence_tokens):
                if token is root:
                    continue
                token["head"] = root["i"]
                if token["pos"] == "PUNCT":
                    token["deprel"] = "punct"
                elif token["pos"] == "DET":
                    nxt = next((t for t in sentence_tokens[position + 1:]
                                if t["pos"] in ("NOUN", "PROPN")), None)
                    if nxt is not None:
                        token["head"] = nxt["i"]
                    token["deprel"] = "det"
                elif token["pos"] == "ADP":
                    nxt = next((t for t in sentence_tokens[position + 1:]
                                if t["pos"] in ("NOUN", "PROPN", "PRON", "NUM")),
                               None)
                    if nxt is not None:
                        token["head"] = nxt["i"]
                    token["deprel"] = "case"
                elif token["pos"] == "PROPN":
                    prev = sentence_tokens[position - 1] if position else None
                    if prev is not None and prev["pos"] == "PROPN":
                        token["head"] = self._name_head(sentence_tokens,
                                                        position)
                        token["deprel"] = "flat:name"
                    elif prev is not None and prev["text"] in TITLES \
                            and prev["pos"] in ("NOUN", "PROPN"):
                        token["head"] = prev["i"]
                        token["deprel"] = "flat:name"
                    elif token["i"] < root["i"] and not subject_found:
                        token["deprel"] = "nsubj"
                        subject_found = True
                    else:
                        token["deprel"] = "obl:mod"
                elif token["pos"] in ("NOUN", "PRON"):
                    if token["i"] < root["i"] and not subject_found \
                            and token["pos"] != "PRON":
                        token["deprel"] = "nsubj"
                        subject_found = True
                    elif token["pos"] == "PRON" and token["i"] < root["i"] \
                            and not subject_found:
                        token["deprel"] = "nsubj"
                        subject_found = True
                    else:
                        token["deprel"] = "obj"
                elif token["pos"] == "AUX":
                    token["deprel"] = "aux:tense"
                elif token["pos"] == "VERB":
                    token["deprel"] = "ccomp" if token["i"] > root["i"] \
                        else "advcl"
                elif token["pos"] == "ADV":
                    token["deprel"] = "advmod"
                elif token["pos"] in ("CCONJ",):
                    token["deprel"] = "cc"
                elif token["pos"] in ("SCONJ",):
                    token["deprel"] = "mark"
                else:
                    token["deprel"] = "dep"

    @staticmethod
    def _name_head(sentence_tokens, position):
        anchor = position - 1
        while anchor > 0 and sentence_tokens[anchor]["deprel"] == "flat:name" \
                and sentence_tokens[anchor - 1]["pos"] == "PROPN":
            anchor -= 1
        return sentence_tokens[anchor]["i"]

    def _entities(self, tokens):
        """Person entities anchored on titles and known first names.

        Dotted titles (M., Dr.) stay outside the span: a period can never be
        part of a person name downstream.
        """
        entities = []
        i = 0
        while i < len(tokens):
            token = tokens[i]
            if token["pos"] == "PROPN":
                run = [token]
                j = i + 1
                while j < len(tokens) and tokens[j]["pos"] == "PROPN" \
                        and tokens[j]["sent"] == token["sent"]:
                    run.append(tokens[j])
                    j += 1
                titled_before = i > 0 and tokens[i - 1]["text"] in TITLES
                if run[0]["text"] in TITLES and len(run) > 1:
                    if "." in run[0]["text"]:
                        run = run[1:]
                    entities.append({"label": "PER",
                                     "first_token": run[0]["i"],
                                     "last_token": run[-1]["i"]})
                elif titled_before or run[0]["text"].lower() in FIRST_NAMES:
                    entities.append({"label": "PER",
                                     "first_token": run[0]["i"],
                                     "last_token": run[-1]["i"]})
                i = j
            else:
                i += 1
        return entities


CLITIC_LEMMAS = {"il": "il", "elle": "il", "ils": "il", "elles": "il",
                 "on": "on", "je": "je", "ce": "ce"}


class SpacyBackend:
    """Statistical backend driving an installed spaCy French model."""

    name = "spacy"

    def __init__(self, model: str = "fr_core_news_md"):
        import spacy

        self.nlp = spacy.load(model)

    def annotate(self, text: str) -> dict:
        doc = self.nlp(text)
        sentence_of = {}
        for number, sentence in enumerate(doc.sents):
            for token in sentence:
                sentence_of[token.i] = number
        tokens = []
        skipped = set()  # whitespace pseudo-tokens have no place in the format
        for token in doc:
            if token.is_space:
                skipped.add(token.i)
        remap = {}
        for token in doc:
            if token.i in skipped:
                continue
            remap[token.i] = len(remap)
        for token in doc:
            if token.i in skipped:
                continue
            head = token.head.i if token.head.i not in skipped else token.i
            if sentence_of.get(head) != sentence_of.get(token.i):
                head = token.i
            tokens.append({
                "i": remap[token.i],
                "text": token.text,
                "lemma": token.lemma_ or token.text,
                "pos": token.pos_ if token.pos_ != "SPACE" else "X",
                "morph": dict(f.split("=") for f in str(token.morph).split("|")
                              if "=" in f),
                "head": remap.get(head, remap[token.i]),
                "deprel": token.dep_ or "dep",
                "start": token.idx,
                "end": token.idx + len(token.text),
                "sent": sentence_of[token.i],
            })
        entities = []
        for entity in doc.ents:
            label = {"PER": "PER", "PERSON": "PER", "ORG": "ORG",
                     "LOC": "LOC", "GPE": "LOC"}.get(entity.label_, "MISC")
            token_ids = [remap[t.i] for t in entity if t.i in remap]
            if token_ids:
                entities.append({"label": label,
                                 "first_token": min(token_ids),
                                 "last_token": max(token_ids)})
        return {"tokens": tokens, "entities": entities}


def pick_backend(prefer: str = "auto"):
    """The best available backend: spaCy French if importable, else rules."""
    if prefer in ("auto", "spacy"):
        try:
            return SpacyBackend()
        except Exception:
            if prefer == "spacy":
                raise
    return RuleBackend()
