"""Pipeline configuration: scalar settings plus the lexicons they point to.

The config file is a flat ``key = value`` format (strings quoted, numbers and
booleans bare, ``#`` comments). Every resource is loaded eagerly so a config
object is immutable in practice and cheap to share across worker processes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

_DATA_PACKAGE = "quiparle.data"

DEFAULTS = {
    "pronoun_sentence_window": 5,
    "noun_sentence_window": 3,
    "speaker_overlap_chars": 2,
    "eval_speaker_overlap_chars": 1,
    "threshold_easy": 0.3,
    "threshold_hard": 0.8,
    "count_source_occurrences": False,
    "person_nouns": "person_nouns.txt",
    "titles": "titles.txt",
    "particles": "particles.txt",
    "quote_verbs": "quote_verbs.txt",
    "verb_conjugations": "verb_conjugations.tsv",
    "first_names": "first_names.tsv",
    "label_overrides": "label_overrides.txt",
    "gender_overrides": "",
    "gender_cache": "",
    # comma-separated "name:first_name|full_name:url" entries
    "gender_providers": "",
}


class ConfigError(ValueError):
    pass


def _parse_scalar(raw: str):
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    if raw in ("true", "false"):
        return raw == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"cannot parse value {raw!r}")


def parse_config_file(path) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, raw = line.partition("=")
        values[key.strip()] = _parse_scalar(raw)
    return values


def _read_resource(name: str, base_dir: Path | None) -> str:
    if base_dir is not None and ("/" in name or (base_dir / name).exists()):
        return (base_dir / name).read_text(encoding="utf-8")
    candidate = Path(name)
    if candidate.is_absolute() or "/" in name:
        return candidate.read_text(encoding="utf-8")
    return resources.files(_DATA_PACKAGE).joinpath(name).read_text(encoding="utf-8")


def _data_lines(content: str):
    for line in content.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            yield line


def _gender_lexicon(content: str) -> dict:
    out = {}
    for line in _data_lines(content):
        head, _, tag = line.rpartition(" ")
        out[head.strip()] = tag.strip()
    return out


def normalize_title(token: str) -> str:
    return token.rstrip(".").lower()


@dataclass
class PipelineConfig:
    settings: dict
    person_nouns: dict          # lemma -> m | f | mf
    titles: dict                # normalized title -> m | f | mf
    extension_titles: set       # titles safe to merge into an entity span
    particles: frozenset
    quote_verbs: frozenset      # infinitives
    verb_forms: dict            # conjugated surface -> infinitive
    first_names: dict           # lowercased first name -> (f|m|u, weight)
    label_overrides: dict       # exact surface -> entity label
    gender_overrides: dict      # representative -> f | m | x
    provider_specs: tuple = ()  # (name, mode, url) triples, in cascade order
    gender_cache_path: str | None = None
    config_hash: str = ""
    source_dir: Path | None = field(default=None, repr=False)

    def __getitem__(self, key):
        return self.settings[key]

    def is_person_noun(self, lemma: str) -> bool:
        return lemma.lower() in self.person_nouns

    def person_noun_gender(self, lemma: str) -> str | None:
        return self.person_nouns.get(lemma.lower())

    def title_gender(self, token: str) -> str | None:
        return self.titles.get(normalize_title(token))

    def is_title(self, token: str) -> bool:
        return normalize_title(token) in self.titles

    def is_quote_verb(self, lemma: str, surface: str | None = None) -> bool:
        if lemma.lower() in self.quote_verbs:
            return True
        if surface is not None:
            return self.verb_forms.get(surface.lower()) in self.quote_verbs
        return False


def load_config(path=None) -> PipelineConfig:
    """Load defaults, optionally overlaid with a user config file."""
    settings = dict(DEFAULTS)
    base_dir = None
    if path is not None:
        base_dir = Path(path).resolve().parent
        for key, value in parse_config_file(path).items():
            if key not in DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            settings[key] = value

    contents = {}
    for key in ("person_nouns", "titles", "particles", "quote_verbs",
                "verb_conjugations", "first_names", "label_overrides",
                "gender_overrides"):
        name = settings[key]
        contents[key] = _read_resource(name, base_dir) if name else ""

    titles_raw = _gender_lexicon(contents["titles"])
    titles = {normalize_title(t): g for t, g in titles_raw.items()}
    extension_titles = {t for t in titles_raw if t.isalpha()}

    verb_forms = {}
    for line in _data_lines(contents["verb_conjugations"]):
        lemma, _, form = line.partition("\t")
        verb_forms[form.strip().lower()] = lemma.strip()

    first_names = {}
    for line in _data_lines(contents["first_names"]):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ConfigError(f"bad first-name row {line!r}")
        first_names[parts[0].lower()] = (parts[1], float(parts[2]))

    label_overrides = {}
    for line in _data_lines(contents["label_overrides"]):
        if not line.startswith('"'):
            raise ConfigError(f"bad override row {line!r}")
        closing = line.rindex('"')
        label_overrides[line[1:closing]] = line[closing + 1:].strip()

    gender_overrides = {}
    for line in _data_lines(contents["gender_overrides"]):
        name, _, value = line.rpartition("\t")
        gender_overrides[name.strip().lower()] = value.strip()

    provider_specs = []
    for entry in str(settings["gender_providers"]).split(","):
        entry = entry.strip()
        if not entry:
            continue
        parts = entry.split(":", 2)
        if len(parts) != 3 or parts[1] not in ("first_name", "full_name"):
            raise ConfigError(
                f"bad provider spec {entry!r}; expected name:mode:url")
        provider_specs.append(tuple(parts))

    digest = hashlib.sha256()
    for key in sorted(settings):
        digest.update(f"{key}={settings[key]}\n".encode("utf-8"))
    for key in sorted(contents):
        digest.update(contents[key].encode("utf-8"))

    return PipelineConfig(
        settings=settings,
        person_nouns=_gender_lexicon(contents["person_nouns"]),
        titles=titles,
        extension_titles=extension_titles,
        particles=frozenset(_data_lines(contents["particles"])),
        quote_verbs=frozenset(_data_lines(contents["quote_verbs"])),
        verb_forms=verb_forms,
        first_names=first_names,
        label_overrides=label_overrides,
        gender_overrides=gender_overrides,
        provider_specs=tuple(provider_specs),
        gender_cache_path=settings["gender_cache"] or None,
        config_hash=digest.hexdigest(),
        source_dir=base_dir,
    )
