"""Gender assignment for entity clusters.

Cascade: manual overrides, then gendered titles carried by member entities
(French titles mark gender far more often than English ones), then the
bundled first-name table, then whatever external services are configured.
Unknown stays a first-class value; only a manual override asserts
non-binary/other affirmatively.
"""

from __future__ import annotations

import json
import logging
import os
import urllib.parse
import urllib.request
from dataclasses import dataclass

from .unify import strip_titles

log = logging.getLogger(__name__)

FEMALE = "female"
MALE = "male"
UNKNOWN = "unknown"

_TAG_VALUES = {"f": FEMALE, "m": MALE, "x": UNKNOWN, "u": UNKNOWN}

EVIDENCE_TITLE = "title"
EVIDENCE_FIRSTNAME = "firstname_lookup"
EVIDENCE_FULLNAME = "fullname_service"
EVIDENCE_OVERRIDE = "manual_override"
EVIDENCE_GRAMMATICAL = "grammatical"
EVIDENCE_NONE = "none"


@dataclass(frozen=True)
class GenderLabel:
    value: str
    evidence: str = EVIDENCE_NONE
    confidence: float = 0.0


@dataclass
class GenderProvider:
    """External gender service, queried by first or full name."""

    name: str
    mode: str                   # "first_name" | "full_name"
    lookup: object = None       # callable(query) -> (gender, probability)
    url: str | None = None

    def query(self, name: str):
        if self.lookup is not None:
            return self.lookup(name)
        if self.url is None:
            raise RuntimeError(f"provider {self.name} has no lookup nor url")
        full = f"{self.url}?{urllib.parse.urlencode({'name': name})}"
        with urllib.request.urlopen(full, timeout=10) as response:
            payload = json.loads(response.read().decode("utf-8"))
        return payload.get("gender", UNKNOWN), float(payload.get("probability", 0.0))


class GenderCache:
    """Persistent (provider, query) -> (gender, probability) cache.

    Stored as a sorted tab-separated text file so manual corrections are a
    plain diff away.
    """

    def __init__(self, path=None):
        self.path = path
        self._data = {}
        self._dirty = False
        if path is not None and os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.rstrip("\n")
                    if not line:
                        continue
                    provider, query, gender, probability = line.split("\t")
                    self._data[(provider, query)] = (gender, float(probability))

    def get(self, provider: str, query: str):
        return self._data.get((provider, query))

    def put(self, provider: str, query: str, gender: str, probability: float):
        self._data[(provider, query)] = (gender, probability)
        self._dirty = True

    def save(self):
        if self.path is None or not self._dirty:
            return
        with open(self.path, "w", encoding="utf-8") as fh:
            for (provider, query), (gender, probability) in sorted(self._data.items()):
                fh.write(f"{provider}\t{query}\t{gender}\t{probability}\n")
        self._dirty = False

    def merge(self, other: "GenderCache"):
        for key, value in other._data.items():
            if key not in self._data:
                self._data[key] = value
                self._dirty = True


def predict_from_title(cluster, config):
    """Gender signalled by an honorific on any member entity, or None.

    Conflicting titles across members yield unknown (logged) rather than a
    guess.
    """
    tags = set()
    for entity in cluster.member_entities:
        titles, _rest = strip_titles(entity.text, config)
        for title in titles:
            tag = config.title_gender(title)
            if tag in ("m", "f"):
                tags.add(tag)
    if not tags:
        return None
    if len(tags) > 1:
        log.warning("conflicting titles on cluster %r", cluster.representative)
        return GenderLabel(UNKNOWN, EVIDENCE_TITLE, 0.0)
    tag = tags.pop()
    return GenderLabel(_TAG_VALUES[tag], EVIDENCE_TITLE, 1.0)


def predict(cluster, config, providers=(), cache=None, overrides=None) -> GenderLabel:
    """Run the full cascade for one cluster; first firm answer wins."""
    if overrides is None:
        overrides = config.gender_overrides
    representative = cluster.representative
    if not representative:
        return GenderLabel(UNKNOWN)

    override = overrides.get(representative.casefold())
    if override in _TAG_VALUES:
        return GenderLabel(_TAG_VALUES[override], EVIDENCE_OVERRIDE, 1.0)

    from_title = predict_from_title(cluster, config)
    if from_title is not None and from_title.value != UNKNOWN:
        return from_title

    first = cluster.name_parts.first if cluster.name_parts else None
    if first:
        entry = config.first_names.get(first.casefold())
        if entry and entry[0] in ("f", "m"):
            return GenderLabel(_TAG_VALUES[entry[0]], EVIDENCE_FIRSTNAME, entry[1])

    for provider in providers:
        query = first if provider.mode == "first_name" else representative
        if not query:
            continue
        cached = cache.get(provider.name, query) if cache is not None else None
        if cached is None:
            try:
                gender, probability = provider.query(query)
            except Exception as exc:
                log.warning("gender provider %s unreachable: %s", provider.name, exc)
                continue
            if cache is not None:
                cache.put(provider.name, query, gender, probability)
        else:
            gender, probability = cached
        if gender in (FEMALE, MALE):
            evidence = (EVIDENCE_FIRSTNAME if provider.mode == "first_name"
                        else EVIDENCE_FULLNAME)
            return GenderLabel(gender, evidence, probability)

    return GenderLabel(UNKNOWN)


def gender_partition(clusters: list, labels: list) -> dict:
    """Split clusters into women / men / other by their labels."""
    assert len(clusters) == len(labels)
    parts = {"women": [], "men": [], "other": []}
    for cluster, label in zip(clusters, labels):
        if label.value == FEMALE:
            parts["women"].append(cluster)
        elif label.value == MALE:
            parts["men"].append(cluster)
        else:
            parts["other"].append(cluster)
    return parts
