"""Cluster-entity alignment, name parsing and person-level unification.

Coreference output splits long documents into several clusters per person;
this module aligns clusters with repaired person entities, parses entity
texts into first/middle/last parts, merges clusters whose names denote the
same person, and picks the fullest name as each cluster's representative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .docmodel import span_overlap
from .coref import CorefChain, chain_to_cluster


class NameParseError(ValueError):
    pass


@dataclass(frozen=True)
class NameParts:
    first: str | None = None
    middles: tuple = ()
    last: str | None = None
    titles: tuple = ()

    @property
    def component_count(self) -> int:
        return (1 if self.first else 0) + (1 if self.last else 0) + len(self.middles)

    @property
    def is_bare(self) -> bool:
        return self.component_count == 1

    @property
    def sole(self) -> str | None:
        if not self.is_bare:
            return None
        return self.first or self.last or self.middles[0]

    def display(self) -> str:
        parts = [self.first, *self.middles, self.last]
        return " ".join(p for p in parts if p)


def strip_titles(text: str, config):
    """Split leading honorifics off a name string."""
    tokens = text.split()
    titles = []
    while tokens and config.is_title(tokens[0]):
        titles.append(tokens.pop(0))
    return titles, tokens


def parse_name(text: str, config) -> NameParts:
    """Split a person-name string into title/first/middle/last parts.

    Particles (de, von, bin, Al...) glue onto the following token, so
    "Mohammed bin Salman Al Saud" keeps "bin Salman" and "Al Saud" whole.
    A single remaining token is stored as a last name: news prose mentions
    people in surname position far more often than by first name alone.
    """
    if not text or not text.strip():
        raise NameParseError("empty name")
    titles, tokens = strip_titles(text, config)
    if not tokens:
        raise NameParseError(f"nothing left of {text!r} after title stripping")

    units = []
    pending = []
    for token in tokens:
        if token.lower() in config.particles and token != tokens[-1]:
            pending.append(token)
        else:
            units.append(" ".join(pending + [token]))
            pending = []
    if pending:
        if units:
            units[-1] = " ".join([units[-1]] + pending)
        else:
            units.append(" ".join(pending))

    titles = tuple(titles)
    if len(units) == 1:
        return NameParts(last=units[0], titles=titles)
    if len(units) == 2:
        return NameParts(first=units[0], last=units[1], titles=titles)
    return NameParts(first=units[0], middles=tuple(units[1:-1]), last=units[-1],
                     titles=titles)


def _eq(a: str | None, b: str | None) -> bool:
    return a is not None and b is not None and a.casefold() == b.casefold()


SAME = "same"
DIFFERENT = "different"
AMBIGUOUS = "ambiguous"


def same_person(a: NameParts, b: NameParts) -> str:
    """Do two parsed names denote the same person?

    Only "same" ever merges clusters; anything unclear stays apart because
    journalists strongly prefer unambiguous full names.
    """
    if a.is_bare and b.is_bare:
        return SAME if _eq(a.sole, b.sole) else DIFFERENT
    if a.is_bare or b.is_bare:
        bare, full = (a, b) if a.is_bare else (b, a)
        if _eq(bare.sole, full.first) or _eq(bare.sole, full.last):
            return SAME
        return DIFFERENT
    first_match = _eq(a.first, b.first)
    last_match = _eq(a.last, b.last)
    if first_match and last_match:
        return SAME
    if first_match or last_match:
        return DIFFERENT
    return AMBIGUOUS


def representative(candidates: list) -> int:
    """Index of the most representative NameParts.

    Order: first+last beats last beats first beats middle count; earliest
    appearance wins ties.
    """
    if not candidates:
        raise ValueError("no candidates")

    def key(parts: NameParts):
        return (
            bool(parts.first and parts.last),
            bool(parts.last),
            bool(parts.first),
            len(parts.middles),
        )

    best = 0
    for i in range(1, len(candidates)):
        if key(candidates[i]) > key(candidates[best]):
            best = i
    return best


@dataclass
class EntityCluster:
    """One (eventually unique) person: mentions, entities, chosen name."""

    representative: str                 # title-stripped display name
    name_parts: NameParts | None
    mentions: list                      # list of mention head-span lists
    member_entities: list = field(default_factory=list)
    chain_id: int | None = None

    @property
    def is_named(self) -> bool:
        return bool(self.representative)

    def first_offset(self) -> int:
        starts = [s.start for mention in self.mentions for s in mention]
        starts.extend(e.span.start for e in self.member_entities)
        return min(starts) if starts else 0


def align(entities: list, clusters: list):
    """Assign person entities to mention-span clusters by head coverage.

    An entity joins a cluster when its span overlaps every head span of at
    least one mention; heads rather than whole phrases keep embedded noun
    phrases from capturing the surrounding entity. Returns (assignments,
    leftovers) with each entity in at most one cluster.
    """
    assignments = {i: [] for i in range(len(clusters))}
    leftovers = []
    for entity in entities:
        best = None
        best_overlap = 0
        for i, mention_spans in enumerate(clusters):
            for heads in mention_spans:
                overlaps = [span_overlap(entity.span, h) for h in heads]
                if all(o > 0 for o in overlaps):
                    total = sum(overlaps)
                    if total > best_overlap:
                        best, best_overlap = i, total
        if best is None:
            leftovers.append(entity)
        else:
            assignments[best].append(entity)
    return assignments, leftovers


def _choose_representative(members: list, config):
    """(display text, parts) of the best-named member entity."""
    parsed = []
    for ent in sorted(members, key=lambda e: e.span.start):
        try:
            parsed.append((ent, parse_name(ent.text, config)))
        except NameParseError:
            continue
    if not parsed:
        return "", None
    index = representative([parts for _, parts in parsed])
    return parsed[index][1].display(), parsed[index][1]


def build_clusters(doc, entities: list, chains: list, config) -> list:
    """EntityClusters from chains plus singletons for unaligned entities."""
    span_clusters = [chain_to_cluster(doc, chain) for chain in chains]
    assignments, leftovers = align(entities, span_clusters)
    out = []
    for i, chain in enumerate(chains):
        members = assignments[i]
        rep, parts = _choose_representative(members, config) if members else ("", None)
        out.append(EntityCluster(
            representative=rep,
            name_parts=parts,
            mentions=list(span_clusters[i]),
            member_entities=members,
            chain_id=chain.chain_id if isinstance(chain, CorefChain) else i,
        ))
    for entity in leftovers:
        rep, parts = _choose_representative([entity], config)
        out.append(EntityCluster(
            representative=rep,
            name_parts=parts,
            mentions=[[entity.span]],
            member_entities=[entity],
        ))
    return out


def merge(clusters: list, config) -> list:
    """Merge clusters whose representatives name the same person.

    Matches are taken over the clusters' original representatives and closed
    transitively, which makes the result independent of input order; the
    merged cluster re-elects its representative from all member entities.
    """
    named = [i for i, c in enumerate(clusters) if c.name_parts is not None]
    adjacency = {i: set() for i in named}
    for pos, i in enumerate(named):
        for j in named[pos + 1:]:
            outcome = same_person(clusters[i].name_parts, clusters[j].name_parts)
            if outcome == SAME:
                adjacency[i].add(j)
                adjacency[j].add(i)

    seen = set()
    components = []
    for i in named:
        if i in seen:
            continue
        stack, component = [i], []
        seen.add(i)
        while stack:
            current = stack.pop()
            component.append(current)
            for neighbour in adjacency[current]:
                if neighbour not in seen:
                    seen.add(neighbour)
                    stack.append(neighbour)
        components.append(sorted(component))

    merged = []
    for component in components:
        members = []
        mentions = []
        for i in component:
            members.extend(clusters[i].member_entities)
            mentions.extend(clusters[i].mentions)
        mentions.sort(key=lambda heads: heads[0].start)
        rep, parts = _choose_representative(members, config)
        merged.append(EntityCluster(
            representative=rep,
            name_parts=parts,
            mentions=mentions,
            member_entities=sorted(members, key=lambda e: e.span.start),
            chain_id=clusters[component[0]].chain_id,
        ))
    nameless = [c for i, c in enumerate(clusters) if c.name_parts is None]
    return sorted(merged + nameless, key=lambda c: c.first_offset())
