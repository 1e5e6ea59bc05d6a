"""Domain types and pure graph queries for the topic ontology.

An :class:`Ontology` is an immutable snapshot: nodes, directed parent->child
edges, per-language display names, and the declared root set. All mutation
lives in :mod:`topicforge.curation`; everything here is read-only and safe to
share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterator, Mapping, Optional, Sequence

from .errors import PathExplosionError, UnknownTopicError

LANGUAGES = ("ar", "en", "fr", "de", "es")
DISPLAY_TYPES = ("visible", "hidden")

SLUG_RE = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)*$")
WIKIDATA_RE = re.compile(r"^Q\d+$")
FREEBASE_RE = re.compile(r"^/m/.+$")

DEFAULT_PATH_CAP = 10_000


def is_valid_slug(slug: str) -> bool:
    return bool(SLUG_RE.match(slug))


@dataclass(frozen=True)
class TopicNode:
    topic_id: int
    slug: str
    wikidata_id: Optional[str] = None
    freebase_mid: Optional[str] = None
    retired: bool = False


@dataclass(frozen=True)
class TopicEdge:
    edge_id: int
    source: int  # parent
    destination: int  # child


@dataclass(frozen=True)
class DisplayNameRecord:
    topic_id: int
    language: str
    display_type: str  # visible | hidden
    display_name: str


@dataclass(frozen=True)
class Ontology:
    """Immutable aggregate of the whole topic graph.

    ``nodes`` is keyed by topic_id, ``edges`` by edge_id, ``display_names``
    by (topic_id, language). ``root_ids`` is the declared root set, ordered;
    the validator cross-checks it against the structurally parentless nodes.
    """

    nodes: Mapping[int, TopicNode] = field(default_factory=dict)
    edges: Mapping[int, TopicEdge] = field(default_factory=dict)
    display_names: Mapping[tuple[int, str], DisplayNameRecord] = field(default_factory=dict)
    root_ids: tuple[int, ...] = ()

    # -- derived indexes (cached; instances are immutable) ------------------

    @cached_property
    def parents(self) -> dict[int, tuple[int, ...]]:
        """child topic_id -> sorted parent topic_ids."""
        acc: dict[int, list[int]] = {}
        for e in self.edges.values():
            acc.setdefault(e.destination, []).append(e.source)
        return {k: tuple(sorted(v)) for k, v in acc.items()}

    @cached_property
    def children(self) -> dict[int, tuple[int, ...]]:
        """parent topic_id -> sorted child topic_ids."""
        acc: dict[int, list[int]] = {}
        for e in self.edges.values():
            acc.setdefault(e.source, []).append(e.destination)
        return {k: tuple(sorted(v)) for k, v in acc.items()}

    @cached_property
    def slug_index(self) -> dict[str, int]:
        return {n.slug: n.topic_id for n in self.nodes.values()}

    @cached_property
    def edge_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((e.source, e.destination) for e in self.edges.values())

    def node(self, topic_id: int) -> TopicNode:
        try:
            return self.nodes[topic_id]
        except KeyError:
            raise UnknownTopicError(f"no topic with id {topic_id}") from None

    def by_slug(self, slug: str) -> TopicNode:
        tid = self.slug_index.get(slug)
        if tid is None:
            raise UnknownTopicError(f"no topic with slug {slug!r}")
        return self.nodes[tid]

    def live_nodes(self) -> Iterator[TopicNode]:
        return (n for n in self.nodes.values() if not n.retired)

    def structural_roots(self) -> tuple[int, ...]:
        """Parentless non-retired nodes, ascending; what root_ids should equal."""
        parents = self.parents
        return tuple(
            sorted(t for t, n in self.nodes.items() if not n.retired and not parents.get(t))
        )

    def next_topic_id(self) -> int:
        return max(self.nodes, default=0) + 1

    def next_edge_id(self) -> int:
        return max(self.edges, default=0) + 1

    def with_roots_from_structure(self) -> "Ontology":
        return replace(self, root_ids=self.structural_roots())


# -- graph queries ----------------------------------------------------------


def ancestors(o: Ontology, topic_id: int) -> set[int]:
    """All nodes reachable by repeatedly following child->parent; excludes self."""
    o.node(topic_id)
    seen: set[int] = set()
    stack = list(o.parents.get(topic_id, ()))
    while stack:
        t = stack.pop()
        if t in seen:
            continue
        seen.add(t)
        stack.extend(o.parents.get(t, ()))
    return seen


def descendants(o: Ontology, topic_id: int) -> set[int]:
    o.node(topic_id)
    seen: set[int] = set()
    stack = list(o.children.get(topic_id, ()))
    while stack:
        t = stack.pop()
        if t in seen:
            continue
        seen.add(t)
        stack.extend(o.children.get(t, ()))
    return seen


def is_reachable(o: Ontology, start: int, target: int) -> bool:
    """True iff ``target`` is reachable from ``start`` along parent->child edges."""
    if start == target:
        return True
    stack = [start]
    seen = {start}
    children = o.children
    while stack:
        for c in children.get(stack.pop(), ()):
            if c == target:
                return True
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return False


def would_create_cycle(o: Ontology, parent: int, child: int) -> bool:
    """True iff adding edge parent->child would close a directed cycle."""
    o.node(parent)
    o.node(child)
    if parent == child:
        return True
    return is_reachable(o, child, parent)


def paths_to_roots(
    o: Ontology, topic_id: int, cap: int = DEFAULT_PATH_CAP
) -> list[list[int]]:
    """Every simple root-first path ending at ``topic_id``.

    Sorted lexicographically by topic_id sequence. Aborts with
    PathExplosionError once more than ``cap`` paths accumulate.
    """
    o.node(topic_id)
    roots = set(o.root_ids)
    results: list[list[int]] = []
    # DFS upward; the on-path set guards against cycles in invalid input.
    path = [topic_id]
    on_path = {topic_id}

    def walk(t: int) -> None:
        if t in roots:
            results.append(list(reversed(path)))
            if len(results) > cap:
                raise PathExplosionError(
                    f"more than {cap} root paths for topic {topic_id}"
                )
            return
        for p in o.parents.get(t, ()):
            if p in on_path:
                continue
            path.append(p)
            on_path.add(p)
            walk(p)
            path.pop()
            on_path.remove(p)

    walk(topic_id)
    results.sort()
    return results


def resolve_display(
    o: Ontology, topic_id: int, language: str
) -> Optional[tuple[str, str]]:
    """(display_name, display_type) for the language, falling back to English.

    Retired nodes resolve to nothing: they carry no display obligation.
    """
    node = o.node(topic_id)
    if node.retired:
        return None
    rec = o.display_names.get((topic_id, language)) or o.display_names.get(
        (topic_id, "en")
    )
    if rec is None:
        return None
    return rec.display_name, rec.display_type


def path_slugs(o: Ontology, path: Sequence[int]) -> list[str]:
    return [o.nodes[t].slug for t in path]
