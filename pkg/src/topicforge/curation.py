"""Guarded ontology mutations, audit replay, and the review queue.

Every operation here is pure: it takes an Ontology snapshot and returns a new
one plus an audit payload, leaving the input untouched. Persistence (audit
append, canonical save, queue files) is the Workspace's job in
:mod:`topicforge.workspace`. A failed operation raises and changes nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from . import model
from .errors import (
    AlreadyDecidedError,
    AlreadyRetiredError,
    CycleRejectedError,
    DuplicatePairError,
    DuplicateSlugError,
    EmptyNameError,
    EmptyParentSetError,
    EnglishRequiredError,
    IsRootError,
    MergeWouldCycleError,
    ReplayError,
    RetiredEndpointError,
    RetiredInputError,
    RootAsChildError,
    SameTopicError,
    TopicForgeError,
    UnknownEdgeError,
    UnknownItemError,
    UnknownParentError,
    UnknownTopicError,
    WouldOrphanChildrenError,
    WouldOrphanError,
)
from .io import ChangeRecord
from .model import DisplayNameRecord, Ontology, TopicEdge, TopicNode


class BadSlugError(TopicForgeError):
    code = "bad-slug-format"


def _require_live(o: Ontology, topic_id: int) -> TopicNode:
    node = o.node(topic_id)
    if node.retired:
        raise RetiredEndpointError(f"topic {topic_id} ({node.slug}) is retired")
    return node


def add_topic(
    o: Ontology,
    slug: str,
    english_name: str,
    parent_ids: list[int],
    wikidata_id: Optional[str] = None,
    freebase_mid: Optional[str] = None,
) -> tuple[Ontology, int, dict]:
    """Create a node under one or more existing parents; roots are never created here."""
    if not model.is_valid_slug(slug):
        raise BadSlugError(f"invalid slug {slug!r}")
    if slug in o.slug_index:
        raise DuplicateSlugError(f"slug {slug!r} already used by topic {o.slug_index[slug]}")
    if not english_name:
        raise EmptyNameError("english_name must be non-empty")
    if not parent_ids:
        raise EmptyParentSetError("a new topic needs at least one parent")
    for p in parent_ids:
        if p not in o.nodes:
            raise UnknownParentError(f"no topic with id {p}")
        if o.nodes[p].retired:
            raise RetiredEndpointError(f"parent {p} is retired")

    tid = o.next_topic_id()
    node = TopicNode(tid, slug, wikidata_id or None, freebase_mid or None, False)
    nodes = dict(o.nodes)
    nodes[tid] = node
    edges = dict(o.edges)
    edge_ids = []
    eid = o.next_edge_id()
    for p in sorted(set(parent_ids)):
        edges[eid] = TopicEdge(eid, p, tid)
        edge_ids.append(eid)
        eid += 1
    names = dict(o.display_names)
    names[(tid, "en")] = DisplayNameRecord(tid, "en", "visible", english_name)
    o2 = replace(o, nodes=nodes, edges=edges, display_names=names)
    payload = {
        "topic_id": tid,
        "slug": slug,
        "english_name": english_name,
        "wikidata_id": wikidata_id or "",
        "freebase_mid": freebase_mid or "",
        "parent_ids": sorted(set(parent_ids)),
        "edge_ids": edge_ids,
    }
    return o2, tid, payload


def add_edge(o: Ontology, parent: int, child: int) -> tuple[Ontology, int, dict]:
    _require_live(o, parent)
    _require_live(o, child)
    if child in o.root_ids:
        raise RootAsChildError(f"topic {child} is a root and cannot gain a parent")
    if (parent, child) in o.edge_pairs:
        raise DuplicatePairError(f"edge {parent}->{child} already exists")
    if model.would_create_cycle(o, parent, child):
        raise CycleRejectedError(f"edge {parent}->{child} would create a cycle")
    eid = o.next_edge_id()
    edges = dict(o.edges)
    edges[eid] = TopicEdge(eid, parent, child)
    o2 = replace(o, edges=edges)
    return o2, eid, {"edge_id": eid, "source": parent, "destination": child}


def remove_edge(o: Ontology, edge_id: int) -> tuple[Ontology, dict]:
    edge = o.edges.get(edge_id)
    if edge is None:
        raise UnknownEdgeError(f"no edge with id {edge_id}")
    child = edge.destination
    if child in o.nodes and not o.nodes[child].retired and child not in o.root_ids:
        remaining = [p for p in o.parents.get(child, ()) if p != edge.source]
        # parallel pairs are invalid, so losing this edge loses the parent
        if not remaining:
            raise WouldOrphanError(
                f"removing edge {edge_id} would orphan topic {child}"
            )
    edges = dict(o.edges)
    del edges[edge_id]
    o2 = replace(o, edges=edges)
    return o2, {"edge_id": edge_id, "source": edge.source, "destination": edge.destination}


def retire_topic(o: Ontology, topic_id: int) -> tuple[Ontology, dict]:
    node = o.node(topic_id)
    if node.retired:
        raise AlreadyRetiredError(f"topic {topic_id} is already retired")
    if topic_id in o.root_ids:
        raise IsRootError(f"topic {topic_id} is a root category")
    # each child must keep a path to a root through some other parent
    endangered = []
    for c in o.children.get(topic_id, ()):
        if c in o.root_ids or (c in o.nodes and o.nodes[c].retired):
            continue
        if not [p for p in o.parents.get(c, ()) if p != topic_id]:
            endangered.append(c)
    if endangered:
        raise WouldOrphanChildrenError(
            f"retiring {topic_id} would orphan children {sorted(endangered)}",
            children=sorted(endangered),
        )
    removed = sorted(
        eid for eid, e in o.edges.items() if topic_id in (e.source, e.destination)
    )
    edges = {eid: e for eid, e in o.edges.items() if eid not in set(removed)}
    nodes = dict(o.nodes)
    nodes[topic_id] = replace(node, retired=True)
    o2 = replace(o, nodes=nodes, edges=edges)
    return o2, {"topic_id": topic_id, "removed_edge_ids": removed}


def merge_topics(o: Ontology, loser: int, winner: int) -> tuple[Ontology, dict]:
    """Fold ``loser`` into ``winner``: edges re-pointed, metadata adopted only
    where the winner lacks it, loser retired. Rejected atomically if the
    re-pointed graph would be cyclic."""
    if loser == winner:
        raise SameTopicError("cannot merge a topic into itself")
    ln = o.node(loser)
    wn = o.node(winner)
    if ln.retired or wn.retired:
        raise RetiredInputError("merge requires two live topics")
    if loser in o.root_ids:
        raise IsRootError(f"topic {loser} is a root category and cannot be merged away")

    winner_is_root = winner in o.root_ids
    edges: dict[int, TopicEdge] = {}
    pairs: set[tuple[int, int]] = set()
    repointed: list[list[int]] = []
    dropped: list[int] = []
    for eid in sorted(o.edges):
        e = o.edges[eid]
        src = winner if e.source == loser else e.source
        dst = winner if e.destination == loser else e.destination
        # self-loops, duplicate pairs, and parents for a root winner all drop
        if src == dst or (src, dst) in pairs or (winner_is_root and dst == winner):
            dropped.append(eid)
            continue
        pairs.add((src, dst))
        edges[eid] = TopicEdge(eid, src, dst)
        if (src, dst) != (e.source, e.destination):
            repointed.append([eid, src, dst])

    merged = replace(o, edges=edges)
    # any new cycle must pass through the winner: only edges touching it changed
    if winner in model.descendants(merged, winner):
        raise MergeWouldCycleError(f"merging {loser} into {winner} would create a cycle")

    nodes = dict(o.nodes)
    adopted_refs = {}
    if not wn.wikidata_id and ln.wikidata_id:
        adopted_refs["wikidata_id"] = ln.wikidata_id
    if not wn.freebase_mid and ln.freebase_mid:
        adopted_refs["freebase_mid"] = ln.freebase_mid
    nodes[winner] = replace(
        wn,
        wikidata_id=wn.wikidata_id or ln.wikidata_id,
        freebase_mid=wn.freebase_mid or ln.freebase_mid,
    )
    nodes[loser] = replace(ln, retired=True)

    names = dict(o.display_names)
    adopted_names = []
    for lang in model.LANGUAGES:
        loser_rec = names.get((loser, lang))
        if loser_rec is not None and (winner, lang) not in names:
            names[(winner, lang)] = replace(loser_rec, topic_id=winner)
            adopted_names.append([lang, loser_rec.display_name, loser_rec.display_type])

    o2 = replace(merged, nodes=nodes, display_names=names)
    payload = {
        "loser": loser,
        "winner": winner,
        "repointed": repointed,
        "dropped_edge_ids": dropped,
        "adopted_names": adopted_names,
        "adopted_refs": adopted_refs,
    }
    return o2, payload


def set_display_name(
    o: Ontology, topic_id: int, language: str, name: str, display_type: str = "visible"
) -> tuple[Ontology, dict]:
    _require_live(o, topic_id)
    if language not in model.LANGUAGES:
        raise TopicForgeError(f"unknown language {language!r}")
    if not name:
        raise EmptyNameError("display_name must be non-empty")
    if display_type not in model.DISPLAY_TYPES:
        raise TopicForgeError(f"unknown display_type {display_type!r}")
    names = dict(o.display_names)
    names[(topic_id, language)] = DisplayNameRecord(topic_id, language, display_type, name)
    o2 = replace(o, display_names=names)
    return o2, {
        "topic_id": topic_id,
        "language": language,
        "display_type": display_type,
        "display_name": name,
    }


def remove_display_name(o: Ontology, topic_id: int, language: str) -> tuple[Ontology, dict]:
    _require_live(o, topic_id)
    if language == "en":
        raise EnglishRequiredError("the English display name cannot be removed")
    if (topic_id, language) not in o.display_names:
        raise UnknownTopicError(f"topic {topic_id} has no {language} display name")
    names = dict(o.display_names)
    del names[(topic_id, language)]
    o2 = replace(o, display_names=names)
    return o2, {"topic_id": topic_id, "language": language, "removed": True}


def rename_slug(o: Ontology, topic_id: int, new_slug: str) -> tuple[Ontology, dict]:
    node = _require_live(o, topic_id)
    if not model.is_valid_slug(new_slug):
        raise BadSlugError(f"invalid slug {new_slug!r}")
    if new_slug in o.slug_index and o.slug_index[new_slug] != topic_id:
        raise DuplicateSlugError(f"slug {new_slug!r} already used")
    nodes = dict(o.nodes)
    nodes[topic_id] = replace(node, slug=new_slug)
    o2 = replace(o, nodes=nodes)
    return o2, {"topic_id": topic_id, "old_slug": node.slug, "new_slug": new_slug}


# -- audit replay -----------------------------------------------------------


def apply_record(o: Ontology, rec: ChangeRecord) -> Ontology:
    """Re-apply one audit record; raises ReplayError on any divergence."""
    p = rec.payload
    try:
        if rec.op_kind == "add_topic":
            o2, tid, payload = add_topic(
                o,
                p["slug"],
                p["english_name"],
                list(p["parent_ids"]),
                p.get("wikidata_id") or None,
                p.get("freebase_mid") or None,
            )
            if tid != p["topic_id"] or payload["edge_ids"] != list(p["edge_ids"]):
                raise ReplayError(f"seq {rec.seq}: assigned ids diverge from recorded ids")
            return o2
        if rec.op_kind == "add_edge":
            o2, eid, _ = add_edge(o, p["source"], p["destination"])
            if eid != p["edge_id"]:
                raise ReplayError(f"seq {rec.seq}: assigned edge_id {eid} != recorded {p['edge_id']}")
            return o2
        if rec.op_kind == "remove_edge":
            o2, _ = remove_edge(o, p["edge_id"])
            return o2
        if rec.op_kind == "retire_topic":
            o2, payload = retire_topic(o, p["topic_id"])
            return o2
        if rec.op_kind == "merge_topics":
            o2, _ = merge_topics(o, p["loser"], p["winner"])
            return o2
        if rec.op_kind == "set_display_name":
            if p.get("removed"):
                o2, _ = remove_display_name(o, p["topic_id"], p["language"])
            else:
                o2, _ = set_display_name(
                    o, p["topic_id"], p["language"], p["display_name"], p["display_type"]
                )
            return o2
        if rec.op_kind == "rename_slug":
            o2, _ = rename_slug(o, p["topic_id"], p["new_slug"])
            return o2
    except ReplayError:
        raise
    except TopicForgeError as exc:
        raise ReplayError(f"seq {rec.seq}: {rec.op_kind} failed on replay: {exc}") from exc
    raise ReplayError(f"seq {rec.seq}: unknown op_kind {rec.op_kind!r}")


def replay_audit(genesis: Ontology, records: list[ChangeRecord]) -> Ontology:
    o = genesis
    expected = 0
    for rec in records:
        if rec.seq != expected + 1:
            raise ReplayError(f"audit log gap: expected seq {expected + 1}, found {rec.seq}")
        expected = rec.seq
        o = apply_record(o, rec)
    return o


# -- review queue -----------------------------------------------------------

PROPOSAL_KINDS = ("add_edge", "merge_topics", "retire_topic", "add_topic")


@dataclass(frozen=True)
class ReviewItem:
    item_id: int
    proposal: dict  # {"kind": ..., kind-specific fields}
    status: str  # pending | accepted | rejected
    provenance: str
    created_at: str
    decided_at: Optional[str] = None
    decider: Optional[str] = None
    detail: str = ""


@dataclass(frozen=True)
class ReviewQueue:
    items: dict[int, ReviewItem]

    def next_item_id(self) -> int:
        return max(self.items, default=0) + 1

    def pending(self) -> list[ReviewItem]:
        return [i for i in sorted(self.items.values(), key=lambda i: i.item_id) if i.status == "pending"]


def propose(queue: ReviewQueue, proposal: dict, provenance: str, created_at: str) -> tuple[ReviewQueue, ReviewItem]:
    kind = proposal.get("kind")
    if kind not in PROPOSAL_KINDS:
        raise TopicForgeError(f"unknown proposal kind {kind!r}")
    item = ReviewItem(
        item_id=queue.next_item_id(),
        proposal=proposal,
        status="pending",
        provenance=provenance,
        created_at=created_at,
    )
    items = dict(queue.items)
    items[item.item_id] = item
    return ReviewQueue(items), item


def _apply_proposal(o: Ontology, proposal: dict) -> tuple[Ontology, str, dict]:
    """Returns (new ontology, audit op_kind, audit payload)."""
    kind = proposal["kind"]
    if kind == "add_edge":
        o2, eid, payload = add_edge(o, proposal["parent"], proposal["child"])
        return o2, "add_edge", payload
    if kind == "merge_topics":
        o2, payload = merge_topics(o, proposal["loser"], proposal["winner"])
        return o2, "merge_topics", payload
    if kind == "retire_topic":
        o2, payload = retire_topic(o, proposal["topic_id"])
        return o2, "retire_topic", payload
    if kind == "add_topic":
        o2, tid, payload = add_topic(
            o,
            proposal["slug"],
            proposal["english_name"],
            list(proposal["parent_ids"]),
            proposal.get("wikidata_id") or None,
            proposal.get("freebase_mid") or None,
        )
        return o2, "add_topic", payload
    raise TopicForgeError(f"unknown proposal kind {kind!r}")


def decide(
    queue: ReviewQueue,
    item_id: int,
    accept: bool,
    actor: str,
    o: Ontology,
    decided_at: str,
) -> tuple[ReviewQueue, ReviewItem, Ontology, Optional[tuple[str, dict]]]:
    """Resolve one pending item.

    Accepting runs the underlying operation with all its guards; if the guard
    fires, the item is recorded as rejected with the failure detail and the
    ontology is unchanged. Returns (queue, item, ontology, audit op or None).
    """
    item = queue.items.get(item_id)
    if item is None:
        raise UnknownItemError(f"no review item {item_id}")
    if item.status != "pending":
        raise AlreadyDecidedError(f"item {item_id} is already {item.status}")

    audit: Optional[tuple[str, dict]] = None
    if accept:
        try:
            o2, op_kind, payload = _apply_proposal(o, item.proposal)
            item = replace(item, status="accepted", decided_at=decided_at, decider=actor)
            audit = (op_kind, payload)
            o = o2
        except TopicForgeError as exc:
            item = replace(
                item,
                status="rejected",
                decided_at=decided_at,
                decider=actor,
                detail=f"{exc.code}: {exc.detail}",
            )
    else:
        item = replace(item, status="rejected", decided_at=decided_at, decider=actor)

    items = dict(queue.items)
    items[item.item_id] = item
    return ReviewQueue(items), item, o, audit


# -- queue persistence (JSON lines, append-only) ----------------------------

QUEUE_FILE = "review_queue.log"


def load_queue(corpus_dir) -> ReviewQueue:
    path = Path(corpus_dir) / QUEUE_FILE
    items: dict[int, ReviewItem] = {}
    if path.is_file():
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            ev = json.loads(line)
            if ev["event"] == "propose":
                items[ev["item_id"]] = ReviewItem(
                    item_id=ev["item_id"],
                    proposal=ev["proposal"],
                    status="pending",
                    provenance=ev["provenance"],
                    created_at=ev["created_at"],
                )
            elif ev["event"] == "decide":
                prev = items[ev["item_id"]]
                items[ev["item_id"]] = replace(
                    prev,
                    status=ev["status"],
                    decided_at=ev["decided_at"],
                    decider=ev["decider"],
                    detail=ev.get("detail", ""),
                )
    return ReviewQueue(items)


def append_queue_event(corpus_dir, event: dict) -> None:
    path = Path(corpus_dir) / QUEUE_FILE
    with open(path, "a", encoding="utf-8", newline="") as f:
        f.write(json.dumps(event, ensure_ascii=False) + "\n")
