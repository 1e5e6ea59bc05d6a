"""Single-writer persistence wrapper used by the CLI and the HTTP service.

A Workspace owns one corpus directory. Reads hand out the current immutable
snapshot; every mutation runs under an advisory file lock, appends the audit
record, saves the corpus canonically, and only then swaps the snapshot.
"""

from __future__ import annotations

import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from filelock import FileLock

from . import curation, io
from .curation import ReviewItem, ReviewQueue
from .model import Ontology


def utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class Workspace:
    def __init__(self, corpus_dir):
        self.corpus_dir = Path(corpus_dir)
        self._lock = threading.Lock()
        self._file_lock = FileLock(str(self.corpus_dir / ".topicforge.lock"))
        self._ontology = io.load_ontology(self.corpus_dir)
        self._queue = curation.load_queue(self.corpus_dir)

    @property
    def ontology(self) -> Ontology:
        return self._ontology

    @property
    def queue(self) -> ReviewQueue:
        return self._queue

    def _commit(self, o2: Ontology, actor: str, op_kind: str, payload: dict) -> None:
        rec = io.ChangeRecord(
            seq=io.last_audit_seq(self.corpus_dir) + 1,
            timestamp=utc_now(),
            actor=actor,
            op_kind=op_kind,
            payload=payload,
        )
        io.append_audit(self.corpus_dir, rec)
        io.save_ontology(o2, self.corpus_dir)
        self._ontology = o2

    def mutate(self, actor: str, op_kind: str, fn):
        """Run ``fn(ontology) -> (new_ontology, result, payload)`` durably."""
        with self._lock, self._file_lock:
            o2, result, payload = fn(self._ontology)
            self._commit(o2, actor, op_kind, payload)
            return result

    # -- curation wrappers ---------------------------------------------------

    def add_topic(self, slug, english_name, parent_ids, actor, wikidata_id=None, freebase_mid=None) -> int:
        def fn(o):
            o2, tid, payload = curation.add_topic(
                o, slug, english_name, parent_ids, wikidata_id, freebase_mid
            )
            return o2, tid, payload

        return self.mutate(actor, "add_topic", fn)

    def add_edge(self, parent, child, actor) -> int:
        def fn(o):
            o2, eid, payload = curation.add_edge(o, parent, child)
            return o2, eid, payload

        return self.mutate(actor, "add_edge", fn)

    def remove_edge(self, edge_id, actor) -> None:
        def fn(o):
            o2, payload = curation.remove_edge(o, edge_id)
            return o2, None, payload

        return self.mutate(actor, "remove_edge", fn)

    def retire_topic(self, topic_id, actor) -> None:
        def fn(o):
            o2, payload = curation.retire_topic(o, topic_id)
            return o2, None, payload

        return self.mutate(actor, "retire_topic", fn)

    def merge_topics(self, loser, winner, actor) -> None:
        def fn(o):
            o2, payload = curation.merge_topics(o, loser, winner)
            return o2, None, payload

        return self.mutate(actor, "merge_topics", fn)

    def set_display_name(self, topic_id, language, name, display_type, actor) -> None:
        def fn(o):
            o2, payload = curation.set_display_name(o, topic_id, language, name, display_type)
            return o2, None, payload

        return self.mutate(actor, "set_display_name", fn)

    def remove_display_name(self, topic_id, language, actor) -> None:
        def fn(o):
            o2, payload = curation.remove_display_name(o, topic_id, language)
            return o2, None, payload

        return self.mutate(actor, "set_display_name", fn)

    def rename_slug(self, topic_id, new_slug, actor) -> None:
        def fn(o):
            o2, payload = curation.rename_slug(o, topic_id, new_slug)
            return o2, None, payload

        return self.mutate(actor, "rename_slug", fn)

    # -- review queue --------------------------------------------------------

    def propose(self, proposal: dict, provenance: str) -> ReviewItem:
        with self._lock, self._file_lock:
            queue, item = curation.propose(self._queue, proposal, provenance, utc_now())
            curation.append_queue_event(
                self.corpus_dir,
                {
                    "event": "propose",
                    "item_id": item.item_id,
                    "proposal": item.proposal,
                    "provenance": item.provenance,
                    "created_at": item.created_at,
                },
            )
            self._queue = queue
            return item

    def decide(self, item_id: int, accept: bool, actor: str) -> ReviewItem:
        with self._lock, self._file_lock:
            queue, item, o2, audit = curation.decide(
                self._queue, item_id, accept, actor, self._ontology, utc_now()
            )
            if audit is not None:
                op_kind, payload = audit
                self._commit(o2, actor, op_kind, payload)
            curation.append_queue_event(
                self.corpus_dir,
                {
                    "event": "decide",
                    "item_id": item.item_id,
                    "status": item.status,
                    "decided_at": item.decided_at,
                    "decider": item.decider,
                    "detail": item.detail,
                },
            )
            self._queue = queue
            return item

    # -- audit ---------------------------------------------------------------

    def audit_records(self) -> list[io.ChangeRecord]:
        return io.read_audit(self.corpus_dir)

    def audit_for_topic(self, topic_id: int, limit: int = 20) -> list[io.ChangeRecord]:
        hits = []
        for rec in reversed(self.audit_records()):
            p = rec.payload
            involved = {
                p.get("topic_id"),
                p.get("source"),
                p.get("destination"),
                p.get("loser"),
                p.get("winner"),
            }
            involved.update(p.get("parent_ids", ()))
            if topic_id in involved:
                hits.append(rec)
                if len(hits) >= limit:
                    break
        return hits
