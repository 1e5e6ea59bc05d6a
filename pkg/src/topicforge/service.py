"""HTTP facade over the toolkit: read/query, validation, QA reports, curation,
and the review queue, under ``/api/v1``.

Readers always see an immutable snapshot; mutations serialize through the
Workspace's single writer and are saved + audit-logged before the response
goes out. Mutating requests must carry an ``X-Actor`` header, which is what
lands in the audit log.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import alignment, curation, model, qa, validator
from .errors import (
    AlreadyDecidedError,
    AlreadyRetiredError,
    TopicForgeError,
    UnknownEdgeError,
    UnknownItemError,
    UnknownTopicError,
)
from .model import Ontology
from .text import normalize_label, normalize_slug
from .workspace import Workspace

API_PREFIX = "/api/v1"
DEFAULT_LIMIT = 100

_NOT_FOUND = (UnknownTopicError, UnknownEdgeError, UnknownItemError)
_BAD_REQUEST_CODES = {
    "empty-name",
    "empty-parent-set",
    "empty-corpus",
    "bad-slug-format",
    "malformed-row",
    "missing-file",
    "unknown-language-code",
    "unknown-parent",
    "actor-required",
}


class ActorRequiredError(TopicForgeError):
    code = "actor-required"


def _status_for(exc: TopicForgeError) -> int:
    if isinstance(exc, _NOT_FOUND):
        return 404
    if exc.code in _BAD_REQUEST_CODES:
        return 400
    if isinstance(exc, (AlreadyDecidedError, AlreadyRetiredError)):
        return 409
    return 409  # guard rejections: cycle-rejected, duplicate-*, would-orphan, ...


class TopicIn(BaseModel):
    slug: str
    english_name: str
    parent_ids: list[int]
    wikidata_id: Optional[str] = None
    freebase_mid: Optional[str] = None


class EdgeIn(BaseModel):
    parent: int
    child: int


class DisplayNameIn(BaseModel):
    display_name: str
    display_type: str = "visible"


class ProposalIn(BaseModel):
    proposal: dict
    provenance: str = "manual"


class CoverageIn(BaseModel):
    corpus_file: str
    top_n: int = 50


class ScopeIn(BaseModel):
    usage_file: str
    threshold: int = 0


class EdgeCheckIn(BaseModel):
    edges_file: str
    id_space: str


class AlignIn(BaseModel):
    taxonomy_dir: str
    mode: str = "direct"


def _topic_out(o: Ontology, topic_id: int, lang: Optional[str] = None) -> dict:
    n = o.node(topic_id)
    names = {
        language: {"display_name": rec.display_name, "display_type": rec.display_type}
        for (tid, language), rec in o.display_names.items()
        if tid == topic_id
    }
    resolved = model.resolve_display(o, topic_id, lang or "en")
    return {
        "topic_id": n.topic_id,
        "slug": n.slug,
        "wikidata_id": n.wikidata_id,
        "freebase_mid": n.freebase_mid,
        "retired": n.retired,
        "is_root": topic_id in o.root_ids,
        "display_names": names,
        "resolved_name": resolved[0] if resolved else None,
        "resolved_type": resolved[1] if resolved else None,
        "parents": list(o.parents.get(topic_id, ())),
        "children": list(o.children.get(topic_id, ())),
    }


def _item_out(item: curation.ReviewItem) -> dict:
    return {
        "item_id": item.item_id,
        "proposal": item.proposal,
        "status": item.status,
        "provenance": item.provenance,
        "created_at": item.created_at,
        "decided_at": item.decided_at,
        "decider": item.decider,
        "detail": item.detail,
    }


def _page(items: list, offset: int, limit: int) -> dict:
    return {"total": len(items), "offset": offset, "limit": limit, "items": items[offset : offset + limit]}


def create_app(ws: Workspace) -> FastAPI:
    app = FastAPI(title="topicforge", version="0.1.0")

    @app.exception_handler(TopicForgeError)
    async def handle_tf_error(request: Request, exc: TopicForgeError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"status": _status_for(exc), "code": exc.code, "detail": exc.detail},
        )

    def actor_or_fail(actor: Optional[str]) -> str:
        if not actor:
            raise ActorRequiredError("X-Actor header is required for mutations")
        return actor

    p = API_PREFIX

    @app.get(p + "/topics")
    def list_topics(offset: int = 0, limit: int = Query(DEFAULT_LIMIT, le=1000)):
        o = ws.ontology
        ids = sorted(o.nodes)
        return _page([_topic_out(o, t) for t in ids], offset, limit)

    @app.get(p + "/topics/{topic_id}")
    def get_topic(topic_id: int, lang: Optional[str] = None):
        return _topic_out(ws.ontology, topic_id, lang)

    @app.get(p + "/topics/{topic_id}/paths")
    def get_paths(topic_id: int):
        o = ws.ontology
        paths = model.paths_to_roots(o, topic_id)
        return {
            "paths": [
                {"topic_ids": path, "slugs": model.path_slugs(o, path)} for path in paths
            ]
        }

    @app.get(p + "/topics/{topic_id}/children")
    def get_children(topic_id: int, offset: int = 0, limit: int = Query(DEFAULT_LIMIT, le=1000)):
        o = ws.ontology
        o.node(topic_id)
        return _page([_topic_out(o, c) for c in o.children.get(topic_id, ())], offset, limit)

    @app.get(p + "/topics/{topic_id}/ancestors")
    def get_ancestors(topic_id: int):
        o = ws.ontology
        return {"ancestors": sorted(model.ancestors(o, topic_id))}

    @app.get(p + "/topics/{topic_id}/audit")
    def get_topic_audit(topic_id: int, limit: int = 20):
        ws.ontology.node(topic_id)
        records = ws.audit_for_topic(topic_id, limit)
        return {
            "records": [
                {
                    "seq": r.seq,
                    "timestamp": r.timestamp,
                    "actor": r.actor,
                    "op_kind": r.op_kind,
                    "payload": r.payload,
                }
                for r in records
            ]
        }

    @app.get(p + "/search")
    def search(
        q: str,
        lang: Optional[str] = None,
        offset: int = 0,
        limit: int = Query(DEFAULT_LIMIT, le=1000),
    ):
        o = ws.ontology
        needle = normalize_label(q)
        hits = []
        for tid in sorted(o.nodes):
            n = o.nodes[tid]
            if n.retired:
                continue
            haystacks = [normalize_slug(n.slug)]
            for (t, language), rec in o.display_names.items():
                if t == tid and (lang is None or language == lang):
                    haystacks.append(normalize_label(rec.display_name))
            if any(h.startswith(needle) for h in haystacks):
                hits.append(_topic_out(o, tid, lang))
        return _page(hits, offset, limit)

    @app.get(p + "/validate")
    def validate_endpoint():
        violations = validator.validate(ws.ontology)
        return {
            "violations": [
                {"code": v.code, "subject": v.subject, "detail": v.detail} for v in violations
            ]
        }

    @app.get(p + "/stats/roots")
    def stats_roots():
        stats = qa.root_stats(ws.ontology)
        return {
            "roots": [
                {"root_id": s.root, "slug": s.slug, "nodes": s.node_count, "edges": s.edge_count}
                for s in stats
            ]
        }

    @app.get(p + "/stats/summary")
    def stats_summary():
        nodes, edges, roots = qa.summary(ws.ontology)
        return {"nodes": nodes, "edges": edges, "roots": roots}

    # -- mutations -----------------------------------------------------------

    @app.post(p + "/topics", status_code=201)
    def post_topic(body: TopicIn, x_actor: Optional[str] = Header(None)):
        actor = actor_or_fail(x_actor)
        tid = ws.add_topic(
            body.slug, body.english_name, body.parent_ids, actor, body.wikidata_id, body.freebase_mid
        )
        return _topic_out(ws.ontology, tid)

    @app.post(p + "/edges", status_code=201)
    def post_edge(body: EdgeIn, x_actor: Optional[str] = Header(None)):
        actor = actor_or_fail(x_actor)
        eid = ws.add_edge(body.parent, body.child, actor)
        return {"edge_id": eid, "source": body.parent, "destination": body.child}

    @app.delete(p + "/edges/{edge_id}")
    def delete_edge(edge_id: int, x_actor: Optional[str] = Header(None)):
        actor = actor_or_fail(x_actor)
        ws.remove_edge(edge_id, actor)
        return {"removed": edge_id}

    @app.post(p + "/topics/{topic_id}/retire")
    def post_retire(topic_id: int, x_actor: Optional[str] = Header(None)):
        actor = actor_or_fail(x_actor)
        ws.retire_topic(topic_id, actor)
        return _topic_out(ws.ontology, topic_id)

    @app.post(p + "/topics/{topic_id}/merge-into/{winner}")
    def post_merge(topic_id: int, winner: int, x_actor: Optional[str] = Header(None)):
        actor = actor_or_fail(x_actor)
        ws.merge_topics(topic_id, winner, actor)
        return _topic_out(ws.ontology, winner)

    @app.put(p + "/topics/{topic_id}/display-names/{lang}")
    def put_display_name(
        topic_id: int, lang: str, body: DisplayNameIn, x_actor: Optional[str] = Header(None)
    ):
        actor = actor_or_fail(x_actor)
        ws.set_display_name(topic_id, lang, body.display_name, body.display_type, actor)
        return _topic_out(ws.ontology, topic_id, lang)

    @app.delete(p + "/topics/{topic_id}/display-names/{lang}")
    def delete_display_name(topic_id: int, lang: str, x_actor: Optional[str] = Header(None)):
        actor = actor_or_fail(x_actor)
        ws.remove_display_name(topic_id, lang, actor)
        return _topic_out(ws.ontology, topic_id)

    # -- review queue --------------------------------------------------------

    @app.get(p + "/review-queue")
    def get_queue(
        status: Optional[str] = None,
        offset: int = 0,
        limit: int = Query(DEFAULT_LIMIT, le=1000),
    ):
        items = sorted(ws.queue.items.values(), key=lambda i: i.item_id)
        if status:
            items = [i for i in items if i.status == status]
        return _page([_item_out(i) for i in items], offset, limit)

    @app.get(p + "/review-queue/{item_id}")
    def get_queue_item(item_id: int):
        item = ws.queue.items.get(item_id)
        if item is None:
            raise UnknownItemError(f"no review item {item_id}")
        return _item_out(item)

    @app.post(p + "/review-queue", status_code=201)
    def post_proposal(body: ProposalIn):
        item = ws.propose(body.proposal, body.provenance)
        return _item_out(item)

    @app.post(p + "/review-queue/{item_id}/accept")
    def accept_item(item_id: int, x_actor: Optional[str] = Header(None)):
        actor = actor_or_fail(x_actor)
        return _item_out(ws.decide(item_id, True, actor))

    @app.post(p + "/review-queue/{item_id}/reject")
    def reject_item(item_id: int, x_actor: Optional[str] = Header(None)):
        actor = actor_or_fail(x_actor)
        return _item_out(ws.decide(item_id, False, actor))

    # -- reports -------------------------------------------------------------

    @app.post(p + "/reports/coverage")
    def report_coverage(body: CoverageIn):
        corpus = qa.load_keyword_corpus(body.corpus_file)
        report = qa.coverage_report(ws.ontology, corpus, body.top_n)
        return {
            "matched_fraction": report.matched_fraction,
            "missing": [{"keyword": kw, "frequency": f} for kw, f in report.missing],
        }

    @app.post(p + "/reports/scope")
    def report_scope(body: ScopeIn):
        usage = qa.load_usage_stats(body.usage_file)
        rows = qa.scope_report(ws.ontology, usage, body.threshold)
        return {"candidates": [{"topic_id": t, "count": c} for t, c in rows]}

    @app.post(p + "/reports/edge-check")
    def report_edge_check(body: EdgeCheckIn):
        ext = qa.load_external_edges(body.edges_file, body.id_space)
        suspect, missing = qa.edge_check(ws.ontology, ext)
        return {
            "suspect_edges": suspect,
            "candidate_missing": [{"parent": a, "child": b} for a, b in missing],
        }

    @app.post(p + "/reports/align")
    def report_align(body: AlignIn):
        foreign = alignment.load_foreign_taxonomy(body.taxonomy_dir)
        result = alignment.align(ws.ontology, foreign)
        agree, ours_only, theirs_only = alignment.edge_agreement(
            ws.ontology, foreign, result, body.mode
        )
        return {
            "overlap_ours": result.overlap_ours,
            "overlap_theirs": result.overlap_theirs,
            "matches": [
                {"topic_id": t, "foreign_id": fid, "method": m} for t, fid, m in result.matches
            ],
            "edge_agreement": {"agree": agree, "ours_only": ours_only, "theirs_only": theirs_only},
        }

    return app
