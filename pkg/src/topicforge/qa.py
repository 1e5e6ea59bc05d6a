"""Quality-assurance metrics: coverage, scope, edge cross-checks, corpus stats."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from . import model
from .errors import EmptyCorpusError, MalformedRowError, MissingFileError
from .model import Ontology
from .text import normalize_label, normalize_slug


@dataclass(frozen=True)
class KeywordCorpus:
    entries: tuple[tuple[str, int], ...]  # (keyword, frequency)


@dataclass(frozen=True)
class UsageStats:
    counts: dict[int, int]
    window: str = ""


@dataclass(frozen=True)
class ExternalEdgeSet:
    relations: frozenset[tuple[str, str]]  # (parent_external_id, child_external_id)
    id_space: str  # wikidata | freebase


@dataclass(frozen=True)
class RootStat:
    root: int
    slug: str
    node_count: int
    edge_count: int


@dataclass(frozen=True)
class CoverageReport:
    matched_fraction: float
    missing: tuple[tuple[str, int], ...]


def _read_tsv(path, header: str, n_fields: int):
    p = Path(path)
    if not p.is_file():
        raise MissingFileError(f"missing file: {p}")
    lines = p.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != header:
        raise MalformedRowError(p, 1, f"expected header {header!r}")
    for line_no, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != n_fields:
            raise MalformedRowError(p, line_no, f"expected {n_fields} fields")
        yield line_no, fields


def load_keyword_corpus(path) -> KeywordCorpus:
    entries = []
    seen = set()
    for line_no, (kw, freq) in _read_tsv(path, "keyword\tfrequency", 2):
        if not freq.isdigit():
            raise MalformedRowError(Path(path), line_no, f"bad frequency {freq!r}")
        norm = normalize_label(kw)
        if norm in seen:
            continue  # keywords unique after normalization
        seen.add(norm)
        entries.append((kw, int(freq)))
    return KeywordCorpus(tuple(entries))


def load_usage_stats(path, window: str = "") -> UsageStats:
    counts = {}
    for line_no, (tid, count) in _read_tsv(path, "topic_id\tcount", 2):
        if not tid.isdigit() or not count.isdigit():
            raise MalformedRowError(Path(path), line_no, "topic_id and count must be integers")
        counts[int(tid)] = int(count)
    return UsageStats(counts, window)


def load_external_edges(path, id_space: str) -> ExternalEdgeSet:
    if id_space not in ("wikidata", "freebase"):
        raise MalformedRowError(Path(path), 0, f"unknown id space {id_space!r}")
    rels = set()
    for line_no, (parent, child) in _read_tsv(path, "parent_ext_id\tchild_ext_id", 2):
        if not parent or not child:
            raise MalformedRowError(Path(path), line_no, "external ids must be non-empty")
        rels.add((parent, child))
    return ExternalEdgeSet(frozenset(rels), id_space)


# -- coverage ---------------------------------------------------------------


def known_labels(o: Ontology) -> set[str]:
    """Normalized display names (all languages) and slugs of live topics."""
    live = {t for t, n in o.nodes.items() if not n.retired}
    labels = {normalize_slug(o.nodes[t].slug) for t in live}
    for (tid, _), rec in o.display_names.items():
        if tid in live:
            labels.add(normalize_label(rec.display_name))
    labels.discard("")
    return labels


def coverage_report(o: Ontology, corpus: KeywordCorpus, top_n: int = 50) -> CoverageReport:
    """Frequency-weighted fraction of keywords the ontology can represent.

    A keyword matches iff its normalized form equals a normalized display
    name (any language) or slug. The top unmatched keywords by frequency are
    missing-topic candidates.
    """
    if not corpus.entries:
        raise EmptyCorpusError("keyword corpus is empty")
    labels = known_labels(o)
    total = sum(freq for _, freq in corpus.entries)
    matched = 0
    missing = []
    for kw, freq in corpus.entries:
        if normalize_label(kw) in labels:
            matched += freq
        else:
            missing.append((kw, freq))
    missing.sort(key=lambda item: (-item[1], item[0]))
    fraction = matched / total if total else 0.0
    return CoverageReport(fraction, tuple(missing[:top_n]))


# -- scope ------------------------------------------------------------------


def scope_report(o: Ontology, usage: UsageStats, threshold: int = 0) -> list[tuple[int, int]]:
    """Live non-root topics used at most ``threshold`` times: age-out candidates."""
    out = []
    for t, n in o.nodes.items():
        if n.retired or t in o.root_ids:
            continue
        count = usage.counts.get(t, 0)
        if count <= threshold:
            out.append((t, count))
    out.sort(key=lambda item: (item[1], item[0]))
    return out


# -- edge cross-check against an external knowledge base --------------------


def _external_mapping(o: Ontology, id_space: str) -> dict[int, str]:
    attr = "wikidata_id" if id_space == "wikidata" else "freebase_mid"
    mapping = {}
    for t in sorted(o.nodes):
        n = o.nodes[t]
        ext = getattr(n, attr)
        if ext and not n.retired:
            mapping[t] = ext
    return mapping


def edge_check(o: Ontology, ext: ExternalEdgeSet) -> tuple[list[int], list[tuple[int, int]]]:
    """Compare ontology edges with an external relation dump, over the topics
    that carry an external id in the dump's id space. Both outputs are
    advisory review-queue feed, never auto-applied."""
    mapping = _external_mapping(o, ext.id_space)
    # external id -> lowest topic id (duplicate refs are a validator concern)
    reverse: dict[str, int] = {}
    for t, e in mapping.items():
        reverse.setdefault(e, t)

    suspect = []
    for eid in sorted(o.edges):
        e = o.edges[eid]
        if e.source in mapping and e.destination in mapping:
            if (mapping[e.source], mapping[e.destination]) not in ext.relations:
                suspect.append(eid)

    missing = set()
    for pe, ce in ext.relations:
        p, c = reverse.get(pe), reverse.get(ce)
        if p is None or c is None or p == c:
            continue
        if (p, c) in o.edge_pairs:
            continue
        if model.would_create_cycle(o, p, c):
            continue
        missing.add((p, c))
    return suspect, sorted(missing)


def export_external_edges(o: Ontology, id_space: str) -> ExternalEdgeSet:
    """The ontology's own edges expressed in an external id space."""
    mapping = _external_mapping(o, id_space)
    rels = frozenset(
        (mapping[e.source], mapping[e.destination])
        for e in o.edges.values()
        if e.source in mapping and e.destination in mapping
    )
    return ExternalEdgeSet(rels, id_space)


# -- corpus statistics ------------------------------------------------------


def root_stats(o: Ontology) -> list[RootStat]:
    """Per-root counts: live descendant-or-self nodes, and edges whose both
    endpoints are counted under the root."""
    stats = []
    for r in o.root_ids:
        if r not in o.nodes:
            continue
        under = {r} | model.descendants(o, r)
        live_under = {t for t in under if t in o.nodes and not o.nodes[t].retired}
        edge_count = sum(
            1 for e in o.edges.values() if e.source in live_under and e.destination in live_under
        )
        stats.append(RootStat(r, o.nodes[r].slug, len(live_under), edge_count))
    return stats


def summary(o: Ontology) -> tuple[int, int, int]:
    """(live node total, edge total, root count)."""
    live = sum(1 for n in o.nodes.values() if not n.retired)
    return live, len(o.edges), len(o.root_ids)


# -- serialization ----------------------------------------------------------


def coverage_tsv(report: CoverageReport) -> str:
    lines = [f"matched_fraction\t{report.matched_fraction:.6f}", "keyword\tfrequency"]
    lines += [f"{kw}\t{freq}" for kw, freq in report.missing]
    return "\n".join(lines) + "\n"


def coverage_json(report: CoverageReport) -> str:
    return json.dumps(
        {
            "matched_fraction": report.matched_fraction,
            "missing": [{"keyword": kw, "frequency": f} for kw, f in report.missing],
        },
        ensure_ascii=False,
        indent=2,
    )


def scope_tsv(rows: list[tuple[int, int]]) -> str:
    return "topic_id\tcount\n" + "".join(f"{t}\t{c}\n" for t, c in rows)


def scope_json(rows: list[tuple[int, int]]) -> str:
    return json.dumps([{"topic_id": t, "count": c} for t, c in rows], indent=2)


def edge_check_tsv(suspect: list[int], missing: list[tuple[int, int]]) -> str:
    lines = ["kind\ta\tb"]
    lines += [f"suspect_edge\t{eid}\t" for eid in suspect]
    lines += [f"candidate_missing\t{p}\t{c}" for p, c in missing]
    return "\n".join(lines) + "\n"


def edge_check_json(suspect: list[int], missing: list[tuple[int, int]]) -> str:
    return json.dumps(
        {
            "suspect_edges": suspect,
            "candidate_missing": [{"parent": p, "child": c} for p, c in missing],
        },
        indent=2,
    )


def root_stats_tsv(stats: list[RootStat]) -> str:
    return "root_id\tslug\tnodes\tedges\n" + "".join(
        f"{s.root}\t{s.slug}\t{s.node_count}\t{s.edge_count}\n" for s in stats
    )


def root_stats_json(stats: list[RootStat]) -> str:
    return json.dumps(
        [
            {"root_id": s.root, "slug": s.slug, "nodes": s.node_count, "edges": s.edge_count}
            for s in stats
        ],
        indent=2,
    )
