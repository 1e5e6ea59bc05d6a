"""Cross-taxonomy alignment: match our topics against a foreign topic set
and measure overlap and edge agreement.

Matching is greedy and tiered for determinism and explainability: external
ids first (Wikidata, then Freebase), then exact English labels, then
normalized labels. Each side participates in at most one match.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import DuplicateIdInFileError, MalformedRowError, MissingFileError, StaleResultError
from .model import FREEBASE_RE, WIKIDATA_RE, Ontology, ancestors
from .text import normalize_label

FOREIGN_NODES_HEADER = "foreign_id\tlabel\twikidata_id\tfreebase_mid"
FOREIGN_EDGES_HEADER = "parent\tchild"

MATCH_METHODS = ("external_id", "exact_label", "normalized_label")


@dataclass(frozen=True)
class ForeignNode:
    foreign_id: str
    label: str
    wikidata_id: Optional[str] = None
    freebase_mid: Optional[str] = None


@dataclass(frozen=True)
class ForeignTaxonomy:
    nodes: tuple[ForeignNode, ...]
    edges: tuple[tuple[str, str], ...]  # (parent_foreign_id, child_foreign_id)

    def node_ids(self) -> set[str]:
        return {n.foreign_id for n in self.nodes}


@dataclass(frozen=True)
class AlignmentResult:
    matches: tuple[tuple[int, str, str], ...]  # (topic_id, foreign_id, method)
    unmatched_ours: tuple[int, ...]
    unmatched_theirs: tuple[str, ...]
    overlap_ours: float
    overlap_theirs: float


def load_foreign_taxonomy(directory) -> ForeignTaxonomy:
    d = Path(directory)
    nodes_path = d / "nodes.tsv"
    edges_path = d / "edges.tsv"
    for p in (nodes_path, edges_path):
        if not p.is_file():
            raise MissingFileError(f"missing file: {p}")

    nodes = []
    seen = set()
    lines = nodes_path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != FOREIGN_NODES_HEADER:
        raise MalformedRowError(nodes_path, 1, f"expected header {FOREIGN_NODES_HEADER!r}")
    for line_no, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != 4:
            raise MalformedRowError(nodes_path, line_no, "expected 4 fields")
        fid, label, wd, fb = fields
        if not fid:
            raise MalformedRowError(nodes_path, line_no, "foreign_id must be non-empty")
        if fid in seen:
            raise DuplicateIdInFileError(f"{nodes_path}:{line_no}: duplicate foreign_id {fid!r}")
        if wd and not WIKIDATA_RE.match(wd):
            raise MalformedRowError(nodes_path, line_no, f"bad wikidata_id {wd!r}")
        if fb and not FREEBASE_RE.match(fb):
            raise MalformedRowError(nodes_path, line_no, f"bad freebase_mid {fb!r}")
        seen.add(fid)
        nodes.append(ForeignNode(fid, label, wd or None, fb or None))

    edges = []
    lines = edges_path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != FOREIGN_EDGES_HEADER:
        raise MalformedRowError(edges_path, 1, f"expected header {FOREIGN_EDGES_HEADER!r}")
    for line_no, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != 2:
            raise MalformedRowError(edges_path, line_no, "expected 2 fields")
        parent, child = fields
        for endpoint in (parent, child):
            if endpoint not in seen:
                raise MalformedRowError(edges_path, line_no, f"unknown foreign_id {endpoint!r}")
        edges.append((parent, child))

    return ForeignTaxonomy(tuple(nodes), tuple(edges))


def save_foreign_taxonomy(f: ForeignTaxonomy, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    node_lines = [FOREIGN_NODES_HEADER] + [
        f"{n.foreign_id}\t{n.label}\t{n.wikidata_id or ''}\t{n.freebase_mid or ''}"
        for n in f.nodes
    ]
    edge_lines = [FOREIGN_EDGES_HEADER] + [f"{p}\t{c}" for p, c in f.edges]
    (d / "nodes.tsv").write_text("\n".join(node_lines) + "\n", encoding="utf-8", newline="")
    (d / "edges.tsv").write_text("\n".join(edge_lines) + "\n", encoding="utf-8", newline="")


def export_taxonomy(o: Ontology) -> ForeignTaxonomy:
    """Express the ontology's live subgraph in the foreign-taxonomy format
    (slug as id, English display name as label)."""
    live = sorted(t for t, n in o.nodes.items() if not n.retired)
    nodes = []
    for t in live:
        n = o.nodes[t]
        rec = o.display_names.get((t, "en"))
        nodes.append(ForeignNode(n.slug, rec.display_name if rec else n.slug, n.wikidata_id, n.freebase_mid))
    live_set = set(live)
    edges = tuple(
        (o.nodes[e.source].slug, o.nodes[e.destination].slug)
        for eid, e in sorted(o.edges.items())
        if e.source in live_set and e.destination in live_set
    )
    return ForeignTaxonomy(tuple(nodes), edges)


def _greedy_tier(
    our_keys: dict[int, str], their_keys: dict[str, str]
) -> list[tuple[int, str]]:
    """One-to-one pairing on equal keys; ties go to lowest (topic_id, foreign_id)."""
    ours_by_key: dict[str, list[int]] = {}
    for tid, key in our_keys.items():
        ours_by_key.setdefault(key, []).append(tid)
    theirs_by_key: dict[str, list[str]] = {}
    for fid, key in their_keys.items():
        theirs_by_key.setdefault(key, []).append(fid)
    pairs = []
    for key in ours_by_key.keys() & theirs_by_key.keys():
        pairs.extend(zip(sorted(ours_by_key[key]), sorted(theirs_by_key[key])))
    return pairs


def align(o: Ontology, f: ForeignTaxonomy) -> AlignmentResult:
    our_live = sorted(t for t, n in o.nodes.items() if not n.retired)
    their_ids = sorted(f.node_ids())
    matched_ours: set[int] = set()
    matched_theirs: set[str] = set()
    matches: list[tuple[int, str, str]] = []

    def run_tier(method: str, our_key, their_key) -> None:
        ours = {
            t: key
            for t in our_live
            if t not in matched_ours and (key := our_key(t)) is not None
        }
        theirs = {
            n.foreign_id: key
            for n in f.nodes
            if n.foreign_id not in matched_theirs and (key := their_key(n)) is not None
        }
        for tid, fid in _greedy_tier(ours, theirs):
            matches.append((tid, fid, method))
            matched_ours.add(tid)
            matched_theirs.add(fid)

    def en_name(t: int) -> Optional[str]:
        rec = o.display_names.get((t, "en"))
        return rec.display_name if rec else None

    run_tier("external_id", lambda t: o.nodes[t].wikidata_id, lambda n: n.wikidata_id)
    run_tier("external_id", lambda t: o.nodes[t].freebase_mid, lambda n: n.freebase_mid)
    run_tier("exact_label", en_name, lambda n: n.label)
    run_tier(
        "normalized_label",
        lambda t: (normalize_label(en_name(t) or "") or None),
        lambda n: normalize_label(n.label) or None,
    )

    matches.sort(key=lambda m: m[0])
    unmatched_ours = tuple(t for t in our_live if t not in matched_ours)
    unmatched_theirs = tuple(fid for fid in their_ids if fid not in matched_theirs)
    overlap_ours = len(matches) / len(our_live) if our_live else 0.0
    overlap_theirs = len(matches) / len(their_ids) if their_ids else 0.0
    return AlignmentResult(
        tuple(matches), unmatched_ours, unmatched_theirs, overlap_ours, overlap_theirs
    )


def edge_agreement(
    o: Ontology, f: ForeignTaxonomy, result: AlignmentResult, mode: str = "direct"
) -> tuple[int, int, int]:
    """(agree, ours_only, theirs_only) over matched node pairs.

    ``mode="direct"`` requires the exact edge on the other side;
    ``mode="ancestor"`` accepts any ancestor relation.
    """
    if mode not in ("direct", "ancestor"):
        raise ValueError(f"unknown mode {mode!r}")
    their_ids = f.node_ids()
    for tid, fid, _ in result.matches:
        if tid not in o.nodes or o.nodes[tid].retired or fid not in their_ids:
            raise StaleResultError("alignment result no longer matches the inputs")

    ours_to_theirs = {tid: fid for tid, fid, _ in result.matches}
    theirs_to_ours = {fid: tid for tid, fid, _ in result.matches}
    their_edges = set(f.edges)

    their_ancestors: dict[str, set[str]] = {}
    if mode == "ancestor":
        their_parents: dict[str, set[str]] = {}
        for p, c in f.edges:
            their_parents.setdefault(c, set()).add(p)
        for fid in their_ids:
            seen: set[str] = set()
            stack = list(their_parents.get(fid, ()))
            while stack:
                x = stack.pop()
                if x not in seen:
                    seen.add(x)
                    stack.extend(their_parents.get(x, ()))
            their_ancestors[fid] = seen

    agree = ours_only = theirs_only = 0
    for eid in sorted(o.edges):
        e = o.edges[eid]
        fp, fc = ours_to_theirs.get(e.source), ours_to_theirs.get(e.destination)
        if fp is None or fc is None:
            continue
        present = (fp, fc) in their_edges or (
            mode == "ancestor" and fp in their_ancestors.get(fc, ())
        )
        if present:
            agree += 1
        else:
            ours_only += 1
    for fp, fc in f.edges:
        p, c = theirs_to_ours.get(fp), theirs_to_ours.get(fc)
        if p is None or c is None:
            continue
        present = (p, c) in o.edge_pairs or (mode == "ancestor" and p in ancestors(o, c))
        if not present:
            theirs_only += 1
    return agree, ours_only, theirs_only


def result_tsv(result: AlignmentResult) -> str:
    lines = [
        f"overlap_ours\t{result.overlap_ours:.6f}",
        f"overlap_theirs\t{result.overlap_theirs:.6f}",
        "topic_id\tforeign_id\tmethod",
    ]
    lines += [f"{t}\t{fid}\t{m}" for t, fid, m in result.matches]
    return "\n".join(lines) + "\n"


def result_json(result: AlignmentResult) -> str:
    return json.dumps(
        {
            "overlap_ours": result.overlap_ours,
            "overlap_theirs": result.overlap_theirs,
            "matches": [
                {"topic_id": t, "foreign_id": fid, "method": m} for t, fid, m in result.matches
            ],
            "unmatched_ours": list(result.unmatched_ours),
            "unmatched_theirs": list(result.unmatched_theirs),
        },
        ensure_ascii=False,
        indent=2,
    )
