"""Structural and editorial validation.

Violations are data, never exceptions: curators triage reports. The empty
report is the definition of a healthy corpus, and every mutation in the
curation module is guarded so that valid in means valid out.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .model import Ontology, is_valid_slug
from .text import normalize_label

VIOLATION_CODES = (
    "cycle",
    "orphan",
    "dangling_edge",
    "duplicate_slug",
    "duplicate_id",
    "duplicate_pair",
    "missing_english_name",
    "bad_slug_format",
    "self_loop",
    "root_mismatch",
    "retired_with_edges",
    "banned_term",
    "duplicate_name_per_language",
)


@dataclass(frozen=True, order=True)
class Violation:
    code: str
    subject: int  # topic_id or edge_id, per code
    detail: str

    def as_line(self) -> str:
        return f"{self.code}\t{self.subject}\t{self.detail}"


@dataclass(frozen=True, order=True)
class DuplicateCandidate:
    a: int
    b: int
    evidence: str  # shared_wikidata_id | shared_freebase_mid | equal_normalized_name
    language: Optional[str] = None


def _cycles(o: Ontology) -> list[list[int]]:
    """Strongly connected components of size > 1 (self-loops reported separately)."""
    graph: dict[int, list[int]] = {t: [] for t in o.nodes}
    for e in o.edges.values():
        if e.source in graph and e.destination in graph and e.source != e.destination:
            graph[e.source].append(e.destination)

    # Iterative Tarjan.
    index_of: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0

    for start in graph:
        if start in index_of:
            continue
        work = [(start, iter(graph[start]))]
        index_of[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index_of:
                    index_of[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index_of[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index_of[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.remove(w)
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1:
                    sccs.append(sorted(comp))
    return sccs


def validate(o: Ontology) -> list[Violation]:
    """All structural violations, deterministically ordered (code, subject)."""
    out: list[Violation] = []

    # duplicate slugs (retired nodes keep their slugs reserved)
    by_slug: dict[str, list[int]] = {}
    for n in o.nodes.values():
        by_slug.setdefault(n.slug, []).append(n.topic_id)
    for slug, ids in by_slug.items():
        if len(ids) > 1:
            out.append(
                Violation("duplicate_slug", min(ids), f"slug {slug!r} used by topics {sorted(ids)}")
            )

    for n in o.nodes.values():
        if not is_valid_slug(n.slug):
            out.append(Violation("bad_slug_format", n.topic_id, f"bad slug {n.slug!r}"))
        if not n.retired and (n.topic_id, "en") not in o.display_names:
            out.append(
                Violation("missing_english_name", n.topic_id, f"topic {n.slug!r} has no English display name")
            )

    # edge-level checks
    seen_pairs: dict[tuple[int, int], int] = {}
    for eid in sorted(o.edges):
        e = o.edges[eid]
        missing = [t for t in (e.source, e.destination) if t not in o.nodes]
        if missing:
            out.append(
                Violation("dangling_edge", eid, f"edge references missing topic(s) {missing}")
            )
            continue
        if e.source == e.destination:
            out.append(Violation("self_loop", eid, f"edge loops on topic {e.source}"))
        prior = seen_pairs.get((e.source, e.destination))
        if prior is not None:
            out.append(
                Violation(
                    "duplicate_pair", eid, f"duplicates edge {prior} ({e.source}->{e.destination})"
                )
            )
        else:
            seen_pairs[(e.source, e.destination)] = eid
        retired = [t for t in (e.source, e.destination) if o.nodes[t].retired]
        if retired:
            out.append(
                Violation("retired_with_edges", eid, f"edge touches retired topic(s) {retired}")
            )

    # declared roots must be live, known, and parentless
    for r in o.root_ids:
        if r not in o.nodes:
            out.append(Violation("root_mismatch", r, "declared root does not exist"))
        elif o.nodes[r].retired:
            out.append(Violation("root_mismatch", r, "declared root is retired"))
        elif o.parents.get(r):
            out.append(
                Violation("root_mismatch", r, f"declared root has parents {list(o.parents[r])}")
            )

    # cycles
    for comp in _cycles(o):
        comp_set = set(comp)
        edge_ids = sorted(
            eid
            for eid, e in o.edges.items()
            if e.source in comp_set and e.destination in comp_set and e.source != e.destination
        )
        out.append(
            Violation("cycle", edge_ids[0], f"cycle through topics {comp}, edges {edge_ids}")
        )

    # orphans: live non-roots that cannot reach a declared root upward
    reachable = set(r for r in o.root_ids if r in o.nodes)
    frontier = list(reachable)
    while frontier:
        t = frontier.pop()
        for c in o.children.get(t, ()):
            if c in o.nodes and c not in reachable:
                reachable.add(c)
                frontier.append(c)
    for t, n in o.nodes.items():
        if not n.retired and t not in o.root_ids and t not in reachable:
            out.append(
                Violation("orphan", t, f"topic {n.slug!r} cannot reach any root")
            )

    out.sort()
    return out


def find_duplicates(o: Ontology) -> list[DuplicateCandidate]:
    """Pairs of live topics that look like the same concept; humans decide."""
    candidates: set[DuplicateCandidate] = set()
    live = [n for n in o.nodes.values() if not n.retired]

    def collect(keyed: dict, evidence: str, language: Optional[str] = None) -> None:
        for ids in keyed.values():
            ids = sorted(ids)
            for i, a in enumerate(ids):
                for b in ids[i + 1 :]:
                    candidates.add(DuplicateCandidate(a, b, evidence, language))

    by_wd: dict[str, list[int]] = {}
    by_fb: dict[str, list[int]] = {}
    for n in live:
        if n.wikidata_id:
            by_wd.setdefault(n.wikidata_id, []).append(n.topic_id)
        if n.freebase_mid:
            by_fb.setdefault(n.freebase_mid, []).append(n.topic_id)
    collect(by_wd, "shared_wikidata_id")
    collect(by_fb, "shared_freebase_mid")

    live_ids = {n.topic_id for n in live}
    by_name: dict[tuple[str, str], list[int]] = {}
    for (tid, lang), rec in o.display_names.items():
        if tid in live_ids:
            by_name.setdefault((lang, normalize_label(rec.display_name)), []).append(tid)
    for (lang, _), ids in by_name.items():
        ids = sorted(set(ids))
        for i, a in enumerate(ids):
            for b in ids[i + 1 :]:
                candidates.add(DuplicateCandidate(a, b, "equal_normalized_name", lang))

    return sorted(candidates)


def lint_names(o: Ontology, banned_terms: Iterable[str]) -> list[Violation]:
    """Editorial lint: banned terms, slug grammar, missing English names."""
    out: list[Violation] = []
    patterns = [
        (term, re.compile(r"\b" + re.escape(term) + r"\b", re.IGNORECASE))
        for term in banned_terms
        if term.strip()
    ]

    for n in o.nodes.values():
        if not is_valid_slug(n.slug):
            out.append(Violation("bad_slug_format", n.topic_id, f"bad slug {n.slug!r}"))
        if not n.retired and (n.topic_id, "en") not in o.display_names:
            out.append(
                Violation("missing_english_name", n.topic_id, f"topic {n.slug!r} has no English display name")
            )
        slug_text = n.slug.replace("-", " ")
        for term, pat in patterns:
            if pat.search(slug_text):
                out.append(
                    Violation("banned_term", n.topic_id, f"slug {n.slug!r} contains banned term {term!r}")
                )

    for (tid, lang), rec in o.display_names.items():
        for term, pat in patterns:
            if pat.search(rec.display_name):
                out.append(
                    Violation(
                        "banned_term",
                        tid,
                        f"{lang} name {rec.display_name!r} contains banned term {term!r}",
                    )
                )

    # same exact display name on two live topics in one language: editorial
    # duplicate signal, alongside the normalized-name duplicate candidates
    names_seen: dict[tuple[str, str], list[int]] = {}
    for (tid, lang), rec in o.display_names.items():
        if tid in o.nodes and not o.nodes[tid].retired:
            names_seen.setdefault((lang, rec.display_name), []).append(tid)
    for (lang, name), ids in names_seen.items():
        if len(ids) > 1:
            out.append(
                Violation(
                    "duplicate_name_per_language",
                    min(ids),
                    f"{lang} name {name!r} shared by topics {sorted(ids)}",
                )
            )

    out.sort()
    return out


def report_lines(violations: Iterable[Violation]) -> str:
    return "".join(v.as_line() + "\n" for v in violations)


def report_json(violations: Iterable[Violation]) -> str:
    return json.dumps(
        [{"code": v.code, "subject": v.subject, "detail": v.detail} for v in violations],
        ensure_ascii=False,
        indent=2,
    )
