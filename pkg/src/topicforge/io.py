"""Corpus file I/O: TSV load/save in canonical form, plus the audit log.

File layout inside a corpus directory:

    topics.tsv         topic_id  slug  wikidata_id  freebase_mid  retired
    edges.tsv          edge_id  source_topic_id  destination_topic_id
    display_names.tsv  topic_id  language  display_type  display_name
    roots.tsv          topic_id            (declared root set)
    audit.log          one JSON object per line (append-only)

All files are UTF-8 with LF endings, literal tab separators, no quoting;
tabs and newlines inside fields are rejected at parse time. Saving is
canonical: rows sorted by primary key, so identical ontologies always
produce byte-identical files.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import (
    DuplicateIdInFileError,
    MalformedRowError,
    MissingFileError,
    SeqConflictError,
    UnknownLanguageCodeError,
)
from .model import (
    DISPLAY_TYPES,
    FREEBASE_RE,
    LANGUAGES,
    WIKIDATA_RE,
    DisplayNameRecord,
    Ontology,
    TopicEdge,
    TopicNode,
)

TOPICS_FILE = "topics.tsv"
EDGES_FILE = "edges.tsv"
NAMES_FILE = "display_names.tsv"
ROOTS_FILE = "roots.tsv"
AUDIT_FILE = "audit.log"

TOPICS_HEADER = "topic_id\tslug\twikidata_id\tfreebase_mid\tretired"
EDGES_HEADER = "edge_id\tsource_topic_id\tdestination_topic_id"
NAMES_HEADER = "topic_id\tlanguage\tdisplay_type\tdisplay_name"
ROOTS_HEADER = "topic_id"

AUDIT_OP_KINDS = (
    "add_topic",
    "retire_topic",
    "add_edge",
    "remove_edge",
    "merge_topics",
    "set_display_name",
    "rename_slug",
)


@dataclass(frozen=True)
class ChangeRecord:
    """One append-only audit entry; seq is strictly increasing per log."""

    seq: int
    timestamp: str  # ISO-8601 UTC, seconds precision, e.g. 2026-08-26T12:00:00Z
    actor: str
    op_kind: str
    payload: dict


def _read_rows(path: Path, header: str, n_fields: int):
    if not path.is_file():
        raise MissingFileError(f"missing corpus file: {path}")
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != header:
        raise MalformedRowError(path, 1, f"expected header {header!r}")
    for line_no, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != n_fields:
            raise MalformedRowError(
                path, line_no, f"expected {n_fields} fields, got {len(fields)}"
            )
        yield line_no, fields


def _parse_positive_int(path: Path, line_no: int, name: str, raw: str) -> int:
    if not raw.isdigit() or (value := int(raw)) < 1:
        raise MalformedRowError(path, line_no, f"{name} must be a positive integer, got {raw!r}")
    return value


def load_ontology(corpus_dir: str | os.PathLike) -> Ontology:
    """Parse a corpus directory into an Ontology.

    Structural parsing only (field counts, types, id-pattern checks); semantic
    invariants such as acyclicity are the validator's job, so fixtures with
    planted violations still load.
    """
    d = Path(corpus_dir)
    if not d.is_dir():
        raise MissingFileError(f"corpus directory does not exist: {d}")

    nodes: dict[int, TopicNode] = {}
    path = d / TOPICS_FILE
    for line_no, (tid_raw, slug, wd, fb, retired_raw) in _read_rows(path, TOPICS_HEADER, 5):
        tid = _parse_positive_int(path, line_no, "topic_id", tid_raw)
        if tid in nodes:
            raise DuplicateIdInFileError(f"{path}:{line_no}: duplicate topic_id {tid}")
        if not slug:
            raise MalformedRowError(path, line_no, "slug must be non-empty")
        if wd and not WIKIDATA_RE.match(wd):
            raise MalformedRowError(path, line_no, f"bad wikidata_id {wd!r}")
        if fb and not FREEBASE_RE.match(fb):
            raise MalformedRowError(path, line_no, f"bad freebase_mid {fb!r}")
        if retired_raw not in ("0", "1"):
            raise MalformedRowError(path, line_no, f"retired must be 0 or 1, got {retired_raw!r}")
        nodes[tid] = TopicNode(tid, slug, wd or None, fb or None, retired_raw == "1")

    edges: dict[int, TopicEdge] = {}
    path = d / EDGES_FILE
    for line_no, (eid_raw, src_raw, dst_raw) in _read_rows(path, EDGES_HEADER, 3):
        eid = _parse_positive_int(path, line_no, "edge_id", eid_raw)
        if eid in edges:
            raise DuplicateIdInFileError(f"{path}:{line_no}: duplicate edge_id {eid}")
        src = _parse_positive_int(path, line_no, "source_topic_id", src_raw)
        dst = _parse_positive_int(path, line_no, "destination_topic_id", dst_raw)
        edges[eid] = TopicEdge(eid, src, dst)

    names: dict[tuple[int, str], DisplayNameRecord] = {}
    path = d / NAMES_FILE
    for line_no, (tid_raw, lang, dtype, name) in _read_rows(path, NAMES_HEADER, 4):
        tid = _parse_positive_int(path, line_no, "topic_id", tid_raw)
        if lang not in LANGUAGES:
            raise UnknownLanguageCodeError(f"{path}:{line_no}: unknown language {lang!r}")
        if dtype not in DISPLAY_TYPES:
            raise MalformedRowError(path, line_no, f"display_type must be visible or hidden, got {dtype!r}")
        if not name:
            raise MalformedRowError(path, line_no, "display_name must be non-empty")
        if (tid, lang) in names:
            raise DuplicateIdInFileError(
                f"{path}:{line_no}: duplicate display name for topic {tid} language {lang}"
            )
        names[(tid, lang)] = DisplayNameRecord(tid, lang, dtype, name)

    roots_path = d / ROOTS_FILE
    if roots_path.is_file():
        root_ids: list[int] = []
        for line_no, (tid_raw,) in _read_rows(roots_path, ROOTS_HEADER, 1):
            tid = _parse_positive_int(roots_path, line_no, "topic_id", tid_raw)
            if tid in root_ids:
                raise DuplicateIdInFileError(f"{roots_path}:{line_no}: duplicate root {tid}")
            root_ids.append(tid)
        roots = tuple(sorted(root_ids))
    else:
        roots = None  # derived below

    o = Ontology(nodes=nodes, edges=edges, display_names=names, root_ids=roots or ())
    if roots is None:
        o = o.with_roots_from_structure()
    return o


def _check_field(value: str, what: str) -> str:
    if "\t" in value or "\n" in value or "\r" in value:
        raise ValueError(f"{what} contains a tab or newline: {value!r}")
    return value


def render_ontology(o: Ontology) -> dict[str, str]:
    """Canonical text of each corpus file, keyed by file name."""
    topic_lines = [TOPICS_HEADER]
    for tid in sorted(o.nodes):
        n = o.nodes[tid]
        topic_lines.append(
            "\t".join(
                (
                    str(n.topic_id),
                    _check_field(n.slug, "slug"),
                    n.wikidata_id or "",
                    n.freebase_mid or "",
                    "1" if n.retired else "0",
                )
            )
        )
    edge_lines = [EDGES_HEADER]
    for eid in sorted(o.edges):
        e = o.edges[eid]
        edge_lines.append(f"{e.edge_id}\t{e.source}\t{e.destination}")
    name_lines = [NAMES_HEADER]
    for key in sorted(o.display_names):
        r = o.display_names[key]
        name_lines.append(
            "\t".join(
                (str(r.topic_id), r.language, r.display_type, _check_field(r.display_name, "display_name"))
            )
        )
    root_lines = [ROOTS_HEADER] + [str(t) for t in sorted(o.root_ids)]
    return {
        TOPICS_FILE: "\n".join(topic_lines) + "\n",
        EDGES_FILE: "\n".join(edge_lines) + "\n",
        NAMES_FILE: "\n".join(name_lines) + "\n",
        ROOTS_FILE: "\n".join(root_lines) + "\n",
    }


def canonical_bytes(o: Ontology) -> bytes:
    """Single byte string covering all corpus files; used for identity checks."""
    files = render_ontology(o)
    return "".join(files[k] for k in sorted(files)).encode("utf-8")


def save_ontology(o: Ontology, corpus_dir: str | os.PathLike) -> None:
    d = Path(corpus_dir)
    d.mkdir(parents=True, exist_ok=True)
    for name, text in render_ontology(o).items():
        (d / name).write_text(text, encoding="utf-8", newline="")


# -- audit log --------------------------------------------------------------


def record_to_json(rec: ChangeRecord) -> str:
    return json.dumps(
        {
            "seq": rec.seq,
            "timestamp": rec.timestamp,
            "actor": rec.actor,
            "op_kind": rec.op_kind,
            "payload": rec.payload,
        },
        ensure_ascii=False,
    )


def record_from_json(line: str) -> ChangeRecord:
    obj = json.loads(line)
    return ChangeRecord(
        seq=obj["seq"],
        timestamp=obj["timestamp"],
        actor=obj["actor"],
        op_kind=obj["op_kind"],
        payload=obj["payload"],
    )


def read_audit(corpus_dir: str | os.PathLike) -> list[ChangeRecord]:
    path = Path(corpus_dir) / AUDIT_FILE
    if not path.is_file():
        return []
    records = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(record_from_json(line))
    return records


def last_audit_seq(corpus_dir: str | os.PathLike) -> int:
    records = read_audit(corpus_dir)
    return records[-1].seq if records else 0


def append_audit(corpus_dir: str | os.PathLike, rec: ChangeRecord) -> None:
    """Append one record; rejects any seq other than last+1 (stale writer)."""
    last = last_audit_seq(corpus_dir)
    if rec.seq != last + 1:
        raise SeqConflictError(f"expected seq {last + 1}, got {rec.seq}")
    path = Path(corpus_dir) / AUDIT_FILE
    with open(path, "a", encoding="utf-8", newline="") as f:
        f.write(record_to_json(rec) + "\n")


# -- import adapter for foreign column layouts ------------------------------


def load_with_adapter(corpus_dir: str | os.PathLike, config_path: str | os.PathLike) -> Ontology:
    """Load a corpus whose files/columns differ from the canonical layout.

    The JSON config maps each logical file to a physical file name and each
    logical column to the column header used in that file, e.g.::

        {"topics": {"file": "nodes.tsv",
                    "columns": {"topic_id": "id", "slug": "name", ...}}, ...}

    Unmapped optional columns (refs, retired) default to empty/0. The result
    is re-rendered into the canonical model, so everything downstream is
    layout-agnostic.
    """
    cfg = json.loads(Path(config_path).read_text(encoding="utf-8"))
    d = Path(corpus_dir)

    def table(section: str) -> tuple[Path, list[dict[str, str]]]:
        spec = cfg[section]
        path = d / spec["file"]
        if not path.is_file():
            raise MissingFileError(f"missing corpus file: {path}")
        lines = path.read_text(encoding="utf-8").splitlines()
        if not lines:
            raise MalformedRowError(path, 1, "empty file")
        header = lines[0].split("\t")
        colmap = spec["columns"]
        rows = []
        for line_no, line in enumerate(lines[1:], start=2):
            fields = line.split("\t")
            if len(fields) != len(header):
                raise MalformedRowError(path, line_no, "field count mismatch")
            raw = dict(zip(header, fields))
            rows.append({logical: raw.get(physical, "") for logical, physical in colmap.items()})
        return path, rows

    nodes: dict[int, TopicNode] = {}
    path, rows = table("topics")
    for row in rows:
        tid = int(row["topic_id"])
        retired = row.get("retired", "0") in ("1", "true", "True")
        nodes[tid] = TopicNode(
            tid, row["slug"], row.get("wikidata_id") or None, row.get("freebase_mid") or None, retired
        )

    edges: dict[int, TopicEdge] = {}
    path, rows = table("edges")
    for row in rows:
        eid = int(row["edge_id"])
        edges[eid] = TopicEdge(eid, int(row["source"]), int(row["destination"]))

    names: dict[tuple[int, str], DisplayNameRecord] = {}
    if "display_names" in cfg:
        path, rows = table("display_names")
        for row in rows:
            tid = int(row["topic_id"])
            lang = row["language"]
            if lang not in LANGUAGES:
                raise UnknownLanguageCodeError(f"{path}: unknown language {lang!r}")
            dtype = row.get("display_type", "visible") or "visible"
            names[(tid, lang)] = DisplayNameRecord(tid, lang, dtype, row["display_name"])

    return Ontology(nodes=nodes, edges=edges, display_names=names).with_roots_from_structure()
