"""Command-line interface.

Exit codes: 0 success, 1 violations found (``validate``/``lint`` with
``--strict``, ``replay-audit`` mismatch), 2 usage error, 3 data error.
Report commands print TSV by default, JSON with ``--json``, and can render
figures next to the delimited output with ``--figures <dir>``.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import alignment, curation, io, model, qa, validator
from .errors import TopicForgeError
from .workspace import Workspace

EXIT_VIOLATIONS = 1
EXIT_DATA_ERROR = 3

corpus_option = click.option(
    "--corpus",
    "corpus_dir",
    envvar="TOPICFORGE_CORPUS",
    required=True,
    type=click.Path(exists=True, file_okay=False),
    help="Corpus directory (or set TOPICFORGE_CORPUS).",
)
json_option = click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of TSV.")
actor_option = click.option("--actor", required=True, help="Name recorded in the audit log.")
figures_option = click.option(
    "--figures",
    "figures_dir",
    type=click.Path(file_okay=False),
    default=None,
    help="Also render a PNG figure into this directory.",
)
adapter_option = click.option(
    "--adapter",
    "adapter_config",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON column-mapping config for non-canonical corpus layouts.",
)


def _load(corpus_dir, adapter_config=None) -> model.Ontology:
    if adapter_config:
        return io.load_with_adapter(corpus_dir, adapter_config)
    return io.load_ontology(corpus_dir)


def _resolve_topic(o: model.Ontology, ref: str) -> int:
    if ref.isdigit():
        return o.node(int(ref)).topic_id
    return o.by_slug(ref).topic_id


@click.group()
def main():
    """Taxonomy curation, validation, QA reporting, and serving."""


def _run(fn):
    try:
        fn()
    except TopicForgeError as exc:
        click.echo(f"error [{exc.code}]: {exc.detail}", err=True)
        sys.exit(EXIT_DATA_ERROR)


@main.command()
@corpus_option
@adapter_option
@json_option
@click.option("--strict", is_flag=True, help="Exit 1 if any violation is found.")
def validate(corpus_dir, adapter_config, as_json, strict):
    """Check every structural invariant and print the violation report."""

    def go():
        violations = validator.validate(_load(corpus_dir, adapter_config))
        click.echo(
            validator.report_json(violations) if as_json else validator.report_lines(violations),
            nl=False,
        )
        if strict and violations:
            sys.exit(EXIT_VIOLATIONS)

    _run(go)


@main.command()
@corpus_option
@json_option
@click.option(
    "--banned-terms",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="File with one banned term per line.",
)
@click.option("--strict", is_flag=True)
def lint(corpus_dir, as_json, banned_terms, strict):
    """Editorial lint: banned terms, slug grammar, missing English names."""

    def go():
        terms = []
        if banned_terms:
            terms = [
                line.strip()
                for line in Path(banned_terms).read_text(encoding="utf-8").splitlines()
                if line.strip() and not line.startswith("#")
            ]
        violations = validator.lint_names(_load(corpus_dir), terms)
        click.echo(
            validator.report_json(violations) if as_json else validator.report_lines(violations),
            nl=False,
        )
        if strict and violations:
            sys.exit(EXIT_VIOLATIONS)

    _run(go)


@main.command()
@corpus_option
@json_option
def dedup(corpus_dir, as_json):
    """List duplicate-concept candidates (shared ids or equal normalized names)."""

    def go():
        candidates = validator.find_duplicates(_load(corpus_dir))
        if as_json:
            import json as _json

            click.echo(
                _json.dumps(
                    [
                        {"a": c.a, "b": c.b, "evidence": c.evidence, "language": c.language}
                        for c in candidates
                    ],
                    indent=2,
                )
            )
        else:
            for c in candidates:
                lang = c.language or ""
                click.echo(f"{c.a}\t{c.b}\t{c.evidence}\t{lang}")

    _run(go)


@main.command()
@corpus_option
@adapter_option
@json_option
@figures_option
def stats(corpus_dir, adapter_config, as_json, figures_dir):
    """Corpus summary plus per-root node and edge counts."""

    def go():
        o = _load(corpus_dir, adapter_config)
        nodes, edges, roots = qa.summary(o)
        per_root = qa.root_stats(o)
        if as_json:
            import json as _json

            click.echo(
                _json.dumps(
                    {
                        "nodes": nodes,
                        "edges": edges,
                        "roots": roots,
                        "per_root": [
                            {
                                "root_id": s.root,
                                "slug": s.slug,
                                "nodes": s.node_count,
                                "edges": s.edge_count,
                            }
                            for s in per_root
                        ],
                    },
                    indent=2,
                )
            )
        else:
            click.echo(f"nodes\t{nodes}\nedges\t{edges}\nroots\t{roots}")
            click.echo(qa.root_stats_tsv(per_root), nl=False)
        if figures_dir:
            from . import figures

            Path(figures_dir).mkdir(parents=True, exist_ok=True)
            out = figures.root_stats_figure(per_root, Path(figures_dir) / "root_stats.png")
            click.echo(f"figure written: {out}", err=True)

    _run(go)


@main.command()
@corpus_option
@click.argument("topic")
def paths(corpus_dir, topic):
    """Print every root path for TOPIC (slug or id), one per line."""

    def go():
        o = _load(corpus_dir)
        tid = _resolve_topic(o, topic)
        for path in model.paths_to_roots(o, tid):
            click.echo(" > ".join(model.path_slugs(o, path)))

    _run(go)


@main.command()
@corpus_option
@click.option("--lang", default=None, type=click.Choice(model.LANGUAGES))
@click.argument("query")
def search(corpus_dir, lang, query):
    """Prefix-search topics by slug or display name."""

    def go():
        from .text import normalize_label, normalize_slug

        o = _load(corpus_dir)
        needle = normalize_label(query)
        for tid in sorted(o.nodes):
            n = o.nodes[tid]
            if n.retired:
                continue
            haystacks = [normalize_slug(n.slug)] + [
                normalize_label(rec.display_name)
                for (t, language), rec in o.display_names.items()
                if t == tid and (lang is None or language == lang)
            ]
            if any(h.startswith(needle) for h in haystacks):
                resolved = model.resolve_display(o, tid, lang or "en")
                name = resolved[0] if resolved else ""
                click.echo(f"{tid}\t{n.slug}\t{name}")

    _run(go)


@main.command(name="add-topic")
@corpus_option
@actor_option
@click.option("--slug", required=True)
@click.option("--name", "english_name", required=True, help="English display name.")
@click.option("--parent", "parents", multiple=True, required=True, help="Parent slug or id (repeatable).")
@click.option("--wikidata-id", default=None)
@click.option("--freebase-mid", default=None)
def add_topic(corpus_dir, actor, slug, english_name, parents, wikidata_id, freebase_mid):
    """Create a topic under one or more existing parents."""

    def go():
        ws = Workspace(corpus_dir)
        parent_ids = [_resolve_topic(ws.ontology, p) for p in parents]
        tid = ws.add_topic(slug, english_name, parent_ids, actor, wikidata_id, freebase_mid)
        click.echo(f"created topic {tid} ({slug})")

    _run(go)


@main.command(name="add-edge")
@corpus_option
@actor_option
@click.argument("parent")
@click.argument("child")
def add_edge(corpus_dir, actor, parent, child):
    """Add a parent->child edge (rejected if it would close a cycle)."""

    def go():
        ws = Workspace(corpus_dir)
        o = ws.ontology
        eid = ws.add_edge(_resolve_topic(o, parent), _resolve_topic(o, child), actor)
        click.echo(f"created edge {eid}")

    _run(go)


@main.command(name="remove-edge")
@corpus_option
@actor_option
@click.argument("edge_id", type=int)
def remove_edge(corpus_dir, actor, edge_id):
    """Remove an edge (refused if it would orphan the child)."""

    def go():
        Workspace(corpus_dir).remove_edge(edge_id, actor)
        click.echo(f"removed edge {edge_id}")

    _run(go)


@main.command()
@corpus_option
@actor_option
@click.argument("topic")
def retire(corpus_dir, actor, topic):
    """Retire a topic, dropping its edges; the id stays reserved forever."""

    def go():
        ws = Workspace(corpus_dir)
        tid = _resolve_topic(ws.ontology, topic)
        ws.retire_topic(tid, actor)
        click.echo(f"retired topic {tid}")

    _run(go)


@main.command()
@corpus_option
@actor_option
@click.argument("loser")
@click.argument("winner")
def merge(corpus_dir, actor, loser, winner):
    """Merge LOSER into WINNER: edges re-pointed, loser retired."""

    def go():
        ws = Workspace(corpus_dir)
        o = ws.ontology
        lid, wid = _resolve_topic(o, loser), _resolve_topic(o, winner)
        ws.merge_topics(lid, wid, actor)
        click.echo(f"merged topic {lid} into {wid}")

    _run(go)


@main.command(name="set-name")
@corpus_option
@actor_option
@click.argument("topic")
@click.argument("lang", type=click.Choice(model.LANGUAGES))
@click.argument("name")
@click.option("--hidden", is_flag=True, help="Mark the name hidden in this language.")
def set_name(corpus_dir, actor, topic, lang, name, hidden):
    """Set or update a display name in one language."""

    def go():
        ws = Workspace(corpus_dir)
        tid = _resolve_topic(ws.ontology, topic)
        ws.set_display_name(tid, lang, name, "hidden" if hidden else "visible", actor)
        click.echo(f"set {lang} name for topic {tid}")

    _run(go)


@main.command()
@corpus_option
@json_option
@figures_option
@click.option("--keywords", "keywords_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--top-n", default=50, show_default=True)
def coverage(corpus_dir, as_json, figures_dir, keywords_file, top_n):
    """Keyword-corpus coverage; unmatched keywords are missing-topic candidates."""

    def go():
        o = _load(corpus_dir)
        corpus = qa.load_keyword_corpus(keywords_file)
        report = qa.coverage_report(o, corpus, top_n)
        click.echo(qa.coverage_json(report) if as_json else qa.coverage_tsv(report), nl=False)
        if figures_dir:
            from . import figures

            Path(figures_dir).mkdir(parents=True, exist_ok=True)
            out = figures.coverage_figure(report, Path(figures_dir) / "coverage.png")
            click.echo(f"figure written: {out}", err=True)

    _run(go)


@main.command()
@corpus_option
@json_option
@figures_option
@click.option("--usage", "usage_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", default=0, show_default=True)
def scope(corpus_dir, as_json, figures_dir, usage_file, threshold):
    """Topics used at most THRESHOLD times: age-out candidates."""

    def go():
        o = _load(corpus_dir)
        usage = qa.load_usage_stats(usage_file)
        rows = qa.scope_report(o, usage, threshold)
        click.echo(qa.scope_json(rows) if as_json else qa.scope_tsv(rows), nl=False)
        if figures_dir:
            from . import figures

            Path(figures_dir).mkdir(parents=True, exist_ok=True)
            out = figures.scope_figure(rows, Path(figures_dir) / "scope.png")
            click.echo(f"figure written: {out}", err=True)

    _run(go)


@main.command(name="edge-check")
@corpus_option
@json_option
@click.option("--edges", "edges_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--id-space", required=True, type=click.Choice(["wikidata", "freebase"]))
def edge_check(corpus_dir, as_json, edges_file, id_space):
    """Cross-check ontology edges against an external relation dump."""

    def go():
        o = _load(corpus_dir)
        ext = qa.load_external_edges(edges_file, id_space)
        suspect, missing = qa.edge_check(o, ext)
        click.echo(
            qa.edge_check_json(suspect, missing) if as_json else qa.edge_check_tsv(suspect, missing),
            nl=False,
        )

    _run(go)


@main.command()
@corpus_option
@json_option
@click.option("--taxonomy", "taxonomy_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--mode", default="direct", type=click.Choice(["direct", "ancestor"]), show_default=True)
def align(corpus_dir, as_json, taxonomy_dir, mode):
    """Align against a foreign taxonomy and report overlap + edge agreement."""

    def go():
        o = _load(corpus_dir)
        foreign = alignment.load_foreign_taxonomy(taxonomy_dir)
        result = alignment.align(o, foreign)
        agree, ours_only, theirs_only = alignment.edge_agreement(o, foreign, result, mode)
        if as_json:
            import json as _json

            payload = _json.loads(alignment.result_json(result))
            payload["edge_agreement"] = {
                "agree": agree,
                "ours_only": ours_only,
                "theirs_only": theirs_only,
            }
            click.echo(_json.dumps(payload, indent=2))
        else:
            click.echo(alignment.result_tsv(result), nl=False)
            click.echo(f"edge_agree\t{agree}\nedge_ours_only\t{ours_only}\nedge_theirs_only\t{theirs_only}")

    _run(go)


@main.command(name="replay-audit")
@corpus_option
@click.option("--genesis", required=True, type=click.Path(exists=True, file_okay=False))
def replay_audit(corpus_dir, genesis):
    """Replay the corpus audit log over GENESIS and compare with the corpus."""

    def go():
        genesis_o = io.load_ontology(genesis)
        records = io.read_audit(corpus_dir)
        replayed = curation.replay_audit(genesis_o, records)
        current = io.load_ontology(corpus_dir)
        if io.canonical_bytes(replayed) == io.canonical_bytes(current):
            click.echo(f"replay ok: {len(records)} records reproduce the corpus")
        else:
            click.echo("replay mismatch: log does not reproduce the corpus", err=True)
            sys.exit(EXIT_VIOLATIONS)

    _run(go)


@main.command()
@corpus_option
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def export(corpus_dir, out_dir):
    """Export the live subgraph in the foreign-taxonomy TSV format."""

    def go():
        o = _load(corpus_dir)
        alignment.save_foreign_taxonomy(alignment.export_taxonomy(o), out_dir)
        click.echo(f"exported to {out_dir}")

    _run(go)


@main.command()
@corpus_option
@click.option("--bind", envvar="TOPICFORGE_BIND", default="127.0.0.1:8400", show_default=True)
@click.option("--allow-dirty", is_flag=True, help="Serve even if the corpus has violations.")
def serve(corpus_dir, bind, allow_dirty):
    """Run the HTTP service for the curator UI and API consumers."""

    def go():
        import uvicorn

        from .service import create_app

        ws = Workspace(corpus_dir)
        violations = validator.validate(ws.ontology)
        if violations and not allow_dirty:
            click.echo(
                f"corpus has {len(violations)} violations; refusing to serve "
                "(use --allow-dirty to override)",
                err=True,
            )
            sys.exit(EXIT_DATA_ERROR)
        host, _, port = bind.partition(":")
        uvicorn.run(create_app(ws), host=host, port=int(port or 8400), log_level="warning")

    _run(go)


if __name__ == "__main__":
    main()
