import json
from pathlib import Path

import pytest

from conftest import CORPUS40
from topicforge import io
from topicforge.errors import (
    DuplicateIdInFileError,
    MalformedRowError,
    MissingFileError,
    SeqConflictError,
    UnknownLanguageCodeError,
)
from topicforge.model import Ontology


def write_corpus(d: Path, topics="", edges="", names="", roots=None):
    d.mkdir(parents=True, exist_ok=True)
    (d / "topics.tsv").write_text(io.TOPICS_HEADER + "\n" + topics, encoding="utf-8")
    (d / "edges.tsv").write_text(io.EDGES_HEADER + "\n" + edges, encoding="utf-8")
    (d / "display_names.tsv").write_text(io.NAMES_HEADER + "\n" + names, encoding="utf-8")
    if roots is not None:
        (d / "roots.tsv").write_text(io.ROOTS_HEADER + "\n" + roots, encoding="utf-8")
    return d


class TestLoad:
    def test_header_only_is_empty_ontology(self, tmp_path):
        o = io.load_ontology(write_corpus(tmp_path / "c"))
        assert len(o.nodes) == 0 and len(o.edges) == 0

    def test_fixture_counts(self, corpus40):
        assert len(corpus40.nodes) == 40
        assert len(corpus40.edges) == 52

    def test_short_row_reports_line(self, tmp_path):
        d = write_corpus(tmp_path / "c", topics="1\tfoo\t\n")
        with pytest.raises(MalformedRowError) as exc:
            io.load_ontology(d)
        assert exc.value.line_no == 2
        assert "topics.tsv" in str(exc.value)

    def test_missing_file(self, tmp_path):
        d = write_corpus(tmp_path / "c")
        (d / "edges.tsv").unlink()
        with pytest.raises(MissingFileError):
            io.load_ontology(d)

    def test_duplicate_topic_id(self, tmp_path):
        d = write_corpus(tmp_path / "c", topics="1\tfoo\t\t\t0\n1\tbar\t\t\t0\n")
        with pytest.raises(DuplicateIdInFileError):
            io.load_ontology(d)

    def test_unknown_language(self, tmp_path):
        d = write_corpus(
            tmp_path / "c", topics="1\tfoo\t\t\t0\n", names="1\tzz\tvisible\tFoo\n"
        )
        with pytest.raises(UnknownLanguageCodeError):
            io.load_ontology(d)

    def test_bad_ref_patterns_rejected(self, tmp_path):
        d = write_corpus(tmp_path / "c", topics="1\tfoo\tX12\t\t0\n")
        with pytest.raises(MalformedRowError):
            io.load_ontology(d)
        d = write_corpus(tmp_path / "c2", topics="1\tfoo\t\tm123\t0\n")
        with pytest.raises(MalformedRowError):
            io.load_ontology(d)

    def test_roots_derived_when_undeclared(self, tmp_path):
        d = write_corpus(
            tmp_path / "c",
            topics="1\ta\t\t\t0\n2\tb\t\t\t0\n",
            edges="1\t1\t2\n",
            names="1\ten\tvisible\tA\n2\ten\tvisible\tB\n",
        )
        assert io.load_ontology(d).root_ids == (1,)


class TestSave:
    def test_empty_ontology_headers_only(self, tmp_path):
        io.save_ontology(Ontology(), tmp_path / "out")
        assert (tmp_path / "out" / "topics.tsv").read_text() == io.TOPICS_HEADER + "\n"
        assert (tmp_path / "out" / "edges.tsv").read_text() == io.EDGES_HEADER + "\n"

    def test_round_trip_structural_equality(self, corpus40, tmp_path):
        io.save_ontology(corpus40, tmp_path / "out")
        again = io.load_ontology(tmp_path / "out")
        assert again == corpus40

    def test_save_load_save_byte_identical(self, corpus40, tmp_path):
        io.save_ontology(corpus40, tmp_path / "a")
        io.save_ontology(io.load_ontology(tmp_path / "a"), tmp_path / "b")
        for name in io.render_ontology(corpus40):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_canonical_fixture_is_stable(self, corpus40, tmp_path):
        # the bundled fixture is already canonical: save(load(x)) == x
        io.save_ontology(corpus40, tmp_path / "out")
        for name in io.render_ontology(corpus40):
            assert (tmp_path / "out" / name).read_bytes() == (CORPUS40 / name).read_bytes()

    def test_two_saves_byte_identical(self, corpus40, tmp_path):
        io.save_ontology(corpus40, tmp_path / "a")
        io.save_ontology(corpus40, tmp_path / "b")
        for name in io.render_ontology(corpus40):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_field_with_tab_rejected(self):
        from topicforge.model import DisplayNameRecord, TopicNode

        o = Ontology(
            nodes={1: TopicNode(1, "a")},
            display_names={(1, "en"): DisplayNameRecord(1, "en", "visible", "bad\tname")},
        )
        with pytest.raises(ValueError):
            io.render_ontology(o)


class TestAudit:
    def rec(self, seq, kind="add_edge", payload=None):
        return io.ChangeRecord(seq, "2026-08-26T00:00:00Z", "tester", kind, payload or {})

    def test_append_to_empty(self, tmp_path):
        tmp_path.mkdir(exist_ok=True)
        io.append_audit(tmp_path, self.rec(1))
        assert len(io.read_audit(tmp_path)) == 1

    def test_append_sequence(self, tmp_path):
        for i in range(1, 6):
            io.append_audit(tmp_path, self.rec(i))
        io.append_audit(tmp_path, self.rec(6))
        records = io.read_audit(tmp_path)
        assert [r.seq for r in records] == [1, 2, 3, 4, 5, 6]

    def test_stale_seq_conflict(self, tmp_path):
        for i in range(1, 6):
            io.append_audit(tmp_path, self.rec(i))
        with pytest.raises(SeqConflictError):
            io.append_audit(tmp_path, self.rec(5))

    def test_existing_bytes_untouched(self, tmp_path):
        io.append_audit(tmp_path, self.rec(1))
        before = (tmp_path / io.AUDIT_FILE).read_bytes()
        io.append_audit(tmp_path, self.rec(2))
        after = (tmp_path / io.AUDIT_FILE).read_bytes()
        assert after.startswith(before)

    def test_record_json_round_trip(self):
        rec = self.rec(3, "merge_topics", {"loser": 2, "winner": 1})
        line = io.record_to_json(rec)
        assert json.loads(line)["op_kind"] == "merge_topics"
        assert io.record_from_json(line) == rec


class TestAdapter:
    def test_column_mapping(self, tmp_path):
        d = tmp_path / "foreign"
        d.mkdir()
        (d / "nodes.txt").write_text("id\tname\nwd\n10\tfoo\tQ1\n11\tbar\t\n".replace("\nwd\n", "\twd\n"))
        (d / "links.txt").write_text("lid\tfrom\tto\n1\t10\t11\n")
        (d / "labels.txt").write_text("tid\tlg\ttext\n10\ten\tFoo\n11\ten\tBar\n")
        cfg = {
            "topics": {
                "file": "nodes.txt",
                "columns": {"topic_id": "id", "slug": "name", "wikidata_id": "wd"},
            },
            "edges": {
                "file": "links.txt",
                "columns": {"edge_id": "lid", "source": "from", "destination": "to"},
            },
            "display_names": {
                "file": "labels.txt",
                "columns": {"topic_id": "tid", "language": "lg", "display_name": "text"},
            },
        }
        cfg_path = tmp_path / "adapter.json"
        cfg_path.write_text(json.dumps(cfg))
        o = io.load_with_adapter(d, cfg_path)
        assert set(o.nodes) == {10, 11}
        assert o.nodes[10].wikidata_id == "Q1"
        assert o.root_ids == (10,)
        assert o.display_names[(11, "en")].display_name == "Bar"
