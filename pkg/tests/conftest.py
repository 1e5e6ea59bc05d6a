import random
from pathlib import Path

import pytest

from topicforge.io import load_ontology
from topicforge.model import DisplayNameRecord, Ontology, TopicEdge, TopicNode

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS40 = FIXTURES / "corpus40"
PLANTED = FIXTURES / "planted"


@pytest.fixture
def corpus40():
    return load_ontology(CORPUS40)


@pytest.fixture
def planted():
    return load_ontology(PLANTED)


@pytest.fixture
def corpus40_dir(tmp_path):
    """A writable copy of the clean corpus."""
    import shutil

    dst = tmp_path / "corpus"
    shutil.copytree(CORPUS40, dst)
    return dst


def make_chain(*slugs: str) -> Ontology:
    """A -> B -> C ... single-parent chain; first node is the root."""
    nodes, edges, names = {}, {}, {}
    for i, slug in enumerate(slugs, start=1):
        nodes[i] = TopicNode(i, slug)
        names[(i, "en")] = DisplayNameRecord(i, "en", "visible", slug.replace("-", " ").title())
        if i > 1:
            edges[i - 1] = TopicEdge(i - 1, i - 1, i)
    return Ontology(nodes=nodes, edges=edges, display_names=names, root_ids=(1,))


def make_random_dag(rng: random.Random, n: int, edge_prob: float = 0.08) -> Ontology:
    """Random DAG: edges only point from lower to higher topic_id."""
    nodes = {i: TopicNode(i, f"t{i}") for i in range(1, n + 1)}
    names = {
        (i, "en"): DisplayNameRecord(i, "en", "visible", f"T{i}") for i in range(1, n + 1)
    }
    edges = {}
    eid = 0
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if rng.random() < edge_prob:
                eid += 1
                edges[eid] = TopicEdge(eid, a, b)
    o = Ontology(nodes=nodes, edges=edges, display_names=names)
    return o.with_roots_from_structure()


def brute_force_reachability(o: Ontology) -> dict[int, set[int]]:
    """Transitive closure along parent->child edges, by saturation."""
    reach = {t: set() for t in o.nodes}
    for e in o.edges.values():
        if e.source in reach and e.destination in reach:
            reach[e.source].add(e.destination)
    changed = True
    while changed:
        changed = False
        for t in reach:
            extra = set()
            for d in reach[t]:
                extra |= reach.get(d, set()) - reach[t]
            if extra:
                reach[t] |= extra
                changed = True
    return reach
