import random

import pytest

from tilinglab.graphs import (
    Digraph,
    Graph,
    GraphFormatError,
    blow_up,
    chromatic_number,
    degree_sequence,
    dominant_degree_sequence,
    format_edge_list,
    graph_from_json,
    graph_to_json,
    parse_edge_list,
    symmetrize,
)
from tilinglab.constructions import (
    complete_graph,
    complete_multipartite,
    transitive_tournament,
)

from oracles import oracle_chromatic, sample_digraph, sample_gnp

PETERSEN = Graph(
    10,
    [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
     (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
     (0, 5), (1, 6), (2, 7), (3, 8), (4, 9)],
)


def test_construction_validation():
    with pytest.raises(GraphFormatError):
        Graph(3, [(0, 0)])
    with pytest.raises(GraphFormatError):
        Graph(3, [(0, 3)])
    with pytest.raises(GraphFormatError):
        Digraph(2, [(1, 1)])
    # parallel edges collapse under set semantics
    g = Graph(3, [(0, 1), (1, 0)])
    assert g.edge_count() == 1
    d = Digraph(3, [(0, 1), (1, 0)])
    assert d.edge_count() == 2  # antiparallel pair is two arcs


def test_degree_sequence_examples():
    assert degree_sequence(complete_graph(3)) == [2, 2, 2]
    assert degree_sequence(Graph(3, [(0, 1), (1, 2)])) == [1, 1, 2]


def test_dominant_degree_examples():
    seq, views = dominant_degree_sequence(Digraph(2, [(0, 1)]))
    assert seq == [1, 1]
    assert views[0].orientation == "OUT" and views[1].orientation == "IN"

    _, views = dominant_degree_sequence(transitive_tournament(3))
    assert views[0].d_plus == 2 and views[0].d_minus == 0
    assert views[0].dominant == 2

    seq, views = dominant_degree_sequence(symmetrize(complete_graph(3)))
    assert seq == [2, 2, 2]
    assert all(v.orientation == "OUT" for v in views)  # ties resolve OUT


def test_dominant_view_invariant():
    rng = random.Random(4)
    for _ in range(30):
        d = sample_digraph(rng, rng.randint(2, 12), rng.random())
        _, views = dominant_degree_sequence(d)
        for view in views:
            if view.orientation == "OUT":
                assert view.dominant == view.d_plus
            else:
                assert view.d_minus > view.d_plus


def test_blow_up_examples():
    assert blow_up(complete_graph(2), 2) == complete_multipartite(2, 2)
    d = Digraph(2, [(0, 1), (1, 0), (0, 1)])  # d* sequence [1, 1]
    d = Digraph(3, [(0, 1), (1, 2), (0, 2), (2, 1)])
    seq, _ = dominant_degree_sequence(d)
    blown, _ = dominant_degree_sequence(blow_up(d, 3))
    assert blown == sorted(3 * seq[(j - 1) // 3] for j in range(1, 10))
    g = sample_gnp(random.Random(1), 7, 0.5)
    assert blow_up(g, 1) == g


@pytest.mark.parametrize("t", [2, 3, 5])
def test_blow_up_scaling_identity(t):
    rng = random.Random(t)
    for _ in range(10):
        g = sample_gnp(rng, rng.randint(2, 30), rng.random())
        base = degree_sequence(g)
        blown = degree_sequence(blow_up(g, t))
        assert blown == [t * base[(j - 1) // t] for j in range(1, g.n * t + 1)]
        d = sample_digraph(rng, rng.randint(2, 30), rng.random())
        dbase, _ = dominant_degree_sequence(d)
        dblown, _ = dominant_degree_sequence(blow_up(d, t))
        assert dblown == [t * dbase[(j - 1) // t] for j in range(1, d.n * t + 1)]


def test_blow_up_block_layout():
    g = Graph(2, [(0, 1)])
    b = blow_up(g, 3)
    # block of vertex 1 is 3..5; no edges inside blocks
    assert not b.has_edge(0, 1) and not b.has_edge(3, 4)
    assert all(b.has_edge(u, v) for u in (0, 1, 2) for v in (3, 4, 5))


def test_symmetrize():
    assert symmetrize(complete_graph(3)).edge_count() == 6
    assert symmetrize(Graph(4, [])).edge_count() == 0
    rng = random.Random(9)
    for _ in range(20):
        g = sample_gnp(rng, rng.randint(1, 20), rng.random())
        seq, _ = dominant_degree_sequence(symmetrize(g))
        assert seq == degree_sequence(g)


def test_chromatic_examples():
    assert chromatic_number(complete_multipartite(2, 2, 2)) == 3
    c5 = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    assert chromatic_number(c5) == 3
    assert oracle_chromatic(PETERSEN) == 3
    assert chromatic_number(PETERSEN) == 3


def test_chromatic_vs_enumeration():
    rng = random.Random(23)
    for _ in range(25):
        g = sample_gnp(rng, rng.randint(1, 8), rng.random())
        assert chromatic_number(g) == oracle_chromatic(g)


def test_json_round_trip():
    g = sample_gnp(random.Random(2), 9, 0.4)
    assert graph_from_json(graph_to_json(g)) == g
    d = sample_digraph(random.Random(3), 7, 0.4)
    assert graph_from_json(graph_to_json(d)) == d


def test_edge_list_round_trip():
    g = sample_gnp(random.Random(5), 8, 0.5)
    assert parse_edge_list(format_edge_list(g)) == g
    d = sample_digraph(random.Random(6), 6, 0.5)
    assert parse_edge_list(format_edge_list(d)) == d


def test_parsers_reject_bad_input():
    with pytest.raises(GraphFormatError):
        graph_from_json('{"kind": "graph", "n": 3, "edges": [[0, 0]]}')
    with pytest.raises(GraphFormatError):
        graph_from_json('{"kind": "graph", "n": 3, "edges": [[0, 7]]}')
    with pytest.raises(GraphFormatError):
        graph_from_json('{"kind": "blob", "n": 3, "edges": []}')
    with pytest.raises(GraphFormatError):
        graph_from_json("not json")
    with pytest.raises(GraphFormatError):
        parse_edge_list("3 1 graph\n0 0\n")
    with pytest.raises(GraphFormatError):
        parse_edge_list("3 2 graph\n0 1\n")
    with pytest.raises(GraphFormatError):
        parse_edge_list("3 1 digraph\n0 9\n")
