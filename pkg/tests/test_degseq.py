import random
from fractions import Fraction

import pytest

from tilinglab.constructions import (
    ExtremalParams,
    complete_graph,
    complete_multipartite,
    extremal_instance,
    transitive_tournament,
)
from tilinglab.degseq import (
    DegreeCondition,
    check_baselines,
    check_dominant_margin,
    check_exact_sequence,
    check_margin_sequence,
)
from tilinglab.graphs import Graph, degree_sequence, symmetrize

from oracles import sample_gnp


def direct_margin_scan(g, r, gamma):
    """Independent re-scan: first 1-based index violating the margin bound."""
    seq = degree_sequence(g)
    n = g.n
    for i in range(1, n + 1):
        if Fraction(i) >= Fraction(n, r):
            break
        if Fraction(seq[i - 1]) < Fraction((r - 2) * n, r) + i + gamma * n:
            return i
    return None


def test_exact_examples():
    assert check_exact_sequence(complete_graph(6), 3).satisfied
    rep = check_exact_sequence(complete_multipartite(3, 3), 3)
    assert not rep.satisfied
    assert "(b)" in rep.detail
    assert rep.first_violating_index == 3  # index n/r + 1


def test_exact_requires_divisibility():
    with pytest.raises(ValueError, match="divide"):
        check_exact_sequence(complete_graph(7), 3)


def test_margin_examples():
    # complete graph satisfies the margin up to 1/r - 2/n
    n, r = 12, 3
    gamma = Fraction(1, r) - Fraction(2, n)
    assert check_margin_sequence(complete_graph(n), r, gamma).satisfied

    rep = check_margin_sequence(Graph(10, []), 2, Fraction(1, 10))
    assert not rep.satisfied and rep.first_violating_index == 1


def test_margin_matches_direct_scan():
    rng = random.Random(17)
    for _ in range(40):
        g = sample_gnp(rng, 24, 0.9)
        gamma = Fraction(rng.randint(0, 10), 100)
        rep = check_margin_sequence(g, 3, gamma)
        assert rep.first_violating_index == direct_margin_scan(g, 3, gamma)
        assert rep.satisfied == (rep.first_violating_index is None)


def test_dominant_examples():
    rep = check_dominant_margin(symmetrize(complete_graph(9)), 3, Fraction(1, 20))
    assert rep.satisfied

    rep = check_dominant_margin(transitive_tournament(3), 3, 0)
    assert rep.satisfied and rep.vacuous  # n/r = 1 leaves no index to check


def test_dominant_equals_graph_check_on_symmetrized():
    rng = random.Random(31)
    for _ in range(25):
        g = sample_gnp(rng, rng.randint(4, 20), rng.random())
        gamma = Fraction(rng.randint(0, 15), 100)
        a = check_margin_sequence(g, 3, gamma)
        b = check_dominant_margin(symmetrize(g), 3, gamma)
        assert a.satisfied == b.satisfied
        assert a.first_violating_index == b.first_violating_index
        assert a.slack_profile == b.slack_profile


def test_baseline_examples():
    reps = check_baselines(complete_graph(6), 3)
    assert all(r.satisfied for r in reps.values())

    c5 = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    assert not check_baselines(c5, 2)["hajnal-szemeredi"].satisfied


def test_hs_implies_alpha():
    rng = random.Random(55)
    hits = 0
    for _ in range(200):
        n = rng.choice((6, 9, 12))
        g = sample_gnp(rng, n, rng.uniform(0.5, 1.0))
        if check_baselines(g, 3)["hajnal-szemeredi"].satisfied:
            hits += 1
            rep = check_margin_sequence(g, 3, 0)
            assert rep.satisfied
    assert hits > 5


def test_exact_implies_margin_zero():
    rng = random.Random(77)
    hits = 0
    for _ in range(300):
        g = sample_gnp(rng, 9, rng.uniform(0.6, 1.0))
        rep = check_exact_sequence(g, 3)
        if rep.satisfied:
            hits += 1
            assert check_margin_sequence(g, 3, 0).satisfied
    assert hits > 5


def test_monotone_under_edge_addition():
    rng = random.Random(99)
    for _ in range(60):
        n = rng.randint(4, 14)
        g = sample_gnp(rng, n, rng.random())
        non_edges = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if not g.has_edge(u, v)
        ]
        if not non_edges:
            continue
        extra = rng.choice(non_edges)
        bigger = Graph(n, list(g.edges) + [extra])
        gamma = Fraction(rng.randint(0, 10), 100)
        for r in (2, 3):
            if check_margin_sequence(g, r, gamma).satisfied:
                assert check_margin_sequence(bigger, r, gamma).satisfied
            base = check_baselines(g, r, gamma)
            base2 = check_baselines(bigger, r, gamma)
            for name in base:
                if base[name].satisfied:
                    assert base2[name].satisfied, name


def test_relabeling_invariance():
    rng = random.Random(13)
    for _ in range(20):
        n = rng.randint(4, 12)
        g = sample_gnp(rng, n, rng.random())
        perm = list(range(n))
        rng.shuffle(perm)
        h = Graph(n, [(perm[u], perm[v]) for u, v in g.edges])
        for r in (2, 3):
            a = check_margin_sequence(g, r, Fraction(1, 20))
            b = check_margin_sequence(h, r, Fraction(1, 20))
            assert (a.satisfied, a.first_violating_index, a.slack_profile) == (
                b.satisfied,
                b.first_violating_index,
                b.slack_profile,
            )


def test_extremal_instance_conditions():
    # the n=144 instance satisfies both parts with slack >= C = 1 everywhere;
    # at desk n=36 the same construction caps V_2 degrees too low for the
    # full index range, so only the prefix of the profile stays positive
    inst = extremal_instance(
        ExtremalParams(3, (2, 2, 2), 144, 1, star_sizes=(6, 6, 6, 6, 6, 6, 5, 4, 3, 2, 2))
    )
    rep = check_exact_sequence(inst.graph, 3)
    assert rep.satisfied
    assert rep.slack_min >= 1

    desk = extremal_instance(ExtremalParams(3, (2, 2, 2), 36, 1))
    rep36 = check_exact_sequence(desk.graph, 3)
    assert not rep36.satisfied
    assert rep36.first_violating_index == 10
    assert all(s > 0 for s in rep36.slack_profile[:8])


def test_report_serialization():
    rep = check_margin_sequence(complete_graph(6), 3, 0)
    obj = rep.to_json_obj()
    assert set(obj) >= {"name", "satisfied", "first_violating_index", "slack_min"}
    assert obj["satisfied"] is True


def test_condition_dataclass_validation():
    with pytest.raises(ValueError):
        DegreeCondition("x", 1)
    with pytest.raises(ValueError):
        DegreeCondition("x", 3, Fraction(-1, 2))


def test_beta_literal_at_tiny_n():
    # n = r leaves part (a) vacuous while part (b) reads index 2 literally
    rep = check_exact_sequence(complete_graph(3), 3)
    assert rep.satisfied and rep.vacuous
    lonely = Graph(3, [(0, 1)])
    rep = check_exact_sequence(lonely, 3)
    assert not rep.satisfied and rep.first_violating_index == 2


def test_evaluate_dispatch():
    from tilinglab.degseq import evaluate
    from tilinglab.graphs import symmetrize

    assert evaluate(DegreeCondition("exact", 3), complete_graph(6)).satisfied
    rep = evaluate(
        DegreeCondition("margin", 3, Fraction(1, 20)), complete_graph(12)
    )
    assert rep.satisfied
    rep = evaluate(
        DegreeCondition("dominant-margin", 3, Fraction(1, 20), "DOMINANT_DEGREE"),
        symmetrize(complete_graph(9)),
    )
    assert rep.satisfied
    assert evaluate(DegreeCondition("posa", 2), complete_graph(6)).satisfied
    with pytest.raises(ValueError):
        evaluate(DegreeCondition("nope", 3), complete_graph(6))
    with pytest.raises(ValueError):
        evaluate(DegreeCondition("exact", 3), symmetrize(complete_graph(6)))
