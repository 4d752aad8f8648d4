"""Independent brute-force oracles used to cross-check the library.

Everything here is deliberately written from scratch against the raw edge
sets, without calling the library's spanning or solver code, so that
agreement actually means something.
"""

from __future__ import annotations

import itertools
import random

from tilinglab.graphs import Digraph, Graph


def sample_gnp(rng: random.Random, n: int, p: float) -> Graph:
    return Graph(
        n,
        [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p],
    )


def sample_digraph(rng: random.Random, n: int, p: float) -> Digraph:
    arcs = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                arcs.append((i, j))
    return Digraph(n, arcs)


def sample_tournament(rng: random.Random, n: int) -> Digraph:
    arcs = []
    for i in range(n):
        for j in range(i + 1, n):
            arcs.append((i, j) if rng.random() < 0.5 else (j, i))
    return Digraph(n, arcs)


def brute_spans(host, verts, name: str) -> bool:
    """Direct spanning test for K2, K3, T3 from raw edge membership."""
    vs = list(verts)
    if name == "K2":
        (u, v) = vs
        return (min(u, v), max(u, v)) in host.edges
    if name == "K3":
        a, b, c = vs
        e = host.edges
        return (
            (min(a, b), max(a, b)) in e
            and (min(a, c), max(a, c)) in e
            and (min(b, c), max(b, c)) in e
        )
    if name == "T3":
        for p in itertools.permutations(vs):
            if (
                (p[0], p[1]) in host.arcs
                and (p[0], p[2]) in host.arcs
                and (p[1], p[2]) in host.arcs
            ):
                return True
        return False
    raise ValueError(name)


def partitions_into(vs: list[int], h: int):
    """All partitions of vs into parts of size h (vs sorted, no repeats)."""
    if not vs:
        yield []
        return
    first, rest = vs[0], vs[1:]
    for combo in itertools.combinations(rest, h - 1):
        part = (first,) + combo
        chosen = set(combo)
        remaining = [v for v in rest if v not in chosen]
        for tail in partitions_into(remaining, h):
            yield [part] + tail


def oracle_perfect_decision(host, name: str) -> bool:
    """Perfect-packing decision by enumerating every set partition."""
    h = {"K2": 2, "K3": 3, "T3": 3}[name]
    if host.n % h != 0:
        return False
    for parts in partitions_into(list(range(host.n)), h):
        if all(brute_spans(host, part, name) for part in parts):
            return True
    return False


def oracle_max_coverage(host, name: str) -> int:
    """Maximum covered vertices over all disjoint copy subsets."""
    h = {"K2": 2, "K3": 3, "T3": 3}[name]
    copies = [
        frozenset(c)
        for c in itertools.combinations(range(host.n), h)
        if brute_spans(host, c, name)
    ]

    best = 0

    def rec(idx: int, used: frozenset, covered: int):
        nonlocal best
        best = max(best, covered)
        if covered + (host.n - len(used)) // h * h <= best:
            return
        for k in range(idx, len(copies)):
            if not copies[k] & used:
                rec(k + 1, used | copies[k], covered + h)

    rec(0, frozenset(), 0)
    return best


def oracle_chromatic(g: Graph) -> int:
    """Smallest k admitting a proper coloring, by exhaustive enumeration."""
    if g.n == 0:
        return 0
    edges = list(g.edges)
    for k in range(1, g.n + 1):
        for coloring in itertools.product(range(k), repeat=g.n):
            if all(coloring[u] != coloring[v] for u, v in edges):
                return k
    raise AssertionError("unreachable")


def has_path_on_4_vertices(g: Graph, inside: list[int]) -> bool:
    """Exhaustive search for a path with 4 vertices within a vertex set."""
    for quad in itertools.permutations(inside, 4):
        if (
            g.has_edge(quad[0], quad[1])
            and g.has_edge(quad[1], quad[2])
            and g.has_edge(quad[2], quad[3])
        ):
            return True
    return False
