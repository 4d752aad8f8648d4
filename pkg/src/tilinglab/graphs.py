"""Core graph and digraph types with bitset adjacency.

Vertices are dense integers 0..n-1.  Adjacency is stored as one Python int
bitmask per vertex, so neighbourhood intersections (the inner loop of every
copy-enumeration routine in this package) are single big-int ANDs.

All types are immutable after construction and safe to share between
threads.  "X spans a copy of H" means subgraph containment throughout the
package, never induced containment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator


class GraphFormatError(ValueError):
    """Raised for malformed graph input (loops, bad endpoints, bad JSON)."""


def _bits(mask: int) -> Iterator[int]:
    """Iterate set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _check_endpoint(v: int, n: int) -> None:
    if not isinstance(v, int) or isinstance(v, bool):
        raise GraphFormatError(f"vertex {v!r} is not an integer")
    if not 0 <= v < n:
        raise GraphFormatError(f"vertex {v} out of range 0..{n - 1}")


class Graph:
    """Simple undirected graph: no loops, no parallel edges."""

    __slots__ = ("n", "adj", "edges")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphFormatError("vertex count must be nonnegative")
        adj = [0] * n
        edge_set = set()
        for u, v in edges:
            _check_endpoint(u, n)
            _check_endpoint(v, n)
            if u == v:
                raise GraphFormatError(f"loop at vertex {u}")
            if u > v:
                u, v = v, u
            edge_set.add((u, v))
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.adj = tuple(adj)
        self.edges = frozenset(edge_set)

    # -- queries ---------------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.adj[v]))

    def edge_count(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def vertices(self) -> range:
        return range(self.n)

    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def complement(self) -> "Graph":
        g = Graph.__new__(Graph)
        g.n = self.n
        full = (1 << self.n) - 1
        g.adj = tuple((full & ~self.adj[v]) & ~(1 << v) for v in range(self.n))
        g.edges = frozenset(
            (u, v)
            for u in range(self.n)
            for v in range(u + 1, self.n)
            if not self.has_edge(u, v)
        )
        return g

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph plus the list mapping new ids to original ids."""
        vs = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(vs)}
        edges = [
            (pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos
        ]
        return Graph(len(vs), edges), vs

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={len(self.edges)})"


class Digraph:
    """Simple directed graph: no loops, at most one arc per ordered pair.

    Antiparallel arc pairs are allowed; an edge both ways is two arcs.
    """

    __slots__ = ("n", "out", "inn", "arcs")

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphFormatError("vertex count must be nonnegative")
        out = [0] * n
        inn = [0] * n
        arc_set = set()
        for u, v in arcs:
            _check_endpoint(u, n)
            _check_endpoint(v, n)
            if u == v:
                raise GraphFormatError(f"loop at vertex {u}")
            arc_set.add((u, v))
            out[u] |= 1 << v
            inn[v] |= 1 << u
        self.n = n
        self.out = tuple(out)
        self.inn = tuple(inn)
        self.arcs = frozenset(arc_set)

    # -- queries ---------------------------------------------------------

    def has_arc(self, u: int, v: int) -> bool:
        return bool(self.out[u] >> v & 1)

    def out_degree(self, v: int) -> int:
        return self.out[v].bit_count()

    def in_degree(self, v: int) -> int:
        return self.inn[v].bit_count()

    def out_degree_in(self, v: int, mask: int) -> int:
        return (self.out[v] & mask).bit_count()

    def in_degree_in(self, v: int, mask: int) -> int:
        return (self.inn[v] & mask).bit_count()

    def edge_count(self) -> int:
        return len(self.arcs)

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)

    def vertices(self) -> range:
        return range(self.n)

    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def induced(self, vertices: Iterable[int]) -> tuple["Digraph", list[int]]:
        vs = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(vs)}
        arcs = [
            (pos[u], pos[v]) for u, v in self.arcs if u in pos and v in pos
        ]
        return Digraph(len(vs), arcs), vs

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Digraph)
            and self.n == other.n
            and self.arcs == other.arcs
        )

    def __hash__(self) -> int:
        return hash((self.n, self.arcs))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, m={len(self.arcs)})"


@dataclass(frozen=True)
class DominantDegreeView:
    """Per-vertex dominant degree record.

    ``orientation`` is "OUT" whenever out-degree >= in-degree (ties count as
    sent-out edges), else "IN"; ``dominant`` always equals the larger count.
    Downstream code reads the orientation here instead of re-deciding ties.
    """

    vertex: int
    d_plus: int
    d_minus: int
    dominant: int
    orientation: str  # "OUT" | "IN"

    def dominant_mask(self, d: Digraph) -> int:
        """Neighbourhood mask in the dominant direction."""
        return d.out[self.vertex] if self.orientation == "OUT" else d.inn[self.vertex]

    def dominant_degree_in(self, d: Digraph, mask: int) -> int:
        """d*(x, Y) for Y given as a mask, per the tie rule."""
        return (self.dominant_mask(d) & mask).bit_count()


def dominant_view(d: Digraph, v: int) -> DominantDegreeView:
    dp, dm = d.out_degree(v), d.in_degree(v)
    if dp >= dm:
        return DominantDegreeView(v, dp, dm, dp, "OUT")
    return DominantDegreeView(v, dp, dm, dm, "IN")


def degree_sequence(g: Graph) -> list[int]:
    """Degrees sorted ascending (the usual d_1 <= ... <= d_n convention)."""
    return sorted(g.degree(v) for v in range(g.n))


def dominant_degree_sequence(
    d: Digraph,
) -> tuple[list[int], list[DominantDegreeView]]:
    """Sorted dominant degrees plus the per-vertex views (indexed by vertex)."""
    views = [dominant_view(d, v) for v in range(d.n)]
    return sorted(view.dominant for view in views), views


def blow_up(g: Graph | Digraph, t: int) -> Graph | Digraph:
    """Replace each vertex by t clones; block of vertex i is i*t..i*t+t-1.

    Clone blocks of adjacent vertices are completely joined (respecting arc
    direction for digraphs); blocks of non-adjacent vertices, and the inside
    of each block, stay empty.
    """
    if t < 1:
        raise ValueError("blow-up factor must be >= 1")
    if isinstance(g, Graph):
        edges = [
            (u * t + a, v * t + b)
            for u, v in g.edges
            for a in range(t)
            for b in range(t)
        ]
        return Graph(g.n * t, edges)
    arcs = [
        (u * t + a, v * t + b)
        for u, v in g.arcs
        for a in range(t)
        for b in range(t)
    ]
    return Digraph(g.n * t, arcs)


def symmetrize(g: Graph) -> Digraph:
    """Replace each edge xy by the two arcs xy and yx."""
    arcs = []
    for u, v in g.edges:
        arcs.append((u, v))
        arcs.append((v, u))
    return Digraph(g.n, arcs)


# -- chromatic number ------------------------------------------------------


def _greedy_coloring_bound(g: Graph) -> int:
    order = sorted(range(g.n), key=lambda v: -g.degree(v))
    color = {}
    used = 0
    for v in order:
        taken = {color[u] for u in g.neighbors(v) if u in color}
        c = 0
        while c in taken:
            c += 1
        color[v] = c
        used = max(used, c + 1)
    return max(used, 1)


def _greedy_clique_bound(g: Graph) -> int:
    best = 1 if g.n else 0
    for v in range(g.n):
        clique = [v]
        cand = g.adj[v]
        while cand:
            u = max(_bits(cand), key=lambda w: (g.adj[w] & cand).bit_count())
            clique.append(u)
            cand &= g.adj[u]
        best = max(best, len(clique))
    return best


def _colorable(g: Graph, k: int, order: list[int]) -> bool:
    n = g.n
    color = [-1] * n

    def rec(idx: int, used: int) -> bool:
        if idx == n:
            return True
        v = order[idx]
        taken = 0
        for u in g.neighbors(v):
            if color[u] >= 0:
                taken |= 1 << color[u]
        limit = min(used + 1, k)  # opening at most one fresh colour breaks symmetry
        for c in range(limit):
            if taken >> c & 1:
                continue
            color[v] = c
            if rec(idx + 1, max(used, c + 1)):
                return True
            color[v] = -1
        return False

    return rec(0, 0)


def chromatic_number(g: Graph) -> int:
    """Exact chromatic number by branch-and-bound k-coloring search."""
    if g.n == 0:
        return 0
    if not g.edges:
        return 1
    lo = _greedy_clique_bound(g)
    hi = _greedy_coloring_bound(g)
    order = sorted(range(g.n), key=lambda v: -g.degree(v))
    for k in range(lo, hi):
        if _colorable(g, k, order):
            return k
    return hi


# -- pattern graphs --------------------------------------------------------


def _clique_order(g: Graph) -> int | None:
    """r if g is K_r, else None."""
    if g.n >= 1 and len(g.edges) == g.n * (g.n - 1) // 2:
        return g.n
    return None


def _multipartite_classes(g: Graph) -> tuple[int, ...] | None:
    """Class sizes if g is complete multipartite (>= 2 classes), else None.

    The complement of a complete multipartite graph is a disjoint union of
    cliques, one per class.
    """
    comp = g.complement()
    seen = 0
    sizes = []
    for v in range(g.n):
        if seen >> v & 1:
            continue
        # component by BFS over the complement
        frontier = 1 << v
        block = 0
        while frontier:
            block |= frontier
            nxt = 0
            for u in _bits(frontier):
                nxt |= comp.adj[u]
            frontier = nxt & ~block
        for u in _bits(block):
            if (comp.adj[u] | (1 << u)) & block != block:
                return None  # component is not a clique
        sizes.append(block.bit_count())
        seen |= block
    if len(sizes) < 2:
        return None
    return tuple(sorted(sizes, reverse=True))


def _is_transitive_tournament(d: Digraph) -> bool:
    degs = sorted((d.out_degree(v) for v in range(d.n)), reverse=True)
    return len(d.arcs) == d.n * (d.n - 1) // 2 and degs == list(
        range(d.n - 1, -1, -1)
    )


class PatternGraph:
    """A small pattern to pack, with cached structural classification.

    Wraps either a Graph or a Digraph.  For graphs the exact chromatic
    number is computed on demand and cached.  The classification flags are
    what the copy-enumeration and spanning routines dispatch on.
    """

    __slots__ = (
        "base",
        "name",
        "order",
        "is_digraph",
        "clique_order",
        "multipartite",
        "transitive_order",
        "_chi",
    )

    def __init__(self, base: Graph | Digraph, name: str | None = None):
        if base.n < 1:
            raise ValueError("pattern must have at least one vertex")
        self.base = base
        self.order = base.n
        self.is_digraph = isinstance(base, Digraph)
        self._chi: int | None = None
        if self.is_digraph:
            self.clique_order = None
            self.multipartite = None
            self.transitive_order = base.n if _is_transitive_tournament(base) else None
        else:
            self.clique_order = _clique_order(base)
            self.multipartite = (
                None if self.clique_order else _multipartite_classes(base)
            )
            self.transitive_order = None
        self.name = name or self._default_name()

    def _default_name(self) -> str:
        if self.transitive_order:
            return f"T{self.transitive_order}"
        if self.clique_order:
            return f"K{self.clique_order}"
        if self.multipartite:
            return "K" + ",".join(str(s) for s in self.multipartite)
        kind = "digraph" if self.is_digraph else "graph"
        return f"{kind}({self.order})"

    def chromatic_number(self) -> int:
        if self.is_digraph:
            raise ValueError("chromatic number is defined for graph patterns")
        if self._chi is None:
            self._chi = chromatic_number(self.base)
        return self._chi

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PatternGraph) and self.base == other.base

    def __hash__(self) -> int:
        return hash(self.base)

    def __repr__(self) -> str:
        return f"PatternGraph({self.name})"


# -- serialization ---------------------------------------------------------


def graph_to_json(g: Graph | Digraph) -> str:
    kind = "digraph" if isinstance(g, Digraph) else "graph"
    pairs = g.sorted_arcs() if isinstance(g, Digraph) else g.sorted_edges()
    return json.dumps(
        {"kind": kind, "n": g.n, "edges": [[u, v] for u, v in pairs]}
    )


def graph_from_json(text: str) -> Graph | Digraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise GraphFormatError("graph JSON must be an object")
    kind = data.get("kind")
    if kind not in ("graph", "digraph"):
        raise GraphFormatError(f"unknown kind {kind!r}")
    n = data.get("n")
    if not isinstance(n, int) or n < 0:
        raise GraphFormatError("field 'n' must be a nonnegative integer")
    edges = data.get("edges")
    if not isinstance(edges, list):
        raise GraphFormatError("field 'edges' must be a list of pairs")
    pairs = []
    for item in edges:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise GraphFormatError(f"bad edge entry {item!r}")
        pairs.append((item[0], item[1]))
    return Digraph(n, pairs) if kind == "digraph" else Graph(n, pairs)


def format_edge_list(g: Graph | Digraph) -> str:
    kind = "digraph" if isinstance(g, Digraph) else "graph"
    pairs = g.sorted_arcs() if isinstance(g, Digraph) else g.sorted_edges()
    lines = [f"{g.n} {len(pairs)} {kind}"]
    lines.extend(f"{u} {v}" for u, v in pairs)
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph | Digraph:
    lines = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
    if not lines:
        raise GraphFormatError("empty edge-list input")
    head = lines[0].split()
    if len(head) != 3:
        raise GraphFormatError("header must be 'n m kind'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphFormatError("header counts must be integers") from exc
    kind = head[2]
    if kind not in ("graph", "digraph"):
        raise GraphFormatError(f"unknown kind {kind!r}")
    if len(lines) - 1 != m:
        raise GraphFormatError(f"expected {m} edge lines, got {len(lines) - 1}")
    pairs = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"bad edge line {ln!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise GraphFormatError(f"bad edge line {ln!r}") from exc
    return Digraph(n, pairs) if kind == "digraph" else Graph(n, pairs)


def load_graph(path: str) -> Graph | Digraph:
    """Load a graph from a .json or edge-list file, by extension sniffing."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return graph_from_json(text)
    return parse_edge_list(text)


bits = _bits
