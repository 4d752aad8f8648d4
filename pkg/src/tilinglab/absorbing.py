"""Pattern-path connecting structures and absorbing families.

A pattern-path of length t chains t blocks of h-1 vertices through t+1
connectors so that each block forms the pattern with both of its adjacent
connectors.  Its interior therefore admits a perfect packing no matter
which endpoint is kept, which is exactly the connecting property the
absorbing-set construction needs: a vertex set X absorbs a vertex w when
host[X ∪ {w}] has a perfect packing.

The absorbing family is built by randomized greedy selection of disjoint
candidate gadgets, scored by how many sampled vertex pairs they absorb on
both sides, and every absorption performed later is re-verified exactly by
the solver.  The family keeps a multiple of |pattern| many gadgets so that
the idle part of the family always has the right divisibility, and the
union is solver-checked for a perfect packing at build time.

`pipeline` chains family construction, an almost-perfect packing of the
rest of the host (greedy plus the exchange engine where the pattern is a
clique or transitive tournament), and final absorption of the leftover.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .constructions import clique_pattern, pattern_power, transitive_pattern
from .graphs import Digraph, Graph, PatternGraph, bits, symmetrize
from .packing import (
    BudgetExhausted,
    Packing,
    SearchBudget,
    VerifyResult,
    enumerate_copies,
    find_perfect_packing,
    greedy_packing,
    is_perfect_packing,
    spans_pattern,
)
from .util import split_seed


# -- pattern paths -----------------------------------------------------------


@dataclass(frozen=True)
class HPath:
    """Blocks X_1..X_t of size h-1 with connectors y_1..y_{t+1}.

    Each X_i spans the pattern together with y_i and with y_{i+1}; the
    endpoints are y_1 and y_{t+1} and t is the length.
    """

    pattern: PatternGraph
    blocks: tuple[tuple[int, ...], ...]
    connectors: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.blocks)

    @property
    def endpoints(self) -> tuple[int, int]:
        return self.connectors[0], self.connectors[-1]

    def vertices(self) -> list[int]:
        out = list(self.connectors)
        for b in self.blocks:
            out.extend(b)
        return out

    def interior(self) -> list[int]:
        x, y = self.endpoints
        return [v for v in self.vertices() if v != x and v != y]


@dataclass(frozen=True)
class TruncatedHPath:
    """Blocks X_1..X_t with inner connectors y_2..y_t; endsets X_1 and X_t."""

    pattern: PatternGraph
    blocks: tuple[tuple[int, ...], ...]
    connectors: tuple[int, ...]  # y_2..y_t

    @property
    def length(self) -> int:
        return len(self.blocks)

    @property
    def endsets(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.blocks[0], self.blocks[-1]

    def vertices(self) -> list[int]:
        out = list(self.connectors)
        for b in self.blocks:
            out.extend(b)
        return out


def is_h_path(host: Graph | Digraph, p: HPath) -> VerifyResult:
    """Check sizes, distinctness and both spanning conditions per block."""
    h = p.pattern.order
    t = p.length
    if t < 1:
        return VerifyResult(False, "length must be >= 1")
    if len(p.connectors) != t + 1:
        return VerifyResult(False, f"expected {t + 1} connectors")
    for i, block in enumerate(p.blocks, start=1):
        if len(block) != h - 1:
            return VerifyResult(False, f"block {i} has size {len(block)} != {h - 1}")
    verts = p.vertices()
    if len(set(verts)) != len(verts):
        dup = sorted(v for v in set(verts) if verts.count(v) > 1)[0]
        return VerifyResult(False, f"vertex {dup} repeated")
    if len(verts) != t * h + 1:
        return VerifyResult(False, f"order {len(verts)} != t*h+1 = {t * h + 1}")
    for i, block in enumerate(p.blocks):
        for y in (p.connectors[i], p.connectors[i + 1]):
            if spans_pattern(host, block + (y,), p.pattern) is None:
                return VerifyResult(
                    False,
                    f"block {i + 1} with connector {y} does not span {p.pattern.name}",
                )
    return VerifyResult(True)


def is_truncated_h_path(host: Graph | Digraph, q: TruncatedHPath) -> VerifyResult:
    h = q.pattern.order
    t = q.length
    if t < 2:
        return VerifyResult(False, "truncated path needs length >= 2")
    if len(q.connectors) != t - 1:
        return VerifyResult(False, f"expected {t - 1} connectors")
    for i, block in enumerate(q.blocks, start=1):
        if len(block) != h - 1:
            return VerifyResult(False, f"block {i} has size {len(block)} != {h - 1}")
    verts = q.vertices()
    if len(set(verts)) != len(verts):
        return VerifyResult(False, "repeated vertex")
    if len(verts) != t * h - 1:
        return VerifyResult(False, f"order {len(verts)} != t*h-1 = {t * h - 1}")
    # connectors[j] is y_{j+2}; block i (1-based) pairs with y_i and y_{i+1},
    # except the end blocks which each have a single condition.
    checks = [(0, q.connectors[0]), (t - 1, q.connectors[t - 2])]
    for i in range(1, t - 1):
        checks.append((i, q.connectors[i - 1]))
        checks.append((i, q.connectors[i]))
    for bi, y in checks:
        if spans_pattern(host, q.blocks[bi] + (y,), q.pattern) is None:
            return VerifyResult(
                False,
                f"block {bi + 1} with connector {y} does not span {q.pattern.name}",
            )
    return VerifyResult(True)


def truncate_path(p: HPath) -> TruncatedHPath:
    """Drop the two endpoints; the result is the truncated path of p."""
    return TruncatedHPath(p.pattern, p.blocks, p.connectors[1:-1])


def concat_paths(p1: HPath, p2: HPath) -> HPath:
    """Join paths sharing one endpoint; lengths add, outer endpoints remain."""
    if p1.pattern != p2.pattern:
        raise ValueError("patterns differ")
    if p1.connectors[-1] != p2.connectors[0]:
        raise ValueError(
            f"right endpoint {p1.connectors[-1]} != left endpoint {p2.connectors[0]}"
        )
    shared = p1.connectors[-1]
    s1 = set(p1.vertices()) - {shared}
    s2 = set(p2.vertices()) - {shared}
    overlap = s1 & s2
    if overlap:
        raise ValueError(f"paths share vertices {sorted(overlap)} besides the endpoint")
    return HPath(
        p1.pattern,
        p1.blocks + p2.blocks,
        p1.connectors + p2.connectors[1:],
    )


def length1_connectors(
    host: Graph | Digraph,
    pattern: PatternGraph,
    x: int,
    y: int,
    cap: int | None = None,
) -> Iterator[tuple[int, ...]]:
    """Sets X with X+{x} and X+{y} both spanning the pattern, x,y not in X.

    Exhaustive (each qualifying set exactly once) up to the optional cap.
    """
    if x == y:
        raise ValueError("endpoints must differ")
    count = 0
    mask = host.full_mask() & ~(1 << y)
    for verts, _ in enumerate_copies(host, pattern, through=x, within=mask):
        block = tuple(v for v in verts if v != x)
        if spans_pattern(host, block + (y,), pattern) is None:
            continue
        yield block
        count += 1
        if cap is not None and count >= cap:
            return


def auxiliary_graph(
    host: Graph | Digraph, pattern: PatternGraph, beta_count: int = 1
) -> Graph:
    """Graph on the host's vertices joining pairs with many length-1 paths.

    xy is an edge exactly when at least beta_count connector sets link x
    and y.  Materialised explicitly so connecting-path search is a plain
    path search plus lifting.
    """
    if beta_count < 1:
        raise ValueError("beta_count >= 1 required")
    edges = []
    for x in range(host.n):
        for y in range(x + 1, host.n):
            hits = 0
            for _ in length1_connectors(host, pattern, x, y, cap=beta_count):
                hits += 1
            if hits >= beta_count:
                edges.append((x, y))
    return Graph(host.n, edges)


def _aux_paths(
    aux: Graph, x: int, y: int, t: int
) -> Iterator[tuple[int, ...]]:
    """Simple x-y paths with exactly t edges, in lexicographic DFS order."""

    path = [x]
    used = {x}

    def rec() -> Iterator[tuple[int, ...]]:
        if len(path) == t + 1:
            if path[-1] == y:
                yield tuple(path)
            return
        for u in aux.neighbors(path[-1]):
            if u in used or (u == y and len(path) != t):
                continue
            path.append(u)
            used.add(u)
            yield from rec()
            path.pop()
            used.remove(u)

    if t >= 1:
        yield from rec()


def find_connecting_path(
    host: Graph | Digraph,
    pattern: PatternGraph,
    x: int,
    y: int,
    t: int,
    beta_count: int = 1,
    aux: Graph | None = None,
) -> HPath | None:
    """A pattern-path of length t from x to y, or None after exhausting lifts.

    Walks the auxiliary graph for x-y paths of length t, then lifts each
    one to vertex-disjoint connector blocks by backtracking over the
    connector streams.
    """
    if x == y:
        raise ValueError("endpoints must differ")
    if t < 1:
        raise ValueError("t >= 1 required")
    if aux is None:
        aux = auxiliary_graph(host, pattern, beta_count)
    for waypoints in _aux_paths(aux, x, y, t):
        forbidden = set(waypoints)
        blocks: list[tuple[int, ...]] = []

        def lift(i: int) -> bool:
            if i == t:
                return True
            a, b = waypoints[i], waypoints[i + 1]
            for block in length1_connectors(host, pattern, a, b):
                if any(v in forbidden for v in block):
                    continue
                blocks.append(block)
                forbidden.update(block)
                if lift(i + 1):
                    return True
                blocks.pop()
                forbidden.difference_update(block)
            return False

        if lift(0):
            path = HPath(pattern, tuple(blocks), waypoints)
            check = is_h_path(host, path)
            assert check.ok, check.reason
            return path
    return None


def connector_degree_profile(host: Graph | Digraph, p: HPath) -> list[int]:
    """Degrees of the waypoints along a found path, a diagnostic for the
    expansion property (each hop is expected to reach higher-degree
    vertices on degree-sequence hosts; nothing is enforced here).

    Digraph hosts report dominant degrees.
    """
    if isinstance(host, Digraph):
        from .graphs import dominant_view

        return [dominant_view(host, y).dominant for y in p.connectors]
    return [host.degree(y) for y in p.connectors]


# -- clique-path star blow-ups ------------------------------------------------


def clique_path(r: int, t: int) -> tuple[Graph, HPath]:
    """The standalone minimal K_r-path of length t (exactly the required
    cliques, nothing more)."""
    if r < 2 or t < 1:
        raise ValueError("r >= 2 and t >= 1 required")
    connectors = []
    blocks = []
    nxt = 0
    connectors.append(nxt)
    nxt += 1
    for _ in range(t):
        blocks.append(tuple(range(nxt, nxt + r - 1)))
        nxt += r - 1
        connectors.append(nxt)
        nxt += 1
    edges = []
    for i, block in enumerate(blocks):
        group = list(block)
        for a in range(len(group)):
            for b in range(a + 1, len(group)):
                edges.append((group[a], group[b]))
        for y in (connectors[i], connectors[i + 1]):
            for u in group:
                edges.append((y, u))
    g = Graph(nxt, edges)
    path = HPath(clique_pattern(r), tuple(blocks), tuple(connectors))
    check = is_h_path(g, path)
    assert check.ok, check.reason
    return g, path


@dataclass(frozen=True)
class StarBlowup:
    """The h-expanded clique path: blocks become balanced multipartite
    stacks, inner connectors become h-sets, the second-to-last connector a
    (2h-1)-set, and the two endpoints stay single vertices (absent in the
    truncated variant).

    ``x_blocks[i]`` lists the h(r-1) vertices replacing block i, grouped in
    runs of h per original block vertex; ``y_blocks[i]`` the set replacing
    connector i (empty at the ends when truncated).
    """

    graph: Graph
    r: int
    t: int
    h: int
    x_blocks: tuple[tuple[int, ...], ...]
    y_blocks: tuple[tuple[int, ...], ...]
    truncated: bool

    def order(self) -> int:
        return self.graph.n


def _build_star_blowup(r: int, t: int, h: int, truncated: bool) -> StarBlowup:
    if r + 1 < 3 or t < 3:
        raise ValueError("regime violated: need r >= 2 and t >= 3")
    if h < 1:
        raise ValueError("h >= 1 required")
    nxt = 0
    y_blocks: list[tuple[int, ...]] = []
    x_blocks: list[tuple[int, ...]] = []
    for i in range(1, t + 2):  # connector slots y_1..y_{t+1}
        if i == 1 or i == t + 1:
            size = 0 if truncated else 1
        elif i == t:
            size = 2 * h - 1
        else:
            size = h
        y_blocks.append(tuple(range(nxt, nxt + size)))
        nxt += size
        if i <= t:
            x_blocks.append(tuple(range(nxt, nxt + h * (r - 1))))
            nxt += h * (r - 1)
    edges = []
    for block in x_blocks:
        # K_{r-1}^h inside the block: classes are the h-runs
        for a in range(len(block)):
            for b in range(a + 1, len(block)):
                if a // h != b // h:
                    edges.append((block[a], block[b]))
    for i in range(t):
        around = y_blocks[i] + y_blocks[i + 1]
        for y in around:
            for u in x_blocks[i]:
                edges.append((y, u))
    return StarBlowup(
        Graph(nxt, edges), r, t, h, tuple(x_blocks), tuple(y_blocks), truncated
    )


def star_blowup(p: HPath, h: int) -> StarBlowup:
    """Expand a clique path by h; by the size law the result has hrt+1
    vertices."""
    r = p.pattern.clique_order
    if not r:
        raise ValueError("star blow-up needs a clique pattern path")
    return _build_star_blowup(r, p.length, h, truncated=False)


def truncated_star_blowup(p: HPath | TruncatedHPath, h: int) -> StarBlowup:
    """The truncated variant, with hrt-1 vertices."""
    r = p.pattern.clique_order
    if not r:
        raise ValueError("star blow-up needs a clique pattern path")
    return _build_star_blowup(r, p.length, h, truncated=True)


def q_prime(sb: StarBlowup) -> StarBlowup:
    """Attach fresh endpoint vertices joined to the two endsets of a
    truncated blow-up; the result is a full pattern-path again."""
    if not sb.truncated:
        raise ValueError("q_prime applies to truncated blow-ups")
    n = sb.graph.n
    x_new, y_new = n, n + 1
    edges = list(sb.graph.edges)
    edges.extend((x_new, u) for u in sb.x_blocks[0])
    edges.extend((y_new, u) for u in sb.x_blocks[-1])
    y_blocks = list(sb.y_blocks)
    y_blocks[0] = (x_new,)
    y_blocks[-1] = (y_new,)
    return StarBlowup(
        Graph(n + 2, edges),
        sb.r,
        sb.t,
        sb.h,
        sb.x_blocks,
        tuple(y_blocks),
        truncated=False,
    )


def _repartition(sb: StarBlowup) -> HPath | TruncatedHPath:
    """Regroup an expanded path into blocks of hr-1 plus single connectors.

    Every inner connector set donates h-1 vertices to the block on its
    left and keeps one as the new connector; the (2h-1)-set before the
    last block feeds both of the last two blocks.
    """
    r, t, h = sb.r, sb.t, sb.h
    donated: list[tuple[int, ...]] = [()] * t  # Y'_1..Y'_t (0-based i-1)
    conns: dict[int, int] = {}
    for i in range(2, t):  # inner sets y_2..y_{t-1}
        ys = sb.y_blocks[i - 1]
        donated[i - 2] = ys[: h - 1]
        conns[i] = ys[h - 1]
    yt = sb.y_blocks[t - 1]  # the (2h-1)-set at slot y_t
    donated[t - 2] = yt[: h - 1]
    donated[t - 1] = yt[h - 1 : 2 * h - 2]
    conns[t] = yt[2 * h - 2]
    blocks = tuple(
        tuple(sorted(sb.x_blocks[i] + donated[i])) for i in range(t)
    )
    pattern = PatternGraph(pattern_power("K", r, h), name=f"K{r}^{h}")
    inner = tuple(conns[i] for i in range(2, t + 1))
    if sb.truncated:
        return TruncatedHPath(pattern, blocks, inner)
    y1 = sb.y_blocks[0][0]
    yend = sb.y_blocks[t][0]
    return HPath(pattern, blocks, (y1,) + inner + (yend,))


def verify_star_blowup(sb: StarBlowup) -> VerifyResult:
    """The expanded path must verify as a path of the h-blown pattern
    after regrouping; any missing cross edge is reported."""
    expected = sb.h * sb.r * sb.t + (-1 if sb.truncated else 1)
    if sb.order() != expected:
        return VerifyResult(
            False, f"order {sb.order()} != {expected} (size law violated)"
        )
    regrouped = _repartition(sb)
    if isinstance(regrouped, HPath):
        return is_h_path(sb.graph, regrouped)
    return is_truncated_h_path(sb.graph, regrouped)


# -- absorbing families --------------------------------------------------------


def _perfect_on_subset(
    host: Graph | Digraph,
    pattern: PatternGraph,
    verts: Sequence[int],
    budget: SearchBudget | None = None,
) -> list[tuple[int, ...]] | None:
    sub, mapping = host.induced(verts)
    packing = find_perfect_packing(sub, pattern, budget)
    if packing is None:
        return None
    return [tuple(sorted(mapping[v] for v in part)) for part in packing.parts]


def is_absorbing_for(
    host: Graph | Digraph,
    pattern: PatternGraph,
    S: Sequence[int],
    Q: Sequence[int],
) -> bool:
    """Accept iff host[S] and host[S ∪ Q] both have perfect packings."""
    s = set(S)
    q = set(Q)
    if s & q:
        raise ValueError(f"S and Q intersect: {sorted(s & q)}")
    if _perfect_on_subset(host, pattern, sorted(s)) is None:
        return False
    return _perfect_on_subset(host, pattern, sorted(s | q)) is not None


class FamilyConstructionError(RuntimeError):
    """Absorbing-family construction failed; the message carries diagnostics."""


@dataclass(frozen=True)
class AbsorbingGadget:
    verts: tuple[int, ...]
    pairs_checked: int


@dataclass(frozen=True)
class AbsorbingFamily:
    """Disjoint gadget sets whose union is the absorbing set M.

    Each gadget has t*h-1 vertices, so a gadget plus one absorbed vertex
    packs perfectly; the gadget count is a multiple of h so the idle part
    of M keeps pattern divisibility, and a perfect packing of host[M] is
    verified at build time.
    """

    pattern_name: str
    gadgets: tuple[AbsorbingGadget, ...]
    params: dict
    seed: int
    idle_parts: tuple[tuple[int, ...], ...] = field(repr=False, default=())

    @property
    def M(self) -> frozenset[int]:
        return frozenset(v for g in self.gadgets for v in g.verts)

    def capacity(self) -> int:
        return len(self.gadgets)

    def to_json_obj(self) -> dict:
        return {
            "M": sorted(self.M),
            "gadgets": [
                {"verts": list(g.verts), "pairs_checked": g.pairs_checked}
                for g in self.gadgets
            ],
            "params": dict(self.params),
            "seed": self.seed,
        }


def build_absorbing_family(
    host: Graph | Digraph,
    pattern: PatternGraph,
    t: int = 1,
    sample_size: int = 200,
    pair_threshold: int = 1,
    rng_seed: int = 0,
    max_gadgets: int | None = None,
    pair_sample_size: int = 24,
    idle_budget: int | None = 2_000_000,
) -> AbsorbingFamily:
    """Randomized greedy absorbing family, reproducible under the seed.

    Candidates are (t*h-1)-sets drawn with per-index derived sub-seeds;
    overlapping candidates are discarded and a survivor becomes a gadget
    when it absorbs both endpoints of at least pair_threshold sampled
    pairs.  Fails loudly when too few disjoint gadgets survive or when the
    union has no perfect packing under the verification budget.
    """
    n = host.n
    h = pattern.order
    gsize = t * h - 1
    if gsize < 1 or gsize > n:
        raise FamilyConstructionError(f"gadget size {gsize} impossible at n={n}")
    if max_gadgets is None:
        max_gadgets = 2 * h
    params = {
        "t": t,
        "sample_size": sample_size,
        "pair_threshold": pair_threshold,
        "max_gadgets": max_gadgets,
        "pair_sample_size": pair_sample_size,
    }
    pairs = []
    seen_pairs = set()
    for j in range(pair_sample_size):
        rng = random.Random(split_seed(rng_seed, 2, j))
        pair = tuple(sorted(rng.sample(range(n), 2)))
        if pair not in seen_pairs:
            seen_pairs.add(pair)
            pairs.append(pair)

    absorb_cache: dict[tuple[tuple[int, ...], int], bool] = {}

    def absorbs(verts: tuple[int, ...], w: int) -> bool:
        key = (verts, w)
        if key not in absorb_cache:
            absorb_cache[key] = (
                _perfect_on_subset(host, pattern, verts + (w,)) is not None
            )
        return absorb_cache[key]

    gadgets: list[AbsorbingGadget] = []
    used_mask = 0
    examined = 0
    for i in range(sample_size):
        if len(gadgets) >= max_gadgets:
            break
        rng = random.Random(split_seed(rng_seed, 1, i))
        cand = tuple(sorted(rng.sample(range(n), gsize)))
        examined += 1
        cmask = 0
        for v in cand:
            cmask |= 1 << v
        if cmask & used_mask:
            continue
        hit = 0
        for a, b in pairs:
            if a in cand or b in cand:
                continue
            if absorbs(cand, a) and absorbs(cand, b):
                hit += 1
        if hit >= pair_threshold:
            gadgets.append(AbsorbingGadget(cand, hit))
            used_mask |= cmask
    keep = (len(gadgets) // h) * h
    gadgets = gadgets[:keep]
    if not gadgets:
        raise FamilyConstructionError(
            f"too few gadgets survive: examined {examined} candidates, "
            f"needed {h} disjoint gadgets with pair coverage >= {pair_threshold}"
        )
    m_verts = sorted(v for g in gadgets for v in g.verts)
    budget = SearchBudget(idle_budget) if idle_budget else None
    try:
        idle = _perfect_on_subset(host, pattern, m_verts, budget)
    except BudgetExhausted as exc:
        raise FamilyConstructionError(
            f"idle packing of |M|={len(m_verts)} not verified: {exc}"
        ) from exc
    if idle is None:
        raise FamilyConstructionError(
            f"union of {len(gadgets)} gadgets (|M|={len(m_verts)}) admits no "
            "perfect packing"
        )
    return AbsorbingFamily(
        pattern.name, tuple(gadgets), params, rng_seed, tuple(idle)
    )


def absorb(
    host: Graph | Digraph,
    pattern: PatternGraph,
    fam: AbsorbingFamily,
    W: Sequence[int],
    diagnostics: dict | None = None,
) -> Packing | None:
    """Perfect packing of host[M ∪ W], or None with a diagnostic.

    Every vertex of W is assigned to its own unused gadget after an exact
    solver check; the idle gadgets are then packed jointly.  Capacity is
    one vertex per gadget.
    """
    notes = diagnostics if diagnostics is not None else {}
    w = sorted(set(W))
    if len(w) != len(list(W)):
        raise ValueError("W has repeated vertices")
    m = fam.M
    overlap = m & set(w)
    if overlap:
        raise ValueError(f"W intersects M: {sorted(overlap)}")
    h = pattern.order
    if len(w) % h != 0:
        raise ValueError(f"|W|={len(w)} not divisible by pattern order {h}")
    if len(w) > fam.capacity():
        notes["reason"] = (
            f"capacity exceeded: |W|={len(w)} > {fam.capacity()} gadgets"
        )
        return None

    # which gadget can take which vertex, verified exactly by the solver
    feasible: dict[int, list[tuple[int, list[tuple[int, ...]]]]] = {}
    for v in w:
        options = []
        for gi, gadget in enumerate(fam.gadgets):
            local = _perfect_on_subset(host, pattern, gadget.verts + (v,))
            if local is not None:
                options.append((gi, local))
        if not options:
            notes["reason"] = f"no gadget absorbs vertex {v}"
            return None
        feasible[v] = options

    # backtracking over injective assignments, then pack the idle remainder;
    # configuration attempts are capped so a refusal is a diagnostic, not a
    # nonexistence proof
    attempts = 0
    max_attempts = 500
    assignment: dict[int, tuple[int, list[tuple[int, ...]]]] = {}
    taken: set[int] = set()

    def assign(idx: int) -> Packing | None:
        nonlocal attempts
        if idx == len(w):
            attempts += 1
            if attempts > max_attempts:
                return None
            idle_verts = sorted(
                u
                for gi, gadget in enumerate(fam.gadgets)
                if gi not in taken
                for u in gadget.verts
            )
            parts: list[tuple[int, ...]] = []
            for _, local in assignment.values():
                parts.extend(local)
            if idle_verts:
                idle = _perfect_on_subset(host, pattern, idle_verts)
                if idle is None:
                    return None
                parts.extend(idle)
            return Packing.uniform(host.n, parts, pattern)
        v = w[idx]
        for gi, local in feasible[v]:
            if gi in taken or attempts > max_attempts:
                continue
            taken.add(gi)
            assignment[v] = (gi, local)
            result = assign(idx + 1)
            if result is not None:
                return result
            taken.discard(gi)
            del assignment[v]
        return None

    packing = assign(0)
    if packing is None:
        notes["reason"] = (
            f"no gadget assignment with a packable idle remainder found "
            f"within {max_attempts} configurations"
        )
        return None
    check = is_perfect_packing(host, packing, universe=m | set(w))
    assert check.ok, check.reason
    notes["used_gadgets"] = len(w)
    return packing


# -- the absorb-then-pack pipeline ---------------------------------------------


@dataclass
class PipelineResult:
    success: bool
    packing: Packing | None
    stage: str | None
    diagnostics: dict


def _almost_pack(
    host: Graph | Digraph, pattern: PatternGraph, order_policy: str
) -> Packing:
    """Greedy packing improved by the exchange engine where it applies.

    Clique patterns run the exchange on the symmetrized host (a clique is
    exactly a transitive copy there); transitive tournament patterns run
    it directly.  Other patterns keep the greedy result, re-greedified
    until inextensible.
    """
    from .exchange import swap_to_fixpoint

    m = greedy_packing(host, pattern, order_policy)
    r = pattern.order
    if pattern.transitive_order:
        dhost = host
        as_tournament = True
    elif pattern.clique_order and isinstance(host, Graph):
        dhost = symmetrize(host)
        as_tournament = True
    else:
        as_tournament = False
    if not as_tournament:
        return m
    tr = transitive_pattern(r)
    work = Packing.uniform(host.n, m.parts, tr)
    improved = True
    while improved:
        improved = False
        work, _ = swap_to_fixpoint(dhost, r, work)
        mask = host.full_mask() & ~work.covered_mask()
        added = []
        for anchor in bits(mask):
            active = mask
            for part in added:
                for u in part:
                    active &= ~(1 << u)
            if not active >> anchor & 1:
                continue
            for verts, _ in enumerate_copies(dhost, tr, through=anchor, within=active):
                added.append(verts)
                improved = True
                break
        if added:
            work = Packing.uniform(
                host.n, list(work.parts) + added, tr
            )
    return Packing.uniform(host.n, work.parts, pattern)


def pipeline(
    host: Graph | Digraph,
    pattern: PatternGraph,
    t: int = 1,
    sample_size: int = 200,
    pair_threshold: int = 1,
    rng_seed: int = 0,
    max_gadgets: int | None = None,
    order_policy: str = "index",
    idle_budget: int | None = 2_000_000,
) -> PipelineResult:
    """Absorbing family -> almost-perfect packing of the rest -> absorb.

    Success returns a solver-verified perfect packing of the whole host;
    failure reports the stage and diagnostics instead of weakening any
    check.
    """
    diag: dict = {"n": host.n, "pattern": pattern.name}
    h = pattern.order
    if host.n % h != 0:
        diag["reason"] = f"pattern order {h} does not divide n={host.n}"
        return PipelineResult(False, None, "divisibility", diag)
    try:
        fam = build_absorbing_family(
            host,
            pattern,
            t=t,
            sample_size=sample_size,
            pair_threshold=pair_threshold,
            rng_seed=rng_seed,
            max_gadgets=max_gadgets,
            idle_budget=idle_budget,
        )
    except FamilyConstructionError as exc:
        diag["reason"] = str(exc)
        return PipelineResult(False, None, "absorbing-family", diag)
    diag["family_size"] = len(fam.M)
    diag["gadgets"] = fam.capacity()
    rest = sorted(set(range(host.n)) - fam.M)
    sub, mapping = host.induced(rest)
    almost = _almost_pack(sub, pattern, order_policy)
    global_parts = [
        tuple(sorted(mapping[v] for v in part)) for part in almost.parts
    ]
    covered = {v for part in global_parts for v in part}
    leftover = sorted(set(rest) - covered)
    diag["almost_covered"] = len(covered)
    diag["leftover"] = len(leftover)
    absorbed = absorb(host, pattern, fam, leftover, diagnostics=diag)
    if absorbed is None:
        return PipelineResult(False, None, "absorb", diag)
    full = Packing.uniform(
        host.n, global_parts + list(absorbed.parts), pattern
    )
    check = is_perfect_packing(host, full)
    assert check.ok, check.reason
    return PipelineResult(True, full, None, diag)
