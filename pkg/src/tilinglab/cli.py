"""Command-line front door.

Commands: gen, check, pack, maxpack, improve, path, absorbfam, absorb,
pipeline, experiment, certify.  Graph files use the JSON format
{"kind": "graph"|"digraph", "n": ..., "edges": [[u, v], ...]} or the
edge-list text format with header "n m kind"; packings, condition reports
and absorbing families serialize to JSON; traces and experiments to CSV.

Exit codes: 0 success/found/satisfied, 1 condition not satisfied or
refutation found, 2 input error, 3 proven NONE / construction failure,
4 budget exhausted.

Experiment CSVs contain only deterministic fields (search-node counts as
the cost measure, never wall-clock), so one seed always produces
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import absorbing, constructions, degseq, exchange, packing
from .graphs import (
    Digraph,
    Graph,
    GraphFormatError,
    graph_to_json,
    load_graph,
)
from .util import as_fraction, split_seed

EXIT_OK = 0
EXIT_UNSATISFIED = 1
EXIT_INPUT = 2
EXIT_NONE = 3
EXIT_BUDGET = 4


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _load(path: str):
    try:
        return load_graph(path)
    except (OSError, GraphFormatError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _pattern(name: str):
    try:
        return constructions.pattern_from_name(name)
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _int_list(text: str) -> tuple[int, ...]:
    if not text:
        return ()
    return tuple(int(s) for s in text.split(","))


# -- gen ----------------------------------------------------------------------


def cmd_gen(args) -> int:
    preset = args.preset
    try:
        if preset == "tr":
            g = constructions.transitive_tournament(args.r)
        elif preset == "kr-power":
            g = constructions.pattern_power("K", args.r, args.t)
        elif preset == "tr-power":
            g = constructions.pattern_power("T", args.r, args.t)
        elif preset == "hs-tight":
            if args.n is None:
                raise ValueError("hs-tight needs --n")
            g = constructions.hs_tight_instance(args.r, args.n)
        elif preset == "extremal-square":
            if args.n is None:
                raise ValueError("extremal-square needs --n")
            parts = _int_list(args.parts) if args.parts else tuple([2] * args.r)
            stars = _int_list(args.stars) if args.stars else ()
            params = constructions.ExtremalParams(
                args.r, parts, args.n, args.C, stars
            )
            inst = constructions.extremal_instance(params)
            g = inst.graph
            _say(
                args,
                "classes: "
                + " ".join(f"|V_{i+1}|={len(c)}" for i, c in enumerate(inst.classes))
                + f"; stars: {[len(s) for s in inst.stars]}; v={inst.v}",
            )
        else:
            print(f"unknown preset {preset!r}", file=sys.stderr)
            return EXIT_INPUT
    except (ValueError, constructions.ExtremalParamError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write(args.out, graph_to_json(g))
    return EXIT_OK


# -- check ---------------------------------------------------------------------


def _run_condition(g, name: str, r: int, gamma):
    if name == "exact":
        if isinstance(g, Digraph):
            raise ValueError("exact condition applies to graphs")
        return degseq.check_exact_sequence(g, r)
    if name == "margin":
        if isinstance(g, Digraph):
            raise ValueError("margin condition applies to graphs")
        return degseq.check_margin_sequence(g, r, gamma)
    if name == "dominant":
        if not isinstance(g, Digraph):
            raise ValueError("dominant condition applies to digraphs")
        return degseq.check_dominant_margin(g, r, gamma)
    if name in ("hs", "ay", "ore", "posa"):
        if isinstance(g, Digraph):
            raise ValueError("baseline conditions apply to graphs")
        key = {
            "hs": "hajnal-szemeredi",
            "ay": "alon-yuster",
            "ore": "ore",
            "posa": "posa",
        }[name]
        return degseq.check_baselines(g, r, gamma)[key]
    raise ValueError(f"unknown condition {name!r}")


def cmd_check(args) -> int:
    g = _load(args.file)
    gamma = as_fraction(args.gamma)
    names = args.condition.split(",")
    reports = []
    try:
        for name in names:
            reports.append(_run_condition(g, name.strip(), args.r, gamma))
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.format == "json":
        _write(args.out, json.dumps([r.to_json_obj() for r in reports], indent=2))
    else:
        for rep in reports:
            state = "satisfied" if rep.satisfied else "NOT satisfied"
            extra = f" ({rep.detail})" if rep.detail else ""
            bad = (
                f" first violation at index {rep.first_violating_index}"
                if rep.first_violating_index
                else ""
            )
            _say(args, f"{rep.name}: {state}{extra}{bad}")
    return EXIT_OK if all(r.satisfied for r in reports) else EXIT_UNSATISFIED


# -- pack / maxpack --------------------------------------------------------------


def cmd_pack(args) -> int:
    g = _load(args.file)
    pat = _pattern(args.pattern)
    budget = packing.SearchBudget(args.budget_nodes) if args.budget_nodes else None
    try:
        result = packing.find_perfect_packing(g, pat, budget)
    except packing.BudgetExhausted:
        _say(args, "budget exhausted before a decision")
        return EXIT_BUDGET
    if result is None:
        _say(args, "no perfect packing exists (search exhausted)")
        return EXIT_NONE
    _write(args.out, json.dumps(result.to_json_obj()))
    return EXIT_OK


def cmd_maxpack(args) -> int:
    g = _load(args.file)
    pat = _pattern(args.pattern)
    budget = packing.SearchBudget(args.budget_nodes) if args.budget_nodes else None
    res = packing.max_packing(g, pat, budget)
    obj = res.packing.to_json_obj()
    obj["covered"] = res.packing.coverage()
    obj["optimal"] = res.optimal
    obj["nodes"] = res.nodes
    _write(args.out, json.dumps(obj))
    return EXIT_OK if res.optimal else EXIT_BUDGET


# -- improve (expansion loop) ----------------------------------------------------


def cmd_improve(args) -> int:
    g = _load(args.file)
    if not isinstance(g, Digraph):
        print("input error: improvement loop runs on digraphs", file=sys.stderr)
        return EXIT_INPUT
    budget = packing.SearchBudget(args.budget_nodes) if args.budget_nodes else None
    if args.z > 0:
        res = exchange.blowup_iterate(
            g, args.r, args.z, as_fraction(args.gamma),
            eta=as_fraction(args.eta) if args.eta else None,
            budget=budget, seed_policy=args.seed_policy,
        )
        trace = res.trace
        final = res.packing
    else:
        out = exchange.expand_coverage(
            g, args.r, as_fraction(args.gamma),
            eta=as_fraction(args.eta) if args.eta else None,
            budget=budget, seed_policy=args.seed_policy,
        )
        trace = out.trace
        final = out.packing
    _write(args.out, exchange.trace_to_csv(trace))
    _say(args, f"final coverage {final.coverage()}/{final.n}")
    return EXIT_OK


# -- connecting paths --------------------------------------------------------------


def cmd_path(args) -> int:
    g = _load(args.file)
    pat = _pattern(args.pattern)
    path = absorbing.find_connecting_path(
        g, pat, args.x, args.y, args.t, beta_count=args.beta_count
    )
    if path is None:
        _say(args, "no connecting path found (search exhausted)")
        return EXIT_NONE
    obj = {
        "pattern": pat.name,
        "connectors": list(path.connectors),
        "blocks": [list(b) for b in path.blocks],
    }
    _write(args.out, json.dumps(obj))
    return EXIT_OK


# -- absorbing family / absorb ------------------------------------------------------


def cmd_absorbfam(args) -> int:
    g = _load(args.file)
    pat = _pattern(args.pattern)
    try:
        fam = absorbing.build_absorbing_family(
            g,
            pat,
            t=args.t,
            sample_size=args.sample_size,
            pair_threshold=args.pair_threshold,
            rng_seed=args.seed,
            max_gadgets=args.max_gadgets,
        )
    except absorbing.FamilyConstructionError as exc:
        _say(args, f"construction failed: {exc}")
        return EXIT_NONE
    _write(args.out, json.dumps(fam.to_json_obj()))
    return EXIT_OK


def _family_from_json(obj: dict) -> absorbing.AbsorbingFamily:
    gadgets = tuple(
        absorbing.AbsorbingGadget(tuple(g["verts"]), int(g["pairs_checked"]))
        for g in obj["gadgets"]
    )
    return absorbing.AbsorbingFamily(
        obj.get("pattern", ""), gadgets, obj.get("params", {}), obj.get("seed", 0)
    )


def cmd_absorb(args) -> int:
    g = _load(args.file)
    pat = _pattern(args.pattern)
    try:
        with open(args.family) as fh:
            fam = _family_from_json(json.load(fh))
    except (OSError, KeyError, ValueError) as exc:
        print(f"input error: bad family file: {exc}", file=sys.stderr)
        return EXIT_INPUT
    w = _int_list(args.w)
    diag: dict = {}
    try:
        result = absorbing.absorb(g, pat, fam, w, diagnostics=diag)
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if result is None:
        _say(args, f"absorption failed: {diag.get('reason', 'unknown')}")
        return EXIT_NONE
    _write(args.out, json.dumps(result.to_json_obj()))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    g = _load(args.file)
    pat = _pattern(args.pattern)
    res = absorbing.pipeline(
        g,
        pat,
        t=args.t,
        sample_size=args.sample_size,
        pair_threshold=args.pair_threshold,
        rng_seed=args.seed,
        max_gadgets=args.max_gadgets,
    )
    if not res.success:
        _say(args, f"pipeline failed at stage {res.stage}: {res.diagnostics}")
        return EXIT_NONE
    _write(args.out, json.dumps(res.packing.to_json_obj()))
    return EXIT_OK


# -- certify --------------------------------------------------------------------


def cmd_certify(args) -> int:
    g = _load(args.file)
    pat = _pattern(args.pattern)
    res = constructions.certify_uncoverable(g, args.vertex, pat)
    if res.uncoverable:
        _say(
            args,
            f"NONE-FOUND: vertex {args.vertex} lies in no copy of {pat.name}"
            + (
                "; order divisible, hence no perfect packing exists"
                if g.n % pat.order == 0
                else ""
            ),
        )
        return EXIT_OK
    _say(args, f"refuted: {res.refutation} spans {pat.name} through {args.vertex}")
    return EXIT_UNSATISFIED


# -- experiment --------------------------------------------------------------------


_SAMPLERS = ("gnp", "gnp-min-degree", "gnp-exact", "gnp-margin", "gnp-dominant")


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully determined batch experiment: sampler, condition parameters,
    pattern, budgets, trial count and the master seed."""

    sampler: str
    n: int
    r: int
    gamma: str
    p: float
    pattern: str
    trials: int
    seed: int
    budget_nodes: int = 10_000_000
    max_attempts: int = 100_000

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trial count >= 1 required")
        if self.sampler not in _SAMPLERS:
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.seed is None:
            raise ValueError("a seed is required: every trial derives from it")

    def to_dict(self) -> dict:
        return {
            "sampler": self.sampler,
            "n": self.n,
            "r": self.r,
            "gamma": self.gamma,
            "p": self.p,
            "pattern": self.pattern,
            "trials": self.trials,
            "seed": self.seed,
            "budget_nodes": self.budget_nodes,
            "max_attempts": self.max_attempts,
        }


def _sample_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph(
        n,
        [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < p
        ],
    )


def _sample_digraph(rng: random.Random, n: int, p: float) -> Digraph:
    arcs = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                arcs.append((i, j))
    return Digraph(n, arcs)


def _accepts(sampler: str, g, r: int, gamma) -> bool:
    if sampler == "gnp":
        return True
    if sampler == "gnp-min-degree":
        return degseq.check_baselines(g, r)["hajnal-szemeredi"].satisfied
    if sampler == "gnp-exact":
        return g.n % r == 0 and degseq.check_exact_sequence(g, r).satisfied
    if sampler == "gnp-margin":
        return degseq.check_margin_sequence(g, r, gamma).satisfied
    if sampler == "gnp-dominant":
        return degseq.check_dominant_margin(g, r, gamma).satisfied
    raise ValueError(f"unknown sampler {sampler!r}")


def run_trial(spec: dict, trial: int) -> dict:
    """One experiment trial; fully determined by (spec, trial)."""
    sampler = spec["sampler"]
    n = spec["n"]
    r = spec["r"]
    gamma = Fraction(spec["gamma"])
    p0 = spec["p"]
    digraph = sampler == "gnp-dominant"
    attempts = 0
    g = None
    while True:
        rng = random.Random(split_seed(spec["seed"], trial, attempts))
        # density schedule: push p upward every 200 rejections
        p_eff = min(0.98, p0 + 0.05 * (attempts // 200))
        cand = _sample_digraph(rng, n, p_eff) if digraph else _sample_graph(rng, n, p_eff)
        attempts += 1
        if _accepts(sampler, cand, r, gamma):
            g = cand
            break
        if attempts >= spec["max_attempts"]:
            return {
                "trial": trial,
                "n": n,
                "m": "",
                "attempts": attempts,
                "conditions": "sampling-failed",
                "verdict": "no-instance",
                "nodes": 0,
                "violation": "",
            }
    pat = constructions.pattern_from_name(spec["pattern"])
    budget = packing.SearchBudget(spec["budget_nodes"])
    try:
        found = packing.find_perfect_packing(g, pat, budget)
        verdict = "found" if found is not None else "none"
    except packing.BudgetExhausted:
        verdict = "exhausted"
        found = None
    if found is not None:
        check = packing.is_perfect_packing(g, found)
        assert check.ok, check.reason
    conditions = "satisfied" if sampler != "gnp" else "unconditioned"
    violation = ""
    if verdict == "none" and sampler != "gnp":
        # counterexample: dump the instance verbatim for triage
        pairs = g.sorted_arcs() if digraph else g.sorted_edges()
        violation = ";".join(f"{u}-{v}" for u, v in pairs)
    return {
        "trial": trial,
        "n": n,
        "m": g.edge_count(),
        "attempts": attempts,
        "conditions": conditions,
        "verdict": verdict,
        "nodes": budget.nodes,
        "violation": violation,
    }


def experiment_csv(spec: "ExperimentSpec | dict", jobs: int = 1) -> str:
    """Per-trial CSV plus a summary row; byte-identical for a fixed spec.

    Trials are independent (seeds derive from the trial index), so they may
    run in parallel; rows are always emitted in trial order.
    """
    if isinstance(spec, ExperimentSpec):
        spec = spec.to_dict()
    trials = range(spec["trials"])
    if jobs > 1:
        import multiprocessing

        with multiprocessing.Pool(jobs) as pool:
            rows = pool.starmap(run_trial, [(spec, t) for t in trials])
    else:
        rows = [run_trial(spec, t) for t in trials]
    header = "trial,n,m,attempts,conditions,verdict,nodes,violation"
    lines = [header]
    for row in rows:
        lines.append(
            f"{row['trial']},{row['n']},{row['m']},{row['attempts']},"
            f"{row['conditions']},{row['verdict']},{row['nodes']},"
            f"{row['violation']}"
        )
    found = sum(1 for row in rows if row["verdict"] == "found")
    none = sum(1 for row in rows if row["verdict"] == "none")
    exhausted = sum(1 for row in rows if row["verdict"] == "exhausted")
    attempts = sum(row["attempts"] for row in rows)
    accept = f"{spec['trials'] / attempts:.4f}" if attempts else ""
    lines.append(
        f"summary,trials={spec['trials']},found={found},none={none},"
        f"exhausted={exhausted},attempts={attempts},accept-rate={accept},"
    )
    return "\n".join(lines) + "\n"


def cmd_experiment(args) -> int:
    try:
        spec = ExperimentSpec(
            sampler=args.sampler,
            n=args.n,
            r=args.r,
            gamma=str(as_fraction(args.gamma)),
            p=args.p,
            pattern=args.pattern,
            trials=args.trials,
            seed=args.seed,
            budget_nodes=args.budget_nodes or 10_000_000,
            max_attempts=args.max_attempts,
        )
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    csv_text = experiment_csv(spec, jobs=args.jobs)
    _write(args.out, csv_text)
    tail = csv_text.strip().rsplit("\n", 1)[-1]
    _say(args, tail)
    if ",none=0," not in tail and spec.sampler != "gnp":
        return EXIT_UNSATISFIED
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tilinglab",
        description="Perfect-tiling laboratory: generators, degree-sequence "
        "checks, exact packing search, improvement loops, absorbing structures "
        "and batch experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget-nodes", type=int, default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--quiet", action="store_true")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("gen", help="generate a preset graph file")
    p.add_argument("preset", choices=("tr", "kr-power", "tr-power", "extremal-square", "hs-tight"))
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--C", type=int, default=1)
    p.add_argument("--parts", default=None, help="pattern class sizes, e.g. 2,2,2")
    p.add_argument("--stars", default=None, help="star sizes, e.g. 6,5,5")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="evaluate degree-sequence conditions")
    p.add_argument("file")
    p.add_argument("--condition", default="exact",
                   help="comma list of exact,margin,dominant,hs,ay,ore,posa")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--gamma", default="0")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("pack", help="exact perfect-packing decision")
    p.add_argument("file")
    p.add_argument("--pattern", required=True)
    common(p)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("maxpack", help="maximum-coverage packing")
    p.add_argument("file")
    p.add_argument("--pattern", required=True)
    common(p)
    p.set_defaults(func=cmd_maxpack)

    p = sub.add_parser("improve", help="exchange/upgrade expansion loop")
    p.add_argument("file")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--gamma", default="0")
    p.add_argument("--eta", default=None)
    p.add_argument("--z", type=int, default=0, help="blow-up rounds")
    p.add_argument("--seed-policy", choices=("auto", "max", "greedy"), default="auto")
    common(p)
    p.set_defaults(func=cmd_improve)

    p = sub.add_parser("path", help="connecting pattern-path search")
    p.add_argument("file")
    p.add_argument("--pattern", required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--beta-count", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("absorbfam", help="build an absorbing family")
    p.add_argument("file")
    p.add_argument("--pattern", required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--sample-size", type=int, default=200)
    p.add_argument("--pair-threshold", type=int, default=1)
    p.add_argument("--max-gadgets", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_absorbfam)

    p = sub.add_parser("absorb", help="absorb a leftover set with a family")
    p.add_argument("file")
    p.add_argument("--pattern", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--w", default="", help="comma list of vertices")
    common(p)
    p.set_defaults(func=cmd_absorb)

    p = sub.add_parser("pipeline", help="absorb-then-pack end to end")
    p.add_argument("file")
    p.add_argument("--pattern", required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--sample-size", type=int, default=200)
    p.add_argument("--pair-threshold", type=int, default=1)
    p.add_argument("--max-gadgets", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("certify", help="exhaustive uncoverable-vertex certificate")
    p.add_argument("file")
    p.add_argument("--pattern", required=True)
    p.add_argument("--vertex", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("experiment", help="batch sampling experiments, CSV out")
    p.add_argument("--sampler", default="gnp")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--gamma", default="0")
    p.add_argument("--p", type=float, default=0.7)
    p.add_argument("--pattern", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--max-attempts", type=int, default=100_000)
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GraphFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # in-process calls get the code, not the raise
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
