"""Command-line surface and the CSV experiment harness.

Exit codes: 0 success, 1 invalid input, 2 internal guarantee violation
(a deterministic ledger promise failed, which must never happen and
means the math layer is wrong).  Output is deterministic for a fixed
seed; only runtime_ms varies.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import hgio
from .core import Hypergraph, clique_expand, degree_profile
from .cutspace import cut_metrics, theorem_bound, theorem_bound_claim
from .derand import erdos_selfridge_2cut, flip_local_search, greedy_order_cut, order_for_W
from .errors import CertificateError, GuaranteeViolation, HypercutError
from .instances import (
    GenSpec,
    exact_maxcut,
    generate,
    moment_audit,
    monotonicity_check,
)
from .pipeline import (
    GuaranteeLedger,
    PipelineParams,
    _dispatch_driver,
    chromatic_cut,
    codegree_structure,
    goodness_audit,
    solve,
)
from .derand import conditional_rcut
from .reductions import lift_2cut_to_3cut


@dataclass
class RunReport:
    n: int
    m: int
    k: int
    r: int
    algorithm: str
    seed: int
    size: int
    expected: Fraction
    excess: Fraction
    ledger: GuaranteeLedger
    runtime_ms: float

    def lines(self):
        yield f"instance n={self.n} m={self.m} k={self.k}"
        yield f"run r={self.r} algo={self.algorithm} seed={self.seed}"
        yield f"size={self.size} expected={self.expected} excess={self.excess}"
        for e in self.ledger.entries:
            promised = "-" if e.promised is None else str(e.promised)
            stage = "" if e.scope == "instance" else f" scope={e.scope}"
            yield (
                f"guarantee [{e.claim}] promised={promised} "
                f"realized={e.realized} status={e.status}{stage}"
            )
        yield f"runtime_ms={self.runtime_ms:.1f}"


def _run_algorithm(h: Hypergraph, algo: str, r: int, trials: int, seed: int):
    """Returns (cut, ledger).  The ledger may be empty for sampled heuristics."""
    params = PipelineParams(trials=trials, seed=seed)
    ledger = GuaranteeLedger()
    if algo == "auto":
        return solve(h, r, params)
    if algo == "es":
        if r == 2:
            order = order_for_W(h, max(1, min(trials, 8)), seed)
            cut, es = erdos_selfridge_2cut(h, order)
            ledger.add("deferred conditional expectations", es.guaranteed_excess, es.realized_excess)
            return cut, ledger
        if r == 3 and all(len(e) == 3 for e in h.edges):
            order = order_for_W(h, max(1, min(trials, 8)), seed)
            c2, es = erdos_selfridge_2cut(h, order)
            cut = lift_2cut_to_3cut(h, c2)
            ledger.add(
                "third-part lift of the deferred engine",
                Fraction(8, 27) * es.realized_excess,
                cut_metrics(h, cut).excess,
            )
            return cut, ledger
        raise HypercutError("--algo es supports r=2, or r=3 on 3-uniform instances")
    if algo == "greedy":
        if r != 2:
            raise HypercutError("--algo greedy is a 2-cut heuristic")
        mg = clique_expand(h)
        order = order_for_W(h, max(1, min(trials, 8)), seed)
        cut, gl = greedy_order_cut(mg, order)
        cut = flip_local_search(mg, cut)
        ledger.add(
            "pair-expansion greedy gains",
            None,
            cut_metrics(h, cut).excess,
            deterministic=False,
        )
        return cut, ledger
    if algo == "chromatic":
        cut, chi = chromatic_cut(h, r, max(1, trials), seed)
        ledger.add(f"chromatic balance (chi={chi})", None, cut_metrics(h, cut).excess, deterministic=False)
        return cut, ledger
    if algo == "pipeline":
        params = PipelineParams(trials=trials, seed=seed)
        sr = codegree_structure(h, params)
        try:
            cut, driver_ledger = _dispatch_driver(h, r, max(h.max_arity, 2), sr, params)
        except HypercutError:
            cut, driver_ledger = None, None
        if cut is None:
            cut = conditional_rcut(h, r)
            ledger.add("conditional-expectations fallback", Fraction(0), cut_metrics(h, cut).excess)
            return cut, ledger
        ledger.extend(driver_ledger)
        return cut, ledger
    raise HypercutError(f"unknown algorithm {algo!r}")


def run_report(h: Hypergraph, algo: str, r: int, trials: int, seed: int) -> RunReport:
    start = time.perf_counter()
    cut, ledger = _run_algorithm(h, algo, r, trials, seed)
    elapsed = (time.perf_counter() - start) * 1000
    metrics = cut_metrics(h, cut)  # excess recomputed independently at report time
    return RunReport(
        n=h.n_vertices,
        m=h.m,
        k=h.max_arity,
        r=r,
        algorithm=algo,
        seed=seed,
        size=int(metrics.size),
        expected=metrics.expected,
        excess=metrics.excess,
        ledger=ledger,
        runtime_ms=elapsed,
    )


# ----------------------------------------------------------------- commands


def _cmd_gen(args) -> int:
    spec = GenSpec(
        family=args.family,
        n=args.n,
        k=args.k,
        p=args.p if args.p is not None else (args.n ** (3 - args.k) if args.n else 0.0),
        m_target=args.m_target,
        seed=args.seed,
    )
    h = generate(spec)
    text = hgio.serialize(h)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_cut(args) -> int:
    h = hgio.load(args.instance)
    report = run_report(h, args.algo, args.r, args.trials, args.seed)
    for line in report.lines():
        print(line)
    if report.ledger.violations():
        print("error: GuaranteeViolation: deterministic ledger entry failed", file=sys.stderr)
        return 2
    return 0


def _cmd_exact(args) -> int:
    h = hgio.load(args.instance)
    value, cut = exact_maxcut(h, args.r)
    print(value)
    if args.witness:
        print(" ".join(str(p) for p in cut.assignment))
    return 0


def _connected(h: Hypergraph) -> bool:
    if h.n_vertices == 0:
        return True
    parent = list(range(h.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in h.edges:
        for v in e[1:]:
            ra, rb = find(e[0]), find(v)
            if ra != rb:
                parent[ra] = rb
    return len({find(v) for v in range(h.n_vertices)}) == 1


def _cmd_bounds(args) -> int:
    h = hgio.load(args.instance)
    if args.r != 2:
        print("# closed-form excess bounds here apply to 2-cuts only")
        return 0
    prof = degree_profile(h)
    sizes = {len(e) for e in h.edges}
    k_real = max(sizes, default=0)
    printed = []
    if sizes == {2}:
        printed.append(("graph-2cut-m", theorem_bound("graph-2cut-m", m=h.m)))
        if _connected(h):
            printed.append(("connected-graph", theorem_bound("connected-graph", n=h.n_vertices)))
        if all(d > 0 for d in prof.degree):
            printed.append(("nonisolated-graph", theorem_bound("nonisolated-graph", n=h.n_vertices)))
    if sizes == {3}:
        printed.append(("sts-2cut", theorem_bound("sts-2cut", m=h.m)))
        if _connected(h):
            printed.append(("connected-3graph", theorem_bound("connected-3graph", n=h.n_vertices)))
        if all(d > 0 for d in prof.degree):
            printed.append(("nonisolated-3graph", theorem_bound("nonisolated-3graph", n=h.n_vertices)))
    if k_real >= 3:
        n3 = len(h.vertices_in_edges_of_size_at_least(3))
        printed.append(("mixed-2cut-n", theorem_bound("mixed-2cut-n", k=k_real, n=n3)))
        nk = len({v for e in h.edges if len(e) == h.max_arity for v in e})
        printed.append(("mixed-k-edges", theorem_bound("mixed-k-edges", k=h.max_arity, n=nk)))
    for name, value in printed:
        print(f"{name} {value}  # {theorem_bound_claim(name)}")
    return 0


def _parse_vertex_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _cmd_check(args) -> int:
    h = hgio.load(args.instance)
    if args.kind == "monotonicity":
        edge = _parse_vertex_list(args.edge)
        constraints = []
        for spec in args.constraint or []:
            part, level = spec.rsplit(":", 1)
            constraints.append((_parse_vertex_list(part), int(level)))
        res = monotonicity_check(h, args.r, edge, constraints)
        print(f"conditional={res.conditional} base={res.base} verdict={res.verdict}")
        return 0 if res.verdict != "FAIL" else 1
    if args.kind == "moments":
        w = _parse_vertex_list(args.w)
        u, v = _parse_vertex_list(args.pair)
        res = moment_audit(h, w, (u, v), args.samples, args.seed)
        print(
            f"variance={res.variance:.6f} kurtosis={res.kurtosis:.6f} "
            f"g_uv={res.g_uv} verdict={res.verdict}"
        )
        return 0 if res.verdict != "FAIL" else 1
    if args.kind == "goodness":
        parts = [set(_parse_vertex_list(p)) for p in args.parts.split(";") if p.strip()]
        covered = set().union(*parts) if parts else set()
        rep = goodness_audit(h, h, parts, covered)
        print(
            f"within_pair_edges={rep.within_pair_edges} "
            f"max_within_degree={rep.max_within_degree} "
            f"spread_violations={len(rep.violations_spread)} "
            f"witness_violations={len(rep.violations_witness)}"
        )
        return 0
    raise HypercutError(f"unknown check kind {args.kind!r}")


# ----------------------------------------------------------------- sweep


def _sweep_instance(family: str, n: int, k: int, p, m_target, seed: int) -> Hypergraph:
    if family == "sts":
        return generate(GenSpec(family="sts", n=n))
    if family == "matching":
        return generate(GenSpec(family="matching", n=n, k=k))
    if family == "complete":
        return generate(GenSpec(family="complete", n=n, k=k))
    if family == "random":
        prob = p if p is not None else n ** (3 - k)
        return generate(GenSpec(family="random", n=n, k=k, p=prob, seed=seed))
    if family == "linear-random":
        target = m_target if m_target else 2 * n
        return generate(GenSpec(family="linear-random", n=n, k=k, m_target=target, seed=seed))
    raise HypercutError(f"unknown family {family!r}")


def experiment_sweep(config: dict) -> list[dict]:
    """Run the (family, n, algo) grid; one row per run plus slope summaries.

    The returned rows follow the CSV schema
    family,n,m,k,r,seed,algo,size,expected,excess,guarantee,runtime_ms.
    Rows are computed with per-row derived seeds, so results do not
    depend on execution order; HYPERCUT_THREADS caps worker threads.
    """
    family_list = config["families"]
    sizes = config["sizes"]
    algos = config["algos"]
    r = config["r"]
    trials = config.get("trials", 16)
    seed = config.get("seed", 0)
    k = config.get("k", 3)
    p = config.get("p")
    m_target = config.get("m_target")

    grid = [
        (family, n, algo)
        for family in family_list
        for n in sizes
        for algo in algos
    ]

    def one(job):
        family, n, algo = job
        digest = hashlib.sha256(f"{seed}:{family}:{n}:{algo}".encode()).digest()
        row_seed = int.from_bytes(digest[:4], "big")
        h = _sweep_instance(family, n, k, p, m_target, row_seed)
        report = run_report(h, algo, r, trials, row_seed)
        det = [
            e.promised
            for e in report.ledger.entries
            if e.deterministic and e.promised is not None and e.scope == "instance"
        ]
        return {
            "family": family,
            "n": str(n),
            "m": str(report.m),
            "k": str(report.k),
            "r": str(r),
            "seed": str(row_seed),
            "algo": algo,
            "size": str(report.size),
            "expected": str(report.expected),
            "excess": str(report.excess),
            "guarantee": str(max(det)) if det else "",
            "runtime_ms": f"{report.runtime_ms:.1f}",
        }

    workers = max(1, int(os.environ.get("HYPERCUT_THREADS", "1")))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, grid))
    else:
        rows = [one(job) for job in grid]

    for algo in algos:
        pts = [
            (math.log(int(row["m"])), math.log(float(Fraction(row["excess"]))))
            for row in rows
            if row["algo"] == algo and Fraction(row["excess"]) > 0
        ]
        slope = ""
        if len(pts) >= 2:
            xbar = sum(x for x, _ in pts) / len(pts)
            ybar = sum(y for _, y in pts) / len(pts)
            denom = sum((x - xbar) ** 2 for x, _ in pts)
            if denom > 0:
                slope = f"{sum((x - xbar) * (y - ybar) for x, y in pts) / denom:.4f}"
        rows.append(
            {
                "family": "slope-summary",
                "n": "",
                "m": "",
                "k": "",
                "r": str(r),
                "seed": str(seed),
                "algo": algo,
                "size": "",
                "expected": "",
                "excess": slope,
                "guarantee": "",
                "runtime_ms": "",
            }
        )
    return rows


CSV_COLUMNS = [
    "family",
    "n",
    "m",
    "k",
    "r",
    "seed",
    "algo",
    "size",
    "expected",
    "excess",
    "guarantee",
    "runtime_ms",
]


def _cmd_sweep(args) -> int:
    config = {
        "families": args.families.split(","),
        "sizes": [int(x) for x in args.sizes.split(",")] if args.sizes else [],
        "algos": args.algos.split(","),
        "r": args.r,
        "trials": args.trials,
        "seed": args.seed,
        "k": args.k,
        "p": args.p,
        "m_target": args.m_target,
    }
    rows = experiment_sweep(config)
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(row[c] for c in CSV_COLUMNS))
    text = "\n".join(lines) + "\n"
    try:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: unwritable output: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypercut",
        description="r-cuts of k-uniform multihypergraphs beating the uniform-random baseline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance")
    gen.add_argument("--family", required=True,
                     choices=["sts", "random", "matching", "complete", "linear-random"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, default=3)
    gen.add_argument("--p", type=float, default=None)
    gen.add_argument("--m-target", type=int, default=0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output", default=None)
    gen.set_defaults(fn=_cmd_gen)

    cut = sub.add_parser("cut", help="compute a cut with its guarantee report")
    cut.add_argument("instance")
    cut.add_argument("--algo", default="auto",
                     choices=["auto", "es", "greedy", "chromatic", "pipeline"])
    cut.add_argument("--r", type=int, default=2)
    cut.add_argument("--seed", type=int, default=0)
    cut.add_argument("--trials", type=int, default=32)
    cut.set_defaults(fn=_cmd_cut)

    exact = sub.add_parser("exact", help="exact max-cut by enumeration (small n)")
    exact.add_argument("instance")
    exact.add_argument("--r", type=int, default=2)
    exact.add_argument("--witness", action="store_true")
    exact.set_defaults(fn=_cmd_exact)

    bounds = sub.add_parser("bounds", help="print applicable closed-form excess bounds")
    bounds.add_argument("instance")
    bounds.add_argument("--r", type=int, default=2)
    bounds.set_defaults(fn=_cmd_bounds)

    check = sub.add_parser("check", help="exact/statistical audits")
    check.add_argument("instance")
    check.add_argument("--kind", required=True, choices=["monotonicity", "moments", "goodness"])
    check.add_argument("--r", type=int, default=2)
    check.add_argument("--edge", default="")
    check.add_argument("--constraint", action="append")
    check.add_argument("--w", default="")
    check.add_argument("--pair", default="")
    check.add_argument("--samples", type=int, default=100_000)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--parts", default="")
    check.set_defaults(fn=_cmd_check)

    sweep = sub.add_parser("sweep", help="CSV experiment grid")
    sweep.add_argument("--families", required=True)
    sweep.add_argument("--sizes", required=True)
    sweep.add_argument("--algos", default="auto")
    sweep.add_argument("--r", type=int, default=2)
    sweep.add_argument("--trials", type=int, default=16)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--k", type=int, default=3)
    sweep.add_argument("--p", type=float, default=None)
    sweep.add_argument("--m-target", type=int, default=None)
    sweep.add_argument("-o", "--output", required=True)
    sweep.set_defaults(fn=_cmd_sweep)

    return parser


def run_command(argv=None) -> int:
    """Entry point; see ``main``."""
    return main(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.fn(args)
    except (GuaranteeViolation, CertificateError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except HypercutError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
