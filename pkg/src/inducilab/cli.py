"""Command-line interface.

Every report is a JSON document ``{"schema_version", "manifest", "result"}``;
the manifest records the command line, the full parameter set, the seed, the
toolkit version, timestamps and the worker count, and ``inducilab replay``
re-runs it and compares verdicts and counts.  Sweeps write CSV.

Exit codes: 0 all checks pass, 1 a check fails, 2 a check was skipped,
64 usage error, 65 malformed input data, 69 a capacity limit was hit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from contextlib import redirect_stdout
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import mpmath

from . import __version__, config, graph6
from .blowup import (
    BlowupTree,
    LeafPolicy,
    balanced_iterated_tree,
    blowup_from_sizes,
    build_blowup,
    classify_embeddings,
    count_into_blowup,
    optimize_partition,
    tree_from_json,
)
from .bounds import check_preconditions, epsilon_ledger
from .cayley import CayleyGraph, cayley, random_cayley, rotations_reflections
from .certify import (
    check_iv_prime_variant,
    check_reasonable,
    check_typical,
    cond_i_witness_fails,
    cond_ii_witness_fails,
    homogeneous_pair_witness_fails,
    homogeneous_side,
    partial_iso_witness_fails,
    reasonable_b_witness_fails,
    typicality_sweep,
)
from .embed import count_automorphisms, count_embeddings
from .errors import CapacityError, DomainError, Graph6Error, StructuralError
from .graph import Graph, is_prime
from .groups import AbelianGroup

SCHEMA_VERSION = 1

EXIT_PASS, EXIT_FAIL, EXIT_SKIPPED = 0, 1, 2
EXIT_USAGE, EXIT_DATA, EXIT_CAPACITY = 64, 65, 69


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; 2 means "skipped" here, so use 64."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    params: dict
    seed: int | None
    version: str = __version__
    workers: int = 1
    started: str = ""
    finished: str = ""
    log_base: str = "e"
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


# ---------------------------------------------------------------------------
# argument helpers


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < p < 1:
        raise argparse.ArgumentTypeError(f"p must lie strictly between 0 and 1, got {p}")
    return p


def _big(text: str) -> int | tuple[int, int]:
    """An integer, or a power written as 10^200 / 10**200."""
    m = re.fullmatch(r"\s*(\d+)\s*(?:\^|\*\*)\s*(\d+)\s*", text)
    if m:
        return (int(m.group(1)), int(m.group(2)))
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a power like 10^200, got {text!r}")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational like 1e-20 or 1/3, got {text!r}")


_NAMED = re.compile(r"([CKPE])(\d+)")


def load_graph(spec: str) -> Graph | CayleyGraph:
    """Named graph (C5, K4, P4, E3), ``g6:<graph6>``, a .g6 file, or a JSON file
    holding a Cayley graph, a plain graph, or a blow-up tree."""
    m = _NAMED.fullmatch(spec)
    if m:
        kind, n = m.group(1), int(m.group(2))
        if n < 1:
            raise UsageError(f"graph {spec!r} needs at least one vertex")
        if kind == "C":
            if n < 3:
                raise UsageError("cycles need at least 3 vertices")
            return cayley([n], [1, n - 1])
        if kind == "K":
            return cayley([n], range(1, n))
        if kind == "E":
            return cayley([n], [])
        return Graph.path(n)
    if spec.startswith("g6:"):
        return graph6.decode(spec[3:])
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"no such graph or file: {spec!r}")
    if path.suffix == ".g6":
        graphs = graph6.read_file(path)
        if not graphs:
            raise Graph6Error(f"{spec}: no graphs")
        return graphs[0]
    data = json.loads(path.read_text())
    if isinstance(data, dict) and "result" in data and "manifest" in data:
        data = data["result"]
    if isinstance(data, dict) and "group" in data and "lambda" in data:
        return CayleyGraph.from_json(data)
    if isinstance(data, dict) and ("leaf" in data or "base" in data):
        return build_blowup(tree_from_json(data))
    return Graph.from_json(data)


def _plain(G: Graph | CayleyGraph) -> Graph:
    return G.graph if isinstance(G, CayleyGraph) else G


def _cayley_only(G, what: str) -> CayleyGraph:
    if not isinstance(G, CayleyGraph):
        raise UsageError(f"{what} must be a Cayley graph (JSON from `sample` or a named C/K/E graph)")
    return G


def _leaf_policy(name: str, H: Graph) -> LeafPolicy:
    return LeafPolicy.empty_graph() if name == "empty" else LeafPolicy.emb_maximizer(H)


def _exit_for(status: str) -> int:
    return {"Pass": EXIT_PASS, "Fail": EXIT_FAIL, "Skipped": EXIT_SKIPPED}[status]


# ---------------------------------------------------------------------------
# commands; each returns (result dict, exit code)


def cmd_sample(args) -> tuple[dict, int]:
    G = AbelianGroup(tuple(args.factors))
    H = random_cayley(G, args.p, args.seed)
    art = H.to_json()
    g6 = graph6.encode(H.graph)
    if args.out_prefix:
        Path(f"{args.out_prefix}.json").write_text(json.dumps(art, sort_keys=True, indent=2) + "\n")
        Path(f"{args.out_prefix}.g6").write_text(g6 + "\n")
    art = dict(art, graph6=g6, order=H.order, degree=len(H.connection_set.members))
    return art, EXIT_PASS


def _replay_witnesses(Ht: CayleyGraph, report: dict, params: dict) -> dict:
    q0, delta0 = params["q0"], params["delta0"]
    side = params.get("side") or homogeneous_side(Ht.order)
    maps = sorted({m.images for m in rotations_reflections(Ht.group)})
    k = Ht.order
    min_size = math.ceil((1 - delta0) * k - 1e-12)
    out = {}
    for name, v in report["conditions"].items():
        if v["verdict"] != "Fail":
            continue
        w = v["witness"]
        if name == "i":
            ok = cond_i_witness_fails(Ht, q0, int(w))
        elif name == "ii":
            ok = cond_ii_witness_fails(Ht, q0, tuple(w))
        elif name == "iii":
            kind, (X, Y) = w
            ok = homogeneous_pair_witness_fails(Ht.graph, side, (kind, (frozenset(X), frozenset(Y))))
        elif name in ("iv", "iv_prime"):
            f = {int(a): int(b) for a, b in w}
            need = None if name == "iv" else math.ceil((1 - 2 * delta0) * k - 1e-12)
            ok = partial_iso_witness_fails(Ht.graph, maps, f, min_size, need)
        else:
            continue
        out[name] = ok
    return out


def _replay_reasonable(Ht: CayleyGraph, report: dict, h_vertices) -> dict:
    if not h_vertices:
        raise UsageError("replaying a reasonableness report needs the H vertex set")
    from .graph import to_mask

    maps = sorted({m.images for m in rotations_reflections(Ht.group)})
    k = len(set(h_vertices))
    out = {}
    for name, v in report["conditions"].items():
        if v["verdict"] != "Fail":
            continue
        w = v["witness"]
        if name == "a":
            U = to_mask(w)
            Hv = to_mask(h_vertices)
            # a module of H: every vertex of H outside U is complete or empty to U
            ok = 2 <= len(w) < k and (U & ~Hv) == 0 and all(
                (Ht.graph.adj[x] & U) in (0, U) for x in range(Ht.order) if (Hv >> x) & 1 and not (U >> x) & 1)
        elif name == "b":
            ok = reasonable_b_witness_fails(Ht, h_vertices, report["q"], tuple(w))
        elif name == "c":
            f = {int(a): int(b) for a, b in w}
            ok = set(f) <= set(h_vertices) and partial_iso_witness_fails(
                Ht.graph, maps, f, math.ceil((1 - report["delta"]) * k - 1e-12))
        else:
            continue
        out[name] = ok
    return out


def cmd_check(args) -> tuple[dict, int]:
    Ht = _cayley_only(load_graph(args.cayley), "the checked graph")
    if args.replay:
        stored = json.loads(Path(args.replay).read_text())
        params = stored.get("manifest", {}).get("params", {})
        rep = stored.get("result", stored)
        if "reasonable" in rep:
            res = _replay_reasonable(Ht, rep["reasonable"], params.get("h_vertices") or args.h_vertices)
        else:
            params = {"q0": params.get("q0", args.q0), "delta0": params.get("delta0", args.delta0),
                      "side": params.get("side", args.side)}
            if "typicality" in rep:
                rep = rep["typicality"]
            elif "iv_prime" in rep:
                rep = {"conditions": {"iv_prime": rep["iv_prime"]}}
            res = _replay_witnesses(Ht, rep, params)
        return {"replayed": res, "all_revalidate": all(res.values())}, (
            EXIT_PASS if all(res.values()) else EXIT_FAIL)
    if args.h_vertices is not None:
        q = args.q if args.q is not None else args.q0
        delta = args.delta if args.delta is not None else args.delta0
        r = check_reasonable(Ht, args.h_vertices, q, delta, budget_ms=args.budget_ms)
        return {"reasonable": r.to_json()}, _exit_for(r.overall)
    if args.variant == "iv-prime":
        v = check_iv_prime_variant(Ht, args.delta0, args.q0, budget_ms=args.budget_ms)
        return {"iv_prime": v.to_json()}, _exit_for(v.status)
    r = check_typical(Ht, args.q0, args.delta0, budget_ms=args.budget_ms, side=args.side)
    return {"typicality": r.to_json()}, _exit_for(r.overall)


def cmd_count(args) -> tuple[dict, int]:
    H, G = _plain(load_graph(args.H)), _plain(load_graph(args.Gamma))
    emb = count_embeddings(H, G)
    aut = count_automorphisms(H)
    ind, r = divmod(emb, aut)
    assert r == 0
    return {"H": graph6.encode(H), "Gamma": graph6.encode(G), "emb": emb, "aut": aut, "ind": ind}, EXIT_PASS


def cmd_blowup(args) -> tuple[dict, int]:
    base = load_graph(args.base)
    B = _plain(base)
    H = _plain(load_graph(args.H)) if args.H else B
    policy = _leaf_policy(args.leaf, H)
    if args.sizes:
        spec = blowup_from_sizes(B, args.sizes, policy)
    else:
        if args.n is None:
            raise UsageError("give --n or --sizes")
        spec = balanced_iterated_tree(B, args.n, policy)
    if isinstance(spec, BlowupTree):
        res = {"tree": spec.to_json(), "size": spec.size, "part_sizes": spec.part_sizes,
               "balanced": spec.is_balanced(), "depth": spec.depth()}
    else:
        res = {"tree": spec.to_json(), "size": spec.size}
    G = build_blowup(spec)
    res["graph6"] = graph6.encode(G)
    if args.out_prefix:
        Path(f"{args.out_prefix}.json").write_text(json.dumps(spec.to_json(), sort_keys=True) + "\n")
        Path(f"{args.out_prefix}.g6").write_text(res["graph6"] + "\n")
    if args.count and isinstance(spec, BlowupTree):
        rec = count_into_blowup(H, base, spec)
        res["count"] = {"H": graph6.encode(H), "recursive": rec, "prime": is_prime(H)[0]}
        if G.n <= args.direct_cap:
            direct = count_embeddings(H, G)
            res["count"]["direct"] = direct
            if direct != rec:
                return res, EXIT_FAIL
        if args.classify:
            s = classify_embeddings(H, base, spec)
            res["classification"] = {"total": s.total, "in_part": s.in_part, "follows_map": s.follows_map,
                                     "violations": [[list(t), v.reason] for t, v in s.violations]}
    return res, EXIT_PASS


def cmd_optimize(args) -> tuple[dict, int]:
    base = load_graph(args.base)
    H = _plain(load_graph(args.H)) if args.H else _plain(base)
    res = optimize_partition(H, base, args.n, _leaf_policy(args.leaf, H), symmetric=args.symmetric,
                             workers=args.workers, leaf_cap=args.leaf_cap)
    res["maximizers"] = [{"sizes": m["sizes"], "T": m["T"]} for m in res["maximizers"]]
    return res, EXIT_PASS


def cmd_verify_suite(args) -> tuple[dict, int]:
    from .suite import SUITES, run_suites

    if args.only:
        unknown = [k for k in args.only if k not in SUITES]
        if unknown:
            raise UsageError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    results = run_suites(quick=args.quick, seed=args.seed, only=args.only)
    matrix = {r.key: ("pass" if r.ok else "fail") for r in results}
    res = {"quick": args.quick, "matrix": matrix, "suites": [r.to_json() for r in results],
           "all_pass": all(r.ok for r in results)}
    return res, EXIT_PASS if res["all_pass"] else EXIT_FAIL


def cmd_sweep(args) -> tuple[dict, int]:
    buf = io.StringIO()
    if args.kind == "typicality":
        rows = typicality_sweep(args.ktilde, args.p, args.samples, seed=args.seed, q0=args.q0,
                                delta0=args.delta0, alpha=args.alpha, budget_ms=args.budget_ms)
        dict_rows = [r.to_csv_row() for r in rows]
        for r in dict_rows:
            for c in ("i", "ii", "iii", "iv"):
                r[f"freq_{c}"] = round(r[f"pass_{c}"] / r["samples"], 6) if r["samples"] else 0.0
    else:
        qs = args.q_grid or [10.0 ** (-e) for e in range(2, 31, 2)]
        k = args.k if args.k is not None else (10, 200)
        dict_rows = []
        for q in qs:
            led = epsilon_ledger(Fraction(q), k)
            row = {"q": q}
            for i, (lo, hi) in enumerate(led.eps_log10, 1):
                row[f"eps{i}"] = mpmath.nstr(mpmath.power(10, mpmath.mpf(lo)), 10)
            row["verdict_bitmap"] = led.verdict_bitmap()
            row["all_hold"] = led.all_hold
            dict_rows.append(row)
    if dict_rows:
        w = csv.DictWriter(buf, fieldnames=list(dict_rows[0]))
        w.writeheader()
        w.writerows(dict_rows)
    text = buf.getvalue()
    if args.csv:
        Path(args.csv).write_text(text)
    return {"rows": len(dict_rows), "csv": text if not args.csv else args.csv}, EXIT_PASS


def cmd_ledger(args) -> tuple[dict, int]:
    led = epsilon_ledger(args.q, args.k, args.delta)
    return led.to_json(), EXIT_PASS if led.all_hold else EXIT_FAIL


def cmd_preconditions(args) -> tuple[dict, int]:
    rep = check_preconditions(args.ktilde, args.p, k=args.k, k_deficit=args.k_deficit, q=args.q,
                              delta=args.delta)
    return rep.to_json(), EXIT_PASS if rep.all_hold else EXIT_FAIL


_VOLATILE = {"elapsed_ms", "elapsed_s", "witness", "reason", "started", "finished"}


def _stable(x):
    if isinstance(x, dict):
        return {k: _stable(v) for k, v in x.items() if k not in _VOLATILE}
    if isinstance(x, list):
        return [_stable(v) for v in x]
    return x


def cmd_replay(args) -> tuple[dict, int]:
    stored = json.loads(Path(args.report).read_text())
    man = stored["manifest"]
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(man["argv"] + ["--no-manifest"])
    fresh = json.loads(buf.getvalue())
    same = _stable(fresh) == _stable(stored.get("result", stored))
    return {"command": man["command"], "reproduced": same, "exit_code": code}, EXIT_PASS if same else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed for every random substream")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: $INDUCILAB_WORKERS or 1)")
    common.add_argument("--log-base", choices=sorted(config.LOG_BASES), default="e",
                        help="base of every logarithm in thresholds (default e)")
    common.add_argument("--budget-ms", type=float, default=10_000, help="time budget per search")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--no-manifest", action="store_true", help=argparse.SUPPRESS)

    p = _Parser(prog="inducilab", description="Inducibility toolkit for Cayley graphs of abelian groups.")
    p.add_argument("--version", action="version", version=f"inducilab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", parents=[common], help="sample a random Cayley graph")
    s.add_argument("--factors", type=_int_list, required=True, help="cyclic factor orders, e.g. 5 or 2,4")
    s.add_argument("--p", type=_probability, required=True)
    s.add_argument("--out-prefix", help="also write PREFIX.json (Cayley descriptor) and PREFIX.g6")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("check", parents=[common], help="typicality / reasonableness of a Cayley graph")
    s.add_argument("cayley", help="Cayley JSON or a named graph (C5, K5, E5)")
    s.add_argument("--q0", type=float, default=0.1)
    s.add_argument("--delta0", type=float, default=0.1)
    s.add_argument("--q", type=float)
    s.add_argument("--delta", type=float)
    s.add_argument("--side", type=int, help="override the homogeneous-pair side length")
    s.add_argument("--variant", choices=["all", "iv-prime"], default="all")
    s.add_argument("--h-vertices", type=_int_list, help="check reasonableness of this induced subgraph")
    s.add_argument("--replay", help="re-verify the witnesses stored in a previous check report")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("count", parents=[common], help="emb, aut and induced copies")
    s.add_argument("H")
    s.add_argument("Gamma")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("blowup", parents=[common], help="build a (balanced iterated) blow-up")
    s.add_argument("--base", required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--sizes", type=_int_list, help="explicit top-level part sizes")
    s.add_argument("--leaf", choices=["empty", "maximizer"], default="empty")
    s.add_argument("--H", help="pattern graph for counting and the maximizer leaf policy (default: base)")
    s.add_argument("--count", action="store_true", help="count embeddings of H into the blow-up")
    s.add_argument("--classify", action="store_true", help="classify every embedding (part / map / violation)")
    s.add_argument("--direct-cap", type=int, default=400, help="largest blow-up counted directly as a cross-check")
    s.add_argument("--out-prefix")
    s.set_defaults(func=cmd_blowup)

    s = sub.add_parser("optimize", parents=[common], help="maximize T over part-size vectors")
    s.add_argument("--base", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--H")
    s.add_argument("--leaf", choices=["empty", "maximizer"], default="maximizer")
    s.add_argument("--symmetric", action="store_true", help="only non-increasing size vectors")
    s.add_argument("--leaf-cap", type=int, default=8, help="largest exhaustively optimized leaf")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("verify-suite", parents=[common], help="run every invariant suite")
    s.add_argument("--quick", action="store_true")
    s.add_argument("--only", type=lambda t: t.split(","), help="comma-separated suite keys")
    s.set_defaults(func=cmd_verify_suite)

    s = sub.add_parser("sweep", parents=[common], help="Monte Carlo typicality or epsilon-ledger CSV")
    s.add_argument("--kind", choices=["typicality", "epsilon"], default="typicality")
    s.add_argument("--ktilde", type=_int_list, default=[11, 13, 17])
    s.add_argument("--p", type=_float_list, default=[0.5])
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--q0", type=float)
    s.add_argument("--delta0", type=float)
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--q-grid", type=_float_list, help="q values for --kind epsilon")
    s.add_argument("--k", type=_big, help="k for --kind epsilon (default 10^200)")
    s.add_argument("--csv", help="write the CSV here (default: embed it in the report)")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("ledger", parents=[common], help="the five epsilon parameters and their inequalities")
    s.add_argument("--q", type=_rational, required=True)
    s.add_argument("--k", type=_big, required=True)
    s.add_argument("--delta", type=_rational)
    s.set_defaults(func=cmd_ledger)

    s = sub.add_parser("preconditions", parents=[common], help="theorem parameter hypotheses in log-space")
    s.add_argument("--ktilde", type=_big, required=True)
    s.add_argument("--p", type=_rational, required=True)
    s.add_argument("--k", type=_big)
    s.add_argument("--k-deficit", type=int, default=0)
    s.add_argument("--q", type=_rational)
    s.add_argument("--delta", type=_rational)
    s.set_defaults(func=cmd_preconditions)

    s = sub.add_parser("replay", parents=[common], help="re-run a report's manifest and compare")
    s.add_argument("report")
    s.set_defaults(func=cmd_replay)
    return p


def _params(args) -> dict:
    skip = {"func", "out", "no_manifest", "command"}
    out = {}
    for k, v in vars(args).items():
        if k in skip:
            continue
        if isinstance(v, Fraction):
            v = str(v)
        elif isinstance(v, tuple):
            v = list(v)
        out[k] = v
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is None:
        args.workers = config.default_workers()
    if args.workers < 1:
        parser.error("--workers must be at least 1")
    config.set_log_base(args.log_base)
    started = _now()
    try:
        result, code = args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"inducilab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (Graph6Error, StructuralError, json.JSONDecodeError, KeyError) as exc:
        print(f"inducilab: bad input: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CapacityError as exc:
        print(f"inducilab: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    finally:
        config.set_log_base("e")
    if args.command == "sample" or args.no_manifest:
        doc = result
    else:
        clean_argv = [a for a in argv if a != "--no-manifest"]
        if args.out:
            i = clean_argv.index("--out") if "--out" in clean_argv else None
            if i is not None:
                del clean_argv[i:i + 2]
            clean_argv = [a for a in clean_argv if not a.startswith("--out=")]
        man = RunManifest(args.command, clean_argv, _params(args), args.seed, workers=args.workers,
                          started=started, finished=_now(), log_base=args.log_base)
        doc = {"schema_version": SCHEMA_VERSION, "manifest": man.to_json(), "result": result}
    text = json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
