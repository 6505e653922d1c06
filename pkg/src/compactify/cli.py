"""``compactify`` command line: ends, transfer, perspective, pruefer, sumcheck.

Reports are JSON on stdout (DOT for ``ends --format dot``); diagnostics go to
stderr.  Exit status: 0 all checks pass, 1 counterexample, 2 inconclusive,
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .ends import ends_classification
from .errors import CompactifyError, InconclusiveError, PreconditionError, UnsupportedExpression
from .graph_core import build_builtin, free_action, lattice_action, load_graph, translation_action, z_k
from .perspectivity import encode_points, euclidean_lemma_check, model_for, perspectivity_scan
from .setexpr import EVERYTHING, ComponentCone, Finite, SetExpr, from_json
from .spaces import integers_space, ladder_space, line_space, space_for
from .sum_of_spaces import (
    compactness_check,
    ends_stage_map,
    eval_map,
    hausdorff_check,
    is_dense,
    one_point_map,
    region_map,
    table_map,
    verify_admissible,
)
from .verdict import FAIL, PASS, UNKNOWN, Verdict, jsonable
from . import pruefer as pr
from . import transfer as tr

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"{path}: no such file")
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}")


def _exit_code(verdicts: Sequence[Verdict]) -> int:
    statuses = {v.status for v in verdicts}
    if FAIL in statuses:
        return EXIT_COUNTEREXAMPLE
    if UNKNOWN in statuses:
        return EXIT_UNKNOWN
    return EXIT_OK


def _config(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


# -- ends -------------------------------------------------------------------


def run_ends(args) -> tuple[dict | str, int]:
    if args.graph_file:
        graph = load_graph(_load_json(args.graph_file))
    else:
        try:
            graph = build_builtin(args.graph, args.params)
        except CompactifyError as e:
            raise UsageError(str(e))
    cls = ends_classification(graph, args.max_radius)
    dot = cls.system.to_dot()
    if args.format == "dot":
        return dot, EXIT_OK
    table = [
        {"radius": r + 1, "K_size": len(st.K), "unbounded": len(st.unbounded_ids), "components": len(st.components)}
        for r, st in enumerate(cls.system.stages)
    ]
    report = {"graph": graph.label, **cls.to_json(), "stages": table, "dot": dot}
    if args.format == "text":
        return f"{graph.label}: {cls}\n", EXIT_OK
    return report, EXIT_OK


# -- transfer ---------------------------------------------------------------


def _group_map(name: str, sets: Sequence[SetExpr]):
    if name in ("three-point", "3-point", "residue"):
        return tr.residue_map(3, sets)
    if name in ("two-ends", "ends"):
        return tr.two_ends_map(None, sets)
    if name in ("one-point",):
        return tr.one_point_group_map(sets)
    raise UsageError(f"unknown boundary map {name!r}")


def _integer_space(name: str):
    if name == "line":
        return line_space()
    if name == "ladder":
        return ladder_space()
    raise UsageError(f"transfer supports the line and the ladder, not {name!r}")


def run_transfer(args) -> tuple[dict, int]:
    spec = _load_json(args.spec) if args.spec else {}
    name = spec.get("map", args.map)
    space_name = spec.get("space", args.space)
    X = _integer_space(space_name)
    default_K = [0, 1] if space_name == "ladder" else [0, 1, 2, 3]
    K = spec.get("K", args.K or default_K)
    step = X.step
    action = translation_action(step, K, args.bound)
    sets = [from_json(s) for s in spec["sets"]] if "sets" in spec else tr.group_corpus()
    d = _group_map(name, sets)
    rows = [tr.roundtrip_check(d, F, action, X).to_json() for F in sets]
    formula = Verdict(PASS if all(r["equal"] for r in rows) else FAIL, "roundtrip-formula", {})
    recovery = Verdict(PASS if all(r["recovers"] for r in rows) else FAIL, "roundtrip-identity", {
        "non_recovered": [r["F"] for r in rows if not r["recovers"]],
    })
    qp = tr.quasi_perspectivity_check(d, args.bound, sets)
    there = tr.transfer_G_to_X(d, action, X, tr.space_corpus(X))
    report = {
        "map": d.label,
        "space": X.name,
        "K": sorted(K),
        "Z_K": sorted(action.exponent(w) for w in z_k(action)),
        "roundtrip": rows,
        "transferred": there.to_json(),
        "verdicts": [formula.to_json(), recovery.to_json(), qp.to_json()],
    }
    if args.hausdorff:
        h = hausdorff_check(there, args.budget)
        report["verdicts"].append(h.to_json())
    return report, _exit_code([formula, recovery, qp])


# -- perspective ------------------------------------------------------------


def run_perspective(args) -> tuple[dict, int]:
    model = model_for(args.model, args.degree)
    if model.kind == "euclidean-plane":
        v = euclidean_lemma_check(args.samples, args.tolerance, args.seed)
        return {"model": model.kind, "verdict": v.to_json()}, _exit_code([v])
    if args.K:
        raw = _load_json(args.K)
    else:
        raw = [[0, 0], [3, 0]] if model.kind == "grid-embedding" else [0, 1]
    if model.kind == "grid-embedding":
        K = encode_points([tuple(p) for p in raw])
        action = lattice_action(2, K)
        bound = args.bound or 50
    else:
        K = [int(v) for v in raw]
        if args.degree % 2:
            raise UsageError("tree-metric scans need an even degree (free group of rank degree/2)")
        action = free_action(args.degree // 2, K)
        bound = args.bound or 6
    viol, verdict = perspectivity_scan(action, K, model, args.r, args.epsilon, bound, args.bound2)
    d = verdict.detail
    report = {
        "model": model.kind,
        "violators": d["violators"],
        "verdict": "finite" if verdict.passed else "inconclusive",
        "threshold": d["threshold"],
        "certificate": {k: d[k] for k in ("stable", "within_threshold", "outer_ring_distance", "bounds", "diameter")},
    }
    return report, _exit_code([verdict])


# -- pruefer ----------------------------------------------------------------

SUITES = ("partition", "admissibility", "compactness", "invariance", "lemma", "bonding", "hausdorff")


def pruefer_suite(n: int, k: int, suite: str, seed: int = 0, bound: int = 10, lemma_bound: int = 8,
                  pairs: Sequence[tuple[int, int]] = ((4, 2), (6, 3), (6, 2)), size: int = 20,
                  trials: int = 50) -> list[Verdict]:
    names = SUITES if suite == "all" else (suite,)
    out: list[Verdict] = []
    infinite = pr.corpus(n, size, seed)
    mixed = infinite + pr.corpus(n, size // 2, seed + 1, infinite=False)
    for name in names:
        if name == "partition":
            out.append(pr.partition_check(k, n, bound))
        elif name == "admissibility":
            out.append(pr.admissibility(k, n, mixed, seed))
        elif name == "compactness":
            out.append(compactness_check(pr.f_k_map(k, n), infinite))
        elif name == "invariance":
            rng = random.Random(seed)
            bad = None
            for _ in range(trials):
                v = pr.action_invariance_check(pr.random_element(rng, n), pr.random_set(rng, n), k)
                if not v.passed:
                    bad = v
                    break
            out.append(bad or Verdict(PASS, "action-invariance", {"pairs": trials}))
        elif name == "lemma":
            out.append(pr.lemma_sweep(n, lemma_bound)[1])
        elif name == "bonding":
            for k1, k2 in pairs:
                out.append(pr.bonding_continuity_check(k1, k2, infinite, n))
        elif name == "hausdorff":
            out.append(pr.hausdorff_witnesses(k, n)[1])
    return out


def _pairs(text: str) -> list[tuple[int, int]]:
    try:
        return [tuple(int(x) for x in p.split(":")) for p in text.split(",") if p]
    except ValueError:
        raise UsageError(f"bonding pairs must look like 4:2,6:3 (got {text!r})")


def run_pruefer(args) -> tuple[dict, int]:
    verdicts = pruefer_suite(args.n, args.k, args.suite, args.seed, args.bound, args.lemma_bound, _pairs(args.pairs))
    return {"n": args.n, "k": args.k, "verdicts": [v.to_json() for v in verdicts]}, _exit_code(verdicts)


# -- sumcheck ---------------------------------------------------------------


def build_map(spec: dict):
    """Boundary map from a JSON description; see ``specs/`` for examples."""
    kind = spec.get("kind", "table")
    sp = spec.get("space", "Z")
    if sp == "Z":
        space, graph = integers_space(), None
    else:
        graph = build_builtin(sp["graph"], sp.get("params", []))
        space = space_for(graph)
    gens = [from_json(g) for g in spec.get("generators", [])]
    if kind == "ends-stage":
        if graph is None:
            graph = build_builtin("line")
        labels = {int(k): v for k, v in spec.get("labels", {}).items()}
        K = spec["K"]
        radius = spec.get("radius", max(abs(v) for v in K) + 2)
        if not gens:
            gens = [Finite(K), EVERYTHING] + [ComponentCone(K, c) for c in labels]
        return ends_stage_map(graph, K, radius, None, gens, labels)
    if kind == "regions":
        regions = {y: from_json(r) for y, r in spec["regions"].items()}
        return region_map(space, regions, gens, spec.get("left_action"), spec.get("label", "f"))
    if kind == "one-point":
        return one_point_map(space, gens)
    if kind == "residue":
        return tr.residue_map(spec.get("m", 3), gens or None)
    if kind == "table":
        return table_map(space, spec["codomain"], [(from_json(r["gen"]), r["value"]) for r in spec["table"]], spec.get("label", "f"))
    raise UsageError(f"unknown map kind {kind!r}")


def run_sumcheck(args) -> tuple[dict, int]:
    spec = _load_json(args.map)
    f = build_map(spec)
    names = ("admissible", "hausdorff", "compactness", "density") if args.suite == "all" else (args.suite,)
    verdicts: list[Verdict] = []
    for name in names:
        if name == "admissible":
            verdicts.append(verify_admissible(f, None, args.seed))
        elif name == "hausdorff":
            verdicts.append(hausdorff_check(f, args.budget))
        elif name == "compactness":
            noncompact = [g for g in f.generators if not f.space.is_finite(g)]
            verdicts.append(compactness_check(f, noncompact))
        elif name == "density":
            dense = is_dense(f)
            verdicts.append(Verdict(PASS if dense else FAIL, "density", {"f(X)": eval_map(f, f.space.universe_expr())}))
    return {"map": f.label, "codomain": list(f.codomain), "verdicts": [v.to_json() for v in verdicts]}, _exit_code(verdicts)


# -- wiring -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="compactify", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"compactify {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("ends", help="end counts and the stage system of a graph")
    e.add_argument("--graph", default="line")
    e.add_argument("--graph-file")
    e.add_argument("--params", type=int, nargs="*", default=[])
    e.add_argument("--max-radius", type=int, default=8)
    e.add_argument("--format", choices=("json", "dot", "text"), default="json")
    e.set_defaults(func=run_ends)

    t = sub.add_parser("transfer", help="move a boundary of Z to the line or ladder and back")
    t.add_argument("--spec")
    t.add_argument("--map", default="three-point")
    t.add_argument("--space", default="line")
    t.add_argument("--K", type=int, nargs="*")
    t.add_argument("--bound", type=int, default=4)
    t.add_argument("--hausdorff", action="store_true")
    t.add_argument("--budget", type=int, default=3)
    t.set_defaults(func=run_transfer)

    q = sub.add_parser("perspective", help="scan translates for w_{r,eps}-smallness")
    q.add_argument("--model", default="grid", choices=("grid", "tree", "euclidean"))
    q.add_argument("--r", type=float, default=10.0)
    q.add_argument("--epsilon", type=float, default=1.0)
    q.add_argument("--K")
    q.add_argument("--bound", type=int)
    q.add_argument("--bound2", type=int)
    q.add_argument("--degree", type=int, default=4)
    q.add_argument("--samples", type=int, default=1000)
    q.add_argument("--tolerance", type=float, default=1e-9)
    q.set_defaults(func=run_perspective)

    z = sub.add_parser("pruefer", help="checks for the boundaries f_k of Z[1/n]/Z")
    z.add_argument("--n", type=int, default=2)
    z.add_argument("--k", type=int, default=2)
    z.add_argument("--suite", choices=("all",) + SUITES, default="all")
    z.add_argument("--bound", type=int, default=10)
    z.add_argument("--lemma-bound", type=int, default=8)
    z.add_argument("--pairs", default="4:2,6:3,6:2")
    z.set_defaults(func=run_pruefer)

    s = sub.add_parser("sumcheck", help="checks on a boundary map given as JSON")
    s.add_argument("--map", required=True)
    s.add_argument("--suite", choices=("all", "admissible", "hausdorff", "compactness", "density"), default="all")
    s.add_argument("--budget", type=int, default=3)
    s.set_defaults(func=run_sumcheck)

    for sp in (e, t, q, z, s):
        sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # --help, --version and usage errors
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        report, code = args.func(args)
    except UsageError as e:
        print(f"compactify: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, UnsupportedExpression) as e:
        print(f"compactify: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InconclusiveError as e:
        print(f"compactify: inconclusive: {e}", file=sys.stderr)
        return EXIT_UNKNOWN
    except CompactifyError as e:
        print(f"compactify: {e}", file=sys.stderr)
        return EXIT_COUNTEREXAMPLE
    if isinstance(report, str):
        sys.stdout.write(report)
    else:
        out = {"version": __version__, "config": _config(args), **jsonable(report)}
        sys.stdout.write(json.dumps(out, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
