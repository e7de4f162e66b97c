"""Command-line entry point: batch certification runs with JSON reports.

Subcommands: certify, graphs, tower, places, plan, verify.  Reports are
deterministic (byte-identical for identical config); wall-clock timing
goes to stderr only.  Exit code 0 exactly when the summary verdict is
"pass"; operational errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import certify as cz
from . import planner as pl
from . import reports as rp
from . import schreier as sg
from .errors import GassmannError, NotGenerating, SpecMismatch
from .heisenberg import Heisenberg, heisenberg_group, twisted_subgroup
from .places import choose_modulus, residue_degree, residue_degree_subgroup, scan_places
from .rings import make_field, make_trunc_ring, primes_up_to, size_cap

# Thresholds steering how much brute force the certify command performs.
_ALL_TWISTS_LIMIT = 16
_BRUTE_ORBIT_LIMIT = 1 << 16
_BRUTE_CONJ_WORK_LIMIT = 2_000_000


def _subgroup_family(spec, mode: str):
    group = heisenberg_group(spec)
    if mode == "all-twists":
        maps = list(cz.all_linear_maps(spec))
    else:
        maps = list(cz.enumerate_class_reps(spec).reps)
    return group, [twisted_subgroup(f, group) for f in maps]


def _bruteforce_subgroup_keys(group: Heisenberg, subgroups) -> list:
    """Canonical key per subgroup under elementwise conjugation by all of G."""
    keys = []
    for sub in subgroups:
        orbit = {
            tuple(sorted(group.conjugate(g, h) for h in sub.elements))
            for g in group.elements
        }
        keys.append(min(orbit))
    return keys


def cmd_certify(p: int, m: int, cap: Optional[int] = None) -> dict:
    spec = make_field(p, m, cap=cap)
    group = heisenberg_group(spec)
    report = rp.new_report("certify", {"p": p, "m": m, "cap": cap or size_cap()})

    catalog = cz.enumerate_class_reps(spec, cap=cap)
    expected = p ** (m * (m - 1))
    orbits = None
    if p ** (m * m) <= _BRUTE_ORBIT_LIMIT:
        orbits = cz.twist_orbit_count_bruteforce(spec, cap=cap)
    report["items"].append(
        {
            "kind": "class-count",
            "expected": rp.encode_count(expected),
            "actual": rp.encode_count(catalog.count),
            "bruteforce_orbits": rp.encode_count(orbits) if orbits is not None else None,
            "holds": catalog.count == expected and (orbits in (None, catalog.count)),
        }
    )

    mode = "all-twists" if p ** (m * m) <= _ALL_TWISTS_LIMIT else "class-reps"
    group, subgroups = _subgroup_family(spec, mode)
    table = group.conjugacy_classes(cap=cap)
    profiles = [cz.intersection_profile(sub, table) for sub in subgroups]
    all_equal = all(prof == profiles[0] for prof in profiles[1:])
    count = len(subgroups)
    report["items"].append(
        {
            "kind": "gassmann-family",
            "mode": mode,
            "subgroups": [sub.label() for sub in subgroups],
            "subgroup_sizes": [sub.size for sub in subgroups],
            "pair_count": count * (count - 1) // 2,
            "identity_class": table.identity_class(),
            "class_sizes": list(table.sizes()),
            "profiles": [list(prof) for prof in profiles],
            "all_equal": all_equal,
            "holds": all_equal,
        }
    )

    structural = {
        (i, j): cz.are_conjugate(subgroups[i].f, subgroups[j].f, spec)
        for i in range(count)
        for j in range(i + 1, count)
    }
    brute_work = group.order * spec.size * count
    brute_checked = brute_work <= _BRUTE_CONJ_WORK_LIMIT
    agreement = True
    if brute_checked:
        keys = _bruteforce_subgroup_keys(group, subgroups)
        agreement = all(
            (keys[i] == keys[j]) == structural[(i, j)]
            for i in range(count)
            for j in range(i + 1, count)
        )
    item = {
        "kind": "conjugacy-dichotomy",
        "pairs": len(structural),
        "structural_conjugate_pairs": sum(structural.values()),
        "bruteforce_checked": brute_checked,
        "structural_equals_bruteforce": agreement,
        "holds": agreement,
    }
    if mode == "class-reps":
        nonconjugate = not any(structural.values())
        item["reps_pairwise_nonconjugate"] = nonconjugate
        item["holds"] = agreement and nonconjugate
    report["items"].append(item)
    return rp.finalize(report)


def parse_generators(text: str, spec):
    gens = []
    for chunk in text.split(";"):
        parts = chunk.split("|")
        if len(parts) != 3:
            raise SpecMismatch(f"generator {chunk!r} is not of the form a|b|c")
        gens.append(tuple(spec.element([int(v) for v in part.split(",")]) for part in parts))
    return gens


def cmd_graphs(p: int, m: int, gens_text: Optional[str] = None,
               cap: Optional[int] = None) -> tuple[dict, dict[str, str]]:
    spec = make_field(p, m, cap=cap)
    group = heisenberg_group(spec)
    gens = (
        parse_generators(gens_text, spec)
        if gens_text
        else sg.default_generators(group)
    )
    gens = sg.symmetrize_generators(group, gens)
    report = rp.new_report(
        "graphs",
        {
            "p": p,
            "m": m,
            "generators": [[list(c) for c in g] for g in gens],
            "cap": cap or size_cap(),
        },
    )
    catalog = cz.enumerate_class_reps(spec, cap=cap)
    subgroups = [twisted_subgroup(f, group) for f in catalog.reps]
    graphs = [sg.build_coset_graph(sub, gens) for sub in subgroups]
    for graph in graphs:
        if not graph.connected:
            raise NotGenerating(
                f"coset graph of {graph.subgroup_label} is disconnected; "
                "the generator set does not generate"
            )
    polys = [sg.char_poly(g) for g in graphs]

    exports: dict[str, str] = {}
    for k, (graph, poly) in enumerate(zip(graphs, polys)):
        item = graph.to_json()
        item.update(
            {
                "kind": "coset-graph",
                "rep": k,
                "charpoly": [rp.encode_count(c) for c in poly.coefficients],
                "holds": True,
            }
        )
        report["items"].append(item)
        exports[f"rep_{k}.dot"] = graph.to_dot(f"rep_{k}")
        exports[f"rep_{k}.edges"] = (
            "\n".join(f"{u} {v} {mult}" for u, v, mult in graph.edge_list()) + "\n"
        )
        exports[f"rep_{k}.charpoly.json"] = json.dumps(poly.to_json(), sort_keys=True) + "\n"

    all_equal = all(p2.coefficients == polys[0].coefficients for p2 in polys[1:])
    report["items"].append(
        {
            "kind": "cospectral",
            "pair_count": len(polys) * (len(polys) - 1) // 2,
            "charpolys": [[rp.encode_count(c) for c in p2.coefficients] for p2 in polys],
            "all_equal": all_equal,
            "holds": all_equal,
        }
    )
    for i in range(len(graphs)):
        for j in range(i + 1, len(graphs)):
            iso = sg.are_isomorphic(graphs[i], graphs[j])
            report["items"].append(
                {
                    "kind": "isomorphism",
                    "pair": [i, j],
                    "vertices": graphs[i].n,
                    "edges_left": [[u, v, mult] for u, v, mult in graphs[i].edge_list()],
                    "edges_right": [[u, v, mult] for u, v, mult in graphs[j].edge_list()],
                    "isomorphic": iso.isomorphic,
                    "witness": list(iso.witness) if iso.witness else None,
                    "holds": True,
                }
            )
    return rp.finalize(report), exports


def cmd_tower(p: int, j_max: int, cap: Optional[int] = None) -> dict:
    report = rp.new_report("tower", {"p": p, "j_max": j_max, "cap": cap or size_cap()})
    for j in range(1, j_max + 1):
        spec = make_trunc_ring(p, j, cap=cap)
        result = cz.tower_class_count(spec, cap=cap)
        report["items"].append(
            {
                "kind": "tower-count",
                "j": j,
                "exact": rp.encode_count(result.exact),
                "cited_lower": rp.encode_count(result.cited_lower),
                "bound_holds": result.bound_holds,
                "gap": result.gap,
                "holds": result.bound_holds,
            }
        )
    return rp.finalize(report)


def cmd_places(ell: int, bound: int, q: Optional[int] = None,
               tol: Fraction = Fraction(1, 50)) -> dict:
    if q is None:
        q = choose_modulus(ell)
    scan = scan_places(ell, q, bound)
    agree_to = min(bound, 10**4)
    agree = all(
        residue_degree(p2, q, ell) == residue_degree_subgroup(p2, q, ell)
        for p2 in primes_up_to(agree_to)
        if p2 != q
    )
    within = scan.density_gap() <= tol
    report = rp.new_report(
        "places", {"ell": ell, "q": q, "bound": bound, "tolerance": str(Fraction(tol))}
    )
    report["items"].append(
        {
            "kind": "place-scan",
            "records": [r.to_json() for r in scan.records],
            "scanned": scan.scanned,
            "degree_ell_count": scan.degree_ell_count,
            "density": str(scan.density),
            "cebotarev_density": str(scan.cebotarev_density),
            "tolerance": str(Fraction(tol)),
            "within_tolerance": within,
            "agreement_checked_to": agree_to,
            "implementations_agree": agree,
            "holds": within and agree,
        }
    )
    return rp.finalize(report)


# ---------------------------------------------------------------------------
# Planner subcommands
# ---------------------------------------------------------------------------


def _plan_item(op: str, inputs: dict, result: dict, checks=(), required=None) -> dict:
    item = {
        "kind": "plan",
        "op": op,
        "inputs": inputs,
        "result": result,
        "checks": [c.to_json() for c in checks],
    }
    if required is not None:
        item["required_checks"] = sorted(required)
        item["holds"] = all(c.holds for c in checks if c.label in required)
    else:
        item["holds"] = True
    return item


def cmd_plan(args: argparse.Namespace) -> dict:
    op = args.plan_op
    if args.dim_g is not None:
        pl.PlannerParams(
            dim_g=args.dim_g, c=args.c, x=args.x, big_c=args.big_c,
            c_x=args.c_x, c_1=args.c_1 if args.c_1 is not None else 1,
            d_p=args.d_p, delta=Fraction(args.delta), r=args.r,
            ell=args.ell, ell0=args.ell0,
        )
    report = rp.new_report("plan", {"op": op})

    if op == "twisted-count":
        result = pl.twisted_count_bound(args.p, args.ell0, args.dim_g)
        inputs = {"p": args.p, "ell0": args.ell0, "dim_g": args.dim_g}
        report["items"].append(_plan_item(op, inputs, result.to_json()))

    elif op == "comm-classes":
        result = pl.distinct_comm_classes(args.p, args.ell0, args.dim_g, args.c)
        inputs = {"p": args.p, "ell0": args.ell0, "dim_g": args.dim_g, "c": args.c}
        checks = []
        required = []
        if args.n is not None:
            check = pl.isometry_headroom(args.p, args.ell0, args.dim_g, args.c,
                                         args.c_x, args.n)
            checks.append(check)
            required.append(check.label)
            inputs.update({"c_x": args.c_x, "n": args.n})
        report["items"].append(
            _plan_item(op, inputs, result.to_json(), checks, required or None)
        )

    elif op == "conjugates-bound":
        value = pl.commensurator_conjugates_bound(
            args.n_index, args.x, args.big_c, args.group_order
        )
        inputs = {
            "n_index": args.n_index,
            "x": args.x,
            "big_c": args.big_c,
            "group_order": args.group_order,
        }
        report["items"].append(_plan_item(op, inputs, {"value": str(value)}))

    elif op in ("min-ell-sequence", "min-ell-growth"):
        fn = pl.min_ell_sequence if op == "min-ell-sequence" else pl.min_ell_growth
        result = fn(args.dim_g, args.c, args.r)
        inputs = {"dim_g": args.dim_g, "c": args.c, "r": args.r}
        checks = [result.passing] + ([result.failing] if result.failing else [])
        required = [result.passing.label]
        if op == "min-ell-growth" and args.p is not None and args.c_1 is not None:
            ell0 = args.ell0 if args.ell0 is not None else result.ell
            chain = pl.growth_chain_check(args.p, args.c_1, ell0, args.r,
                                          args.dim_g, args.c)
            checks.extend(chain)
            required.extend(c.label for c in chain)
            inputs.update({"p": args.p, "c_1": args.c_1, "ell0": ell0})
        report["items"].append(
            _plan_item(op, inputs, {"ell": result.ell}, checks, required)
        )

    elif op == "nonarith-count":
        result = pl.nonarith_count(args.p, args.ell)
        inputs = {"p": args.p, "ell": args.ell}
        checks = []
        required = []
        if args.n is not None:
            check = pl.nonarith_headroom(args.p, args.ell, args.comm_index, args.n)
            checks.append(check)
            required.append(check.label)
            inputs.update({"comm_index": args.comm_index, "n": args.n})
        report["items"].append(
            _plan_item(op, inputs, result.to_json(), checks, required or None)
        )

    elif op == "volume-bound":
        value = pl.tower_volume_bound(args.big_c, args.p, args.j)
        inputs = {"big_c": args.big_c, "p": args.p, "j": args.j}
        report["items"].append(_plan_item(op, inputs, {"value": str(value)}))

    elif op == "growth-constant":
        result = pl.tower_growth_constant(
            args.p, Fraction(args.delta), args.d_p, args.j_min, args.j_max,
            margin=Fraction(args.margin),
        )
        inputs = {
            "p": args.p,
            "delta": str(Fraction(args.delta)),
            "d_p": args.d_p,
            "j_min": args.j_min,
            "j_max": args.j_max,
            "margin": str(Fraction(args.margin)),
        }
        payload = result.to_json()
        checks = result.checks
        report["items"].append(
            _plan_item(op, inputs, {"constant": payload["constant"],
                                    "log_base": "natural",
                                    "ln_p": payload["ln_p"]},
                       checks, [c.label for c in checks])
        )

    elif op == "level-count":
        primes = [int(v) for v in args.primes.split(",")]
        value = pl.level_count(primes, args.j, args.ell0)
        inputs = {"primes": primes, "j": args.j, "ell0": args.ell0}
        report["items"].append(_plan_item(op, inputs, {"value": str(value)}))

    elif op == "tower-min-k":
        primes = [int(v) for v in args.primes.split(",")]
        result = pl.tower_min_k(primes, args.j, args.ell0, args.dim_g,
                                args.c_x, args.x, args.c, args.r)
        inputs = {
            "primes": primes,
            "j": args.j,
            "ell0": args.ell0,
            "dim_g": args.dim_g,
            "c_x": args.c_x,
            "x": args.x,
            "c": args.c,
            "r": args.r,
        }
        checks = [result.product_condition, result.full_at_k]
        required = [c.label for c in checks]
        if result.product_condition_before is not None:
            checks.append(result.product_condition_before)
        if result.full_before is not None:
            checks.append(result.full_before)
        report["items"].append(
            _plan_item(op, inputs, {"k": result.k}, checks, required)
        )

    else:  # pragma: no cover - argparse restricts choices
        raise SpecMismatch(f"unknown plan op {op!r}")

    return rp.finalize(report)


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gassmann",
        description="Exact certification of almost-conjugate subgroup families, "
        "coset-graph spectra, and growth inequalities.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "table", "jsonl"], default="json")
    common.add_argument("--out", type=Path, default=None,
                        help="file (or directory, for graphs) for report and exports")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cert = sub.add_parser("certify", parents=[common],
                            help="Gassmann-certify a twisted family")
    p_cert.add_argument("--p", type=int, required=True)
    p_cert.add_argument("--m", type=int, required=True)
    p_cert.add_argument("--cap", type=int, default=None)

    p_graphs = sub.add_parser("graphs", parents=[common], help="coset graphs, spectra, isomorphism")
    p_graphs.add_argument("--p", type=int, required=True)
    p_graphs.add_argument("--m", type=int, required=True)
    p_graphs.add_argument("--gens", type=str, default=None,
                          help="generators 'a|b|c;a|b|c;...', coefficients comma-separated")
    p_graphs.add_argument("--cap", type=int, default=None)

    p_tower = sub.add_parser("tower", parents=[common], help="truncated-ring class counts")
    p_tower.add_argument("--p", type=int, required=True)
    p_tower.add_argument("--j-max", type=int, required=True)
    p_tower.add_argument("--cap", type=int, default=None)

    p_places = sub.add_parser("places", parents=[common], help="residue-degree scan")
    p_places.add_argument("--ell", type=int, required=True)
    p_places.add_argument("--bound", type=int, required=True)
    p_places.add_argument("--q", type=int, default=None)
    p_places.add_argument("--tol", type=str, default="1/50",
                          help="density tolerance, decimal or fraction")

    p_plan = sub.add_parser("plan", parents=[common], help="exact inequality certification")
    p_plan.add_argument(
        "plan_op",
        choices=[
            "twisted-count", "comm-classes", "conjugates-bound",
            "min-ell-sequence", "min-ell-growth", "nonarith-count",
            "volume-bound", "growth-constant", "level-count", "tower-min-k",
        ],
    )
    p_plan.add_argument("--p", type=int, default=None)
    p_plan.add_argument("--ell", type=int, default=None)
    p_plan.add_argument("--ell0", type=int, default=None)
    p_plan.add_argument("--dim-g", dest="dim_g", type=int, default=None)
    p_plan.add_argument("--c", type=int, default=1)
    p_plan.add_argument("--r", type=int, default=1)
    p_plan.add_argument("--x", type=int, default=1)
    p_plan.add_argument("--big-c", dest="big_c", type=int, default=1)
    p_plan.add_argument("--c-x", dest="c_x", type=int, default=1)
    p_plan.add_argument("--c-1", dest="c_1", type=int, default=None)
    p_plan.add_argument("--d-p", dest="d_p", type=int, default=1)
    p_plan.add_argument("--delta", type=str, default="1")
    p_plan.add_argument("--margin", type=str, default="1/1024")
    p_plan.add_argument("--n", type=int, default=None)
    p_plan.add_argument("--n-index", dest="n_index", type=int, default=None)
    p_plan.add_argument("--comm-index", dest="comm_index", type=int, default=1)
    p_plan.add_argument("--group-order", dest="group_order", type=int, default=None)
    p_plan.add_argument("--j", type=int, default=None)
    p_plan.add_argument("--j-min", dest="j_min", type=int, default=None)
    p_plan.add_argument("--j-max", dest="j_max", type=int, default=None)
    p_plan.add_argument("--primes", type=str, default=None)

    p_verify = sub.add_parser("verify", parents=[common], help="re-run the certificates in a report")
    p_verify.add_argument("report", type=Path)

    return parser


def _write_outputs(args, report: dict, exports: dict[str, str]) -> None:
    if args.out is None:
        return
    if exports:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "report.json").write_text(rp.canonical_json(report))
        for name, content in exports.items():
            (args.out / name).write_text(content)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(rp.canonical_json(report))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    exports: dict[str, str] = {}
    try:
        if args.command == "certify":
            report = cmd_certify(args.p, args.m, cap=args.cap)
        elif args.command == "graphs":
            report, exports = cmd_graphs(args.p, args.m, gens_text=args.gens,
                                         cap=args.cap)
        elif args.command == "tower":
            report = cmd_tower(args.p, args.j_max, cap=args.cap)
        elif args.command == "places":
            report = cmd_places(args.ell, args.bound, q=args.q,
                                tol=Fraction(args.tol))
        elif args.command == "plan":
            report = cmd_plan(args)
        elif args.command == "verify":
            data = json.loads(args.report.read_text())
            problems = rp.verify_report(data)
            for problem in problems:
                print(f"problem: {problem}", file=sys.stderr)
            print("verified" if not problems else "verification failed")
            return 0 if not problems else 1
        else:  # pragma: no cover
            parser.error(f"unknown command {args.command}")
    except (GassmannError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    if args.format == "jsonl" and args.command == "places":
        lines = [
            json.dumps(rec, sort_keys=True)
            for rec in report["items"][0]["records"]
        ]
        summary = {
            k: v for k, v in report["items"][0].items() if k != "records"
        }
        lines.append(json.dumps(summary, sort_keys=True))
        sys.stdout.write("\n".join(lines) + "\n")
    elif args.format == "table":
        sys.stdout.write(rp.render_table(report))
    else:
        sys.stdout.write(rp.canonical_json(report))
    _write_outputs(args, report, exports)
    print(f"# elapsed {time.perf_counter() - started:.3f}s", file=sys.stderr)
    return 0 if report["summary"]["verdict"] == "pass" else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
