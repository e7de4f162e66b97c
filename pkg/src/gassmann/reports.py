"""Machine-readable reports: canonical JSON, schema, self-verification.

JSON is the single source of truth; the table rendering is derived from
it.  Reports carry enough substituted data (profiles, class sizes,
inequality instances, witness permutations, edge lists) that
verify_report can reproduce the verdict from the JSON alone.  Large
integers travel as decimal strings.
"""

from __future__ import annotations

import json
from typing import Any

from .planner import verify_check_json

SCHEMA_VERSION = 1


def encode_count(v: int) -> Any:
    """Plain int when JSON-safe, decimal string past 2^53."""
    return v if abs(v) < 2**53 else str(v)


def decode_count(v: Any) -> int:
    return int(v)


def canonical_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def new_report(command: str, config: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "items": [],
        "summary": {},
    }


def finalize(report: dict) -> dict:
    failed = [i for i, item in enumerate(report["items"]) if not item.get("holds", True)]
    report["summary"] = {
        "verdict": "pass" if not failed else "fail",
        "items": len(report["items"]),
        "failed_items": failed,
    }
    return report


# ---------------------------------------------------------------------------
# Self-verification
# ---------------------------------------------------------------------------


def _verify_profiles(item: dict, problems: list[str]) -> bool:
    profiles = item["profiles"]
    sizes = item["subgroup_sizes"]
    identity_class = item["identity_class"]
    ok = True
    for label, profile, size in zip(item["subgroups"], profiles, sizes):
        if sum(profile) != size:
            problems.append(f"profile of {label} does not sum to its order")
            ok = False
        if profile[identity_class] != 1:
            problems.append(f"profile of {label} misses the identity class")
            ok = False
    first = profiles[0]
    all_equal = all(p == first for p in profiles[1:])
    if all_equal != item["all_equal"]:
        problems.append("stored all_equal flag contradicts the profiles")
        ok = False
    return ok and item["all_equal"] == item["holds"]


def _verify_pair_certificate(item: dict, problems: list[str]) -> bool:
    prof_h, prof_k = item["profiles"]
    equal = prof_h == prof_k
    if equal != (item["verdict"] == "equal"):
        problems.append("stored verdict contradicts the two profiles")
        return False
    if not equal:
        witness = item["witness_class"]
        if witness is None or prof_h[witness] == prof_k[witness]:
            problems.append("witness class does not separate the profiles")
            return False
    expected = item.get("expected_verdict")
    if expected is not None and expected != item["verdict"]:
        problems.append("verdict differs from the expected one")
        return False
    return item["holds"] == (expected is None or expected == item["verdict"])


def _verify_class_count(item: dict, problems: list[str]) -> bool:
    ok = decode_count(item["actual"]) == decode_count(item["expected"])
    if item.get("bruteforce_orbits") is not None:
        ok = ok and decode_count(item["bruteforce_orbits"]) == decode_count(item["actual"])
    if ok != item["holds"]:
        problems.append("class-count holds flag is wrong")
        return False
    return ok


def _verify_conjugacy(item: dict, problems: list[str]) -> bool:
    ok = item["structural_equals_bruteforce"] if item["bruteforce_checked"] else True
    if item.get("reps_pairwise_nonconjugate") is False:
        ok = False
    if ok != item["holds"]:
        problems.append("conjugacy-dichotomy holds flag is wrong")
        return False
    return ok


def _edges_to_adjacency(n: int, edges) -> list[list[int]]:
    adj = [[0] * n for _ in range(n)]
    for u, v, mult in edges:
        adj[u][v] += mult
        if u != v:
            adj[v][u] += mult
    return adj


def _verify_graph(item: dict, problems: list[str]) -> bool:
    n = item["vertices"]
    adj = _edges_to_adjacency(n, item["edges"])
    degree = item["generators"]
    ok = all(sum(row) == degree for row in adj)
    if not ok:
        problems.append("row sums do not match the generator count")
    coeffs = [decode_count(c) for c in item["charpoly"]]
    if len(coeffs) != n + 1 or coeffs[0] != 1:
        problems.append("characteristic polynomial has wrong shape")
        ok = False
    elif n and coeffs[1] != -sum(adj[i][i] for i in range(n)):
        problems.append("t^(n-1) coefficient disagrees with the loop count")
        ok = False
    if ok != item["holds"]:
        problems.append("graph holds flag is wrong")
        return False
    return ok


def _verify_cospectral(item: dict, problems: list[str]) -> bool:
    polys = item["charpolys"]
    first = polys[0]
    all_equal = all(p == first for p in polys[1:])
    if all_equal != item["all_equal"] or item["holds"] != all_equal:
        problems.append("cospectral flags contradict the stored polynomials")
        return False
    return True


def _verify_isomorphism(item: dict, problems: list[str]) -> bool:
    if not item["isomorphic"]:
        return bool(item["holds"])
    witness = item["witness"]
    n = item["vertices"]
    adj1 = _edges_to_adjacency(n, item["edges_left"])
    adj2 = _edges_to_adjacency(n, item["edges_right"])
    if sorted(witness) != list(range(n)):
        problems.append("witness is not a permutation")
        return False
    ok = all(
        adj1[u][w] == adj2[witness[u]][witness[w]] for u in range(n) for w in range(n)
    )
    if not ok:
        problems.append("witness does not conjugate the adjacency matrices")
        return False
    return bool(item["holds"])


def _verify_tower_count(item: dict, problems: list[str]) -> bool:
    exact = decode_count(item["exact"])
    cited = decode_count(item["cited_lower"])
    ok = (exact >= cited) == item["bound_holds"] and (exact != cited) == item["gap"]
    if not ok or item["holds"] != item["bound_holds"]:
        problems.append("tower-count flags are inconsistent")
        return False
    return True


def _verify_place_scan(item: dict, problems: list[str]) -> bool:
    records = item["records"]
    ps = [r["p"] for r in records]
    if ps != sorted(set(ps)):
        problems.append("place records are not strictly increasing")
        return False
    for r in records:
        if decode_count(r["residue_size"]) != r["p"] ** r["ell"]:
            problems.append(f"residue size wrong at p={r['p']}")
            return False
    num, den = item["density"].split("/") if "/" in item["density"] else (item["density"], "1")
    cnum, cden = item["cebotarev_density"].split("/")
    tnum, tden = item["tolerance"].split("/") if "/" in item["tolerance"] else (item["tolerance"], "1")
    gap_num = abs(int(num) * int(cden) - int(cnum) * int(den))
    within = gap_num * int(tden) <= int(tnum) * int(den) * int(cden)
    if within != item["within_tolerance"] or item["holds"] != (
        within and item["implementations_agree"]
    ):
        problems.append("place-scan verdict flags are inconsistent")
        return False
    return True


def _verify_plan(item: dict, problems: list[str]) -> bool:
    ok = True
    for check in item.get("checks", []):
        if not verify_check_json(check):
            problems.append(f"check {check['label']} does not re-verify")
            ok = False
    required = item.get("required_checks")
    if required is not None:
        holding = all(c["holds"] for c in item.get("checks", []) if c["label"] in required)
        if holding != item["holds"]:
            problems.append("plan holds flag contradicts its required checks")
            ok = False
    return ok


_VERIFIERS = {
    "gassmann-family": _verify_profiles,
    "pair-certificate": _verify_pair_certificate,
    "class-count": _verify_class_count,
    "conjugacy-dichotomy": _verify_conjugacy,
    "coset-graph": _verify_graph,
    "cospectral": _verify_cospectral,
    "isomorphism": _verify_isomorphism,
    "tower-count": _verify_tower_count,
    "place-scan": _verify_place_scan,
    "plan": _verify_plan,
}


def verify_report(report: dict) -> list[str]:
    """Re-run every bundled certificate; returns problems (empty = verified)."""
    problems: list[str] = []
    if report.get("schema_version") != SCHEMA_VERSION:
        problems.append("unknown schema version")
        return problems
    all_hold = True
    for item in report["items"]:
        verifier = _VERIFIERS.get(item.get("kind"))
        if verifier is None:
            problems.append(f"no verifier for item kind {item.get('kind')!r}")
            all_hold = False
            continue
        if not verifier(item, problems):
            all_hold = False
        if not item.get("holds", True):
            all_hold = False
    verdict = report["summary"].get("verdict")
    if (verdict == "pass") != all_hold:
        problems.append("summary verdict does not match the re-run certificates")
    return problems


# ---------------------------------------------------------------------------
# Table rendering (derived from JSON, never the source of truth)
# ---------------------------------------------------------------------------


def render_table(report: dict) -> str:
    lines = [
        f"command : {report['command']}",
        f"config  : {json.dumps(report['config'], sort_keys=True)}",
        "-" * 72,
    ]
    for i, item in enumerate(report["items"]):
        status = "PASS" if item.get("holds", True) else "FAIL"
        detail = {
            k: v
            for k, v in item.items()
            if k not in {"kind", "holds"} and not isinstance(v, (list, dict))
        }
        body = ", ".join(f"{k}={v}" for k, v in sorted(detail.items()))
        lines.append(f"{status}  [{i:>2}] {item['kind']}: {body}")
    lines.append("-" * 72)
    lines.append(f"verdict : {report['summary']['verdict']}")
    return "\n".join(lines) + "\n"
