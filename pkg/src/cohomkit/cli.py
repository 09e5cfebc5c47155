"""Batch command surface with stable file formats and re-verifiable reports.

Exit codes: 0 on pass, 1 on a mathematical-verdict failure, 2 on usage or
size errors.  Reports are deterministic given inputs and version: wall time
goes to stderr, never into the verdict body.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .cohomology import (bockstein_delta, canonical_coords, cohomology_group,
                         cohomology_system, normalize_coeff)
from .cup import ring_slice
from .errors import CohomkitError, SizeCapExceeded
from .fibrewise import (FGModule, augmentation_ideal, dualising_check,
                        ext_group, fibre_projectivity_test, gproj_test,
                        integral_projectivity_test, koszul_selfdual_check,
                        lattice_from_presentation, fp_module_from_presentation,
                        proj_dim_via_fibres, regular_module, trivial_module)
from .fiso import f_iso_check, integral_psth_preimage, pth_power_preimage, \
    s_exponent, verify_derivation
from .groups import BUILTIN_GROUPS, builtin_group, load_group_json
from .strata import kappa_certificate, kappa_map_for_group, \
    thick_lattice_report


def _group_from_arg(arg: str):
    if arg in BUILTIN_GROUPS:
        return builtin_group(arg)
    return load_group_json(arg)


def _report(command: str, inputs: dict, body: dict, verdict) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "version": __version__,
        "verdict": verdict,
        **body,
    }


def _emit(report: dict, as_json: bool, started: float) -> int:
    if as_json:
        print(json.dumps(report, indent=1, sort_keys=True))
    else:
        _print_human(report)
    print(f"# wall time {time.time() - started:.2f}s", file=sys.stderr)
    verdict = report.get("verdict")
    if verdict in ("pass", True):
        return 0
    if verdict in ("fail", False):
        return 1
    return 0


def _print_human(report: dict, indent: int = 0):
    pad = " " * indent
    for key in sorted(report):
        val = report[key]
        if isinstance(val, dict):
            print(f"{pad}{key}:")
            _print_human(val, indent + 2)
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            print(f"{pad}{key}: [{len(val)} entries]")
            for item in val[:8]:
                line = ", ".join(f"{k}={_short(v)}" for k, v in
                                 sorted(item.items()))
                print(f"{pad}  - {line}")
            if len(val) > 8:
                print(f"{pad}  ... ({len(val) - 8} more)")
        else:
            print(f"{pad}{key}: {_short(val)}")


def _short(v):
    s = str(v)
    return s if len(s) <= 120 else s[:117] + "..."


def _group_string(factors) -> str:
    if not factors:
        return "0"
    return " + ".join("Z" if f == 0 else f"Z/{f}" for f in factors)


# -- subcommand implementations ----------------------------------------------

def cmd_cohomology(args):
    G = _group_from_arg(args.group)
    H = cohomology_group(G, args.coeff, args.deg)
    body = {
        "group_structure": _group_string(H.invariant_factors),
        "invariant_factors": list(H.invariant_factors),
        "basis": [list(map(int, b.vector)) for b in H.basis]
        if args.basis else "(suppressed; use --basis)",
        "check": "cohomology",
    }
    return _report("cohomology",
                   {"group": args.group, "coeff": str(args.coeff),
                    "deg": args.deg, "basis": bool(args.basis)},
                   body, "pass")


def cmd_ring(args):
    G = _group_from_arg(args.group)
    s = ring_slice(G, args.coeff, args.max_deg)
    ok = s.check_unit() and s.check_graded_commutativity() and \
        s.check_associativity()
    body = json.loads(s.to_json(include_basis=args.basis))
    body["check"] = "ring"
    body["ring_axioms"] = "pass" if ok else "fail"
    return _report("ring", {"group": args.group, "coeff": str(args.coeff),
                            "max_deg": args.max_deg},
                   body, "pass" if ok else "fail")


def cmd_bockstein(args):
    G = _group_from_arg(args.group)
    m = args.p ** args.i
    H = cohomology_group(G, m, args.deg)
    entries = []
    for idx, b in enumerate(H.basis):
        db = bockstein_delta(args.i, b)
        entries.append({
            "basis_index": idx,
            "delta_coords": list(canonical_coords(G, db)),
            "delta_vector": [int(v) for v in db.vector],
        })
    body = {"check": "bockstein",
            "source": _group_string(H.invariant_factors),
            "target_degree": args.deg + 1,
            "images": entries}
    return _report("bockstein", {"group": args.group, "p": args.p,
                                 "i": args.i, "deg": args.deg}, body, "pass")


def cmd_fiso(args):
    G = _group_from_arg(args.group)
    rep = f_iso_check(G, args.p, args.max_deg)
    body = json.loads(rep.to_json())
    return _report("fiso", {"group": args.group, "p": args.p,
                            "max_deg": args.max_deg}, body,
                   "pass" if rep.verdict else "fail")


def cmd_fibre(args):
    G = _group_from_arg(args.group)
    pres = FGModule.from_json_file(args.module, G)
    if args.gproj:
        res = gproj_test(pres)
        body = {"check": "gproj", "gorenstein_projective":
                res["gorenstein_projective"],
                "underlying_invariants": res["invariants"]}
        return _report("fibre", {"group": args.group, "module": args.module,
                                 "mode": "gproj"}, body, "pass")
    if pres.base == "Fp":
        M = fp_module_from_presentation(pres)
        r = fibre_projectivity_test(M)
        body = {"check": "fibre-projectivity", "projective": r.projective}
        return _report("fibre", {"group": args.group, "module": args.module,
                                 "mode": "projectivity", "p": pres.p},
                       body, "pass")
    lat = lattice_from_presentation(pres)
    rep = proj_dim_via_fibres(lat, verify_rational=args.verify_rational)
    body = {"check": "projdim-fibres",
            "fibres": {str(p): bool(v) for p, v in rep.fibres.items()},
            "supremum": "0" if rep.supremum == 0 else "infinity"}
    return _report("fibre", {"group": args.group, "module": args.module,
                             "mode": "projdim"}, body, "pass")


def cmd_dualising(args):
    G = _group_from_arg(args.group)
    w = dualising_check(G)
    ok = w.verify(G)
    body = {"check": "dualising", "witness_matrix": w.matrix,
            "determinant": w.determinant, "verified": ok}
    return _report("dualising", {"group": args.group}, body,
                   "pass" if ok else "fail")


def cmd_koszul(args):
    elements = [int(x) for x in args.elements.split(",") if x.strip()]
    rep = koszul_selfdual_check(elements)
    body = {"check": "koszul", "self_dual": rep.passed,
            "shift_signs": list(rep.shift_signs),
            "h0_invariants": list(rep.h0_invariants)}
    return _report("koszul", {"elements": elements}, body,
                   "pass" if rep.passed else "fail")


def cmd_thick(args):
    seed = [int(x) for x in args.seed.split(",") if x.strip()]
    rep = thick_lattice_report(args.p, seed)
    body = json.loads(rep.to_json())
    body["lattice"] = f"{rep.ideal_count} thick tensor ideals"
    verdict = "pass" if (not seed or rep.full) else "fail"
    return _report("thick", {"p": args.p, "seed": seed}, body, verdict)


def cmd_kappa(args):
    G = _group_from_arg(args.group)
    s = args.s if args.s is not None else s_exponent(G, args.p)
    f = kappa_map_for_group(G, args.p, args.max_deg)
    if not f.check_multiplicative():
        return _report("kappa", {"group": args.group, "p": args.p,
                                 "s": s, "max_deg": args.max_deg},
                       {"check": "kappa-certificate",
                        "error": "map is not multiplicative"}, "fail")
    rep = kappa_certificate(f, args.p, s, args.max_deg)
    body = json.loads(rep.to_json())
    return _report("kappa", {"group": args.group, "p": args.p, "s": s,
                             "max_deg": args.max_deg}, body,
                   "pass" if rep.verdict else "fail")


# -- verify-paper suites ------------------------------------------------------

_DERIVATION_FAMILY = ["c2", "c3", "c4", "klein4", "s3"]


def _primes_of(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def suite_lemma41(max_total: int = 5):
    results = []
    ok = True
    for name in _DERIVATION_FAMILY:
        G = builtin_group(name)
        for p in _primes_of(G.order):
            for i in (1, 2):
                m = p**i
                pairs = 0
                failures = 0
                for d1 in range(1, max_total):
                    for d2 in range(1, max_total + 1 - d1):
                        H1 = cohomology_group(G, m, d1)
                        H2 = cohomology_group(G, m, d2)
                        for x in H1.basis:
                            for y in H2.basis:
                                chk = verify_derivation(i, x, y)
                                pairs += 1
                                if not chk.passed:
                                    failures += 1
                if failures:
                    ok = False
                results.append({"group": name, "p": p, "i": i,
                                "pairs": pairs, "failures": failures})
    return {"check": "suite-lemma4.1", "results": results}, ok


def suite_lemma42():
    results = []
    ok = True
    for name in _DERIVATION_FAMILY:
        G = builtin_group(name)
        for p in _primes_of(G.order):
            m = p * p
            for d in (1, 2, 3):
                H = cohomology_group(G, m, d)
                for idx, x in enumerate(H.basis):
                    try:
                        lift = pth_power_preimage(2, x)
                        results.append({"group": name, "p": p, "deg": d,
                                        "basis_index": idx, "found": True,
                                        "kind": lift.witness.get("kind")})
                    except CohomkitError as exc:
                        ok = False
                        results.append({"group": name, "p": p, "deg": d,
                                        "basis_index": idx, "found": False,
                                        "error": str(exc)})
    return {"check": "suite-lemma4.2", "results": results}, ok


def suite_prop43():
    results = []
    ok = True
    for name in _DERIVATION_FAMILY:
        G = builtin_group(name)
        for p in _primes_of(G.order):
            s = s_exponent(G, p)
            for d in (1, 2):
                if d * p**s > 6:
                    continue
                H = cohomology_group(G, p, d)
                for idx, x in enumerate(H.basis):
                    try:
                        lift = integral_psth_preimage(x, s=s)
                        results.append({
                            "group": name, "p": p, "deg": d,
                            "basis_index": idx,
                            "verified": lift.verify(), "found": True})
                    except CohomkitError as exc:
                        ok = False
                        results.append({"group": name, "p": p, "deg": d,
                                        "basis_index": idx, "found": False,
                                        "error": str(exc)})
    return {"check": "suite-prop4.3", "results": results}, ok


def suite_thm44():
    cases = [("c2", 2, 6), ("c3", 3, 6), ("c4", 2, 6), ("klein4", 2, 6),
             ("s3", 2, 6), ("s3", 3, 6)]
    results = []
    ok = True
    for name, p, N in cases:
        rep = f_iso_check(builtin_group(name), p, N)
        results.append({"group": name, "p": p, "max_deg": N,
                        "verdict": "pass" if rep.verdict else "fail"})
        ok = ok and rep.verdict
    return {"check": "suite-thm4.4", "results": results}, ok


def suite_lemma27():
    results = []
    ok = True
    for name in ("c2", "c3", "c6"):
        G = builtin_group(name)
        mods = [("ZG", regular_module(G)), ("Z", trivial_module(G)),
                ("aug", augmentation_ideal(G))]
        for label, M in mods:
            direct = integral_projectivity_test(M).projective
            rep = proj_dim_via_fibres(M, verify_rational=True)
            fibrewise = all(rep.fibres.values())
            agree = direct == fibrewise
            if not agree:
                ok = False
            results.append({"group": name, "module": label,
                            "direct_projective": direct,
                            "all_fibres_projective": fibrewise,
                            "fibres": {str(p): v for p, v in
                                       rep.fibres.items()},
                            "agree": agree})
    return {"check": "suite-lemma2.7", "results": results}, ok


def suite_lemma33():
    results = []
    ok = True
    for name in ("c2", "c3", "s3", "q8"):
        G = builtin_group(name)
        try:
            w = dualising_check(G)
            good = w.verify(G)
        except CohomkitError:
            good = False
        ok = ok and good
        results.append({"group": name, "witness_found": good})
    return {"check": "suite-lemma3.3", "results": results}, ok


def suite_lemma22():
    results = []
    ok = True
    for elems in ([2], [2, 3], [2, 3, 5]):
        rep = koszul_selfdual_check(elems)
        ok = ok and rep.passed
        results.append({"elements": elems, "self_dual": rep.passed})
    return {"check": "suite-lemma2.2", "results": results}, ok


def suite_classification():
    results = []
    ok = True
    for p in (2, 3, 5):
        rep = thick_lattice_report(p, {1})
        good = rep.ideal_count == 2 and rep.full
        ok = ok and good
        results.append({"p": p, "thick_tensor_ideals": rep.ideal_count,
                        "every_seed_full": good})
    return {"check": "suite-classification", "results": results}, ok


_SUITES = {
    "lemma4.1": suite_lemma41,
    "lemma4.2": suite_lemma42,
    "prop4.3": suite_prop43,
    "thm4.4": suite_thm44,
    "lemma2.7": suite_lemma27,
    "lemma3.3": suite_lemma33,
    "lemma2.2": suite_lemma22,
    "classification": suite_classification,
}


def cmd_verify_paper(args):
    body, ok = _SUITES[args.suite]()
    return _report("verify-paper", {"suite": args.suite}, body,
                   "pass" if ok else "fail")


# -- recheck ------------------------------------------------------------------

def cmd_recheck(args):
    with open(args.report) as fh:
        rep = json.load(fh)
    cmd = rep.get("command")
    inputs = rep.get("inputs", {})
    rebuilt = _rebuild(cmd, inputs)
    if rebuilt is None:
        return _report("recheck", {"report": args.report},
                       {"error": f"cannot recheck command {cmd!r}"}, "fail")
    stripped = dict(rep)
    same = _reports_equal(stripped, rebuilt)
    return _report("recheck", {"report": args.report},
                   {"check": "recheck", "command": cmd,
                    "reproduced": same}, "pass" if same else "fail")


def _reports_equal(a, b):
    return json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def _rebuild(cmd, inputs):
    ns = argparse.Namespace()
    if cmd == "cohomology":
        ns.group, ns.coeff, ns.deg = inputs["group"], inputs["coeff"], \
            inputs["deg"]
        ns.basis = bool(inputs.get("basis"))
        return cmd_cohomology(ns)
    if cmd == "ring":
        ns.group, ns.coeff, ns.max_deg = inputs["group"], inputs["coeff"], \
            inputs["max_deg"]
        ns.basis = False
        return cmd_ring(ns)
    if cmd == "bockstein":
        ns.group, ns.p, ns.i, ns.deg = inputs["group"], inputs["p"], \
            inputs["i"], inputs["deg"]
        return cmd_bockstein(ns)
    if cmd == "fiso":
        ns.group, ns.p, ns.max_deg = inputs["group"], inputs["p"], \
            inputs["max_deg"]
        return cmd_fiso(ns)
    if cmd == "dualising":
        ns.group = inputs["group"]
        return cmd_dualising(ns)
    if cmd == "koszul":
        ns.elements = ",".join(str(x) for x in inputs["elements"])
        return cmd_koszul(ns)
    if cmd == "thick":
        ns.p = inputs["p"]
        ns.seed = ",".join(str(x) for x in inputs["seed"])
        return cmd_thick(ns)
    if cmd == "kappa":
        ns.group, ns.p, ns.s, ns.max_deg = inputs["group"], inputs["p"], \
            inputs["s"], inputs["max_deg"]
        return cmd_kappa(ns)
    if cmd == "verify-paper":
        ns.suite = inputs["suite"]
        return cmd_verify_paper(ns)
    if cmd == "fibre":
        ns.group = inputs["group"]
        ns.module = inputs["module"]
        ns.gproj = inputs.get("mode") == "gproj"
        ns.projdim = inputs.get("mode") == "projdim"
        ns.verify_rational = False
        return cmd_fibre(ns)
    return None


# -- argument parsing ---------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="cohomkit",
        description="Exact group cohomology with cup products, Bocksteins, "
                    "and F-isomorphism certificates.")
    ap.add_argument("--json", action="store_true",
                    help="emit the machine-readable report")
    ap.add_argument("--recheck", metavar="REPORT",
                    help="re-verify an emitted report file and exit")
    sub = ap.add_subparsers(dest="cmd", required=False)

    g = sub.add_parser("cohomology", help="H^n(G, Z) or H^n(G, Z/m)")
    g.add_argument("--group", required=True,
                   help=f"builtin ({', '.join(sorted(BUILTIN_GROUPS))}) "
                        "or JSON file")
    g.add_argument("--coeff", required=True, help='"Z" or "Z/m" or m')
    g.add_argument("--deg", type=int, required=True)
    g.add_argument("--basis", action="store_true",
                   help="include basis cocycle vectors")
    g.set_defaults(func=cmd_cohomology)

    g = sub.add_parser("ring", help="graded ring slice up to a degree bound")
    g.add_argument("--group", required=True)
    g.add_argument("--coeff", required=True)
    g.add_argument("--max-deg", type=int, required=True)
    g.add_argument("--basis", action="store_true")
    g.set_defaults(func=cmd_ring)

    g = sub.add_parser("bockstein", help="connecting map on a basis")
    g.add_argument("--group", required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--i", type=int, required=True)
    g.add_argument("--deg", type=int, required=True)
    g.set_defaults(func=cmd_bockstein)

    g = sub.add_parser("fiso", help="F-isomorphism certificate")
    g.add_argument("--group", required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--max-deg", type=int, default=6)
    g.set_defaults(func=cmd_fiso)

    g = sub.add_parser("fibre", help="fibrewise module tests")
    g.add_argument("--group", required=True)
    g.add_argument("--module", required=True, help="module JSON file")
    g.add_argument("--projdim", action="store_true")
    g.add_argument("--gproj", action="store_true")
    g.add_argument("--verify-rational", action="store_true")
    g.set_defaults(func=cmd_fibre)

    g = sub.add_parser("dualising", help="Hom_Z(ZG,Z) ~ ZG witness")
    g.add_argument("--group", required=True)
    g.set_defaults(func=cmd_dualising)

    g = sub.add_parser("koszul", help="Koszul self-duality check")
    g.add_argument("--elements", required=True, help="comma-separated ints")
    g.set_defaults(func=cmd_koszul)

    g = sub.add_parser("thick", help="thick tensor ideal closure for kC_p")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--seed", required=True, help="comma-separated block sizes")
    g.set_defaults(func=cmd_thick)

    g = sub.add_parser("kappa", help="spectra-bijection certificate")
    g.add_argument("--group", required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--s", type=int, default=None)
    g.add_argument("--max-deg", type=int, default=6)
    g.set_defaults(func=cmd_kappa)

    g = sub.add_parser("verify-paper", help="run a canned verification suite")
    g.add_argument("--suite", required=True, choices=sorted(_SUITES))
    g.set_defaults(func=cmd_verify_paper)

    g = sub.add_parser("recheck", help="re-verify an emitted report")
    g.add_argument("report")
    g.set_defaults(func=cmd_recheck)
    return ap


def main(argv=None) -> int:
    started = time.time()
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if getattr(args, "recheck", None) and not getattr(args, "cmd", None):
        args.report = args.recheck
        args.func = cmd_recheck
    elif not getattr(args, "cmd", None):
        ap.print_usage(sys.stderr)
        return 2
    try:
        report = args.func(args)
    except SizeCapExceeded as exc:
        print(f"size cap exceeded: {exc}", file=sys.stderr)
        return 2
    except (CohomkitError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _emit(report, args.json, started)


if __name__ == "__main__":
    sys.exit(main())
