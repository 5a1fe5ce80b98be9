"""Command line interface: analyze, dual, verify and sweep.

Exit codes: 0 success, 2 unparsable input, 3 invalid input, 4 duality
mismatch, 5 integrality tripwire.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from .arith import format_rational, parse_rational
from .errors import IntegralityError, ParseError, ValidationError, NotASymmetry
from .invariants import (
    chi_orb_total,
    chi_orb_total_reduced,
    e_function_level,
    e_function_total,
    format_efunction,
    level_reports,
    zeta_orb_total,
)
from .mirror import assumptions_hold, bhht_dual, e_level1_via_mirror, verify_duality
from .polynomial import InvertiblePolynomial, enumerate_invertible, from_string
from .symmetry import (
    DiagonalGroup,
    PermutationGroup,
    build_symmetry_data,
    format_cycles,
    full_symmetry_group,
    grading_element,
    in_symmetry_group,
    minimal_generators,
    normalizes,
    parse_cycles,
    pc_check,
    permutation_symmetries,
    sl_subgroup,
)

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_MISMATCH, EXIT_INTEGRALITY = 0, 2, 3, 4, 5


# ---------------------------------------------------------------------------
# instance specs


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc


def parse_instance(spec: dict) -> tuple[InvertiblePolynomial, DiagonalGroup, PermutationGroup]:
    if not isinstance(spec, dict) or not isinstance(spec.get("polynomial"), str):
        raise ParseError("instance must be an object with a 'polynomial' string")
    if not isinstance(spec.get("G", {}), dict) or not isinstance(spec.get("S", {}), dict):
        raise ParseError("fields 'G' and 'S' must be objects")
    f = from_string(spec["polynomial"], spec.get("variables"))
    N = abs(f.det)
    gspec = spec.get("G", {"kind": "trivial"})
    kind = gspec.get("kind", "generated" if "generators" in gspec else "trivial")
    if kind == "trivial":
        G = DiagonalGroup.trivial(f.n, N)
    elif kind == "full":
        G = full_symmetry_group(f)
    elif kind == "J":
        G = DiagonalGroup.generated([grading_element(f)], f.n, N)
    elif kind == "SL":
        G = sl_subgroup(full_symmetry_group(f))
    elif kind == "generated":
        gens = []
        for g in gspec.get("generators", []):
            if not isinstance(g, list) or len(g) != f.n:
                raise ParseError(f"generator {g!r} must list {f.n} phases")
            lam = []
            for x in g:
                q = parse_rational(x) * N
                if q.denominator != 1:
                    raise NotASymmetry(f"generator {g} is not in G_f (denominator does not divide {N})")
                lam.append(int(q) % N)
            if not in_symmetry_group(f.E, lam, N):
                raise NotASymmetry(f"generator {g} is not a diagonal symmetry of f")
            gens.append(tuple(lam))
        G = DiagonalGroup.generated(gens, f.n, N)
    else:
        raise ParseError(f"unknown group kind {kind!r}")
    sgens = spec.get("S", {}).get("generators", [])
    if not isinstance(sgens, list) or not all(isinstance(x, str) for x in sgens):
        raise ParseError("S generators must be a list of cycle strings")
    S = PermutationGroup.generated([parse_cycles(s, f.n) for s in sgens], f.n)
    return f, G, S


def group_spec(G: DiagonalGroup) -> dict:
    gens = minimal_generators(G) if G.order > 1 else ()
    return {
        "kind": "generated",
        "generators": [[format_rational(Fraction(x, G.modulus)) for x in g] for g in gens],
    }


def instance_spec(f: InvertiblePolynomial, G: DiagonalGroup, S: PermutationGroup) -> dict:
    out = {"polynomial": f.to_string(), "G": group_spec(G), "S": {"generators": [format_cycles(s) for s in S.generators]}}
    if f.names:
        out["variables"] = list(f.names)
    return out


def instance_hash(spec: dict) -> str:
    return hashlib.sha256(json.dumps(spec, sort_keys=True).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# subcommands


def _analyze(args) -> int:
    f, G, S = parse_instance(load_json(args.file))
    data = build_symmetry_data(f, G, S)
    wanted = set(args.invariants.split(","))
    reports = level_reports(data)
    if args.level:
        reports = [r for r in reports if r.level.name == args.level]
        if not reports:
            raise ParseError(f"no level named {args.level!r}; levels are {[lv.name for lv in data.levels]}")
    if args.json:
        levels = []
        for r in reports:
            entry = {"level": r.level.name, "classes": len(data.classes_in(r.level))}
            if "chi" in wanted:
                entry.update(chi=r.chi, chi_reduced=r.chi_reduced)
            if "zeta" in wanted:
                entry.update(zeta=r.zeta.to_json(), zeta_reduced=r.zeta_reduced.to_json())
            if "e" in wanted:
                entry["e"] = r.e.to_json()
                if args.eprime:
                    entry["e_prime"] = e_function_level(data, r.level, eprime=True).to_json()
            levels.append(entry)
        totals = {}
        if "chi" in wanted:
            totals.update(chi=chi_orb_total(data), chi_reduced=chi_orb_total_reduced(data))
        if "zeta" in wanted:
            totals.update(zeta=zeta_orb_total(data).to_json(), zeta_reduced=zeta_orb_total(data, True).to_json())
        if "e" in wanted:
            totals["e"] = e_function_total(data).to_json()
        pair = bhht_dual(f, G, S)
        out = {
            "instance": instance_spec(f, G, S),
            "n": f.n,
            "G_order": G.order,
            "S_order": S.order,
            "levels": levels,
            "totals": totals,
            "dual": instance_spec(pair.f_dual, pair.G_dual, S),
        }
        print(json.dumps(out, indent=2))
        return EXIT_OK
    print(f"f = {f}   n = {f.n}   |G| = {G.order}   |S| = {S.order}   classes = {len(data.classes)}")
    for r in reports:
        print(f"level {r.level.name}:")
        if "chi" in wanted:
            print(f"  chi = {r.chi_reduced if args.reduced else r.chi}" + ("  (reduced)" if args.reduced else ""))
        if "zeta" in wanted:
            print(f"  zeta = {r.zeta_reduced if args.reduced else r.zeta}")
        if "e" in wanted:
            print(f"  E = {format_efunction(r.e)}")
            if args.eprime:
                print(f"  E' = {format_efunction(e_function_level(data, r.level, eprime=True))}")
    if not args.level:
        print("total:")
        if "chi" in wanted:
            print(f"  chi = {chi_orb_total_reduced(data) if args.reduced else chi_orb_total(data)}")
        if "zeta" in wanted:
            print(f"  zeta = {zeta_orb_total(data, args.reduced)}")
        if "e" in wanted:
            print(f"  E = {format_efunction(e_function_total(data))}")
    return EXIT_OK


def _dual(args) -> int:
    f, G, S = parse_instance(load_json(args.file))
    pair = bhht_dual(f, G, S)
    print(json.dumps(instance_spec(pair.f_dual, pair.G_dual, S), indent=2))
    return EXIT_OK


def _verify(args) -> int:
    f, G, S = parse_instance(load_json(args.file))
    pair = bhht_dual(f, G, S)
    levels = "all" if args.levels == "all" else [x.strip() for x in args.levels.split(";")]
    report = verify_duality(pair, tuple(args.invariants.split(",")), levels)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        for lv in report.levels:
            flags = "  ".join(f"{k}={'ok' if v['ok'] else 'MISMATCH'}" for k, v in lv.items() if isinstance(v, dict))
            print(f"level {lv['level']}: {flags}")
        for k, v in report.totals.items():
            print(f"total {k}: {'ok' if v['ok'] else 'MISMATCH'}")
    return EXIT_OK if report.ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# sweep


def sweep_instances(cfg: dict):
    """Deterministic stream of (f, G, S) within the configured bounds."""
    max_order = cfg.get("max_group_order", 10**4)
    for f in enumerate_invertible(cfg["max_vars"], cfg["max_exponent"], cfg.get("max_det")):
        Gf = full_symmetry_group(f)
        perms = permutation_symmetries(f)
        s_groups = perms.subgroups()
        if cfg.get("require_pc", True):
            s_groups = [S for S in s_groups if pc_check(S)[0]]
        for G in Gf.subgroups():
            if G.order > max_order:
                continue
            for S in s_groups:
                if G.order * S.order > max_order:
                    continue
                if all(normalizes(s, G) for s in S.generators):
                    yield f, G, S


def _run_one(f, G, S) -> dict:
    spec = instance_spec(f, G, S)
    rec = {"hash": instance_hash(spec), "instance": spec}
    try:
        pair = bhht_dual(f, G, S)
        report = verify_duality(pair)
        rec["ok"] = report.ok
        rec["failures"] = report.failures()
        rec["levels"] = [lv["level"] for lv in report.levels]
        if assumptions_hold(f, G, S):
            data = pair.primal_data()
            rec["mirror_ok"] = e_level1_via_mirror(f, G, S) == e_function_level(data, data.levels[0])
    except IntegralityError as exc:
        rec["ok"] = False
        rec["error"] = f"{type(exc).__name__}: {exc}"
    return rec


def _sweep(args) -> int:
    cfg = load_json(args.config)
    for key in ("max_vars", "max_exponent"):
        if not isinstance(cfg.get(key), int) or cfg[key] <= 0:
            raise ParseError(f"config field {key!r} must be a positive integer")
    out_path = Path(cfg.get("output_path", "sweep.jsonl"))
    done_path = out_path.with_name(out_path.name + ".done")
    resume = cfg.get("resume", False) or args.resume
    done = set()
    if resume:
        logged = set()
        if done_path.exists():
            logged = {line.strip() for line in done_path.read_text().splitlines() if line.strip()}
        # the output file is authoritative: keep its complete records only, since an
        # interrupted write leaves a partial last line
        kept = []
        if out_path.exists():
            for line in out_path.read_text().splitlines():
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    continue
                kept.append(line)
                done.add(rec["hash"])
        out_path.write_text("".join(line + "\n" for line in kept))
        if logged - done:
            done_path.write_text("".join(h + "\n" for h in sorted(logged & done)))
    else:
        out_path.write_text("")
        done_path.write_text("")
    mismatches = 0
    count = 0
    with open(out_path, "a") as out, open(done_path, "a") as log:
        for f, G, S in sweep_instances(cfg):
            h = instance_hash(instance_spec(f, G, S))
            if h in done:
                continue
            rec = _run_one(f, G, S)
            out.write(json.dumps(rec, sort_keys=True) + "\n")
            out.flush()
            log.write(h + "\n")
            log.flush()
            done.add(h)
            count += 1
            if not rec["ok"] or rec.get("mirror_ok") is False:
                mismatches += 1
    print(f"{count} instances written to {out_path}; {mismatches} with violations")
    return EXIT_OK if mismatches == 0 else EXIT_MISMATCH


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lgorb", description="Orbifold invariants of invertible polynomials and BHHT duality checks.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="per-level and total invariants of an instance")
    a.add_argument("file")
    a.add_argument("--level", help="restrict to one level, e.g. '(1 3)(2 4)' or '1'")
    a.add_argument("--invariants", default="chi,zeta,e")
    a.add_argument("--reduced", action="store_true", help="print reduced chi and zeta")
    a.add_argument("--eprime", action="store_true", help="also print the unsigned E-function")
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=_analyze)

    d = sub.add_parser("dual", help="print the BHHT-dual instance")
    d.add_argument("file")
    d.set_defaults(func=_dual)

    v = sub.add_parser("verify", help="check the level-wise duality identities")
    v.add_argument("file")
    v.add_argument("--levels", default="all", help="'all' or level names separated by ';'")
    v.add_argument("--invariants", default="chi,zeta,e")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=_verify)

    s = sub.add_parser("sweep", help="enumerate small instances and verify each")
    s.add_argument("config")
    s.add_argument("--resume", action="store_true")
    s.set_defaults(func=_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IntegralityError as exc:
        print(f"integrality failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTEGRALITY


def run(argv=None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
