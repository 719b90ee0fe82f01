"""Command-line frontend.

Every command produces a report: a JSON list of
``{check, params, expected, computed, pass}`` entries sorted by check name
and parameters.  Exit codes: 0 when every entry passes, 1 when a
verification fails, 2 for unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import ainf, orientations, polytopes
from .algebra_core import TorsionObstruction, cohomology
from .plumbing_category import CleanPlumbingSpec, build_simp, build_simp_clean, load_plumbing_spec, verify_dg_axioms


class InputError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("PLUMBING_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"PLUMBING_THREADS must be an integer, got {raw!r}")


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}")


def _is_formal(data) -> bool:
    return isinstance(data, dict) and "generators" in data and "counts" in data


def _load_dg(path: str, koszul: bool = False):
    data = _read_json(path)
    try:
        spec = load_plumbing_spec(data, base_dir=str(Path(path).parent))
        if isinstance(spec, CleanPlumbingSpec):
            return build_simp_clean(spec, koszul=koszul), spec.n
        return build_simp(spec), spec.n
    except (ValueError, KeyError, TypeError, OSError) as exc:
        raise InputError(f"{path}: {exc}")


def _load_ainf(path: str, koszul: bool = False):
    data = _read_json(path)
    if _is_formal(data):
        try:
            return ainf.build_formal_category(ainf.FormalCountData.from_json(data))
        except ValueError as exc:
            raise InputError(f"{path}: {exc}")
    cat, n = _load_dg(path, koszul)
    return ainf.dg_to_ainf(cat, n)


def _sort(report: list[dict]) -> list[dict]:
    return sorted(report, key=lambda r: (r["check"], json.dumps(r["params"], sort_keys=True, default=str)))


def _run_parallel(jobs) -> list[dict]:
    """Run independent report producers; the result order does not depend on scheduling."""
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        parts = list(pool.map(lambda job: job(), jobs))
    return [row for part in parts for row in part]


def render(report: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"
    lines = []
    for r in report:
        flag = "PASS" if r["pass"] else "FAIL"
        lines.append(f"{flag} {r['check']} {json.dumps(r['params'], sort_keys=True, default=str)}")
        if not r["expected"]:
            lines.append(f"     {json.dumps(r['computed'], sort_keys=True, default=str)}")
        elif not r["pass"]:
            lines.append(f"     expected {json.dumps(r['expected'], sort_keys=True, default=str)}")
            lines.append(f"     computed {json.dumps(r['computed'], sort_keys=True, default=str)}")
    ok = sum(1 for r in report if r["pass"])
    lines.append(f"{ok}/{len(report)} checks passed")
    return "\n".join(lines) + "\n"


def _emit(report: list[dict], args) -> int:
    text = render(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r["pass"] for r in report) else 1


# ---------------------------------------------------------------------------
# commands


def hom_summary(cat) -> list[dict]:
    rows = []
    for (x, y), c in sorted(cat.hom.items()):
        h = cohomology(c)
        rows.append({"check": "hom", "params": {"hom": [x, y]}, "expected": {},
                     "computed": {"ranks": {str(p): r for p, r in sorted(c.module.ranks().items())},
                                  "cohomology": {str(p): {"rank": r, "torsion": t} for p, r, t in h if r or t}},
                     "pass": True})
    return rows


def cmd_build(args) -> int:
    cat, _ = _load_dg(args.spec, args.koszul)
    axioms = verify_dg_axioms(cat)
    summary = {"check": "dg_axioms", "params": {},
               "expected": {"failures": 0},
               "computed": {"checks": len(axioms), "failures": sum(1 for r in axioms if not r["pass"]),
                            "failed": sorted({r["check"] for r in axioms if not r["pass"]})},
               "pass": all(r["pass"] for r in axioms)}
    return _emit(_sort(hom_summary(cat) + [summary]), args)


def _verify_dg(args) -> list[dict]:
    cat, _ = _load_dg(args.input, args.koszul)
    return verify_dg_axioms(cat)


def _verify_ainf(args) -> list[dict]:
    cat = _load_ainf(args.input, args.koszul)
    return ainf.check_ainf_relations(cat, args.d_max or 4, max_strings=args.max_strings, seed=args.seed)


def _verify_functor(args) -> list[dict]:
    data = _read_json(args.input)
    try:
        F = ainf.functor_from_json(data)
    except ValueError as exc:
        raise InputError(f"{args.input}: {exc}")
    d_max = args.d_max or 4
    return _run_parallel([
        lambda: ainf.check_functor_equation(F, d_max, max_strings=args.max_strings, seed=args.seed),
        lambda: ainf.cohomology_functor_check(F),
    ])


def signs_report(d_max: int, samples: int, seed: int) -> list[dict]:
    if d_max < 3:
        raise InputError("--d-max must be at least 3 for the sign suite")
    jobs = [lambda d=d: orientations.wall_consistency(d) for d in range(3, d_max + 1)]
    jobs += [
        lambda: orientations.stasheff_lemma_report(d_max + 1),
        lambda: orientations.shrub_lemma_report(4, d_max),
        lambda: orientations.verify_ledger_shrub(samples, seed),
        lambda: orientations.verify_ledger_mushroom(samples, seed),
        lambda: [_pinning_row()],
    ]
    return _run_parallel(jobs)


def _pinning_row() -> dict:
    found = orientations.pin_conventions()
    return {"check": "orientation_conventions", "params": {"anchors": [list(map(str, a)) for a in orientations.ANCHORS]},
            "expected": {"solutions": [orientations.PINNED.__dict__]},
            "computed": {"solutions": [c.__dict__ for c in found]},
            "pass": found == [orientations.PINNED]}


def _verify_signs(args) -> list[dict]:
    return signs_report(args.d_max or 6, args.samples, args.seed)


def _verify_polytopes(args) -> list[dict]:
    return polytopes.polytope_report(args.d_max or 5)


VERIFIERS = {"dg": _verify_dg, "ainf": _verify_ainf, "functor": _verify_functor,
             "signs": _verify_signs, "polytopes": _verify_polytopes}


def cmd_verify(args) -> int:
    if args.kind in ("dg", "ainf", "functor") and not args.input:
        raise InputError(f"verify {args.kind} needs an input file")
    return _emit(_sort(VERIFIERS[args.kind](args)), args)


def minimal_model_report(cat, d_max: int, prime=None):
    try:
        minimal, incl = ainf.minimal_model(cat, d_max, prime=prime)
    except TorsionObstruction as exc:
        return None, [{"check": "minimal_model", "params": {"d_max": d_max, "prime": prime},
                       "expected": {"torsion_free": True}, "computed": {"error": str(exc)}, "pass": False}]
    rows = []
    for x in minimal.objects:
        for y in minimal.objects:
            src = cohomology(cat.differential_complex(x, y)) if cat.hom(x, y) else []
            ranks = minimal.hom_module(x, y).ranks() if minimal.hom(x, y) else {}
            want = {str(p): r for p, r, t in src if r}
            if prime is None and any(t for _, _, t in src):
                want = None
            got = {str(p): r for p, r in sorted(ranks.items())}
            rows.append({"check": "minimal_hom_ranks", "params": {"hom": [x, y]},
                         "expected": {"ranks": want}, "computed": {"ranks": got},
                         "pass": want is None or want == got})
    arities = {str(d): len(t) for d, t in sorted(minimal.mu.items())}
    rows.append({"check": "minimal_structure", "params": {"d_max": d_max, "prime": prime},
                 "expected": {"mu_1": 0}, "computed": {"entries_per_arity": arities},
                 "pass": 1 not in minimal.mu})
    # relations on the emitted model after a JSON round trip
    again = ainf.build_formal_category(ainf.FormalCountData.from_json(
        json.loads(json.dumps(minimal.to_json(), sort_keys=True))))
    if prime is None:
        rows += [dict(r, check="reimport_" + r["check"]) for r in ainf.check_ainf_relations(again, d_max)]
        rows += ainf.cohomology_functor_check(incl)
        rows += [dict(r, check="inclusion_" + r["check"]) for r in ainf.check_functor_equation(incl, d_max)]
    return minimal, rows


def cmd_minimal_model(args) -> int:
    cat = _load_ainf(args.input, args.koszul)
    minimal, rows = minimal_model_report(cat, args.d_max or 4, args.prime)
    if minimal is not None and args.model_out:
        Path(args.model_out).write_text(json.dumps(minimal.to_json(), sort_keys=True, indent=2) + "\n")
    return _emit(_sort(rows), args)


def enumerate_faces(family: str, d: int) -> list[dict]:
    if family == "stasheff":
        if d < 2:
            raise InputError("Stasheff trees need d >= 2")
        faces = [(t.sexpr(), t.face_dimension) for t in polytopes.enumerate_tree_types(d)]
    elif family == "shrub":
        faces = [(f.sexpr(), f.dimension) for f in polytopes.shrub_faces(d)]
    elif family == "mushroom":
        faces = [(f.sexpr(), f.dimension) for f in polytopes.painted_faces(d)]
    else:
        raise InputError(f"unknown family {family!r}")
    faces.sort(key=lambda t: (-t[1], t[0]))
    return [{"check": f"{family}_face", "params": {"d": d, "face": s}, "expected": {},
             "computed": {"dimension": k}, "pass": True} for s, k in faces]


def cmd_polytopes(args) -> int:
    if args.d < 1:
        raise InputError("d must be positive")
    return _emit(enumerate_faces(args.family, args.d), args)


def sign_value(name: str, params: dict) -> dict:
    try:
        if name == "boundary_stasheff":
            d1, d2, k = params["d1"], params["d2"], params["k"]
            row = {"formula": orientations.boundary_sign_stasheff(d1, d2, k)}
            if d1 >= 2 and d2 >= 2:
                row["first_principles"] = orientations.stasheff_sign_first_principles(d1, d2, k)["parities"]
            return row
        if name == "boundary_shrub_break":
            parts = list(params["parts"])
            row = {"formula": orientations.boundary_sign_shrub("break", parts)}
            if len(parts) >= 2:
                row["first_principles"] = orientations.shrub_break_first_principles(parts)["parities"]
            return row
        if name == "boundary_shrub_collapse":
            d, k = params["d"], params["k"]
            return {"formula": orientations.boundary_sign_shrub("collapse", k),
                    "first_principles": orientations.shrub_collapse_first_principles(d, k)["parities"]}
        return {"formula": orientations.sign_twists(name, params)}
    except KeyError as exc:
        raise InputError(f"missing parameter {exc}")
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc))


def cmd_signs(args) -> int:
    try:
        params = json.loads(args.params)
    except json.JSONDecodeError as exc:
        raise InputError(f"--params: line {exc.lineno} column {exc.colno}: {exc.msg}")
    value = sign_value(args.name, params)
    ok = "first_principles" not in value or value["first_principles"] == [value["formula"]]
    row = {"check": "sign", "params": {"name": args.name, **params}, "expected": {},
           "computed": value, "pass": ok}
    return _emit([row], args)


def cmd_formal_import(args) -> int:
    data = _read_json(args.input)
    if not _is_formal(data):
        raise InputError(f"{args.input}: not a formal-count document")
    try:
        cat = ainf.build_formal_category(ainf.FormalCountData.from_json(data))
    except ValueError as exc:
        raise InputError(f"{args.input}: {exc}")
    if args.model_out:
        Path(args.model_out).write_text(json.dumps(cat.to_json(), sort_keys=True, indent=2) + "\n")
    report = ainf.check_ainf_relations(cat, args.d_max or 4, max_strings=args.max_strings, seed=args.seed)
    return _emit(_sort(report), args)


# ---------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d-max", type=int, default=None, help="largest arity checked")
    p.add_argument("--seed", type=int, default=0, help="seed for all sampling")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plumbing", description="Combinatorial models of plumbings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build the DG category of a plumbing spec")
    p.add_argument("spec")
    p.add_argument("--koszul", action="store_true", help="use graded-shift signs for shifted components")
    _common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("kind", choices=sorted(VERIFIERS))
    p.add_argument("input", nargs="?")
    p.add_argument("--koszul", action="store_true")
    p.add_argument("--max-strings", type=int, default=None, help="sample this many input strings per arity")
    p.add_argument("--samples", type=int, default=1000, help="random samples per sign ledger")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("minimal-model", help="transfer to cohomology and check the result")
    p.add_argument("input")
    p.add_argument("--prime", type=int, default=None, help="work modulo this prime")
    p.add_argument("--model-out", default=None, help="write the minimal model (formal-count JSON)")
    p.add_argument("--koszul", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_minimal_model)

    p = sub.add_parser("polytopes", help="face enumeration")
    psub = p.add_subparsers(dest="action", required=True)
    q = psub.add_parser("enumerate")
    q.add_argument("family", choices=("stasheff", "shrub", "mushroom"))
    q.add_argument("d", type=int)
    _common(q)
    q.set_defaults(func=cmd_polytopes)

    p = sub.add_parser("signs", help="evaluate sign formulas")
    psub = p.add_subparsers(dest="action", required=True)
    q = psub.add_parser("check")
    q.add_argument("name", choices=orientations.SIGN_NAMES + (
        "boundary_stasheff", "boundary_shrub_break", "boundary_shrub_collapse"))
    q.add_argument("--params", default="{}", help="JSON object of parameters")
    _common(q)
    q.set_defaults(func=cmd_signs)

    p = sub.add_parser("formal", help="formal-count files")
    psub = p.add_subparsers(dest="action", required=True)
    q = psub.add_parser("import")
    q.add_argument("input")
    q.add_argument("--model-out", default=None, help="write the untwisted model")
    q.add_argument("--max-strings", type=int, default=None)
    _common(q)
    q.set_defaults(func=cmd_formal_import)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
