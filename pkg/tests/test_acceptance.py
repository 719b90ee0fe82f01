"""Acceptance suite: one test per criterion, each printing a single verdict line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.  All
comparisons are exact integer equality; the only tolerances are the
wall-clock budgets below.
"""

import json
import time

from plumbing.ainf import (AInfFunctor, FormalCountData, build_formal_category, check_ainf_relations,
                           check_functor_equation, dg_to_ainf, identity_functor)
from plumbing.algebra_core import cohomology
from plumbing.cli import main
from plumbing.orientations import (shrub_lemma_report, stasheff_lemma_report, verify_ledger_mushroom,
                                   verify_ledger_shrub, wall_consistency)
from plumbing.plumbing_category import Q1, Q2, build_simp, circle_spec, sphere_spec, verify_dg_axioms
from plumbing.polytopes import (catalan, enumerate_tree_types, face_counts, mushroom_faces,
                                painted_vertex_count)
from plumbing.simplicial import dump_triangulation

BUDGET_DG = 10.0
BUDGET_RANKS = 1.0
BUDGET_POLYTOPES = 30.0
BUDGET_ORIENTATIONS = 60.0
BUDGET_LEDGERS = 30.0

MORSE = {"n": 1, "mode": "raw", "objects": ["Q"],
         "generators": [{"id": "m", "source": "Q", "target": "Q", "degree": 0},
                        {"id": "M", "source": "Q", "target": "Q", "degree": 1}],
         "counts": [{"d": 2, "out": "m", "in": ["m", "m"], "coeff": 1},
                    {"d": 2, "out": "M", "in": ["M", "m"], "coeff": 1},
                    {"d": 2, "out": "M", "in": ["m", "M"], "coeff": -1}]}


def verdict(n, label, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {label} {detail}".rstrip())
    assert ok, detail


def test_criterion_1_dg_axioms():
    t = time.perf_counter()
    bad, counts = [], {}
    for name, spec in (("circle", circle_spec()), ("sphere", sphere_spec())):
        rows = verify_dg_axioms(build_simp(spec))
        bad += [(name, r["check"], r["params"]) for r in rows if not r["pass"]]
        for r in rows:
            counts[r["check"]] = counts.get(r["check"], 0) + 1
    elapsed = time.perf_counter() - t
    ok = not bad and counts.get("associativity") == 16 and counts.get("leibniz") == 16 \
        and counts.get("d_squared", 0) > 0 and elapsed < BUDGET_DG
    verdict(1, "DG axioms on both plumbings", ok, f"failures={bad} counts={counts} t={elapsed:.2f}s")


def test_criterion_2_ranks():
    t = time.perf_counter()
    found = {}
    for name, spec in (("circle", circle_spec()), ("sphere", sphere_spec())):
        cat = build_simp(spec)
        back = cat.hom[(Q2, Q1)].module.ranks()
        h = {p: (r, tuple(tor)) for p, r, tor in cohomology(cat.hom[(Q1, Q2)]) if r or tor}
        found[name] = (back == {spec.n: 1}, h == {0: (1, ())})
    elapsed = time.perf_counter() - t
    ok = all(a and b for a, b in found.values()) and elapsed < BUDGET_RANKS
    verdict(2, "rank of Hom(Q2,Q1) and support of H(Hom(Q1,Q2))", ok, f"{found} t={elapsed:.3f}s")


def test_criterion_3_ainf_relations():
    bad = []
    for name, spec in (("circle", circle_spec()), ("sphere", sphere_spec())):
        rows = check_ainf_relations(dg_to_ainf(build_simp(spec), spec.n), 4)
        bad += [(name, r["params"]) for r in rows if not r["pass"]]
    verdict(3, "A-infinity relations of the twisted DG category to d=4", not bad, f"failures={bad}")


def test_criterion_4_polytopes():
    t = time.perf_counter()
    trivalent = [sum(1 for tr in enumerate_tree_types(d) if tr.is_trivalent()) for d in range(2, 8)]
    vertices = {d: face_counts(mushroom_faces(d)).get(0, 0) for d in range(1, 6)}
    oracle = {d: painted_vertex_count(d) for d in range(1, 6)}
    dims = {d: max(face_counts(mushroom_faces(d))) for d in range(1, 7)}
    elapsed = time.perf_counter() - t
    ok = trivalent == [1, 2, 5, 14, 42, 132] == [catalan(d - 1) for d in range(2, 8)] \
        and vertices == oracle and dims == {d: d - 1 for d in range(1, 7)} and elapsed < BUDGET_POLYTOPES
    verdict(4, "polytope counts against oracles", ok,
            f"trivalent={trivalent} vertices={vertices} dims={dims} t={elapsed:.2f}s")


def test_criterion_5_orientation_lemmas():
    t = time.perf_counter()
    rows = stasheff_lemma_report(7) + shrub_lemma_report(4, 6)
    rows += [r for d in range(3, 7) for r in wall_consistency(d)]
    elapsed = time.perf_counter() - t
    bad = [(r["check"], r["params"]) for r in rows if not r["pass"]]
    ok = not bad and elapsed < BUDGET_ORIENTATIONS
    verdict(5, "boundary orientation lemmas and wall consistency", ok,
            f"checked={len(rows)} failures={bad[:3]} t={elapsed:.2f}s")


def test_criterion_6_sign_ledgers():
    t = time.perf_counter()
    rows = verify_ledger_shrub(1000, seed=0, corners=True) + verify_ledger_mushroom(1000, seed=0, corners=True)
    elapsed = time.perf_counter() - t
    bad = [r["check"] for r in rows if not r["pass"]]
    sizes = sorted({r["params"]["samples"] for r in rows})
    ok = not bad and min(sizes) > 1000 and elapsed < BUDGET_LEDGERS
    verdict(6, "sign ledgers on corners plus 1000 samples", ok, f"failures={bad} pools={sizes} t={elapsed:.2f}s")


def test_criterion_7_functors():
    morse = build_formal_category(FormalCountData.from_json(MORSE))
    plumbing = dg_to_ainf(build_simp(circle_spec()), 1)
    clean = [all(r["pass"] for r in check_functor_equation(identity_functor(c), 3)) for c in (morse, plumbing)]
    clean.append(all(r["pass"] for r in check_ainf_relations(morse, 5)))
    # faults: doubling the unit breaks F(m m) = F(m) F(m); a count with the wrong sign
    scaled = AInfFunctor(morse, morse, {"Q": "Q"}, {1: {("m",): {"m": 2}, ("M",): {"M": 1}}})
    f1 = [r for r in check_functor_equation(scaled, 3) if not r["pass"]]
    flipped = json.loads(json.dumps(MORSE))
    flipped["counts"][2]["coeff"] = 1
    f2 = [r for r in check_ainf_relations(build_formal_category(FormalCountData.from_json(flipped)), 4)
          if not r["pass"]]
    witnesses = bool(f1 and f1[0]["computed"].get("inputs")) and bool(f2 and f2[0]["computed"].get("inputs"))
    ok = all(clean) and witnesses
    verdict(7, "functor equations with fault injection", ok,
            f"clean={clean} faults=({len(f1)}, {len(f2)}) witnesses={witnesses}")


def test_criterion_8_minimal_models(tmp_path, capsys):
    spec_file = tmp_path / "circle.json"
    spec = circle_spec()
    spec_file.write_text(json.dumps({"q1": dump_triangulation(spec.q1), "q2": dump_triangulation(spec.q2),
                                     "delta1": list(spec.delta1), "delta2": list(spec.delta2)}))
    outs, models, codes = [], [], []
    for i in range(2):
        out, model = tmp_path / f"r{i}.json", tmp_path / f"m{i}.json"
        codes.append(main(["minimal-model", str(spec_file), "--seed", "11", "--out", str(out),
                           "--model-out", str(model)]))
        outs.append(out.read_bytes())
        models.append(model.read_bytes())
    rows = json.loads(outs[0])
    rank_rows = [r for r in rows if r["check"] == "minimal_hom_ranks"]
    ranks_ok = len(rank_rows) == 4 and all(r["pass"] and r["expected"]["ranks"] is not None for r in rank_rows)
    reimport_ok = any(r["check"].startswith("reimport_") for r in rows) and \
        all(r["pass"] for r in rows if r["check"].startswith("reimport_"))
    codes.append(main(["formal", "import", str(tmp_path / "m0.json"), "--d-max", "4", "--out",
                       str(tmp_path / "imp.json")]))
    capsys.readouterr()
    identical = outs[0] == outs[1] and models[0] == models[1]
    ok = codes == [0, 0, 0] and ranks_ok and reimport_ok and identical
    verdict(8, "minimal model ranks, re-import and determinism", ok,
            f"exit={codes} ranks={ranks_ok} reimport={reimport_ok} identical={identical}")
