import json

import pytest

from plumbing.ainf import (AInfCategory, AInfFunctor, FormalCountData, build_formal_category,
                           check_ainf_relations, check_functor_equation, cohomology_functor_check, dagger,
                           dg_to_ainf, functor_from_json, functor_to_json, identity_functor, maltese,
                           minimal_model, relation_value, twist_exponent)
from plumbing.algebra_core import TorsionObstruction, cohomology
from plumbing.plumbing_category import DGCategory, build_simp, circle_spec, sphere_spec
from plumbing.simplicial import Cochain, OrderedComplex, cup, simplex_label


def failed(report):
    return [r for r in report if not r["pass"]]


def cochain_algebra(q, obj="Q"):
    """C*(q) as a one-object DG category."""
    c = q.cochain_complex()
    by_label = {simplex_label(s): s for s in q.all_simplices()}
    table = {}
    for l2, s2 in by_label.items():
        for l1, s1 in by_label.items():
            v = cup(Cochain(q, len(s2) - 1, {s2: 1}), Cochain(q, len(s1) - 1, {s1: 1})).values
            if v:
                table[(l2, l1)] = {simplex_label(s): k for s, k in v.items()}
    unit = {simplex_label((v,)): 1 for v in q.vertices}
    return DGCategory((obj,), {(obj, obj): c}, {(obj, obj, obj): table}, {obj: unit})


CIRCLE = OrderedComplex.from_maximal([0, 1, 2], [(0, 1), (1, 2), (0, 2)])


def morse_circle(mode="raw", flip=False):
    """Height function on the circle: a minimum m and a maximum M."""
    counts = [{"d": 2, "out": "m", "in": ["m", "m"], "coeff": 1},
              {"d": 2, "out": "M", "in": ["M", "m"], "coeff": 1},
              {"d": 2, "out": "M", "in": ["m", "M"], "coeff": 1 if flip else -1}]
    return {"n": 1, "mode": mode, "objects": ["Q"],
            "generators": [{"id": "m", "source": "Q", "target": "Q", "degree": 0},
                           {"id": "M", "source": "Q", "target": "Q", "degree": 1}],
            "counts": counts}


def test_maltese_and_dagger():
    assert maltese(2, [1, 3]) % 2 == 0
    assert maltese(0, []) == 0
    assert dagger([1, 0, 2]) == 7


def test_twist_exponents():
    assert twist_exponent("morse", 2, 0, [0, 0]) == 0
    # n = 1, x0 of degree 1, inputs (1, 0): dagger = 1, (n+1)(1+1) even
    assert twist_exponent("morse", 1, 1, [1, 0]) == 0
    # the differential also carries (-1)^n
    assert twist_exponent("morse", 1, 1, [0]) == 1
    assert twist_exponent("morse", 0, 1, [0]) == 1
    assert twist_exponent("fukaya", 3, 0, [1, 1]) == 1
    assert twist_exponent("fukaya", 3, 0, []) == 0
    assert twist_exponent("raw", 5, 1, [1, 1, 1]) == 0
    with pytest.raises(ValueError):
        twist_exponent("floer", 0, 0, [])


def test_dg_twist_signs():
    cat = dg_to_ainf(cochain_algebra(CIRCLE))
    # degree 0 inputs: untwisted product
    assert cat.apply(2, [{"[0]": 1}, {"[0]": 1}]) == {"[0]": 1}
    # degree 0 generator: mu_1 is d with the sign (-1)^0
    assert cat.apply(1, [{"[1]": 1}]) == {"[0,1]": 1, "[1,2]": -1}
    # mu_2(a2, a1) with |a1| = 1 picks up a sign, with |a1| = 0 it does not
    assert cat.apply(2, [{"[0]": 1}, {"[0,1]": 1}]) == {"[0,1]": -1}
    assert cat.apply(2, [{"[0,1]": 1}, {"[1]": 1}]) == {"[0,1]": 1}


def test_relations_on_plumbings():
    for spec in (circle_spec(), sphere_spec()):
        cat = dg_to_ainf(build_simp(spec), spec.n)
        assert failed(check_ainf_relations(cat, 4)) == []


def test_relation_d1_is_square_zero():
    cat = dg_to_ainf(cochain_algebra(CIRCLE))
    for w, _ in cat.strings(1):
        assert relation_value(cat, w) == {}


def test_untwisted_product_fails_at_three():
    dg = build_simp(circle_spec())
    plain = {}
    for table in dg.products.values():
        for k, v in table.items():
            plain[k] = dict(v)
    cat = dg_to_ainf(dg, 1)
    broken = AInfCategory(cat.objects, cat.generators, {2: plain}, 1)
    report = check_ainf_relations(broken, 4)
    assert [r["params"]["d"] for r in failed(report)] == [3]
    assert failed(report)[0]["computed"]["inputs"]


def test_corrupt_shriek_fails_at_three():
    cat = dg_to_ainf(build_simp(circle_spec(), corrupt_shriek=True), 1)
    assert [r["params"]["d"] for r in failed(check_ainf_relations(cat, 4))] == [3]


def test_formal_morse_circle():
    for mode in ("raw", "morse"):
        cat = build_formal_category(FormalCountData.from_json(morse_circle(mode)))
        assert failed(check_ainf_relations(cat, 5)) == []
    bad = build_formal_category(FormalCountData.from_json(morse_circle(flip=True)))
    assert failed(check_ainf_relations(bad, 5))


def test_formal_count_validation():
    data = morse_circle()
    data["counts"].append({"d": 2, "out": "M", "in": ["M", "M"], "coeff": 1})
    with pytest.raises(ValueError, match="degree"):
        build_formal_category(FormalCountData.from_json(data))
    with pytest.raises(ValueError):
        FormalCountData.from_json({"objects": ["Q"]})
    with pytest.raises(ValueError):
        FormalCountData.from_json(dict(morse_circle(), mode="symplectic"))


def test_category_validation():
    with pytest.raises(ValueError, match="violations"):
        AInfCategory(("Q",), {"a": ("Q", "Q", 0)}, {2: {("a", "a"): {"a": 1}}, 3: {("a", "a", "a"): {"a": 1}}})
    with pytest.raises(ValueError):
        AInfCategory(("Q",), {"a": ("Q", "R", 0)}, {})


def test_sampling_is_seeded():
    cat = dg_to_ainf(build_simp(sphere_spec()), 2)
    a = check_ainf_relations(cat, 3, max_strings=20, seed=4)
    b = check_ainf_relations(cat, 3, max_strings=20, seed=4)
    assert a == b
    assert a[-1]["computed"]["sampled"] is True


def test_identity_functor():
    cat = dg_to_ainf(build_simp(circle_spec()), 1)
    F = identity_functor(cat)
    assert failed(check_functor_equation(F, 3)) == []
    assert failed(cohomology_functor_check(F)) == []


def test_non_chain_map_caught():
    src = dg_to_ainf(cochain_algebra(CIRCLE))
    tgt = build_formal_category(FormalCountData.from_json(morse_circle()))
    F1 = {("[0]",): {"m": 1}, ("[0,1]",): {"M": 2}, ("[1,2]",): {"M": 1}, ("[0,2]",): {"M": -1}}
    F = AInfFunctor(src, tgt, {"Q": "Q"}, {1: F1})
    report = check_functor_equation(F, 2)
    assert report[0]["params"]["d"] == 1 and not report[0]["pass"]


# F^1, F^2, F^3 of a functor from C*(circle) to the formal Morse circle.
# The higher components were solved for independently (linear algebra over Q
# on the functor equations up to d = 3) and frozen here.
F1_TABLE = {("[0]",): {"m": 1}, ("[0,1]",): {"M": 1}, ("[1,2]",): {"M": 1}, ("[0,2]",): {"M": -1}}
F2_TABLE = {("[0,1]", "[0,2]"): {"M": -1}, ("[0,1]", "[1,2]"): {"M": 1}, ("[0,2]", "[0,2]"): {"M": 1},
            ("[0,2]", "[0]"): {"m": 1}, ("[0,2]", "[2]"): {"m": -1}, ("[0]", "[0,2]"): {"m": 1},
            ("[1,2]", "[0,2]"): {"M": -1}, ("[2]", "[0,2]"): {"m": -1}}
F3_TABLE = {("[0,1]", "[1,2]", "[0,2]"): {"M": -1}, ("[0,2]", "[0,2]", "[0,1]"): {"M": 1},
            ("[0,2]", "[0,2]", "[0,2]"): {"M": -1}, ("[0,2]", "[0,2]", "[0]"): {"m": 1},
            ("[0,2]", "[0,2]", "[1,2]"): {"M": 1}, ("[0,2]", "[0,2]", "[2]"): {"m": -1},
            ("[0,2]", "[0]", "[0,2]"): {"m": 1}, ("[0,2]", "[2]", "[0,2]"): {"m": -1}}


def simplicial_to_morse(tables=(F1_TABLE, F2_TABLE, F3_TABLE)):
    src = dg_to_ainf(cochain_algebra(CIRCLE))
    tgt = build_formal_category(FormalCountData.from_json(morse_circle()))
    F = {d: {k: dict(v) for k, v in t.items()} for d, t in enumerate(tables, start=1)}
    return AInfFunctor(src, tgt, {"Q": "Q"}, F)


def test_functor_to_morse_model():
    F = simplicial_to_morse()
    assert failed(check_functor_equation(F, 3)) == []
    assert failed(cohomology_functor_check(F)) == []
    # F^1 alone is not enough: the cup product is not graded commutative on cochains
    trunc = simplicial_to_morse((F1_TABLE,))
    assert [r["params"]["d"] for r in failed(check_functor_equation(trunc, 3))] == [2]


def test_functor_fault_injection():
    f2 = dict(F2_TABLE)
    f2[("[0,2]", "[0]")] = {"m": -1}
    tables = (F1_TABLE, f2, F3_TABLE)
    report = check_functor_equation(simplicial_to_morse(tables), 3)
    bad = failed(report)
    assert bad and bad[0]["computed"]["inputs"]


def test_strict_functor_from_morse_model():
    src = build_formal_category(FormalCountData.from_json(morse_circle()))
    tgt = dg_to_ainf(cochain_algebra(CIRCLE))
    F1 = {("m",): {"[0]": 1, "[1]": 1, "[2]": 1}, ("M",): {"[0,1]": 1}}
    F = AInfFunctor(src, tgt, {"Q": "Q"}, {1: F1})
    assert failed(check_functor_equation(F, 5)) == []
    assert failed(cohomology_functor_check(F)) == []


def test_zero_functor_not_quasi_iso():
    src = build_formal_category(FormalCountData.from_json(morse_circle()))
    tgt = dg_to_ainf(cochain_algebra(CIRCLE))
    F = AInfFunctor(src, tgt, {"Q": "Q"}, {})
    assert failed(check_functor_equation(F, 3)) == []
    assert failed(cohomology_functor_check(F))


def test_functor_json_roundtrip():
    F = simplicial_to_morse()
    doc = json.loads(json.dumps(functor_to_json(F)))
    G = functor_from_json(doc)
    assert G.F == F.F
    assert failed(check_functor_equation(G, 3)) == []
    doc["components"][0]["out"] = "nowhere"
    with pytest.raises(ValueError):
        functor_from_json(doc)


def test_functor_degree_validation():
    src = build_formal_category(FormalCountData.from_json(morse_circle()))
    with pytest.raises(ValueError):
        AInfFunctor(src, src, {"Q": "Q"}, {1: {("m",): {"M": 1}}})


def test_minimal_model_of_formal_input():
    cat = build_formal_category(FormalCountData.from_json(morse_circle()))
    minimal, incl = minimal_model(cat, 4)
    ren = {h: next(iter(v)) for (h,), v in incl.F[1].items()}
    assert all(list(v.values()) == [1] for v in incl.F[1].values())
    assert sorted(ren.values()) == sorted(cat.generators)
    moved = {d: {tuple(ren[g] for g in k): {ren[o]: c for o, c in v.items()} for k, v in t.items()}
             for d, t in minimal.mu.items()}
    assert moved == cat.mu
    assert set(incl.F) == {1}


def test_minimal_model_of_circle_cochains():
    cat = dg_to_ainf(cochain_algebra(CIRCLE))
    minimal, incl = minimal_model(cat, 5)
    assert minimal.hom_module("Q", "Q").ranks() == {0: 1, 1: 1}
    top = [g for g, (_, _, k) in minimal.generators.items() if k == 1]
    assert (top[0],) * 3 not in minimal.mu.get(3, {})
    assert failed(check_ainf_relations(minimal, 5)) == []
    assert failed(check_functor_equation(incl, 4)) == []
    assert failed(cohomology_functor_check(incl)) == []


def test_minimal_model_of_plumbing():
    spec = circle_spec()
    cat = dg_to_ainf(build_simp(spec), spec.n)
    minimal, incl = minimal_model(cat, 4)
    for x in cat.objects:
        for y in cat.objects:
            h = cohomology(cat.differential_complex(x, y))
            assert minimal.hom_module(x, y).ranks() == {p: r for p, r, _ in h if r}
    assert 1 not in minimal.mu
    assert failed(check_ainf_relations(minimal, 5)) == []
    assert failed(cohomology_functor_check(incl)) == []
    again = build_formal_category(FormalCountData.from_json(json.dumps(minimal.to_json())))
    assert failed(check_ainf_relations(again, 5)) == []


def test_minimal_model_torsion():
    tris = [[1, 2, 3], [1, 3, 4], [1, 4, 5], [1, 5, 6], [1, 6, 2],
            [2, 3, 5], [3, 4, 6], [4, 5, 2], [5, 6, 3], [6, 2, 4]]
    rp2 = OrderedComplex.from_maximal(range(1, 7), tris)
    cat = dg_to_ainf(cochain_algebra(rp2))
    with pytest.raises(TorsionObstruction):
        minimal_model(cat, 3)
    minimal, _ = minimal_model(cat, 3, prime=2)
    assert minimal.hom_module("Q", "Q").ranks() == {0: 1, 1: 1, 2: 1}
