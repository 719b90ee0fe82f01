from math import comb, inf

import pytest
from hypothesis import given, strategies as st

from plumbing.polytopes import (LEAF, Cap, Mushroom, MetricRibbonTree, RibbonTree, ShrubFace, cap_faces,
                                cap_to_disc, catalan, coarse_face, corolla, disc_to_cap, enumerate_tree_types,
                                face_counts, graft, grafted_labels, is_compatible, is_normal, label_edges,
                                mushroom_boundary, mushroom_faces, mushroom_strata, normalize_mushroom,
                                painted_faces, parse_tree, planar_trees, polytope_report, shrub_boundary_maps,
                                shrub_faces, stasheff_boundary, to_sexpr)


def euler(counts):
    return sum((-1) ** k * v for k, v in counts.items())


def stasheff_counts(d):
    out = {}
    for t in enumerate_tree_types(d):
        out[t.face_dimension] = out.get(t.face_dimension, 0) + 1
    return out


def test_catalan():
    assert [catalan(n) for n in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]
    for n in range(8):
        assert catalan(n) == comb(2 * n, n) // (n + 1)


@pytest.mark.parametrize("d", range(2, 8))
def test_binary_trees_are_catalan(d):
    assert len(planar_trees(d, binary=True)) == catalan(d - 1)
    assert sum(1 for t in enumerate_tree_types(d) if t.is_trivalent()) == catalan(d - 1)


def test_associahedron_f_vectors():
    assert stasheff_counts(4) == {0: 5, 1: 5, 2: 1}
    assert stasheff_counts(5) == {0: 14, 1: 21, 2: 9, 3: 1}
    for d in range(2, 7):
        assert euler(stasheff_counts(d)) == 1


def test_stasheff_boundary():
    # facets of the associahedron: d(d-1)/2 - 1
    for d in range(3, 8):
        assert len(stasheff_boundary(d)) == d * (d - 1) // 2 - 1
        assert all(s["dimension"] == d - 3 for s in stasheff_boundary(d))
    assert [s["stratum"] for s in stasheff_boundary(3)] == ["(!(1 2) 3)", "(1 !(2 3))"]


def test_parse_roundtrip():
    for d in range(2, 6):
        for s in planar_trees(d):
            assert parse_tree(to_sexpr(s)) == s
    with pytest.raises(ValueError):
        parse_tree("(1 3)")
    with pytest.raises(ValueError):
        parse_tree("((1) 2)")


def test_from_cyclic():
    # one vertex c with output o and inputs a, b, c in cyclic order
    t = RibbonTree.from_cyclic({"o": ["v"], "v": ["o", "a", "w"], "a": ["v"],
                                "w": ["v", "b", "c"], "b": ["w"], "c": ["w"]}, "o")
    assert t.sexpr() == "(1 (2 3))"
    with pytest.raises(ValueError):
        RibbonTree.from_cyclic({"o": ["v"], "v": ["o", "a"], "a": ["v"]}, "o")


def test_label_edges():
    t = RibbonTree(parse_tree("((1 2) 3)"))
    labels = label_edges(t, (0, 1, 2, 3))
    assert labels[()] == (0, 3)
    assert labels[(0,)] == (0, 2)
    assert labels[(0, 1)] == (1, 2)
    assert labels[(1,)] == (2, 3)
    assert is_compatible(t, labels)
    labels[(1,)] = (3, 2)
    assert not is_compatible(t, labels)
    with pytest.raises(ValueError):
        label_edges(t, (0, 1))


def test_graft_labels():
    b = graft(corolla(2), corolla(2), 2, (0, 1, 2), (1, 3, 2))
    assert b.sexpr() == "(1 !(2 3))"
    assert grafted_labels((0, 1, 2), (1, 3, 2), 2) == (0, 1, 3, 2)
    with pytest.raises(ValueError):
        graft(corolla(2), corolla(2), 2, (0, 1, 2), (0, 3, 2))
    assert graft(corolla(3), LEAF, 1).sexpr() == "(1 2 3)"


def test_metric_tree_types():
    t = RibbonTree(parse_tree("((1 2) 3)"))
    assert MetricRibbonTree(t, {(0,): 0.0}).combinatorial_type().sexpr() == "(1 2 3)"
    assert MetricRibbonTree(t, {(0,): inf}).combinatorial_type().sexpr() == "(!(1 2) 3)"
    assert MetricRibbonTree(t, {(0,): 1.5}).combinatorial_type().sexpr() == "((1 2) 3)"
    with pytest.raises(ValueError):
        MetricRibbonTree(t, {(0,): -1.0})
    s = MetricRibbonTree(t, {(0,): 1.0}, "shrub", leaf_distance=2.0)
    assert s.input_lengths() == [1.0, 1.0, 2.0]
    with pytest.raises(ValueError):
        MetricRibbonTree(t, {(0,): 3.0}, "shrub", leaf_distance=2.0)


def test_shrub_f_vectors():
    # S̄_3 is a pentagon
    assert face_counts(shrub_faces(3)) == {0: 5, 1: 5, 2: 1}
    assert face_counts(shrub_faces(4)) == {0: 15, 1: 23, 2: 10, 3: 1}
    assert face_counts(shrub_faces(5)) == {0: 51, 1: 107, 2: 75, 3: 19, 4: 1}
    for d in range(1, 7):
        counts = face_counts(shrub_faces(d))
        assert euler(counts) == 1
        assert max(counts) == d - 1


def test_shrub_boundary():
    for d in range(2, 7):
        strata = shrub_boundary_maps(None, d)
        assert len(strata) == 2 ** (d - 1) - 1 + (d - 1)
        facets = {f.sexpr() for f in shrub_faces(d) if f.dimension == d - 2}
        assert {s.sexpr() for s in strata} == facets
    assert shrub_boundary_maps(None, 1) == []
    assert [s.params for s in shrub_boundary_maps(1, 3)] == [(1,), (2,)]
    assert [s.params for s in shrub_boundary_maps(2, 3)] == [(1, 2), (2, 1)]


def test_shrub_cofaces_go_up_one():
    for f in shrub_faces(4):
        for g in f.cofaces():
            assert g.dimension == f.dimension + 1
            assert g.d == f.d
    assert ShrubFace(LEAF, ((1, 2),)).sexpr() == "<1 {2 3}>"


def test_multiplihedron_f_vectors():
    # C̄_3 is a hexagon
    assert face_counts(painted_faces(3)) == {0: 6, 1: 6, 2: 1}
    assert face_counts(painted_faces(4)) == {0: 21, 1: 32, 2: 13, 3: 1}
    assert face_counts(painted_faces(5)) == {0: 80, 1: 165, 2: 110, 3: 25, 4: 1}
    for d in range(1, 6):
        assert euler(face_counts(painted_faces(d))) == 1


@pytest.mark.parametrize("d", range(1, 6))
def test_mushroom_and_painted_routes_agree(d):
    assert {f.sexpr() for f in mushroom_faces(d)} == {f.sexpr() for f in painted_faces(d)}


def test_mushroom_boundary():
    assert [len(mushroom_boundary(d)) for d in range(2, 7)] == [2, 6, 13, 25, 46]
    for d in range(2, 6):
        facets = {f.sexpr() for f in painted_faces(d) if f.dimension == d - 2}
        assert {s.sexpr() for s in mushroom_boundary(d)} == facets


def test_cap_disc_roundtrip():
    for m in range(1, 5):
        caps = cap_faces(m)
        assert len(caps) == len(planar_trees(m + 1))
        for c in caps:
            assert c.m == m
            assert disc_to_cap(cap_to_disc(c)) == c
    with pytest.raises(ValueError):
        Cap(((),))


def test_cap_glue_split():
    a, b = cap_faces(2)[0], cap_faces(1)[0]
    g = a.glue(b)
    assert g.m == 3
    assert g.split(len(a.spine)) == (a, b)


@given(st.integers(1, 4), st.data())
def test_normalize_is_idempotent(d, data):
    strata = mushroom_strata(d)
    m = data.draw(st.sampled_from(strata))
    n = normalize_mushroom(m)
    assert is_normal(n)
    assert normalize_mushroom(n) == n
    assert coarse_face(m) == coarse_face(n)


def test_normalize_glues_caps():
    one = cap_faces(1)[0]
    m = Mushroom(ShrubFace(LEAF, ((2,),)), (one, one))
    n = normalize_mushroom(m)
    assert n.caps == (one.glue(one),)
    assert n.stem == ShrubFace(LEAF, ((1,),))
    with pytest.raises(ValueError):
        Mushroom(ShrubFace(LEAF, ((2,),)), (one,))


def test_report_passes():
    rows = polytope_report(5)
    assert rows and all(r["pass"] for r in rows)
