import json

import pytest
from hypothesis import given, settings, strategies as st

from plumbing.simplicial import (Cochain, OrderedComplex, RelativeCochain, coboundary, cup, delta,
                                 dump_triangulation, load_triangulation, relative_generator, restrict,
                                 shriek, standard_embedding, unit, zero)

CIRCLE = OrderedComplex.from_maximal([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
SPHERE = OrderedComplex.boundary_of_simplex(3)


def random_cochain(q, degree, data):
    simplices = q.simplices_of_dim(degree)
    vals = data.draw(st.lists(st.integers(-3, 3), min_size=len(simplices), max_size=len(simplices)))
    return Cochain(q, degree, {s: v for s, v in zip(simplices, vals) if v})


def test_closure_and_order():
    q = OrderedComplex.from_maximal(["a", "b", "c"], [("c", "a", "b")])
    assert ("a", "b", "c") in q.simplices
    assert ("b", "c") in q.simplices
    assert q.dimension == 2
    with pytest.raises(ValueError):
        OrderedComplex.from_maximal([0, 1], [(0, 2)])
    with pytest.raises(ValueError):
        OrderedComplex.from_maximal([0, 1], [(0, 0)])
    with pytest.raises(ValueError):
        OrderedComplex((0, 1), frozenset({(1, 0), (0,), (1,)}))


def test_triangulation_roundtrip():
    data = dump_triangulation(SPHERE)
    assert load_triangulation(json.dumps(data)) == SPHERE
    with pytest.raises(ValueError):
        load_triangulation({"vertices": [0]})


def test_coboundary_of_vertex():
    d = coboundary(delta(CIRCLE, (1,)))
    assert d((0, 1)) == 1
    assert d((1, 2)) == -1
    assert d((0, 2)) == 0
    assert coboundary(zero(CIRCLE, 0)).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.data(), st.integers(0, 1))
def test_d_squared(data, p):
    a = random_cochain(SPHERE, p, data)
    assert coboundary(coboundary(a)).is_zero()


def test_cup_examples():
    e01 = delta(CIRCLE, (0, 1))
    v1 = delta(CIRCLE, (1,))
    assert cup(v1, e01).is_zero()
    assert cup(e01, v1) == e01
    for s in CIRCLE.all_simplices():
        b = delta(CIRCLE, s)
        assert cup(unit(CIRCLE), b) == b
        assert cup(b, unit(CIRCLE)) == b


@settings(max_examples=40, deadline=None)
@given(st.data(), st.integers(0, 1), st.integers(0, 1))
def test_leibniz(data, p, r):
    a = random_cochain(SPHERE, p, data)
    b = random_cochain(SPHERE, r, data)
    lhs = coboundary(cup(a, b))
    rhs = cup(coboundary(a), b) + cup(a, coboundary(b)).scale(-1 if p % 2 else 1)
    assert lhs == rhs


@settings(max_examples=30, deadline=None)
@given(st.data(), st.integers(0, 1), st.integers(0, 2))
def test_cup_associative(data, p, r):
    a = random_cochain(SPHERE, p, data)
    b = random_cochain(SPHERE, r, data)
    c = random_cochain(SPHERE, 0, data)
    assert cup(cup(a, b), c) == cup(a, cup(b, c))


def test_restriction():
    inc = standard_embedding(SPHERE, (0, 1, 2))
    assert restrict(unit(SPHERE), inc) == unit(inc.source)
    assert restrict(delta(SPHERE, (0, 1, 3)), inc).is_zero()
    assert restrict(delta(SPHERE, (1, 2)), inc) == delta(inc.source, (1, 2))


@settings(max_examples=30, deadline=None)
@given(st.data(), st.integers(0, 1), st.integers(0, 1))
def test_restriction_natural(data, p, r):
    inc = standard_embedding(SPHERE, (0, 2, 3))
    a = random_cochain(SPHERE, p, data)
    b = random_cochain(SPHERE, r, data)
    assert restrict(cup(a, b), inc) == cup(restrict(a, inc), restrict(b, inc))
    assert restrict(coboundary(a), inc) == coboundary(restrict(a, inc))


def test_shriek_of_generator():
    inc = standard_embedding(CIRCLE, (0, 1))
    gen = relative_generator(1)
    assert shriek(gen, inc) == delta(CIRCLE, (0, 1))
    assert shriek(relative_generator(1, 0), inc).is_zero()
    # restricting back recovers the relative cochain as an ordinary one
    assert restrict(shriek(gen, inc), inc) == gen.absolute()
    with pytest.raises(ValueError):
        shriek(delta(inc.source, (0,)), inc)


def test_relative_cochain_support():
    d = OrderedComplex.standard_simplex(1)
    with pytest.raises(ValueError):
        RelativeCochain(d, 0, {(0,): 1}, d.boundary_subcomplex((0, 1)))


def test_embedding_must_preserve_order():
    with pytest.raises(ValueError):
        standard_embedding(CIRCLE, (0, 1, 2))
    from plumbing.simplicial import SimplicialEmbedding
    with pytest.raises(ValueError):
        SimplicialEmbedding(OrderedComplex.standard_simplex(1), CIRCLE, {0: 1, 1: 0})


def test_relative_cochain_complex():
    d = OrderedComplex.standard_simplex(2)
    c = d.cochain_complex(relative_to=d.boundary_subcomplex((0, 1, 2)))
    assert c.module.ranks() == {2: 1}
