from itertools import combinations, permutations
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from plumbing.algebra_core import (ChainComplex, GradedModule, GradedWord, TorsionObstruction, cohomology,
                                   determinant, identity, invariant_factors, koszul_sign, matmul, shift,
                                   smith_normal_form, split_complex)
from plumbing.simplicial import OrderedComplex


def minors_gcd(m, k):
    """gcd of all k x k minors; the determinantal-divisor route to invariant factors."""
    rows, cols = len(m), len(m[0])
    g = 0
    for rs in combinations(range(rows), k):
        for cs in combinations(range(cols), k):
            g = gcd(g, determinant([[m[r][c] for c in cs] for r in rs]))
    return g


def factors_by_minors(m):
    out, prev = [], 1
    for k in range(1, min(len(m), len(m[0])) + 1):
        g = minors_gcd(m, k)
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def test_snf_identity():
    left, diag, right = smith_normal_form(identity(2))
    assert left == diag == right == identity(2)


def test_snf_zero():
    left, diag, right = smith_normal_form([[0, 0], [0, 0], [0, 0]])
    assert diag == [[0, 0], [0, 0], [0, 0]]
    assert left == identity(3) and right == identity(2)


def test_snf_small():
    _, diag, _ = smith_normal_form([[2, 1], [0, 2]])
    assert [diag[0][0], diag[1][1]] == [1, 4]
    assert factors_by_minors([[2, 1], [0, 2]]) == [1, 4]


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_properties(m):
    left, diag, right = smith_normal_form(m)
    rows, cols = len(m), len(m[0])
    assert matmul(matmul(left, m, rows), right, cols) == diag
    assert abs(determinant(left)) == 1 and abs(determinant(right)) == 1
    for i in range(rows):
        for j in range(cols):
            if i != j:
                assert diag[i][j] == 0
    f = invariant_factors(m)
    assert all(x > 0 for x in f)
    assert all(f[i + 1] % f[i] == 0 for i in range(len(f) - 1))
    assert f == factors_by_minors(m)


def circle_complex():
    q = OrderedComplex.from_maximal([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
    return q.cochain_complex()


def test_circle_cohomology():
    assert cohomology(circle_complex()) == [(0, 1, []), (1, 1, [])]


def test_zero_differential_cohomology():
    c = ChainComplex(GradedModule((("a", 0), ("b", 0), ("c", 3))))
    assert cohomology(c) == [(0, 2, []), (3, 1, [])]


def test_projective_plane_torsion():
    tris = [[1, 2, 3], [1, 3, 4], [1, 4, 5], [1, 5, 6], [1, 6, 2],
            [2, 3, 5], [3, 4, 6], [4, 5, 2], [5, 6, 3], [6, 2, 4]]
    rp2 = OrderedComplex.from_maximal(range(1, 7), tris)
    h = cohomology(rp2.cochain_complex())
    assert h == [(0, 1, []), (1, 0, []), (2, 0, [2])]
    with pytest.raises(TorsionObstruction):
        split_complex(rp2.cochain_complex())
    # over GF(3) the torsion disappears, over GF(2) it does not
    assert split_complex(rp2.cochain_complex(), prime=3).module.ranks() == {0: 1}
    assert split_complex(rp2.cochain_complex(), prime=2).module.ranks() == {0: 1, 1: 1, 2: 1}


def test_bad_differential_rejected():
    mod = GradedModule((("a", 0), ("b", 1)))
    with pytest.raises(ValueError):
        ChainComplex(mod, {"b": {"a": 1}})
    with pytest.raises(ValueError):
        GradedModule((("a", 0), ("a", 1)))
    c = ChainComplex(GradedModule((("a", 0), ("b", 1), ("c", 2))), {"a": {"b": 1}, "b": {"c": 1}})
    with pytest.raises(ValueError):
        cohomology(c)


def test_koszul_sign_examples():
    assert koszul_sign([0, 1, 2], [1, 1, 1]) == 1
    assert koszul_sign([1, 0], [1, 1]) == -1
    assert koszul_sign([1, 0], [1, 2]) == 1
    # (a, b, c) -> (c, a, b)
    assert koszul_sign([1, 2, 0], [1, 1, 0]) == 1
    with pytest.raises(ValueError):
        koszul_sign([0, 0], [1, 1])


def transposition_count_sign(perm, degrees):
    """Sign by bubble sort: each adjacent swap of two odd symbols costs -1."""
    items = list(zip(perm, degrees))
    s = 1
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j][0] > items[j + 1][0]:
                if items[j][1] % 2 and items[j + 1][1] % 2:
                    s = -s
                items[j], items[j + 1] = items[j + 1], items[j]
    return s


@given(st.permutations(range(6)), st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_koszul_sign_matches_bubble_sort(perm, degrees):
    assert koszul_sign(perm, degrees) == transposition_count_sign(perm, degrees)


@given(st.permutations(range(5)), st.permutations(range(5)), st.lists(st.integers(0, 3), min_size=5, max_size=5))
def test_graded_word_signs_compose(p, q, degrees):
    w = GradedWord(tuple(zip("abcde", degrees)))
    w1, s1 = w.permute(p)
    w2, s2 = w1.permute(q)
    assert sorted(w2.symbols) == sorted(w.symbols)
    assert w.sign_to(w2) == s1 * s2


def test_graded_word_helpers():
    w = GradedWord.of(("x", 1), ("y", 2), ("z", 1))
    assert w.degree == 4
    assert w.without(["y"]).ids == ["x", "z"]
    assert w.exponent_to(GradedWord.of(("z", 1), ("y", 2), ("x", 1))) == 1
    with pytest.raises(ValueError):
        w.sign_to(GradedWord.of(("x", 1)))


def test_shift():
    c = circle_complex()
    assert shift(c, 0) == c
    d = ChainComplex(GradedModule((("g", 2),)))
    assert shift(d, 2).module.basis == (("g", 0),)
    assert shift(shift(c, 3), -3) == c


def test_split_complex_homotopy_identity():
    c = circle_complex()
    sp = split_complex(c)
    for g in c.module.generators:
        x = {g: 1}
        back = sp.include(sp.project(x))
        lhs = {k: x.get(k, 0) - back.get(k, 0) for k in set(x) | set(back)}
        dh = c.apply(sp.homotopy(x))
        hd = sp.homotopy(c.apply(x))
        rhs = {k: dh.get(k, 0) + hd.get(k, 0) for k in set(dh) | set(hd)}
        assert {k: v for k, v in lhs.items() if v} == {k: v for k, v in rhs.items() if v}
    for h, rep in sp.reps.items():
        assert not c.apply(rep)
        assert sp.project(rep) == {h: 1}


def test_permutations_exhaustive_small():
    for perm in permutations(range(4)):
        assert koszul_sign(perm, [0, 0, 0, 0]) == 1
