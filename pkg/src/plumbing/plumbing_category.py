"""The simplicial differential graded category of a plumbing.

Two objects ``Q1`` and ``Q2``.  Endomorphisms are the simplicial cochains of
each triangulation; morphisms ``Q1 -> Q2`` are cochains on the identified
simplex (or on each intersection component, shifted), and morphisms
``Q2 -> Q1`` are relative cochains of that simplex modulo its boundary.

Composition is written in the order ``a2 * a1`` (``a1`` first), with
``a1 in hom(X0, X1)`` and ``a2 in hom(X1, X2)``.  Composition tables are
keyed by the object string ``(X0, X1, X2)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .algebra_core import ChainComplex, GradedModule
from .simplicial import (
    Cochain,
    OrderedComplex,
    SimplicialEmbedding,
    cup,
    load_triangulation,
    restrict,
    simplex_label,
    standard_embedding,
)

Q1, Q2 = "Q1", "Q2"


def _add(acc: dict, vec: dict, k: int = 1) -> None:
    for g, c in vec.items():
        v = acc.get(g, 0) + k * c
        if v:
            acc[g] = v
        else:
            acc.pop(g, None)


# ---------------------------------------------------------------------------
# generic DG categories given by tables


@dataclass
class DGCategory:
    """A DG category presented by generator tables.

    ``hom[(X, Y)]`` is the complex of morphisms X -> Y; ``products[(X0, X1, X2)]``
    maps a generator pair ``(g2, g1)`` to the sparse vector ``g2 * g1``;
    ``units[X]`` is the identity of X as a sparse vector.
    """

    objects: tuple
    hom: dict
    products: dict
    units: dict = field(default_factory=dict)

    def __post_init__(self):
        self.where = {}
        for (x, y), c in self.hom.items():
            for g, k in c.module.basis:
                if g in self.where:
                    raise ValueError(f"generator id {g!r} used twice")
                self.where[g] = (x, y, k)

    def degree(self, g) -> int:
        return self.where[g][2]

    def d(self, x, y, vec: dict) -> dict:
        return self.hom[(x, y)].apply(vec)

    def compose(self, objs: Sequence, v2: dict, v1: dict) -> dict:
        table = self.products.get(tuple(objs), {})
        out: dict = {}
        for g2, c2 in v2.items():
            for g1, c1 in v1.items():
                r = table.get((g2, g1))
                if r:
                    _add(out, r, c2 * c1)
        return out

    def generators(self, x, y) -> list:
        return self.hom[(x, y)].module.generators


def _vec(g) -> dict:
    return {g: 1}


def _witness(label, params, expected, computed, ok) -> dict:
    return {"check": label, "params": params, "expected": expected,
            "computed": computed, "pass": bool(ok)}


def _show(vec: dict) -> dict:
    return {str(g): c for g, c in sorted(vec.items(), key=lambda t: str(t[0]))}


def verify_dg_axioms(cat: DGCategory) -> list[dict]:
    """Exhaustively check d^2 = 0, Leibniz, units and associativity.

    Returns a list of report entries; associativity is reported per
    diagram, where a diagram is an object string (X0, X1, X2, X3) together
    with its mirror image under exchanging the two objects (for two-object
    categories), so a two-object category has eight diagrams.
    """
    report = []
    objs = cat.objects
    for (x, y), c in sorted(cat.hom.items()):
        bad = None
        for g in c.module.generators:
            dd = c.apply(c.apply(_vec(g)))
            if dd:
                bad = (g, dd)
                break
        report.append(_witness("d_squared", {"hom": [x, y]}, {},
                               {} if bad is None else {"input": str(bad[0]), "value": _show(bad[1])},
                               bad is None))
    for objs3 in product(objs, repeat=3):
        x0, x1, x2 = objs3
        bad = None
        for g1 in cat.generators(x0, x1):
            for g2 in cat.generators(x1, x2):
                lhs = cat.d(x0, x2, cat.compose(objs3, _vec(g2), _vec(g1)))
                rhs = cat.compose(objs3, cat.d(x1, x2, _vec(g2)), _vec(g1))
                sign = -1 if cat.degree(g2) % 2 else 1
                _add(rhs, cat.compose(objs3, _vec(g2), cat.d(x0, x1, _vec(g1))), sign)
                if lhs != rhs:
                    bad = {"inputs": [str(g2), str(g1)], "lhs": _show(lhs), "rhs": _show(rhs)}
                    break
            if bad:
                break
        report.append(_witness("leibniz", {"objects": list(objs3)}, {}, bad or {}, bad is None))
    for x in objs:
        if x not in cat.units:
            continue
        u = cat.units[x]
        bad = None
        for y in objs:
            for g in cat.generators(x, y):
                if cat.compose((x, x, y), _vec(g), u) != _vec(g):
                    bad = {"generator": str(g), "side": "right"}
            for g in cat.generators(y, x):
                if cat.compose((y, x, x), u, _vec(g)) != _vec(g):
                    bad = {"generator": str(g), "side": "left"}
        if cat.d(x, x, u):
            bad = {"closed": False}
        report.append(_witness("unit", {"object": x}, {}, bad or {}, bad is None))

    def assoc_witness(s):
        x0, x1, x2, x3 = s
        for g1 in cat.generators(x0, x1):
            for g2 in cat.generators(x1, x2):
                g21 = cat.compose((x0, x1, x2), _vec(g2), _vec(g1))
                for g3 in cat.generators(x2, x3):
                    left = cat.compose((x0, x2, x3), _vec(g3), g21)
                    right = cat.compose((x0, x1, x3),
                                        cat.compose((x1, x2, x3), _vec(g3), _vec(g2)), _vec(g1))
                    if left != right:
                        return {"objects": list(s), "inputs": [str(g3), str(g2), str(g1)],
                                "lhs": _show(left), "rhs": _show(right)}
        return None

    strings = list(product(objs, repeat=4))
    seen = set()
    for s in strings:
        if s in seen:
            continue
        orbit = [s]
        if len(objs) == 2:
            mirror = tuple(objs[1] if x == objs[0] else objs[0] for x in s)
            orbit.append(mirror)
        seen.update(orbit)
        # name the diagram by the member starting at the last object
        rep = max(orbit, key=lambda t: objs.index(t[0]))
        bad = None
        for t in orbit:
            bad = assoc_witness(t)
            if bad:
                break
        report.append(_witness("associativity", {"diagram": list(rep)}, {}, bad or {}, bad is None))
    return report


def all_pass(report: Iterable[dict]) -> bool:
    return all(r["pass"] for r in report)


# ---------------------------------------------------------------------------
# plumbing data


@dataclass(frozen=True)
class PlumbingSpec:
    q1: OrderedComplex
    q2: OrderedComplex
    delta1: tuple
    delta2: tuple

    def __post_init__(self):
        n = self.q1.dimension
        if self.q2.dimension != n:
            raise ValueError("the two triangulations have different dimensions")
        for q, s, name in ((self.q1, self.delta1, "delta1"), (self.q2, self.delta2, "delta2")):
            pos = q._pos()
            t = tuple(sorted(s, key=lambda v: pos.get(v, -1)))
            if t not in q.simplices:
                raise ValueError(f"{name} {list(s)} is not a simplex")
            if len(t) != n + 1:
                raise ValueError(f"{name} is not top dimensional")
        object.__setattr__(self, "delta1", tuple(sorted(self.delta1, key=self.q1._pos().__getitem__)))
        object.__setattr__(self, "delta2", tuple(sorted(self.delta2, key=self.q2._pos().__getitem__)))

    @property
    def n(self) -> int:
        return self.q1.dimension


@dataclass(frozen=True)
class Component:
    """One component of the intersection locus.

    ``n1``/``n2`` are lists of top simplices of q1/q2; the identification is the
    order-preserving vertex bijection.
    """

    n1: tuple
    n2: tuple
    shift: int = 0


@dataclass(frozen=True)
class CleanPlumbingSpec:
    q1: OrderedComplex
    q2: OrderedComplex
    components: tuple

    @property
    def n(self) -> int:
        return self.q1.dimension


def manifold_boundary(n_complex: OrderedComplex) -> OrderedComplex:
    """Codimension-one faces lying in exactly one top simplex, closed under faces."""
    n = n_complex.dimension
    tops = n_complex.simplices_of_dim(n)
    count: dict = {}
    for t in tops:
        for i in range(len(t)):
            f = t[:i] + t[i + 1:]
            count[f] = count.get(f, 0) + 1
    bdry = [f for f, c in count.items() if c == 1 and f]
    if not bdry:
        return OrderedComplex((), frozenset())
    return n_complex.subcomplex(bdry)


@dataclass
class _Piece:
    model: OrderedComplex
    boundary: OrderedComplex
    emb1: SimplicialEmbedding
    emb2: SimplicialEmbedding
    shift: int
    abs_prefix: str
    rel_prefix: str


class SimpCategory(DGCategory):
    """DGCategory with the cochain bookkeeping used to build it."""

    def cochain_of(self, g) -> Cochain:
        return self._cochains[g]

    def vector_of(self, x, y, a: Cochain) -> dict:
        return self._to_vec[(x, y)](a)


def _build(q1: OrderedComplex, q2: OrderedComplex, pieces: list[_Piece],
           koszul: bool = False) -> SimpCategory:
    cochains: dict = {}
    homs: dict = {}
    to_vec: dict = {}
    # endomorphisms
    for obj, q in ((Q1, q1), (Q2, q2)):
        c = q.cochain_complex(prefix=obj)
        homs[(obj, obj)] = c
        for s in q.all_simplices():
            cochains[obj + simplex_label(s)] = Cochain(q, len(s) - 1, {s: 1})
        to_vec[(obj, obj)] = (lambda obj: lambda a: {obj + simplex_label(s): v for s, v in a.values.items()})(obj)

    basis12, diff12, basis21, diff21 = [], {}, [], {}
    for p in pieces:
        c = p.model.cochain_complex(prefix=p.abs_prefix)
        basis12 += [(g, k - p.shift) for g, k in c.module.basis]
        diff12.update(c.diff)
        r = p.model.cochain_complex(prefix=p.rel_prefix, relative_to=p.boundary)
        basis21 += [(g, k + p.shift) for g, k in r.module.basis]
        diff21.update(r.diff)
        for s in p.model.all_simplices():
            cochains[p.abs_prefix + simplex_label(s)] = Cochain(p.model, len(s) - 1, {s: 1})
            if s not in p.boundary.simplices:
                cochains[p.rel_prefix + simplex_label(s)] = Cochain(p.model, len(s) - 1, {s: 1})
    homs[(Q1, Q2)] = ChainComplex(GradedModule(tuple(basis12)), diff12)
    homs[(Q2, Q1)] = ChainComplex(GradedModule(tuple(basis21)), diff21)
    model_of = {p.model: p for p in pieces}

    def vec_on(prefix_attr):
        def conv(a: Cochain) -> dict:
            if a.is_zero():
                return {}
            p = model_of[a.complex]
            pre = getattr(p, prefix_attr)
            return {pre + simplex_label(s): v for s, v in a.values.items()}
        return conv

    to_vec[(Q1, Q2)] = vec_on("abs_prefix")
    to_vec[(Q2, Q1)] = vec_on("rel_prefix")

    piece_of: dict = {}
    for p in pieces:
        for s in p.model.all_simplices():
            piece_of[p.abs_prefix + simplex_label(s)] = p
            piece_of[p.rel_prefix + simplex_label(s)] = p

    def comp(objs, g2, g1):
        a2, a1 = cochains[g2], cochains[g1]
        x0, x1, x2 = objs
        if objs == (Q1, Q1, Q1) or objs == (Q2, Q2, Q2):
            return cup(a2, a1)
        if objs == (Q1, Q1, Q2):
            return cup(a2, restrict(a1, piece_of[g2].emb1))
        if objs == (Q1, Q2, Q2):
            return cup(restrict(a2, piece_of[g1].emb2), a1)
        if objs == (Q2, Q1, Q1):
            return cup(restrict(a2, piece_of[g1].emb1), a1)
        if objs == (Q2, Q2, Q1):
            return cup(a2, restrict(a1, piece_of[g2].emb2))
        # shriek compositions; distinct components do not interact
        if piece_of[g1] is not piece_of[g2]:
            return None
        p = piece_of[g1]
        prod = cup(a2, a1)
        emb = p.emb1 if objs == (Q1, Q2, Q1) else p.emb2
        return _extend_by_zero(prod, p, emb)

    products: dict = {}
    for objs in product((Q1, Q2), repeat=3):
        x0, x1, x2 = objs
        table = {}
        for g1 in homs[(x0, x1)].module.generators:
            for g2 in homs[(x1, x2)].module.generators:
                r = comp(objs, g2, g1)
                if r is None or r.is_zero():
                    continue
                v = to_vec[(x0, x2)](r)
                if v:
                    table[(g2, g1)] = v
        products[objs] = table

    if koszul:
        _koszul_signs(homs, products, pieces)

    units = {Q1: {Q1 + simplex_label((v,)): 1 for v in q1.vertices},
             Q2: {Q2 + simplex_label((v,)): 1 for v in q2.vertices}}
    cat = SimpCategory((Q1, Q2), homs, products, units)
    cat._cochains = cochains
    cat._to_vec = to_vec
    cat.pieces = pieces
    return cat


def _koszul_signs(homs: dict, products: dict, pieces: list[_Piece]) -> None:
    """Insert the signs of the graded shift s^m (s of degree -m).

    d(s^m x) = (-1)^m s^m dx and (s^a x)(s^b y) = (-1)^{b|x|} s^{a+b}(xy),
    with |x| the unshifted degree.  This keeps Leibniz and associativity
    valid for odd shifts.
    """
    shift_of: dict = {}
    for p in pieces:
        for g, _ in homs[(Q1, Q2)].module.basis:
            if g.startswith(p.abs_prefix + "["):
                shift_of[g] = p.shift
        for g, _ in homs[(Q2, Q1)].module.basis:
            if g.startswith(p.rel_prefix + "["):
                shift_of[g] = -p.shift
    raw = {}
    for c in homs.values():
        for g, k in c.module.basis:
            raw[g] = k + shift_of.get(g, 0)
    for key in ((Q1, Q2), (Q2, Q1)):
        c = homs[key]
        diff = {g: {t: (-1) ** (shift_of[g] % 2) * v for t, v in col.items()}
                for g, col in c.diff.items()}
        homs[key] = ChainComplex(c.module, diff)
    for table in products.values():
        for (g2, g1), vec in table.items():
            if (shift_of.get(g1, 0) * raw[g2]) % 2:
                table[(g2, g1)] = {g: -v for g, v in vec.items()}


def _extend_by_zero(a: Cochain, p: _Piece, emb: SimplicialEmbedding) -> Cochain:
    """Extension by zero of a relative cochain on a component into its manifold."""
    vals = {}
    for s, v in a.values.items():
        if s in p.boundary.simplices:
            continue
        vals[emb.image(s)] = v
    return Cochain(emb.target, a.degree, vals)


def build_simp(spec: PlumbingSpec, corrupt_shriek: bool = False) -> SimpCategory:
    """The transverse plumbing category.

    ``corrupt_shriek`` flips the sign of one shriek map; it exists for fault
    injection in tests.
    """
    e1 = standard_embedding(spec.q1, spec.delta1)
    e2 = standard_embedding(spec.q2, spec.delta2)
    model = e1.source
    top = tuple(model.vertices)
    piece = _Piece(model, model.boundary_subcomplex(top), e1, e2, 0, "D", "R")
    cat = _build(spec.q1, spec.q2, [piece])
    if corrupt_shriek:
        table = cat.products[(Q1, Q2, Q1)]
        for key in table:
            table[key] = {g: -c for g, c in table[key].items()}
    cat.n = spec.n
    return cat


def order_matching(q1: OrderedComplex, n1: OrderedComplex, q2: OrderedComplex,
                   n2: OrderedComplex) -> dict:
    """The order-preserving vertex bijection n1 -> n2, checked to be cellular."""
    v1 = list(n1.vertices)
    v2 = list(n2.vertices)
    if len(v1) != len(v2):
        raise ValueError("components have different vertex counts")
    m = dict(zip(v1, v2))
    image = {tuple(m[v] for v in s) for s in n1.simplices}
    if image != set(n2.simplices):
        raise ValueError("order-preserving vertex bijection is not cellular")
    return m


def build_simp_clean(spec: CleanPlumbingSpec, koszul: bool = False) -> SimpCategory:
    """Clean-intersection variant with one shifted summand per component.

    By default shifts only regrade, so coefficient tables do not depend on the
    shifts; for odd shifts this breaks the Leibniz rule.  ``koszul=True``
    inserts the standard signs of a graded shift instead.
    """
    if spec.q1.dimension != spec.q2.dimension:
        raise ValueError("the two triangulations have different dimensions")
    n = spec.n
    pieces = []
    used1, used2 = set(), set()
    for k, comp in enumerate(spec.components, start=1):
        for s in list(comp.n1) + list(comp.n2):
            if len(s) != n + 1:
                raise ValueError("components must be unions of top simplices")
        n1 = spec.q1.subcomplex(comp.n1)
        n2 = spec.q2.subcomplex(comp.n2)
        if used1 & set(n1.vertices) or used2 & set(n2.vertices):
            raise ValueError("components overlap")
        used1 |= set(n1.vertices)
        used2 |= set(n2.vertices)
        vm = order_matching(spec.q1, n1, spec.q2, n2)
        e1 = SimplicialEmbedding(n1, spec.q1, {v: v for v in n1.vertices})
        e2 = SimplicialEmbedding(n1, spec.q2, vm)
        pieces.append(_Piece(n1, manifold_boundary(n1), e1, e2, comp.shift, f"D{k}", f"R{k}"))
    cat = _build(spec.q1, spec.q2, pieces, koszul=koszul)
    cat.n = n
    return cat


# ---------------------------------------------------------------------------
# spec files


def load_plumbing_spec(data, base_dir: str | None = None):
    """Parse a plumbing spec (dict or JSON text).

    Triangulations may be inline objects or paths to triangulation files.
    Returns ``PlumbingSpec`` or ``CleanPlumbingSpec`` (when ``components`` is present).
    """
    import os

    if isinstance(data, str):
        data = json.loads(data)

    def tri(key):
        v = data.get(key)
        if v is None:
            raise ValueError(f'missing "{key}"')
        if isinstance(v, str):
            path = v if base_dir is None or os.path.isabs(v) else os.path.join(base_dir, v)
            with open(path) as fh:
                return load_triangulation(fh.read())
        return load_triangulation(v)

    q1, q2 = tri("q1"), tri("q2")
    if "components" in data:
        comps = tuple(Component(tuple(map(tuple, c["n1"])), tuple(map(tuple, c["n2"])), int(c.get("shift", 0)))
                      for c in data["components"])
        return CleanPlumbingSpec(q1, q2, comps)
    return PlumbingSpec(q1, q2, tuple(data["delta1"]), tuple(data["delta2"]))


def circle_spec() -> PlumbingSpec:
    """Two 3-vertex circles plumbed along one edge each."""
    c = OrderedComplex.from_maximal([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
    return PlumbingSpec(c, c, (0, 1), (0, 1))


def sphere_spec() -> PlumbingSpec:
    """Two boundaries of the 3-simplex plumbed along one triangle each."""
    s = OrderedComplex.boundary_of_simplex(3)
    return PlumbingSpec(s, s, (0, 1, 2), (0, 1, 2))
