"""Ordered simplicial complexes and their integer cochains.

Vertices carry a global total order and simplices are stored as strictly
increasing vertex tuples, so the front-face/back-face cup product needs no
extra structure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Mapping, Sequence

from .algebra_core import ChainComplex, GradedModule

Simplex = tuple


@dataclass(frozen=True)
class OrderedComplex:
    vertices: tuple
    simplices: frozenset

    @classmethod
    def from_maximal(cls, vertices: Sequence[Hashable], maximal: Iterable[Sequence]) -> "OrderedComplex":
        """Close a list of maximal simplices under faces.

        Each simplex is sorted into the global vertex order.
        """
        verts = tuple(vertices)
        if len(set(verts)) != len(verts):
            raise ValueError("duplicate vertices")
        pos = {v: i for i, v in enumerate(verts)}
        faces = set((v,) for v in verts)
        for s in maximal:
            for v in s:
                if v not in pos:
                    raise ValueError(f"simplex {list(s)} uses unknown vertex {v!r}")
            if len(set(s)) != len(s):
                raise ValueError(f"simplex {list(s)} repeats a vertex")
            t = tuple(sorted(s, key=pos.__getitem__))
            for k in range(1, len(t) + 1):
                faces.update(combinations(t, k))
        return cls(verts, frozenset(faces))

    @classmethod
    def standard_simplex(cls, n: int) -> "OrderedComplex":
        return cls.from_maximal(range(n + 1), [tuple(range(n + 1))])

    @classmethod
    def boundary_of_simplex(cls, n: int) -> "OrderedComplex":
        """The boundary of the standard n-simplex (an (n-1)-sphere)."""
        full = tuple(range(n + 1))
        return cls.from_maximal(full, [s for s in combinations(full, n)])

    def __post_init__(self):
        pos = {v: i for i, v in enumerate(self.vertices)}
        for s in self.simplices:
            if any(pos[s[i]] >= pos[s[i + 1]] for i in range(len(s) - 1)):
                raise ValueError(f"simplex {s} is not increasing")
            if len(s) > 1:
                for f in combinations(s, len(s) - 1):
                    if f not in self.simplices:
                        raise ValueError(f"face {f} of {s} missing")

    def _key(self, s):
        pos = self._pos()
        return (len(s), [pos[v] for v in s])

    def _pos(self):
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def simplices_of_dim(self, p: int) -> list:
        pos = self._pos()
        return sorted((s for s in self.simplices if len(s) == p + 1),
                      key=lambda s: [pos[v] for v in s])

    def all_simplices(self) -> list:
        return [s for p in range(self.dimension + 1) for s in self.simplices_of_dim(p)]

    def subcomplex(self, maximal: Iterable[Sequence]) -> "OrderedComplex":
        pos = self._pos()
        maximal = [tuple(sorted(s, key=pos.__getitem__)) for s in maximal]
        for s in maximal:
            if s not in self.simplices:
                raise ValueError(f"{s} is not a simplex of the complex")
        verts = sorted({v for s in maximal for v in s}, key=pos.__getitem__)
        return OrderedComplex.from_maximal(verts, maximal)

    def boundary_subcomplex(self, top: Simplex) -> "OrderedComplex":
        """Proper faces of one simplex."""
        if len(top) == 1:
            return OrderedComplex((), frozenset())
        return self.subcomplex(combinations(top, len(top) - 1))

    def cochain_complex(self, prefix: str = "", relative_to: "OrderedComplex | None" = None) -> ChainComplex:
        """The simplicial cochain complex (optionally relative to a subcomplex).

        Generator ids are ``prefix + simplex label``.
        """
        sub = relative_to.simplices if relative_to is not None else frozenset()
        gens = [s for s in self.all_simplices() if s not in sub]
        basis = tuple((prefix + simplex_label(s), len(s) - 1) for s in gens)
        diff = {}
        for s in gens:
            col = coboundary(Cochain(self, len(s) - 1, {s: 1})).values
            col = {prefix + simplex_label(t): c for t, c in col.items() if t not in sub}
            if col:
                diff[prefix + simplex_label(s)] = col
        return ChainComplex(GradedModule(basis), diff)


def simplex_label(s: Simplex) -> str:
    return "[" + ",".join(str(v) for v in s) + "]"


def load_triangulation(data) -> OrderedComplex:
    """Read ``{"vertices": [...], "simplices": [[...], ...]}`` (maximal simplices)."""
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict) or "vertices" not in data or "simplices" not in data:
        raise ValueError('triangulation needs "vertices" and "simplices"')
    return OrderedComplex.from_maximal(data["vertices"], [tuple(s) for s in data["simplices"]])


def dump_triangulation(q: OrderedComplex) -> dict:
    maximal = []
    for s in q.all_simplices():
        if not any(len(t) == len(s) + 1 and set(s) <= set(t) for t in q.simplices):
            maximal.append(list(s))
    return {"vertices": list(q.vertices), "simplices": maximal}


# ---------------------------------------------------------------------------
# cochains


@dataclass(frozen=True)
class Cochain:
    complex: OrderedComplex
    degree: int
    values: Mapping

    def __post_init__(self):
        vals = {}
        for s, c in dict(self.values).items():
            s = tuple(s)
            if len(s) != self.degree + 1:
                raise ValueError(f"simplex {s} has the wrong dimension for degree {self.degree}")
            if s not in self.complex.simplices:
                raise ValueError(f"simplex {s} not in the complex")
            if c:
                vals[s] = int(c)
        object.__setattr__(self, "values", vals)

    def __call__(self, s) -> int:
        return self.values.get(tuple(s), 0)

    def __add__(self, other: "Cochain") -> "Cochain":
        _same(self, other)
        vals = dict(self.values)
        for s, c in other.values.items():
            vals[s] = vals.get(s, 0) + c
        return Cochain(self.complex, self.degree, vals)

    def __neg__(self) -> "Cochain":
        return Cochain(self.complex, self.degree, {s: -c for s, c in self.values.items()})

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def scale(self, k: int) -> "Cochain":
        return Cochain(self.complex, self.degree, {s: k * c for s, c in self.values.items()})

    def is_zero(self) -> bool:
        return not self.values

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.complex == other.complex
        return (self.complex, self.degree, self.values) == (other.complex, other.degree, other.values)

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.values.items(), key=repr))))


def _same(a: Cochain, b: Cochain) -> None:
    if a.complex != b.complex:
        raise ValueError("cochains live on different complexes")
    if a.degree != b.degree and not (a.is_zero() or b.is_zero()):
        raise ValueError("cochains have different degrees")


def zero(q: OrderedComplex, degree: int) -> Cochain:
    return Cochain(q, degree, {})


def unit(q: OrderedComplex) -> Cochain:
    """The 0-cochain taking the value 1 on every vertex."""
    return Cochain(q, 0, {(v,): 1 for v in q.vertices})


def delta(q: OrderedComplex, s: Sequence) -> Cochain:
    """The indicator cochain of one simplex."""
    s = tuple(s)
    return Cochain(q, len(s) - 1, {s: 1})


def coboundary(a: Cochain) -> Cochain:
    """(da)(v0..v_{p+1}) = sum_i (-1)^i a(v0..^vi..v_{p+1})."""
    q = a.complex
    out: dict = {}
    for t in q.simplices_of_dim(a.degree + 1):
        v = 0
        for i in range(len(t)):
            c = a.values.get(t[:i] + t[i + 1:])
            if c:
                v += c if i % 2 == 0 else -c
        if v:
            out[t] = v
    return Cochain(q, a.degree + 1, out)


def cup(a: Cochain, b: Cochain) -> Cochain:
    """Front-face/back-face cup product."""
    if a.complex != b.complex:
        raise ValueError("cup of cochains on different complexes")
    q = a.complex
    p, r = a.degree, b.degree
    out: dict = {}
    if a.values and b.values:
        for t in q.simplices_of_dim(p + r):
            x = a.values.get(t[: p + 1])
            if x:
                y = b.values.get(t[p:])
                if y:
                    out[t] = x * y
    return Cochain(q, p + r, out)


# ---------------------------------------------------------------------------
# relative cochains, restriction and shriek


@dataclass(frozen=True, eq=False)
class RelativeCochain(Cochain):
    """A cochain vanishing on a subcomplex."""

    subcomplex: OrderedComplex = None

    def __post_init__(self):
        super().__post_init__()
        if self.subcomplex is None:
            raise ValueError("relative cochain needs a subcomplex")
        for s in self.values:
            if s in self.subcomplex.simplices:
                raise ValueError(f"relative cochain is nonzero on {s} in the subcomplex")

    def absolute(self) -> Cochain:
        """The natural inclusion into ordinary cochains."""
        return Cochain(self.complex, self.degree, self.values)


def relative_generator(n: int, value: int = 1) -> RelativeCochain:
    """``value`` times the generator of C^n(D, dD) for the standard n-simplex D."""
    d = OrderedComplex.standard_simplex(n)
    top = tuple(range(n + 1))
    return RelativeCochain(d, n, {top: value} if value else {}, d.boundary_subcomplex(top))


@dataclass(frozen=True)
class SimplicialEmbedding:
    """An order-preserving injective vertex map sending simplices to simplices."""

    source: OrderedComplex
    target: OrderedComplex
    vertex_map: Mapping

    def __post_init__(self):
        vm = dict(self.vertex_map)
        object.__setattr__(self, "vertex_map", vm)
        if set(vm) != set(self.source.vertices):
            raise ValueError("vertex map must be defined on every source vertex")
        if len(set(vm.values())) != len(vm):
            raise ValueError("vertex map is not injective")
        tpos = self.target._pos()
        for v in vm.values():
            if v not in tpos:
                raise ValueError(f"image vertex {v!r} not in target")
        imgs = [tpos[vm[v]] for v in self.source.vertices]
        if imgs != sorted(imgs):
            raise ValueError("vertex map is not order preserving")
        for s in self.source.simplices:
            if self.image(s) not in self.target.simplices:
                raise ValueError(f"image of {s} is not a simplex of the target")

    def image(self, s: Simplex) -> Simplex:
        return tuple(self.vertex_map[v] for v in s)


def standard_embedding(q: OrderedComplex, top: Sequence) -> SimplicialEmbedding:
    """The unique order-preserving identification of the standard simplex with ``top``."""
    pos = q._pos()
    top = tuple(sorted(top, key=pos.__getitem__))
    if top not in q.simplices:
        raise ValueError(f"{list(top)} is not a simplex")
    n = len(top) - 1
    return SimplicialEmbedding(OrderedComplex.standard_simplex(n), q, dict(enumerate(top)))


def restrict(a: Cochain, inc: SimplicialEmbedding) -> Cochain:
    """Pull a cochain back along an embedding."""
    if a.complex != inc.target:
        raise ValueError("cochain does not live on the target of the embedding")
    out = {}
    for s in inc.source.simplices_of_dim(a.degree):
        c = a.values.get(inc.image(s))
        if c:
            out[s] = c
    return Cochain(inc.source, a.degree, out)


def shriek(a: Cochain, inc: SimplicialEmbedding) -> Cochain:
    """Extension by zero of a top-degree relative cochain on the simplex."""
    n = inc.source.dimension
    if a.degree != n:
        raise ValueError(f"shriek needs a cochain of top degree {n}, got {a.degree}")
    if a.complex != inc.source:
        raise ValueError("cochain does not live on the source of the embedding")
    top = tuple(inc.source.vertices)
    c = a.values.get(top, 0)
    return Cochain(inc.target, n, {inc.image(top): c} if c else {})
