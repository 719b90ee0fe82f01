"""Orientations of Stasheff and shrub moduli spaces and the attached sign bookkeeping.

Orientation forms are wedges of coordinate differentials.  A coordinate is
named by a hashable key; for edges of a tree the key is the leaf span
``(first, last)`` of the edge, which survives grafting and wall crossing, so
forms on neighbouring charts can be compared directly.

Conventions used for boundary comparisons:

* near a stratum where an edge length ``L`` tends to infinity the collar
  coordinate is ``s = -exp(-L)``, so ``ds`` is a positive multiple of ``dL``;
* near a stratum where a length ``lam`` tends to zero the collar coordinate
  is ``s = -lam``;
* the product orientation of ``(-1, 0] x F`` is ``ds ^ o_F``; comparing it with
  the ambient orientation gives the sign relating ``o_F`` to the boundary
  orientation taken with the outward normal first.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Hashable, Sequence

from .algebra_core import GradedWord, koszul_sign
from .polytopes import (LEAF, compositions, graft_shape, internal_nodes, leaf_path, leaf_span, n_leaves,
                        planar_trees, replace_at, subtree, to_sexpr)


# ---------------------------------------------------------------------------
# conventions


@dataclass(frozen=True)
class Conventions:
    """Free sign choices entering the boundary comparisons, as parities.

    normal: 1 compares against the boundary orientation with the inward
        normal first instead of the outward one.
    shrub_fibre: 1 orients the half-line fibre of S_d (d >= 2) by -dl.
    break_collar: 1 reverses the collar of the strata where a shrub breaks
        into a tree and r shrubs.
    """

    normal: int = 0
    shrub_fibre: int = 0
    break_collar: int = 0


LITERAL = Conventions()


# ---------------------------------------------------------------------------
# forms


@dataclass(frozen=True)
class OrientationForm:
    """``sign * dx_1 ^ ... ^ dx_m`` on named coordinates."""

    sign: int
    coords: tuple

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError("repeated coordinate in a wedge")

    def __mul__(self, other: "OrientationForm") -> "OrientationForm":
        return OrientationForm(self.sign * other.sign, self.coords + other.coords)

    def substitute(self, mapping: dict) -> "OrientationForm":
        """Rename coordinates; ``mapping[c] = (new_name, +-1)``."""
        sign = self.sign
        coords = []
        for c in self.coords:
            new, s = mapping.get(c, (c, 1))
            sign *= s
            coords.append(new)
        return OrientationForm(sign, tuple(coords))

    def compare(self, other: "OrientationForm") -> int:
        """+1 if the two forms define the same orientation, -1 otherwise."""
        if sorted(map(repr, self.coords)) != sorted(map(repr, other.coords)):
            raise ValueError(f"forms on different coordinates: {self.coords} vs {other.coords}")
        pos = {c: i for i, c in enumerate(other.coords)}
        perm = [pos[c] for c in self.coords]
        return self.sign * other.sign * koszul_sign(perm, [1] * len(perm))


POINT = OrientationForm(1, ())


# ---------------------------------------------------------------------------
# edge ordering


def _check_binary(shape) -> None:
    for _, node in internal_nodes(shape):
        if len(node) != 2:
            raise ValueError("edge ordering needs a trivalent tree")


def turning_vertices(shape) -> dict:
    """``k -> path`` of the vertex b_k where the arcs from inputs k-1 and k meet."""
    out = {}
    for p, node in internal_nodes(shape):
        a, _ = leaf_span(shape, p + (1,))
        out[a] = p
    return out


@dataclass(frozen=True)
class EdgeOrder:
    edges: tuple  # paths of e_3, ..., e_d
    kinds: tuple  # "r" or "d" per index
    r: int  # number of right turns

    def spans(self, shape) -> tuple:
        return tuple(leaf_span(shape, e) for e in self.edges)


def edge_order(shape) -> EdgeOrder:
    """Order the internal edges of a trivalent tree by the right-turn procedure.

    Starting from the external edges, for k = 3..d the edge e_k is the right
    edge at b_k unless that edge is already present, in which case it is the
    edge below b_k.
    """
    if shape is LEAF:
        raise ValueError("a tree with one input has no edge order")
    _check_binary(shape)
    d = n_leaves(shape)
    present = {()}
    for k in range(1, d + 1):
        present.add(leaf_path(shape, k))
    b = turning_vertices(shape)
    edges, kinds = [], []
    for k in range(3, d + 1):
        v = b[k]
        right, down = v + (0,), v
        if right in present:
            e, kind = down, "d"
        else:
            e, kind = right, "r"
        if e in present:
            raise ValueError(f"edge ordering repeats an edge at k={k}")
        present.add(e)
        edges.append(e)
        kinds.append(kind)
    return EdgeOrder(tuple(edges), tuple(kinds), kinds.count("r"))


def stasheff_form(shape, offset: int = 0) -> OrientationForm:
    """``(-1)^{r(T)} dt_{e_3} ^ ... ^ dt_{e_d}`` with edges keyed by leaf span.

    ``offset`` shifts leaf numbers, for trees sitting inside a larger one.
    """
    if shape is LEAF:
        return POINT
    eo = edge_order(shape)
    coords = tuple(("t", a + offset, b + offset) for a, b in eo.spans(shape))
    return OrientationForm(-1 if eo.r % 2 else 1, coords)


def shrub_form(shape, offset: int = 0, tag: Hashable = ("l",), fibre: int = 0) -> OrientationForm:
    """``(-1)^{r(T)} dl ^ dt_{e_3} ^ ...``; a one-input shrub is a point.

    ``fibre = 1`` reverses the orientation of the half-line factor.
    """
    if shape is LEAF:
        return POINT
    return OrientationForm(-1 if fibre else 1, (tag,)) * stasheff_form(shape, offset)


# ---------------------------------------------------------------------------
# walls


def walls(d: int) -> list:
    """Trees with one vertex of three children, every other vertex binary."""
    out = []
    for shape in planar_trees(d):
        sizes = [len(n) for _, n in internal_nodes(shape)]
        if sizes.count(3) == 1 and all(s in (2, 3) for s in sizes):
            out.append(shape)
    return out


def wall_crossing_sign(wall) -> tuple[int, dict]:
    """Compare the orientation forms of the two trivalent cells adjacent to a wall.

    The cell ((A B) C) uses the coordinate s = t_e of its new edge, the cell
    (A (B C)) uses s = -t_e'.  Returns the comparison sign and a description.
    """
    (p, node), = [(p, n) for p, n in internal_nodes(wall) if len(n) == 3]
    a, b, c = node
    left = replace_at(wall, p, ((a, b), c))
    right = replace_at(wall, p, (a, (b, c)))
    e_left = leaf_span(left, p + (0,))
    e_right = leaf_span(right, p + (1,))
    f1 = stasheff_form(left).substitute({("t",) + e_left: (("s",), 1)})
    f2 = stasheff_form(right).substitute({("t",) + e_right: (("s",), -1)})
    sign = f1.compare(f2)
    return sign, {"wall": _txt(wall), "left": _txt(left), "right": _txt(right)}


def _txt(shape) -> str:
    return to_sexpr(shape)


def wall_consistency(d: int) -> list[dict]:
    """Check that the edge-order orientation agrees across every wall of T_d."""
    if d < 3:
        raise ValueError("walls exist for d >= 3")
    report = []
    for w in walls(d):
        sign, info = wall_crossing_sign(w)
        report.append({"check": "wall_consistency", "params": {"d": d, **info},
                       "expected": {"sign": 1}, "computed": {"sign": sign}, "pass": sign == 1})
    return report


# ---------------------------------------------------------------------------
# boundary signs


def boundary_sign_stasheff(d1: int, d2: int, k: int) -> int:
    """Parity of (d1 - k) d2 + d2 + k for gluing at the (k+1)-st input."""
    if d1 < 1 or d2 < 1:
        raise ValueError("d1, d2 must be positive")
    if not 0 <= k <= d1 - 1:
        raise ValueError(f"k must lie in 0..{d1 - 1}")
    return ((d1 - k) * d2 + d2 + k) % 2


def stasheff_product_sign(t1, t2, k: int, conv: Conventions = None) -> int:
    """Parity comparing ds ^ o(T1) ^ o(T2) with o(T) on the glued tree.

    T2 is attached to input k+1 of T1; the gluing edge length is the collar
    parameter.
    """
    glued = graft_shape(t1, t2, k + 1)
    d2 = n_leaves(t2)
    g = ("t", k + 1, k + d2)
    ambient = stasheff_form(glued).substitute({g: (("s",), 1)})
    prod = OrientationForm(1, (("s",),)) * _relabel_outer(t1, k + 1, d2) * stasheff_form(t2, k)
    return (_parity(ambient, prod) + _conv(conv).normal) % 2


def _parity(ambient: OrientationForm, prod: OrientationForm) -> int:
    return 0 if ambient.compare(prod) == 1 else 1


def _conv(conv):
    return PINNED if conv is None else conv


def _relabel_outer(t1, at: int, d2: int) -> OrientationForm:
    """Orientation of T1 with its edges renamed by their spans after grafting."""
    f = stasheff_form(t1)
    mapping = {}
    for c in f.coords:
        _, a, b = c
        na = a if a < at else a + d2 - 1 if a > at else a
        nb = b + d2 - 1 if b >= at else b
        mapping[c] = (("t", na, nb), 1)
    return f.substitute(mapping)


def stasheff_sign_first_principles(d1: int, d2: int, k: int, exhaustive: bool = True,
                                   conv: Conventions = None) -> dict:
    """Product-vs-boundary parity for every choice of trivalent factors."""
    if d1 < 2 or d2 < 2:
        raise ValueError("both factors need at least two inputs")
    seen = set()
    trees1 = planar_trees(d1, binary=True)
    trees2 = planar_trees(d2, binary=True)
    if not exhaustive:
        trees1, trees2 = trees1[:1], trees2[:1]
    for t1 in trees1:
        for t2 in trees2:
            seen.add(stasheff_product_sign(t1, t2, k, conv))
    return {"parities": sorted(seen), "consistent": len(seen) == 1}


def boundary_sign_shrub(kind: str, params) -> int:
    """break: params = (d_1, ..., d_r), parity 1 + sum (r - k)(d_k + 1).
    collapse: params = k, the later of the two inputs k-1 and k that meet,
    parity k + 1."""
    if kind == "break":
        ds = tuple(params)
        if not ds or any(x < 1 for x in ds):
            raise ValueError("break needs a partition into positive parts")
        r = len(ds)
        return (1 + sum((r - k) * (x + 1) for k, x in enumerate(ds, start=1))) % 2
    if kind == "collapse":
        k = int(params)
        if k < 1:
            raise ValueError("collapse index must be positive")
        return (k + 1) % 2
    raise ValueError(f"unknown boundary kind {kind!r}")


def shrub_break_product_sign(tr, shrubs: Sequence, conv: Conventions = None) -> int:
    """Parity comparing ds ^ o(T_r) ^ o(S_1) ^ ... ^ o(S_r) with o(S_d).

    ``tr`` is a trivalent tree with r inputs, ``shrubs[k]`` a trivalent tree
    (or a leaf) with d_k inputs grafted at input k.
    """
    conv = _conv(conv)
    f = conv.shrub_fibre
    r = n_leaves(tr)
    if r != len(shrubs):
        raise ValueError("one shrub per input of the target tree")
    glued = tr
    offsets = []
    pos = 1
    for k, s in enumerate(shrubs):
        offsets.append(pos - 1)
        glued = graft_shape(glued, s, pos)
        pos += n_leaves(s)
    # ambient coordinates: l and the edges of the glued tree; the edge joining
    # the target tree to shrub k has length l - depth - l_k, so dt = -dl_k
    mapping = {}
    for k, s in enumerate(shrubs):
        m = n_leaves(s)
        if m >= 2:
            span = ("t", offsets[k] + 1, offsets[k] + m)
            mapping[span] = (("l", k), -1)
    ambient = shrub_form(glued, fibre=f).substitute(mapping)
    ambient = ambient.substitute({("l",): (("s",), 1)})
    # target tree edges renamed by their spans in the glued tree
    widths = [n_leaves(s) for s in shrubs]
    tf = stasheff_form(tr)
    ren = {}
    for c in tf.coords:
        _, a, b = c
        ren[c] = (("t", sum(widths[:a - 1]) + 1, sum(widths[:b])), 1)
    prod = OrientationForm(1, (("s",),)) * tf.substitute(ren)
    for k, s in enumerate(shrubs):
        prod = prod * shrub_form(s, offsets[k], tag=("l", k), fibre=f)
    return (_parity(ambient, prod) + conv.normal + conv.break_collar) % 2


def shrub_collapse_product_sign(shape, k: int, conv: Conventions = None) -> int:
    """Parity comparing ds ^ o(S_{d-1}) with o(S_d) near inputs k-1, k of length zero.

    ``shape`` must have inputs k-1 and k forming a cherry.
    """
    d = n_leaves(shape)
    v = turning_vertices(shape)[k]
    if subtree(shape, v) != (LEAF, LEAF):
        raise ValueError("inputs k-1 and k must meet at a vertex with two leaves")
    collapsed = replace_at(shape, v, LEAF)
    conv = _conv(conv)
    f = conv.shrub_fibre
    s = ("s",)
    if v == ():
        # two inputs on the root vertex: l itself is the vanishing length
        ambient = shrub_form(shape, fibre=f).substitute({("l",): (s, -1)})
        prod = OrientationForm(1, (s,)) * shrub_form(collapsed, fibre=f)
        return (_parity(ambient, prod) + conv.normal) % 2
    # the edge below the cherry has length l - lam - depth: dt = -dlam = ds
    g = ("t",) + leaf_span(shape, v)
    ambient = shrub_form(shape, fibre=f).substitute({g: (s, 1)})
    prod = OrientationForm(1, (s,)) * _rename_after_collapse(shrub_form(collapsed, fibre=f), k)
    return (_parity(ambient, prod) + conv.normal) % 2


def _rename_after_collapse(f: OrientationForm, k: int) -> OrientationForm:
    """Edges of the collapsed tree keyed by spans of the original tree."""
    mapping = {}
    for c in f.coords:
        if c[0] != "t":
            continue
        _, a, b = c
        na = a if a < k - 1 else a + 1 if a > k - 1 else a
        nb = b if b < k - 1 else b + 1
        mapping[c] = (("t", na, nb), 1)
    return f.substitute(mapping)


def shrub_break_first_principles(ds: Sequence[int], exhaustive: bool = True,
                                 conv: Conventions = None) -> dict:
    r = len(ds)
    if r < 2:
        raise ValueError("a break needs r >= 2")
    seen = set()
    choices = [planar_trees(r, binary=True)] + [planar_trees(x, binary=True) for x in ds]
    if not exhaustive:
        choices = [c[:1] for c in choices]
    for combo in product(*choices):
        seen.add(shrub_break_product_sign(combo[0], combo[1:], conv))
    return {"parities": sorted(seen), "consistent": len(seen) == 1}


def shrub_collapse_first_principles(d: int, k: int, conv: Conventions = None) -> dict:
    if not 2 <= k <= d:
        raise ValueError(f"k must lie in 2..{d}")
    seen = set()
    for shape in planar_trees(d, binary=True):
        v = turning_vertices(shape)[k]
        if subtree(shape, v) == (LEAF, LEAF):
            seen.add(shrub_collapse_product_sign(shape, k, conv))
    return {"parities": sorted(seen), "consistent": len(seen) == 1}


# The comparisons above depend on three free sign choices.  They are fixed
# by requiring the closed formulas on a few small anchor strata; the lemma
# reports then test the formulas on every stratum in range.
ANCHORS = (("stasheff", (2, 2, 0)), ("break", (1, 1)), ("break", (1, 2)), ("collapse", (3, 2)))


def _anchor_parities(case, conv: Conventions) -> tuple[list, int]:
    kind, params = case
    if kind == "stasheff":
        return stasheff_sign_first_principles(*params, conv=conv)["parities"], boundary_sign_stasheff(*params)
    if kind == "break":
        return shrub_break_first_principles(params, conv=conv)["parities"], boundary_sign_shrub("break", params)
    d, k = params
    return shrub_collapse_first_principles(d, k, conv=conv)["parities"], boundary_sign_shrub("collapse", k)


def pin_conventions(anchors=ANCHORS) -> list[Conventions]:
    """All convention choices under which the anchor strata match the formulas."""
    out = []
    for bits in product((0, 1), repeat=3):
        conv = Conventions(*bits)
        if all(_anchor_parities(a, conv)[0] == [_anchor_parities(a, conv)[1]] for a in anchors):
            out.append(conv)
    return out


PINNED = Conventions(normal=1, shrub_fibre=1, break_collar=1)


# ---------------------------------------------------------------------------
# sign twists


def _dagger(degs: Sequence[int]) -> int:
    return sum(k * g for k, g in enumerate(degs, start=1))


def _deg_cap(block: Sequence[int]) -> int:
    return 1 - len(block) + sum(block)


def _need(params: dict, *keys):
    missing = [k for k in keys if k not in params]
    extra = [k for k in params if k not in keys]
    if missing or extra:
        raise ValueError(f"expected parameters {list(keys)}, got {sorted(params)}")


def sign_twists(name: str, params: dict) -> int:
    """Parity of one of the named sign formulas, evaluated verbatim.

    dagger_morse / dagger_fukaya / dagger_shrub: ``degrees`` (inputs 1..d)
    maltese: ``k``, ``degrees``
    morse_twist: ``n``, ``out_degree``, ``degrees``
    ddagger_mushroom: ``n``, ``blocks`` (input degrees per cap)
    reorient_shrub_1dim: ``n``, ``r``, ``degrees``
    reorient_mushroom_1dim: ``n``, ``blocks``
    """
    if name in ("dagger_morse", "dagger_fukaya", "dagger_shrub"):
        _need(params, "degrees")
        return _dagger(params["degrees"]) % 2
    if name == "maltese":
        _need(params, "k", "degrees")
        k = params["k"]
        degs = params["degrees"]
        if not 0 <= k <= len(degs):
            raise ValueError("k out of range")
        return (k + sum(degs[:k])) % 2
    if name == "morse_twist":
        _need(params, "n", "out_degree", "degrees")
        return ((params["n"] + 1) * (params["out_degree"] + _dagger(params["degrees"]))) % 2
    if name == "ddagger_mushroom":
        _need(params, "n", "blocks")
        blocks = params["blocks"]
        caps = [_deg_cap(b) for b in blocks]
        return ((params["n"] + 1) * _dagger(caps) + sum(_dagger(b) for b in blocks)) % 2
    if name == "reorient_shrub_1dim":
        _need(params, "n", "r", "degrees")
        return ((params["n"] + 1) * (params["r"] + _dagger(params["degrees"]))) % 2
    if name == "reorient_mushroom_1dim":
        _need(params, "n", "blocks")
        n, blocks = params["n"], params["blocks"]
        caps = [_deg_cap(b) for b in blocks]
        e = (n + 1) * (len(blocks) + _dagger(caps))
        e += sum(1 + _dagger(b) + len(b) * sum(b) for b in blocks)
        return e % 2
    raise ValueError(f"unknown sign formula {name!r}")


SIGN_NAMES = ("dagger_morse", "dagger_fukaya", "dagger_shrub", "maltese", "morse_twist",
              "ddagger_mushroom", "reorient_shrub_1dim", "reorient_mushroom_1dim")


# ---------------------------------------------------------------------------
# ledger for shrubs breaking into a tree and r shrubs


@dataclass(frozen=True)
class SignLedgerStep:
    name: str
    before: GradedWord
    after: GradedWord
    claimed: int

    @property
    def computed(self) -> int:
        return self.before.exponent_to(self.after)

    @property
    def ok(self) -> bool:
        return self.computed % 2 == self.claimed % 2


def _w(*pairs) -> GradedWord:
    return GradedWord(tuple(pairs))


@dataclass(frozen=True)
class ShrubSample:
    """Parameters of a broken shrub: a rigid tree with r inputs and r rigid shrubs."""

    n: int
    ds: tuple  # d_1..d_r
    cells: tuple  # degrees of the cells, grouped per shrub
    xs: tuple  # deg x_1..x_r
    x0: int

    @property
    def r(self) -> int:
        return len(self.ds)

    @property
    def d(self) -> int:
        return sum(self.ds)

    @property
    def sig(self) -> tuple:
        return tuple(sum(c) for c in self.cells)

    def constraints(self) -> dict:
        """Rigidity: of the tree, of each shrub, and the dimension-one count."""
        r, n = self.r, self.n
        tree = (self.x0 + _dagger(self.xs) - (r + sum((k - 1) * x for k, x in enumerate(self.xs, 1)))) % 2 == 0
        shrubs = all((x - s - 1 + dk) % 2 == 0 for x, s, dk in zip(self.xs, self.sig, self.ds))
        total = (sum(self.sig) - self.x0 - self.d) % 2 == 0
        return {"tree_rigid": tree, "shrubs_rigid": shrubs, "one_dimensional": total}


def random_shrub_sample(rng: random.Random, max_r: int = 4, max_dk: int = 3, max_deg: int = 3) -> ShrubSample:
    r = rng.randint(1, max_r)
    ds = tuple(rng.randint(1, max_dk) for _ in range(r))
    n = rng.randint(0, 3)
    cells = tuple(tuple(rng.randint(0, max_deg) for _ in range(dk)) for dk in ds)
    xs = []
    for dk, c in zip(ds, cells):
        parity = (sum(c) + dk + 1) % 2
        xs.append(rng.choice([v for v in range(max_deg + 1) if v % 2 == parity]))
    x0p = (sum(xs) + r) % 2
    x0 = rng.choice([v for v in range(max_deg + 1) if v % 2 == x0p])
    return ShrubSample(n, ds, cells, tuple(xs), x0)


def corner_shrub_samples(max_r: int = 3, max_dk: int = 2) -> list[ShrubSample]:
    """All {0,1}-valued degree assignments for small shapes, n in {0,1}."""
    out = []
    for n in (0, 1):
        for r in range(1, max_r + 1):
            for ds in product(range(1, max_dk + 1), repeat=r):
                for flat in product((0, 1), repeat=sum(ds)):
                    cells, i = [], 0
                    for dk in ds:
                        cells.append(tuple(flat[i:i + dk]))
                        i += dk
                    xs = tuple((sum(c) + dk + 1) % 2 for c, dk in zip(cells, ds))
                    x0 = (sum(xs) + r) % 2
                    out.append(ShrubSample(n, ds, tuple(cells), xs, x0))
    return out


def shrub_ledger_steps(p: ShrubSample) -> list[SignLedgerStep]:
    n, r, ds, xs, x0, sig = p.n, p.r, p.ds, p.xs, p.x0, p.sig
    D = [sum(ds[:k]) for k in range(r)]  # D[k] = d_1 + ... + d_k (0-based k)
    ws = [(("Ws", k), xs[k]) for k in range(r)]
    wu = [(("Wu", k), n - xs[k]) for k in range(r)]
    sg = [(("sig", k), n * ds[k] - sig[k]) for k in range(r)]
    sh = [(("S", k), ds[k] - 1) for k in range(r)]
    steps = []
    # unstable and stable manifolds of the tree inputs regrouped
    steps.append(SignLedgerStep(
        "first", _w(*[x for k in range(r) for x in (ws[k], wu[k])]), _w(*ws, *wu),
        sum(xs[k] * (n * k + sum(xs[:k])) for k in range(r))))
    # W^s(x_k) moved in front of each shrub factor
    before = [x for k in range(r) for x in (sh[k], ws[k], sg[k])]
    after = [x for k in range(r) for x in (ws[k], sh[k], sg[k])]
    steps.append(SignLedgerStep("second", _w(*before), _w(*after),
                                sum(xs[k] * (ds[k] + 1) for k in range(r))))
    # left hand side regrouped as inverse/line pairs followed by Q^d
    inv = [(("Wi", k), xs[k]) for k in range(r)]
    q = [(("Q", k), n * ds[k]) for k in range(r)]
    before = ws + [x for k in range(r) for x in (inv[k], q[k])]
    after = [x for k in range(r) for x in (inv[k], ws[k])] + q
    steps.append(SignLedgerStep("third", _w(*before), _w(*after),
                                sum(xs[k] * (n * D[k] + sum(xs[k:])) for k in range(r))))
    # right hand side: moduli factors first, then W^s(x_0), then the cells
    t = (("T",), r - 2)
    w0 = (("W0",), x0)
    before = [t, w0] + [x for k in range(r) for x in (sh[k], sg[k])]
    after = [t] + sh + [w0] + sg
    steps.append(SignLedgerStep(
        "fourth", _w(*before), _w(*after),
        sum((ds[k] + 1) * (x0 + sum(sig[j] + n * ds[j] for j in range(k))) for k in range(r))))
    return steps


def fourth_sign_rewritten(p: ShrubSample) -> int:
    """The rewritten closed form of the fourth step as displayed in the derivation."""
    n, r, ds, sig, x0, d = p.n, p.r, p.ds, p.sig, p.x0, p.d
    e = (r + d) * x0
    e += sum(n * ds[j] * (ds[k] + 1) for k in range(r) for j in range(k))
    e += sum(sig[k] * ((r - (k + 1) - 1) + sum(ds[k + 1:])) for k in range(r))
    return e % 2


def shrub_ledger_totals(p: ShrubSample) -> dict:
    """Totals of the shrub-break ledger.

    ``recomputed`` uses the permutation signs of the four steps together with
    the Morse twist of the rigid tree, the functor twists of the r rigid
    shrubs and the reorientation of the one-dimensional space.  ``displayed``
    follows the derivation, which uses the rewritten fourth step.
    """
    steps = shrub_ledger_steps(p)
    n, r = p.n, p.r
    flat = [c for blk in p.cells for c in blk]
    morse = sign_twists("morse_twist", {"n": n, "out_degree": p.x0, "degrees": list(p.xs)})
    functor = (n + 1) * sum(_dagger(b) for b in p.cells)
    reorient = sign_twists("reorient_shrub_1dim", {"n": n, "r": r, "degrees": flat})
    base = sum(s.computed for s in steps[:3]) + morse + functor + reorient
    recomputed = (base + steps[3].computed) % 2
    displayed = (base + fourth_sign_rewritten(p)) % 2
    closed = sum((dk + 1) * (r + k) for k, dk in enumerate(p.ds, start=1)) % 2
    brk = boundary_sign_shrub("break", p.ds)
    return {"recomputed": recomputed, "displayed": displayed, "closed_form": closed,
            "break": brk, "input_degree": sum(p.sig) % 2}


def verify_ledger_shrub(samples: int, seed: int = 0, corners: bool = True) -> list[dict]:
    """Recompute every step of the shrub-break ledger from explicit permutations.

    Checks per sample: each step against its displayed exponent; the
    displayed total against sum (d_k+1)(r+k) and, with the break sign, odd;
    and the recomputed total, which differs from the displayed one by the
    parity of the total input degree (the rewritten fourth step drops a term
    sum_k deg(sigma[k])).  That difference depends only on the inputs, so the
    boundary and product orientations are opposite up to a sign that is the
    same on every boundary stratum.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = random.Random(seed)
    pool = corner_shrub_samples() if corners else []
    pool += [random_shrub_sample(rng) for _ in range(samples)]
    counts = {"steps": 0, "rewrite": 0, "displayed_total": 0, "recomputed_total": 0}
    witness = None
    for p in pool:
        cons = p.constraints()
        if not all(cons.values()):
            raise AssertionError(f"sampler produced a non-rigid configuration {p}")
        steps = shrub_ledger_steps(p)
        tot = shrub_ledger_totals(p)
        fails = [s.name for s in steps if not s.ok]
        rewrite_ok = (fourth_sign_rewritten(p) + tot["input_degree"]) % 2 == steps[3].computed % 2
        disp_ok = tot["displayed"] == tot["closed_form"] and (tot["displayed"] + tot["break"]) % 2 == 1
        rec_ok = (tot["recomputed"] + tot["break"]) % 2 == (1 + tot["input_degree"]) % 2
        for key, ok in (("steps", not fails), ("rewrite", rewrite_ok),
                        ("displayed_total", disp_ok), ("recomputed_total", rec_ok)):
            if not ok:
                counts[key] += 1
                if witness is None:
                    witness = {"sample": _sample_dict(p), "failed": key, "steps": fails}
    report = []
    for key, label in (("steps", "shrub_ledger_steps"), ("rewrite", "shrub_ledger_fourth_rewrite"),
                       ("displayed_total", "shrub_ledger_total"),
                       ("recomputed_total", "shrub_ledger_recomputed_total")):
        report.append({"check": label, "params": {"samples": len(pool), "seed": seed},
                       "expected": {"failures": 0}, "computed": {"failures": counts[key],
                                                                 "witness": witness if counts[key] else None},
                       "pass": counts[key] == 0})
    return report


def _sample_dict(p) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in p.__dict__.items()}


# ---------------------------------------------------------------------------
# ledger for the internal boundary of mushrooms


@dataclass(frozen=True)
class MushroomSample:
    n: int
    caps: tuple  # input degrees per cap
    k: int  # caps k-1 and k are glued (2 <= k <= r)
    x0: int

    @property
    def r(self) -> int:
        return len(self.caps)

    @property
    def ds(self) -> tuple:
        return tuple(len(c) for c in self.caps)

    @property
    def dp(self) -> tuple:
        return tuple(sum(c) for c in self.caps)

    def one_dimensional(self) -> bool:
        return (self.x0 - sum(self.ds) - sum(self.dp)) % 2 == 0


def random_mushroom_sample(rng: random.Random, max_r: int = 4, max_dk: int = 3,
                           max_deg: int = 3) -> MushroomSample:
    r = rng.randint(2, max_r)
    caps = tuple(tuple(rng.randint(0, max_deg) for _ in range(rng.randint(1, max_dk)))
                 for _ in range(r))
    parity = (sum(len(c) for c in caps) + sum(sum(c) for c in caps)) % 2
    x0 = rng.choice([v for v in range(max_deg + 1) if v % 2 == parity])
    return MushroomSample(rng.randint(0, 3), caps, rng.randint(2, r), x0)


def corner_mushroom_samples(max_r: int = 3, max_dk: int = 2) -> list[MushroomSample]:
    out = []
    for n in (0, 1):
        for r in range(1, max_r + 1):
            for ds in product(range(1, max_dk + 1), repeat=r):
                for flat in product((0, 1), repeat=sum(ds)):
                    caps, i = [], 0
                    for dk in ds:
                        caps.append(tuple(flat[i:i + dk]))
                        i += dk
                    x0 = (sum(ds) + sum(flat)) % 2
                    for k in range(2, r + 1):
                        out.append(MushroomSample(n, tuple(caps), k, x0))
                    if r == 1:
                        out.append(MushroomSample(n, tuple(caps), 0, x0))
    return out


def mushroom_ledger_steps(p: MushroomSample) -> list[SignLedgerStep]:
    """The three steps comparing the two orientations of an internal boundary point.

    The second and third steps also carry the boundary-sign lemmas (for the
    disc and for the collapsing stem); those parities are added to the
    Koszul sign of the displayed rearrangement via ``extra``.
    """
    n, r, k, x0 = p.n, p.r, p.k, p.x0
    ds, dp = p.ds, p.dp
    line = [1 + ds[j] + dp[j] + n for j in range(r)]  # parity of the line of cap j
    # first: cancel the Q factor of cap k-1 against the (k-1)-st Q on the left
    rhs = [(("S",), r - 1), (("W0",), x0)] + [(("P", j), line[j]) for j in range(k - 2)]
    rhs += [(("Pd",), ds[k - 2] - 1), (("o",), dp[k - 2]), (("Qc",), n)]
    rhs += [(("P", j), line[j]) for j in range(k - 1, r)]
    lhs = [(("C",), 1)] + [(("Q", j), n) for j in range(r)]
    rhs_after = [(("Qc",), n)] + [x for x in rhs if x[0] != ("Qc",)]
    lhs_after = [(("Q", k - 2), n)] + [x for x in lhs if x[0] != ("Q", k - 2)]
    first_claim = n * (k + 1) + n * (r + 1 + x0 + n * (k - 2)
                                     + sum(1 - ds[j] + dp[j] for j in range(k - 1)))
    steps = [_PairStep("first", [(_w(*rhs), _w(*rhs_after)), (_w(*lhs), _w(*lhs_after))], 0, first_claim)]
    # second: glue caps k-1 and k using the Stasheff boundary lemma
    before = _w((("Pd1",), ds[k - 2] - 1), (("o1",), dp[k - 2]), (("Pd2",), ds[k - 1] - 1),
                (("o2",), dp[k - 1]), (("Q",), n))
    after = _w((("Pd1",), ds[k - 2] - 1), (("Pd2",), ds[k - 1] - 1), (("o1",), dp[k - 2]),
               (("o2",), dp[k - 1]), (("Q",), n))
    lemma = stasheff_lemma_parity(ds[k - 2] + 1, ds[k - 1] + 1, ds[k - 2])
    steps.append(_PairStep("second", [(before, after)], lemma,
                           ds[k - 2] + (ds[k - 1] + 1) * dp[k - 2]))
    # third: the normal line moves to the front and cancels the stem collapse
    before = _w((("S",), r - 1), (("W0",), x0), *[(("P", j), line[j]) for j in range(k - 2)], (("R",), 1))
    after = GradedWord(((("R",), 1),) + before.symbols[:-1])
    collapse = shrub_lemma_parity_collapse(k)
    steps.append(_PairStep("third", [(before, after)], collapse,
                           k + r + x0 + sum(1 + ds[j] + dp[j] + n for j in range(k - 2))))
    return steps


@dataclass(frozen=True)
class _PairStep:
    name: str
    moves: list
    extra: int
    claimed: int

    @property
    def computed(self) -> int:
        return (sum(b.exponent_to(a) for b, a in self.moves) + self.extra) % 2

    @property
    def ok(self) -> bool:
        return self.computed == self.claimed % 2


def stasheff_lemma_parity(d1: int, d2: int, k: int) -> int:
    """First-principles parity of the Stasheff boundary lemma (0 <= k < d1)."""
    res = stasheff_sign_first_principles(d1, d2, k, exhaustive=False) if d1 >= 2 and d2 >= 2 else None
    if res is None:
        return boundary_sign_stasheff(d1, d2, k)
    return res["parities"][0]


def shrub_lemma_parity_collapse(k: int) -> int:
    """First-principles parity of the collapse of inputs k-1 and k."""
    d = max(k, 2)
    res = shrub_collapse_first_principles(d, k)
    return res["parities"][0]


def sign_difference_internal_boundary(p: MushroomSample) -> int:
    n, r, k, x0 = p.n, p.r, p.k, p.x0
    ds, dp = p.ds, p.dp
    e = 1 + ds[k - 1] * dp[k - 2]
    e += (n + 1) * (k + r + x0 + sum(1 + ds[j] + dp[j] for j in range(k - 1)))
    return e % 2


def merged_caps(p: MushroomSample) -> tuple:
    k = p.k
    return p.caps[:k - 2] + (p.caps[k - 2] + p.caps[k - 1],) + p.caps[k:]


def verify_ledger_mushroom(samples: int, seed: int = 0, corners: bool = True) -> list[dict]:
    """Check the internal-boundary computation for mushrooms.

    Per sample: each step recomputed (Koszul rearrangements plus the
    first-principles boundary lemmas) against its displayed exponent; the
    sum of the steps against the displayed total; and that adding the
    reorientation signs of the two one-dimensional components cancels it.
    With one cap there is no internal boundary and the sample passes.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = random.Random(seed)
    pool = corner_mushroom_samples() if corners else []
    pool += [random_mushroom_sample(rng) for _ in range(samples)]
    counts = {"steps": 0, "sum": 0, "cancel": 0}
    witness = None
    vacuous = 0
    for p in pool:
        if not p.one_dimensional():
            raise AssertionError(f"sampler produced a configuration of the wrong dimension {p}")
        if p.r < 2:
            vacuous += 1
            continue
        steps = mushroom_ledger_steps(p)
        total = sign_difference_internal_boundary(p)
        fails = [s.name for s in steps if not s.ok]
        summed = sum(s.claimed for s in steps) % 2 == total
        reo = (sign_twists("reorient_mushroom_1dim", {"n": p.n, "blocks": [list(c) for c in p.caps]})
               + sign_twists("reorient_mushroom_1dim", {"n": p.n, "blocks": [list(c) for c in merged_caps(p)]}))
        cancel = (sum(s.computed for s in steps) + reo) % 2 == 0
        for key, ok in (("steps", not fails), ("sum", summed), ("cancel", cancel)):
            if not ok:
                counts[key] += 1
                if witness is None:
                    witness = {"sample": _sample_dict(p), "failed": key, "steps": fails}
    report = []
    for key, label in (("steps", "mushroom_ledger_steps"), ("sum", "mushroom_ledger_total"),
                       ("cancel", "mushroom_ledger_cancellation")):
        report.append({"check": label, "params": {"samples": len(pool), "seed": seed, "vacuous": vacuous},
                       "expected": {"failures": 0},
                       "computed": {"failures": counts[key], "witness": witness if counts[key] else None},
                       "pass": counts[key] == 0})
    return report


# ---------------------------------------------------------------------------
# lemma reports


def stasheff_lemma_report(max_total: int = 7, conv: Conventions = None) -> list[dict]:
    rows = []
    for d1 in range(2, max_total):
        for d2 in range(2, max_total - d1 + 1):
            for k in range(d1):
                fp = stasheff_sign_first_principles(d1, d2, k, conv=conv)
                want = boundary_sign_stasheff(d1, d2, k)
                rows.append({"check": "stasheff_boundary_sign", "params": {"d1": d1, "d2": d2, "k": k},
                             "expected": {"parity": want},
                             "computed": {"parities": fp["parities"]},
                             "pass": fp["consistent"] and fp["parities"] == [want]})
    return rows


def shrub_lemma_report(max_r: int = 4, max_d: int = 6, conv: Conventions = None) -> list[dict]:
    rows = []
    for d in range(2, max_d + 1):
        for parts in compositions(d, 2, max_r):
            fp = shrub_break_first_principles(parts, conv=conv)
            want = boundary_sign_shrub("break", parts)
            rows.append({"check": "shrub_break_sign", "params": {"parts": list(parts)},
                         "expected": {"parity": want}, "computed": {"parities": fp["parities"]},
                         "pass": fp["consistent"] and fp["parities"] == [want]})
        for k in range(2, d + 1):
            fp = shrub_collapse_first_principles(d, k, conv=conv)
            want = boundary_sign_shrub("collapse", k)
            rows.append({"check": "shrub_collapse_sign", "params": {"d": d, "k": k},
                         "expected": {"parity": want}, "computed": {"parities": fp["parities"]},
                         "pass": fp["consistent"] and fp["parities"] == [want]})
    return rows
