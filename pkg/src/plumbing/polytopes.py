"""Planar trees and the moduli polytopes built from them.

A planar tree shape is either ``LEAF`` (``None``) or a tuple of child shapes
in left-to-right order.  Leaves are numbered 1..d in planar order and the
root is the outgoing edge.  Edges are addressed by paths: ``()`` is the root
edge and ``path + (j,)`` is the edge into the j-th child (0-based).

Three families of polytopes appear:

* the associahedra T̄_d of Stasheff trees, whose faces are planar trees with
  every vertex of at least 2 children; the face of a tree has dimension
  ``sum(c - 2)`` and the open cell of metric trees of that type has
  dimension equal to the number of internal edges;
* the composihedra S̄_d of shrubs, see :class:`ShrubFace`;
* the multiplihedra C̄_d of mushrooms, see :class:`Mushroom` and
  :class:`PaintedTree`.

Text form (S-expressions)::

    tree    := leaf | "(" tree tree+ ")"          leaf := positive integer
    broken  := "!" tree                           (an infinite internal edge)
    shrub   := tree-of-T-nodes with leaves "<" block+ ">"
    block   := leaf | "{" leaf leaf+ "}"          (zero-length incoming edges)
    painted := "(" ... ")" target node | "[" ... "]" cut node | "{" ... "}" source node
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Sequence

LEAF = None


# ---------------------------------------------------------------------------
# planar shapes


def n_leaves(shape) -> int:
    if shape is LEAF:
        return 1
    return sum(n_leaves(c) for c in shape)


def compositions(n: int, min_parts: int = 1, max_parts: int | None = None) -> Iterator[tuple]:
    """Ordered compositions of n into positive parts, by number of parts."""
    top = n if max_parts is None else min(n, max_parts)
    for parts in range(max(min_parts, 1), top + 1):
        yield from _compositions_exact(n, parts)


@lru_cache(maxsize=None)
def _compositions_exact(n: int, parts: int) -> tuple:
    if parts == 1:
        return ((n,),) if n >= 1 else ()
    out = []
    for first in range(1, n - parts + 2):
        for rest in _compositions_exact(n - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def planar_trees(d: int, binary: bool = False) -> tuple:
    """All planar trees with d leaves whose vertices have >= 2 children."""
    if d < 1:
        raise ValueError("a tree needs at least one leaf")
    if d == 1:
        return (LEAF,)
    out = []
    for parts in compositions(d, 2, 2 if binary else None):
        for kids in product(*(planar_trees(p, binary) for p in parts)):
            out.append(tuple(kids))
    return tuple(out)


def internal_nodes(shape, path=()) -> Iterator[tuple]:
    """Yield (path, node) for every vertex, root first, in planar preorder."""
    if shape is LEAF:
        return
    yield path, shape
    for j, c in enumerate(shape):
        yield from internal_nodes(c, path + (j,))


def internal_edges(shape) -> list:
    """Paths of edges joining two vertices."""
    return [p for p, _ in internal_nodes(shape) if p]


def face_dimension(shape) -> int:
    return sum(len(node) - 2 for _, node in internal_nodes(shape))


def subtree(shape, path):
    for j in path:
        shape = shape[j]
    return shape


def leaf_span(shape, path) -> tuple[int, int]:
    """1-based (first, last) leaf under the edge at ``path``."""
    start = 1
    node = shape
    for j in path:
        start += sum(n_leaves(c) for c in node[:j])
        node = node[j]
    return start, start + n_leaves(node) - 1


def contract_edge(shape, path):
    """Merge the vertex below ``path`` into its parent."""
    if not path:
        raise ValueError("cannot contract the root edge")
    parent = subtree(shape, path[:-1])
    j = path[-1]
    child = parent[j]
    if child is LEAF:
        raise ValueError("cannot contract a leaf edge")
    merged = parent[:j] + child + parent[j + 1:]
    return replace_at(shape, path[:-1], merged)


def replace_at(shape, path, new):
    if not path:
        return new
    j = path[0]
    return shape[:j] + (replace_at(shape[j], path[1:], new),) + shape[j + 1:]


def graft_shape(outer, inner, k: int):
    """Attach ``inner``'s root at leaf k (1-based) of ``outer``."""
    if outer is LEAF:
        if k != 1:
            raise ValueError("leaf index out of range")
        return inner
    count = 0
    out = []
    done = False
    for c in outer:
        m = n_leaves(c)
        if not done and count < k <= count + m:
            out.append(graft_shape(c, inner, k - count))
            done = True
        else:
            out.append(c)
        count += m
    if not done:
        raise ValueError("leaf index out of range")
    return tuple(out)


def leaf_path(shape, k: int) -> tuple:
    """Path of leaf k (1-based)."""
    if shape is LEAF:
        if k != 1:
            raise ValueError("leaf index out of range")
        return ()
    count = 0
    for j, c in enumerate(shape):
        m = n_leaves(c)
        if count < k <= count + m:
            return (j,) + leaf_path(c, k - count)
        count += m
    raise ValueError("leaf index out of range")


def corolla(d: int):
    return LEAF if d == 1 else (LEAF,) * d


def to_sexpr(shape, start: int = 1, open_="(", close=")") -> str:
    text, _ = _sexpr(shape, start, open_, close)
    return text


def _sexpr(shape, k, o, c):
    if shape is LEAF:
        return str(k), k + 1
    parts = []
    for ch in shape:
        t, k = _sexpr(ch, k, o, c)
        parts.append(t)
    return o + " ".join(parts) + c, k


def _tokens(text: str) -> list:
    toks = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()[]{}<>!|":
            toks.append(ch)
            i += 1
        else:
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] in "_-"):
                j += 1
            if j == i:
                raise ValueError(f"unexpected character {ch!r} at offset {i}")
            toks.append(text[i:j])
            i = j
    return toks


def parse_tree(text: str):
    """Inverse of :func:`to_sexpr`; leaves must read 1..d in order."""
    toks = _tokens(text)
    counter = [1]

    def node(i):
        t = toks[i]
        if t == "(":
            kids = []
            i += 1
            while toks[i] != ")":
                k, i = node(i)
                kids.append(k)
            if len(kids) < 2:
                raise ValueError("a vertex needs at least two children")
            return tuple(kids), i + 1
        if t.isdigit():
            if int(t) != counter[0]:
                raise ValueError(f"leaf {t} out of planar order")
            counter[0] += 1
            return LEAF, i + 1
        raise ValueError(f"unexpected token {t!r}")

    try:
        shape, end = node(0)
    except IndexError:
        raise ValueError("unbalanced expression") from None
    if end != len(toks):
        raise ValueError("trailing tokens")
    return shape


# ---------------------------------------------------------------------------
# ribbon trees and labellings


@dataclass(frozen=True)
class RibbonTree:
    """A planar rooted tree; the root edge is the outgoing leaf."""

    shape: object

    @classmethod
    def from_cyclic(cls, cyclic: dict, output) -> "RibbonTree":
        """Build from cyclic orders ``vertex -> [neighbours]`` and an output leaf.

        Leaves are the vertices of valence 1.  At each vertex the children
        are the neighbours following the parent in cyclic order, which fixes
        the planar numbering of inputs.
        """
        for v, nbrs in cyclic.items():
            for w in nbrs:
                if v not in cyclic.get(w, ()):
                    raise ValueError(f"edge {v}-{w} is not symmetric")
        if len(cyclic.get(output, ())) != 1:
            raise ValueError("output must be a leaf")
        n_edges = sum(len(v) for v in cyclic.values()) // 2
        if n_edges != len(cyclic) - 1:
            raise ValueError("not a tree")
        seen = {output}

        def build(v, parent):
            nbrs = cyclic[v]
            if len(nbrs) == 1:
                return LEAF
            if len(nbrs) == 2:
                raise ValueError(f"vertex {v!r} has valence 2")
            i = nbrs.index(parent)
            kids = []
            for w in nbrs[i + 1:] + nbrs[:i]:
                if w in seen:
                    raise ValueError("not a tree")
                seen.add(w)
                kids.append(build(w, v))
            return tuple(kids)

        (first,) = cyclic[output]
        seen.add(first)
        shape = build(first, output)
        if len(seen) != len(cyclic):
            raise ValueError("tree is disconnected")
        return cls(shape)

    @property
    def d(self) -> int:
        return n_leaves(self.shape)

    def edges(self) -> list:
        """All edge paths: root, internal and input leaves."""
        out = [()]

        def walk(s, p):
            if s is LEAF:
                return
            for j, c in enumerate(s):
                out.append(p + (j,))
                walk(c, p + (j,))

        walk(self.shape, ())
        return out

    def internal_edges(self) -> list:
        return internal_edges(self.shape)

    def is_trivalent(self) -> bool:
        return all(len(n) == 2 for _, n in internal_nodes(self.shape))

    @property
    def cell_dimension(self) -> int:
        """Dimension of the open cell of metric trees of this type."""
        return len(self.internal_edges())

    @property
    def face_dimension(self) -> int:
        """Dimension of the associahedron face labelled by this tree."""
        return face_dimension(self.shape)

    def sexpr(self) -> str:
        return to_sexpr(self.shape)

    def __str__(self):
        return self.sexpr()


def label_edges(t: RibbonTree, seq: Sequence[int]) -> dict:
    """The unique cyclically compatible labelling by pairs from ``seq = (i_0..i_d)``.

    The edge above the leaves a..b is labelled ``(i_{a-1}, i_b)``; in particular
    input k is ``(i_{k-1}, i_k)`` and the output is ``(i_0, i_d)``.
    """
    if len(seq) != t.d + 1:
        raise ValueError(f"need {t.d + 1} labels, got {len(seq)}")
    out = {}
    for e in t.edges():
        a, b = leaf_span(t.shape, e)
        out[e] = (seq[a - 1], seq[b])
    return out


def is_compatible(t: RibbonTree, labels: dict) -> bool:
    """i(e') = j(e) whenever e' follows e in the cyclic order at a vertex."""
    for p, node in internal_nodes(t.shape):
        around = [labels[p + (j,)] for j in range(len(node))]
        up = labels[p]
        # cyclic order at the vertex: children left to right, then the parent
        if around[0][0] != up[0] or around[-1][1] != up[1]:
            return False
        if any(x[1] != y[0] for x, y in zip(around, around[1:])):
            return False
    return True


def enumerate_tree_types(d: int, trivalent_only: bool = False) -> list[RibbonTree]:
    """Combinatorial types of Stasheff trees with d inputs (vertices of valence >= 3)."""
    if d < 2:
        raise ValueError("Stasheff trees need d >= 2")
    return [RibbonTree(s) for s in planar_trees(d, binary=trivalent_only)]


@dataclass(frozen=True)
class BrokenTree:
    """A tree with some internal edges of infinite length."""

    shape: object
    broken: frozenset

    @property
    def d(self) -> int:
        return n_leaves(self.shape)

    @property
    def dimension(self) -> int:
        """Finite internal edges parametrise the stratum."""
        return len(internal_edges(self.shape)) - len(self.broken)

    def sexpr(self) -> str:
        def go(s, p, k):
            if s is LEAF:
                return str(k), k + 1
            parts = []
            for j, c in enumerate(s):
                t, k = go(c, p + (j,), k)
                parts.append(("!" if p + (j,) in self.broken else "") + t)
            return "(" + " ".join(parts) + ")", k
        return go(self.shape, (), 1)[0]


def _as_broken(t) -> BrokenTree:
    if isinstance(t, BrokenTree):
        return t
    if isinstance(t, RibbonTree):
        return BrokenTree(t.shape, frozenset())
    return BrokenTree(t, frozenset())


def graft(t1, t2, k: int, labels1: Sequence[int] | None = None,
          labels2: Sequence[int] | None = None) -> BrokenTree:
    """Attach the output of t2 to input k (1-based) of t1 along an infinite edge.

    With label sequences, the output label of t2 must equal the label of the
    k-th input of t1.  Grafting a one-input tree is the identity.
    """
    a, b = _as_broken(t1), _as_broken(t2)
    if not 1 <= k <= a.d:
        raise ValueError(f"input {k} out of range 1..{a.d}")
    if labels1 is not None and labels2 is not None:
        if len(labels1) != a.d + 1 or len(labels2) != b.d + 1:
            raise ValueError("label sequences have the wrong length")
        if (labels1[k - 1], labels1[k]) != (labels2[0], labels2[-1]):
            raise ValueError("labels of the grafted edge do not agree")
    if a.shape is LEAF:
        return b
    if b.shape is LEAF:
        return a
    p = leaf_path(a.shape, k)
    shape = graft_shape(a.shape, b.shape, k)
    broken = set(a.broken) | {p} | {p + q for q in b.broken}
    return BrokenTree(shape, frozenset(broken))


def grafted_labels(labels1: Sequence[int], labels2: Sequence[int], k: int) -> tuple:
    """Label sequence of a graft: insert labels2 between labels1[k-1] and labels1[k]."""
    return tuple(labels1[:k]) + tuple(labels2[1:-1]) + tuple(labels1[k:])


def stasheff_boundary(d: int) -> list[dict]:
    """Codimension-one strata T̄_{d1} x T̄_{d2} of T̄_d in planar order."""
    out = []
    for d1 in range(2, d):
        d2 = d + 1 - d1
        for k in range(1, d1 + 1):
            b = graft(corolla(d1), corolla(d2), k)
            out.append({"d1": d1, "d2": d2, "k": k, "stratum": b.sexpr(),
                        "dimension": (d1 - 2) + (d2 - 2)})
    return out


# ---------------------------------------------------------------------------
# metric trees


@dataclass
class MetricRibbonTree:
    """A ribbon tree with internal edge lengths in [0, inf].

    In the shrub context the inputs are finite and equidistant from the
    output; this is stored as a single ``leaf_distance`` and the input edge
    lengths are derived from it.
    """

    tree: RibbonTree
    lengths: dict
    context: str = "stasheff"
    leaf_distance: float | None = None

    def __post_init__(self):
        edges = set(self.tree.internal_edges())
        if set(self.lengths) != edges:
            raise ValueError("lengths must be given on exactly the internal edges")
        for e, v in self.lengths.items():
            if not (v >= 0):
                raise ValueError(f"edge {e} has negative length")
        if self.context == "shrub":
            if self.leaf_distance is None or math.isinf(self.leaf_distance):
                raise ValueError("shrubs need a finite distance from output to inputs")
            if any(math.isinf(v) for v in self.lengths.values()):
                pass  # broken shrubs are allowed; the input lengths are then undefined
            elif min(self.input_lengths()) < 0:
                raise ValueError("inputs are not equidistant with nonnegative lengths")
        elif self.context != "stasheff":
            raise ValueError(f"unknown context {self.context!r}")

    def input_lengths(self) -> list:
        out = []
        for k in range(1, self.tree.d + 1):
            p = leaf_path(self.tree.shape, k)
            depth = sum(self.lengths[p[:i]] for i in range(1, len(p)))
            out.append(self.leaf_distance - depth)
        return out

    def combinatorial_type(self) -> BrokenTree:
        """Collapse zero-length edges; infinite edges become broken."""
        shape = self.tree.shape
        zero = sorted((e for e, v in self.lengths.items() if v == 0), key=len, reverse=True)
        inf_edges = {e for e, v in self.lengths.items() if math.isinf(v)}
        # contract deepest first so that shallower paths stay valid
        for e in zero:
            shape = contract_edge(shape, e)
        new_broken = set()
        for e in inf_edges:
            new_broken.add(_path_after_contractions(self.tree.shape, e, zero))
        return BrokenTree(shape, frozenset(new_broken))


def _path_after_contractions(shape, path, contracted):
    a, b = leaf_span(shape, path)
    target = shape
    for e in sorted(contracted, key=len, reverse=True):
        target = contract_edge(target, e)
    # locate the edge whose leaf span is unchanged
    for p in internal_edges(target):
        if leaf_span(target, p) == (a, b):
            return p
    raise ValueError("edge disappeared")


# ---------------------------------------------------------------------------
# shrubs


@dataclass(frozen=True)
class ShrubFace:
    """A face of S̄_d.

    ``target`` is a planar tree with r leaves (LEAF when r = 1) whose leaves
    are shrub vertices; ``nodes[k]`` is the composition of the inputs of the
    k-th shrub vertex into blocks, a block of size >= 2 being a group of
    incoming edges of length zero.
    """

    target: object
    nodes: tuple

    def __post_init__(self):
        if n_leaves(self.target) != len(self.nodes):
            raise ValueError("one shrub vertex per target leaf")
        for blocks in self.nodes:
            if not blocks or any(b < 1 for b in blocks):
                raise ValueError("blocks must be positive")

    @property
    def d(self) -> int:
        return sum(sum(b) for b in self.nodes)

    @property
    def dimension(self) -> int:
        return face_dimension(self.target) + sum(len(b) - 1 for b in self.nodes)

    def sexpr(self) -> str:
        k = 1
        texts = []
        for blocks in self.nodes:
            parts = []
            for b in blocks:
                if b == 1:
                    parts.append(str(k))
                else:
                    parts.append("{" + " ".join(str(k + i) for i in range(b)) + "}")
                k += b
            texts.append("<" + " ".join(parts) + ">")
        it = iter(texts)

        def go(s):
            if s is LEAF:
                return next(it)
            return "(" + " ".join(go(c) for c in s) + ")"
        return go(self.target)

    def cofaces(self) -> list["ShrubFace"]:
        """Faces one dimension up that contain this face."""
        out = []
        for p in internal_edges(self.target):
            out.append(ShrubFace(contract_edge(self.target, p), self.nodes))
        for i, blocks in enumerate(self.nodes):
            for j, b in enumerate(blocks):
                for cut in range(1, b):
                    nb = blocks[:j] + (cut, b - cut) + blocks[j + 1:]
                    out.append(ShrubFace(self.target, self.nodes[:i] + (nb,) + self.nodes[i + 1:]))
        # a target vertex all of whose children are shrub vertices merges into one
        leaf_index = _leaf_offsets(self.target)
        for p, node in internal_nodes(self.target):
            if all(c is LEAF for c in node):
                first = leaf_index[p]
                merged = tuple(b for i in range(first, first + len(node)) for b in self.nodes[i])
                nodes = self.nodes[:first] + (merged,) + self.nodes[first + len(node):]
                out.append(ShrubFace(replace_at(self.target, p, LEAF), nodes))
        return out


def _leaf_offsets(shape) -> dict:
    """0-based index of the first leaf under each vertex path."""
    out = {}

    def go(s, p, k):
        if s is LEAF:
            return k + 1
        out[p] = k
        for j, c in enumerate(s):
            k = go(c, p + (j,), k)
        return k

    go(shape, (), 0)
    return out


@lru_cache(maxsize=None)
def _shrub_faces(d: int) -> tuple:
    out = []
    for parts in compositions(d):
        r = len(parts)
        targets = planar_trees(r)
        node_choices = [list(compositions(p)) for p in parts]
        for t in targets:
            for nodes in product(*node_choices):
                out.append(ShrubFace(t, tuple(nodes)))
    return tuple(out)


def shrub_faces(d: int) -> list[ShrubFace]:
    """All faces of S̄_d."""
    if d < 1:
        raise ValueError("shrubs need d >= 1")
    return list(_shrub_faces(d))


@dataclass(frozen=True)
class BoundaryStratum:
    family: str
    params: tuple
    face: object
    dimension: int

    def sexpr(self) -> str:
        return self.face.sexpr()

    def as_dict(self) -> dict:
        return {"family": self.family, "params": list(self.params),
                "stratum": self.sexpr(), "dimension": self.dimension}


def shrub_boundary_maps(r: int | None, d: int) -> list[BoundaryStratum]:
    """Codimension-one strata of S̄_d.

    ``tree``: T̄_r x S̄_{d_1} x ... x S̄_{d_r} for r >= 2 and d_1 + ... + d_r = d.
    ``vee``: two incoming edges of length zero at position k, 1 <= k <= d - 1.
    With ``r`` given only the tree family with that many shrubs is listed
    (r = 1 then gives the vee family).  S̄_1 is a point and has no boundary.
    """
    out = []
    if r is None or r >= 2:
        for parts in compositions(d, 2):
            if r is not None and len(parts) != r:
                continue
            face = ShrubFace(corolla(len(parts)), tuple((1,) * p for p in parts))
            out.append(BoundaryStratum("tree", parts, face, face.dimension))
    if r is None or r == 1:
        for k in range(1, d):
            blocks = (1,) * (k - 1) + (2,) + (1,) * (d - k - 1)
            face = ShrubFace(LEAF, (blocks,))
            out.append(BoundaryStratum("vee", (k,), face, face.dimension))
    return out


# ---------------------------------------------------------------------------
# caps


@dataclass(frozen=True)
class Cap:
    """A face of P̄_m, described along its distinguished arc.

    The spine is the path from the outgoing point v1 to v2.  ``spine[j]`` is
    the tuple of non-spine children at the j-th spine vertex (from v1), each
    a leaf or a disc tree; every spine vertex has at least one.
    """

    spine: tuple

    def __post_init__(self):
        if not self.spine:
            raise ValueError("a cap has at least one spine vertex")
        for kids in self.spine:
            if not kids:
                raise ValueError("every spine vertex needs an input")
            for c in kids:
                if c is not LEAF and any(len(n) < 2 for _, n in internal_nodes(c)):
                    raise ValueError("disc vertices need at least two inputs")

    @property
    def m(self) -> int:
        return sum(n_leaves(c) for kids in self.spine for c in kids)

    @property
    def dimension(self) -> int:
        return sum(len(kids) - 1 for kids in self.spine) + \
            sum(face_dimension(c) for kids in self.spine for c in kids)

    def glue(self, other: "Cap") -> "Cap":
        """The gluing along outgoing arcs; self carries the earlier inputs."""
        return Cap(self.spine + other.spine)

    def split(self, j: int) -> tuple["Cap", "Cap"]:
        return Cap(self.spine[:j]), Cap(self.spine[j:])

    def sexpr(self, start: int = 1) -> str:
        k = start
        parts = []
        for kids in self.spine:
            texts = []
            for c in kids:
                texts.append(to_sexpr(c, k))
                k += n_leaves(c)
            parts.append("(" + " ".join(texts) + ")")
        return "cap" + "".join(parts)


def cap_to_disc(cap: Cap):
    """Planar tree with m+1 leaves; the last leaf is v2 and the root is v1."""
    shape = LEAF
    for kids in reversed(cap.spine):
        shape = tuple(kids) + (shape,)
    return shape


def disc_to_cap(shape) -> Cap:
    """Inverse of :func:`cap_to_disc`: read the spine as the rightmost path."""
    if shape is LEAF:
        raise ValueError("a cap disc has at least two leaves")
    spine = []
    s = shape
    while s is not LEAF:
        spine.append(tuple(s[:-1]))
        s = s[-1]
    return Cap(tuple(spine))


def cap_faces(m: int) -> list[Cap]:
    return [disc_to_cap(s) for s in planar_trees(m + 1)]


# ---------------------------------------------------------------------------
# mushrooms


@dataclass(frozen=True)
class Mushroom:
    """A stratum of stable mushrooms: a stem face with r inputs and r caps."""

    stem: ShrubFace
    caps: tuple

    def __post_init__(self):
        if self.stem.d != len(self.caps):
            raise ValueError("the stem needs one input per cap")

    @property
    def partition(self) -> tuple:
        return tuple(c.m for c in self.caps)

    @property
    def d(self) -> int:
        return sum(self.partition)

    @property
    def dimension(self) -> int:
        return self.stem.dimension + sum(c.dimension for c in self.caps)

    def sexpr(self) -> str:
        k = 1
        caps = []
        for c in self.caps:
            caps.append(c.sexpr(k))
            k += c.m
        return "(mushroom " + self.stem.sexpr() + " " + " ".join(caps) + ")"


def normalize_mushroom(m: Mushroom) -> Mushroom:
    """Canonical representative under the vee/gluing identification.

    Every group of zero-length incoming stem edges is replaced by a single
    input carrying the glued cap, working left to right.
    """
    caps = []
    nodes = []
    i = 0
    for blocks in m.stem.nodes:
        for b in blocks:
            glued = m.caps[i]
            for c in m.caps[i + 1:i + b]:
                glued = glued.glue(c)
            caps.append(glued)
            i += b
        nodes.append((1,) * len(blocks))
    return Mushroom(ShrubFace(m.stem.target, tuple(nodes)), tuple(caps))


def is_normal(m: Mushroom) -> bool:
    return all(b == 1 for blocks in m.stem.nodes for b in blocks)


def mushroom_strata(d: int) -> list[Mushroom]:
    """All normalized mushroom strata with d inputs."""
    out = []
    for parts in compositions(d):
        r = len(parts)
        cap_choices = [cap_faces(p) for p in parts]
        for target in planar_trees(r):
            leaves = n_leaves(target)
            for split in compositions(r, leaves, leaves):
                stem = ShrubFace(target, tuple((1,) * s for s in split))
                for caps in product(*cap_choices):
                    out.append(Mushroom(stem, tuple(caps)))
    return out


# painted trees: ("T", kids) target vertex, ("F", kids) vertex on the cut,
# ("R", kids) source (disc) vertex; leaves are LEAF.


@dataclass(frozen=True)
class PaintedTree:
    """A face of the multiplihedron C̄_d.

    Above the cut are target vertices (at least two children), on the cut
    are cut vertices (at least one child), below are source vertices (at
    least two children).  Every path from the root to a leaf crosses
    exactly one cut vertex.
    """

    root: tuple

    def __post_init__(self):
        _check_painted(self.root, above=True)

    @property
    def d(self) -> int:
        return _painted_leaves(self.root)

    @property
    def dimension(self) -> int:
        return _painted_dim(self.root)

    def sexpr(self) -> str:
        return _painted_sexpr(self.root, [1])

    def cofaces(self) -> list["PaintedTree"]:
        return [PaintedTree(r) for r in _painted_cofaces(self.root)]


_BRACKETS = {"T": "()", "F": "[]", "R": "{}"}


def _check_painted(node, above: bool, below: bool = False):
    if node is LEAF:
        if above:
            raise ValueError("a leaf is reached before the cut")
        return
    kind, kids = node
    if kind == "T":
        if not above or len(kids) < 2:
            raise ValueError("target vertices sit above the cut with >= 2 children")
        for c in kids:
            _check_painted(c, True)
    elif kind == "F":
        if not above or len(kids) < 1:
            raise ValueError("cut vertices need >= 1 child and one per path")
        for c in kids:
            _check_painted(c, False, True)
    elif kind == "R":
        if above or len(kids) < 2:
            raise ValueError("source vertices sit below the cut with >= 2 children")
        for c in kids:
            _check_painted(c, False, True)
    else:
        raise ValueError(f"unknown vertex kind {kind!r}")


def _painted_leaves(node) -> int:
    if node is LEAF:
        return 1
    return sum(_painted_leaves(c) for c in node[1])


def _painted_dim(node) -> int:
    if node is LEAF:
        return 0
    kind, kids = node
    own = len(kids) - (1 if kind == "F" else 2)
    return own + sum(_painted_dim(c) for c in kids)


def _painted_sexpr(node, counter) -> str:
    if node is LEAF:
        k = counter[0]
        counter[0] += 1
        return str(k)
    o, c = _BRACKETS[node[0]]
    return o + " ".join(_painted_sexpr(ch, counter) for ch in node[1]) + c


def _painted_cofaces(node) -> list:
    """All trees one dimension up (one contraction anywhere)."""
    if node is LEAF:
        return []
    kind, kids = node
    out = []
    # contractions inside a child
    for j, c in enumerate(kids):
        for nc in _painted_cofaces(c):
            out.append((kind, kids[:j] + (nc,) + kids[j + 1:]))
    # contract a child vertex into this one
    for j, c in enumerate(kids):
        if c is LEAF:
            continue
        ck, ckids = c
        if (kind, ck) in (("T", "T"), ("R", "R"), ("F", "R")):
            out.append((kind, kids[:j] + ckids + kids[j + 1:]))
    # a target vertex whose children are all cut vertices becomes one cut vertex
    if kind == "T" and all(c is not LEAF and c[0] == "F" for c in kids):
        out.append(("F", tuple(g for c in kids for g in c[1])))
    return out


def _source_painted(shape):
    if shape is LEAF:
        return LEAF
    return ("R", tuple(_source_painted(c) for c in shape))


def coarse_face(m: Mushroom) -> PaintedTree:
    """The multiplihedron face whose interior contains the mushroom stratum."""
    m = normalize_mushroom(m)
    caps = iter(m.caps)

    def node_for(blocks):
        kids = []
        for _ in blocks:
            cap = next(caps)
            for spine_kids in cap.spine:
                kids.extend(_source_painted(c) for c in spine_kids)
        return ("F", tuple(kids))

    nodes = iter(m.stem.nodes)

    def go(s):
        if s is LEAF:
            return node_for(next(nodes))
        return ("T", tuple(go(c) for c in s))

    return PaintedTree(go(m.stem.target))


@lru_cache(maxsize=None)
def _painted_below(d: int) -> tuple:
    """Subtrees below the cut with d leaves."""
    if d == 1:
        return (LEAF,)
    return tuple(_source_painted(s) for s in planar_trees(d))


@lru_cache(maxsize=None)
def _painted_above(d: int) -> tuple:
    out = []
    for parts in compositions(d):
        for kids in product(*(_painted_below(p) for p in parts)):
            out.append(("F", tuple(kids)))
    for parts in compositions(d, 2):
        for kids in product(*(_painted_above(p) for p in parts)):
            out.append(("T", tuple(kids)))
    return tuple(out)


def painted_faces(d: int) -> list[PaintedTree]:
    """All faces of C̄_d enumerated directly as painted trees."""
    if d < 1:
        raise ValueError("mushrooms need d >= 1")
    return [PaintedTree(r) for r in _painted_above(d)]


def mushroom_faces(d: int) -> list[PaintedTree]:
    """Faces of C̄_d obtained from the mushroom strata, sorted by text form."""
    seen = {}
    for m in mushroom_strata(d):
        f = coarse_face(m)
        seen.setdefault(f.sexpr(), f)
    return [seen[k] for k in sorted(seen)]


def face_counts(faces: Iterable) -> dict:
    out: dict = {}
    for f in faces:
        out[f.dimension] = out.get(f.dimension, 0) + 1
    return dict(sorted(out.items()))


def mushroom_vertex_count(d: int) -> int:
    return sum(1 for f in mushroom_faces(d) if f.dimension == 0)


def mushroom_dimension(d: int) -> int:
    return max(f.dimension for f in mushroom_faces(d))


def mushroom_boundary(d: int) -> list[BoundaryStratum]:
    """Codimension-one strata of C̄_d.

    ``target``: r >= 2 mushrooms grafted onto a Stasheff tree, params
    (d_1, ..., d_r).  ``source``: a disc with d2 >= 2 inputs attached at
    input k of a mushroom with d1 inputs, params (d1, d2, k).  Strata
    identified by the vee/gluing relation are interior and do not appear.
    """
    out = []
    if d < 2:
        return out
    for parts in compositions(d, 2):
        root = ("T", tuple(("F", (LEAF,) * p) for p in parts))
        f = PaintedTree(root)
        out.append(BoundaryStratum("target", parts, f, f.dimension))
    for d2 in range(2, d + 1):
        d1 = d - d2 + 1
        for k in range(1, d1 + 1):
            kids = [LEAF] * d1
            kids[k - 1] = ("R", (LEAF,) * d2)
            f = PaintedTree(("F", tuple(kids)))
            out.append(BoundaryStratum("source", (d1, d2, k), f, f.dimension))
    return out


def catalan(n: int) -> int:
    """Catalan numbers by the convolution recurrence."""
    c = [1]
    for m in range(1, n + 1):
        c.append(sum(c[i] * c[m - 1 - i] for i in range(m)))
    return c[n]


def shrub_vertex_count(d: int) -> int:
    """Vertices of S̄_d: choose which adjacent inputs share a leaf, then a binary tree."""
    return sum(math.comb(d - 1, k - 1) * catalan(k - 1) for k in range(1, d + 1))


def _cuts(shape) -> int:
    if shape is LEAF:
        return 1
    p = 1
    for c in shape:
        p *= _cuts(c)
    return 1 + p


def painted_vertex_count(d: int) -> int:
    """Vertices of C̄_d: binary trees with a horizontal cut crossing every input."""
    return sum(_cuts(t) for t in planar_trees(d, binary=True))


def polytope_report(d_max: int = 5) -> list[dict]:
    """Stratification counts for T̄_d, S̄_d and C̄_d against closed-form oracles."""
    rows = []
    for d in range(2, d_max + 1):
        trees = enumerate_tree_types(d)
        triv = sum(1 for t in trees if t.is_trivalent())
        dim = max(t.cell_dimension for t in trees)
        rows.append({"check": "stasheff_types", "params": {"d": d},
                     "expected": {"trivalent": catalan(d - 1), "dimension": d - 2},
                     "computed": {"types": len(trees), "trivalent": triv, "dimension": dim,
                                  "boundary": len(stasheff_boundary(d))},
                     "pass": triv == catalan(d - 1) and dim == d - 2})
    for d in range(1, d_max + 1):
        sf = shrub_faces(d)
        counts = face_counts(sf)
        rows.append({"check": "shrub_faces", "params": {"d": d},
                     "expected": {"vertices": shrub_vertex_count(d), "dimension": d - 1},
                     "computed": {"faces_by_dim": {str(k): v for k, v in counts.items()},
                                  "vertices": counts.get(0, 0), "dimension": max(counts),
                                  "boundary": len(shrub_boundary_maps(None, d))},
                     "pass": counts.get(0, 0) == shrub_vertex_count(d) and max(counts) == d - 1})
        mf = mushroom_faces(d)
        pf = painted_faces(d)
        same = {f.sexpr() for f in mf} == {f.sexpr() for f in pf}
        counts = face_counts(mf)
        ok = same and max(counts) == d - 1 and counts.get(0, 0) == painted_vertex_count(d)
        rows.append({"check": "mushroom_faces", "params": {"d": d},
                     "expected": {"dimension": d - 1, "vertices": painted_vertex_count(d),
                                  "matches_painted_enumeration": True},
                     "computed": {"dimension": max(counts), "vertices": counts.get(0, 0),
                                  "faces_by_dim": {str(k): v for k, v in counts.items()},
                                  "boundary": len(mushroom_boundary(d)),
                                  "matches_painted_enumeration": same},
                     "pass": ok})
    return rows
