"""Exact integer homological algebra.

Graded modules with named generators, cochain complexes (differential of
degree +1), Smith normal form, cohomology over the integers, Koszul signs
and graded words.

Matrices are plain lists of lists of Python integers, so all arithmetic is
exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

Matrix = list[list[int]]


# ---------------------------------------------------------------------------
# matrices


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def matmul(a: Matrix, b: Matrix, inner: int | None = None) -> Matrix:
    """Product of integer matrices. ``inner`` is needed when ``a`` has no rows."""
    if inner is None:
        inner = len(a[0]) if a else len(b)
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        orow = out[i]
        for k, x in enumerate(row):
            if x:
                brow = b[k]
                for j in range(cols):
                    if brow[j]:
                        orow[j] += x * brow[j]
    return out


def determinant(m: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _find_pivot(a: Matrix, t: int) -> tuple[int, int] | None:
    best = None
    best_val = 0
    for i in range(t, len(a)):
        row = a[i]
        for j in range(t, len(row)):
            v = abs(row[j])
            if v and (best is None or v < best_val):
                best, best_val = (i, j), v
                if v == 1:
                    return best
    return best


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(left, diag, right)`` with ``left @ m @ right == diag``.

    ``left`` and ``right`` are unimodular and ``diag`` carries nonnegative
    invariant factors d1 | d2 | ... on its diagonal.  Pivots are always the
    nonzero entry of least absolute value, ties broken in row-major order, so
    the output is deterministic.

    >>> smith_normal_form([[2, 1], [0, 2]])[1]
    [[1, 0], [0, 4]]
    """
    a = [list(map(int, row)) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    left = identity(rows)
    right = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x + q * y for x, y in zip(left[dst], left[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in a:
            row[dst] += q * row[src]
        for row in right:
            row[dst] += q * row[src]

    t = 0
    while t < min(rows, cols):
        piv = _find_pivot(a, t)
        if piv is None:
            break
        i, j = piv
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
            rest = [(abs(a[i][t]), 0, i) for i in range(t + 1, rows) if a[i][t]]
            rest += [(abs(a[t][j]), 1, j) for j in range(t + 1, cols) if a[t][j]]
            if rest:
                # a remainder survived; move the smallest one into the pivot
                _, kind, idx = min(rest)
                if kind == 0:
                    swap_rows(idx, t)
                else:
                    swap_cols(idx, t)
                continue
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]
        t += 1
    return left, a, right


def invariant_factors(m: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    _, diag, _ = smith_normal_form(m)
    out = []
    for i in range(min(len(diag), len(diag[0]) if diag else 0)):
        if diag[i][i]:
            out.append(diag[i][i])
    return out


def rank(m: Sequence[Sequence[int]]) -> int:
    return len(invariant_factors(m))


def inverse_unimodular(m: Matrix) -> Matrix:
    """Exact inverse of a unimodular matrix via its Smith form."""
    n = len(m)
    left, diag, right = smith_normal_form(m)
    for i in range(n):
        if diag[i][i] != 1:
            raise ValueError("matrix is not unimodular")
    # left m right = I  =>  m^-1 = right left
    return matmul(right, left, inner=n)


# ---------------------------------------------------------------------------
# graded modules and complexes


@dataclass(frozen=True)
class GradedModule:
    """Free graded abelian group on named generators."""

    basis: tuple[tuple[Hashable, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple((g, int(k)) for g, k in self.basis))
        ids = [g for g, _ in self.basis]
        if len(set(ids)) != len(ids):
            raise ValueError("generator ids must be unique")

    @property
    def generators(self) -> list:
        return [g for g, _ in self.basis]

    def degree_of(self, gid) -> int:
        return self._degrees()[gid]

    def _degrees(self) -> dict:
        return dict(self.basis)

    def degrees(self) -> list[int]:
        return sorted({k for _, k in self.basis})

    def in_degree(self, p: int) -> list:
        return [g for g, k in self.basis if k == p]

    def rank(self) -> int:
        return len(self.basis)

    def ranks(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for _, k in self.basis:
            out[k] = out.get(k, 0) + 1
        return dict(sorted(out.items()))


@dataclass(frozen=True)
class ChainComplex:
    """Cochain complex: a graded module and a sparse differential of degree +1.

    ``diff`` maps a generator id to ``{target id: coefficient}``.
    """

    module: GradedModule
    diff: dict = field(default_factory=dict)

    def __post_init__(self):
        deg = self.module._degrees()
        clean = {}
        for src, col in self.diff.items():
            if src not in deg:
                raise ValueError(f"unknown generator {src!r} in differential")
            kept = {}
            for tgt, c in col.items():
                if tgt not in deg:
                    raise ValueError(f"unknown generator {tgt!r} in differential")
                if c and deg[tgt] != deg[src] + 1:
                    raise ValueError(
                        f"differential entry {src!r} -> {tgt!r} does not raise degree by 1"
                    )
                if c:
                    kept[tgt] = int(c)
            if kept:
                clean[src] = kept
        object.__setattr__(self, "diff", clean)

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for g, c in vec.items():
            for t, e in self.diff.get(g, {}).items():
                out[t] = out.get(t, 0) + c * e
        return {g: c for g, c in out.items() if c}

    def matrix(self, p: int) -> Matrix:
        """Matrix of d: C^p -> C^{p+1}; rows index degree p+1 generators."""
        src = self.module.in_degree(p)
        tgt = self.module.in_degree(p + 1)
        row = {g: i for i, g in enumerate(tgt)}
        m = zeros(len(tgt), len(src))
        for j, g in enumerate(src):
            for t, c in self.diff.get(g, {}).items():
                m[row[t]][j] = c
        return m

    def is_square_zero(self) -> bool:
        return all(not self.apply(self.diff.get(g, {})) for g in self.module.generators)

    def degrees(self) -> list[int]:
        return self.module.degrees()


def cohomology(c: ChainComplex) -> list[tuple[int, int, list[int]]]:
    """Integral cohomology as ``[(degree, free rank, torsion), ...]``.

    Raises ``ValueError`` if the differential does not square to zero.
    """
    if not c.is_square_zero():
        raise ValueError("differential does not square to zero")
    degrees = c.degrees()
    out = []
    for p in degrees:
        n_p = len(c.module.in_degree(p))
        out_factors = invariant_factors(c.matrix(p))
        in_factors = invariant_factors(c.matrix(p - 1))
        free = n_p - len(out_factors) - len(in_factors)
        torsion = [f for f in in_factors if f > 1]
        out.append((p, free, torsion))
    return out


def shift(c: ChainComplex, m: int) -> ChainComplex:
    """Regrade by [m]: every generator degree drops by m; coefficients untouched."""
    mod = GradedModule(tuple((g, k - m) for g, k in c.module.basis))
    return ChainComplex(mod, {g: dict(col) for g, col in c.diff.items()})


# ---------------------------------------------------------------------------
# Koszul signs


def _check_perm(perm: Sequence[int]) -> None:
    n = len(perm)
    s = sorted(perm)
    if s != list(range(n)) and s != list(range(1, n + 1)):
        raise ValueError("not a permutation")


def koszul_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of moving graded symbols: (-1)^{sum over inversions of deg_i deg_j}.

    ``perm[i]`` is the new position of symbol i (0- or 1-based).

    >>> koszul_sign([1, 0], [1, 1])
    -1
    """
    if len(perm) != len(degrees):
        raise ValueError("permutation and degree list have different lengths")
    _check_perm(perm)
    n = len(perm)
    e = 0
    for i in range(n):
        if degrees[i] % 2 == 0:
            continue
        for j in range(i + 1, n):
            if perm[i] > perm[j] and degrees[j] % 2:
                e += 1
    return -1 if e % 2 else 1


@dataclass(frozen=True)
class GradedWord:
    """An ordered word of formal symbols with integer degrees.

    Symbols are ``(id, degree)`` pairs; ids should be unique inside a word so
    that rearrangements are unambiguous.
    """

    symbols: tuple[tuple[Hashable, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple((s, int(k)) for s, k in self.symbols))

    @classmethod
    def of(cls, *pairs) -> "GradedWord":
        return cls(tuple(pairs))

    def __add__(self, other: "GradedWord") -> "GradedWord":
        return GradedWord(self.symbols + other.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def ids(self) -> list:
        return [s for s, _ in self.symbols]

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.symbols)

    def permute(self, perm: Sequence[int]) -> tuple["GradedWord", int]:
        """Move symbol i to position ``perm[i]``; return the new word and sign."""
        _check_perm(perm)
        base = min(perm) if perm else 0
        out: list = [None] * len(perm)
        for i, p in enumerate(perm):
            out[p - base] = self.symbols[i]
        sign = koszul_sign(perm, [k for _, k in self.symbols])
        return GradedWord(tuple(out)), sign

    def sign_to(self, other: "GradedWord") -> int:
        """Koszul sign of the rearrangement carrying this word onto ``other``."""
        if sorted(map(repr, self.symbols)) != sorted(map(repr, other.symbols)):
            raise ValueError("words are not rearrangements of each other")
        pos = {s: i for i, s in enumerate(other.ids)}
        if len(pos) != len(other):
            raise ValueError("symbol ids must be unique")
        return koszul_sign([pos[s] for s in self.ids], [k for _, k in self.symbols])

    def exponent_to(self, other: "GradedWord") -> int:
        return 0 if self.sign_to(other) == 1 else 1

    def without(self, ids: Iterable) -> "GradedWord":
        drop = set(ids)
        return GradedWord(tuple(x for x in self.symbols if x[0] not in drop))


# ---------------------------------------------------------------------------
# splittings (deformation retracts onto cohomology)


class TorsionObstruction(ValueError):
    """Raised when integral cohomology has torsion, so no integral splitting exists."""


def _field_snf(m: Matrix, prime: int) -> tuple[Matrix, Matrix, Matrix]:
    """Smith form over GF(prime): left @ m @ right = diag with 0/1 entries."""
    a = [[x % prime for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    left = identity(rows)
    right = identity(cols)
    t = 0
    while t < min(rows, cols):
        piv = next(((i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]), None)
        if piv is None:
            break
        i, j = piv
        a[i], a[t] = a[t], a[i]
        left[i], left[t] = left[t], left[i]
        for row in a:
            row[j], row[t] = row[t], row[j]
        for row in right:
            row[j], row[t] = row[t], row[j]
        inv = pow(a[t][t], -1, prime)
        a[t] = [x * inv % prime for x in a[t]]
        left[t] = [x * inv % prime for x in left[t]]
        for i in range(rows):
            if i != t and a[i][t]:
                q = a[i][t]
                a[i] = [(x - q * y) % prime for x, y in zip(a[i], a[t])]
                left[i] = [(x - q * y) % prime for x, y in zip(left[i], left[t])]
        for j in range(t + 1, cols):
            if a[t][j]:
                q = a[t][j]
                for row in a:
                    row[j] = (row[j] - q * row[t]) % prime
                for row in right:
                    row[j] = (row[j] - q * row[t]) % prime
        t += 1
    return left, a, right


def _col(m: Matrix, j: int) -> list[int]:
    return [row[j] for row in m]


def _from_cols(cols: list[list[int]], n: int) -> Matrix:
    return [[c[i] for c in cols] for i in range(n)]


@dataclass
class Splitting:
    """Deformation retract of a complex onto generators of its cohomology.

    ``reps[h]`` is a cocycle representing cohomology generator ``h``;
    ``project`` sends a vector to cohomology coordinates and ``homotopy``
    satisfies ``x - i p x = d h x + h d x``.
    """

    complex: ChainComplex
    module: GradedModule
    reps: dict
    _coords: dict
    _hmap: dict
    prime: int | None = None

    def project(self, vec: dict) -> dict:
        out: dict = {}
        for g, c in vec.items():
            for h, e in self._coords.get(g, {}).items():
                out[h] = out.get(h, 0) + c * e
        return self._reduce(out)

    def homotopy(self, vec: dict) -> dict:
        out: dict = {}
        for g, c in vec.items():
            for t, e in self._hmap.get(g, {}).items():
                out[t] = out.get(t, 0) + c * e
        return self._reduce(out)

    def include(self, hvec: dict) -> dict:
        out: dict = {}
        for h, c in hvec.items():
            for g, e in self.reps[h].items():
                out[g] = out.get(g, 0) + c * e
        return self._reduce(out)

    def _reduce(self, vec: dict) -> dict:
        if self.prime is None:
            return {g: c for g, c in vec.items() if c}
        p = self.prime
        out = {}
        for g, c in vec.items():
            c %= p
            if c > p // 2:
                c -= p
            if c:
                out[g] = c
        return out


def split_complex(c: ChainComplex, name: str = "H", prime: int | None = None) -> Splitting:
    """Choose cohomology representatives, a projection and a contracting homotopy.

    Over the integers this needs torsion-free cohomology (otherwise
    ``TorsionObstruction``); with ``prime`` the computation is done over
    GF(prime).  Representatives prefer standard basis vectors of lowest index.
    Generator ids of the cohomology module are ``f"{name}{degree}.{j}"``.
    """
    if not c.is_square_zero():
        raise ValueError("differential does not square to zero")
    field_mode = prime is not None

    def snf(m):
        return _field_snf(m, prime) if field_mode else smith_normal_form(m)

    def inverse(m):
        if not field_mode:
            return inverse_unimodular(m)
        n = len(m)
        left, _, right = _field_snf(m, prime)
        return [[x % prime for x in row] for row in matmul(right, left, inner=n)]

    def saturated(cols: list[list[int]], n: int) -> bool:
        if not cols:
            return True
        f = invariant_factors(_from_cols(cols, n)) if not field_mode else None
        if field_mode:
            _, dg, _ = _field_snf(_from_cols(cols, n), prime)
            return sum(1 for i in range(min(len(dg), len(cols))) if dg[i][i]) == len(cols)
        return len(f) == len(cols) and all(x == 1 for x in f)

    degrees = c.degrees()
    gens = {p: c.module.in_degree(p) for p in degrees}
    # per degree: complement basis (B'), image basis (B, from previous degree)
    comp: dict = {}
    kernel: dict = {}
    images: dict = {p: [] for p in degrees}
    for p in degrees:
        n_p = len(gens[p])
        m = c.matrix(p)
        n_next = len(m)
        if n_next == 0:
            comp[p] = []
            kernel[p] = [[1 if i == j else 0 for i in range(n_p)] for j in range(n_p)]
            continue
        left, diag, right = snf(m)
        r = sum(1 for i in range(min(n_next, n_p)) if diag[i][i])
        for i in range(r):
            if diag[i][i] != 1:
                raise TorsionObstruction(
                    f"cohomology in degree {p + 1} has torsion {diag[i][i]}; no integral splitting")
        comp[p] = [_col(right, j) for j in range(r)]
        kernel[p] = [_col(right, j) for j in range(r, n_p)]
        linv = inverse(left)
        images.setdefault(p + 1, [])
        images[p + 1] = [_col(linv, j) for j in range(r)]
        # images[p+1][j] = d(comp[p][j])
    reps: dict = {}
    coords: dict = {}
    hmap: dict = {}
    basis_out = []
    for p in degrees:
        n_p = len(gens[p])
        if n_p == 0:
            continue
        zb = kernel[p]
        b = images.get(p, [])
        # choose cohomology representatives inside the kernel
        cands = []
        in_kernel = c.matrix(p)
        for i in range(n_p):
            e = [1 if k == i else 0 for k in range(n_p)]
            if all(row[i] % prime == 0 if field_mode else row[i] == 0 for row in in_kernel):
                cands.append(e)
        cands += zb
        chosen: list = []
        need = len(zb) - len(b)
        for v in cands:
            if len(chosen) == need:
                break
            if saturated(b + chosen + [v], n_p):
                chosen.append(v)
        if len(chosen) != need:
            raise TorsionObstruction(f"could not complete a splitting in degree {p}")
        full = comp[p] + chosen + b
        inv = inverse(_from_cols(full, n_p))
        nc, nh = len(comp[p]), len(chosen)
        hids = [f"{name}{p}.{j}" for j in range(nh)]
        for j, h in enumerate(hids):
            basis_out.append((h, p))
            reps[h] = {gens[p][i]: chosen[j][i] for i in range(n_p) if chosen[j][i]}
        prev = comp.get(p - 1, [])
        for i, g in enumerate(gens[p]):
            # coordinates of the i-th standard vector in the basis `full`
            col = [inv[k][i] for k in range(n_p)]
            hc = {hids[j]: col[nc + j] for j in range(nh) if col[nc + j]}
            if hc:
                coords[g] = hc
            hv: dict = {}
            for j in range(len(b)):
                x = col[nc + nh + j]
                if x:
                    for k, v in enumerate(prev[j]):
                        if v:
                            hv[gens[p - 1][k]] = hv.get(gens[p - 1][k], 0) + x * v
            hv = {k: v for k, v in hv.items() if v}
            if hv:
                hmap[g] = hv
    s = Splitting(c, GradedModule(tuple(basis_out)), reps, coords, hmap, prime)
    if field_mode:
        s.reps = {h: s._reduce(v) for h, v in reps.items()}
        s._coords = {g: s._reduce(v) for g, v in coords.items()}
        s._hmap = {g: s._reduce(v) for g, v in hmap.items()}
    return s
