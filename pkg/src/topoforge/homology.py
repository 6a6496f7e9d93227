"""Integral chain complexes, Smith normal form and first homology."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

__all__ = [
    "AbelianGroup",
    "SparseMatrix",
    "boundary_matrices",
    "smith_normal_form",
    "presentation_group",
    "h1",
    "group_equal",
]


def _normalize_torsion(orders: Iterable[int]) -> Tuple[int, ...]:
    """Invariant factors d1 | d2 | ... of a product of cyclic groups of the given orders."""
    vals = [abs(int(d)) for d in orders if abs(int(d)) > 1]
    vals.sort()
    changed = True
    while changed:
        changed = False
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                a, b = vals[i], vals[j]
                if b % a:
                    g = math.gcd(a, b)
                    vals[i], vals[j] = g, a * b // g
                    changed = True
        vals = sorted(v for v in vals if v > 1)
    return tuple(vals)


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group Z^rank + Z/d1 + ... with d1 | d2 | ..."""

    rank: int = 0
    torsion: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("negative rank")
        object.__setattr__(self, "torsion", _normalize_torsion(self.torsion))

    @classmethod
    def from_diagonal(cls, diag: Sequence[int], ngens: int) -> "AbelianGroup":
        nonzero = [d for d in diag if d != 0]
        return cls(ngens - len(nonzero), tuple(nonzero))

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def order(self) -> float:
        return math.inf if self.rank else math.prod(self.torsion)

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def group_equal(a: AbelianGroup, b: AbelianGroup) -> bool:
    return a.rank == b.rank and a.torsion == b.torsion


class SparseMatrix:
    """Integer matrix stored column-wise as {row: value} dictionaries."""

    def __init__(self, nrows: int, ncols: int, columns: List[Dict[int, int]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.columns = columns if columns is not None else [dict() for _ in range(ncols)]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def to_dense(self) -> List[List[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out[i][j] = v
        return out

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = []
        for col in other.columns:
            acc: Dict[int, int] = {}
            for k, v in col.items():
                for i, w in self.columns[k].items():
                    acc[i] = acc.get(i, 0) + v * w
            cols.append({i: v for i, v in acc.items() if v})
        return SparseMatrix(self.nrows, other.ncols, cols)

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)


def boundary_matrices(cx) -> List[SparseMatrix]:
    """[d1, d2, d3] for a complex exposing simplices(k) as sorted vertex tuples.

    Simplices are oriented by increasing vertex label; d_k maps k-chains to
    (k-1)-chains with the alternating-sign face rule.
    """
    mats = []
    lower = [tuple(s) for s in cx.simplices(0)]
    for k in (1, 2, 3):
        upper = [tuple(s) for s in cx.simplices(k)]
        index = {s: i for i, s in enumerate(lower)}
        cols = []
        for s in upper:
            col = {}
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                col[index[face]] = -1 if i % 2 else 1
            cols.append(col)
        mats.append(SparseMatrix(len(lower), len(upper), cols))
        lower = upper
    return mats


def _identity(n: int) -> List[List[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(m: Sequence[Sequence[int]]):
    """Return (factors, U, V) with U*m*V diagonal, factors along the diagonal.

    U and V are unimodular.  The factors satisfy d1 | d2 | ... and are
    non-negative; trailing zeros fill out min(rows, cols).
    """
    a = [[int(x) for x in row] for row in m]
    r = len(a)
    c = len(a[0]) if r else 0
    u = _identity(r)
    v = _identity(c)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        ra, rs = a[dst], a[src]
        for j in range(c):
            if rs[j]:
                ra[j] += k * rs[j]
        ua, us = u[dst], u[src]
        for j in range(r):
            if us[j]:
                ua[j] += k * us[j]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for row in a:
            if row[src]:
                row[dst] += k * row[src]
        for row in v:
            if row[src]:
                row[dst] += k * row[src]

    t = 0
    while t < min(r, c):
        best = None
        for i in range(t, r):
            row = a[i]
            for j in range(t, c):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            clean = True
            for i in range(t + 1, r):
                while a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        swap_rows(t, i)
                        clean = False
            for j in range(t + 1, c):
                while a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        swap_cols(t, j)
                        clean = False
            if not clean:
                continue
            p = a[t][t]
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    factors = [a[i][i] for i in range(min(r, c))]
    return factors, u, v


def _eliminate_units(n_rows: int, columns: List[Dict[int, int]]):
    """Remove +-1 pivots from a relation matrix without changing its cokernel.

    Rows are generators, columns are relations.  Returns the number of
    surviving generators and the surviving dense relation matrix.
    """
    cols = [dict(c) for c in columns if c]
    rows: Dict[int, set] = {}
    for j, col in enumerate(cols):
        for i in col:
            rows.setdefault(i, set()).add(j)
    alive_rows = set(range(n_rows))
    alive_cols = set(range(len(cols)))
    # Columns holding a unit entry, processed cheapest-first.
    import heapq

    heap = []
    for j in alive_cols:
        col = cols[j]
        if any(abs(x) == 1 for x in col.values()):
            heapq.heappush(heap, (len(col), j))
    while heap:
        _, j = heapq.heappop(heap)
        if j not in alive_cols:
            continue
        col = cols[j]
        units = [i for i, x in col.items() if abs(x) == 1]
        if not units:
            continue
        i = min(units, key=lambda r_: (len(rows[r_]), r_))
        piv = col[i]
        # generator i = -piv * sum_{k != i} col[k] g_k ; substitute in other relations
        others = [k for k in col if k != i]
        for jj in list(rows[i]):
            if jj == j:
                continue
            cc = cols[jj]
            f = cc.pop(i) * piv
            for k in others:
                nv = cc.get(k, 0) - f * col[k]
                if nv:
                    if k not in cc:
                        rows[k].add(jj)
                    cc[k] = nv
                elif k in cc:
                    del cc[k]
                    rows[k].discard(jj)
            if not cc:
                alive_cols.discard(jj)
            elif any(abs(x) == 1 for x in cc.values()):
                heapq.heappush(heap, (len(cc), jj))
        for k in col:
            rows[k].discard(j)
        alive_rows.discard(i)
        alive_cols.discard(j)
        del rows[i]
    keep_rows = sorted(alive_rows)
    pos = {g: n for n, g in enumerate(keep_rows)}
    dense = []
    for j in sorted(alive_cols):
        col = cols[j]
        if not col:
            continue
        vec = [0] * len(keep_rows)
        for i, x in col.items():
            vec[pos[i]] = x
        dense.append(vec)
    # dense is a list of relation vectors; transpose to rows = generators
    mat = [list(x) for x in zip(*dense)] if dense else []
    return len(keep_rows), mat


def presentation_group(n_gens: int, relations: List[Dict[int, int]]) -> AbelianGroup:
    """Cokernel of a relation matrix given as sparse relation vectors over n_gens generators."""
    ngens, mat = _eliminate_units(n_gens, relations)
    if not mat:
        return AbelianGroup(ngens, ())
    factors, _, _ = smith_normal_form(mat)
    return AbelianGroup.from_diagonal(factors, ngens)


def h1(cx) -> AbelianGroup:
    """H1(X; Z) = ker d1 / im d2, computed from a spanning-forest presentation.

    Collapsing a spanning forest of the 1-skeleton leaves one generator per
    remaining edge and one relation per triangle; the cokernel of that
    relation matrix is H1.
    """
    verts = [s[0] for s in cx.simplices(0)]
    edges = [tuple(s) for s in cx.simplices(1)]
    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    gen_index: Dict[Tuple[int, int], int] = {}
    for e in edges:
        ra, rb = find(e[0]), find(e[1])
        if ra != rb:
            parent[ra] = rb
        else:
            gen_index[e] = len(gen_index)
    rels = []
    for a, b, c in (tuple(s) for s in cx.simplices(2)):
        rel: Dict[int, int] = {}
        for e, sgn in (((b, c), 1), ((a, c), -1), ((a, b), 1)):
            g = gen_index.get(e)
            if g is not None:
                rel[g] = rel.get(g, 0) + sgn
        rel = {k: v for k, v in rel.items() if v}
        if rel:
            rels.append(rel)
    return presentation_group(len(gen_index), rels)
