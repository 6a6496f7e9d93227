"""Abstract simplicial 3-complexes stored as integer arrays, with manifold checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np

__all__ = ["SimplicialComplex", "ManifoldReport", "faces_of", "unique_rows"]


def unique_rows(a: np.ndarray, return_inverse: bool = False, return_counts: bool = False):
    """np.unique over rows of a small-width integer array, via a packed key."""
    a = np.ascontiguousarray(a, dtype=np.int64)
    if a.shape[0] == 0:
        empty = np.zeros((0, a.shape[1]), dtype=np.int64)
        out = [empty]
        if return_inverse:
            out.append(np.zeros(0, dtype=np.int64))
        if return_counts:
            out.append(np.zeros(0, dtype=np.int64))
        return out[0] if len(out) == 1 else tuple(out)
    base = int(a.max()) + 1
    key = np.zeros(a.shape[0], dtype=np.int64)
    if base ** a.shape[1] < 2 ** 62:
        for j in range(a.shape[1]):
            key = key * base + a[:, j]
        res = np.unique(key, return_index=True, return_inverse=return_inverse, return_counts=return_counts)
        rows = a[res[1]]
        out = [rows] + list(res[2:])
    else:
        res = np.unique(a, axis=0, return_inverse=return_inverse, return_counts=return_counts)
        out = [res] if not isinstance(res, tuple) else list(res)
    if return_inverse:
        out[1] = np.asarray(out[1]).reshape(-1)
    return out[0] if len(out) == 1 else tuple(out)


def _fits(base: int, width: int) -> bool:
    return base ** width < 2 ** 62


def _face_keys(top: np.ndarray, k: int, base: int) -> np.ndarray:
    """Packed keys of all k-faces of sorted rows, with repetition, built one vertex subset at a time."""
    combos = list(combinations(range(top.shape[1]), k + 1))
    n = len(top)
    keys = np.empty(n * len(combos), dtype=np.int64)
    for j, c in enumerate(combos):
        out = keys[j * n:(j + 1) * n]
        out[:] = top[:, c[0]]
        for col in c[1:]:
            out *= base
            out += top[:, col]
    return keys


def _unpack(keys: np.ndarray, base: int, width: int) -> np.ndarray:
    rows = np.empty((len(keys), width), dtype=np.int64)
    rest = keys.copy()
    for j in range(width - 1, -1, -1):
        rows[:, j] = rest % base
        rest //= base
    return rows


def _sorted_unique(keys: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct values and their multiplicities; sorts ``keys`` in place."""
    keys.sort()
    if len(keys) == 0:
        return keys, np.zeros(0, dtype=np.int64)
    start = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    counts = np.diff(np.r_[start, len(keys)])
    return keys[start], counts


def _split_unique(top: np.ndarray, k: int, base: int) -> Tuple[np.ndarray, np.ndarray]:
    """Like packing whole rows, but keyed on (all columns but the last, last column)."""
    combos = list(combinations(range(top.shape[1]), k + 1))
    n = len(top)
    hi = np.empty(n * len(combos), dtype=np.int64)
    lo = np.empty(n * len(combos), dtype=np.int64)
    for j, c in enumerate(combos):
        out = hi[j * n:(j + 1) * n]
        out[:] = top[:, c[0]]
        for col in c[1:-1]:
            out *= base
            out += top[:, col]
        lo[j * n:(j + 1) * n] = top[:, c[-1]]
    order = np.lexsort((lo, hi))
    hi, lo = hi[order], lo[order]
    del order
    start = np.flatnonzero(np.r_[True, (hi[1:] != hi[:-1]) | (lo[1:] != lo[:-1])])
    counts = np.diff(np.r_[start, len(hi)])
    rows = np.empty((len(start), k + 1), dtype=np.int64)
    rows[:, :k] = _unpack(hi[start], base, k)
    rows[:, k] = lo[start]
    return rows, counts


def faces_of(simplices: np.ndarray, k: int) -> np.ndarray:
    """All k-dimensional faces (with repetition) of sorted simplices, as sorted rows."""
    d = simplices.shape[1]
    parts = [simplices[:, list(c)] for c in combinations(range(d), k + 1)]
    return np.concatenate(parts, axis=0) if parts else np.zeros((0, k + 1), dtype=np.int64)


@dataclass
class ManifoldReport:
    ok: bool
    n_vertices: int
    n_edges: int
    n_triangles: int
    n_tets: int
    euler: int
    bad_triangles: int
    bad_vertex_links: int
    boundary_components: List[dict] = field(default_factory=list)
    messages: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return dict(self.__dict__)


class SimplicialComplex:
    """Pure simplicial complex given by its top simplices (rows of vertex ids).

    Rows are kept sorted; lower-dimensional simplices are derived on demand
    and cached.
    """

    def __init__(self, top: np.ndarray, n_vertices: Optional[int] = None):
        top = np.sort(np.asarray(top, dtype=np.int64).reshape(len(top), -1), axis=1)
        self.top = top
        self.dim = top.shape[1] - 1
        self.n_vertices = int(n_vertices if n_vertices is not None else (top.max() + 1 if len(top) else 0))
        self._cache: Dict[int, np.ndarray] = {}

    def simplex_array(self, k: int) -> np.ndarray:
        if k == self.dim:
            return self.top
        if k not in self._cache:
            if k == 0:
                used = np.unique(self.top.reshape(-1))
                self._cache[0] = used.reshape(-1, 1)
            else:
                self._cache[k] = self._faces(k)[0]
        return self._cache[k]

    def _faces(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """Distinct k-faces and the number of top simplices containing each."""
        base = max(self.n_vertices, 1)
        if _fits(base, k + 1):
            keys, counts = _sorted_unique(_face_keys(self.top, k, base))
            return _unpack(keys, base, k + 1), counts
        if _fits(base, k):
            return _split_unique(self.top, k, base)
        return unique_rows(faces_of(self.top, k), return_counts=True)

    def simplices(self, k: int) -> List[Tuple[int, ...]]:
        if k > self.dim:
            return []
        return [tuple(int(x) for x in row) for row in self.simplex_array(k)]

    def f_vector(self) -> List[int]:
        return [len(self.simplex_array(k)) for k in range(self.dim + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def is_simplicial(self) -> bool:
        """No repeated vertex within a simplex and no repeated top simplex."""
        if len(self.top) == 0:
            return True
        if np.any(self.top[:, 1:] == self.top[:, :-1]):
            return False
        order = np.lexsort(self.top.T[::-1])
        srt = self.top[order]
        return not np.any(np.all(srt[1:] == srt[:-1], axis=1))

    # -- codimension-one structure -------------------------------------------------

    def facet_degrees(self) -> Tuple[np.ndarray, np.ndarray]:
        """Unique codimension-one faces and the number of top simplices containing each."""
        return self._faces(self.dim - 1)

    def boundary_facets(self) -> np.ndarray:
        facets, counts = self.facet_degrees()
        return facets[counts == 1]

    def boundary_components(self) -> List[dict]:
        """Connected components of the boundary surface of a 3-complex, with chi and orientability."""
        if self.dim != 3:
            raise ValueError("boundary surfaces are computed for 3-complexes")
        tris = self.boundary_facets()
        return surface_components(tris)

    def manifold_report(self) -> ManifoldReport:
        if self.dim != 3:
            raise ValueError("manifold checks apply to 3-complexes")
        msgs = []
        tets = self.top
        tris, tri_counts = self.facet_degrees()
        self._cache[2] = tris
        bad_tri = int(np.sum(tri_counts > 2))
        if bad_tri:
            msgs.append(f"{bad_tri} triangles lie in more than two tetrahedra")
        edges = self.simplex_array(1)
        nv = self.n_vertices
        # chi(link v) = #edges at v - #triangles at v + #tets at v
        e_deg = np.bincount(edges.reshape(-1), minlength=nv)
        t_deg = np.bincount(tris.reshape(-1), minlength=nv)
        k_deg = np.bincount(tets.reshape(-1), minlength=nv)
        chi_link = e_deg - t_deg + k_deg
        bnd = tris[tri_counts == 1]
        on_bnd = np.zeros(nv, dtype=bool)
        on_bnd[bnd.reshape(-1)] = True
        used = k_deg > 0
        expect = np.where(on_bnd, 1, 2)
        bad_v = int(np.sum(used & (chi_link != expect)))
        if bad_v:
            msgs.append(f"{bad_v} vertex links have the wrong Euler characteristic")
        if not self.is_simplicial():
            msgs.append("repeated vertices or repeated tetrahedra")
        comps = surface_components(bnd)
        for c in comps:
            if not c["closed"]:
                msgs.append("boundary surface is not closed")
        fv = [int(used.sum()), len(edges), len(tris), len(tets)]
        chi = fv[0] - fv[1] + fv[2] - fv[3]
        return ManifoldReport(
            ok=not msgs,
            n_vertices=fv[0],
            n_edges=fv[1],
            n_triangles=fv[2],
            n_tets=fv[3],
            euler=chi,
            bad_triangles=bad_tri,
            bad_vertex_links=bad_v,
            boundary_components=comps,
            messages=msgs,
        )


def surface_components(tris: np.ndarray) -> List[dict]:
    """Split a triangle set into edge-connected components and classify each.

    Orientability uses the orientation double cover: a component is
    orientable exactly when its two sheets stay disconnected.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    tris = np.sort(np.asarray(tris, dtype=np.int64).reshape(-1, 3), axis=1)
    n = len(tris)
    if n == 0:
        return []
    edge_rows = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [0, 2]]])
    owner = np.tile(np.arange(n), 3)
    # +1 when the edge runs low-to-high along the boundary of (a, b, c)
    sense = np.repeat(np.array([1, 1, -1]), n)
    _, inv, counts = unique_rows(edge_rows, return_inverse=True, return_counts=True)
    order = np.argsort(inv, kind="stable")
    inv_s, own_s, sen_s = inv[order], owner[order], sense[order]
    pair = np.flatnonzero(inv_s[1:] == inv_s[:-1])
    ti, tj = own_s[pair], own_s[pair + 1]
    n_comp, label = connected_components(
        coo_matrix((np.ones(len(pair)), (ti, tj)), shape=(n, n)), directed=False
    )
    # same sense along a shared edge forces opposite orientations
    flip = sen_s[pair] == sen_s[pair + 1]
    src = np.concatenate([ti, ti + n])
    dst = np.concatenate([np.where(flip, tj + n, tj), np.where(flip, tj, tj + n)])
    _, sheet = connected_components(
        coo_matrix((np.ones(len(src)), (src, dst)), shape=(2 * n, 2 * n)), directed=False
    )
    twisted = np.zeros(n_comp, dtype=bool)
    np.logical_or.at(twisted, label, sheet[:n] == sheet[n:])
    edge_comp = label[owner]
    first = np.r_[True, inv_s[1:] != inv_s[:-1]]
    uniq_edge_comp = edge_comp[order][first]
    edge_count = counts[inv_s[first]]
    n_edges = np.bincount(uniq_edge_comp, minlength=n_comp)
    n_open = np.bincount(uniq_edge_comp, weights=edge_count != 2, minlength=n_comp)
    n_tris = np.bincount(label, minlength=n_comp)
    vert_comp = unique_rows(np.stack([np.repeat(label, 3), tris.reshape(-1)], axis=1))
    n_verts = np.bincount(vert_comp[:, 0], minlength=n_comp)
    out = []
    for c in range(n_comp):
        chi = int(n_verts[c] - n_edges[c] + n_tris[c])
        closed = bool(n_open[c] == 0)
        orientable = bool(not twisted[c]) if closed else None
        genus = (2 - chi) // 2 if closed and orientable else None
        out.append(
            {
                "triangles": int(n_tris[c]),
                "vertices": int(n_verts[c]),
                "euler": chi,
                "closed": closed,
                "orientable": orientable,
                "genus": genus,
                "is_torus": bool(closed and orientable and chi == 0),
            }
        )
    return out
