"""Triangulations of link exteriors and of surgered 3-manifolds.

Pipeline: preprocess the diagram (connected, no monogons) -> triangulate S^3
with the link in the 1-skeleton -> drill a regular neighbourhood of the link
-> on each filled boundary torus realize the filling slope as a simple edge
path and glue in a solid torus whose meridian is that path.

Orientation conventions: the diagram plane is seen from the cone vertex N,
ports run counterclockwise, faces lie to the left of their darts.  The
meridian of a component turns right-handedly about its direction of travel,
the blackboard framing runs parallel to the component on its left.
"""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .complex import ManifoldReport, SimplicialComplex, unique_rows
from .homology import AbelianGroup, h1
from .linkdiag import DiagramError, LinkDiagram, _Map, _through, _turn, validate, writhe
from .slope import Slope

__all__ = [
    "Triangulation",
    "BoundaryTorus",
    "BoundaryCurve",
    "RefinedTorus",
    "TriangulationError",
    "preprocess",
    "triangulate_sphere_with_link",
    "drill",
    "longitude_curve",
    "realize_slope",
    "fill",
    "triangulate_surgered",
    "torus_cocycles",
    "curve_class",
    "VERTEX_KINDS",
]


class TriangulationError(RuntimeError):
    pass


# vertex provenance: kind code -> name; tags hold two integers per vertex
VERTEX_KINDS = (
    "port",         # (crossing, port) corner of a crossing quadrilateral
    "midpoint",     # (tail port of the arc, -)
    "face",         # (face index, -)
    "ball",         # (0 = N / 1 = S, -)
    "side",         # (crossing, i) midpoint of the quad side between ports i and i+1
    "tube",         # (link vertex, neighbour) truncation point on the edge between them
    "cut",          # (torus, local id) point where a slope curve crosses a torus edge
    "collar",       # (torus, local id) inner copy of a refined torus vertex
    "disk",         # (torus, 0) centre of the meridian disk
    "apex",         # (torus, 1 | 2) cone points of the solid torus
)
PORT, MIDPOINT, FACE, BALL, SIDE, TUBE, CUT, COLLAR, DISK, APEX = range(len(VERTEX_KINDS))


def _pack(a: np.ndarray, b: np.ndarray, base: int) -> np.ndarray:
    return a.astype(np.int64) * base + b.astype(np.int64)


# -----------------------------------------------------------------------------------
# data types
# -----------------------------------------------------------------------------------


@dataclass
class BoundaryTorus:
    """One boundary torus of a drilled complex.

    ``meridian`` and ``framing`` are oriented vertex cycles in the torus
    1-skeleton; ``writhe`` is the component's writhe in the preprocessed
    diagram, so the Seifert longitude is framing - writhe * meridian.
    """

    component: int
    label: str
    coefficient: Slope
    triangles: np.ndarray
    meridian: List[int]
    framing: List[int]
    writhe: int
    filled: bool = False

    def edges(self) -> np.ndarray:
        t = self.triangles
        return unique_rows(np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [0, 2]]]), axis=1))

    def summary(self) -> dict:
        e = len(self.edges())
        v = len(np.unique(self.triangles))
        return {
            "label": self.label,
            "coefficient": str(self.coefficient),
            "triangles": int(len(self.triangles)),
            "euler": int(v - e + len(self.triangles)),
            "meridian_length": len(self.meridian),
            "framing_length": len(self.framing),
            "writhe": self.writhe,
            "filled": self.filled,
        }


@dataclass
class RefinedTorus:
    """A subdivision of a boundary torus cut along level curves.

    Local vertex ids 0..n-1.  ``corner[i]`` is the global id of a torus
    vertex or -1 for a new cut point; ``edge_points`` lists, for every torus
    edge (u, v) with u < v, the local ids met walking from u to v, ends
    included.  ``band`` gives for each triangle the parity of the strip it
    lies in (0: between the curve and its parallel copy going up, 1: the other
    annulus).
    """

    triangles: np.ndarray
    corner: np.ndarray
    parent: np.ndarray
    edge_points: Dict[Tuple[int, int], List[int]]
    band: np.ndarray


@dataclass
class BoundaryCurve:
    """Simple closed edge path on a boundary torus (or on a refinement of it)."""

    vertices: List[int]
    role: str
    torus: int
    klass: Tuple[int, int]
    surface: Optional[RefinedTorus] = None
    parallel: Optional[List[int]] = None

    def __len__(self):
        return len(self.vertices)

    def is_simple(self) -> bool:
        return len(set(self.vertices)) == len(self.vertices)


class Triangulation:
    """Simplicial 3-complex with vertex provenance and marked boundary tori.

    Tetrahedra are sorted rows of vertex ids.  The object is treated as
    immutable once built; operations return new triangulations.
    """

    def __init__(self, tets, kinds, tags, tori=(), link_cycles=None, stats=None):
        self.tets = np.sort(np.asarray(tets, dtype=np.int64).reshape(-1, 4), axis=1)
        self.kinds = np.asarray(kinds, dtype=np.int8)
        self.tags = np.asarray(tags, dtype=np.int64).reshape(-1, 2)
        self.tori: List[BoundaryTorus] = list(tori)
        self.link_cycles: Dict[int, List[int]] = dict(link_cycles or {})
        self.stats: dict = dict(stats or {})
        self._cx: Optional[SimplicialComplex] = None

    @property
    def n_vertices(self) -> int:
        return len(self.kinds)

    @property
    def n_tets(self) -> int:
        return len(self.tets)

    def complex(self) -> SimplicialComplex:
        if self._cx is None:
            self._cx = SimplicialComplex(self.tets, self.n_vertices)
        return self._cx

    def manifold_report(self) -> ManifoldReport:
        return self.complex().manifold_report()

    def h1(self) -> AbelianGroup:
        return h1(self.complex())

    def open_tori(self) -> List[BoundaryTorus]:
        return [t for t in self.tori if not t.filled]

    def vertex_label(self, v: int) -> Tuple[str, int, int]:
        return VERTEX_KINDS[int(self.kinds[v])], int(self.tags[v, 0]), int(self.tags[v, 1])

    def used_vertices(self) -> np.ndarray:
        return np.unique(self.tets)

    def summary(self) -> dict:
        fv = self.complex().f_vector()
        out = {
            "vertices": int(len(self.used_vertices())),
            "edges": fv[1],
            "triangles": fv[2],
            "tetrahedra": fv[3],
            "euler": int(len(self.used_vertices()) - fv[1] + fv[2] - fv[3]),
            "boundary_tori": len(self.open_tori()),
        }
        out.update({k: v for k, v in self.stats.items() if k not in out})
        return out

    # -- export ---------------------------------------------------------------------

    def to_json(self) -> dict:
        used = self.used_vertices()
        new = np.full(self.n_vertices, -1, dtype=np.int64)
        new[used] = np.arange(len(used))
        tets = np.sort(new[self.tets], axis=1)
        return {
            "vertices": [
                {"id": int(i), "kind": VERTEX_KINDS[int(self.kinds[v])], "tag": [int(x) for x in self.tags[v]]}
                for i, v in enumerate(used)
            ],
            "tetrahedra": tets.tolist(),
            "boundary_tori": [
                dict(t.summary(), meridian=[int(new[v]) for v in t.meridian], framing=[int(new[v]) for v in t.framing])
                for t in self.open_tori()
            ],
            # wall times are left out so that exports are reproducible byte for byte
            "stats": {k: v for k, v in self.stats.items() if not k.startswith("seconds")},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def gluing_table(self) -> str:
        """Face-gluing table, one line per tetrahedron.

        Tetrahedron t has vertices v0 < v1 < v2 < v3 (its sorted row) and face
        i is the face opposite vi.  Line format::

            t | n0,p0 n1,p1 n2,p2 n3,p3

        where ni is the tetrahedron glued to face i (-1 on the boundary) and
        pi is a four-digit string whose k-th digit is the position in ni of
        the vertex vk; digit i is the vertex of ni opposite the shared face.
        Boundary faces print as ``-1,----``.
        """
        buf = io.StringIO()
        self.write_gluing_table(buf)
        return buf.getvalue()

    def write_gluing_table(self, fh, chunk: int = 200000):
        nbr, perm = gluing_arrays(self.tets)
        codes = ((perm[..., 0] * 4 + perm[..., 1]) * 4 + perm[..., 2]) * 4 + perm[..., 3]
        names = ["".join(str((c >> s) & 3) for s in (6, 4, 2, 0)) for c in range(256)]
        for lo in range(0, len(nbr), chunk):
            rows = []
            for t, nb, cd in zip(range(lo, lo + chunk), nbr[lo:lo + chunk].tolist(), codes[lo:lo + chunk].tolist()):
                faces = " ".join("-1,----" if n < 0 else f"{n},{names[c]}" for n, c in zip(nb, cd))
                rows.append(f"{t} | {faces}\n")
            fh.write("".join(rows))


def gluing_arrays(tets: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Neighbour index and vertex permutation for each face of each tetrahedron."""
    tets = np.sort(np.asarray(tets, dtype=np.int64), axis=1)
    m = len(tets)
    opp = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]
    faces = np.concatenate([tets[:, o] for o in opp])  # face i of tet t at row i*m + t
    owner = np.tile(np.arange(m), 4)
    which = np.repeat(np.arange(4), m)
    _, inv = unique_rows(faces, return_inverse=True)
    order = np.argsort(inv, kind="stable")
    inv_s = inv[order]
    nbr = np.full((m, 4), -1, dtype=np.int64)
    perm = np.zeros((m, 4, 4), dtype=np.int8)
    pair = np.nonzero(inv_s[1:] == inv_s[:-1])[0]
    r1, r2 = order[pair], order[pair + 1]
    for a, b in ((r1, r2), (r2, r1)):
        ta, ia = owner[a], which[a]
        tb, ib = owner[b], which[b]
        nbr[ta, ia] = tb
        va, vb = tets[ta], tets[tb]
        # position in tb of each vertex of ta; the opposite vertex maps to ib
        eq = va[:, :, None] == vb[:, None, :]
        pos = np.where(eq.any(axis=2), eq.argmax(axis=2), -1)
        pos[np.arange(len(ta)), ia] = ib
        perm[ta, ia] = pos
    return nbr, perm


# -----------------------------------------------------------------------------------
# preprocessing
# -----------------------------------------------------------------------------------


def preprocess(diagram: LinkDiagram) -> LinkDiagram:
    """Connected, monogon-free diagram of the same framed link, using R2 moves only.

    Separate pieces and crossing-free loops are joined to the first piece by
    one R2 each; a lone crossing-free loop is folded over itself.  Each
    monogon then gets an R2 that pushes a neighbouring edge into it.
    """
    rep = validate(diagram)
    if not rep.valid:
        raise DiagramError("; ".join(rep.messages))
    m = _Map.of(diagram)
    free = sorted(m.free)
    if m.n() == 0:
        if not free:
            return diagram
        first = free.pop(0)
        if free:
            m.r2_plus(0, 0, True, free_a=first, free_b=free.pop(0))
        else:
            m.r2_plus(0, 0, True, free_a=first, free_b=first)
    # join the remaining pieces to the piece of crossing 0
    label = m.pieces()
    reps = sorted({r for r in label.values() if r != label.get(0, 0)})
    for r in reps:
        m.r2_plus(0, 4 * r, True)
    for c in free:
        m.r2_plus(0, 0, True, free_b=c)
    # monogons; one R2 can spoil a neighbouring monogon, so sweep until none are left
    guard = 0
    while True:
        monos = [f[0] for f in m.all_faces() if len(f) == 1]
        if not monos:
            break
        for mono in monos:
            if _turn(m.nbr[mono]) != mono:
                continue
            db = m.nbr[mono]
            outer = m.face_of(db)
            da = next(d for d in outer if d != db and d != mono)
            m.r2_plus(da, db, True)
            guard += 1
        if guard > 4 * diagram.n_crossings + 16:
            raise DiagramError("monogon removal does not terminate")
    return m.freeze()


# -----------------------------------------------------------------------------------
# S^3 with the link in its 1-skeleton
# -----------------------------------------------------------------------------------


@dataclass
class _SphereData:
    """Indices needed downstream: face of each dart and vertex id helpers."""

    n: int
    face_of_dart: np.ndarray
    midpoint_of_port: np.ndarray
    face_base: int
    north: int
    south: int
    side_base: int


def triangulate_sphere_with_link(diagram: LinkDiagram) -> Triangulation:
    """Triangulation of S^3 containing the link as a subcomplex of the 1-skeleton.

    Vertices: four corners per crossing, one midpoint per arc, one cone point
    per face of the diagram and two ball cones N (above) and S (below).  Every
    crossing contributes one tetrahedron spanned by its four corners, with
    the over strand on the upper pair of faces.
    """
    t0 = time.perf_counter()
    if diagram.free or diagram.n_crossings == 0:
        raise TriangulationError("diagram must be preprocessed: a component has no crossings")
    n = diagram.n_crossings
    nbr = np.asarray(diagram.nbr, dtype=np.int64)
    m = _Map.of(diagram)
    fs = m.all_faces()
    face_of = np.empty(4 * n, dtype=np.int64)
    for k, f in enumerate(fs):
        if len(f) < 2:
            raise TriangulationError("face of size < 2 (monogon); run preprocess first")
        face_of[f] = k
    nf = len(fs)
    ports = np.arange(4 * n)
    tail = np.minimum(ports, nbr)
    _, mid_index = np.unique(tail, return_inverse=True)
    mid = 4 * n + mid_index
    face_base = 4 * n + 2 * n
    north = face_base + nf
    south = north + 1
    nv = south + 1
    z = face_base + face_of
    turn_nbr = (nbr & ~3) | ((nbr - 1) & 3)
    # three triangles per dart in the cone over its face: (a, b) runs counterclockwise
    tri_a = np.concatenate([ports, mid, nbr])
    tri_b = np.concatenate([mid, nbr, turn_nbr])
    tri_z = np.concatenate([z, z, z])
    k = len(tri_a)
    cone_n = np.stack([tri_a, tri_b, tri_z, np.full(k, north)], axis=1)
    cone_s = np.stack([tri_a, tri_b, tri_z, np.full(k, south)], axis=1)
    x4 = 4 * np.arange(n)
    over = np.asarray(diagram.over, dtype=np.int64)
    q = [x4 + ((over + i) & 3) for i in range(4)]  # q[0], q[2] carry the over strand
    crossing = np.stack([x4, x4 + 1, x4 + 2, x4 + 3], axis=1)
    caps = np.concatenate(
        [
            np.stack([q[0], q[2], q[1], np.full(n, north)], axis=1),
            np.stack([q[0], q[2], q[3], np.full(n, north)], axis=1),
            np.stack([q[1], q[3], q[0], np.full(n, south)], axis=1),
            np.stack([q[1], q[3], q[2], np.full(n, south)], axis=1),
        ]
    )
    tets = np.concatenate([crossing, cone_n, cone_s, caps])
    kinds = np.empty(nv, dtype=np.int8)
    tags = np.zeros((nv, 2), dtype=np.int64)
    kinds[: 4 * n] = PORT
    tags[: 4 * n, 0] = ports >> 2
    tags[: 4 * n, 1] = ports & 3
    kinds[4 * n: face_base] = MIDPOINT
    tags[4 * n: face_base, 0] = np.unique(tail)
    kinds[face_base:north] = FACE
    tags[face_base:north, 0] = np.arange(nf)
    kinds[north:] = BALL
    tags[north:, 0] = [0, 1]
    cycles = {}
    for c in range(diagram.n_components):
        cyc = []
        for p in diagram.component_cycle(c):
            cyc.extend([p, int(mid[p]), int(nbr[p])])
        cycles[c] = cyc
    tri = Triangulation(tets, kinds, tags, link_cycles=cycles)
    tri.stats.update(
        crossings=n,
        faces=nf,
        crossing_tetrahedra=n,
        sphere_tetrahedra=int(len(tets)),
        seconds_sphere=round(time.perf_counter() - t0, 4),
    )
    tri._sphere = _SphereData(n, face_of, mid, face_base, north, south, nv)
    tri._diagram = diagram
    return tri


# -----------------------------------------------------------------------------------
# drilling
# -----------------------------------------------------------------------------------

_PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def _stellar_edges(tets: np.ndarray, edge_keys: np.ndarray, edge_vertex: np.ndarray, base: int) -> np.ndarray:
    """Stellar subdivision of the given edges, in increasing order of edge_vertex.

    Every tetrahedron splits its lowest remaining marked edge in each round,
    so two tetrahedra sharing a face subdivide it identically.
    """
    order = np.argsort(edge_keys)
    edge_keys, edge_vertex = edge_keys[order], edge_vertex[order]
    done = []
    cur = tets
    while len(cur):
        best = np.full(len(cur), np.iinfo(np.int64).max)
        where = np.full(len(cur), -1)
        for k, (i, j) in enumerate(_PAIRS):
            key = _pack(cur[:, i], cur[:, j], base)
            pos = np.searchsorted(edge_keys, key)
            pos = np.minimum(pos, len(edge_keys) - 1)
            hit = edge_keys[pos] == key
            val = np.where(hit, edge_vertex[pos], np.iinfo(np.int64).max)
            better = val < best
            best = np.where(better, val, best)
            where = np.where(better, k, where)
        split = where >= 0
        done.append(cur[~split])
        rows = cur[split]
        if not len(rows):
            break
        w = where[split]
        s = best[split]
        ii = np.array([p[0] for p in _PAIRS])[w]
        jj = np.array([p[1] for p in _PAIRS])[w]
        r = np.arange(len(rows))
        one = rows.copy()
        one[r, ii] = s
        two = rows.copy()
        two[r, jj] = s
        cur = np.sort(np.concatenate([one, two]), axis=1)
    return np.concatenate(done) if done else tets[:0]


def _framing_pairs(diagram: LinkDiagram, sd: _SphereData, c: int) -> List[Tuple[int, int]]:
    """(link vertex, neighbour) pairs of the left blackboard push-off of component c.

    Along an arc the push-off runs through the cone point of the face on the
    left; across a crossing it runs through the side vertices next to the
    left-hand port, in the order fixed by the stellar subdivision.
    """
    pairs = []
    nbr = diagram.nbr
    for p in diagram.component_cycle(c):
        zf = sd.face_base + int(sd.face_of_dart[p])
        a = nbr[p]
        y, j = a >> 2, a & 3
        ex = _through(a)
        left = (j + 3) & 3
        s_left = sd.side_base + 4 * y + left
        s_next = sd.side_base + 4 * y + ((j + 2) & 3)
        pairs += [(p, zf), (int(sd.midpoint_of_port[p]), zf), (a, zf)]
        if left == 0:
            pairs += [(a, s_left), (ex, s_left), (ex, s_next)]
        else:
            pairs += [(a, s_left), (a, s_next), (ex, s_next)]
    return pairs


def _meridian_pairs(diagram: LinkDiagram, sd: _SphereData, c: int) -> List[Tuple[int, int]]:
    """Right-handed meridian around the first arc of component c: left, N, right, S."""
    p = diagram.component_cycle(c)[0]
    zl = sd.face_base + int(sd.face_of_dart[p])
    zr = sd.face_base + int(sd.face_of_dart[diagram.nbr[p]])
    return [(p, zl), (p, sd.north), (p, zr), (p, sd.south)]


def drill(tri: Triangulation) -> Triangulation:
    """Remove an open regular neighbourhood of the link from a sphere triangulation.

    The quadrilateral sides are stellar-subdivided so that the link becomes
    a full subcomplex; the neighbourhood is then the region where the
    simplicial distance function to the link is below 1/2.  Each truncated
    tetrahedron is a prism, cut into three tetrahedra by coning from its
    lowest vertex, with quadrilateral faces split along the diagonal from
    their lowest vertex so that neighbours agree.
    """
    t0 = time.perf_counter()
    sd: _SphereData = tri._sphere
    diagram: LinkDiagram = tri._diagram
    n = sd.n
    # stellar subdivision of the 4n quadrilateral sides
    x4 = np.repeat(4 * np.arange(n), 4)
    i = np.tile(np.arange(4), n)
    a, b = x4 + i, x4 + ((i + 1) & 3)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    side_ids = sd.side_base + np.arange(4 * n)
    nv1 = sd.side_base + 4 * n
    tets = _stellar_edges(tri.tets, _pack(lo, hi, nv1), side_ids, nv1)
    kinds = np.concatenate([tri.kinds, np.full(4 * n, SIDE, dtype=np.int8)])
    tags = np.concatenate([tri.tags, np.stack([x4 >> 2, i], axis=1)])
    # link vertices and edges
    is_k = np.zeros(nv1, dtype=bool)
    comp_k = np.full(nv1, -1, dtype=np.int64)
    kedges = []
    for c, cyc in tri.link_cycles.items():
        cyc = np.asarray(cyc, dtype=np.int64)
        is_k[cyc] = True
        comp_k[cyc] = c
        nxt = np.roll(cyc, -1)
        kedges.append(_pack(np.minimum(cyc, nxt), np.maximum(cyc, nxt), nv1))
    kedges = np.unique(np.concatenate(kedges))
    km = is_k[tets]
    kc = km.sum(axis=1)
    if np.any(kc > 2):
        raise TriangulationError("link is not a full subcomplex (tetrahedron with three link vertices)")
    two = tets[kc == 2]
    uv = two[km[kc == 2]].reshape(-1, 2)
    if len(uv) and not np.all(np.isin(_pack(uv[:, 0], uv[:, 1], nv1), kedges)):
        raise TriangulationError("link is not a full subcomplex (two link vertices not joined by a link edge)")
    one = tets[kc == 1]
    v1 = one[km[kc == 1]]
    oth1 = one[~km[kc == 1]].reshape(-1, 3)
    oth2 = two[~km[kc == 2]].reshape(-1, 2)
    # truncation points, numbered by (link vertex, neighbour)
    keys = np.unique(
        np.concatenate(
            [
                _pack(np.repeat(v1, 3), oth1.reshape(-1), nv1),
                _pack(np.repeat(uv[:, 0], 2), oth2.reshape(-1), nv1),
                _pack(np.repeat(uv[:, 1], 2), oth2.reshape(-1), nv1),
            ]
        )
    )
    base = nv1

    def tube(v, x):
        return base + np.searchsorted(keys, _pack(v, x, nv1))

    pa, pb, pc = oth1[:, 0], oth1[:, 1], oth1[:, 2]
    ma, mb, mc = tube(v1, pa), tube(v1, pb), tube(v1, pc)
    u, v = uv[:, 0], uv[:, 1]
    qa, qb = oth2[:, 0], oth2[:, 1]
    mua, mub, mva, mvb = tube(u, qa), tube(u, qb), tube(v, qa), tube(v, qb)
    new_tets = np.concatenate(
        [
            tets[kc == 0],
            np.stack([pa, ma, mb, mc], axis=1),
            np.stack([pa, pb, pc, mc], axis=1),
            np.stack([pa, pb, mc, mb], axis=1),
            np.stack([qa, qb, mub, mvb], axis=1),
            np.stack([qa, mua, mub, mvb], axis=1),
            np.stack([qa, mua, mvb, mva], axis=1),
        ]
    )
    bnd = np.concatenate([np.stack([ma, mb, mc], 1), np.stack([mua, mub, mvb], 1), np.stack([mua, mvb, mva], 1)])
    bnd_comp = np.concatenate([comp_k[v1], comp_k[u], comp_k[u]])
    kinds = np.concatenate([kinds, np.full(len(keys), TUBE, dtype=np.int8)])
    tags = np.concatenate([tags, np.stack([keys // nv1, keys % nv1], axis=1)])
    sd_full = _SphereData(sd.n, sd.face_of_dart, sd.midpoint_of_port, sd.face_base, sd.north, sd.south, sd.side_base)
    tori = []
    for c in sorted(tri.link_cycles):
        tris = np.sort(bnd[bnd_comp == c], axis=1)
        fr = _framing_pairs(diagram, sd_full, c)
        me = _meridian_pairs(diagram, sd_full, c)
        frv = [int(x) for x in tube(np.array([p[0] for p in fr]), np.array([p[1] for p in fr]))]
        mev = [int(x) for x in tube(np.array([p[0] for p in me]), np.array([p[1] for p in me]))]
        comp = diagram.components[c]
        tor = BoundaryTorus(c, comp.label, comp.coefficient, tris, mev, frv, writhe(diagram, c))
        _check_cycle(tor, tor.meridian, "meridian")
        _check_cycle(tor, tor.framing, "framing")
        tori.append(tor)
    out = Triangulation(new_tets, kinds, tags, tori=tori, stats=dict(tri.stats))
    out.stats.update(
        drilled_tetrahedra=int(len(new_tets)),
        subdivided_tetrahedra=int(len(tets)),
        seconds_drill=round(time.perf_counter() - t0, 4),
    )
    return out


def _check_cycle(tor: BoundaryTorus, cyc: Sequence[int], what: str):
    if len(set(cyc)) != len(cyc):
        raise TriangulationError(f"{what} of {tor.label} is not simple")
    e = tor.edges()
    nvx = int(e.max()) + 1
    ek = np.sort(_pack(e[:, 0], e[:, 1], nvx))
    a = np.asarray(cyc, dtype=np.int64)
    b = np.roll(a, -1)
    key = _pack(np.minimum(a, b), np.maximum(a, b), nvx)
    pos = np.minimum(np.searchsorted(ek, key), len(ek) - 1)
    if not np.all(ek[pos] == key):
        raise TriangulationError(f"{what} of {tor.label} is not an edge path on its boundary torus")


# -----------------------------------------------------------------------------------
# curves on a triangulated torus
# -----------------------------------------------------------------------------------


class _Surface:
    """Edge bookkeeping for a closed triangulated surface given by vertex triples."""

    def __init__(self, triangles: np.ndarray):
        t = np.sort(np.asarray(triangles, dtype=np.int64), axis=1)
        self.tris = t
        self.verts, local = np.unique(t, return_inverse=True)
        local = local.reshape(t.shape)
        self.local = local
        e = np.concatenate([local[:, [0, 1]], local[:, [1, 2]], local[:, [0, 2]]])
        self.edges, inv = unique_rows(e, return_inverse=True)
        m = len(t)
        # edge indices of (ab, bc, ac) per triangle; boundary is ab + bc - ac
        self.tri_edges = inv.reshape(3, m).T
        self.nv = len(self.verts)
        self.ne = len(self.edges)
        self._key = _pack(self.edges[:, 0], self.edges[:, 1], self.nv)

    def lid(self, v) -> np.ndarray:
        return np.searchsorted(self.verts, np.asarray(v, dtype=np.int64))

    def edge_index(self, a, b) -> Tuple[np.ndarray, np.ndarray]:
        """Edge indices and orientation signs (+1 when a < b) for local vertex pairs."""
        a, b = np.asarray(a), np.asarray(b)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        key = _pack(lo, hi, self.nv)
        pos = np.searchsorted(self._key, key)
        pos = np.minimum(pos, self.ne - 1)
        if not np.all(self._key[pos] == key):
            raise TriangulationError("path uses a non-edge of the surface")
        return pos, np.where(a < b, 1, -1)

    def evaluate(self, cochain: np.ndarray, cycle_local: Sequence[int]) -> int:
        a = np.asarray(cycle_local)
        b = np.roll(a, -1)
        idx, sgn = self.edge_index(a, b)
        return int(np.sum(cochain[idx] * sgn))

    def basis_cocycles(self) -> List[np.ndarray]:
        """Integral 1-cocycles dual to the two generator edges of a tree-cotree split."""
        nv, ne = self.nv, self.ne
        adj: List[List[Tuple[int, int]]] = [[] for _ in range(nv)]
        for k, (a, b) in enumerate(self.edges.tolist()):
            adj[a].append((b, k))
            adj[b].append((a, k))
        in_tree = np.zeros(ne, dtype=bool)
        seen = np.zeros(nv, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            x = stack.pop()
            for y, k in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    in_tree[k] = True
                    stack.append(y)
        edge_tris: List[List[int]] = [[] for _ in range(ne)]
        for t, row in enumerate(self.tri_edges.tolist()):
            for k in row:
                edge_tris[k].append(t)
        m = len(self.tris)
        parent_edge = np.full(m, -1)
        order = [0]
        tseen = np.zeros(m, dtype=bool)
        tseen[0] = True
        in_cotree = np.zeros(ne, dtype=bool)
        head = 0
        while head < len(order):
            t = order[head]
            head += 1
            for k in self.tri_edges[t]:
                if in_tree[k]:
                    continue
                for s in edge_tris[k]:
                    if not tseen[s]:
                        tseen[s] = True
                        parent_edge[s] = k
                        in_cotree[k] = True
                        order.append(s)
        gens = np.nonzero(~in_tree & ~in_cotree)[0]
        if len(gens) != 2 or not tseen.all():
            raise TriangulationError(f"surface is not a torus ({len(gens)} generators)")
        out = []
        signs = np.array([1, 1, -1])
        for g in gens:
            f = np.zeros(ne, dtype=np.int64)
            f[g] = 1
            for t in reversed(order[1:]):
                k = parent_edge[t]
                row = self.tri_edges[t]
                j = int(np.nonzero(row == k)[0][0])
                rest = sum(int(f[row[i]]) * signs[i] for i in range(3) if i != j)
                f[k] = -rest * signs[j]
            out.append(f)
        return out


def torus_cocycles(triangles: np.ndarray, meridian: Sequence[int], framing: Sequence[int], w: int):
    """Cocycles (alpha, beta) on the torus with alpha, beta dual to (meridian, longitude).

    alpha(meridian) = 1, alpha(longitude) = 0, beta(meridian) = 0,
    beta(longitude) = 1, where longitude = framing - w * meridian.  Returned
    as arrays over the edges of ``_Surface(triangles)`` with that surface.
    """
    s = _Surface(triangles)
    c1, c2 = s.basis_cocycles()
    mu = s.lid(meridian)
    fr = s.lid(framing)
    m = np.array([[s.evaluate(c1, mu), s.evaluate(c2, mu)], [s.evaluate(c1, fr), s.evaluate(c2, fr)]])
    det = int(round(np.linalg.det(m)))
    if abs(det) != 1:
        raise TriangulationError(f"meridian and framing do not form a basis (det {det})")
    inv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) * det
    # values on (meridian, framing): alpha -> (1, w), beta -> (0, 1)
    a = inv @ np.array([1, w])
    b = inv @ np.array([0, 1])
    alpha = a[0] * c1 + a[1] * c2
    beta = b[0] * c1 + b[1] * c2
    return s, alpha, beta


def curve_class(triangles, curve, meridian, framing, w) -> Tuple[int, int]:
    """(meridian, longitude) coordinates of an oriented edge cycle on a torus."""
    s, alpha, beta = torus_cocycles(triangles, meridian, framing, w)
    c = s.lid(curve)
    return s.evaluate(alpha, c), s.evaluate(beta, c)


def _harmonic_heights(s: _Surface, omega: np.ndarray, rng=None) -> np.ndarray:
    """Heights h with sum over neighbours of (h_v - h_u + omega(u->v)) = 0 at every vertex."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.linalg import spsolve

    a, b = s.edges[:, 0], s.edges[:, 1]
    w = np.ones(s.ne) if rng is None else 1.0 + rng.random(s.ne)
    nv = s.nv
    rows = np.concatenate([a, b, a, b])
    cols = np.concatenate([b, a, a, b])
    vals = np.concatenate([-w, -w, w, w])
    lap = coo_matrix((vals, (rows, cols)), shape=(nv, nv)).tocsr()
    rhs = np.zeros(nv)
    np.add.at(rhs, a, w * omega)
    np.add.at(rhs, b, -w * omega)
    h = np.zeros(nv)
    if nv > 1:
        h[1:] = spsolve(lap[1:, 1:].tocsc(), rhs[1:])
    return h


def _level_refinement(s: _Surface, omega: np.ndarray, rng=None):
    """Cut the torus along the level sets h = c (mod 1) and h = c + 1/2 (mod 1).

    Returns (RefinedTorus, curve, parallel) with curves as local-id cycles.
    """
    h = _harmonic_heights(s, omega, rng)
    a, b = s.edges[:, 0], s.edges[:, 1]
    d = h[b] - h[a] + omega
    # pick c away from every vertex height modulo 1/2
    r = np.sort(np.mod(h, 0.5))
    gaps = np.diff(np.concatenate([r, [r[0] + 0.5]]))
    g = int(np.argmax(gaps))
    if gaps[g] < 1e-9:
        raise TriangulationError("degenerate heights on the torus")
    c = r[g] + gaps[g] / 2
    n_loc = s.nv
    corner = [int(v) for v in s.verts]
    # cut points on every edge, in the edge frame starting at h[a]
    lo_val = np.minimum(h[a], h[a] + d)
    hi_val = np.maximum(h[a], h[a] + d)
    k_lo = np.floor((lo_val - c) * 2).astype(np.int64) + 1
    k_hi = np.ceil((hi_val - c) * 2).astype(np.int64) - 1
    counts = np.maximum(k_hi - k_lo + 1, 0)
    edge_levels: List[List[Tuple[int, int]]] = []  # per edge: (k, local id) ordered from a to b
    next_id = n_loc
    cut_src = []
    for e in range(s.ne):
        pts = []
        if counts[e]:
            ks = range(int(k_lo[e]), int(k_hi[e]) + 1)
            ks = list(ks) if d[e] > 0 else list(reversed(ks))
            for k in ks:
                t = (c + k / 2 - h[a[e]]) / d[e]
                pts.append((k, next_id))
                cut_src.append((e, t))
                next_id += 1
        edge_levels.append(pts)
    corner += [-1] * (next_id - n_loc)
    tris_out, parent, band = [], [], []
    seg = {0: {}, 1: {}}

    def link(par, p, q):
        for x, y in ((p, q), (q, p)):
            seg[par].setdefault(x, []).append(y)

    for t, (la, lb, lc) in enumerate(s.local.tolist()):
        e_ab, e_bc, e_ac = (int(x) for x in s.tri_edges[t])
        ha = h[la]
        hb = ha + d[e_ab]
        hc = ha + d[e_ac]
        shift_bc = int(omega[e_ab])
        bnd = [(la, ha, None)]
        bnd += [(pid, None, k) for k, pid in edge_levels[e_ab]]
        bnd += [(lb, hb, None)]
        bnd += [(pid, None, k + 2 * shift_bc) for k, pid in edge_levels[e_bc]]
        bnd += [(lc, hc, None)]
        bnd += [(pid, None, k) for k, pid in reversed(edge_levels[e_ac])]
        levels: Dict[int, List[int]] = {}
        for pid, hv, k in bnd:
            if k is not None:
                levels.setdefault(k, []).append(pid)
        for k, ps in levels.items():
            if len(ps) != 2:
                raise TriangulationError("level set meets a triangle in a non-segment")
            link(k & 1, ps[0], ps[1])
        kmin = int(np.floor((min(ha, hb, hc) - c) * 2))
        kmax = int(np.floor((max(ha, hb, hc) - c) * 2))
        for kb in range(kmin, kmax + 1):
            poly = []
            for pid, hv, k in bnd:
                if k is None:
                    if int(np.floor((hv - c) * 2)) == kb:
                        poly.append(pid)
                elif k == kb or k == kb + 1:
                    poly.append(pid)
            if len(poly) < 3:
                continue
            for j in range(1, len(poly) - 1):
                tris_out.append((poly[0], poly[j], poly[j + 1]))
                parent.append(t)
                band.append(kb & 1)
    curves = []
    for par in (0, 1):
        nb = seg[par]
        if not nb:
            raise TriangulationError("empty level set")
        start = min(nb)
        cyc = [start]
        prev, cur = None, start
        while True:
            x, y = nb[cur]
            nxt = y if x == prev else x
            if nxt == start:
                break
            cyc.append(nxt)
            prev, cur = cur, nxt
            if len(cyc) > len(nb):
                raise TriangulationError("level set does not close")
        if len(cyc) != len(nb):
            raise TriangulationError("level set is disconnected")
        curves.append(cyc)
    edge_points = {}
    for e in range(s.ne):
        u, v = int(s.verts[a[e]]), int(s.verts[b[e]])
        edge_points[(u, v)] = [int(a[e])] + [pid for _, pid in edge_levels[e]] + [int(b[e])]
    ref = RefinedTorus(
        triangles=np.asarray(tris_out, dtype=np.int64),
        corner=np.asarray(corner, dtype=np.int64),
        parent=np.asarray(parent, dtype=np.int64),
        edge_points=edge_points,
        band=np.asarray(band, dtype=np.int8),
    )
    ref.cut_source = cut_src
    return ref, curves[0], curves[1]


def _refined_path(ref: RefinedTorus, s: _Surface, cyc_global: Sequence[int]) -> List[int]:
    """Image of a torus edge cycle in the refinement (local ids)."""
    out = []
    loc = s.lid(cyc_global)
    for i in range(len(loc)):
        u, v = int(cyc_global[i]), int(cyc_global[(i + 1) % len(loc)])
        if u < v:
            pts = ref.edge_points[(u, v)]
        else:
            pts = list(reversed(ref.edge_points[(v, u)]))
        out.extend(pts[:-1])
    return out


def longitude_curve(torus: BoundaryTorus, framing: Optional[BoundaryCurve] = None, w: Optional[int] = None) -> BoundaryCurve:
    """Seifert longitude: framing - w * meridian.

    With w = 0 this is the framing path itself; otherwise the curve is
    realized on a refinement of the torus.
    """
    fr = framing.vertices if framing is not None else torus.framing
    w = torus.writhe if w is None else w
    if w == 0:
        return BoundaryCurve(list(fr), "longitude", torus.component, (0, 1))
    cur = realize_slope(torus, Slope(0, 1))
    cur.role = "longitude"
    return cur


def realize_slope(torus: BoundaryTorus, slope: Slope, basis: Optional[Tuple[BoundaryCurve, BoundaryCurve]] = None, seed: int = 0) -> BoundaryCurve:
    """Simple closed curve of class p * meridian + q * longitude.

    1/0 returns the meridian, and 0/1 returns the framing when the writhe is
    zero.  Any other slope (and 0/1 with nonzero writhe) is realized as a
    level set of a harmonic circle-valued function on the torus whose
    periods are (-q, p) on (meridian, longitude); the refinement of the
    torus along that level set and a parallel copy is carried by the curve.
    ``basis`` optionally supplies (longitude, meridian) curves whose classes
    replace the standard basis.
    """
    if slope.empty:
        raise TriangulationError("the empty coefficient has no filling curve")
    p, q = slope.p, slope.q
    if basis is not None:
        (l1, l2), (m1, m2) = basis[0].klass, basis[1].klass
        if abs(l1 * m2 - l2 * m1) != 1:
            raise TriangulationError("basis curves do not meet once")
        p, q = p * m1 + q * l1, p * m2 + q * l2
    if np.gcd(p, q) != 1:
        raise TriangulationError(f"slope {p}/{q} is not primitive")
    if (p, q) in ((1, 0), (-1, 0)):
        return BoundaryCurve(list(torus.meridian), "meridian", torus.component, (1, 0))
    if (p, q) in ((0, 1), (0, -1)) and torus.writhe == 0:
        return BoundaryCurve(list(torus.framing), "longitude", torus.component, (0, 1))
    return _level_curve(torus, p, q, seed)


def _level_curve(torus: BoundaryTorus, p: int, q: int, seed: int = 0) -> BoundaryCurve:
    s, alpha, beta = torus_cocycles(torus.triangles, torus.meridian, torus.framing, torus.writhe)
    omega = -q * alpha + p * beta
    rng = None
    for attempt in range(6):
        try:
            ref, cyc, par = _level_refinement(s, omega, rng)
            break
        except TriangulationError:
            if attempt == 5:
                raise
            rng = np.random.default_rng(seed + attempt)
    return BoundaryCurve(cyc, f"slope {p}/{q}", torus.component, (p, q), surface=ref, parallel=par)


def refined_class(torus: BoundaryTorus, curve: BoundaryCurve) -> Tuple[int, int]:
    """Audit: (meridian, longitude) class of a curve, recomputed from scratch.

    For curves on a refinement the meridian and framing are carried over to
    the refined torus and fresh cocycles are computed there.
    """
    if curve.surface is None:
        return curve_class(torus.triangles, curve.vertices, torus.meridian, torus.framing, torus.writhe)
    s = _Surface(torus.triangles)
    ref = curve.surface
    mu = _refined_path(ref, s, torus.meridian)
    fr = _refined_path(ref, s, torus.framing)
    return curve_class(ref.triangles, curve.vertices, mu, fr, torus.writhe)


# -----------------------------------------------------------------------------------
# Dehn filling
# -----------------------------------------------------------------------------------


def _filling_parts(tri: Triangulation, k: int, curve: BoundaryCurve, base: int):
    """Tetrahedra and vertex labels of the collar and solid torus filling torus k.

    The collar joins the torus (outer side, existing vertices) to a copy of
    its refinement (inner side, new vertices).  Over each torus triangle
    abc with a < b < c the collar cell is coned from a; the wall over bc is
    fanned from b, so adjacent cells agree on their common wall.

    The solid torus is cone(D) from apex 1 over the annulus on one side of
    the curve, cone from apex 2 over the other annulus, and the join of the
    parallel copy with the edge between the apexes, where D is the disk
    coned from the centre over the curve.  The curve bounds D, so it is the
    meridian of the filling.
    """
    torus = tri.tori[k]
    if curve.klass == (0, 0):
        raise TriangulationError("filling curve is inessential")
    if curve.surface is None:
        curve = _level_curve(torus, *curve.klass)
    ref = curve.surface
    if not curve.is_simple():
        raise TriangulationError("filling curve is not simple")
    n_loc = len(ref.corner)
    inner = base + np.arange(n_loc)
    u, ap1, ap2 = base + n_loc, base + n_loc + 1, base + n_loc + 2
    parts = []
    tt = np.sort(torus.triangles, axis=1)
    s = _Surface(tt)
    pieces_by_parent: Dict[int, List[int]] = {}
    for i, par in enumerate(ref.parent.tolist()):
        pieces_by_parent.setdefault(par, []).append(i)
    # _Surface sorts rows; ref.parent indexes rows of s.tris, which equal tt rows
    for t, (a, b, c) in enumerate(s.tris.tolist()):
        for i in pieces_by_parent.get(t, ()):
            x, y, z = (int(inner[j]) for j in ref.triangles[i])
            parts.append((a, x, y, z))
        wall = [int(inner[j]) for j in ref.edge_points[(b, c)]]  # from b' to c'
        parts.append((a, b, c, wall[-1]))
        for j in range(len(wall) - 1, 0, -1):
            parts.append((a, b, wall[j], wall[j - 1]))
    g = [int(inner[j]) for j in curve.vertices]
    pc = [int(inner[j]) for j in curve.parallel]
    for i in range(len(g)):
        e0, e1 = g[i], g[(i + 1) % len(g)]
        parts.append((ap1, u, e0, e1))
        parts.append((ap2, u, e0, e1))
    for i in range(len(pc)):
        parts.append((ap1, ap2, pc[i], pc[(i + 1) % len(pc)]))
    for tri3, bnd in zip(ref.triangles.tolist(), ref.band.tolist()):
        apex = ap1 if bnd == 0 else ap2
        parts.append((apex, *(int(inner[j]) for j in tri3)))
    kinds = np.concatenate(
        [np.where(ref.corner >= 0, COLLAR, CUT).astype(np.int8), np.array([DISK, APEX, APEX], dtype=np.int8)]
    )
    tags = np.zeros((n_loc + 3, 2), dtype=np.int64)
    tags[:n_loc, 0] = k
    tags[:n_loc, 1] = np.arange(n_loc)
    tags[n_loc:, 0] = k
    tags[n_loc:, 1] = [0, 1, 2]
    return np.asarray(parts, dtype=np.int64), kinds, tags, curve


def fill(tri: Triangulation, torus: int, curve: BoundaryCurve) -> Triangulation:
    """Glue a solid torus to boundary torus ``torus`` so that ``curve`` bounds a disk.

    A curve lying on the unrefined torus (the meridian or framing) is
    replaced by a level-set curve of the same class, which carries the
    parallel copy the construction needs.
    """
    if tri.tori[torus].filled:
        raise TriangulationError(f"torus {tri.tori[torus].label} is already filled")
    t0 = time.perf_counter()
    parts, kinds, tags, _ = _filling_parts(tri, torus, curve, tri.n_vertices)
    tori = list(tri.tori)
    tori[torus] = _filled(tori[torus])
    out = Triangulation(
        np.concatenate([tri.tets, parts]),
        np.concatenate([tri.kinds, kinds]),
        np.concatenate([tri.tags, tags]),
        tori=tori,
        stats=dict(tri.stats),
    )
    out.stats["seconds_fill"] = round(out.stats.get("seconds_fill", 0) + time.perf_counter() - t0, 4)
    return out


def _filled(t: BoundaryTorus) -> BoundaryTorus:
    return BoundaryTorus(t.component, t.label, t.coefficient, t.triangles, t.meridian, t.framing, t.writhe, True)


def triangulate_surgered(link, check: bool = False) -> Triangulation:
    """Triangulation of the manifold obtained by surgery on a link.

    Components with a slope are filled along it; components with the empty
    coefficient stay drilled and give boundary tori.  ``link`` may be a
    LinkDiagram or anything with a ``diagram`` attribute.
    """
    diagram = getattr(link, "diagram", link)
    t0 = time.perf_counter()
    if diagram.n_components == 0:
        # empty link: the boundary of a 4-simplex
        tets = np.array([[a for a in range(5) if a != k] for k in range(5)])
        out = Triangulation(tets, np.full(5, BALL), np.stack([np.arange(5), np.zeros(5, dtype=np.int64)], axis=1))
        out.stats.update(input_crossings=0, preprocessed_crossings=0, components=0, filled=0, drilled=0,
                         tetrahedra=5, seconds_total=round(time.perf_counter() - t0, 4))
        return out
    pre = preprocess(diagram)
    t1 = time.perf_counter()
    sphere = triangulate_sphere_with_link(pre)
    ext = drill(sphere)
    t2 = time.perf_counter()
    tets, kinds, tags = [ext.tets], [ext.kinds], [ext.tags]
    base = ext.n_vertices
    tori = list(ext.tori)
    filled_slopes = {}
    for k, tor in enumerate(ext.tori):
        if tor.coefficient.empty:
            continue
        curve = realize_slope(tor, tor.coefficient, seed=k)
        parts, kd, tg, used = _filling_parts(ext, k, curve, base)
        base += len(kd)
        tets.append(parts)
        kinds.append(kd)
        tags.append(tg)
        tori[k] = _filled(tor)
        filled_slopes[tor.label] = str(tor.coefficient)
    out = Triangulation(np.concatenate(tets), np.concatenate(kinds), np.concatenate(tags), tori=tori, stats=dict(ext.stats))
    t3 = time.perf_counter()
    out.stats.update(
        input_crossings=diagram.n_crossings,
        preprocessed_crossings=pre.n_crossings,
        components=diagram.n_components,
        filled=len(filled_slopes),
        drilled=len(out.open_tori()),
        tetrahedra=int(out.n_tets),
        seconds_preprocess=round(t1 - t0, 4),
        seconds_exterior=round(t2 - t1, 4),
        seconds_fill=round(t3 - t2, 4),
        seconds_total=round(t3 - t0, 4),
    )
    if check:
        rep = out.manifold_report()
        if not rep.ok:
            raise TriangulationError("; ".join(rep.messages))
    return out
