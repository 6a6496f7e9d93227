"""Closed plane polylines with over/under rules, converted to port-map diagrams.

Gadgets, bands and cables are easiest to build as drawings.  A PolyLink
holds one closed polyline per component plus a tag per segment; a resolver
decides which segment passes over at each transverse intersection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from .linkdiag import Component, DiagramError, LinkDiagram
from .slope import EMPTY, Slope

__all__ = ["PolyComponent", "PolyLink", "segment_crossings", "offset_polyline", "closed_braid"]

Point = Tuple[float, float]


@dataclass
class PolyComponent:
    label: str
    points: List[Point]
    tags: List[Hashable]
    coefficient: Slope = EMPTY
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.tags) != len(self.points):
            raise ValueError("one tag per segment is required")

    def segments(self):
        n = len(self.points)
        for k in range(n):
            yield self.points[k], self.points[(k + 1) % n], self.tags[k]


# resolver(tag_a, tag_b, point) -> True if segment a passes over segment b
Resolver = Callable[[Hashable, Hashable, Point], bool]


def segment_crossings(x1, y1, x2, y2, comp, seg, nseg, eps: float = 1e-9):
    """All transverse intersections between segments.

    Segments k and k+1 of the same component share an endpoint and are not
    tested.  Touching or overlapping segments raise DiagramError.
    Returns arrays (i, j, ti, tj) of segment indices and parameters.
    """
    n = len(x1)
    xmin = np.minimum(x1, x2)
    xmax = np.maximum(x1, x2)
    ymin = np.minimum(y1, y2)
    ymax = np.maximum(y1, y2)
    order = np.argsort(xmin, kind="stable")
    xs = xmin[order]
    hi = np.searchsorted(xs, xmax[order] + eps, side="right")
    lo = np.arange(n) + 1
    cnt = np.maximum(hi - lo, 0)
    tot = int(cnt.sum())
    if tot == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z, np.zeros(0), np.zeros(0)
    a_sorted = np.repeat(np.arange(n), cnt)
    offs = np.arange(tot) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    b_sorted = np.repeat(lo, cnt) + offs
    ia = order[a_sorted]
    ib = order[b_sorted]
    keep = (ymin[ia] <= ymax[ib] + eps) & (ymin[ib] <= ymax[ia] + eps)
    ia, ib = ia[keep], ib[keep]
    # drop consecutive segments of the same component
    same = comp[ia] == comp[ib]
    d = np.abs(seg[ia] - seg[ib])
    adj = same & ((d == 1) | (d == nseg[ia] - 1))
    ia, ib = ia[~adj], ib[~adj]
    ax, ay = x1[ia], y1[ia]
    dax, day = x2[ia] - ax, y2[ia] - ay
    bx, by = x1[ib], y1[ib]
    dbx, dby = x2[ib] - bx, y2[ib] - by
    den = dax * dby - day * dbx
    rx, ry = bx - ax, by - ay
    with np.errstate(divide="ignore", invalid="ignore"):
        ta = (rx * dby - ry * dbx) / den
        tb = (rx * day - ry * dax) / den
    parallel = np.abs(den) <= eps * (np.hypot(dax, day) * np.hypot(dbx, dby) + eps)
    hit = (~parallel) & (ta > -eps) & (ta < 1 + eps) & (tb > -eps) & (tb < 1 + eps)
    tol = 1e-7
    proper = hit & (ta > tol) & (ta < 1 - tol) & (tb > tol) & (tb < 1 - tol)
    if np.any(hit & ~proper):
        k = int(np.nonzero(hit & ~proper)[0][0])
        raise DiagramError(
            f"segments touch at an endpoint (components {comp[ia[k]]}/{comp[ib[k]]}, "
            f"near ({ax[k] + ta[k] * dax[k]:.4f}, {ay[k] + ta[k] * day[k]:.4f}))"
        )
    # collinear overlaps
    if np.any(parallel):
        pi = np.nonzero(parallel)[0]
        cr = np.abs(rx[pi] * day[pi] - ry[pi] * dax[pi])
        colinear = cr <= 1e-9 * (np.hypot(dax[pi], day[pi]) + 1)
        if np.any(colinear):
            for k in pi[colinear]:
                la = dax[k] ** 2 + day[k] ** 2
                s0 = (rx[k] * dax[k] + ry[k] * day[k]) / la
                s1 = ((bx[k] + dbx[k] - ax[k]) * dax[k] + (by[k] + dby[k] - ay[k]) * day[k]) / la
                if max(s0, s1) > 1e-9 and min(s0, s1) < 1 - 1e-9:
                    raise DiagramError(f"collinear overlapping segments in components {comp[ia[k]]}/{comp[ib[k]]}")
    return ia[proper], ib[proper], ta[proper], tb[proper]


@dataclass
class PolyLink:
    components: List[PolyComponent] = field(default_factory=list)

    def add(self, comp: PolyComponent) -> int:
        self.components.append(comp)
        return len(self.components) - 1

    def _segment_arrays(self):
        x1, y1, x2, y2, comp, seg, nseg, tags = [], [], [], [], [], [], [], []
        for c, pc in enumerate(self.components):
            n = len(pc.points)
            for k, (a, b, t) in enumerate(pc.segments()):
                x1.append(a[0]); y1.append(a[1]); x2.append(b[0]); y2.append(b[1])
                comp.append(c); seg.append(k); nseg.append(n); tags.append(t)
        arr = lambda v, dt=float: np.asarray(v, dtype=dt)
        return (arr(x1), arr(y1), arr(x2), arr(y2), arr(comp, np.int64), arr(seg, np.int64),
                arr(nseg, np.int64), tags)

    def to_diagram(self, resolver: Resolver) -> Tuple[LinkDiagram, List[dict]]:
        """Build the port map.  Returns the diagram and per-crossing provenance."""
        x1, y1, x2, y2, comp, seg, nseg, tags = self._segment_arrays()
        ia, ib, ta, tb = segment_crossings(x1, y1, x2, y2, comp, seg, nseg)
        n = len(ia)
        over = [0] * n
        visits: Dict[int, List[Tuple[int, float, int, int, int]]] = {c: [] for c in range(len(self.components))}
        prov = []
        for x in range(n):
            a, b = int(ia[x]), int(ib[x])
            dax, day = x2[a] - x1[a], y2[a] - y1[a]
            dbx, dby = x2[b] - x1[b], y2[b] - y1[b]
            cr = dax * dby - day * dbx
            pt = (float(x1[a] + ta[x] * dax), float(y1[a] + ta[x] * day))
            a_over = bool(resolver(tags[a], tags[b], pt))
            # ports: 0 = a in, 2 = a out; b in/out at 1/3 or 3/1
            b_in, b_out = (1, 3) if cr > 0 else (3, 1)
            over[x] = 0 if a_over else 1
            visits[int(comp[a])].append((int(seg[a]), float(ta[x]), x, 0, 2))
            visits[int(comp[b])].append((int(seg[b]), float(tb[x]), x, b_in, b_out))
            prov.append({"point": pt, "tags": (tags[a], tags[b]), "over": tags[a] if a_over else tags[b]})
        nbr = [-1] * (4 * n)
        out = [False] * (4 * n)
        cp = [-1] * (4 * n)
        free = []
        for c, vs in visits.items():
            if not vs:
                free.append(c)
                continue
            vs.sort()
            m = len(vs)
            for k in range(m):
                _, _, x, pin, pout = vs[k]
                _, _, y, qin, _ = vs[(k + 1) % m]
                a, b = 4 * x + pout, 4 * y + qin
                nbr[a], nbr[b] = b, a
                out[a] = True
                cp[4 * x + pin] = cp[4 * x + pout] = c
        comps = [Component(pc.label, pc.coefficient) for pc in self.components]
        return LinkDiagram(nbr, out, cp, over, comps, free), prov


def offset_polyline(points: Sequence[Point], delta: float) -> List[Point]:
    """Closed polyline shifted by delta to the left of its direction of travel.

    Corners are mitred by intersecting the shifted neighbouring lines;
    consecutive collinear segments keep the plain shift.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    d = np.roll(pts, -1, axis=0) - pts
    length = np.hypot(d[:, 0], d[:, 1])
    if np.any(length == 0):
        raise ValueError("repeated point in polyline")
    u = d / length[:, None]
    nrm = np.stack([-u[:, 1], u[:, 0]], axis=1)
    out = []
    for k in range(n):
        pu, pn = u[k - 1], nrm[k - 1]
        cu, cn = u[k], nrm[k]
        p_line = pts[k] + delta * pn
        c_line = pts[k] + delta * cn
        den = pu[0] * cu[1] - pu[1] * cu[0]
        if abs(den) < 1e-12:
            out.append(tuple(c_line))
            continue
        r = c_line - p_line
        s = (r[0] * cu[1] - r[1] * cu[0]) / den
        q = p_line + s * pu
        out.append((float(q[0]), float(q[1])))
    return out


def closed_braid(word: Sequence[int], strands: int, coefficients: Optional[Sequence[Slope]] = None,
                 labels: Optional[Sequence[str]] = None) -> LinkDiagram:
    """Closure of a braid word; letter +i / -i is sigma_i^{+1} / sigma_i^{-1} (1-based).

    Strands run upward and close up around the right-hand side.  A positive
    letter is a positive crossing.  Components are numbered by their lowest
    starting position.
    """
    if strands < 1:
        raise ValueError("need at least one strand")
    for g in word:
        if g == 0 or abs(g) >= strands:
            raise ValueError(f"generator {g} out of range for {strands} strands")
    L = len(word)
    # position of every strand after each level
    perm = list(range(strands))  # perm[pos] = strand id at pos
    path: Dict[int, List[Tuple[float, float]]] = {i: [(float(i), 0.0)] for i in range(strands)}
    moves: Dict[int, List[int]] = {i: [] for i in range(strands)}
    for k, g in enumerate(word):
        i = abs(g) - 1
        nxt = perm[:]
        nxt[i], nxt[i + 1] = perm[i + 1], perm[i]
        for pos, sid in enumerate(perm):
            newpos = nxt.index(sid)
            path[sid].append((float(newpos), float(k + 1)))
            moves[sid].append(newpos - pos)
        perm = nxt
    # closure: strand ending at position j continues as the strand starting at j
    end_pos = {sid: perm.index(sid) for sid in range(strands)}
    comps: List[List[int]] = []
    seen = set()
    for s0 in range(strands):
        if s0 in seen:
            continue
        cyc = [s0]
        seen.add(s0)
        nxt = end_pos[s0]
        while nxt != s0:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = end_pos[nxt]
        comps.append(cyc)
    signs = [1 if g > 0 else -1 for g in word]
    link = PolyLink()
    for c, cyc in enumerate(comps):
        pts: List[Point] = []
        tags: List[Hashable] = []
        for sid in cyc:
            pp = path[sid]
            for k in range(L):
                pts.append(pp[k])
                tags.append(("b", k, moves[sid][k]))
            j = end_pos[sid]
            r = strands - j
            top, bottom, right = L + r, -r, strands - 1 + r
            pts += [pp[L], (float(j), float(top)), (float(right), float(top)), (float(right), float(bottom)),
                    (float(j), float(bottom))]
            tags += [("c",)] * 5
        lab = labels[c] if labels else f"c{c}"
        coef = coefficients[c] if coefficients else EMPTY
        link.add(PolyComponent(lab, pts, tags, coef))

    def resolve(ta, tb, pt):
        k = ta[1]
        return (ta[2] > 0) == (signs[k] > 0)

    d, _ = link.to_diagram(resolve)
    return d
