"""Planar link diagrams as 4-valent port maps with over/under data and surgery coefficients.

A diagram with n crossings has 4n ports.  Port ``4*x + i`` is the i-th
port of crossing x, and ports 0..3 are listed counterclockwise.  Opposite
ports (i, i+2) carry the same strand.  ``nbr`` pairs every port with the
port at the other end of its edge, ``out`` says whether the oriented strand
leaves the crossing through that port, and ``over[x]`` is 0 when the pair
(0, 2) passes over and 1 when (1, 3) does.

A dart is a port read as "leave crossing x through port i"; walking a dart
with the face on the left and turning left at the next crossing gives the
face permutation ``p -> turn(nbr[p])`` with ``turn(4y + j) = 4y + (j - 1) % 4``.

Crossing signs use the right-handed rule: with over direction o and under
direction u, the sign is +1 when cross(o, u) > 0.  In port terms a crossing
is positive exactly when the under strand enters one port counterclockwise
after the port where the over strand enters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .slope import EMPTY, Slope, parse_slope, slope_distance

__all__ = [
    "Component",
    "LinkDiagram",
    "DiagramError",
    "ValidationReport",
    "Move",
    "SimplifyResult",
    "validate",
    "faces",
    "linking_number",
    "writhe",
    "reidemeister",
    "simplify_greedy",
    "slope_distance",
    "MOVES",
]

MOVES = ("R1+", "R1-", "R2+", "R2-", "R3")


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Component:
    label: str
    coefficient: Slope = EMPTY


def _through(p: int) -> int:
    return (p & ~3) | ((p + 2) & 3)


def _turn(p: int) -> int:
    return (p & ~3) | ((p - 1) & 3)


@dataclass(frozen=True)
class Move:
    """One Reidemeister move with its site, recorded for replay."""

    kind: str
    site: Tuple

    def to_json(self):
        return {"move": self.kind, "site": list(self.site)}

    @classmethod
    def from_json(cls, d):
        return cls(d["move"], tuple(tuple(x) if isinstance(x, list) else x for x in d["site"]))


class _Map:
    """Mutable working copy of a diagram; crossings are deleted by marking them dead."""

    def __init__(self, nbr, out, comp, over, components, free):
        self.nbr: List[int] = list(nbr)
        self.out: List[bool] = list(out)
        self.comp: List[int] = list(comp)
        self.over: List[int] = list(over)
        self.alive: List[bool] = [True] * len(self.over)
        self.components: List[Component] = list(components)
        self.free: set = set(free)
        self.dropped: set = set()

    @classmethod
    def of(cls, d: "LinkDiagram") -> "_Map":
        return cls(d.nbr, d.out, d.comp, d.over, d.components, d.free)

    # -- primitive queries ----------------------------------------------------------

    def n(self) -> int:
        return len(self.over)

    def is_over(self, p: int) -> bool:
        return (p & 3) % 2 == self.over[p >> 2]

    def sign(self, x: int) -> int:
        o = self.over[x]
        io = o if not self.out[4 * x + o] else o + 2
        u = 1 - o
        iu = u if not self.out[4 * x + u] else u + 2
        return 1 if iu % 4 == (io + 1) % 4 else -1

    def new_crossing(self, over: int) -> int:
        x = len(self.over)
        self.over.append(over)
        self.alive.append(True)
        self.nbr.extend([-1] * 4)
        self.out.extend([False] * 4)
        self.comp.extend([-1] * 4)
        return x

    def link(self, a: int, b: int):
        self.nbr[a] = b
        self.nbr[b] = a

    # -- deletion -------------------------------------------------------------------

    def splice_out(self, dead: Iterable[int], drop: Iterable[int] = ()):
        """Delete crossings, letting surviving strands pass straight through them.

        Components in ``drop`` are removed entirely (every crossing they touch
        must be listed in ``dead``).  Surviving components left without
        crossings become free loops.
        """
        dead = set(dead)
        drop = set(drop)
        for x in dead:
            self.alive[x] = False
        touched = set()
        for x in dead:
            for i in range(4):
                p = 4 * x + i
                if self.comp[p] in drop:
                    continue
                q = self.nbr[p]
                if self.alive[q >> 2]:
                    # walk from the surviving end q through dead crossings
                    start = q
                    r = p
                    guard = 0
                    while True:
                        r2 = _through(r)
                        s = self.nbr[r2]
                        if self.alive[s >> 2]:
                            break
                        r = s
                        guard += 1
                        if guard > 4 * len(self.over) + 8:
                            raise DiagramError("splice loop")
                    self.nbr[start] = s
                    self.nbr[s] = start
                touched.add(self.comp[p])
        for c in drop:
            self.dropped.add(c)
            self.free.discard(c)
        present = {self.comp[4 * x + i] for x in range(self.n()) if self.alive[x] for i in range(4)}
        for c in touched:
            if c not in drop and c not in present:
                self.free.add(c)

    def drop_component(self, c: int):
        dead = [x for x in range(self.n()) if self.alive[x] and any(self.comp[4 * x + i] == c for i in range(4))]
        self.splice_out(dead, drop=[c])
        self.free.discard(c)
        self.dropped.add(c)

    # -- face structure -------------------------------------------------------------

    def live_ports(self) -> List[int]:
        return [4 * x + i for x in range(self.n()) if self.alive[x] for i in range(4)]

    def face_of(self, p: int) -> List[int]:
        cyc = [p]
        q = _turn(self.nbr[p])
        while q != p:
            cyc.append(q)
            q = _turn(self.nbr[q])
            if len(cyc) > 4 * self.n() + 4:
                raise DiagramError("face traversal does not close")
        return cyc

    def all_faces(self) -> List[List[int]]:
        seen = set()
        out = []
        for p in self.live_ports():
            if p in seen:
                continue
            f = self.face_of(p)
            seen.update(f)
            out.append(f)
        return out

    def piece_of(self, p: int) -> int:
        """Smallest live crossing id in the connected piece of the map containing port p."""
        seen = {p >> 2}
        stack = [p >> 2]
        while stack:
            x = stack.pop()
            for i in range(4):
                y = self.nbr[4 * x + i] >> 2
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return min(seen)

    def pieces(self) -> Dict[int, int]:
        """Map each live crossing to the smallest crossing id of its piece."""
        label: Dict[int, int] = {}
        for x0 in range(self.n()):
            if not self.alive[x0] or x0 in label:
                continue
            label[x0] = x0
            stack = [x0]
            while stack:
                x = stack.pop()
                for i in range(4):
                    y = self.nbr[4 * x + i] >> 2
                    if y not in label:
                        label[y] = x0
                        stack.append(y)
        return label

    # -- Reidemeister moves in place ------------------------------------------------

    def r1_minus(self, p: int):
        q = self.nbr[p]
        x = p >> 2
        if not self.alive[x] or q >> 2 != x or ((q - p) & 3) not in (1, 3):
            raise DiagramError(f"R1- expects a monogon at port {p} (crossing {x})")
        self.splice_out([x])

    def r1_plus(self, p: int, side: int, sign: int):
        """Add a kink on the edge leaving port p; side +1 puts the loop on the right."""
        if not self.out[p]:
            p = self.nbr[p]
        q = self.nbr[p]
        c = self.comp[p]
        b = 1 if side > 0 else 3
        over = 0 if sign > 0 else 1
        if b == 3:
            over = 1 - over
        y = self.new_crossing(over)
        Y = 4 * y
        self.link(p, Y + 0)
        self.link(Y + 2, Y + b)
        self.link(Y + ((b + 2) & 3), q)
        for i, o in ((0, False), (2, True), (b, False), ((b + 2) & 3, True)):
            self.out[Y + i] = o
            self.comp[Y + i] = c
        return y

    def r2_minus(self, p: int):
        f = self.face_of(p)
        if len(f) != 2:
            raise DiagramError(f"R2- expects a bigon face at dart {p}")
        a, b = f
        x1, x2 = a >> 2, b >> 2
        if x1 == x2:
            raise DiagramError("R2- bigon must join two distinct crossings")
        if self.is_over(a) != self.is_over(self.nbr[a]):
            raise DiagramError("R2- expects one strand over at both crossings of the bigon")
        self.splice_out([x1, x2])

    def r2_plus(self, da: int, db: int, a_over: bool, free_b: Optional[int] = None, free_a: Optional[int] = None):
        """Push the edge of dart ``da`` across the edge of dart ``db`` inside a common face.

        ``free_b`` (``free_a``) names a crossing-free component used in place
        of the dart; when both name the same component the loop is folded
        over itself.
        """
        if free_a is None and free_b is None and db not in self.face_of(da):
            if self.piece_of(da) == self.piece_of(db):
                raise DiagramError("R2+ darts must lie on a common face")
        X = 4 * self.new_crossing(1 if a_over else 0)
        Y = 4 * self.new_crossing(1 if a_over else 0)
        if free_a is not None and free_a == free_b:
            c = free_a
            self.link(X + 1, Y + 1)
            self.link(Y + 2, X + 0)
            self.link(Y + 3, Y + 0)
            self.link(X + 2, X + 3)
            for pt in (X + 1, Y + 3, Y + 2, X + 2):
                self.out[pt] = True
            for i in range(4):
                self.comp[X + i] = c
                self.comp[Y + i] = c
            self.free.discard(c)
            return X >> 2, Y >> 2
        # strand A
        if free_a is not None:
            ca = free_a
            self.link(X + 1, Y + 1)
            self.link(Y + 3, X + 3)
            a_fwd = True
            self.free.discard(ca)
        else:
            pa, qa = da, self.nbr[da]
            ca = self.comp[da]
            a_fwd = self.out[pa]
            self.link(pa, X + 3)
            self.link(X + 1, Y + 1)
            self.link(Y + 3, qa)
        if free_b is not None:
            cb = free_b
            self.link(Y + 2, X + 0)
            self.link(X + 2, Y + 0)
            b_fwd = True
            self.free.discard(cb)
        else:
            pb, qb = db, self.nbr[db]
            if free_a is None and (pb == pa or pb == qa):
                raise DiagramError("R2+ needs two different edges")
            cb = self.comp[db]
            b_fwd = self.out[pb]
            self.link(pb, Y + 0)
            self.link(Y + 2, X + 0)
            self.link(X + 2, qb)
        for pt, fwd in ((X + 1, True), (X + 3, False), (Y + 3, True), (Y + 1, False)):
            self.out[pt] = fwd if a_fwd else not fwd
            self.comp[pt] = ca
        for pt, fwd in ((Y + 2, True), (Y + 0, False), (X + 2, True), (X + 0, False)):
            self.out[pt] = fwd if b_fwd else not fwd
            self.comp[pt] = cb
        return X >> 2, Y >> 2

    def r3_check(self, p: int) -> Tuple[int, int, int]:
        f = self.face_of(p)
        if len(f) != 3:
            raise DiagramError(f"R3 expects a triangle face at dart {p}")
        if len({d >> 2 for d in f}) != 3:
            raise DiagramError("R3 triangle must have three distinct crossings")
        # f = [d_P, d_Q, d_Z]; rotate so that p comes first
        k = f.index(p)
        dP, dQ, dZ = f[k:] + f[:k]
        # moving strand runs along dart dP from P to Q
        if self.is_over(dP) != self.is_over(self.nbr[dP]):
            raise DiagramError("R3 moving strand must pass over (or under) both of its crossings")
        return dP, dQ, dZ

    def r3(self, p: int):
        dP, dQ, dZ = self.r3_check(p)
        P, Q, Z = dP >> 2, dQ >> 2, dZ >> 2
        # ports, following the derivation in the module notes:
        # at P: int s1 = dP, int s2 = nbr(dZ); at Q: int s3 = dQ, int s1 = nbr(dP);
        # at Z: int s2 = dZ, int s3 = nbr(dQ)
        P_s1, P_s2 = dP, self.nbr[dZ]
        Q_s1, Q_s3 = self.nbr[dP], dQ
        Z_s3, Z_s2 = self.nbr[dQ], dZ
        ext = {
            "P1": _through(P_s1), "P2": _through(P_s2),
            "Q1": _through(Q_s1), "Q3": _through(Q_s3),
            "Z2": _through(Z_s2), "Z3": _through(Z_s3),
        }
        ov = {"12": self.is_over(P_s1), "13": self.is_over(Q_s1), "23": self.is_over(Z_s2)}
        outs = {k: self.out[v] for k, v in ext.items()}
        comps = {k: self.comp[v] for k, v in ext.items()}
        nb = {k: self.nbr[v] for k, v in ext.items()}
        # new layout, reusing crossing ids: P' = s1 x s2, Q' = s1 x s3, Z' = s2 x s3
        P4, Q4, Z4 = 4 * P, 4 * Q, 4 * Z
        newpos = {
            "Q1": P4 + 0, "Z2": P4 + 1,
            "Z3": Q4 + 1, "P1": Q4 + 2,
            "P2": Z4 + 2, "Q3": Z4 + 3,
        }
        oldport = {v: k for k, v in ext.items()}
        for k, pos in newpos.items():
            target = nb[k]
            if target in oldport:
                target = newpos[oldport[target]]
            self.nbr[pos] = target
            self.nbr[target] = pos
            self.out[pos] = outs[k]
            self.comp[pos] = comps[k]
        self.link(P4 + 2, Q4 + 0)
        self.link(P4 + 3, Z4 + 0)
        self.link(Q4 + 3, Z4 + 1)
        # internal ports take the opposite direction of the external port of the same strand
        for x4 in (P4, Q4, Z4):
            for i in range(4):
                pos = x4 + i
                if pos in newpos.values():
                    o = _through(pos)
                    self.out[o] = not self.out[pos]
                    self.comp[o] = self.comp[pos]
        # over flags: s1 is the (0,2) pair at P' and Q'; s2 is the (0,2) pair at Z'
        self.over[P] = 0 if ov["12"] else 1
        self.over[Q] = 0 if ov["13"] else 1
        self.over[Z] = 0 if ov["23"] else 1

    def freeze(self) -> "LinkDiagram":
        """Compact dead crossings and dropped components into an immutable diagram."""
        alive = [x for x in range(self.n()) if self.alive[x]]
        newx = {x: k for k, x in enumerate(alive)}
        keep_c = [c for c in range(len(self.components)) if c not in self.dropped]
        newc = {c: k for k, c in enumerate(keep_c)}
        nbr, out, comp, over = [], [], [], []
        for x in alive:
            over.append(self.over[x])
            for i in range(4):
                p = 4 * x + i
                q = self.nbr[p]
                nbr.append(4 * newx[q >> 2] + (q & 3))
                out.append(self.out[p])
                comp.append(newc[self.comp[p]])
        components = [self.components[c] for c in keep_c]
        free = sorted(newc[c] for c in self.free if c in newc)
        return LinkDiagram(nbr, out, comp, over, components, free)


class LinkDiagram:
    """Immutable link diagram with labelled components and surgery coefficients."""

    __slots__ = ("nbr", "out", "comp", "over", "components", "free", "_cache")

    def __init__(self, nbr, out, comp, over, components, free=()):
        self.nbr = tuple(nbr)
        self.out = tuple(bool(o) for o in out)
        self.comp = tuple(comp)
        self.over = tuple(over)
        self.components = tuple(components)
        self.free = tuple(sorted(free))
        self._cache = {}

    # -- basic counts -----------------------------------------------------------------

    @property
    def n_crossings(self) -> int:
        return len(self.over)

    @property
    def n_components(self) -> int:
        return len(self.components)

    def labels(self) -> List[str]:
        return [c.label for c in self.components]

    def index_of(self, label: str) -> int:
        for i, c in enumerate(self.components):
            if c.label == label:
                return i
        raise KeyError(label)

    def coefficient(self, c: int) -> Slope:
        return self.components[c].coefficient

    def with_coefficients(self, coeffs: Dict[int, Slope]) -> "LinkDiagram":
        comps = list(self.components)
        for c, s in coeffs.items():
            comps[c] = Component(comps[c].label, s)
        return LinkDiagram(self.nbr, self.out, self.comp, self.over, comps, self.free)

    def relabel(self, labels: Dict[int, str]) -> "LinkDiagram":
        comps = list(self.components)
        for c, s in labels.items():
            comps[c] = Component(s, comps[c].coefficient)
        return LinkDiagram(self.nbr, self.out, self.comp, self.over, comps, self.free)

    def sign(self, x: int) -> int:
        return self.signs()[x]

    def signs(self) -> Tuple[int, ...]:
        if "signs" not in self._cache:
            m = _Map.of(self)
            self._cache["signs"] = tuple(m.sign(x) for x in range(self.n_crossings))
        return self._cache["signs"]

    def strand_components(self, x: int) -> Tuple[int, int]:
        """(over component, under component) at crossing x."""
        o = self.over[x]
        return self.comp[4 * x + o], self.comp[4 * x + 1 - o]

    def crossings_of(self, c: int) -> List[int]:
        return sorted({p >> 2 for p, k in enumerate(self.comp) if k == c})

    def edges(self) -> List[Tuple[int, int]]:
        """Oriented edges (tail port, head port), ordered by tail port."""
        return [(p, self.nbr[p]) for p in range(len(self.nbr)) if self.out[p]]

    def component_cycle(self, c: int) -> List[int]:
        """Out-ports of component c in traversal order, starting at its lowest out-port."""
        starts = [p for p in range(len(self.nbr)) if self.out[p] and self.comp[p] == c]
        if not starts:
            return []
        p0 = starts[0]
        cyc = [p0]
        p = _through(self.nbr[p0])
        while p != p0:
            cyc.append(p)
            p = _through(self.nbr[p])
            if len(cyc) > len(self.nbr):
                raise DiagramError(f"component {c} does not close")
        return cyc

    def split_pieces(self) -> List[List[int]]:
        """Component groups of the connected pieces of the underlying map (free loops alone)."""
        parent = list(range(self.n_components))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for x in range(self.n_crossings):
            a, b = self.comp[4 * x], self.comp[4 * x + 1]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        groups: Dict[int, List[int]] = {}
        for c in range(self.n_components):
            groups.setdefault(find(c), []).append(c)
        return sorted(groups.values())

    def sublink(self, keep: Sequence[int]) -> "LinkDiagram":
        m = _Map.of(self)
        for c in range(self.n_components):
            if c not in keep:
                m.drop_component(c)
        return m.freeze()

    # -- serialization --------------------------------------------------------------

    def to_json(self) -> dict:
        edges = self.edges()
        eid = {}
        for k, (t, h) in enumerate(edges):
            eid[t] = 2 * k
            eid[h] = 2 * k + 1
        comps = []
        for c, comp in enumerate(self.components):
            cyc = self.component_cycle(c)
            comps.append(
                {
                    "label": comp.label,
                    "coefficient": str(comp.coefficient),
                    "edges": [eid[p] // 2 for p in cyc],
                    "free": c in self.free,
                }
            )
        signs = self.signs()
        crossings = [
            {"id": x, "ports": [eid[4 * x + i] for i in range(4)], "over": self.over[x], "sign": signs[x]}
            for x in range(self.n_crossings)
        ]
        return {"components": comps, "crossings": crossings}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data) -> "LinkDiagram":
        if isinstance(data, str):
            data = json.loads(data)
        crossings = sorted(data["crossings"], key=lambda c: c["id"])
        n = len(crossings)
        ends: Dict[int, int] = {}
        for x, cr in enumerate(crossings):
            if cr["id"] != x:
                raise DiagramError(f"crossing ids must be 0..n-1, got {cr['id']}")
            if len(cr["ports"]) != 4:
                raise DiagramError(f"crossing {x} must have 4 ports")
            for i, d in enumerate(cr["ports"]):
                if d in ends:
                    raise DiagramError(f"dart {d} used twice (crossing {x})")
                ends[d] = 4 * x + i
        nbr = [-1] * (4 * n)
        out = [False] * (4 * n)
        comp = [-1] * (4 * n)
        for d, p in ends.items():
            mate = d ^ 1
            if mate not in ends:
                raise DiagramError(f"open component: dangling half-edge at crossing {p >> 2}")
            nbr[p] = ends[mate]
            out[p] = d % 2 == 0
        components = []
        free = []
        for c, cd in enumerate(data["components"]):
            components.append(Component(cd["label"], parse_slope(str(cd["coefficient"]))))
            if cd.get("free") or not cd["edges"]:
                free.append(c)
            for e in cd["edges"]:
                for d in (2 * e, 2 * e + 1):
                    if d not in ends:
                        raise DiagramError(f"open component: edge {e} of {cd['label']} is not attached")
                    comp[ends[d]] = c
        for p in range(4 * n):
            if comp[p] < 0:
                raise DiagramError(f"crossing {p >> 2} has a port on no component")
        for x, cr in enumerate(crossings):
            if cr.get("over") not in (0, 1):
                raise DiagramError(f"crossing {x} over flag must be 0 or 1")
        d = cls(nbr, out, comp, [cr["over"] for cr in crossings], components, free)
        for x, cr in enumerate(crossings):
            if "sign" in cr and cr["sign"] != d.sign(x):
                raise DiagramError(f"crossing {x} sign {cr['sign']} disagrees with orientation")
        return d

    # -- canonical code -------------------------------------------------------------

    def canonical_code(self, role: Optional[Callable[[Component], str]] = None) -> Tuple:
        """Numbering-free code of a connected diagram.

        Minimises over start ports, component orientations and the
        simultaneous reflection of the plane with over/under exchange (which is
        a rotation of space).  ``role`` maps a component to the key used for
        matching (default: its coefficient).
        """
        role = role or (lambda c: str(c.coefficient))
        best = None
        ncomp = self.n_components
        for flip in (False, True):
            for mask in range(1 << ncomp):
                d = self._variant(flip, mask)
                for start in range(len(d.nbr)):
                    if not d.out[start]:
                        continue
                    code = d._code_from(start, role)
                    if best is None or code < best:
                        best = code
        free_roles = tuple(sorted(role(self.components[c]) for c in self.free))
        return (best or (), free_roles)

    def _variant(self, flip: bool, mask: int) -> "LinkDiagram":
        nbr, out, over = list(self.nbr), list(self.out), list(self.over)
        if flip:
            # reverse every rotation: port i -> -i, and exchange over/under
            def f(p):
                return (p & ~3) | ((-p) & 3)

            nbr2 = [0] * len(nbr)
            out2 = [False] * len(out)
            for p in range(len(nbr)):
                nbr2[f(p)] = f(nbr[p])
                out2[f(p)] = out[p]
            nbr, out = nbr2, out2
            # pair (0,2) stays (0,2) under i -> -i; exchange which pair is over
            over = [1 - o for o in over]
        comp = list(self.comp)
        if mask:
            out = [(not o) if (mask >> comp[p]) & 1 else o for p, o in enumerate(out)]
        return LinkDiagram(nbr, out, comp, over, self.components, self.free)

    def _code_from(self, start: int, role) -> Tuple:
        order: Dict[int, int] = {}
        rot: Dict[int, int] = {}
        comp_seq = []
        seen_comp = set()
        queue = [start]
        while queue:
            p0 = queue.pop(0)
            c = self.comp[p0]
            if c in seen_comp:
                continue
            seen_comp.add(c)
            comp_seq.append(role(self.components[c]))
            p = p0
            while True:
                x = p >> 2
                if x not in order:
                    order[x] = len(order)
                    rot[x] = _through(p) & 3
                q = self.nbr[p]
                y = q >> 2
                if y not in order:
                    order[y] = len(order)
                    rot[y] = q & 3
                p = _through(q)
                if p == p0:
                    break
            # queue other components in order of their first numbered crossing
            cand = []
            for x, k in order.items():
                for i in range(4):
                    r = 4 * x + i
                    if self.out[r] and self.comp[r] not in seen_comp:
                        cand.append((k, (i - rot[x]) & 3, r))
            cand.sort()
            queue = [r for _, _, r in cand[:1]] + queue
        if len(seen_comp) != len({self.comp[p] for p in range(len(self.comp))}):
            return (len(self.nbr) + 1,)  # disconnected: code from this start is incomplete
        code = [tuple(comp_seq)]
        for x in sorted(order, key=order.get):
            r0 = rot[x]
            entry = []
            for i in range(4):
                p = 4 * x + ((r0 + i) & 3)
                q = self.nbr[p]
                entry.append((order[q >> 2], ((q & 3) - rot[q >> 2]) & 3, int(self.out[p])))
            entry.append(int((r0 & 1) == self.over[x]))
            code.append(tuple(entry))
        return tuple(code)


# -----------------------------------------------------------------------------------
# validation, faces and invariants
# -----------------------------------------------------------------------------------


@dataclass
class ValidationReport:
    valid: bool
    n_crossings: int
    n_edges: int
    n_faces: int
    pieces: List[dict] = field(default_factory=list)
    face_degrees: Dict[int, int] = field(default_factory=dict)
    monogons: int = 0
    bigons: int = 0
    free_components: List[str] = field(default_factory=list)
    coefficients_normalized: bool = True
    messages: List[str] = field(default_factory=list)

    @property
    def euler(self) -> int:
        return self.n_crossings - self.n_edges + self.n_faces

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["face_degrees"] = {str(k): v for k, v in sorted(self.face_degrees.items())}
        d["euler"] = self.euler
        return d


def _check_wiring(d: LinkDiagram):
    n4 = len(d.nbr)
    if not (len(d.out) == len(d.comp) == n4 == 4 * len(d.over)):
        raise DiagramError("array lengths disagree")
    for p in range(n4):
        q = d.nbr[p]
        if not (0 <= q < n4) or d.nbr[q] != p or q == p:
            raise DiagramError(f"open component: port {p & 3} of crossing {p >> 2} is not wired to a partner")
        if d.out[p] == d.out[q]:
            raise DiagramError(f"edge orientation inconsistent at crossing {p >> 2}")
        if d.comp[p] != d.comp[q]:
            raise DiagramError(f"edge joins different components at crossing {p >> 2}")
        if d.out[p] == d.out[_through(p)]:
            raise DiagramError(f"strand does not pass through crossing {p >> 2}")
        if d.comp[p] != d.comp[_through(p)]:
            raise DiagramError(f"strand changes component at crossing {p >> 2}")
        if not (0 <= d.comp[p] < d.n_components):
            raise DiagramError(f"crossing {p >> 2} refers to an unknown component")
    for x, o in enumerate(d.over):
        if o not in (0, 1):
            raise DiagramError(f"crossing {x} has invalid over flag")
    present = set(d.comp)
    for c in range(d.n_components):
        if c in d.free and c in present:
            raise DiagramError(f"component {d.components[c].label} is marked free but has crossings")
        if c not in d.free and c not in present:
            raise DiagramError(f"open component: {d.components[c].label} has no edges")


def faces(diagram: LinkDiagram) -> List[List[int]]:
    """Faces as cyclic dart sequences; every dart lies in exactly one face."""
    if "faces" not in diagram._cache:
        _check_wiring(diagram)
        diagram._cache["faces"] = _Map.of(diagram).all_faces()
    return diagram._cache["faces"]


def validate(diagram: LinkDiagram) -> ValidationReport:
    """Structural and planarity checks; raises DiagramError on inconsistent wiring."""
    _check_wiring(diagram)
    fs = faces(diagram)
    n = diagram.n_crossings
    msgs = []
    # connected pieces of the crossing graph
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for p in range(4 * n):
        a, b = find(p >> 2), find(diagram.nbr[p] >> 2)
        if a != b:
            parent[a] = b
    piece_v: Dict[int, int] = {}
    piece_f: Dict[int, int] = {}
    for x in range(n):
        r = find(x)
        piece_v[r] = piece_v.get(r, 0) + 1
    for f in fs:
        r = find(f[0] >> 2)
        piece_f[r] = piece_f.get(r, 0) + 1
    pieces = []
    ok = True
    for r in sorted(piece_v):
        v, e, fc = piece_v[r], 2 * piece_v[r], piece_f.get(r, 0)
        chi = v - e + fc
        pieces.append({"crossings": v, "edges": e, "faces": fc, "euler": chi})
        if chi != 2:
            ok = False
            msgs.append(f"piece containing crossing {r} has V-E+F = {chi}, not planar")
    for c in diagram.free:
        pieces.append({"crossings": 0, "edges": 1, "faces": 2, "euler": 2, "free": diagram.components[c].label})
    degs: Dict[int, int] = {}
    for f in fs:
        degs[len(f)] = degs.get(len(f), 0) + 1
    if sum(len(f) for f in fs) != 4 * n:
        ok = False
        msgs.append("face degrees do not sum to 2E")
    normalized = True
    for comp in diagram.components:
        s = comp.coefficient
        if not isinstance(s, Slope):
            normalized = False
    return ValidationReport(
        valid=ok,
        n_crossings=n,
        n_edges=2 * n + len(diagram.free),
        n_faces=len(fs) + 2 * len(diagram.free),
        pieces=pieces,
        face_degrees=degs,
        monogons=degs.get(1, 0),
        bigons=degs.get(2, 0),
        free_components=[diagram.components[c].label for c in diagram.free],
        coefficients_normalized=normalized,
        messages=msgs,
    )


def _component_id(diagram: LinkDiagram, c) -> int:
    if isinstance(c, str):
        return diagram.index_of(c)
    return int(c)


def linking_number(diagram: LinkDiagram, a, b) -> int:
    """Sum of crossing signs where a passes under b."""
    a, b = _component_id(diagram, a), _component_id(diagram, b)
    if a == b:
        raise DiagramError("linking number needs two distinct components; use writhe for one")
    return linking_matrix(diagram)[a][b]


def linking_matrix(diagram: LinkDiagram) -> List[List[int]]:
    if "lk" not in diagram._cache:
        k = diagram.n_components
        m = [[0] * k for _ in range(k)]
        signs = diagram.signs()
        for x in range(diagram.n_crossings):
            o, u = diagram.strand_components(x)
            if o != u:
                m[u][o] += signs[x]
        diagram._cache["lk"] = m
    return [row[:] for row in diagram._cache["lk"]]


def writhe(diagram: LinkDiagram, c) -> int:
    """Sum of signs over self-crossings of component c."""
    c = _component_id(diagram, c)
    signs = diagram.signs()
    total = 0
    for x in range(diagram.n_crossings):
        o, u = diagram.strand_components(x)
        if o == c and u == c:
            total += signs[x]
    return total


# -----------------------------------------------------------------------------------
# moves
# -----------------------------------------------------------------------------------


def _apply(m: _Map, move: str, site: Tuple):
    if move == "R1-":
        m.r1_minus(site[0])
    elif move == "R1+":
        p, side, sign = site
        m.r1_plus(p, side, sign)
    elif move == "R2-":
        m.r2_minus(site[0])
    elif move == "R2+":
        da, db, a_over = site[0], site[1], bool(site[2])
        free_a = site[3] if len(site) > 3 and site[3] is not None and site[3] >= 0 else None
        free_b = site[4] if len(site) > 4 and site[4] is not None and site[4] >= 0 else None
        m.r2_plus(da, db, a_over, free_b=free_b, free_a=free_a)
    elif move == "R3":
        m.r3(site[0])
    else:
        raise DiagramError(f"unknown move {move!r}")


def reidemeister(diagram: LinkDiagram, move: str, site) -> LinkDiagram:
    """Apply one Reidemeister move and return the new diagram.

    Sites: ``R1-``: (port on the monogon loop,); ``R1+``: (port, side, sign);
    ``R2-``: (dart of the bigon,); ``R2+``: (dart a, dart b, a_over[, free_a,
    free_b]); ``R3``: (dart of the triangle along the moving strand,).
    """
    if not isinstance(site, tuple):
        site = (site,)
    m = _Map.of(diagram)
    _apply(m, move, site)
    return m.freeze()


def r1_minus_sites(m: _Map) -> List[int]:
    sites = []
    for x in range(m.n()):
        if not m.alive[x]:
            continue
        for i in range(4):
            p = 4 * x + i
            q = m.nbr[p]
            if q >> 2 == x and ((q - p) & 3) == 1:
                sites.append(p)
    return sites


def _bigon_sites(m: _Map, xs: Iterable[int]) -> List[int]:
    sites = []
    for x in xs:
        if not m.alive[x]:
            continue
        for i in range(4):
            p = 4 * x + i
            q = _turn(m.nbr[p])
            if q >> 2 != x and _turn(m.nbr[q]) == p:
                if m.is_over(p) == m.is_over(m.nbr[p]):
                    sites.append(p)
    return sites


def _triangle_sites(m: _Map, xs: Iterable[int]) -> List[int]:
    sites = []
    for x in xs:
        if not m.alive[x]:
            continue
        for i in range(4):
            p = 4 * x + i
            q = _turn(m.nbr[p])
            r = _turn(m.nbr[q])
            if _turn(m.nbr[r]) != p:
                continue
            if len({p >> 2, q >> 2, r >> 2}) != 3:
                continue
            if m.is_over(p) == m.is_over(m.nbr[p]):
                sites.append(p)
    return sites


@dataclass
class SimplifyResult:
    diagram: LinkDiagram
    moves: List[Move]
    exhausted: bool

    @property
    def steps(self) -> int:
        return len(self.moves)


def simplify_greedy(diagram: LinkDiagram, budget: int = 100000, r3_depth: int = 2) -> SimplifyResult:
    """Greedy crossing reduction: R1- first, then R2-, then a bounded R3 search.

    Sites are taken in order of (component of the site strand, crossing id)
    on the current working numbering, so the result and the recorded move
    list are deterministic.  Every recorded move replays on the diagram
    produced by the previous ones (after compaction).
    """
    d = diagram
    moves: List[Move] = []
    while True:
        if len(moves) >= budget:
            return SimplifyResult(d, moves, True)
        m = _Map.of(d)
        key = lambda p: (m.comp[p], p >> 2, p)
        r1 = sorted(r1_minus_sites(m), key=key)
        if r1:
            mv = Move("R1-", (r1[0],))
        else:
            r2 = sorted(_bigon_sites(m, range(m.n())), key=key)
            mv = Move("R2-", (r2[0],)) if r2 else None
        if mv is None:
            seq = _r3_search(d, r3_depth, min(budget - len(moves), 10 ** 9))
            if not seq:
                return SimplifyResult(d, moves, False)
            for mv3 in seq:
                d = reidemeister(d, mv3.kind, mv3.site)
                moves.append(mv3)
            continue
        d = reidemeister(d, mv.kind, mv.site)
        moves.append(mv)


def _has_reducing_site(d: LinkDiagram) -> bool:
    m = _Map.of(d)
    return bool(r1_minus_sites(m) or _bigon_sites(m, range(m.n())))


def _r3_search(d: LinkDiagram, depth: int, room: int) -> List[Move]:
    """Breadth-first search over R3 moves for a diagram admitting R1- or R2-."""
    if depth <= 0 or room <= 0:
        return []
    frontier = [(d, [])]
    seen = {d.nbr + d.out + d.over}
    for _ in range(depth):
        nxt = []
        for dd, path in frontier:
            m = _Map.of(dd)
            for p in sorted(_triangle_sites(m, range(m.n())), key=lambda p: (m.comp[p], p >> 2, p)):
                try:
                    d2 = reidemeister(dd, "R3", (p,))
                except DiagramError:
                    continue
                k = d2.nbr + d2.out + d2.over
                if k in seen:
                    continue
                seen.add(k)
                path2 = path + [Move("R3", (p,))]
                if _has_reducing_site(d2) and len(path2) <= room:
                    return path2
                nxt.append((d2, path2))
        frontier = nxt
        if not frontier:
            break
    return []


def replay_moves(diagram: LinkDiagram, moves: Sequence[Move]) -> LinkDiagram:
    d = diagram
    for mv in moves:
        d = reidemeister(d, mv.kind, mv.site)
    return d
