"""Shortest essential loops in a marked ring, for every mode.

The ring is cut once along a fixed connecting arc of the 1-skeleton
(shortest under uniform weights, so the choice is combinatorial and
deterministic).  Loops are then found by Dijkstra search in the infinite
cyclic cover: copies of the cut complex glued left boundary to right
boundary.  A loop is essential exactly when its lift changes cover level,
and every essential loop passes through a carrier touching the cut, so
searching from those carriers between consecutive levels is exhaustive.

Carriers may be revisited by a candidate walk; since minimal essential
loops are realized by simple cycles, the per-visit accounting of the
search still returns the exact set-weight minimum.
"""

from __future__ import annotations

import heapq
from typing import Mapping

from ..complex2d import Complex2D, RingMarking, arc_vertices
from ..errors import MalformedComplex, NoPath
from .types import Mode

DNode = tuple[str, int]  # ('o', vertex) | ('L', arc index) | ('R', arc index)


def _connecting_arc(ring: RingMarking) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Shortest vertex path from the inner to the outer boundary.

    Uniform weight one per vertex; ties break towards lower vertex and
    edge ids.  Returns (vertices v_0..v_k, edges e_1..e_k).
    """
    c = ring.complex
    sources = sorted(arc_vertices(c, ring.inner_boundary))
    targets = arc_vertices(c, ring.outer_boundary)
    dist: dict[int, int] = {}
    prev: dict[int, tuple[int, int] | None] = {}
    heap: list[tuple[int, int]] = []
    for s in sources:
        dist[s] = 1
        prev[s] = None
        heapq.heappush(heap, (1, s))
    seen: set[int] = set()
    incident: dict[int, list[tuple[int, int]]] = {v: [] for v in c.vertices}
    for e, (a, b) in enumerate(c.edges):
        incident[a].append((e, b))
        incident[b].append((e, a))
    while heap:
        d, u = heapq.heappop(heap)
        if u in seen:
            continue
        seen.add(u)
        if u in targets:
            verts = [u]
            edges: list[int] = []
            while prev[verts[-1]] is not None:
                pu, pe = prev[verts[-1]]
                edges.append(pe)
                verts.append(pu)
            return tuple(reversed(verts)), tuple(reversed(edges))
        for e, x in sorted(incident[u]):
            if x in seen:
                continue
            nd = d + 1
            if x not in dist or nd < dist[x]:
                dist[x] = nd
                prev[x] = (u, e)
                heapq.heappush(heap, (nd, x))
    raise NoPath("inner and outer boundaries are not connected")


class _Cut:
    """The fixed cut arc plus the left/right classification of corners."""

    def __init__(self, ring: RingMarking) -> None:
        self.ring = ring
        c = ring.complex
        self.arc, self.arc_edges = _connecting_arc(ring)
        self.arc_pos = {v: i for i, v in enumerate(self.arc)}
        if len(self.arc_pos) != len(self.arc):
            raise MalformedComplex("cut arc revisits a vertex")
        users = c.directed_users
        # face traversing arc edge i+1 in the arc direction lies left of it
        self.left_face_of_edge: dict[int, int] = {}
        for j, e in enumerate(self.arc_edges):
            tail, head = self.arc[j], self.arc[j + 1]
            d = c.edges[e] == (tail, head)
            fl = users.get((e, d))
            fr = users.get((e, not d))
            if fl is None or fr is None:
                raise MalformedComplex("cut arc runs along the boundary")
            self.left_face_of_edge[e] = fl
        # classify the corners around each arc vertex
        self.corner_side: dict[tuple[int, int], str] = {}  # (i, face) -> L/R
        self.edge_side: dict[tuple[int, int], str] = {}  # (i, edge) -> L/R
        for i, v in enumerate(self.arc):
            fan = c.single_fan(v)
            corners = fan.corners
            m = len(corners)
            if i == 0:
                spoke = self.arc_edges[0]
                p = next(
                    j for j, crn in enumerate(corners) if crn.out_edge == spoke
                )
                left = list(range(0, p + 1))
                right = list(range(p + 1, m))
            elif i == len(self.arc) - 1:
                spoke = self.arc_edges[-1]
                q = next(
                    j for j, crn in enumerate(corners) if crn.in_edge == spoke
                )
                left = list(range(q, m))
                right = list(range(0, q))
            else:
                e_in, e_out = self.arc_edges[i - 1], self.arc_edges[i]
                start = next(
                    j
                    for j, crn in enumerate(corners)
                    if crn.in_edge == e_in
                )
                left = []
                j = start
                while True:
                    left.append(j)
                    if corners[j].out_edge == e_out:
                        break
                    j = (j + 1) % m
                    if j == start:
                        raise MalformedComplex("cut arc is tangled at a vertex")
                right = [j for j in range(m) if j not in set(left)]
            spokes = set()
            if i > 0:
                spokes.add(self.arc_edges[i - 1])
            if i < len(self.arc_edges):
                spokes.add(self.arc_edges[i])
            for group, label in ((left, "L"), (right, "R")):
                for j in group:
                    crn = corners[j]
                    key = (i, crn.face)
                    if self.corner_side.setdefault(key, label) != label:
                        raise MalformedComplex(
                            f"face {crn.face} straddles the cut at one vertex"
                        )
                    for e in (crn.in_edge, crn.out_edge):
                        if e in spokes:
                            continue
                        ekey = (i, e)
                        if self.edge_side.setdefault(ekey, label) != label:
                            raise MalformedComplex(
                                f"edge {e} straddles the cut at one vertex"
                            )


class EssentialLoopFinder:
    """Reusable shortest-essential-loop searches on one marked ring."""

    def __init__(self, ring: RingMarking, mode: Mode) -> None:
        self.ring = ring
        self.mode = Mode(mode)
        self.cut = _Cut(ring)
        if self.mode is Mode.VERTEX:
            self._build_vertex_cover()
        else:
            self._build_tile_cover()

    # -- vertex mode ----------------------------------------------------

    def _build_vertex_cover(self) -> None:
        c = self.ring.complex
        cut = self.cut
        arc_set = set(cut.arc_edges)

        def dnode(x: int, via_edge: int) -> DNode:
            i = cut.arc_pos.get(x)
            if i is None:
                return ("o", x)
            return (cut.edge_side[(i, via_edge)], i)

        nbrs: dict[DNode, set[DNode]] = {}

        def add(a: DNode, b: DNode) -> None:
            nbrs.setdefault(a, set()).add(b)
            nbrs.setdefault(b, set()).add(a)

        for e, (a, b) in enumerate(c.edges):
            if e in arc_set:
                continue
            add(dnode(a, e), dnode(b, e))
        for j in range(len(cut.arc_edges)):
            add(("L", j), ("L", j + 1))
            add(("R", j), ("R", j + 1))
        for i in range(len(cut.arc)):
            nbrs.setdefault(("L", i), set())
            nbrs.setdefault(("R", i), set())
        self._d_neighbors = {k: tuple(sorted(v)) for k, v in nbrs.items()}

    def _vertex_of(self, dn: DNode) -> int:
        if dn[0] == "o":
            return dn[1]
        return self.cut.arc[dn[1]]

    def _loop_vertex_mode(
        self, weights: Mapping[int, float]
    ) -> tuple[float, tuple[int, ...]]:
        cut = self.cut
        lvl_cap = len(self.ring.complex.vertices) + 2
        best = float("inf")
        best_loop: tuple[int, ...] = ()

        def norm(dn: DNode, lvl: int) -> tuple[DNode, int]:
            if dn[0] == "R":
                return ("L", dn[1]), lvl + 1
            return dn, lvl

        for i in range(len(cut.arc)):
            w0 = weights.get(cut.arc[i], 0.0)
            if w0 >= best:
                continue
            start = (("L", i), 0)
            goal = (("L", i), 1)
            dist: dict[tuple[DNode, int], float] = {start: w0}
            prev: dict[tuple[DNode, int], tuple[DNode, int] | None] = {
                start: None
            }
            heap: list[tuple[float, DNode, int]] = [(w0, start[0], 0)]
            seen: set[tuple[DNode, int]] = set()
            while heap:
                d, dn, lvl = heapq.heappop(heap)
                node = (dn, lvl)
                # the anchor is paid once at the start and once on arrival;
                # the loop's set weight counts it once
                if d - w0 >= best:
                    break
                if node in seen:
                    continue
                seen.add(node)
                if node == goal:
                    loop = []
                    cur: tuple[DNode, int] | None = node
                    while cur is not None:
                        loop.append(self._vertex_of(cur[0]))
                        cur = prev[cur]
                    if d - w0 < best:
                        best = d - w0
                        best_loop = tuple(dict.fromkeys(loop))
                    break
                expansions: list[tuple[DNode, int]] = []
                for nb in self._d_neighbors[dn]:
                    expansions.append(norm(nb, lvl))
                if dn[0] == "L":
                    for nb in self._d_neighbors[("R", dn[1])]:
                        expansions.append(norm(nb, lvl - 1))
                for nb_node in expansions:
                    if abs(nb_node[1]) > lvl_cap or nb_node in seen:
                        continue
                    nd = d + weights.get(self._vertex_of(nb_node[0]), 0.0)
                    if nb_node not in dist or nd < dist[nb_node]:
                        dist[nb_node] = nd
                        prev[nb_node] = node
                        heapq.heappush(heap, (nd, nb_node[0], nb_node[1]))
        return best, best_loop

    # -- tile modes -------------------------------------------------------

    def _build_tile_cover(self) -> None:
        c = self.ring.complex
        cut = self.cut
        arc_edge_index = {e: j for j, e in enumerate(cut.arc_edges)}
        trans: dict[int, dict[int, set[int]]] = {
            f: {} for f in range(len(c.faces))
        }

        def add(f: int, g: int, delta: int) -> None:
            trans[f].setdefault(g, set()).add(delta)
            trans[g].setdefault(f, set()).add(-delta)

        for e, fs in enumerate(c.edge_face_ids):
            if len(fs) != 2:
                continue
            f, g = fs
            if f == g:
                continue
            if e in arc_edge_index:
                fl = cut.left_face_of_edge[e]
                fr = g if fl == f else f
                add(fr, fl, 1)
            else:
                add(f, g, 0)
        if self.mode is Mode.FAT:
            for v in c.vertices:
                faces = c.vertex_faces[v]
                i = cut.arc_pos.get(v)
                for a in faces:
                    for b in faces:
                        if a >= b:
                            continue
                        if i is None:
                            add(a, b, 0)
                        else:
                            sa = cut.corner_side[(i, a)]
                            sb = cut.corner_side[(i, b)]
                            if sa == sb:
                                add(a, b, 0)
                            elif (sa, sb) == ("R", "L"):
                                add(a, b, 1)
                            else:
                                add(b, a, 1)
        self._transitions = {
            f: tuple(sorted((g, tuple(sorted(ds))) for g, ds in by_g.items()))
            for f, by_g in trans.items()
        }
        anchors = set()
        for f, by_g in trans.items():
            for g, ds in by_g.items():
                if any(d != 0 for d in ds):
                    anchors.add(f)
                    anchors.add(g)
        self._anchors = tuple(sorted(anchors))

    def _loop_tile_mode(
        self, weights: Mapping[int, float]
    ) -> tuple[float, tuple[int, ...]]:
        lvl_cap = len(self.ring.complex.faces) + 2
        best = float("inf")
        best_loop: tuple[int, ...] = ()
        for x in self._anchors:
            w0 = weights.get(x, 0.0)
            if w0 >= best:
                continue
            start = (x, 0)
            goal = (x, 1)
            dist: dict[tuple[int, int], float] = {start: w0}
            prev: dict[tuple[int, int], tuple[int, int] | None] = {start: None}
            heap: list[tuple[float, int, int]] = [(w0, x, 0)]
            seen: set[tuple[int, int]] = set()
            while heap:
                d, f, lvl = heapq.heappop(heap)
                node = (f, lvl)
                # anchor is paid at the start and again on arrival
                if d - w0 >= best:
                    break
                if node in seen:
                    continue
                seen.add(node)
                if node == goal:
                    loop = []
                    cur: tuple[int, int] | None = node
                    while cur is not None:
                        loop.append(cur[0])
                        cur = prev[cur]
                    best = d - w0
                    best_loop = tuple(dict.fromkeys(loop))
                    break
                for g, deltas in self._transitions[f]:
                    ng = d + weights.get(g, 0.0)
                    for delta in deltas:
                        nb = (g, lvl + delta)
                        if abs(nb[1]) > lvl_cap or nb in seen:
                            continue
                        if nb not in dist or ng < dist[nb]:
                            dist[nb] = ng
                            prev[nb] = node
                            heapq.heappush(heap, (ng, g, lvl + delta))
        return best, best_loop

    # -- public -----------------------------------------------------------

    def shortest_loop(
        self, weights: Mapping[int, float]
    ) -> tuple[float, tuple[int, ...]]:
        """Least set-weight of an essential loop, with one realizing set."""
        if self.mode is Mode.VERTEX:
            return self._loop_vertex_mode(weights)
        return self._loop_tile_mode(weights)

    def loop_transitions(self, f: int, g: int) -> tuple[int, ...]:
        """Level shifts available when stepping between adjacent tiles."""
        if self.mode is Mode.VERTEX:
            raise MalformedComplex("tile transitions undefined in vertex mode")
        for gg, ds in self._transitions[f]:
            if gg == g:
                return ds
        return ()
