"""Carrier graphs for the three modes, with node-weighted shortest paths.

The carriers are either the vertices (paths are edge paths of the
1-skeleton) or the faces (chains across shared edges for skinny mode,
shared edges or vertices for fat mode).  Path length is the sum of the
weights of the carriers visited, endpoints included.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..complex2d import (
    Complex2D,
    QuadMarking,
    RingMarking,
    adjacency_graph,
    arc_vertices,
)
from ..errors import CarrierMismatch
from .types import Mode, WeightFunction

Marked = RingMarking | QuadMarking


@dataclass(frozen=True)
class CarrierGraph:
    """Adjacency over carriers plus the two marked boundary contact sets."""

    mode: Mode
    nodes: tuple[int, ...]
    neighbors: dict[int, tuple[int, ...]]
    sources: frozenset[int]
    targets: frozenset[int]


def _boundary_arcs(marked: Marked) -> tuple[Sequence[int], Sequence[int]]:
    if isinstance(marked, RingMarking):
        return marked.inner_boundary, marked.outer_boundary
    return marked.top, marked.bottom


def carrier_graph(marked: Marked, mode: Mode) -> CarrierGraph:
    """Build the carrier graph of a marked ring or quadrilateral.

    Connecting paths run from the inner boundary to the outer one (rings)
    or from the top arc to the bottom arc (quadrilaterals).  A tile touches
    an arc if it contains one of its edges (skinny) or one of its vertices
    (fat); a vertex touches an arc if it lies on it.
    """
    mode = Mode(mode)
    c = marked.complex
    start_arc, end_arc = _boundary_arcs(marked)
    if mode is Mode.VERTEX:
        nodes = c.vertices
        neighbors = {
            v: c.vertex_neighbors(v) for v in c.vertices
        }
        sources = arc_vertices(c, start_arc)
        targets = arc_vertices(c, end_arc)
    else:
        nodes = tuple(range(len(c.faces)))
        adj = adjacency_graph(
            c, "edge" if mode is Mode.SKINNY else "vertex"
        )
        neighbors = adj
        if mode is Mode.SKINNY:
            sources = _faces_with_edge(c, start_arc)
            targets = _faces_with_edge(c, end_arc)
        else:
            sources = _faces_with_vertex(c, start_arc)
            targets = _faces_with_vertex(c, end_arc)
    return CarrierGraph(
        mode=mode,
        nodes=nodes,
        neighbors=neighbors,
        sources=frozenset(sources),
        targets=frozenset(targets),
    )


def _faces_with_edge(c: Complex2D, arc: Sequence[int]) -> set[int]:
    faces: set[int] = set()
    for e in arc:
        faces.update(c.edge_face_ids[e])
    return faces


def _faces_with_vertex(c: Complex2D, arc: Sequence[int]) -> set[int]:
    faces: set[int] = set()
    for v in arc_vertices(c, arc):
        faces.update(c.vertex_faces[v])
    return faces


def check_carrier(w: WeightFunction, mode: Mode) -> None:
    mode = Mode(mode)
    if w.carrier != mode.carrier:
        raise CarrierMismatch(
            f"mode {mode.value!r} needs {mode.carrier}, got {w.carrier}"
        )


def shortest_connecting(
    graph: CarrierGraph, weights: Mapping[int, float]
) -> tuple[float, tuple[int, ...]]:
    """Least-weight path from the source set to the target set.

    Returns (inf, ()) when no path exists.  Ties break towards lower
    carrier ids, making the returned path deterministic.
    """
    dist: dict[int, float] = {}
    prev: dict[int, int | None] = {}
    heap: list[tuple[float, int]] = []
    for s in sorted(graph.sources):
        d = weights.get(s, 0.0)
        if s not in dist or d < dist[s]:
            dist[s] = d
            prev[s] = None
            heapq.heappush(heap, (d, s))
    seen: set[int] = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in seen or d > dist.get(u, float("inf")):
            continue
        seen.add(u)
        if u in graph.targets:
            path = [u]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return d, tuple(reversed(path))
        for x in graph.neighbors[u]:
            if x in seen:
                continue
            nd = d + weights.get(x, 0.0)
            if x not in dist or nd < dist[x]:
                dist[x] = nd
                prev[x] = u
                heapq.heappush(heap, (nd, x))
    return float("inf"), ()
