"""Combinatorial 2-complexes with marked rings and quadrilaterals.

A :class:`Complex2D` stores a tiling of a surface as vertices, edges and
faces, where each face is a cyclic sequence of oriented edges.  Complexes
are immutable after validation; every operation returns new values.

Faces must be consistently oriented (each edge is traversed at most once
in each direction), which restricts the library to orientable surfaces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    DanglingEdge,
    Disconnected,
    FormatError,
    HasBoundary,
    MalformedComplex,
    NonManifold,
    NotADisk,
    NotAnAnnulus,
    UnknownVertex,
)

OrientedEdge = tuple[int, bool]  # (edge id, traversed-forward flag)


@dataclass(frozen=True)
class Corner:
    """One face corner at a vertex: the entering and leaving edge ids."""

    face: int
    in_edge: int
    out_edge: int


@dataclass(frozen=True)
class Fan:
    """A maximal run of corners around a vertex, chained across shared
    edges.  ``closed`` means the run wraps around (interior vertex)."""

    corners: tuple[Corner, ...]
    closed: bool


@dataclass(frozen=True)
class Complex2D:
    """An immutable combinatorial 2-complex.

    Attributes:
        vertices: sorted tuple of vertex ids (opaque integers).
        edges: per edge id, the (tail, head) vertex pair.
        faces: per face id, the cyclic tuple of (edge id, forward) steps.
        tile_types: per face id, an optional tile-type name.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    faces: tuple[tuple[OrientedEdge, ...], ...]
    tile_types: tuple[str | None, ...] = field(default=())

    # -- basic accessors ------------------------------------------------

    def edge_ends(self, edge: int, forward: bool = True) -> tuple[int, int]:
        v, w = self.edges[edge]
        return (v, w) if forward else (w, v)

    def face_vertices(self, face: int) -> tuple[int, ...]:
        """Corner vertices of a face, in traversal order."""
        return tuple(self.edge_ends(e, fwd)[0] for e, fwd in self.faces[face])

    @cached_property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    @cached_property
    def edge_face_ids(self) -> tuple[tuple[int, ...], ...]:
        """Face ids incident to each edge."""
        incident: list[list[int]] = [[] for _ in self.edges]
        for f, cycle in enumerate(self.faces):
            for e, _ in cycle:
                incident[e].append(f)
        return tuple(tuple(fs) for fs in incident)

    @cached_property
    def vertex_edges(self) -> dict[int, tuple[int, ...]]:
        """Edge ids incident to each vertex (sorted)."""
        out: dict[int, list[int]] = {v: [] for v in self.vertices}
        for e, (v, w) in enumerate(self.edges):
            out[v].append(e)
            out[w].append(e)
        return {v: tuple(sorted(es)) for v, es in out.items()}

    @cached_property
    def vertex_faces(self) -> dict[int, tuple[int, ...]]:
        """Face ids incident to each vertex (sorted, no multiplicity)."""
        out: dict[int, set[int]] = {v: set() for v in self.vertices}
        for f in range(len(self.faces)):
            for v in self.face_vertices(f):
                out[v].add(f)
        return {v: tuple(sorted(fs)) for v, fs in out.items()}

    def vertex_neighbors(self, v: int) -> tuple[int, ...]:
        nbrs = set()
        for e in self.vertex_edges[v]:
            a, b = self.edges[e]
            nbrs.add(b if a == v else a)
        return tuple(sorted(nbrs))

    @cached_property
    def boundary_edges(self) -> frozenset[int]:
        return frozenset(
            e for e, fs in enumerate(self.edge_face_ids) if len(fs) == 1
        )

    @cached_property
    def boundary_vertices(self) -> frozenset[int]:
        verts: set[int] = set()
        for e in self.boundary_edges:
            verts.update(self.edges[e])
        return frozenset(verts)

    @cached_property
    def directed_users(self) -> dict[tuple[int, bool], int]:
        """Map (edge, forward) -> the face traversing it that way."""
        users: dict[tuple[int, bool], int] = {}
        for f, cycle in enumerate(self.faces):
            for e, fwd in cycle:
                users[(e, fwd)] = f
        return users

    @cached_property
    def vertex_fans(self) -> dict[int, tuple[Fan, ...]]:
        """Fans of corners around each vertex.

        A manifold interior vertex has one closed fan; a manifold boundary
        vertex has one open fan; pinched vertices have several.
        """
        return _build_fans(self)

    def single_fan(self, v: int) -> Fan:
        """The unique fan at ``v``; raises if the vertex is pinched."""
        fans = self.vertex_fans[v]
        if len(fans) != 1:
            raise MalformedComplex(
                f"vertex {v} is pinched ({len(fans)} fans)"
            )
        return fans[0]

    @cached_property
    def boundary_cycles(self) -> tuple[tuple[int, ...], ...]:
        """Boundary components as cyclic tuples of edge ids.

        Each boundary edge is traversed opposite to its unique face, so a
        cycle runs with the surface on its left.
        """
        # at each vertex, an arriving boundary step continues with the
        # in-edge of the fan whose out-edge it is
        next_edge: dict[int, int] = {}
        for v, fans in self.vertex_fans.items():
            for fan in fans:
                if fan.closed:
                    continue
                first_in = fan.corners[0].in_edge
                last_out = fan.corners[-1].out_edge
                next_edge[last_out] = first_in
        for e in self.boundary_edges:
            if e not in next_edge:
                raise MalformedComplex(f"boundary edge {e} has no successor")
        cycles: list[tuple[int, ...]] = []
        remaining = set(self.boundary_edges)
        while remaining:
            start = min(remaining)
            cycle = [start]
            remaining.discard(start)
            e = next_edge[start]
            while e != start:
                if e not in remaining:
                    raise MalformedComplex("boundary cycle does not close")
                cycle.append(e)
                remaining.discard(e)
                e = next_edge[e]
            cycles.append(tuple(cycle))
        return tuple(cycles)

    def is_closed(self) -> bool:
        return not self.boundary_edges

    def __repr__(self) -> str:  # keep huge complexes printable
        return (
            f"Complex2D(V={len(self.vertices)}, E={len(self.edges)}, "
            f"F={len(self.faces)})"
        )


def _build_fans(c: Complex2D) -> dict[int, tuple[Fan, ...]]:
    corners_at: dict[int, dict[int, Corner]] = {v: {} for v in c.vertices}
    for f, cycle in enumerate(c.faces):
        k = len(cycle)
        for i in range(k):
            e_in, _ = cycle[i - 1]
            e_out, fwd_out = cycle[i]
            v = c.edge_ends(e_out, fwd_out)[0]
            if e_out in corners_at[v]:
                raise MalformedComplex(
                    f"two corners leave vertex {v} through edge {e_out}"
                )
            corners_at[v][e_out] = Corner(face=f, in_edge=e_in, out_edge=e_out)

    fans: dict[int, tuple[Fan, ...]] = {}
    for v, by_out in corners_at.items():
        by_in: dict[int, Corner] = {}
        for crn in by_out.values():
            if crn.in_edge in by_in:
                raise MalformedComplex(
                    f"two corners enter vertex {v} through edge {crn.in_edge}"
                )
            by_in[crn.in_edge] = crn
        unused = dict(by_out)
        found: list[Fan] = []
        # open fans start at a corner whose in-edge no corner leaves by
        starts = sorted(
            (crn for crn in by_out.values() if crn.in_edge not in by_out),
            key=lambda crn: crn.out_edge,
        )
        for start in starts:
            if start.out_edge not in unused:
                continue
            run = [start]
            del unused[start.out_edge]
            while run[-1].out_edge in by_in:
                nxt = by_in[run[-1].out_edge]
                if nxt.out_edge not in unused:
                    break
                run.append(nxt)
                del unused[nxt.out_edge]
            found.append(Fan(corners=tuple(run), closed=False))
        # remaining corners sit on closed cycles
        while unused:
            start = unused[min(unused)]
            run = [start]
            del unused[start.out_edge]
            while True:
                nxt = by_in.get(run[-1].out_edge)
                if nxt is None or nxt is run[0]:
                    break
                if nxt.out_edge not in unused:
                    raise MalformedComplex(f"tangled corners at vertex {v}")
                run.append(nxt)
                del unused[nxt.out_edge]
            if run[0].in_edge != run[-1].out_edge:
                raise MalformedComplex(f"tangled corners at vertex {v}")
            found.append(Fan(corners=tuple(run), closed=True))
        fans[v] = tuple(found)
    return fans


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


def build_complex(
    vertices: Iterable[int],
    edges: Iterable[tuple[int, int]],
    faces: Iterable[Iterable[OrientedEdge]],
    tile_types: Sequence[str | None] | None = None,
) -> Complex2D:
    """Validate raw data and return an immutable complex.

    Raises:
        DanglingEdge: a face references a missing edge, or an edge a
            missing vertex.
        NonManifold: an edge is used twice in the same direction or more
            than twice overall.
        Disconnected: the complex has more than one component.
        MalformedComplex: any other structural defect.
    """
    vs = tuple(sorted(set(int(v) for v in vertices)))
    es = tuple((int(a), int(b)) for a, b in edges)
    fs = tuple(tuple((int(e), bool(d)) for e, d in cycle) for cycle in faces)
    if tile_types is None:
        tt: tuple[str | None, ...] = (None,) * len(fs)
    else:
        tt = tuple(t if t else None for t in tile_types)
        if len(tt) != len(fs):
            raise MalformedComplex("tile_types length does not match faces")

    if not vs:
        raise MalformedComplex("complex has no vertices")
    vset = set(vs)
    for e, (a, b) in enumerate(es):
        if a not in vset or b not in vset:
            raise DanglingEdge(f"edge {e} references a missing vertex")
        if a == b:
            raise MalformedComplex(f"edge {e} is a loop at vertex {a}")

    used: set[tuple[int, bool]] = set()
    use_count = [0] * len(es)
    for f, cycle in enumerate(fs):
        if not cycle:
            raise MalformedComplex(f"face {f} is empty")
        for e, _ in cycle:
            if not 0 <= e < len(es):
                raise DanglingEdge(f"face {f} references missing edge {e}")
        for i in range(len(cycle)):
            e, d = cycle[i]
            e2, d2 = cycle[(i + 1) % len(cycle)]
            head = es[e][1] if d else es[e][0]
            tail2 = es[e2][0] if d2 else es[e2][1]
            if head != tail2:
                raise MalformedComplex(
                    f"face {f} boundary breaks between edges {e} and {e2}"
                )
            if (e, d) in used:
                raise NonManifold(
                    f"edge {e} traversed twice in the same direction"
                )
            used.add((e, d))
            use_count[e] += 1
    for e, n in enumerate(use_count):
        if n > 2:
            raise NonManifold(f"edge {e} bounds {n} faces")
        if n == 0:
            raise MalformedComplex(f"edge {e} bounds no face")

    # connectivity over the 1-skeleton
    adj: dict[int, list[int]] = {v: [] for v in vs}
    for a, b in es:
        adj[a].append(b)
        adj[b].append(a)
    seen = {vs[0]}
    stack = [vs[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(vs):
        raise Disconnected(
            f"complex has {len(vs) - len(seen)} unreachable vertices"
        )

    c = Complex2D(vertices=vs, edges=es, faces=fs, tile_types=tt)
    c.vertex_fans  # force corner sanity checks
    c.boundary_cycles  # force boundary sanity checks
    return c


def complex_from_face_vertices(
    face_vertex_cycles: Sequence[Sequence[int]],
    tile_types: Sequence[str | None] | None = None,
) -> Complex2D:
    """Build a complex from faces given as vertex cycles.

    Edges are created on first encounter, oriented as first traversed, and
    shared by endpoint pair afterwards.  Convenient for hand-built tilings.
    """
    edge_ids: dict[tuple[int, int], int] = {}
    edges: list[tuple[int, int]] = []
    faces: list[tuple[OrientedEdge, ...]] = []
    verts: set[int] = set()
    for cycle in face_vertex_cycles:
        steps: list[OrientedEdge] = []
        k = len(cycle)
        for i in range(k):
            a, b = int(cycle[i]), int(cycle[(i + 1) % k])
            verts.add(a)
            key = (min(a, b), max(a, b))
            if key not in edge_ids:
                edge_ids[key] = len(edges)
                edges.append((a, b))
            e = edge_ids[key]
            steps.append((e, edges[e] == (a, b)))
        faces.append(tuple(steps))
    return build_complex(sorted(verts), edges, faces, tile_types)


def euler_characteristic(c: Complex2D) -> int:
    """V - E + F."""
    return len(c.vertices) - len(c.edges) + len(c.faces)


# ---------------------------------------------------------------------------
# markings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingMarking:
    """A complex marked as a ring (closed annulus).

    ``parent``/``parent_faces``/``core_faces`` record where the annulus sits
    inside a larger complex when it was extracted from one; ``core_faces``
    is the disk enclosed by the inner boundary.  They support the
    disjointness and nesting checks used when layering annuli.
    """

    complex: Complex2D
    inner_boundary: tuple[int, ...]
    outer_boundary: tuple[int, ...]
    parent: Complex2D | None = None
    parent_faces: frozenset[int] | None = None
    core_faces: frozenset[int] | None = None

    def lifted(
        self, face_map: Sequence[Iterable[int]], parent: Complex2D
    ) -> "RingMarking":
        """Transport provenance through a subdivision face-ancestry map."""
        if self.parent_faces is None or self.core_faces is None:
            raise NotAnAnnulus("ring has no provenance to lift")
        pf = frozenset(nf for f in self.parent_faces for nf in face_map[f])
        cf = frozenset(nf for f in self.core_faces for nf in face_map[f])
        return replace(self, parent=parent, parent_faces=pf, core_faces=cf)


@dataclass(frozen=True)
class QuadMarking:
    """A disk complex with four marked boundary arcs (edge-id paths)."""

    complex: Complex2D
    top: tuple[int, ...]
    bottom: tuple[int, ...]
    left: tuple[int, ...]
    right: tuple[int, ...]


@dataclass(frozen=True)
class ValenceReport:
    """Valence of a vertex and the largest valence among its neighbors."""

    vertex: int
    valence: int
    neighbor_valence_max: int


def _check_boundary_cycle(
    c: Complex2D, cycle: Sequence[int], what: str
) -> None:
    if not cycle:
        raise NotAnAnnulus(f"{what} boundary is empty")
    if len(set(cycle)) != len(cycle):
        raise NotAnAnnulus(f"{what} boundary repeats an edge")
    for e in cycle:
        if not 0 <= e < len(c.edges):
            raise NotAnAnnulus(f"{what} boundary cites missing edge {e}")
        if len(c.edge_face_ids[e]) != 1:
            raise NotAnAnnulus(
                f"{what} boundary edge {e} does not bound exactly one face"
            )


def mark_ring(
    c: Complex2D,
    inner_boundary: Sequence[int],
    outer_boundary: Sequence[int],
    *,
    parent: Complex2D | None = None,
    parent_faces: Iterable[int] | None = None,
    core_faces: Iterable[int] | None = None,
) -> RingMarking:
    """Validate ring structure and return the marking.

    The complex must be an annulus (Euler characteristic 0, exactly two
    boundary components) and the marked cycles must be those components.
    """
    inner = tuple(int(e) for e in inner_boundary)
    outer = tuple(int(e) for e in outer_boundary)
    if set(inner) & set(outer):
        raise NotAnAnnulus("inner and outer boundaries share edges")
    _check_boundary_cycle(c, inner, "inner")
    _check_boundary_cycle(c, outer, "outer")
    if euler_characteristic(c) != 0:
        raise NotAnAnnulus(
            f"Euler characteristic {euler_characteristic(c)} != 0"
        )
    comps = c.boundary_cycles
    if len(comps) != 2:
        raise NotAnAnnulus(f"{len(comps)} boundary components, expected 2")
    comp_sets = {frozenset(comp) for comp in comps}
    if {frozenset(inner), frozenset(outer)} != comp_sets:
        raise NotAnAnnulus("marked cycles are not the two boundary components")
    return RingMarking(
        complex=c,
        inner_boundary=inner,
        outer_boundary=outer,
        parent=parent,
        parent_faces=None if parent_faces is None else frozenset(parent_faces),
        core_faces=None if core_faces is None else frozenset(core_faces),
    )


def mark_quad(
    c: Complex2D,
    top: Sequence[int],
    bottom: Sequence[int],
    left: Sequence[int],
    right: Sequence[int],
) -> QuadMarking:
    """Validate quadrilateral structure and return the marking.

    The four arcs, in the cyclic order top-right-bottom-left (or its
    mirror), must partition the single boundary cycle of a disk.
    """
    if euler_characteristic(c) != 1:
        raise NotADisk(f"Euler characteristic {euler_characteristic(c)} != 1")
    comps = c.boundary_cycles
    if len(comps) != 1:
        raise NotADisk(f"{len(comps)} boundary components, expected 1")
    names = ("top", "right", "bottom", "left")
    arcs = [tuple(int(e) for e in arc) for arc in (top, right, bottom, left)]
    if any(not arc for arc in arcs):
        raise NotADisk("quadrilateral arcs must be non-empty")
    flat = [e for arc in arcs for e in arc]
    cycle = comps[0]
    if sorted(flat) != sorted(cycle):
        raise NotADisk("arcs do not partition the boundary cycle")
    # each arc must form one contiguous run, and the runs must appear in
    # the cyclic order top-right-bottom-left (either way around)
    arc_of = {e: names[i] for i, arc in enumerate(arcs) for e in arc}
    labels = [arc_of[e] for e in cycle]
    changes = [i for i in range(len(cycle)) if labels[i] != labels[i - 1]]
    if len(changes) != 4:
        raise NotADisk("each arc must be one contiguous boundary run")
    run_order = tuple(labels[i] for i in changes)
    allowed = {
        tuple(names[(s + j) % 4] for j in range(4)) for s in range(4)
    } | {
        tuple(names[(s - j) % 4] for j in range(4)) for s in range(4)
    }
    if run_order not in allowed:
        raise NotADisk("arcs are not in cyclic order around the boundary")
    t, r, b, l = arcs
    return QuadMarking(complex=c, top=t, bottom=b, left=l, right=r)


def arc_vertices(c: Complex2D, arc: Sequence[int]) -> frozenset[int]:
    """All vertices touched by an edge arc."""
    verts: set[int] = set()
    for e in arc:
        verts.update(c.edges[e])
    return frozenset(verts)


# ---------------------------------------------------------------------------
# sub-complexes and stars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubComplex:
    """A complex induced by a face subset of a parent complex.

    Vertex ids are inherited from the parent; edge and face ids are
    renumbered, with ``edge_map``/``face_map`` sending parent ids to
    sub-complex ids.
    """

    complex: Complex2D
    parent_faces: tuple[int, ...]
    edge_map: dict[int, int]
    face_map: dict[int, int]

    def boundary_parent_edges(self) -> frozenset[int]:
        parent_of = {sid: pid for pid, sid in self.edge_map.items()}
        return frozenset(
            parent_of[e] for e in self.complex.boundary_edges
        )


def face_subcomplex(c: Complex2D, face_ids: Iterable[int]) -> SubComplex:
    faces = tuple(sorted(set(int(f) for f in face_ids)))
    for f in faces:
        if not 0 <= f < len(c.faces):
            raise MalformedComplex(f"no face {f}")
    edge_map: dict[int, int] = {}
    new_edges: list[tuple[int, int]] = []
    new_faces: list[tuple[OrientedEdge, ...]] = []
    verts: set[int] = set()
    for f in faces:
        steps: list[OrientedEdge] = []
        for e, d in c.faces[f]:
            if e not in edge_map:
                edge_map[e] = len(new_edges)
                new_edges.append(c.edges[e])
            steps.append((edge_map[e], d))
        new_faces.append(tuple(steps))
        verts.update(c.face_vertices(f))
    sub = build_complex(
        sorted(verts),
        new_edges,
        new_faces,
        tuple(c.tile_types[f] for f in faces),
    )
    face_map = {f: i for i, f in enumerate(faces)}
    return SubComplex(
        complex=sub, parent_faces=faces, edge_map=edge_map, face_map=face_map
    )


@dataclass(frozen=True)
class Star:
    """Closed star of a vertex: its faces as a sub-complex plus the link."""

    vertex: int
    subcomplex: SubComplex
    link_vertices: tuple[int, ...]
    closed: bool


def star(c: Complex2D, v: int) -> Star:
    """Closed star of ``v``: all faces containing it, with the link cycle."""
    if v not in c.vertex_set:
        raise UnknownVertex(f"no vertex {v}")
    fan = c.single_fan(v)
    sub = face_subcomplex(c, c.vertex_faces[v])

    def far_end(e: int) -> int:
        a, b = c.edges[e]
        return b if a == v else a

    link = [far_end(crn.out_edge) for crn in fan.corners]
    if not fan.closed:
        link = [far_end(fan.corners[0].in_edge)] + link
    return Star(
        vertex=v,
        subcomplex=sub,
        link_vertices=tuple(link),
        closed=fan.closed,
    )


def star_faces_within(c: Complex2D, v: int, depth: int) -> frozenset[int]:
    """Faces within iterated-star depth ``depth`` of vertex ``v``.

    Depth 1 is the closed star; each further step adds every face sharing
    a vertex with the current set.
    """
    if v not in c.vertex_set:
        raise UnknownVertex(f"no vertex {v}")
    if depth < 1:
        raise MalformedComplex("star depth must be >= 1")
    current = set(c.vertex_faces[v])
    for _ in range(depth - 1):
        verts: set[int] = set()
        for f in current:
            verts.update(c.face_vertices(f))
        nxt = set(current)
        for w in verts:
            nxt.update(c.vertex_faces[w])
        if nxt == current:
            break
        current = nxt
    return frozenset(current)


def _is_disk(sub: SubComplex) -> bool:
    c = sub.complex
    return euler_characteristic(c) == 1 and len(c.boundary_cycles) == 1


def extract_vertex_annulus(
    c: Complex2D, v: int, inner_depth: int, outer_depth: int
) -> RingMarking:
    """The ring between the depth-``inner_depth`` and ``outer_depth`` stars.

    Both iterated stars must be disks; the faces strictly between them form
    the annulus, marked with the inner cycle nearest ``v``.
    """
    if not 1 <= inner_depth < outer_depth:
        raise NotAnAnnulus("need 1 <= inner_depth < outer_depth")
    inner_faces = star_faces_within(c, v, inner_depth)
    outer_faces = star_faces_within(c, v, outer_depth)
    try:
        inner_sub = face_subcomplex(c, inner_faces)
        outer_sub = face_subcomplex(c, outer_faces)
    except Disconnected as exc:
        raise NotAnAnnulus(str(exc)) from exc
    if not _is_disk(inner_sub):
        raise NotAnAnnulus(f"depth-{inner_depth} star of {v} is not a disk")
    if not _is_disk(outer_sub):
        raise NotAnAnnulus(f"depth-{outer_depth} star of {v} is not a disk")
    ring_faces = outer_faces - inner_faces
    if not ring_faces:
        raise NotAnAnnulus("inner and outer stars coincide")
    try:
        sub = face_subcomplex(c, ring_faces)
    except Disconnected as exc:
        raise NotAnAnnulus(str(exc)) from exc
    ring = sub.complex
    if euler_characteristic(ring) != 0 or len(ring.boundary_cycles) != 2:
        raise NotAnAnnulus("faces between the stars do not form an annulus")
    inner_cycle_parent = inner_sub.boundary_parent_edges()
    parent_of = {sid: pid for pid, sid in sub.edge_map.items()}
    cyc_a, cyc_b = ring.boundary_cycles
    if {parent_of[e] for e in cyc_a} == inner_cycle_parent:
        inner_cycle, outer_cycle = cyc_a, cyc_b
    elif {parent_of[e] for e in cyc_b} == inner_cycle_parent:
        inner_cycle, outer_cycle = cyc_b, cyc_a
    else:
        raise NotAnAnnulus("annulus boundary does not match star boundary")
    return mark_ring(
        ring,
        inner_cycle,
        outer_cycle,
        parent=c,
        parent_faces=ring_faces,
        core_faces=inner_faces,
    )


# ---------------------------------------------------------------------------
# adjacency, valence
# ---------------------------------------------------------------------------


def adjacency_graph(c: Complex2D, mode: str) -> dict[int, tuple[int, ...]]:
    """Face adjacency graph: ``"edge"`` joins faces sharing an edge,
    ``"vertex"`` faces sharing at least a vertex."""
    if mode not in ("edge", "vertex"):
        raise MalformedComplex(f"unknown adjacency mode {mode!r}")
    neighbors: dict[int, set[int]] = {f: set() for f in range(len(c.faces))}
    groups = (
        c.edge_face_ids if mode == "edge" else c.vertex_faces.values()
    )
    for fs in groups:
        for a in fs:
            for b in fs:
                if a != b:
                    neighbors[a].add(b)
    return {f: tuple(sorted(ns)) for f, ns in neighbors.items()}


def valence_report(c: Complex2D, v: int) -> ValenceReport:
    """Number of faces at ``v`` and the maximum over its edge-neighbors."""
    if v not in c.vertex_set:
        raise UnknownVertex(f"no vertex {v}")
    val = len(c.vertex_faces[v])
    nbrs = c.vertex_neighbors(v)
    bmax = max((len(c.vertex_faces[w]) for w in nbrs), default=0)
    return ValenceReport(vertex=v, valence=val, neighbor_valence_max=bmax)


# ---------------------------------------------------------------------------
# dual tiling and vertex blow-up
# ---------------------------------------------------------------------------


def dual_tiling(c: Complex2D) -> Complex2D:
    """Swap faces and vertices of a closed complex.

    Dual vertex ``f`` stands for face ``f``, dual edge ``e`` crosses primal
    edge ``e``, and the dual face over a primal vertex follows its
    rotation.  In the dual of a triangulation every vertex has valence 3.
    """
    if not c.is_closed():
        raise HasBoundary("dual tiling requires a closed surface")
    users = c.directed_users
    dual_edges: list[tuple[int, int]] = []
    for e in range(len(c.edges)):
        f_fwd = users.get((e, True))
        f_bwd = users.get((e, False))
        if f_fwd is None or f_bwd is None:
            raise HasBoundary(f"edge {e} lacks a face on one side")
        dual_edges.append((f_fwd, f_bwd))
    dual_faces: list[tuple[OrientedEdge, ...]] = []
    for v in c.vertices:
        fan = c.single_fan(v)
        steps: list[OrientedEdge] = []
        for crn in fan.corners:
            steps.append((crn.out_edge, dual_edges[crn.out_edge][0] == crn.face))
        dual_faces.append(tuple(steps))
    return build_complex(range(len(c.faces)), dual_edges, dual_faces)


def blow_up_vertices(c: Complex2D) -> Complex2D:
    """Replace every vertex by a small polygonal face.

    Each (vertex, incident edge) pair becomes a new vertex; original edges
    are kept (shortened); consecutive incidences around a vertex are joined
    by new "arc" edges bounding the inserted polygon.  At a boundary vertex
    one extra closing edge completes the polygon along the boundary.  All
    corners of the original tiles end up with valence 3, so any two faces
    sharing a vertex share an edge.
    """
    new_vid: dict[tuple[int, int], int] = {}
    counter = 0
    for v in c.vertices:
        for e in c.vertex_edges[v]:
            new_vid[(v, e)] = counter
            counter += 1
    edges: list[tuple[int, int]] = []
    for e, (a, b) in enumerate(c.edges):
        edges.append((new_vid[(a, e)], new_vid[(b, e)]))

    # one arc per corner: from the corner's out-edge incidence to its
    # in-edge incidence
    arc_id: dict[tuple[int, int, int], int] = {}
    vertex_polygon: dict[int, tuple[OrientedEdge, ...]] = {}
    for v in c.vertices:
        fan = c.single_fan(v)
        arcs: list[int] = []
        for crn in fan.corners:
            eid = len(edges)
            arc_id[(v, crn.out_edge, crn.in_edge)] = eid
            edges.append((new_vid[(v, crn.out_edge)], new_vid[(v, crn.in_edge)]))
            arcs.append(eid)
        if fan.closed:
            poly = [(e, True) for e in reversed(arcs)]
        else:
            first_in = fan.corners[0].in_edge
            last_out = fan.corners[-1].out_edge
            eid = len(edges)
            edges.append((new_vid[(v, first_in)], new_vid[(v, last_out)]))
            poly = [(e, True) for e in reversed(arcs)] + [(eid, True)]
        vertex_polygon[v] = _orient_polygon(edges, tuple(poly))

    faces: list[tuple[OrientedEdge, ...]] = []
    tile_types: list[str | None] = []
    for f, cycle in enumerate(c.faces):
        steps: list[OrientedEdge] = []
        k = len(cycle)
        for i in range(k):
            e, d = cycle[i]
            steps.append((e, d))
            head = c.edge_ends(e, d)[1]
            e2 = cycle[(i + 1) % k][0]
            # tile traverses the corner arc from the in-edge side to the
            # out-edge side, i.e. backwards
            steps.append((arc_id[(head, e2, e)], False))
        faces.append(tuple(steps))
        tile_types.append(c.tile_types[f])
    for v in c.vertices:
        faces.append(vertex_polygon[v])
        tile_types.append(None)
    return build_complex(range(counter), edges, faces, tile_types)


def _orient_polygon(
    edges: Sequence[tuple[int, int]], steps: tuple[OrientedEdge, ...]
) -> tuple[OrientedEdge, ...]:
    """Fix orientation flags so the steps chain head-to-tail."""
    es = [e for e, _ in steps]
    if len(es) < 2:
        raise MalformedComplex("polygon needs at least two edges")
    fixed: list[OrientedEdge] = []
    a0, b0 = edges[es[0]]
    if b0 in edges[es[1]]:
        fixed.append((es[0], True))
        head = b0
    else:
        fixed.append((es[0], False))
        head = a0
    for e in es[1:]:
        a, b = edges[e]
        if a == head:
            fixed.append((e, True))
            head = b
        elif b == head:
            fixed.append((e, False))
            head = a
        else:
            raise MalformedComplex("polygon edges do not chain")
    return tuple(fixed)


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------


def mirror(c: Complex2D) -> Complex2D:
    """The same complex with all face orientations reversed."""
    faces = tuple(
        tuple((e, not d) for e, d in reversed(cycle)) for cycle in c.faces
    )
    return Complex2D(
        vertices=c.vertices,
        edges=c.edges,
        faces=faces,
        tile_types=c.tile_types,
    )


def canonical_form(
    c: Complex2D, marking: RingMarking | QuadMarking | None = None
) -> str:
    """A string invariant under renumbering of vertices, edges and faces
    and under mirror reflection.

    Tries every directed face corner as the starting flag of a breadth
    first relabeling and keeps the smallest serialization.  Quadratic in
    complex size; intended for small complexes.
    """
    mark = _marking_edge_classes(marking)
    best: str | None = None
    for cc in (c, mirror(c)):
        for f in range(len(cc.faces)):
            for rot in range(len(cc.faces[f])):
                s = _serialize_from(cc, f, rot, mark)
                if best is None or s < best:
                    best = s
    return best or ""


def _marking_edge_classes(
    marking: RingMarking | QuadMarking | None,
) -> dict[int, str]:
    if marking is None:
        return {}
    out: dict[int, str] = {}
    if isinstance(marking, RingMarking):
        for e in marking.inner_boundary:
            out[e] = "i"
        for e in marking.outer_boundary:
            out[e] = "o"
    else:
        for name in ("top", "bottom", "left", "right"):
            for e in getattr(marking, name):
                out[e] = name[0]
    return out


def _serialize_from(
    c: Complex2D, f0: int, rot: int, mark: dict[int, str]
) -> str:
    users = c.directed_users
    vmap: dict[int, int] = {}
    emap: dict[int, int] = {}
    fmap: dict[int, int] = {}

    def vid(v: int) -> int:
        return vmap.setdefault(v, len(vmap))

    def eid(e: int) -> int:
        return emap.setdefault(e, len(emap))

    out: list[str] = []
    pending = [(f0, rot)]
    next_anchor = 0
    while len(fmap) < len(c.faces):
        if not pending:
            while next_anchor in fmap:
                next_anchor += 1
            pending.append((next_anchor, 0))
        fq, rq = pending.pop(0)
        if fq in fmap:
            continue
        fmap[fq] = len(fmap)
        cycle = c.faces[fq]
        k = len(cycle)
        rec = [f"F{c.tile_types[fq] or ''}"]
        for i in range(k):
            e, d = cycle[(rq + i) % k]
            tail = c.edge_ends(e, d)[0]
            rec.append(f"{vid(tail)}.{eid(e)}.{mark.get(e, '')}")
            other = users.get((e, not d))
            if other is not None and other not in fmap:
                oc = c.faces[other]
                pos = next(
                    j
                    for j, (ee, dd) in enumerate(oc)
                    if ee == e and dd == (not d)
                )
                pending.append((other, pos))
        out.append("|".join(rec))
    return ";".join(out)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

_COMPLEX_FIELDS = {"vertices", "edges", "faces", "tile_types", "markings"}
_RING_FIELDS = {"kind", "inner", "outer"}
_QUAD_FIELDS = {"kind", "top", "bottom", "left", "right"}


def complex_to_document(
    c: Complex2D,
    marking: RingMarking | QuadMarking | None = None,
) -> dict:
    """Serialize a complex (optionally with a marking) to a JSON document.

    Face entries are 1-based signed edge indices: ``k`` traverses edge
    ``k-1`` forward, ``-k`` traverses it reversed.
    """
    doc: dict = {
        "vertices": list(c.vertices),
        "edges": [list(e) for e in c.edges],
        "faces": [
            [(e + 1) if d else -(e + 1) for e, d in cycle] for cycle in c.faces
        ],
    }
    if any(t is not None for t in c.tile_types):
        doc["tile_types"] = [t or "" for t in c.tile_types]
    if isinstance(marking, RingMarking):
        doc["markings"] = {
            "kind": "ring",
            "inner": list(marking.inner_boundary),
            "outer": list(marking.outer_boundary),
        }
    elif isinstance(marking, QuadMarking):
        doc["markings"] = {
            "kind": "quad",
            "top": list(marking.top),
            "bottom": list(marking.bottom),
            "left": list(marking.left),
            "right": list(marking.right),
        }
    return doc


def complex_from_document(
    doc: Mapping,
) -> tuple[Complex2D, RingMarking | QuadMarking | None]:
    """Parse the interchange format.  Unknown fields are rejected."""
    if not isinstance(doc, Mapping):
        raise FormatError("complex document must be a JSON object")
    unknown = set(doc) - _COMPLEX_FIELDS
    if unknown:
        raise FormatError(f"unknown complex fields: {sorted(unknown)}")
    for key in ("vertices", "edges", "faces"):
        if key not in doc:
            raise FormatError(f"missing field {key!r}")
    try:
        vertices = [int(v) for v in doc["vertices"]]
        edges = [(int(a), int(b)) for a, b in doc["edges"]]
        faces = []
        for raw in doc["faces"]:
            cycle = []
            for s in raw:
                s = int(s)
                if s == 0:
                    raise FormatError("face indices are 1-based and signed")
                cycle.append((abs(s) - 1, s > 0))
            faces.append(cycle)
    except FormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise FormatError(f"malformed complex document: {exc}") from exc
    tile_types = None
    if "tile_types" in doc:
        tile_types = [str(t) if t else None for t in doc["tile_types"]]
    c = build_complex(vertices, edges, faces, tile_types)
    marking: RingMarking | QuadMarking | None = None
    if "markings" in doc:
        m = doc["markings"]
        if not isinstance(m, Mapping) or "kind" not in m:
            raise FormatError("markings must be an object with a 'kind'")
        if m["kind"] == "ring":
            if set(m) != _RING_FIELDS:
                raise FormatError("ring marking fields must be inner/outer")
            marking = mark_ring(c, m["inner"], m["outer"])
        elif m["kind"] == "quad":
            if set(m) != _QUAD_FIELDS:
                raise FormatError(
                    "quad marking fields must be top/bottom/left/right"
                )
            marking = mark_quad(c, m["top"], m["bottom"], m["left"], m["right"])
        else:
            raise FormatError(f"unknown marking kind {m['kind']!r}")
    return c, marking


def dump_complex(
    c: Complex2D,
    path: str,
    marking: RingMarking | QuadMarking | None = None,
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(complex_to_document(c, marking), fh, separators=(",", ":"))
        fh.write("\n")


def load_complex(
    path: str,
) -> tuple[Complex2D, RingMarking | QuadMarking | None]:
    with open(path, "r", encoding="utf-8") as fh:
        return complex_from_document(json.load(fh))
