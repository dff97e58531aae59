"""Ready-made complexes: small closed surfaces, disks and marked rings."""

from __future__ import annotations

from .complex2d import (
    Complex2D,
    QuadMarking,
    RingMarking,
    complex_from_face_vertices,
    mark_quad,
    mark_ring,
)


def triangle(tile_type: str | None = None) -> Complex2D:
    """A single triangular tile."""
    return complex_from_face_vertices([(0, 1, 2)], [tile_type])


def two_triangle_square(
    tile_type: str | None = None,
) -> tuple[Complex2D, QuadMarking]:
    """Two triangles glued along a diagonal, marked as a quadrilateral.

    Corners 0 (top-left), 1 (top-right), 2 (bottom-right), 3 (bottom-left);
    the diagonal runs 0-2.  Top arc is edge 0-1, bottom arc edge 2-3.
    """
    c = complex_from_face_vertices(
        [(0, 1, 2), (0, 2, 3)], [tile_type, tile_type]
    )

    def edge_of(a: int, b: int) -> int:
        for e, (x, y) in enumerate(c.edges):
            if {x, y} == {a, b}:
                return e
        raise LookupError((a, b))

    q = mark_quad(
        c,
        top=[edge_of(0, 1)],
        bottom=[edge_of(2, 3)],
        left=[edge_of(3, 0)],
        right=[edge_of(1, 2)],
    )
    return c, q


def tetrahedron() -> Complex2D:
    """Boundary of the tetrahedron: 4 vertices, 6 edges, 4 faces."""
    return complex_from_face_vertices(
        [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]
    )


def octahedron() -> Complex2D:
    """Boundary of the octahedron: 6 vertices, 12 edges, 8 faces.

    Vertex 0 is the north pole, 5 the south pole, 1-4 the equator.
    """
    return complex_from_face_vertices(
        [
            (0, 1, 2),
            (0, 2, 3),
            (0, 3, 4),
            (0, 4, 1),
            (5, 2, 1),
            (5, 3, 2),
            (5, 4, 3),
            (5, 1, 4),
        ]
    )


def wheel(n: int, tile_type: str | None = None) -> Complex2D:
    """Disk of ``n`` triangles fanned around interior vertex 0."""
    if n < 3:
        raise ValueError("wheel needs n >= 3")
    faces = [(0, 1 + i, 1 + (i + 1) % n) for i in range(n)]
    return complex_from_face_vertices(faces, [tile_type] * n)


def cycle_ring(
    k: int, tile_type: str | None = None
) -> tuple[Complex2D, RingMarking]:
    """Annulus of ``k`` quadrilateral tiles in a single cycle.

    Inner boundary vertices 0..k-1, outer boundary vertices k..2k-1.
    """
    if k < 3:
        raise ValueError("cycle ring needs k >= 3")
    faces = []
    for i in range(k):
        j = (i + 1) % k
        faces.append((i, j, k + j, k + i))
    c = complex_from_face_vertices(faces, [tile_type] * k)
    inner = _edges_on_vertices(c, set(range(k)))
    outer = _edges_on_vertices(c, set(range(k, 2 * k)))
    return c, mark_ring(c, inner, outer)


def square_annulus(n: int) -> tuple[Complex2D, RingMarking]:
    """The annulus of 2n squares (4n triangles) around a valence-n vertex.

    This is the ring left when the new star of a valence-n vertex is
    removed after one barycentric subdivision: alternating squares, each
    split into two triangles.  Vertex layout per sector ``i``: inner cycle
    alternates edge midpoints ``m_i`` (ids 0..n-1) and tile barycenters
    ``c_i`` (ids n..2n-1); outer cycle alternates old link vertices ``u_i``
    (ids 2n..3n-1) and link-edge midpoints ``w_i`` (ids 3n..4n-1).
    """
    if n < 3:
        raise ValueError("square annulus needs n >= 3")

    def m(i: int) -> int:
        return i % n

    def ctr(i: int) -> int:
        return n + i % n

    def u(i: int) -> int:
        return 2 * n + i % n

    def w(i: int) -> int:
        return 3 * n + i % n

    faces = []
    for i in range(n):
        faces.append((m(i), u(i), ctr(i)))
        faces.append((u(i), w(i), ctr(i)))
        faces.append((w(i), u(i + 1), ctr(i)))
        faces.append((u(i + 1), m(i + 1), ctr(i)))
    c = complex_from_face_vertices(faces)
    inner = _edges_on_vertices(c, {m(i) for i in range(n)} | {ctr(i) for i in range(n)})
    outer = _edges_on_vertices(c, {u(i) for i in range(n)} | {w(i) for i in range(n)})
    return c, mark_ring(c, inner, outer)


def brick_ring(k: int) -> tuple[Complex2D, RingMarking]:
    """Annulus of two offset courses of ``k`` brick tiles each.

    Every vertex has exactly three incident edges, so fat and skinny tile
    chains coincide and vertex paths behave symmetrically.
    """
    if k < 2:
        raise ValueError("brick ring needs k >= 2")
    m = 2 * k

    def a(i: int) -> int:
        return i % m

    def b(i: int) -> int:
        return m + i % m

    def c_(i: int) -> int:
        return 2 * m + i % m

    faces = []
    for i in range(k):
        # inner course brick spanning a[2i..2i+2] and b[2i..2i+2]
        faces.append((a(2 * i), a(2 * i + 1), a(2 * i + 2), b(2 * i + 2), b(2 * i + 1), b(2 * i)))
        # outer course brick offset by one, spanning b[2i+1..2i+3]
        faces.append((b(2 * i + 1), b(2 * i + 2), b(2 * i + 3), c_(2 * i + 3), c_(2 * i + 2), c_(2 * i + 1)))
    cx = complex_from_face_vertices(faces)
    inner = _edges_on_vertices(cx, {a(i) for i in range(m)})
    outer = _edges_on_vertices(cx, {c_(i) for i in range(m)})
    return cx, mark_ring(cx, inner, outer)


def square_grid(
    cols: int, rows: int, *, split: str | None = None
) -> tuple[Complex2D, QuadMarking]:
    """A ``cols`` x ``rows`` grid of squares marked as a quadrilateral.

    ``split="all"`` cuts every cell into two triangles along a diagonal.
    Top arc is the row-0 edge path, bottom the last row.
    """
    if cols < 1 or rows < 1:
        raise ValueError("grid needs positive dimensions")

    def vid(x: int, y: int) -> int:
        return y * (cols + 1) + x

    faces: list[tuple[int, ...]] = []
    for y in range(rows):
        for x in range(cols):
            quad = (vid(x, y), vid(x + 1, y), vid(x + 1, y + 1), vid(x, y + 1))
            if split == "all":
                faces.append((quad[0], quad[1], quad[2]))
                faces.append((quad[0], quad[2], quad[3]))
            else:
                faces.append(quad)
    c = complex_from_face_vertices(faces)

    def edge_of(p: int, q: int) -> int:
        for e, (x, y) in enumerate(c.edges):
            if {x, y} == {p, q}:
                return e
        raise LookupError((p, q))

    top = [edge_of(vid(x, 0), vid(x + 1, 0)) for x in range(cols)]
    bottom = [edge_of(vid(x, rows), vid(x + 1, rows)) for x in range(cols)]
    left = [edge_of(vid(0, y), vid(0, y + 1)) for y in range(rows)]
    right = [edge_of(vid(cols, y), vid(cols, y + 1)) for y in range(rows)]
    return c, mark_quad(c, top, bottom, left, right)


def _edges_on_vertices(c: Complex2D, verts: set[int]) -> list[int]:
    """Boundary edges of ``c`` with both endpoints in ``verts``."""
    out = []
    for e in sorted(c.boundary_edges):
        x, y = c.edges[e]
        if x in verts and y in verts:
            out.append(e)
    return out
