"""Finite subdivision rules: definition, application, growth classification.

A rule gives, per tile type, a model polygon subdivided into a disk
pattern, plus a compatible subdivision of every edge type.  Applying the
rule replaces each face of a complex by its pattern, gluing neighbours
along the shared sub-edge chains.

Edge-type subdivisions must read the same from both ends (palindromic
sub-type sequences), so that the two tiles meeting along an edge agree on
its subdivision without tracking edge orientations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .complex2d import (
    Complex2D,
    OrientedEdge,
    QuadMarking,
    RingMarking,
    build_complex,
    complex_from_document,
    complex_from_face_vertices,
    complex_to_document,
    euler_characteristic,
    mark_quad,
    mark_ring,
)
from .errors import (
    EdgeMismatch,
    FormatError,
    GluingFailure,
    MissingTileType,
    NotADisk,
    NotInterior,
    UnknownTileType,
)


@dataclass(frozen=True)
class TilePattern:
    """Replacement pattern for one tile type.

    ``boundary`` lists the edge type of each model side; ``boundary_map``
    lists, per side, the pattern edges that subdivide it, in order from
    the side's first corner.  Derived fields are filled in during rule
    validation.
    """

    name: str
    boundary: tuple[str, ...]
    pattern: Complex2D
    boundary_map: tuple[tuple[int, ...], ...]
    # derived during validation
    side_steps: tuple[tuple[OrientedEdge, ...], ...] = field(default=())
    side_intermediates: tuple[tuple[int, ...], ...] = field(default=())
    corners: tuple[int, ...] = field(default=())
    interior_vertices: tuple[int, ...] = field(default=())

    @property
    def sides(self) -> int:
        return len(self.boundary)


@dataclass(frozen=True)
class SubdivisionRule:
    """A named set of tile patterns with compatible edge subdivisions."""

    name: str
    edge_splits: dict[str, tuple[str, ...]]
    tiles: dict[str, TilePattern]


@dataclass(frozen=True)
class GrowthClass:
    """Observed valence growth of a vertex across subdivision stages."""

    kind: str  # bounded | linear | exponential
    multiplier: float | None
    addend: int | None
    valences: tuple[int, ...]


@dataclass(frozen=True)
class SubdivisionMaps:
    """Ancestry data for one subdivision step.

    ``face_children[f]`` lists the new faces replacing old face ``f``;
    ``edge_children[e]`` lists the sub-edges of old edge ``e`` in order
    along its stored direction.  Old vertex ids are preserved.
    """

    face_children: tuple[tuple[int, ...], ...]
    edge_children: tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------------------
# rule validation
# ---------------------------------------------------------------------------


def _face_direction_boundary(c: Complex2D) -> tuple[OrientedEdge, ...]:
    """The boundary cycle of a disk traversed as its faces traverse it."""
    users = c.directed_users
    steps: dict[int, OrientedEdge] = {}
    for e in c.boundary_edges:
        d = (e, True) in users
        tail = c.edge_ends(e, d)[0]
        if tail in steps:
            raise NotADisk("pattern boundary is pinched")
        steps[tail] = (e, d)
    if not steps:
        raise NotADisk("pattern has no boundary")
    start = min(steps)
    cycle = [steps[start]]
    head = c.edge_ends(*cycle[0])[1]
    while head != start:
        if head not in steps:
            raise NotADisk("pattern boundary does not close")
        cycle.append(steps[head])
        head = c.edge_ends(*steps[head])[1]
    if len(cycle) != len(c.boundary_edges):
        raise NotADisk("pattern boundary has several components")
    return tuple(cycle)


def make_rule(
    name: str,
    edge_splits: Mapping[str, Sequence[str]],
    tiles: Mapping[str, tuple[Sequence[str], Complex2D, Sequence[Sequence[int]]]],
) -> SubdivisionRule:
    """Validate raw rule data and derive per-pattern structure.

    Raises UnknownTileType, EdgeMismatch or NotADisk on inconsistencies.
    """
    splits = {k: tuple(v) for k, v in edge_splits.items()}
    for etype, subs in splits.items():
        if not subs:
            raise EdgeMismatch(f"edge type {etype!r} splits into nothing")
        for s in subs:
            if s not in splits:
                raise EdgeMismatch(
                    f"edge type {etype!r} splits into undefined type {s!r}"
                )
        if tuple(reversed(subs)) != subs:
            raise EdgeMismatch(
                f"edge type {etype!r} subdivision is not symmetric: "
                f"{list(subs)} read from the other end differs"
            )

    patterns: dict[str, TilePattern] = {}
    for tname, (boundary, pattern, boundary_map) in tiles.items():
        boundary = tuple(boundary)
        if len(boundary) < 2:
            raise NotADisk(f"tile {tname!r} needs at least two sides")
        for etype in boundary:
            if etype not in splits:
                raise EdgeMismatch(
                    f"tile {tname!r} uses undefined edge type {etype!r}"
                )
        if euler_characteristic(pattern) != 1:
            raise NotADisk(f"pattern of tile {tname!r} is not a disk")
        cycle = _face_direction_boundary(pattern)
        bmap = tuple(tuple(int(e) for e in side) for side in boundary_map)
        if len(bmap) != len(boundary):
            raise EdgeMismatch(
                f"tile {tname!r}: boundary map covers {len(bmap)} sides, "
                f"boundary has {len(boundary)}"
            )
        for i, side in enumerate(bmap):
            want = len(splits[boundary[i]])
            if len(side) != want:
                raise EdgeMismatch(
                    f"tile {tname!r} side {i}: {len(side)} sub-edges but "
                    f"edge type {boundary[i]!r} splits into {want}"
                )
        flat = [e for side in bmap for e in side]
        cycle_edges = [e for e, _ in cycle]
        if sorted(flat) != sorted(cycle_edges):
            raise EdgeMismatch(
                f"tile {tname!r}: boundary map does not cover the pattern "
                "boundary exactly once"
            )
        if flat[0] not in cycle_edges:
            raise EdgeMismatch(f"tile {tname!r}: bad boundary map start")
        off = cycle_edges.index(flat[0])
        rotated = cycle[off:] + cycle[:off]
        if [e for e, _ in rotated] != flat:
            raise EdgeMismatch(
                f"tile {tname!r}: boundary map does not follow the "
                "pattern boundary cycle"
            )
        side_steps: list[tuple[OrientedEdge, ...]] = []
        side_intermediates: list[tuple[int, ...]] = []
        corners: list[int] = []
        pos = 0
        for side in bmap:
            steps = rotated[pos : pos + len(side)]
            pos += len(side)
            side_steps.append(tuple(steps))
            corners.append(pattern.edge_ends(*steps[0])[0])
            side_intermediates.append(
                tuple(pattern.edge_ends(*st)[1] for st in steps[:-1])
            )
        boundary_vertices = {pattern.edge_ends(*st)[0] for st in rotated}
        interior = tuple(
            v for v in pattern.vertices if v not in boundary_vertices
        )
        patterns[tname] = TilePattern(
            name=tname,
            boundary=boundary,
            pattern=pattern,
            boundary_map=bmap,
            side_steps=tuple(side_steps),
            side_intermediates=tuple(side_intermediates),
            corners=tuple(corners),
            interior_vertices=interior,
        )

    rule = SubdivisionRule(name=name, edge_splits=splits, tiles=patterns)
    _check_closure_and_claims(rule)
    return rule


def _check_closure_and_claims(rule: SubdivisionRule) -> None:
    """Closure of tile types plus sub-edge type agreement.

    Every face of every pattern must carry a defined tile type whose
    polygon matches, and the edge types that neighbouring pattern faces
    will claim for the next stage must agree, both along interior edges
    and against the declared splits on the sides.
    """
    for tname, pat in rule.tiles.items():
        P = pat.pattern
        face_types: list[str] = []
        for f in range(len(P.faces)):
            ft = P.tile_types[f]
            if ft is None:
                raise UnknownTileType(
                    f"tile {tname!r}: pattern face {f} has no tile type"
                )
            if ft not in rule.tiles:
                raise UnknownTileType(
                    f"tile {tname!r}: pattern face {f} uses undefined "
                    f"tile type {ft!r}"
                )
            if len(P.faces[f]) != rule.tiles[ft].sides:
                raise EdgeMismatch(
                    f"tile {tname!r}: pattern face {f} has "
                    f"{len(P.faces[f])} sides but type {ft!r} expects "
                    f"{rule.tiles[ft].sides}"
                )
            face_types.append(ft)

        claims: dict[int, str] = {}

        def claim(edge: int, etype: str) -> None:
            prev = claims.setdefault(edge, etype)
            if prev != etype:
                raise EdgeMismatch(
                    f"tile {tname!r}: pattern edge {edge} claimed as both "
                    f"{prev!r} and {etype!r}"
                )

        for f, cycle in enumerate(P.faces):
            tb = rule.tiles[face_types[f]].boundary
            for i, (e, _) in enumerate(cycle):
                claim(e, tb[i])
        for i, side in enumerate(pat.boundary_map):
            subs = rule.edge_splits[pat.boundary[i]]
            for j, e in enumerate(side):
                claim(e, subs[j])


# ---------------------------------------------------------------------------
# built-in rules
# ---------------------------------------------------------------------------


def builtin_barycentric() -> SubdivisionRule:
    """Each triangle is coned from its barycenter: 6 triangles per tile,
    every edge split in half."""
    pattern = complex_from_face_vertices(
        [
            (0, 3, 6),
            (3, 1, 6),
            (1, 4, 6),
            (4, 2, 6),
            (2, 5, 6),
            (5, 0, 6),
        ],
        ["t"] * 6,
    )
    bmap = [
        [_edge_between(pattern, 0, 3), _edge_between(pattern, 3, 1)],
        [_edge_between(pattern, 1, 4), _edge_between(pattern, 4, 2)],
        [_edge_between(pattern, 2, 5), _edge_between(pattern, 5, 0)],
    ]
    return make_rule(
        "barycentric",
        {"e": ("e", "e")},
        {"t": (("e", "e", "e"), pattern, bmap)},
    )


def builtin_hexagonal() -> SubdivisionRule:
    """Each triangle splits into 4 by joining edge midpoints."""
    pattern = complex_from_face_vertices(
        [
            (0, 3, 5),
            (3, 1, 4),
            (3, 4, 5),
            (5, 4, 2),
        ],
        ["t"] * 4,
    )
    bmap = [
        [_edge_between(pattern, 0, 3), _edge_between(pattern, 3, 1)],
        [_edge_between(pattern, 1, 4), _edge_between(pattern, 4, 2)],
        [_edge_between(pattern, 2, 5), _edge_between(pattern, 5, 0)],
    ]
    return make_rule(
        "hexagonal",
        {"e": ("e", "e")},
        {"t": (("e", "e", "e"), pattern, bmap)},
    )


def builtin_rules() -> dict[str, SubdivisionRule]:
    return {
        "barycentric": builtin_barycentric(),
        "hexagonal": builtin_hexagonal(),
    }


def _edge_between(c: Complex2D, a: int, b: int) -> int:
    for e, (x, y) in enumerate(c.edges):
        if {x, y} == {a, b}:
            return e
    raise LookupError(f"no edge between {a} and {b}")


# ---------------------------------------------------------------------------
# applying a rule
# ---------------------------------------------------------------------------


def subdivide_with_maps(
    c: Complex2D, rule: SubdivisionRule
) -> tuple[Complex2D, SubdivisionMaps]:
    """Replace every face by its pattern and return ancestry maps.

    Original vertex ids survive; split vertices are numbered per edge in
    edge order, then pattern-interior vertices per face in face order, so
    repeated runs give identical complexes.
    """
    n_faces = len(c.faces)
    face_types: list[str] = []
    for f in range(n_faces):
        t = c.tile_types[f]
        if t is None:
            raise MissingTileType(f"face {f} has no tile type")
        if t not in rule.tiles:
            raise MissingTileType(
                f"face {f} has tile type {t!r} unknown to rule {rule.name!r}"
            )
        if len(c.faces[f]) != rule.tiles[t].sides:
            raise GluingFailure(
                f"face {f} has {len(c.faces[f])} sides but tile type "
                f"{t!r} expects {rule.tiles[t].sides}"
            )
        face_types.append(t)

    edge_type: dict[int, str] = {}
    for f, cycle in enumerate(c.faces):
        boundary = rule.tiles[face_types[f]].boundary
        for i, (e, _) in enumerate(cycle):
            t = boundary[i]
            prev = edge_type.setdefault(e, t)
            if prev != t:
                raise GluingFailure(
                    f"edge {e} claimed as type {prev!r} and {t!r} by "
                    "neighbouring faces"
                )

    next_vid = max(c.vertices) + 1
    new_edges: list[tuple[int, int]] = []
    edge_sub: list[tuple[int, ...]] = []
    edge_mid: list[tuple[int, ...]] = []
    for e, (a, b) in enumerate(c.edges):
        s = len(rule.edge_splits[edge_type[e]])
        mids = tuple(range(next_vid, next_vid + s - 1))
        next_vid += s - 1
        chain = (a,) + mids + (b,)
        ids = []
        for j in range(s):
            ids.append(len(new_edges))
            new_edges.append((chain[j], chain[j + 1]))
        edge_sub.append(tuple(ids))
        edge_mid.append(mids)

    new_faces: list[tuple[OrientedEdge, ...]] = []
    new_types: list[str | None] = []
    face_children: list[tuple[int, ...]] = []
    for f, cycle in enumerate(c.faces):
        pat = rule.tiles[face_types[f]]
        P = pat.pattern
        corners_here = c.face_vertices(f)
        vmap: dict[int, int] = {}
        # (new edge, pattern flag that maps to complex flag) per pattern edge
        emap: dict[int, tuple[int, bool, bool]] = {}
        for i, (e, d) in enumerate(cycle):
            vmap[pat.corners[i]] = corners_here[i]
            mids = edge_mid[e] if d else tuple(reversed(edge_mid[e]))
            for pv, nv in zip(pat.side_intermediates[i], mids):
                vmap[pv] = nv
            subs = edge_sub[e]
            s = len(subs)
            for j, (pe, pd) in enumerate(pat.side_steps[i]):
                se = subs[j] if d else subs[s - 1 - j]
                emap[pe] = (se, pd, d)
        for pv in pat.interior_vertices:
            vmap[pv] = next_vid
            next_vid += 1
        for pe, (pa, pb) in enumerate(P.edges):
            if pe in emap:
                continue
            emap[pe] = (len(new_edges), True, True)
            new_edges.append((vmap[pa], vmap[pb]))
        children = []
        for pf, pcycle in enumerate(P.faces):
            steps = []
            for pe, q in pcycle:
                se, pd, d = emap[pe]
                steps.append((se, d if q == pd else not d))
            children.append(len(new_faces))
            new_faces.append(tuple(steps))
            new_types.append(P.tile_types[pf])
        face_children.append(tuple(children))

    vertices = c.vertices + tuple(range(max(c.vertices) + 1, next_vid))
    out = build_complex(vertices, new_edges, new_faces, new_types)
    return out, SubdivisionMaps(
        face_children=tuple(face_children),
        edge_children=tuple(edge_sub),
    )


def subdivide(c: Complex2D, rule: SubdivisionRule) -> Complex2D:
    """Apply the rule once."""
    return subdivide_with_maps(c, rule)[0]


def subdivide_n(c: Complex2D, rule: SubdivisionRule, n: int) -> Complex2D:
    """Apply the rule ``n`` times (``n = 0`` returns the input)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    for _ in range(n):
        c = subdivide(c, rule)
    return c


def subdivide_marked(
    marking: RingMarking | QuadMarking,
    rule: SubdivisionRule,
    n: int = 1,
) -> RingMarking | QuadMarking:
    """Subdivide a marked complex, carrying the boundary marking along.

    Each marked arc is replaced by the sub-edges of its edges; ring
    provenance (parent face sets) is dropped, since the marking now refers
    to the subdivided complex itself.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    for _ in range(n):
        c = marking.complex
        new_c, maps = subdivide_with_maps(c, rule)
        if isinstance(marking, RingMarking):
            inner = [
                se for e in marking.inner_boundary for se in maps.edge_children[e]
            ]
            outer = [
                se for e in marking.outer_boundary for se in maps.edge_children[e]
            ]
            marking = mark_ring(new_c, inner, outer)
        else:
            arc_of: dict[int, str] = {}
            for name in ("top", "right", "bottom", "left"):
                for e in getattr(marking, name):
                    for se in maps.edge_children[e]:
                        arc_of[se] = name
            cycle = new_c.boundary_cycles[0]
            labels = [arc_of[e] for e in cycle]
            # rotate so no arc run wraps around the cycle seam
            start = next(
                i for i in range(len(cycle)) if labels[i] != labels[i - 1]
            )
            rotated = cycle[start:] + cycle[:start]
            arcs = {
                name: [e for e in rotated if arc_of[e] == name]
                for name in ("top", "right", "bottom", "left")
            }
            marking = mark_quad(
                new_c, arcs["top"], arcs["bottom"], arcs["left"], arcs["right"]
            )
    return marking


# ---------------------------------------------------------------------------
# valence growth
# ---------------------------------------------------------------------------


def classify_growth(
    rule: SubdivisionRule, c: Complex2D, v: int, stages: int
) -> GrowthClass:
    """Classify how the valence of ``v`` grows under repeated subdivision.

    Fits the measured post-subdivision valences to constant, affine and
    geometric integer models, in that order; if none matches exactly but
    the ratio stays above 1, the class is reported as exponential with the
    sequence attached.
    """
    if stages < 4:
        raise ValueError("need stages >= 4")
    if v in c.boundary_vertices or v not in c.vertex_set:
        raise NotInterior(f"vertex {v} is not interior")
    vals: list[int] = []
    cur = c
    for _ in range(stages):
        cur = subdivide(cur, rule)
        vals.append(len(cur.vertex_faces[v]))
    seq = tuple(vals)
    diffs = [b - a for a, b in zip(seq, seq[1:])]
    if all(d == 0 for d in diffs):
        return GrowthClass("bounded", multiplier=1.0, addend=0, valences=seq)
    if len(set(diffs)) == 1 and diffs[0] > 0:
        return GrowthClass(
            "linear", multiplier=None, addend=diffs[0], valences=seq
        )
    exact_ratio = all(
        seq[i + 1] * seq[0] == seq[i] * seq[1] for i in range(len(seq) - 1)
    )
    if exact_ratio and seq[1] > seq[0]:
        return GrowthClass(
            "exponential",
            multiplier=seq[1] / seq[0],
            addend=None,
            valences=seq,
        )
    if all(b > a for a, b in zip(seq, seq[1:])):
        return GrowthClass(
            "exponential", multiplier=None, addend=None, valences=seq
        )
    return GrowthClass("bounded", multiplier=None, addend=None, valences=seq)


# ---------------------------------------------------------------------------
# rule files
# ---------------------------------------------------------------------------

_RULE_FIELDS = {"name", "edge_types", "tile_types"}
_EDGE_TYPE_FIELDS = {"splits_into"}
_TILE_FIELDS = {"boundary", "pattern", "boundary_map", "base_corner"}


def rule_to_document(rule: SubdivisionRule) -> dict:
    return {
        "name": rule.name,
        "edge_types": {
            k: {"splits_into": list(v)} for k, v in rule.edge_splits.items()
        },
        "tile_types": {
            t: {
                "boundary": list(pat.boundary),
                "pattern": complex_to_document(pat.pattern),
                "boundary_map": [list(side) for side in pat.boundary_map],
            }
            for t, pat in rule.tiles.items()
        },
    }


def rule_from_document(doc: Mapping) -> SubdivisionRule:
    """Parse and validate a rule document.  Unknown fields are rejected."""
    if not isinstance(doc, Mapping):
        raise FormatError("rule document must be a JSON object")
    unknown = set(doc) - _RULE_FIELDS
    if unknown:
        raise FormatError(f"unknown rule fields: {sorted(unknown)}")
    for key in _RULE_FIELDS:
        if key not in doc:
            raise FormatError(f"missing rule field {key!r}")
    edge_splits: dict[str, tuple[str, ...]] = {}
    for etype, spec in doc["edge_types"].items():
        if set(spec) - _EDGE_TYPE_FIELDS:
            raise FormatError(f"unknown edge type fields in {etype!r}")
        edge_splits[str(etype)] = tuple(str(s) for s in spec["splits_into"])
    tiles: dict[str, tuple] = {}
    for tname, spec in doc["tile_types"].items():
        unknown = set(spec) - _TILE_FIELDS
        if unknown:
            raise FormatError(
                f"unknown tile fields in {tname!r}: {sorted(unknown)}"
            )
        for key in ("boundary", "pattern", "boundary_map"):
            if key not in spec:
                raise FormatError(f"tile {tname!r} missing field {key!r}")
        pattern, marking = complex_from_document(spec["pattern"])
        if marking is not None:
            raise FormatError(f"tile {tname!r} pattern must not be marked")
        boundary = [str(s) for s in spec["boundary"]]
        bmap = [list(side) for side in spec["boundary_map"]]
        base = int(spec.get("base_corner", 0))
        if not 0 <= base < len(boundary):
            raise FormatError(f"tile {tname!r} base_corner out of range")
        if base:
            boundary = boundary[base:] + boundary[:base]
            bmap = bmap[base:] + bmap[:base]
        tiles[str(tname)] = (boundary, pattern, bmap)
    return make_rule(str(doc["name"]), edge_splits, tiles)


def load_rule(source: str | Mapping) -> SubdivisionRule:
    """Load a rule from a JSON document or a file path."""
    if isinstance(source, Mapping):
        return rule_from_document(source)
    with open(source, "r", encoding="utf-8") as fh:
        return rule_from_document(json.load(fh))


def dump_rule(rule: SubdivisionRule, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rule_to_document(rule), fh, separators=(",", ":"))
        fh.write("\n")
