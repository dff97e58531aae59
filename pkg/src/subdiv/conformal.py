"""Conformality machinery: test quadrilaterals, layering, axiom probes.

The 1,2,3-tile criterion asks for a uniform positive lower bound on the
modulus of every quadrilateral formed from one tile, two tiles sharing an
edge, or three tiles whose middle is a triangle.  Such a bound M, together
with the largest area A a single tile can carry under the combined optimal
weightings, bounds the modulus of the star of a curve below by M/(A k).

Layering adds moduli of disjoint nested annuli; the probes track how those
bounds evolve across subdivision stages.  Probe verdicts are empirical
observations over the examined stages, not proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .complex2d import (
    Complex2D,
    QuadMarking,
    RingMarking,
    canonical_form,
    complex_from_face_vertices,
    extract_vertex_annulus,
    face_subcomplex,
    mark_quad,
)
from .errors import (
    NonPositive,
    NotNested,
    Overlapping,
    ValidationError,
)
from .modulus import Mode, ModulusResult, modulus_inf, modulus_sup
from .rules import (
    SubdivisionRule,
    subdivide_marked,
    subdivide_with_maps,
)

DEFAULT_TOL = 1e-7


@dataclass(frozen=True)
class TestQuadrilateral:
    """A 1-, 2- or 3-tile quadrilateral with single-edge ends.

    ``faces`` are ids in the complex the quad was enumerated from (or in
    its own complex for rule-generated quads); the marking lives on the
    standalone quad complex.
    """

    kind: str  # "I" | "II" | "III"
    faces: tuple[int, ...]
    interior_edges: tuple[int, ...]
    marking: QuadMarking

    @property
    def complex(self) -> Complex2D:
        return self.marking.complex


@dataclass(frozen=True)
class QuadOutcome:
    """Solver values of one test quadrilateral per subdivision level."""

    quad: TestQuadrilateral
    values: dict[int, float]
    max_tile_area: dict[int, float]


@dataclass(frozen=True)
class CriterionReport:
    """Outcome of the 1,2,3-tile criterion on finitely many levels."""

    rule_name: str
    mode: Mode
    levels: tuple[int, ...]
    quad_count: int
    minimum: float
    max_tile_area: float
    per_kind_min: dict[str, float]
    per_level_min: dict[int, float]
    per_level_monotone: bool
    outcomes: tuple[QuadOutcome, ...] = field(repr=False, default=())

    def to_document(self) -> dict:
        return {
            "rule": self.rule_name,
            "mode": self.mode.value,
            "levels": list(self.levels),
            "quad_count": self.quad_count,
            "minimum": self.minimum,
            "max_tile_area": self.max_tile_area,
            "per_kind_min": dict(sorted(self.per_kind_min.items())),
            "per_level_min": {
                str(k): v for k, v in sorted(self.per_level_min.items())
            },
            "per_level_monotone": self.per_level_monotone,
        }


@dataclass(frozen=True)
class LayerEstimate:
    """Lower bound for a big annulus from disjoint nested sub-annuli."""

    moduli: tuple[float, ...]
    bound: float
    vertex: int | None = None
    stages: tuple[int, ...] = ()

    def to_document(self) -> dict:
        return {
            "moduli": list(self.moduli),
            "bound": self.bound,
            "vertex": self.vertex,
            "stages": list(self.stages),
        }


@dataclass(frozen=True)
class AxiomReport:
    """Per-stage moduli with the derived verdict for one axiom probe.

    The verdict is a pure function of the recorded moduli (and threshold),
    recomputable from the serialized report.
    """

    axiom: int
    mode: Mode
    stages: tuple[int, ...]
    moduli: tuple
    layer_bounds: tuple[float, ...]
    threshold: float | None
    verdict: dict

    def to_document(self) -> dict:
        return {
            "axiom": self.axiom,
            "mode": self.mode.value,
            "stages": list(self.stages),
            "moduli": [
                list(m) if isinstance(m, tuple) else m for m in self.moduli
            ],
            "layer_bounds": list(self.layer_bounds),
            "threshold": self.threshold,
            "verdict": dict(self.verdict),
        }


# ---------------------------------------------------------------------------
# test quadrilaterals
# ---------------------------------------------------------------------------


def _single_edge_end_markings(
    sub: Complex2D,
) -> list[tuple[int, int, QuadMarking]]:
    """All (top edge, bottom edge, marking) choices with single-edge ends."""
    cycle = sub.boundary_cycles[0]
    n = len(cycle)
    out = []
    for p in range(n):
        for q in range(p + 1, n):
            gap1 = q - p - 1
            gap2 = n - (q - p) - 1
            if gap1 < 1 or gap2 < 1:
                continue
            right = [cycle[(p + 1 + j) % n] for j in range(gap1)]
            left = [cycle[(q + 1 + j) % n] for j in range(gap2)]
            marking = mark_quad(sub, [cycle[p]], [cycle[q]], left, right)
            out.append((cycle[p], cycle[q], marking))
    return out


def _edge_markings_meeting(
    sub: Complex2D, required: frozenset[int]
) -> list[tuple[int, int, QuadMarking]]:
    out = []
    for e_top, e_bot, marking in _single_edge_end_markings(sub):
        if (
            set(sub.edges[e_top]) & required
            and set(sub.edges[e_bot]) & required
        ):
            out.append((e_top, e_bot, marking))
    return out


def enumerate_test_quads(c: Complex2D) -> list[TestQuadrilateral]:
    """All test quadrilaterals supported by the tiles of ``c``.

    Type I: one tile, any two of its edges with room for nonempty sides.
    Type II: two tiles meeting in exactly one edge ``f``; ends meet ``f``.
    Type III: a triangle flanked by two tiles that meet each other in a
    single vertex ``v``; the top contains ``v``, the bottom is the
    triangle's free edge.  All end choices are enumerated; duplicates are
    removed by canonical form of the marked quad.
    """
    quads: dict[str, TestQuadrilateral] = {}

    def keep(q: TestQuadrilateral) -> None:
        key = q.kind + canonical_form(q.complex, q.marking)
        quads.setdefault(key, q)

    # Type I
    for f in range(len(c.faces)):
        sub = face_subcomplex(c, [f])
        for _, _, marking in _single_edge_end_markings(sub.complex):
            keep(
                TestQuadrilateral(
                    kind="I", faces=(f,), interior_edges=(), marking=marking
                )
            )

    # Type II
    for e, fs in enumerate(c.edge_face_ids):
        if len(fs) != 2 or fs[0] == fs[1]:
            continue
        t1, t2 = fs
        shared_edges = [
            ee
            for ee, efs in enumerate(c.edge_face_ids)
            if set(efs) == {t1, t2}
        ]
        if shared_edges != [e]:
            continue
        sub = face_subcomplex(c, [t1, t2])
        required = frozenset(sub.complex.edges[sub.edge_map[e]])
        for _, _, marking in _edge_markings_meeting(sub.complex, required):
            keep(
                TestQuadrilateral(
                    kind="II",
                    faces=(t1, t2),
                    interior_edges=(e,),
                    marking=marking,
                )
            )

    # Type III
    for t2 in range(len(c.faces)):
        if len(c.faces[t2]) != 3:
            continue
        sides = [e for e, _ in c.faces[t2]]
        for a_pos in range(3):
            for c_pos in range(3):
                if a_pos == c_pos:
                    continue
                fa, fc = sides[a_pos], sides[c_pos]
                fb = sides[3 - a_pos - c_pos]
                t1 = _other_face(c, fa, t2)
                t3 = _other_face(c, fc, t2)
                if t1 is None or t3 is None or t1 == t3 or t1 == t2 or t3 == t2:
                    continue
                if t1 > t3:
                    continue  # unordered flank pair
                shared_vs = set(c.face_vertices(t1)) & set(c.face_vertices(t3))
                v_set = set(c.edges[fa]) & set(c.edges[fc])
                if len(v_set) != 1 or shared_vs != v_set:
                    continue
                if _shared_edges(c, t1, t3):
                    continue
                if _shared_edges(c, t1, t2) != [fa] or _shared_edges(
                    c, t2, t3
                ) != [fc]:
                    continue
                v = next(iter(v_set))
                sub = face_subcomplex(c, [t1, t2, t3])
                sv = v
                bottom_sub = sub.edge_map[fb]
                boundary = sub.complex.boundary_cycles[0]
                tops = [
                    e
                    for e in boundary
                    if sv in sub.complex.edges[e] and e != bottom_sub
                ]
                for e_top in tops:
                    marking = _marking_for_ends(
                        sub.complex, e_top, bottom_sub
                    )
                    if marking is None:
                        continue
                    keep(
                        TestQuadrilateral(
                            kind="III",
                            faces=(t1, t2, t3),
                            interior_edges=(fa, fc),
                            marking=marking,
                        )
                    )
    return sorted(
        quads.values(), key=lambda q: (q.kind, q.faces, q.interior_edges)
    )


def _other_face(c: Complex2D, edge: int, face: int) -> int | None:
    fs = c.edge_face_ids[edge]
    others = [f for f in fs if f != face]
    return others[0] if len(fs) == 2 and others else None


def _shared_edges(c: Complex2D, f1: int, f2: int) -> list[int]:
    return [
        e for e, fs in enumerate(c.edge_face_ids) if set(fs) == {f1, f2}
    ]


def _marking_for_ends(
    sub: Complex2D, e_top: int, e_bot: int
) -> QuadMarking | None:
    cycle = sub.boundary_cycles[0]
    n = len(cycle)
    p = cycle.index(e_top)
    q = cycle.index(e_bot)
    if p > q:
        p, q = q, p
        e_top, e_bot = e_bot, e_top
        swapped = True
    else:
        swapped = False
    gap1 = q - p - 1
    gap2 = n - (q - p) - 1
    if gap1 < 1 or gap2 < 1:
        return None
    right = [cycle[(p + 1 + j) % n] for j in range(gap1)]
    left = [cycle[(q + 1 + j) % n] for j in range(gap2)]
    if swapped:
        return mark_quad(sub, [e_bot], [e_top], right, left)
    return mark_quad(sub, [e_top], [e_bot], left, right)


# ---------------------------------------------------------------------------
# rule-generated test quads and the criterion
# ---------------------------------------------------------------------------


def _polygon_complex(rule: SubdivisionRule, tname: str) -> Complex2D:
    m = rule.tiles[tname].sides
    return complex_from_face_vertices([tuple(range(m))], [tname])


def _glued_pair(
    rule: SubdivisionRule, x: str, i: int, y: str, j: int
) -> Complex2D | None:
    """Tile of type ``x`` with a ``y`` tile glued along side ``i``/``j``."""
    if rule.tiles[x].boundary[i] != rule.tiles[y].boundary[j]:
        return None
    mx = rule.tiles[x].sides
    my = rule.tiles[y].sides
    vy = [0] * my
    vy[j] = (i + 1) % mx
    vy[(j + 1) % my] = i
    fresh = mx
    for t in range(my):
        if t in (j, (j + 1) % my):
            continue
        vy[t] = fresh
        fresh += 1
    return complex_from_face_vertices(
        [tuple(range(mx)), tuple(vy)], [x, y]
    )


def rule_test_quads(rule: SubdivisionRule) -> list[TestQuadrilateral]:
    """Abstract test quadrilaterals over the rule's tile types.

    All edge-type-compatible gluings of one, two or three model polygons
    are formed, marked in every admissible way, and deduplicated by
    canonical form.
    """
    names = sorted(rule.tiles)
    quads: dict[str, TestQuadrilateral] = {}

    def keep(q: TestQuadrilateral) -> None:
        key = q.kind + canonical_form(q.complex, q.marking)
        quads.setdefault(key, q)

    for x in names:
        cx = _polygon_complex(rule, x)
        for q in enumerate_test_quads(cx):
            keep(q)
    for x in names:
        for y in names:
            for i in range(rule.tiles[x].sides):
                for j in range(rule.tiles[y].sides):
                    c2 = _glued_pair(rule, x, i, y, j)
                    if c2 is None:
                        continue
                    for q in enumerate_test_quads(c2):
                        if q.kind == "II":
                            keep(q)
    for y in names:
        if rule.tiles[y].sides != 3:
            continue
        for x in names:
            for z in names:
                for a_pos in range(3):
                    for c_pos in range(3):
                        if a_pos == c_pos:
                            continue
                        for kx in range(rule.tiles[x].sides):
                            for kz in range(rule.tiles[z].sides):
                                c3 = _glued_triple(
                                    rule, y, x, a_pos, kx, z, c_pos, kz
                                )
                                if c3 is None:
                                    continue
                                for q in enumerate_test_quads(c3):
                                    if q.kind == "III":
                                        keep(q)
    return sorted(
        quads.values(), key=lambda q: (q.kind, q.faces, q.interior_edges)
    )


def _glued_triple(
    rule: SubdivisionRule,
    y: str,
    x: str,
    a_pos: int,
    kx: int,
    z: str,
    c_pos: int,
    kz: int,
) -> Complex2D | None:
    """Triangle ``y`` flanked by ``x`` (side ``a_pos``) and ``z`` (``c_pos``),
    glued along their sides ``kx`` and ``kz``."""
    ty = rule.tiles[y]
    faces: list[tuple[int, ...]] = [(0, 1, 2)]
    types = [y]
    fresh = 3
    for (side, tt, k) in ((a_pos, x, kx), (c_pos, z, kz)):
        tile = rule.tiles[tt]
        if tile.boundary[k] != ty.boundary[side]:
            return None
        m = tile.sides
        vv = [0] * m
        vv[k] = (side + 1) % 3
        vv[(k + 1) % m] = side
        for t in range(m):
            if t in (k, (k + 1) % m):
                continue
            vv[t] = fresh
            fresh += 1
        faces.append(tuple(vv))
        types.append(tt)
    return complex_from_face_vertices(faces, types)


def criterion_123(
    rule: SubdivisionRule,
    levels: int,
    mode: Mode = Mode.VERTEX,
    tol: float = DEFAULT_TOL,
) -> CriterionReport:
    """Evaluate the 1,2,3-tile criterion over ``levels`` subdivisions.

    Each abstract test quadrilateral is subdivided 1..levels times and its
    modulus computed; the report collects the minimum M, the per-kind and
    per-level minima, and a worst-case bound for the area a single tile
    can carry when the per-quad optimal weightings (each normalized to
    unit area) are superimposed.
    """
    if levels < 1:
        raise NonPositive("levels must be >= 1")
    mode = Mode(mode)
    quads = rule_test_quads(rule)
    outcomes: list[QuadOutcome] = []
    for quad in quads:
        values: dict[int, float] = {}
        areas: dict[int, float] = {}
        marking = quad.marking
        for level in range(1, levels + 1):
            marking = subdivide_marked(marking, rule)
            result = modulus_sup(marking, mode, tol)
            values[level] = result.value
            areas[level] = _max_tile_area(marking, result, mode)
        outcomes.append(
            QuadOutcome(quad=quad, values=values, max_tile_area=areas)
        )
    per_kind: dict[str, float] = {}
    per_level: dict[int, float] = {}
    for oc in outcomes:
        for level, val in oc.values.items():
            per_level[level] = min(per_level.get(level, math.inf), val)
            per_kind[oc.quad.kind] = min(
                per_kind.get(oc.quad.kind, math.inf), val
            )
    minimum = min(per_level.values()) if per_level else math.inf
    a_max = 0.0
    for level in range(1, levels + 1):
        total = sum(math.sqrt(oc.max_tile_area[level]) for oc in outcomes)
        a_max = max(a_max, total * total)
    level_list = sorted(per_level)
    monotone = all(
        per_level[level_list[i]] >= per_level[level_list[i + 1]]
        for i in range(len(level_list) - 1)
    ) or all(
        per_level[level_list[i]] <= per_level[level_list[i + 1]]
        for i in range(len(level_list) - 1)
    )
    return CriterionReport(
        rule_name=rule.name,
        mode=mode,
        levels=tuple(range(1, levels + 1)),
        quad_count=len(quads),
        minimum=minimum,
        max_tile_area=a_max,
        per_kind_min=per_kind,
        per_level_min=per_level,
        per_level_monotone=monotone,
        outcomes=tuple(outcomes),
    )


def _max_tile_area(
    marking: QuadMarking, result: ModulusResult, mode: Mode
) -> float:
    """Largest per-tile area under the unit-area normalization."""
    total = result.optimal_weights.area()
    if total <= 0:
        raise NonPositive("optimal weighting has zero area")
    c = marking.complex
    worst = 0.0
    if mode is Mode.VERTEX:
        for f in range(len(c.faces)):
            s = sum(
                result.optimal_weights.get(v) ** 2
                for v in c.face_vertices(f)
            )
            worst = max(worst, s)
    else:
        for f in range(len(c.faces)):
            worst = max(worst, result.optimal_weights.get(f) ** 2)
    return worst / total


def star_alpha_bound(minimum: float, max_tile_area: float, k: int) -> float:
    """Lower bound M/(A k) for the modulus of a k-tile star annulus."""
    if minimum <= 0 or max_tile_area <= 0 or k < 1:
        raise NonPositive("need M > 0, A > 0 and k >= 1")
    return minimum / (max_tile_area * k)


def vertex_modulus_bound(report, constant: float) -> float:
    """Lower bound C/valence for annuli containing a vertex star."""
    if constant <= 0:
        raise NonPositive("need C > 0")
    if report.valence < 1:
        raise NonPositive("valence must be >= 1")
    return constant / report.valence


# ---------------------------------------------------------------------------
# layering
# ---------------------------------------------------------------------------


def layer_bound(
    entries: Sequence[tuple[RingMarking, float]],
    *,
    vertex: int | None = None,
    stages: Iterable[int] = (),
) -> LayerEstimate:
    """Sum the moduli of disjoint nested annuli into a lower bound.

    All rings must carry provenance in the same parent complex; their face
    sets must be pairwise disjoint and nested: each ring together with its
    core disk must lie inside the next ring's core disk.
    """
    if not entries:
        raise NotNested("no annuli supplied")
    rings = [r for r, _ in entries]
    for r in rings:
        if r.parent is None or r.parent_faces is None or r.core_faces is None:
            raise NotNested("ring lacks provenance in a parent complex")
    parent = rings[0].parent
    for r in rings[1:]:
        if r.parent is not parent:
            raise NotNested("rings live in different parent complexes")
    order = sorted(range(len(rings)), key=lambda i: len(rings[i].core_faces))
    for ai in range(len(order)):
        for bi in range(ai + 1, len(order)):
            a, b = rings[order[ai]], rings[order[bi]]
            if a.parent_faces & b.parent_faces:
                raise Overlapping(
                    "annuli share faces in the parent complex"
                )
    for ai in range(len(order) - 1):
        a, b = rings[order[ai]], rings[order[ai + 1]]
        if not (a.core_faces | a.parent_faces) <= b.core_faces:
            raise NotNested(
                "each annulus (with its core) must sit inside the next core"
            )
    moduli = tuple(float(m) for _, m in entries)
    return LayerEstimate(
        moduli=moduli,
        bound=sum(moduli),
        vertex=vertex,
        stages=tuple(stages),
    )


# ---------------------------------------------------------------------------
# axiom probes
# ---------------------------------------------------------------------------


def evaluate_axiom_verdict(
    axiom: int, moduli: Sequence, threshold: float | None = None
) -> dict:
    """Pure verdict computation from recorded per-stage values."""
    if axiom == 0:
        values = [float(m) for m in moduli]
        return {"infimum": min(values)}
    if axiom == 1:
        flat = [float(x) for pair in moduli for x in pair]
        low, high = min(flat), max(flat)
        return {"r": low, "K": high / low if low > 0 else math.inf}
    if axiom == 2:
        values = [float(m) for m in moduli]
        bounds = []
        acc = 0.0
        for v in values:
            acc += v
            bounds.append(acc)
        achieved = None
        if threshold is not None:
            for i, b in enumerate(bounds):
                if b > threshold:
                    achieved = i + 1
                    break
        return {
            "best_bound": bounds[-1] if bounds else 0.0,
            "threshold": threshold,
            "achieved_at_stage": achieved,
        }
    raise ValidationError(f"unknown axiom {axiom}")


def axiom_probe(
    rule: SubdivisionRule,
    c: Complex2D,
    *,
    axiom: int,
    stages: int,
    vertex: int | None = None,
    ring: RingMarking | None = None,
    mode: Mode = Mode.VERTEX,
    tol: float = DEFAULT_TOL,
    threshold: float | None = None,
) -> AxiomReport:
    """Empirically probe one of the axioms across subdivision stages.

    Axiom 0 and 2 probes track the annulus between the first and second
    iterated stars of ``vertex``, re-extracted at every stage; the axiom 2
    probe also layers the (disjoint, nested) per-stage annuli into a
    growing lower bound compared against ``threshold``.  The axiom 1 probe
    follows a fixed marked ring and records both moduli per stage.  A
    passing probe is evidence over the examined stages, not a proof.
    """
    if stages < 2:
        raise NonPositive("need stages >= 2")
    mode = Mode(mode)
    if axiom in (0, 2):
        if vertex is None:
            raise ValidationError("vertex probes need a vertex")
        current = c
        maps_chain = []
        collected: list[tuple[int, RingMarking, float]] = []
        for stage in range(1, stages + 1):
            current, maps = subdivide_with_maps(current, rule)
            maps_chain.append(maps.face_children)
            ringm = extract_vertex_annulus(current, vertex, 1, 2)
            value = modulus_inf(ringm, mode, tol).value
            collected.append((stage, ringm, value))
        lifted: list[tuple[RingMarking, float]] = []
        for stage, ringm, value in collected:
            lift = ringm
            for face_map in maps_chain[stage:]:
                lift = lift.lifted(face_map, current)
            lifted.append((lift, value))
        moduli = tuple(v for _, _, v in collected)
        stage_ids = tuple(s for s, _, _ in collected)
        if axiom == 2:
            estimate = layer_bound(lifted, vertex=vertex, stages=stage_ids)
            bounds = []
            acc = 0.0
            for v in estimate.moduli:
                acc += v
                bounds.append(acc)
            layer_bounds = tuple(bounds)
        else:
            layer_bounds = ()
        verdict = evaluate_axiom_verdict(axiom, moduli, threshold)
        return AxiomReport(
            axiom=axiom,
            mode=mode,
            stages=stage_ids,
            moduli=moduli,
            layer_bounds=layer_bounds,
            threshold=threshold,
            verdict=verdict,
        )
    if axiom == 1:
        if ring is None:
            raise ValidationError("the axiom 1 probe needs a marked ring")
        pairs: list[tuple[float, float]] = []
        marking = ring
        stage_ids = []
        for stage in range(stages + 1):
            lo = modulus_inf(marking, mode, tol).value
            hi = modulus_sup(marking, mode, tol).value
            pairs.append((lo, hi))
            stage_ids.append(stage)
            if stage < stages:
                marking = subdivide_marked(marking, rule)
        verdict = evaluate_axiom_verdict(1, pairs)
        return AxiomReport(
            axiom=1,
            mode=mode,
            stages=tuple(stage_ids),
            moduli=tuple(pairs),
            layer_bounds=(),
            threshold=None,
            verdict=verdict,
        )
    raise ValidationError(f"unknown axiom {axiom}")
