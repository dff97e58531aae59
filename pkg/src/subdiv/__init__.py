"""Tilings from finite subdivision rules, combinatorial modulus of rings
and quadrilaterals, conformality probes, and circle-packing rendering."""

__version__ = "0.1.0"

from .complex2d import (  # noqa: F401
    Complex2D,
    QuadMarking,
    RingMarking,
    ValenceReport,
    adjacency_graph,
    blow_up_vertices,
    build_complex,
    canonical_form,
    complex_from_document,
    complex_from_face_vertices,
    complex_to_document,
    dual_tiling,
    dump_complex,
    euler_characteristic,
    extract_vertex_annulus,
    load_complex,
    mark_quad,
    mark_ring,
    star,
    valence_report,
)
from .rules import (  # noqa: F401
    GrowthClass,
    SubdivisionRule,
    TilePattern,
    builtin_barycentric,
    builtin_hexagonal,
    builtin_rules,
    classify_growth,
    load_rule,
    rule_from_document,
    rule_to_document,
    subdivide,
    subdivide_n,
    subdivide_with_maps,
)
from .modulus import (  # noqa: F401
    Mode,
    ModulusResult,
    PathConstraint,
    WeightFunction,
    area,
    brute_force_modulus,
    circumference,
    fat_skinny_gap,
    height,
    modulus_inf,
    modulus_sup,
)
from .conformal import (  # noqa: F401
    AxiomReport,
    CriterionReport,
    LayerEstimate,
    TestQuadrilateral,
    axiom_probe,
    criterion_123,
    enumerate_test_quads,
    evaluate_axiom_verdict,
    layer_bound,
    rule_test_quads,
    star_alpha_bound,
    vertex_modulus_bound,
)
