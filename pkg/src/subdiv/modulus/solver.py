"""Cutting-plane computation of the approximate moduli of rings and quads.

Both moduli reduce, by scale invariance, to  min area  subject to every
relevant path having length at least 1:

* sup-form (height based): constrain connecting paths; the modulus is
  1 / (minimal area).
* inf-form (circumference based, rings only): constrain essential loops;
  the modulus is the minimal area itself.

Constraints are generated lazily: solve the restricted program, query the
shortest violating path (Dijkstra, or the cyclic-cover loop search), stop
once the shortest path is within tolerance of 1.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Callable

from ..complex2d import QuadMarking, RingMarking
from ..errors import IterationLimit, NoPath, NotARing, SolverError
from .cutting import EssentialLoopFinder
from .graphs import Marked, carrier_graph, check_carrier, shortest_connecting
from .qp import min_area_weights
from .types import Mode, ModulusResult, PathConstraint, WeightFunction

DEFAULT_TOL = 1e-7
MAX_ITERATIONS = 10_000


def height(marked: Marked, w: WeightFunction, mode: Mode) -> float:
    """Least weight of a path connecting the two marked boundaries."""
    mode = Mode(mode)
    check_carrier(w, mode)
    graph = carrier_graph(marked, mode)
    return shortest_connecting(graph, w.weights)[0]


def circumference(ring: RingMarking, w: WeightFunction, mode: Mode) -> float:
    """Least weight of an essential loop of the ring."""
    if not isinstance(ring, RingMarking):
        raise NotARing("circumference needs a ring marking")
    mode = Mode(mode)
    check_carrier(w, mode)
    finder = EssentialLoopFinder(ring, mode)
    return finder.shortest_loop(w.weights)[0]


def modulus_sup(
    marked: Marked,
    mode: Mode,
    tol: float = DEFAULT_TOL,
    *,
    max_iterations: int = MAX_ITERATIONS,
) -> ModulusResult:
    """Height-based modulus sup H^2/A via the normalized program."""
    mode = Mode(mode)
    graph = carrier_graph(marked, mode)
    if not graph.sources or not graph.targets:
        raise NoPath("a marked boundary touches no carrier")

    def separate(weights: dict[int, float]) -> tuple[float, tuple[int, ...]]:
        return shortest_connecting(graph, weights)

    area, result = _cutting_plane(
        nodes=graph.nodes,
        separate=separate,
        kind="connecting",
        mode=mode,
        tol=tol,
        max_iterations=max_iterations,
    )
    return _finish(result, value=1.0 / area)


def modulus_inf(
    ring: RingMarking,
    mode: Mode,
    tol: float = DEFAULT_TOL,
    *,
    max_iterations: int = MAX_ITERATIONS,
) -> ModulusResult:
    """Circumference-based modulus inf A/C^2 via the normalized program."""
    if not isinstance(ring, RingMarking):
        raise NotARing("modulus_inf needs a ring marking")
    mode = Mode(mode)
    finder = EssentialLoopFinder(ring, mode)

    def separate(weights: dict[int, float]) -> tuple[float, tuple[int, ...]]:
        return finder.shortest_loop(weights)

    nodes = (
        ring.complex.vertices
        if mode is Mode.VERTEX
        else tuple(range(len(ring.complex.faces)))
    )
    area, result = _cutting_plane(
        nodes=nodes,
        separate=separate,
        kind="essential-loop",
        mode=mode,
        tol=tol,
        max_iterations=max_iterations,
    )
    return _finish(result, value=area)


def fat_skinny_gap(quad: QuadMarking, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Height-based modulus of a quad in fat and in skinny mode.

    Fat chains admit more connecting paths, so the fat value never exceeds
    the skinny one; a strict gap flags degeneracy at high-valence vertices.
    """
    fat = modulus_sup(quad, Mode.FAT, tol)
    skinny = modulus_sup(quad, Mode.SKINNY, tol)
    return fat.value, skinny.value


def _cutting_plane(
    *,
    nodes: tuple[int, ...],
    separate: Callable[[dict[int, float]], tuple[float, tuple[int, ...]]],
    kind: str,
    mode: Mode,
    tol: float,
    max_iterations: int,
) -> tuple[float, ModulusResult]:
    index = {node: i for i, node in enumerate(nodes)}
    n = len(nodes)
    constraints: list[tuple[int, ...]] = []
    seen: set[frozenset[int]] = set()
    weights: dict[int, float] = {node: 0.0 for node in nodes}
    rho = None
    active: list[int] = []
    area = 0.0
    history: list[float] = []
    iterations = 0
    residual = 1.0
    while True:
        length, path = separate(weights)
        residual = 1.0 - length
        if length == float("inf"):
            if not constraints:
                raise NoPath(f"no {kind} path exists")
            raise SolverError("separation lost the path family")
        if length >= 1.0 - tol:
            break
        if iterations >= max_iterations:
            raise IterationLimit(
                f"no convergence after {iterations} iterations "
                f"(shortest {kind} length {length:.6g})"
            )
        members = frozenset(path)
        if members in seen:
            raise IterationLimit(
                f"separation repeated a {kind} constraint without progress"
            )
        seen.add(members)
        constraints.append(tuple(sorted(index[x] for x in members)))
        rho, active = min_area_weights(constraints, n)
        new_area = float(rho @ rho)
        if history and new_area < history[-1] - 1e-9 * max(1.0, history[-1]):
            raise SolverError("cutting-plane objective decreased")
        area = new_area
        history.append(area)
        weights = {node: float(rho[i]) for i, node in enumerate(nodes)}
        iterations += 1
    if rho is None or area <= 0.0:
        raise SolverError("optimum collapsed to zero area")
    certificate = tuple(
        PathConstraint(
            carriers=frozenset(nodes[i] for i in constraints[j]), kind=kind
        )
        for j in active
    )
    result = ModulusResult(
        value=0.0,  # patched by _finish
        optimal_weights=WeightFunction(mode.carrier, weights),
        certificate=certificate,
        iterations=iterations,
        residual=residual,
        mode=mode,
        objective_history=tuple(history),
    )
    return area, result


def _finish(result: ModulusResult, value: float) -> ModulusResult:
    return replace(result, value=value)
