"""Brute-force modulus oracle for small instances.

Enumerates the complete family of minimal connecting carrier sets (or
essential loop sets) and solves the full quadratic program over all of
them at once, using a self-contained active-set solver.  This provides an
independent check on the lazily separated cutting-plane solver: the two
share neither path generation nor the quadratic-program implementation.
"""

from __future__ import annotations

import numpy as np

from ..complex2d import RingMarking
from ..errors import NoPath, NotARing, SolverError, TooLarge
from .cutting import EssentialLoopFinder
from .graphs import CarrierGraph, Marked, carrier_graph
from .types import Mode, ModulusResult, PathConstraint, WeightFunction

DEFAULT_CARRIER_BOUND = 14
_PATH_CAP = 500_000


def brute_force_modulus(
    marked: Marked,
    mode: Mode,
    *,
    which: str = "sup",
    carrier_bound: int = DEFAULT_CARRIER_BOUND,
) -> ModulusResult:
    """Exact modulus by full enumeration plus a dense quadratic program.

    ``which`` selects the height-based ("sup") or circumference-based
    ("inf") modulus.  Instances with more than ``carrier_bound`` carriers
    are rejected with :class:`TooLarge`.
    """
    mode = Mode(mode)
    if which not in ("sup", "inf"):
        raise SolverError(f"unknown modulus kind {which!r}")
    graph = carrier_graph(marked, mode)
    n = len(graph.nodes)
    if n > carrier_bound:
        raise TooLarge(f"{n} carriers exceed the bound {carrier_bound}")
    if which == "sup":
        families = minimal_connecting_sets(graph)
        kind = "connecting"
    else:
        if not isinstance(marked, RingMarking):
            raise NotARing("inf modulus needs a ring marking")
        families = minimal_essential_loop_sets(marked, mode)
        kind = "essential-loop"
    if not families:
        raise NoPath(f"no {kind} families exist")
    index = {node: i for i, node in enumerate(graph.nodes)}
    rows = sorted(tuple(sorted(index[x] for x in fam)) for fam in families)
    G = np.zeros((len(rows), n))
    for j, row in enumerate(rows):
        G[j, list(row)] = 1.0
    rho, active = _least_distance(G)
    area = float(rho @ rho)
    if area <= 0:
        raise SolverError("zero-area optimum in the oracle")
    lengths = G @ rho
    residual = float(1.0 - lengths.min())
    weights = {node: float(rho[i]) for i, node in enumerate(graph.nodes)}
    certificate = tuple(
        PathConstraint(
            carriers=frozenset(graph.nodes[i] for i in rows[j]), kind=kind
        )
        for j in active
    )
    value = 1.0 / area if which == "sup" else area
    return ModulusResult(
        value=value,
        optimal_weights=WeightFunction(mode.carrier, weights),
        certificate=certificate,
        iterations=1,
        residual=residual,
        mode=mode,
        objective_history=(area,),
    )


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def minimal_connecting_sets(graph: CarrierGraph) -> list[frozenset[int]]:
    """All minimal carrier sets of paths joining the marked boundaries.

    Minimal sets arise from induced (chordless) simple paths that touch
    the source set only at the start and the target set only at the end;
    remaining supersets are pruned afterwards.
    """
    sets: set[frozenset[int]] = set()
    sources = graph.sources
    targets = graph.targets
    for s in sorted(sources):
        if s in targets:
            sets.add(frozenset([s]))

    def extend(path: list[int], members: set[int]) -> None:
        if len(sets) > _PATH_CAP:
            raise TooLarge("too many connecting families")
        last = path[-1]
        interior = path[1:-1]
        for x in graph.neighbors[last]:
            if x in members or x in sources:
                continue
            if any(x in graph.neighbors[p] for p in path[:-1]):
                continue
            if x in targets:
                sets.add(frozenset(members | {x}))
                continue
            path.append(x)
            members.add(x)
            extend(path, members)
            path.pop()
            members.discard(x)

    for s in sorted(sources):
        if s in targets:
            continue
        extend([s], {s})
    return _prune_supersets(sets)


def minimal_essential_loop_sets(
    ring: RingMarking, mode: Mode
) -> list[frozenset[int]]:
    """All minimal carrier sets of essential loops of the ring."""
    mode = Mode(mode)
    graph = carrier_graph(ring, mode)
    cycles = _chordless_cycles(graph.neighbors)
    if mode is Mode.VERTEX:
        tester = _VertexLoopTester(ring)
    else:
        tester = _TileLoopTester(ring, mode)
        cycles.extend(tester.two_cycles())
    sets = {
        frozenset(cycle) for cycle in cycles if tester.is_essential(cycle)
    }
    return _prune_supersets(sets)


def _prune_supersets(sets: set[frozenset[int]]) -> list[frozenset[int]]:
    by_size = sorted(sets, key=lambda s: (len(s), sorted(s)))
    kept: list[frozenset[int]] = []
    for cand in by_size:
        if not any(small < cand for small in kept):
            kept.append(cand)
    return kept


def _chordless_cycles(
    neighbors: dict[int, tuple[int, ...]]
) -> list[tuple[int, ...]]:
    """Chordless simple cycles of length >= 3, each listed once."""
    nbr = {u: set(vs) for u, vs in neighbors.items()}
    cycles: list[tuple[int, ...]] = []

    def extend(path: list[int]) -> None:
        if len(cycles) > _PATH_CAP:
            raise TooLarge("too many cycles")
        s = path[0]
        last = path[-1]
        for x in sorted(nbr[last]):
            if x <= s or x in path:
                continue
            # chordless: x may touch only the last vertex and possibly s
            if any(x in nbr[p] for p in path[1:-1]):
                continue
            if len(path) == 1:
                # second vertex; its edge back to s is the path edge
                path.append(x)
                extend(path)
                path.pop()
                continue
            if x in nbr[s]:
                if path[1] < x:  # each cycle once, not its reversal
                    cycles.append(tuple(path) + (x,))
                continue  # extending would carry the chord (x, s)
            path.append(x)
            extend(path)
            path.pop()

    for s in sorted(nbr):
        extend([s])
    return cycles


class _VertexLoopTester:
    """Essentiality of a simple vertex cycle via boundary separation.

    Cutting the annulus along the cycle separates the two boundary circles
    exactly when the cycle is essential; the test runs over the face graph
    with adjacency across edges not used by the cycle.
    """

    def __init__(self, ring: RingMarking) -> None:
        self.ring = ring
        c = ring.complex
        self.edge_by_pair: dict[tuple[int, int], list[int]] = {}
        for e, (a, b) in enumerate(c.edges):
            self.edge_by_pair.setdefault((min(a, b), max(a, b)), []).append(e)
        self.inner = set(ring.inner_boundary)
        self.outer = set(ring.outer_boundary)

    def is_essential(self, cycle: tuple[int, ...]) -> bool:
        c = self.ring.complex
        k = len(cycle)
        cycle_edges: set[int] = set()
        for i in range(k):
            pair = (
                min(cycle[i], cycle[(i + 1) % k]),
                max(cycle[i], cycle[(i + 1) % k]),
            )
            ids = self.edge_by_pair.get(pair)
            if not ids:
                return False
            cycle_edges.add(ids[0])
        # components of the face graph avoiding the cycle edges
        parent = list(range(len(c.faces)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e, fs in enumerate(c.edge_face_ids):
            if e in cycle_edges or len(fs) != 2:
                continue
            a, b = find(fs[0]), find(fs[1])
            if a != b:
                parent[a] = b
        touches_inner: set[int] = set()
        touches_outer: set[int] = set()
        for e, fs in enumerate(c.edge_face_ids):
            if e in cycle_edges or len(fs) != 1:
                continue
            root = find(fs[0])
            if e in self.inner:
                touches_inner.add(root)
            elif e in self.outer:
                touches_outer.add(root)
        return not (touches_inner & touches_outer)


class _TileLoopTester:
    """Essentiality of a tile chain by winding numbers over the cut.

    The chain is essential when some realization of the transitions
    between consecutive tiles has nonzero total winding; achievable sums
    are accumulated by dynamic programming.
    """

    def __init__(self, ring: RingMarking, mode: Mode) -> None:
        self.finder = EssentialLoopFinder(ring, mode)
        self.mode = mode
        self.ring = ring

    def is_essential(self, cycle: tuple[int, ...]) -> bool:
        k = len(cycle)
        sums = {0}
        for i in range(k):
            deltas = self.finder.loop_transitions(cycle[i], cycle[(i + 1) % k])
            if not deltas:
                return False
            sums = {s + d for s in sums for d in deltas}
        return any(s != 0 for s in sums)

    def two_cycles(self) -> list[tuple[int, ...]]:
        """Tile pairs adjacent through several elements form 2-loops."""
        out = []
        c = self.ring.complex
        for f in range(len(c.faces)):
            for g, deltas in self.finder._transitions[f]:
                if g > f and len(deltas) > 1:
                    out.append((f, g))
        return out


# ---------------------------------------------------------------------------
# self-contained least-distance solver
# ---------------------------------------------------------------------------


def _least_distance(G: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """min ||rho||^2 with G rho >= 1, by dual active-set iteration."""
    m, n = G.shape
    E = np.vstack([G.T, np.ones((1, m))])
    f = np.zeros(n + 1)
    f[n] = 1.0
    u = _nnls_active_set(E, f)
    r = E @ u - f
    if abs(r[n]) < 1e-13:
        raise SolverError("oracle least-distance subproblem infeasible")
    rho = -r[:n] / r[n]
    # exact refit on the active set
    active = [j for j in range(m) if u[j] > 1e-12]
    if active:
        Ga = G[active]
        M = Ga @ Ga.T
        ones = np.ones(len(active))
        try:
            lam = np.linalg.solve(M, ones)
        except np.linalg.LinAlgError:
            lam, *_ = np.linalg.lstsq(M, ones, rcond=None)
        if (lam >= -1e-9).all():
            cand = Ga.T @ np.clip(lam, 0.0, None)
            if (G @ cand >= 1.0 - 1e-9).all():
                rho = cand
    worst = (G @ rho).min()
    if worst < 1.0 - 1e-10:
        if worst <= 0:
            raise SolverError("oracle optimum infeasible")
        rho = rho / worst
    lengths = G @ rho
    active = [j for j in range(m) if lengths[j] <= 1.0 + 1e-8]
    return rho, active


def _nnls_active_set(
    E: np.ndarray, f: np.ndarray, max_iter: int | None = None
) -> np.ndarray:
    """Classic Lawson-Hanson nonnegative least squares."""
    m = E.shape[1]
    if max_iter is None:
        max_iter = 3 * m + 30
    x = np.zeros(m)
    passive = np.zeros(m, dtype=bool)
    w = E.T @ (f - E @ x)
    tol = 1e-12 * max(1.0, float(np.abs(E).sum()))
    for _ in range(max_iter):
        if passive.all() or (w[~passive] <= tol).all():
            break
        candidates = np.where(~passive)[0]
        j = candidates[int(np.argmax(w[candidates]))]
        passive[j] = True
        while True:
            idx = np.where(passive)[0]
            s_passive, *_ = np.linalg.lstsq(E[:, idx], f, rcond=None)
            if (s_passive > tol).all():
                x = np.zeros(m)
                x[idx] = s_passive
                break
            mask = s_passive <= tol
            ratios = x[idx][mask] / (x[idx][mask] - s_passive[mask])
            alpha = float(ratios.min())
            x[idx] = x[idx] + alpha * (s_passive - x[idx])
            passive[idx[x[idx] <= tol]] = False
            x[~passive] = 0.0
        w = E.T @ (f - E @ x)
    return x
