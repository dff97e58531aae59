"""Restricted quadratic program: min ||rho||^2 with unit-length paths.

The program  min ||rho||^2  s.t.  sum of rho over each constraint set >= 1
is a least-distance problem; it is solved through the dual nonnegative
least-squares formulation (Lawson-Hanson, via scipy), then polished by an
exact solve on the active set.  Constraint matrices are nonnegative, so
the optimizer is automatically nonnegative and the explicit rho >= 0
bound can be dropped.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.optimize import nnls

from ..errors import SolverError

_ACTIVE_TOL = 1e-12
_KKT_TOL = 1e-9


def min_area_weights(
    constraints: Sequence[tuple[int, ...]], n: int
) -> tuple[np.ndarray, list[int]]:
    """Minimize the area subject to the given unit-length constraints.

    Returns the optimal weights and the indices of active constraints.
    """
    m = len(constraints)
    if m == 0:
        return np.zeros(n), []
    G = np.zeros((m, n))
    for j, members in enumerate(constraints):
        G[j, list(members)] = 1.0
    E = np.vstack([G.T, np.ones((1, m))])
    f = np.zeros(n + 1)
    f[n] = 1.0
    u, _ = nnls(E, f)
    r = E @ u - f
    if abs(r[n]) < 1e-13:
        raise SolverError("least-distance subproblem is infeasible")
    rho = -r[:n] / r[n]
    active = [j for j in range(m) if u[j] > _ACTIVE_TOL]

    polished = _polish(G, active, n)
    if polished is not None:
        rho = polished
    lengths = G @ rho
    worst = lengths.min()
    if worst < 1.0 - 1e-10:
        if worst <= 0:
            raise SolverError("degenerate constraint system")
        rho = rho / worst
        lengths = G @ rho
    active = [j for j in range(m) if lengths[j] <= 1.0 + 1e-8]
    return rho, active


def _polish(
    G: np.ndarray, active: Sequence[int], n: int
) -> np.ndarray | None:
    """Exact equality solve on the active set; None if KKT checks fail."""
    if not active:
        return None
    Ga = G[list(active)]
    M = Ga @ Ga.T
    ones = np.ones(len(active))
    try:
        lam = np.linalg.solve(M, ones)
    except np.linalg.LinAlgError:
        lam, *_ = np.linalg.lstsq(M, ones, rcond=None)
    if (lam < -_KKT_TOL).any():
        return None
    rho = Ga.T @ np.clip(lam, 0.0, None)
    if (G @ rho < 1.0 - _KKT_TOL).any():
        return None
    return rho
