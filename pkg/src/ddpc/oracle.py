"""Centralized ground-truth solvers, used for verification only.

Two independent routes to the same optimizer: a direct KKT solve of the
finite-horizon LQR with terminal zero constraint on the true model, and
a centralized minimum-norm solve of the stacked data-based problem.
The receding-horizon controller must never import this module; it exists
so tests can certify the distributed pipeline against exact solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numeric import RANK_RTOL, numerical_rank
from .systems import NetworkSystem

__all__ = [
    "LqrSolution",
    "InfeasibleProblemError",
    "solve_lqr_kkt",
    "solve_deepc_centralized",
    "verify_trajectory",
]

FEASIBILITY_RTOL = 1e-7


class InfeasibleProblemError(RuntimeError):
    def __init__(self, message: str, reason: str):
        super().__init__(message)
        self.reason = reason


@dataclass(frozen=True)
class LqrSolution:
    """Optimal trajectory of the terminally constrained LQR.

    inputs holds u*(0..T-1); states holds x*(0..T) with x*(0) = x0 and
    x*(T) = 0. cost is the quadratic objective over t in [0, T-1].
    """

    inputs: np.ndarray  # (T, m)
    states: np.ndarray  # (T+1, n)
    cost: float


def solve_lqr_kkt(
    system: NetworkSystem, q: np.ndarray, r: np.ndarray, x0: np.ndarray, horizon: int
) -> LqrSolution:
    """Finite-horizon LQR with x(T) = 0 via one dense KKT factorization.

    Decision variables are u(0..T-1) and x(1..T); x(0) = x0 enters the
    right-hand side. The input weight is positive definite, so the
    (u, x) part of any KKT solution is unique; the minimum-norm solve
    settles the (possibly non-unique) multipliers.
    """
    a, b = system.a, system.b
    n, m = system.n, system.m
    t_hor = int(horizon)
    x0 = np.asarray(x0, dtype=float)
    nv = m * t_hor + n * t_hor
    cost = np.zeros((nv, nv))
    for t in range(t_hor):
        cost[m * t:m * (t + 1), m * t:m * (t + 1)] = r
    for t in range(1, t_hor):  # x(T) carries no weight; it is pinned to zero
        i0 = m * t_hor + n * (t - 1)
        cost[i0:i0 + n, i0:i0 + n] = q
    rows = n * t_hor + n
    con = np.zeros((rows, nv))
    rhs = np.zeros(rows)
    for t in range(t_hor):
        r0 = n * t
        con[r0:r0 + n, m * t:m * (t + 1)] = -b
        if t > 0:
            con[r0:r0 + n, m * t_hor + n * (t - 1):m * t_hor + n * t] = -a
        con[r0:r0 + n, m * t_hor + n * t:m * t_hor + n * (t + 1)] = np.eye(n)
    rhs[:n] = a @ x0
    con[n * t_hor:, m * t_hor + n * (t_hor - 1):] = np.eye(n)

    kkt = np.block([[2 * cost, con.T], [con, np.zeros((rows, rows))]])
    full_rhs = np.concatenate([np.zeros(nv), rhs])
    sol, *_ = np.linalg.lstsq(kkt, full_rhs, rcond=None)
    v = sol[:nv]
    scale = max(1.0, float(np.linalg.norm(rhs)))
    if np.linalg.norm(con @ v - rhs) > FEASIBILITY_RTOL * scale:
        raise InfeasibleProblemError(
            f"terminal constraint unreachable from this state in {t_hor} steps",
            reason="unreachable endpoint",
        )
    inputs = v[:m * t_hor].reshape(t_hor, m)
    states = np.vstack([x0, v[m * t_hor:].reshape(t_hor, n)])
    value = float(
        sum(states[t] @ q @ states[t] + inputs[t] @ r @ inputs[t] for t in range(t_hor))
    )
    return LqrSolution(inputs=inputs, states=states, cost=value)


def solve_deepc_centralized(problems) -> tuple[list[np.ndarray], np.ndarray, np.ndarray, float]:
    """Exact minimum-norm solve of the assembled data-based problem.

    Returns (g per node, stacked future inputs (T+1, m), stacked future
    states (T+1, n), objective value). The trajectory blocks of the
    optimizer are unique even though g generally is not.
    """
    from .problem import assemble_global  # local import keeps module layering acyclic

    data = assemble_global(problems)
    sol, *_ = np.linalg.lstsq(data.saddle_matrix, -data.saddle_offset, rcond=None)
    z = sol[:data.primal_dim]
    residual = float(np.linalg.norm(data.constraints @ z - data.rhs))
    scale = max(1.0, float(np.linalg.norm(data.rhs)))
    if residual > FEASIBILITY_RTOL * scale:
        deficient = [
            p.node for p in problems
            if numerical_rank(p.hankel_rows(), rtol=RANK_RTOL) < p.hankel_rows().shape[0]
        ]
        if deficient:
            raise InfeasibleProblemError(
                f"constraints inconsistent; Hankel rows rank-deficient at nodes {deficient}",
                reason="rank-deficient data",
            )
        raise InfeasibleProblemError(
            "constraints inconsistent for this initial window",
            reason="unreachable initial window",
        )
    gs = []
    fut = problems[0].future_len
    m_total = sum(p.input_dim for p in problems)
    n_total = sum(p.state_dim for p in problems)
    u_fut = np.zeros((fut, m_total))
    x_fut = np.zeros((fut, n_total))
    ucol = 0
    xcol = 0
    obj = 0.0
    for p, sl in zip(problems, data.primal_slices):
        zi = z[sl]
        gs.append(zi[:p.g_dim].copy())
        if p.input_dim:
            u_fut[:, ucol:ucol + p.input_dim] = zi[p.u_slice].reshape(fut, p.input_dim)
            ucol += p.input_dim
        x_fut[:, xcol:xcol + p.state_dim] = zi[p.x_slice].reshape(fut, p.state_dim)
        xcol += p.state_dim
        obj += float(zi @ p.cost_mul(zi))
    return gs, u_fut, x_fut, obj


def verify_trajectory(system: NetworkSystem, inputs: np.ndarray, states: np.ndarray) -> float:
    """Max dynamics residual over the recorded steps."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    states = np.atleast_2d(np.asarray(states, dtype=float))
    steps = min(inputs.shape[0], states.shape[0] - 1)
    worst = 0.0
    for t in range(steps):
        resid = states[t + 1] - system.a @ states[t] - system.b @ inputs[t]
        worst = max(worst, float(np.linalg.norm(resid)))
    return worst
