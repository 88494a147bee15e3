"""Partitioned linear network systems and data-generation policies.

A NetworkSystem couples scalar or vector node states over an undirected
graph: node i evolves as

    x_i(t+1) = A_ii x_i(t) + sum_{j in N_i} A_ij x_j(t) [+ B_i u_i(t)]

with inputs only at actuated nodes. The assembled (A, B) is the ground
truth used for data generation and closed-loop evaluation; the
controller side never reads it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_discrete_are

from .graphs import Graph
from .numeric import RANK_RTOL

__all__ = [
    "NetworkSystem",
    "Trajectory",
    "LayoutError",
    "GenerationError",
    "sample_system",
    "controllability_check",
    "step",
    "simulate",
    "data_gen_policy",
    "assemble_weights",
]

CONTROLLABILITY_RETRIES = 10
MARGINAL_STABILITY_BAND = 0.05  # target rho(A + BK) in [1 - band, 1]


class LayoutError(ValueError):
    """Dimension mismatch against the system's block layout."""


class GenerationError(RuntimeError):
    """Random sampling failed to produce a controllable system."""


@dataclass(frozen=True)
class NetworkSystem:
    """Block-sparse (A, B) over a graph, with ground truth assembled dense.

    state_dims[i] = n_i; actuated is the ascending tuple of input nodes
    with input_dims aligned to it. state_offsets/input_offsets give each
    node's slice into the stacked state/input vectors.
    """

    graph: Graph
    state_dims: tuple[int, ...]
    actuated: tuple[int, ...]
    input_dims: tuple[int, ...]
    a: np.ndarray
    b: np.ndarray
    state_offsets: tuple[int, ...] = field(init=False)
    input_offsets: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        if len(self.state_dims) != self.graph.node_count:
            raise LayoutError("state_dims length must match node count")
        if tuple(sorted(self.actuated)) != self.actuated:
            raise LayoutError("actuated node ids must be ascending")
        if len(self.input_dims) != len(self.actuated):
            raise LayoutError("input_dims must align with actuated")
        soff = np.concatenate([[0], np.cumsum(self.state_dims)])
        ioff = np.concatenate([[0], np.cumsum(self.input_dims)]) if self.actuated else np.array([0])
        object.__setattr__(self, "state_offsets", tuple(int(v) for v in soff))
        object.__setattr__(self, "input_offsets", tuple(int(v) for v in ioff))
        if self.a.shape != (self.n, self.n):
            raise LayoutError(f"A must be {self.n}x{self.n}")
        if self.b.shape != (self.n, self.m):
            raise LayoutError(f"B must be {self.n}x{self.m}")

    @property
    def n(self) -> int:
        return int(sum(self.state_dims))

    @property
    def m(self) -> int:
        return int(sum(self.input_dims))

    def state_slice(self, i: int) -> slice:
        return slice(self.state_offsets[i], self.state_offsets[i + 1])

    def input_slice(self, i: int) -> slice:
        """Slice of the stacked input for actuated node i."""
        k = self.actuated.index(i)
        return slice(self.input_offsets[k], self.input_offsets[k + 1])

    def input_dim(self, i: int) -> int:
        return self.input_dims[self.actuated.index(i)] if i in self.actuated else 0


@dataclass(frozen=True)
class Trajectory:
    """L input samples u(0..L-1) and L state samples x(0..L-1).

    The successor state x(L) is defined by the dynamics but not stored;
    windows over [0, L-1] are what the Hankel machinery consumes.
    """

    inputs: np.ndarray  # (L, m)
    states: np.ndarray  # (L, n)

    def __post_init__(self) -> None:
        if self.inputs.ndim != 2 or self.states.ndim != 2:
            raise LayoutError("trajectory arrays must be 2-d (time, dim)")
        if self.inputs.shape[0] != self.states.shape[0]:
            raise LayoutError("inputs and states must share the time axis")

    @property
    def length(self) -> int:
        return self.states.shape[0]


def _mask_for(graph: Graph, state_dims: tuple[int, ...]) -> np.ndarray:
    off = np.concatenate([[0], np.cumsum(state_dims)])
    n = off[-1]
    mask = np.zeros((n, n), dtype=bool)
    for i in range(graph.node_count):
        si = slice(off[i], off[i + 1])
        mask[si, si] = True
        for j in graph.neighbors[i]:
            mask[si, off[j]:off[j + 1]] = True
    return mask


def controllability_check(system: NetworkSystem, rtol: float = RANK_RTOL) -> bool:
    """Kalman rank test on the assembled pair, with the shared tolerance."""
    n = system.n
    if system.m == 0:
        return False
    blocks = [system.b]
    cur = system.b
    for _ in range(n - 1):
        cur = system.a @ cur
        blocks.append(cur)
    ctrb = np.hstack(blocks)
    s = np.linalg.svd(ctrb, compute_uv=False)
    if s[0] == 0.0:
        return False
    return int(np.count_nonzero(s > rtol * s[0])) == n


def sample_system(
    graph: Graph,
    state_dims,
    actuated_set,
    seed: int,
    input_dims=None,
) -> NetworkSystem:
    """Draw random controllable blocks on the given sparsity pattern.

    Entries are standard normal; A is rescaled by 1/rho(A) whenever its
    spectral radius exceeds 2 so that open-loop data cannot overflow.
    Resamples until the Kalman test passes, up to a bounded retry count.
    """
    state_dims = tuple(int(d) for d in state_dims)
    actuated = tuple(sorted(int(i) for i in actuated_set))
    if not actuated:
        raise GenerationError("actuated set must be non-empty")
    if input_dims is None:
        input_dims = tuple(1 for _ in actuated)
    else:
        input_dims = tuple(int(d) for d in input_dims)
    rng = np.random.default_rng(seed)
    mask = _mask_for(graph, state_dims)
    n = int(sum(state_dims))
    m = int(sum(input_dims))
    soff = np.concatenate([[0], np.cumsum(state_dims)])
    ioff = np.concatenate([[0], np.cumsum(input_dims)])
    for _ in range(CONTROLLABILITY_RETRIES):
        a = rng.normal(size=(n, n))
        a[~mask] = 0.0
        radius = float(np.max(np.abs(np.linalg.eigvals(a))))
        if radius > 2.0:
            a = a / radius
        b = np.zeros((n, m))
        for k, node in enumerate(actuated):
            b[soff[node]:soff[node + 1], ioff[k]:ioff[k + 1]] = rng.normal(
                size=(state_dims[node], input_dims[k])
            )
        system = NetworkSystem(graph, state_dims, actuated, input_dims, a, b)
        if controllability_check(system):
            return system
    raise GenerationError(
        f"no controllable sample in {CONTROLLABILITY_RETRIES} draws; "
        "the requested dimensions are likely degenerate"
    )


def step(system: NetworkSystem, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """One exact evaluation of the network dynamics."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (system.n,):
        raise LayoutError(f"state must have shape ({system.n},), got {x.shape}")
    if u.shape != (system.m,):
        raise LayoutError(f"input must have shape ({system.m},), got {u.shape}")
    return system.a @ x + system.b @ u


def simulate(system: NetworkSystem, x0: np.ndarray, input_sequence: np.ndarray) -> Trajectory:
    """Roll the dynamics over an input sequence.

    Returns a consistent trajectory of length len(input_sequence): the
    state reached after the final input is not recorded.
    """
    inputs = np.atleast_2d(np.asarray(input_sequence, dtype=float))
    if inputs.shape[1] != system.m:
        raise LayoutError(f"inputs must have {system.m} columns")
    length = inputs.shape[0]
    states = np.zeros((length, system.n))
    x = np.asarray(x0, dtype=float)
    for t in range(length):
        states[t] = x
        x = step(system, x, inputs[t])
    return Trajectory(inputs=inputs.copy(), states=states)


def _lqr_gain(system: NetworkSystem) -> np.ndarray:
    """Stabilizing state feedback from a Riccati solve with identity weights."""
    p = solve_discrete_are(system.a, system.b, np.eye(system.n), np.eye(system.m))
    return -np.linalg.solve(
        np.eye(system.m) + system.b.T @ p @ system.b, system.b.T @ p @ system.a
    )


def _spectral_radius(a: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def data_gen_policy(
    system: NetworkSystem,
    horizon: int,
    noise_scale: float,
    seed: int,
    x0: np.ndarray | None = None,
) -> Trajectory:
    """Excite the plant with marginally stabilized feedback plus dither.

    u(t) = K x(t) + w(t) with w ~ N(0, noise_scale^2 I). When the open
    loop already has spectral radius <= 1, K = 0 suffices; otherwise the
    Riccati gain is shrunk by bisection until rho(A + BK) sits inside
    the marginal band just below 1. K uses the true model and exists
    only on the data-generation side.
    """
    rng = np.random.default_rng(seed)
    open_radius = _spectral_radius(system.a)
    if open_radius <= 1.0:
        gain = np.zeros((system.m, system.n))
    else:
        full = _lqr_gain(system)
        target = 1.0 - MARGINAL_STABILITY_BAND / 2.0
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _spectral_radius(system.a + mid * system.b @ full) > target:
                lo = mid
            else:
                hi = mid
        gain = hi * full

    x = np.zeros(system.n) if x0 is None else np.asarray(x0, dtype=float)
    inputs = np.zeros((horizon, system.m))
    states = np.zeros((horizon, system.n))
    for t in range(horizon):
        u = gain @ x + noise_scale * rng.normal(size=system.m)
        inputs[t] = u
        states[t] = x
        x = system.a @ x + system.b @ u
    return Trajectory(inputs=inputs, states=states)


def assemble_weights(system: NetworkSystem, q_blocks, r_blocks) -> tuple[np.ndarray, np.ndarray]:
    """Stack per-node Q_i (all nodes) and R_i (actuated nodes) block-diagonally."""
    n, m = system.n, system.m
    q = np.zeros((n, n))
    for i in range(system.graph.node_count):
        q[system.state_slice(i), system.state_slice(i)] = np.atleast_2d(q_blocks[i])
    r = np.zeros((m, m))
    for k, i in enumerate(system.actuated):
        r[system.input_slice(i), system.input_slice(i)] = np.atleast_2d(r_blocks[k])
    return q, r
