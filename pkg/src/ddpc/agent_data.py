"""Per-agent data views and their stacked Hankel representations.

Each node sees its own state history, its neighbors' state histories,
and (if actuated) its own input history. The per-node sample is

    w_i(t) = col(u_i(t), x_{N_i}(t), x_i(t))        i actuated
    w_i(t) = col(x_{N_i}(t), x_i(t))                otherwise

with neighbor blocks in ascending node order. The stacked matrix

    H_i = [ hankel(u_i); hankel(x_{N_i}); hankel(x_i) ]   (depth tau)

is the node's image representation of feasible local windows: a window
w_i belongs to the system behavior exactly when it lies in the column
space of H_i, provided the excitation conditions hold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hankel import hankel, is_persistently_exciting
from .numeric import RANK_RTOL
from .systems import NetworkSystem, Trajectory

__all__ = [
    "AgentDataView",
    "HankelBlock",
    "build_agent_views",
    "check_condition_i",
    "check_condition_ii",
    "verify_membership",
]


@dataclass(frozen=True)
class AgentDataView:
    """One node's slice of the sample trajectory.

    selection indexes the stacked global sample col(u(t), x(t)); applying
    it per sample reproduces samples (the local data) exactly. Per-sample
    dims: m_i for the input part, n_j per neighbor, n_i for the own state.
    """

    node: int
    is_actuated: bool
    input_dim: int
    neighbor_ids: tuple[int, ...]
    neighbor_dims: tuple[int, ...]
    state_dim: int
    samples: np.ndarray  # (T_d, per-sample width)
    selection: np.ndarray  # indices into col(u(t), x(t))

    @property
    def sample_width(self) -> int:
        return self.input_dim + int(sum(self.neighbor_dims)) + self.state_dim

    def window_rows(self, depth: int) -> int:
        """Row count k_i of the depth-`depth` stacked Hankel block."""
        return self.sample_width * depth


@dataclass(frozen=True)
class HankelBlock:
    """Stacked Hankel matrix of one agent's data, with its row layout.

    Three signal blocks in order: the own input (m_i * depth rows,
    actuated nodes only), the neighborhood state treated as one signal
    (sum_j n_j per sample, so depth blocks of interleaved neighbor rows),
    and the own state (n_i * depth). Columns are the T_d - depth + 1
    windows of the sample trajectory; column c is the window starting
    at sample c, stacked signal-major.
    """

    node: int
    depth: int
    matrix: np.ndarray
    input_dim: int
    neighbor_ids: tuple[int, ...]
    neighbor_dims: tuple[int, ...]
    state_dim: int

    @property
    def columns(self) -> int:
        return self.matrix.shape[1]

    @property
    def neighborhood_dim(self) -> int:
        return int(sum(self.neighbor_dims))

    def input_rows(self) -> slice:
        return slice(0, self.input_dim * self.depth)

    def neighborhood_rows(self) -> slice:
        start = self.input_dim * self.depth
        return slice(start, start + self.neighborhood_dim * self.depth)

    def neighbor_row_indices(self, j: int) -> np.ndarray:
        """Time-major row indices of neighbor j inside the neighborhood block."""
        base = self.input_dim * self.depth
        width = self.neighborhood_dim
        offset = 0
        for nid, dim in zip(self.neighbor_ids, self.neighbor_dims):
            if nid == j:
                rows = [base + t * width + offset + k for t in range(self.depth) for k in range(dim)]
                return np.asarray(rows, dtype=int)
            offset += dim
        raise KeyError(f"node {j} is not a neighbor of {self.node}")

    def own_rows(self) -> slice:
        start = (self.input_dim + self.neighborhood_dim) * self.depth
        return slice(start, start + self.state_dim * self.depth)


def _view_for(system: NetworkSystem, trajectory: Trajectory, node: int) -> AgentDataView:
    m = system.m
    nbrs = system.graph.neighbors[node]
    actuated = node in system.actuated
    sel: list[int] = []
    if actuated:
        isl = system.input_slice(node)
        sel.extend(range(isl.start, isl.stop))
    for j in nbrs:
        ssl = system.state_slice(j)
        sel.extend(m + k for k in range(ssl.start, ssl.stop))
    ssl = system.state_slice(node)
    sel.extend(m + k for k in range(ssl.start, ssl.stop))
    selection = np.asarray(sel, dtype=int)
    stacked = np.hstack([trajectory.inputs, trajectory.states])
    return AgentDataView(
        node=node,
        is_actuated=actuated,
        input_dim=system.input_dim(node),
        neighbor_ids=nbrs,
        neighbor_dims=tuple(system.state_dims[j] for j in nbrs),
        state_dim=system.state_dims[node],
        samples=stacked[:, selection],
        selection=selection,
    )


def build_agent_views(
    trajectory: Trajectory, system: NetworkSystem, depth: int
) -> list[tuple[AgentDataView, HankelBlock]]:
    """Per-node data views plus their depth-`depth` Hankel blocks."""
    if depth > trajectory.length:
        raise ValueError(f"depth {depth} exceeds trajectory length {trajectory.length}")
    out = []
    for node in range(system.graph.node_count):
        view = _view_for(system, trajectory, node)
        segments = []
        col = 0
        if view.is_actuated:
            segments.append(view.samples[:, :view.input_dim])
            col = view.input_dim
        nbr_width = int(sum(view.neighbor_dims))
        if nbr_width:
            segments.append(view.samples[:, col:col + nbr_width])
        col += nbr_width
        segments.append(view.samples[:, col:col + view.state_dim])
        matrix = np.vstack([hankel(seg, depth) for seg in segments])
        block = HankelBlock(
            node=node,
            depth=depth,
            matrix=matrix,
            input_dim=view.input_dim,
            neighbor_ids=view.neighbor_ids,
            neighbor_dims=view.neighbor_dims,
            state_dim=view.state_dim,
        )
        out.append((view, block))
    return out


def check_condition_i(inputs: np.ndarray, n: int, depth: int, rtol: float = RANK_RTOL) -> bool:
    """Global excitation test: the input sequence at order n + depth.

    This needs the full stacked input and is therefore a harness-side
    check; individual agents cannot evaluate it from local data.
    """
    return is_persistently_exciting(inputs, n + depth, rtol=rtol)


def check_condition_ii(
    views: list[AgentDataView], state_dims, depth: int, rtol: float = RANK_RTOL
) -> dict[int, bool]:
    """Locally verifiable excitation test, one verdict per node.

    Actuated nodes test col(u_i, x_{N_i}) at order n_i + depth; others
    test x_{N_i} alone. An isolated unactuated node has an empty test
    signal and fails by convention.
    """
    verdicts: dict[int, bool] = {}
    for view in views:
        order = int(state_dims[view.node]) + depth
        width = view.input_dim + int(sum(view.neighbor_dims))
        signal = view.samples[:, :width]
        verdicts[view.node] = is_persistently_exciting(signal, order, rtol=rtol)
    return verdicts


def verify_membership(
    blocks: list[HankelBlock], windows: list[np.ndarray]
) -> np.ndarray:
    """Least-squares distance of each node's candidate window to its Hankel image.

    Residual_i = min_g || H_i g - w_i ||. Residuals near zero certify the
    collection as a system trajectory; a window off the behavior manifold
    keeps its residual bounded away from zero.
    """
    residuals = np.zeros(len(blocks))
    for k, (block, w) in enumerate(zip(blocks, windows)):
        w = np.asarray(w, dtype=float).ravel()
        if w.shape[0] != block.matrix.shape[0]:
            raise ValueError(
                f"window for node {block.node} has {w.shape[0]} rows, "
                f"expected {block.matrix.shape[0]}"
            )
        g, *_ = np.linalg.lstsq(block.matrix, w, rcond=None)
        residuals[k] = float(np.linalg.norm(block.matrix @ g - w))
    return residuals
