"""Directed acyclic n-by-n grid topology used by the path-based families.

Nodes are indexed row-major: node (r, c) has id r*n + c. Edges point only
rightward and downward, so node ids strictly increase along every edge and
row-major order is a topological order. Edges are numbered by scanning
nodes in row-major order and emitting, for each node, its rightward edge
first and then its downward edge. An n-by-n grid has 2*n*(n-1) edges.

The source is the top-left corner (id 0) and the sink the bottom-right
corner (id n*n - 1).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import ConfigError


def n_edges(grid_n: int) -> int:
    return 2 * grid_n * (grid_n - 1)


def n_paths(grid_n: int) -> int:
    """Number of distinct source-to-sink paths: C(2(n-1), n-1)."""
    return math.comb(2 * (grid_n - 1), grid_n - 1)


@lru_cache(maxsize=None)
def edge_endpoints(grid_n: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (tails, heads) of node ids per edge, in canonical edge order."""
    if grid_n < 2:
        raise ConfigError(f"grid_n must be >= 2, got {grid_n}")
    tails, heads = [], []
    for r in range(grid_n):
        for c in range(grid_n):
            node = r * grid_n + c
            if c + 1 < grid_n:
                tails.append(node)
                heads.append(node + 1)
            if r + 1 < grid_n:
                tails.append(node)
                heads.append(node + grid_n)
    tails = np.asarray(tails, dtype=np.int64)
    heads = np.asarray(heads, dtype=np.int64)
    tails.setflags(write=False)
    heads.setflags(write=False)
    return tails, heads


@lru_cache(maxsize=None)
def outgoing_edges(grid_n: int) -> tuple[tuple[int, ...], ...]:
    """Per-node tuple of outgoing edge indices, ascending."""
    tails, _ = edge_endpoints(grid_n)
    out: list[list[int]] = [[] for _ in range(grid_n * grid_n)]
    for e, t in enumerate(tails):
        out[t].append(e)
    return tuple(tuple(o) for o in out)


def is_unit_path(grid_n: int, x: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff x is a 0/1 indicator of one source-to-sink path (within tol)."""
    if x.shape != (n_edges(grid_n),):
        return False
    rounded = np.round(x)
    if np.any(np.abs(x - rounded) > tol) or np.any((rounded != 0) & (rounded != 1)):
        return False
    sel = rounded.astype(np.int64)
    tails, heads = edge_endpoints(grid_n)
    n_nodes = grid_n * grid_n
    out_flow = np.bincount(tails, weights=sel, minlength=n_nodes)
    in_flow = np.bincount(heads, weights=sel, minlength=n_nodes)
    balance = out_flow - in_flow
    source, sink = 0, n_nodes - 1
    if balance[source] != 1 or balance[sink] != -1:
        return False
    inner = np.delete(balance, [source, sink])
    if np.any(inner != 0):
        return False
    # unit flow through every visited node; rules out parallel branches
    return bool(np.all(out_flow <= 1) and np.all(in_flow <= 1))


def shortest_path_dp(grid_n: int, costs: np.ndarray) -> tuple[np.ndarray, float]:
    """Exact minimum-cost source-to-sink path by DP over the topological order.

    Costs may have any sign; the grid is acyclic so the DP stays exact.
    Among equal-cost paths the one reached through lower-indexed edges wins
    (relaxation only on strict improvement, edges scanned in index order).
    Returns (0/1 edge indicator, path cost).
    """
    costs = np.asarray(costs, dtype=np.float64)
    if costs.shape != (n_edges(grid_n),):
        raise ConfigError(
            f"expected {n_edges(grid_n)} edge costs for a {grid_n}x{grid_n} grid, "
            f"got {costs.shape}"
        )
    tails, heads = edge_endpoints(grid_n)
    out = outgoing_edges(grid_n)
    n_nodes = grid_n * grid_n
    dist = np.full(n_nodes, np.inf)
    dist[0] = 0.0
    parent_edge = np.full(n_nodes, -1, dtype=np.int64)
    for node in range(n_nodes):
        d = dist[node]
        if not np.isfinite(d):
            continue
        for e in out[node]:
            nd = d + costs[e]
            h = heads[e]
            if nd < dist[h]:
                dist[h] = nd
                parent_edge[h] = e
    indicator = np.zeros(n_edges(grid_n), dtype=np.float64)
    node = n_nodes - 1
    while node != 0:
        e = parent_edge[node]
        indicator[e] = 1.0
        node = int(tails[e])
    return indicator, float(costs @ indicator)


def enumerate_paths(grid_n: int) -> list[np.ndarray]:
    """All source-to-sink paths as int8 indicator vectors, DFS order.

    The DFS takes the rightward edge before the downward edge, so paths come
    out in lexicographic order of their edge choices.
    """
    out = outgoing_edges(grid_n)
    _, heads = edge_endpoints(grid_n)
    sink = grid_n * grid_n - 1
    paths: list[np.ndarray] = []
    stack: list[int] = []

    def walk(node: int) -> None:
        if node == sink:
            vec = np.zeros(n_edges(grid_n), dtype=np.int8)
            vec[stack] = 1
            paths.append(vec)
            return
        for e in out[node]:
            stack.append(e)
            walk(int(heads[e]))
            stack.pop()

    walk(0)
    return paths
