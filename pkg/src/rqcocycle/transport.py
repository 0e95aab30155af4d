"""Exact discrete optimal transport by the transportation simplex.

Network-simplex specialization to the dense bipartite transportation
problem: supplies a_i, demands b_j, cost matrix C.  Bland's entering rule
(first negative reduced cost in row-major order) plus a first-minimum
leaving rule give deterministic, cycle-free pivoting.  No entropic or
floating approximation beyond IEEE arithmetic: the returned plan is an
optimal basic feasible solution of the LP.
"""

from __future__ import annotations

import numpy as np


def transport_plan(
    cost: np.ndarray, supply: np.ndarray, demand: np.ndarray
) -> tuple[float, np.ndarray]:
    """Optimal cost and plan for the balanced transportation problem.

    supply and demand must have equal totals (up to rounding; demand is
    rescaled to balance exactly).  Returns (total cost, plan matrix).
    """
    c = np.asarray(cost, dtype=float)
    a = np.asarray(supply, dtype=float).copy()
    b = np.asarray(demand, dtype=float).copy()
    m, n = c.shape
    if a.shape != (m,) or b.shape != (n,):
        raise ValueError("marginal shapes do not match the cost matrix")
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("marginals must be nonnegative")
    ta, tb = a.sum(), b.sum()
    if not np.isclose(ta, tb, rtol=1e-9, atol=1e-12):
        raise ValueError("unbalanced transportation problem")
    b *= ta / tb

    flow = np.zeros((m, n))
    basis = np.zeros((m, n), dtype=bool)

    # Northwest-corner initial basic feasible solution; zero-flow basic
    # cells are kept so the basis always has m + n - 1 members.
    ra, cb = a.copy(), b.copy()
    i = j = 0
    while True:
        basis[i, j] = True
        x = min(ra[i], cb[j])
        flow[i, j] = x
        ra[i] -= x
        cb[j] -= x
        if i == m - 1 and j == n - 1:
            break
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif ra[i] <= 0.0:
            i += 1
        else:
            j += 1

    tol = 1e-12 * (1.0 + float(np.max(np.abs(c))) if c.size else 1.0)
    max_pivots = 1000 + 50 * (m + n) ** 2
    for _ in range(max_pivots):
        u, v = _duals(c, basis, m, n)
        reduced = c - u[:, None] - v[None, :]
        reduced[basis] = 0.0
        candidates = np.argwhere(reduced < -tol)
        if candidates.size == 0:
            return float(np.sum(flow * c)), flow
        ei, ej = (int(x) for x in candidates[0])  # Bland: first in row-major order

        cycle = _cycle(basis, m, n, ei, ej)
        minus = cycle[1::2]
        theta = min(flow[i2, j2] for i2, j2 in minus)
        leaving = next((i2, j2) for i2, j2 in minus if flow[i2, j2] == theta)
        for idx, (i2, j2) in enumerate(cycle):
            flow[i2, j2] += theta if idx % 2 == 0 else -theta
        flow[leaving] = 0.0
        basis[leaving] = False
        basis[ei, ej] = True
    raise RuntimeError("transportation simplex failed to converge (pivot cap hit)")


def _duals(c: np.ndarray, basis: np.ndarray, m: int, n: int):
    """Solve u_i + v_j = c_ij over basic cells; the basis is a spanning tree."""
    row_adj: list[list[int]] = [[] for _ in range(m)]
    col_adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in np.argwhere(basis):
        row_adj[i].append(j)
        col_adj[j].append(i)
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    u[0] = 0.0
    stack: list[tuple[bool, int]] = [(True, 0)]
    while stack:
        is_row, idx = stack.pop()
        if is_row:
            for j in row_adj[idx]:
                if np.isnan(v[j]):
                    v[j] = c[idx, j] - u[idx]
                    stack.append((False, j))
        else:
            for i in col_adj[idx]:
                if np.isnan(u[i]):
                    u[i] = c[i, idx] - v[idx]
                    stack.append((True, i))
    return u, v


def _cycle(basis: np.ndarray, m: int, n: int, ei: int, ej: int):
    """Cells of the unique basis cycle created by the entering cell (ei, ej).

    Returned in alternating-sign order starting with the entering cell (+).
    """
    row_adj: list[list[int]] = [[] for _ in range(m)]
    col_adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in np.argwhere(basis):
        row_adj[i].append(j)
        col_adj[j].append(i)

    # BFS through tree nodes from row ei to column ej; nodes are
    # ('row', i) / ('col', j), edges are basic cells.
    start, goal = (True, ei), (False, ej)
    parent: dict[tuple[bool, int], tuple[bool, int]] = {start: start}
    queue = [start]
    while queue:
        node = queue.pop(0)
        if node == goal:
            break
        is_row, idx = node
        neighbors = (
            [(False, j) for j in row_adj[idx]]
            if is_row
            else [(True, i) for i in col_adj[idx]]
        )
        for nxt in neighbors:
            if nxt not in parent:
                parent[nxt] = node
                queue.append(nxt)
    if goal not in parent:
        raise RuntimeError("basis lost its spanning-tree property")

    path_cells = []
    node = goal
    while node != start:
        prev = parent[node]
        if node[0]:  # node is a row, prev is a column
            cell = (node[1], prev[1])
        else:  # node is a column, prev is a row
            cell = (prev[1], node[1])
        path_cells.append(cell)
        node = prev
    # path_cells currently runs goal -> start; the cycle is the entering cell
    # followed by the path walked from the goal side.
    return [(ei, ej)] + path_cells
