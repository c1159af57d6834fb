"""Projection between levels and k-way Fiduccia-Mattheyses refinement."""

from __future__ import annotations

import heapq
from typing import Sequence

import numpy as np
from numba import njit

from .hypergraph import Hypergraph, PartitionAssignment, balance_bound, objective_value


def project(p_coarse: PartitionAssignment, cmap: Sequence[int], h_fine: Hypergraph | None = None) -> PartitionAssignment:
    """Give every fine node the label of its coarse node."""
    labels = [p_coarse.label[c] for c in cmap]
    if h_fine is not None:
        return PartitionAssignment.from_labels(h_fine, labels, p_coarse.k)
    return PartitionAssignment(labels, p_coarse.k, list(p_coarse.part_weight))


def pin_counts(h: Hypergraph, labels: Sequence[int], k: int) -> list[list[int]]:
    """``phi[e][p]``: number of pins of edge ``e`` in part ``p``."""
    phi = []
    for pins in h.pins_of_edge:
        row = [0] * k
        for v in pins:
            row[labels[v]] += 1
        phi.append(row)
    return phi


def _delta(h: Hypergraph, phi, v: int, source: int, target: int, objective: str) -> int:
    d = 0
    ew = h.edge_weight
    if objective == "km1":
        for e in h.edges_of_node[v]:
            ph = phi[e]
            if ph[source] == 1:
                d -= ew[e]
            if ph[target] == 0:
                d += ew[e]
    else:
        pe = h.pins_of_edge
        for e in h.edges_of_node[v]:
            ph = phi[e]
            size = len(pe[e])
            if ph[source] == size:
                d += ew[e]
            elif ph[target] == size - 1:
                d -= ew[e]
    return d


def move_gain(h: Hypergraph, p: PartitionAssignment, v: int, target: int, objective: str) -> int:
    """Objective change caused by moving ``v`` to ``target`` (negative is better)."""
    source = p.label[v]
    if target == source:
        raise ValueError("target part equals the current part")
    phi = {}
    for e in h.edges_of_node[v]:
        row = [0] * p.k
        for u in h.pins_of_edge[e]:
            row[p.label[u]] += 1
        phi[e] = row
    return _delta(h, phi, v, source, target, _norm(objective))


def gain_table(h: Hypergraph, p: PartitionAssignment, objective: str) -> np.ndarray:
    """Dense ``(n, k)`` table of move deltas; the current part's entry is 0."""
    objective = _norm(objective)
    phi = pin_counts(h, p.label, p.k)
    table = np.zeros((h.num_nodes, p.k), dtype=np.int64)
    for v in range(h.num_nodes):
        a = p.label[v]
        for b in range(p.k):
            if b != a:
                table[v, b] = _delta(h, phi, v, a, b, objective)
    return table


def _norm(objective: str) -> str:
    if objective in ("km1", "connectivity"):
        return "km1"
    if objective == "cut":
        return "cut"
    raise ValueError(f"unknown objective {objective!r}")


@njit(cache=True)
def _best_move(v, node_ptr, node_edges, edge_ptr, nw, ew, label, phi, part_weight, bound, km1, conn, rescue):
    k = phi.shape[1]
    a = label[v]
    for b in range(k):
        conn[b] = 0
        rescue[b] = 0
    fixed = 0
    for i in range(node_ptr[v], node_ptr[v + 1]):
        e = node_edges[i]
        w = ew[e]
        if km1:
            # delta(b) = -sum(w: v alone in a) + sum(w: edge misses b)
            fixed += w
            if phi[e, a] == 1:
                fixed -= w
            for b in range(k):
                if phi[e, b] > 0:
                    conn[b] += w
                    rescue[b] += w
        else:
            # delta(b) = sum(w: edge internal to a) - sum(w: all other pins in b)
            size = edge_ptr[e + 1] - edge_ptr[e]
            if phi[e, a] == size:
                fixed += w
                continue
            for b in range(k):
                c = phi[e, b]
                if c > 0:
                    conn[b] += w
                    if c == size - 1:
                        rescue[b] += w
    limit = bound - nw[v]
    best_d = 0
    best_b = -1
    for b in range(k):
        if b == a or conn[b] == 0 or part_weight[b] > limit:
            continue
        d = fixed - rescue[b]
        if best_b == -1 or d < best_d:
            best_d = d
            best_b = b
    return best_d, best_b


@njit(cache=True)
def _apply(v, b, node_ptr, node_edges, nw, label, phi, part_weight):
    a = label[v]
    for i in range(node_ptr[v], node_ptr[v + 1]):
        e = node_edges[i]
        phi[e, a] -= 1
        phi[e, b] += 1
    part_weight[a] -= nw[v]
    part_weight[b] += nw[v]
    label[v] = b


@njit(cache=True)
def _fm_pass(node_ptr, node_edges, edge_ptr, edge_pins, nw, ew, label, phi, part_weight, bound, km1, current, stall_limit):
    n = label.shape[0]
    k = phi.shape[1]
    conn = np.zeros(k, dtype=np.int64)
    rescue = np.zeros(k, dtype=np.int64)
    locked = np.zeros(n, dtype=np.bool_)
    stamp = np.full(n, -1, dtype=np.int64)
    heap = [(np.int64(0), np.int64(0), np.int64(0))]
    heap.pop()
    for v in range(n):
        a = label[v]
        boundary = False
        for i in range(node_ptr[v], node_ptr[v + 1]):
            e = node_edges[i]
            if phi[e, a] != edge_ptr[e + 1] - edge_ptr[e]:
                boundary = True
                break
        if boundary:
            d, b = _best_move(v, node_ptr, node_edges, edge_ptr, nw, ew, label, phi, part_weight, bound, km1, conn, rescue)
            if b >= 0:
                heap.append((d, np.int64(v), b))
    heapq.heapify(heap)

    moves_v = np.empty(n, dtype=np.int64)
    moves_from = np.empty(n, dtype=np.int64)
    n_moves = 0
    best_obj = current
    best_len = 0
    since_best = 0
    while len(heap) > 0 and since_best < stall_limit:
        d, v, b = heapq.heappop(heap)
        if locked[v]:
            continue
        d2, b2 = _best_move(v, node_ptr, node_edges, edge_ptr, nw, ew, label, phi, part_weight, bound, km1, conn, rescue)
        if b2 < 0:
            continue
        if d2 != d or b2 != b:
            heapq.heappush(heap, (d2, v, b2))
            continue
        moves_v[n_moves] = v
        moves_from[n_moves] = label[v]
        n_moves += 1
        _apply(v, b, node_ptr, node_edges, nw, label, phi, part_weight)
        locked[v] = True
        current += d
        if current < best_obj:
            best_obj = current
            best_len = n_moves
            since_best = 0
        else:
            since_best += 1
        for i in range(node_ptr[v], node_ptr[v + 1]):
            e = node_edges[i]
            for j in range(edge_ptr[e], edge_ptr[e + 1]):
                u = edge_pins[j]
                if locked[u] or stamp[u] == n_moves:
                    continue
                stamp[u] = n_moves
                du, bu = _best_move(u, node_ptr, node_edges, edge_ptr, nw, ew, label, phi, part_weight, bound, km1, conn, rescue)
                if bu >= 0:
                    heapq.heappush(heap, (du, u, bu))
    for m in range(n_moves - 1, best_len - 1, -1):
        _apply(moves_v[m], moves_from[m], node_ptr, node_edges, nw, label, phi, part_weight)
    return best_obj


def fm_refine(
    h: Hypergraph,
    p: PartitionAssignment,
    alpha: float,
    objective: str = "km1",
    max_passes: int = 8,
    stall_limit: int = 350,
) -> PartitionAssignment:
    """Pass-based FM local search with node locking and best-prefix rollback.

    Each pass repeatedly applies the best-gain move among unlocked nodes
    (ties: lowest node id, then lowest part id), locks the moved node, and
    finally rolls back to the best prefix seen. A pass ends when no move is
    left or after ``stall_limit`` consecutive moves without a new best.
    Moves never push a part above the balance bound, so a feasible input
    stays feasible, and the objective never increases.
    """
    objective = _norm(objective)
    node_ptr, node_edges, edge_ptr, edge_pins, nw, ew = h.arrays()
    label = np.asarray(p.label, dtype=np.int64).copy()
    part_weight = np.asarray(p.part_weight, dtype=np.int64).copy()
    phi = np.asarray(pin_counts(h, p.label, p.k), dtype=np.int64).reshape(h.num_edges, p.k)
    bound = float(balance_bound(h.total_node_weight, p.k, alpha))
    current = objective_value(h, p.label, objective)
    km1 = objective == "km1"
    for _ in range(max_passes):
        improved = _fm_pass(
            node_ptr, node_edges, edge_ptr, edge_pins, nw, ew, label, phi, part_weight, bound, km1, current, stall_limit
        )
        if improved >= current:
            break
        current = improved
    return PartitionAssignment(label.tolist(), p.k, part_weight.tolist())


def rebalance(h: Hypergraph, p: PartitionAssignment, alpha: float, objective: str = "km1") -> PartitionAssignment:
    """Greedily move nodes out of overloaded parts at the smallest objective cost.

    Best effort: stops when no single move reduces the overload.
    """
    objective = _norm(objective)
    bound = balance_bound(h.total_node_weight, p.k, alpha)
    out = p.copy()
    phi = pin_counts(h, out.label, out.k)
    while True:
        heavy = max(range(out.k), key=lambda q: (out.part_weight[q], -q))
        if out.part_weight[heavy] <= bound:
            break
        best = None
        for v in range(h.num_nodes):
            if out.label[v] != heavy:
                continue
            wv = h.node_weight[v]
            for b in range(out.k):
                if b == heavy or out.part_weight[b] + wv > bound:
                    continue
                key = (_delta(h, phi, v, heavy, b, objective), -wv, v, b)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, _, v, b = best
        for e in h.edges_of_node[v]:
            phi[e][heavy] -= 1
            phi[e][b] += 1
        out.move(h, v, b)
    return out
