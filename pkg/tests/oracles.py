"""Independent textbook oracles used to validate the package.

These deliberately avoid all quadcsp internals so that agreement is
meaningful: plain Floyd-Warshall / Bellman-Ford over Fraction weights.
"""

from __future__ import annotations

from fractions import Fraction

INF = float("inf")


def floyd_warshall(weights):
    """All-pairs shortest paths of a dense weighted digraph.

    `weights[k][l]` is the arc weight k -> l (INF when absent).  Returns
    (dist, has_negative_cycle); dist entries are exact when finite.
    """
    size = len(weights)
    dist = [row[:] for row in weights]
    for k in range(size):
        dist[k][k] = min(dist[k][k], Fraction(0))
    for mid in range(size):
        for a in range(size):
            d_am = dist[a][mid]
            if d_am == INF:
                continue
            row_m = dist[mid]
            row_a = dist[a]
            for b in range(size):
                if row_m[b] == INF:
                    continue
                cand = d_am + row_m[b]
                if cand < row_a[b]:
                    row_a[b] = cand
    negative = any(dist[k][k] < 0 for k in range(size))
    return dist, negative


def bellman_ford(size, arcs, source):
    """Single-source shortest paths; arcs are (u, v, weight) triples.

    Returns (dist list, has_negative_cycle).
    """
    dist = [INF] * size
    dist[source] = Fraction(0)
    for _ in range(size - 1):
        changed = False
        for u, v, w in arcs:
            if dist[u] != INF and dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            break
    negative = any(
        dist[u] != INF and dist[u] + w < dist[v] for u, v, w in arcs
    )
    return dist, negative
