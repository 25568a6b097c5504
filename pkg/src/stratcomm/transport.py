"""Exact integer transportation programs with lexicographic objectives.

Integer marginals give integral vertices, so a network-simplex solve on
integer weights is exact.  Several objectives are folded into one integer
weight with multipliers large enough that an earlier objective always
dominates every later one.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterator, Sequence

import networkx as nx

from .core import CapExceeded

Matrix = list[list[int]]


def lexicographic_weight(objectives: Sequence[Matrix], total: int) -> Matrix:
    """Single integer weight equivalent to maximizing ``objectives`` in order."""
    rows, cols = len(objectives[0]), len(objectives[0][0])
    combined = [[0] * cols for _ in range(rows)]
    scale = 1
    for obj in reversed(objectives):
        for i in range(rows):
            for j in range(cols):
                combined[i][j] += scale * obj[i][j]
        span = total * max(abs(v) for row in combined for v in row)
        scale = 2 * span + 1
    return combined


def max_transport(row_sums: Sequence[int], col_sums: Sequence[int],
                  objectives: Sequence[Matrix]) -> list[list[int]]:
    """Integer ``W`` with the given margins maximizing ``objectives`` lexicographically."""
    if sum(row_sums) != sum(col_sums):
        raise ValueError(f"infeasible margins: {sum(row_sums)} != {sum(col_sums)}")
    total = sum(row_sums)
    weight = lexicographic_weight(objectives, total)
    g = nx.DiGraph()
    for i, r in enumerate(row_sums):
        g.add_node(("r", i), demand=-r)
    for j, c in enumerate(col_sums):
        g.add_node(("c", j), demand=c)
    for i in range(len(row_sums)):
        if not row_sums[i]:
            continue
        for j in range(len(col_sums)):
            if col_sums[j]:
                g.add_edge(("r", i), ("c", j), weight=-weight[i][j])
    _, flow = nx.network_simplex(g)
    w = [[0] * len(col_sums) for _ in row_sums]
    for i in range(len(row_sums)):
        for (_, j), f in flow.get(("r", i), {}).items():
            w[i][j] = f
    return w


def objective_value(w: Matrix, obj: Matrix) -> int:
    return sum(c * o for wr, orow in zip(w, obj) for c, o in zip(wr, orow))


def count_tables(row_sums: Sequence[int], col_sums: Sequence[int]) -> int:
    """Crude upper bound on the number of contingency tables (for cap checks)."""
    bound = 1
    for r in row_sums:
        bound *= math.comb(r + len(col_sums) - 1, len(col_sums) - 1)
    return bound


def contingency_tables(row_sums: Sequence[int], col_sums: Sequence[int],
                       cap: int | None = None) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Every nonnegative integer matrix with the given margins."""
    if sum(row_sums) != sum(col_sums):
        return
    if cap is not None and count_tables(row_sums, col_sums) > cap:
        raise CapExceeded(f"joint-type enumeration for {row_sums} x {col_sums} exceeds cap {cap}")
    ncols = len(col_sums)

    def rows_with_sum(r, remaining):
        # compositions of r bounded by the remaining column capacities
        def rec(j, left):
            if j == ncols - 1:
                if left <= remaining[j]:
                    yield (left,)
                return
            for v in range(min(left, remaining[j]) + 1):
                for rest in rec(j + 1, left - v):
                    yield (v,) + rest

        yield from rec(0, r)

    def rec_rows(i, remaining):
        if i == len(row_sums):
            if not any(remaining):
                yield ()
            return
        for row in rows_with_sum(row_sums[i], remaining):
            nxt = tuple(c - v for c, v in zip(remaining, row))
            for rest in rec_rows(i + 1, nxt):
                yield (row,) + rest

    yield from rec_rows(0, tuple(col_sums))


def positive_cycles_in_support(w: Matrix) -> list[tuple[int, ...]]:
    """Cycles ``i0 -> i1 -> ... -> i0`` over distinct symbols with all ``W(i_k, i_{k+1}) > 0``."""
    q = len(w)
    found = []
    for length in range(2, q + 1):
        for combo in itertools.permutations(range(q), length):
            if combo[0] != min(combo):
                continue
            if all(w[combo[k]][combo[(k + 1) % length]] > 0 for k in range(length)):
                found.append(combo)
    return found
