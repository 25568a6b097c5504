"""Sender graphs on ``X^n``: adjacency predicates and type-class degree counts.

Graphs are never materialized.  Degrees between two type classes follow from
joint-type combinatorics: for a fixed ``x`` of type ``P1`` the number of ``y``
having joint type ``W`` with it is ``prod_j (n P1(j))! / prod_i W(i,j)!``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import DEFAULT_TYPE_CAP, TypeVector, all_sequences, empirical_type
from .transport import contingency_tables
from .utility import UtilityMatrix, sequence_utility


@dataclass(frozen=True)
class GraphSpec:
    """``delta=None`` selects the undirected sender graph."""

    u: UtilityMatrix
    n: int
    delta: Fraction | None = None

    def __post_init__(self):
        if self.delta is not None:
            object.__setattr__(self, "delta", Fraction(self.delta))
            if self.delta < 0:
                raise ValueError("delta must be nonnegative")

    @property
    def directed(self) -> bool:
        return self.delta is not None


@dataclass(frozen=True)
class DegreeReport:
    delta_out: int
    delta_in: int


def adjacent(x: Sequence[int], y: Sequence[int], u: UtilityMatrix) -> bool:
    """Edge of the undirected graph: the sender weakly prefers one over the other."""
    if tuple(x) == tuple(y):
        raise ValueError("the sender graph has no self loops")
    return sequence_utility(y, x, u) >= 0 or sequence_utility(x, y, u) >= 0


def directed_edge(x: Sequence[int], y: Sequence[int], u: UtilityMatrix, delta) -> bool:
    """Edge ``x -> y``: reporting ``y`` for truth ``x`` beats ``delta * Umax``."""
    return sequence_utility(y, x, u) > Fraction(delta) * u.umax


class _EdgeRule:
    """Integer form of the edge predicate on joint types (rows y, cols x)."""

    def __init__(self, spec: GraphSpec):
        lcd, self.iu = spec.u.integer_entries()
        self.directed = spec.directed
        if self.directed:
            # U_n > delta * Umax  <=>  den * sum(W * L U) > num * n * L * Umax
            self.num = spec.delta.numerator * int(spec.u.umax * lcd) * spec.n
            self.den = spec.delta.denominator

    def __call__(self, w) -> bool:
        q = len(w)
        fwd = sum(w[i][j] * self.iu[i][j] for i in range(q) for j in range(q) if w[i][j])
        if self.directed:
            return self.den * fwd > self.num
        if all(w[i][j] == 0 for i in range(q) for j in range(q) if i != j):
            return False  # only y == x has a diagonal joint type
        back = sum(w[i][j] * self.iu[j][i] for i in range(q) for j in range(q) if w[i][j])
        return fwd >= 0 or back >= 0


def degree_counts(p1: TypeVector, p2: TypeVector, spec: GraphSpec,
                  cap: int = DEFAULT_TYPE_CAP) -> DegreeReport:
    """Out-degree of any ``x`` in class ``p1`` into class ``p2`` and in-degree of any ``y`` in ``p2``."""
    if p1.n != p2.n or p1.n != spec.n:
        raise ValueError("types must share the block length of the graph")
    rule = _EdgeRule(spec)
    fact = [math.factorial(k) for k in range(spec.n + 1)]
    num_out = math.prod(fact[c] for c in p1.counts)
    num_in = math.prod(fact[c] for c in p2.counts)
    out_deg = in_deg = 0
    for w in contingency_tables(p2.counts, p1.counts, cap=cap):
        if not rule(w):
            continue
        den = math.prod(fact[c] for row in w for c in row)
        # fixed x: arrange y within each x-column; fixed y: arrange x within each y-row
        out_deg += num_out // den
        in_deg += num_in // den
    return DegreeReport(out_deg, in_deg)


def brute_degree_table(spec: GraphSpec) -> dict[tuple[tuple[int, ...], tuple[int, ...]], DegreeReport]:
    """Degrees for every ordered type pair by walking ``X^n`` (exhaustive oracle).

    One representative per class is used, the lexicographically smallest.
    """
    q, n = spec.u.q, spec.n
    lcd, iu_list = spec.u.integer_entries()
    iu = np.array(iu_list, dtype=np.int64)
    xs = np.array(list(all_sequences(n, q)), dtype=np.int64).reshape(q**n, n)
    counts = np.stack([(xs == s).sum(axis=1) for s in range(q)], axis=1)
    keys = [tuple(r) for r in counts.tolist()]
    classes: dict[tuple[int, ...], list[int]] = {}
    for idx, k in enumerate(keys):
        classes.setdefault(k, []).append(idx)
    masks = {k: np.isin(np.arange(len(keys)), v) for k, v in classes.items()}

    def edges_from(rep: int, as_truth: bool) -> np.ndarray:
        # as_truth: rep plays x, candidates play y (edge x -> y)
        ref = xs[rep]
        if as_truth:
            fwd = iu[xs, ref[None, :]].sum(axis=1)  # U(y_k, x_k)
            back = iu[ref[None, :], xs].sum(axis=1)
        else:
            fwd = iu[ref[None, :], xs].sum(axis=1)  # U(y_k, x_k) with y = rep
            back = iu[xs, ref[None, :]].sum(axis=1)
        if spec.directed:
            e = fwd * spec.delta.denominator > spec.delta.numerator * int(spec.u.umax * lcd) * n
        else:
            e = (fwd >= 0) | (back >= 0)
        e[rep] = False
        return e

    out_edges = {k: edges_from(v[0], True) for k, v in classes.items()}
    in_edges = {k: edges_from(v[0], False) for k, v in classes.items()}
    table = {}
    for k1 in classes:
        for k2 in classes:
            table[(k1, k2)] = DegreeReport(
                int(out_edges[k1][masks[k2]].sum()), int(in_edges[k2][masks[k1]].sum())
            )
    return table


def brute_degree_counts(p1: TypeVector, p2: TypeVector, spec: GraphSpec) -> DegreeReport:
    """Same quantities by walking ``X^n``; only for small ``q**n``."""
    q, n = spec.u.q, spec.n
    seqs = list(all_sequences(n, q))
    c1 = [x for x in seqs if empirical_type(x, q) == p1]
    c2 = [y for y in seqs if empirical_type(y, q) == p2]

    def edge(x, y):
        if spec.directed:
            return directed_edge(x, y, spec.u, spec.delta)
        return x != y and adjacent(x, y, spec.u)

    out_deg = sum(edge(c1[0], y) for y in c2)
    in_deg = sum(edge(x, c2[0]) for x in c1)
    return DegreeReport(out_deg, in_deg)


def is_independent_set(members: Iterable[Sequence[int]], u: UtilityMatrix) -> bool:
    seqs = [tuple(s) for s in members]
    if len({len(s) for s in seqs}) > 1:
        raise ValueError("all members must have the same length")
    return not any(adjacent(x, y, u) for x, y in itertools.combinations(set(seqs), 2))
