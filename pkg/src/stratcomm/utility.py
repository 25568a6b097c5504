"""Single-letter sender utilities: normalization, the permutation program and its sign.

Convention: ``U[i][j]`` is the sender's utility when the receiver recovers
``i`` while the true symbol is ``j``.  A permutation ``pi`` contributes
``sum_j U[pi(j)][j]``, i.e. the arc ``j -> pi(j)`` carries ``U[pi(j)][j]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import networkx as nx

from .core import JointType, as_fraction, joint_type

GAMMA_MAX_Q = 9


@dataclass(frozen=True)
class UtilityMatrix:
    entries: tuple[tuple[Fraction, ...], ...]

    def __init__(self, entries):
        rows = tuple(tuple(as_fraction(v) for v in row) for row in entries)
        q = len(rows)
        if q < 2 or any(len(r) != q for r in rows):
            raise ValueError("utility must be a square matrix with q >= 2")
        if any(rows[i][i] != 0 for i in range(q)):
            raise ValueError("utility diagonal must be zero; use normalize()")
        object.__setattr__(self, "entries", rows)

    @property
    def q(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def off_diagonal(self):
        q = self.q
        return [(i, j, self.entries[i][j]) for i in range(q) for j in range(q) if i != j]

    @property
    def umax(self) -> Fraction:
        return max(v for row in self.entries for v in row)

    @property
    def umin(self) -> Fraction:
        return min(v for row in self.entries for v in row)

    @property
    def a(self) -> Fraction:
        self._require_binary()
        return min(abs(self.entries[0][1]), abs(self.entries[1][0]))

    @property
    def b(self) -> Fraction:
        self._require_binary()
        return max(abs(self.entries[0][1]), abs(self.entries[1][0]))

    def _require_binary(self):
        if self.q != 2:
            raise ValueError("a and b are only defined for binary utilities")

    def scale(self) -> int:
        """Least common denominator of all entries."""
        return math.lcm(*(v.denominator for row in self.entries for v in row))

    def integer_entries(self) -> tuple[int, list[list[int]]]:
        """``(L, L*U)`` with ``L*U`` integral; comparisons on it are exact."""
        lcd = self.scale()
        return lcd, [[int(v * lcd) for v in row] for row in self.entries]

    def to_json(self) -> list[list[str]]:
        return [[f"{v.numerator}/{v.denominator}" for v in row] for row in self.entries]

    @classmethod
    def binary(cls, u01, u10) -> "UtilityMatrix":
        return cls([[0, u01], [u10, 0]])


def normalize(raw: Sequence[Sequence]) -> UtilityMatrix:
    """Subtract the truthful utility of each true symbol: ``U[i][j] - U[j][j]``."""
    rows = [[as_fraction(v) for v in row] for row in raw]
    q = len(rows)
    if any(len(r) != q for r in rows):
        raise ValueError("utility must be square")
    return UtilityMatrix([[rows[i][j] - rows[j][j] for j in range(q)] for i in range(q)])


def block_utility(w: JointType, u: UtilityMatrix) -> Fraction:
    if w.q != u.q:
        raise ValueError("alphabet mismatch between joint type and utility")
    total = sum(
        c * u.entries[i][j] for i, row in enumerate(w.counts) for j, c in enumerate(row) if c
    )
    return Fraction(total) / w.n


def sequence_utility(y, x, u: UtilityMatrix) -> Fraction:
    """Per-letter utility of reporting ``y`` when the truth is ``x``."""
    return block_utility(joint_type(y, x, u.q), u)


def permutation_value(perm: Sequence[int], u: UtilityMatrix) -> Fraction:
    return sum((u.entries[perm[j]][j] for j in range(len(perm))), Fraction(0))


def cycle_decomposition(perm: Sequence[int]) -> list[tuple[int, ...]]:
    """Non-trivial cycles ``(c0, c1, ...)`` with ``perm[c_k] = c_{k+1}``."""
    seen, cycles = set(), []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc, cur = [], start
        while cur not in seen:
            seen.add(cur)
            cyc.append(cur)
            cur = perm[cur]
        cycles.append(tuple(cyc))
    return cycles


def cycle_value(cycle: Sequence[int], u: UtilityMatrix) -> Fraction:
    k = len(cycle)
    return sum((u.entries[cycle[(m + 1) % k]][cycle[m]] for m in range(k)), Fraction(0))


@dataclass(frozen=True)
class GammaResult:
    value: Fraction
    witness: tuple[int, ...]
    cycles: list[tuple[int, ...]] = field(compare=False)


def gamma(u: UtilityMatrix) -> GammaResult:
    """Exact optimum of the permutation program over non-identity permutations.

    Ties go to the lexicographically smallest permutation.
    """
    q = u.q
    if q > GAMMA_MAX_Q:
        raise ValueError(
            f"exact enumeration needs q <= {GAMMA_MAX_Q} (got {q}); use gamma_sign instead"
        )
    identity = tuple(range(q))
    best_val, best_perm = None, None
    for perm in itertools.permutations(range(q)):
        if perm == identity:
            continue
        val = permutation_value(perm, u)
        if best_val is None or val > best_val:
            best_val, best_perm = val, perm
    return GammaResult(best_val, best_perm, cycle_decomposition(best_perm))


@dataclass(frozen=True)
class GammaSign:
    kind: str  # "negative" | "zero" | "positive"
    witness: tuple[int, ...] | None = None
    witness_value: Fraction | None = None

    @property
    def sign(self) -> int:
        return {"negative": -1, "zero": 0, "positive": 1}[self.kind]


def _positive_cycle(q: int, weight) -> list[int] | None:
    """A simple cycle with positive total ``weight`` on the complete digraph, if any.

    Bellman-Ford on negated weights; exact with Fractions.
    """
    arcs = [(j, i, -weight(j, i)) for j in range(q) for i in range(q) if i != j]
    dist = [Fraction(0)] * q
    pred = [None] * q
    last = None
    for _ in range(q):
        last = None
        for tail, head, w in arcs:
            if dist[tail] + w < dist[head]:
                dist[head] = dist[tail] + w
                pred[head] = tail
                last = head
        if last is None:
            return None
    node = last
    for _ in range(q):
        node = pred[node]
    cycle, cur = [node], pred[node]
    while cur != node:
        cycle.append(cur)
        cur = pred[cur]
    cycle.reverse()  # now follows arc direction tail -> head
    return cycle


def _canonical_cycle(cycle: list[int]) -> tuple[int, ...]:
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


def gamma_sign(u: UtilityMatrix) -> GammaSign:
    """Sign of the permutation optimum via cycle detection (works for any q).

    The sign equals that of the best simple cycle.  Entries are scaled to
    integers and shifted by ``+-1/(q+1)`` per arc, which turns "sum >= 0" and
    "sum >= 1" into strict positive-cycle questions.
    """
    q = u.q
    _, iu = u.integer_entries()
    eps = Fraction(1, q + 1)

    def arc(shift):
        # arc j -> i carries U[i][j]
        return lambda j, i: iu[i][j] + shift

    cyc = _positive_cycle(q, arc(-eps))
    if cyc is not None:
        c = _canonical_cycle(cyc)
        return GammaSign("positive", c, cycle_value(c, u))
    cyc = _positive_cycle(q, arc(eps))
    if cyc is not None:
        c = _canonical_cycle(cyc)
        return GammaSign("zero", c, cycle_value(c, u))
    return GammaSign("negative")


@dataclass(frozen=True)
class Prop1Report:
    holds: bool
    acyclic: bool
    magnitude_ok: bool
    min_negative_magnitude: Fraction | None
    max_nonnegative: Fraction | None
    nonnegative_cycle: tuple[int, ...] | None

    @property
    def failed_clause(self) -> str | None:
        if not self.acyclic:
            return "cycle"
        if not self.magnitude_ok:
            return "magnitude"
        return None


def prop1_holds(u: UtilityMatrix) -> Prop1Report:
    """Sufficient condition for a negative permutation optimum.

    (i) the arcs ``i -> j`` with ``U[i][j] >= 0`` form no directed cycle, and
    (ii) every negative entry exceeds ``(q-1)`` times the largest nonnegative
    off-diagonal entry in magnitude.
    """
    q = u.q
    g = nx.DiGraph()
    g.add_nodes_from(range(q))
    neg, nonneg = [], []
    for i, j, v in u.off_diagonal():
        if v >= 0:
            g.add_edge(i, j)
            nonneg.append(v)
        else:
            neg.append(-v)
    try:
        cyc = tuple(i for i, _ in nx.find_cycle(g))
    except nx.NetworkXNoCycle:
        cyc = None
    min_neg = min(neg) if neg else None
    max_nonneg = max(nonneg) if nonneg else None
    if max_nonneg is None:
        magnitude_ok = True
    elif min_neg is None:
        magnitude_ok = False
    else:
        magnitude_ok = min_neg > (q - 1) * max_nonneg
    acyclic = cyc is None
    return Prop1Report(acyclic and magnitude_ok, acyclic, magnitude_ok, min_neg, max_nonneg, cyc)


def binary_closed_form(y, x, u: UtilityMatrix) -> Fraction:
    """Binary block utility rewritten through the zero-count gap.

    With ``z(.)`` the number of zeros: if ``z(y) <= z(x)`` the value is
    ``(U(1,0) kh + (U(1,0) + U(0,1)) k) / n`` where ``kh = z(x) - z(y)`` and
    ``k`` counts positions with ``y = 0, x = 1``; otherwise it is
    ``(U(0,1) mh + (U(1,0) + U(0,1)) m) / n`` with ``mh = z(y) - z(x)`` and
    ``m`` counting positions with ``y = 1, x = 0``.
    """
    if u.q != 2:
        raise ValueError("closed form is for binary utilities")
    y, x = tuple(y), tuple(x)
    n = len(x)
    if len(y) != n:
        raise ValueError("length mismatch")
    u01, u10 = u[0, 1], u[1, 0]
    zy, zx = y.count(0), x.count(0)
    if zy <= zx:
        k = sum(1 for a, b in zip(y, x) if a == 0 and b == 1)
        return (u10 * (zx - zy) + (u10 + u01) * k) / n
    m = sum(1 for a, b in zip(y, x) if a == 1 and b == 0)
    return (u01 * (zy - zx) + (u10 + u01) * m) / n
