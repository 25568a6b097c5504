"""Alphabets, distributions, sequences and method-of-types combinatorics.

Everything that decides a game outcome (counts, distortions, utilities) is
kept in exact integers or :class:`fractions.Fraction`; only entropies and
log-probabilities are floats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

DEFAULT_TYPE_CAP = 10**7

Seq = tuple[int, ...]


class CapExceeded(RuntimeError):
    """An enumeration would produce more items than the configured cap."""


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, "num/den" string or decimal string.

    Floats are converted through ``repr`` so that ``0.3`` becomes ``3/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


@dataclass(frozen=True)
class Alphabet:
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.q}")


@dataclass(frozen=True)
class Distribution:
    """A probability vector over ``0..q-1`` with exact rational entries."""

    probs: tuple[Fraction, ...]

    def __init__(self, probs: Iterable):
        ps = tuple(as_fraction(p) for p in probs)
        if len(ps) < 2:
            raise ValueError("distribution needs at least two symbols")
        if any(p < 0 or p > 1 for p in ps):
            raise ValueError(f"probabilities must lie in [0, 1]: {ps}")
        if sum(ps) != 1:
            raise ValueError(f"probabilities must sum to exactly 1, got {sum(ps)}")
        object.__setattr__(self, "probs", ps)

    @property
    def q(self) -> int:
        return len(self.probs)

    def __getitem__(self, i: int) -> Fraction:
        return self.probs[i]

    def __iter__(self):
        return iter(self.probs)

    def __len__(self):
        return len(self.probs)

    @classmethod
    def binary(cls, p) -> "Distribution":
        """Bernoulli source with ``P(0) = p``."""
        p = as_fraction(p)
        return cls((p, 1 - p))


@dataclass(frozen=True, order=True)
class TypeVector:
    """Symbol counts of a length-``n`` sequence."""

    counts: tuple[int, ...]

    def __init__(self, counts: Iterable[int]):
        cs = tuple(int(c) for c in counts)
        if len(cs) < 2 or any(c < 0 for c in cs):
            raise ValueError(f"invalid type counts {cs}")
        if sum(cs) < 1:
            raise ValueError("type must describe a sequence of length >= 1")
        object.__setattr__(self, "counts", cs)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def q(self) -> int:
        return len(self.counts)

    def freq(self, i: int) -> Fraction:
        return Fraction(self.counts[i], self.n)

    def as_distribution(self) -> Distribution:
        return Distribution(Fraction(c, self.n) for c in self.counts)

    def lex_min_sequence(self) -> Seq:
        return tuple(i for i, c in enumerate(self.counts) for _ in range(c))


@dataclass(frozen=True)
class JointType:
    """Count matrix ``W[i][j]`` = #positions with reconstruction ``i`` and truth ``j``."""

    counts: tuple[tuple[int, ...], ...]

    def __init__(self, counts):
        rows = tuple(tuple(int(c) for c in row) for row in counts)
        q = len(rows)
        if q < 2 or any(len(r) != q for r in rows):
            raise ValueError("joint type must be a square matrix")
        if any(c < 0 for r in rows for c in r):
            raise ValueError("joint type counts must be nonnegative")
        object.__setattr__(self, "counts", rows)

    @property
    def q(self) -> int:
        return len(self.counts)

    @property
    def n(self) -> int:
        return sum(map(sum, self.counts))

    def row_type(self) -> TypeVector:
        return TypeVector(sum(r) for r in self.counts)

    def col_type(self) -> TypeVector:
        return TypeVector(sum(r[j] for r in self.counts) for j in range(self.q))

    def mismatches(self) -> int:
        return sum(c for i, r in enumerate(self.counts) for j, c in enumerate(r) if i != j)

    def is_diagonal(self) -> bool:
        return self.mismatches() == 0


def check_sequence(x: Sequence[int], q: int) -> Seq:
    x = tuple(int(s) for s in x)
    if not x:
        raise ValueError("sequence must have length >= 1")
    if any(s < 0 or s >= q for s in x):
        raise ValueError(f"sequence {x} has symbols outside 0..{q - 1}")
    return x


def empirical_type(x: Sequence[int], q: int) -> TypeVector:
    x = check_sequence(x, q)
    counts = [0] * q
    for s in x:
        counts[s] += 1
    return TypeVector(counts)


def joint_type(y: Sequence[int], x: Sequence[int], q: int) -> JointType:
    """Joint type of reconstruction ``y`` (rows) against truth ``x`` (columns)."""
    y = check_sequence(y, q)
    x = check_sequence(x, q)
    if len(y) != len(x):
        raise ValueError(f"length mismatch: {len(y)} != {len(x)}")
    w = [[0] * q for _ in range(q)]
    for a, b in zip(y, x):
        w[a][b] += 1
    return JointType(w)


def count_types(n: int, q: int) -> int:
    return math.comb(n + q - 1, q - 1)


def _compositions(n: int, q: int) -> Iterator[tuple[int, ...]]:
    if q == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, q - 1):
            yield (first,) + rest


def enumerate_types(n: int, q: int, cap: int = DEFAULT_TYPE_CAP) -> list[TypeVector]:
    """All types of length-``n`` sequences over ``q`` symbols, lexicographic."""
    if n < 1 or q < 2:
        raise ValueError(f"need n >= 1 and q >= 2, got n={n}, q={q}")
    total = count_types(n, q)
    if total > cap:
        raise CapExceeded(f"{total} types for n={n}, q={q} exceeds cap {cap}")
    return [TypeVector(c) for c in _compositions(n, q)]


def type_class_size(t: TypeVector) -> int:
    size, left = 1, t.n
    for c in t.counts:
        size *= math.comb(left, c)
        left -= c
    return size


def type_class_prob(t: TypeVector, p: Distribution) -> Fraction:
    """Exact i.i.d. probability of the whole type class."""
    if t.q != p.q:
        raise ValueError("alphabet mismatch")
    prob = Fraction(type_class_size(t))
    for c, pi in zip(t.counts, p.probs):
        if c:
            prob *= pi**c
    return prob


def sequence_prob(x: Sequence[int], p: Distribution) -> Fraction:
    prob = Fraction(1)
    for s in x:
        prob *= p.probs[s]
    return prob


def log_type_class_prob(t: TypeVector, p: Distribution) -> float:
    if t.q != p.q:
        raise ValueError("alphabet mismatch")
    total = math.log2(type_class_size(t))
    for c, pi in zip(t.counts, p.probs):
        if c == 0:
            continue
        if pi == 0:
            return -math.inf
        total += c * math.log2(pi)
    return total


def typical_types(p: Distribution, eps, n: int, cap: int = DEFAULT_TYPE_CAP) -> list[TypeVector]:
    """Types with ``|P_x(i) - P(i)| < eps`` for every symbol (strict)."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return [
        t
        for t in enumerate_types(n, p.q, cap)
        if all(abs(Fraction(c, n) - pi) < eps for c, pi in zip(t.counts, p.probs))
    ]


def mismatches(y: Sequence[int], x: Sequence[int]) -> int:
    if len(y) != len(x):
        raise ValueError(f"length mismatch: {len(y)} != {len(x)}")
    return sum(a != b for a, b in zip(y, x))


def hamming(y: Sequence[int], x: Sequence[int]) -> Fraction:
    """Mean Hamming distance as an exact rational."""
    return Fraction(mismatches(y, x), len(x))


def entropy(p: Iterable) -> float:
    total = 0.0
    for pi in p:
        pi = float(pi)
        if pi > 0:
            total -= pi * math.log2(pi)
    return total


def binary_entropy(p) -> float:
    p = float(p)
    return entropy((p, 1.0 - p))


def rd_binary(p, d) -> float:
    """Rate-distortion function of a Bernoulli(p) source, Hamming distortion."""
    p, d = as_fraction(p), as_fraction(d)
    if not 0 <= p <= Fraction(1, 2):
        raise ValueError(f"rd_binary expects 0 <= p <= 1/2, got {p}")
    if d < 0:
        raise ValueError("distortion must be nonnegative")
    if d >= p:
        return 0.0
    return binary_entropy(p) - binary_entropy(d)


def all_sequences(n: int, q: int) -> Iterator[Seq]:
    """``X^n`` in lexicographic order."""
    return itertools.product(range(q), repeat=n)


def type_class_sequences(t: TypeVector) -> Iterator[Seq]:
    """Members of a type class in lexicographic order (multiset permutations)."""
    counts = list(t.counts)
    n = t.n
    out = [0] * n

    def rec(pos: int):
        if pos == n:
            yield tuple(out)
            return
        for s, c in enumerate(counts):
            if c:
                counts[s] -= 1
                out[pos] = s
                yield from rec(pos + 1)
                counts[s] += 1

    yield from rec(0)
