"""Receiver strategies, sender best responses and the game metrics.

A receiver strategy is kept in canonical image-set form: ``g(y) = y`` on the
image and ``g(y) = x0`` elsewhere.  Whatever the sender sends, ``g(s(x))``
lands in the image, so a best response is a utility maximizer over the image
and the anchor never changes an outcome.

Two engines evaluate a strategy:

* the sequence engine walks ``X^n`` with integer-scaled utilities (exact);
* the type engine works on type classes and joint types, valid when the
  image is a union of full type classes.

Pessimistic tie-breaking is applied per source sequence: among the utility
maximizers, one whose distortion exceeds the threshold is chosen if it
exists.  Because the error is a sum of per-sequence indicators this realizes
the worst case over all best responses.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import (
    Distribution,
    Seq,
    TypeVector,
    all_sequences,
    as_fraction,
    check_sequence,
    enumerate_types,
    mismatches,
    sequence_prob,
    type_class_prob,
    type_class_sequences,
    type_class_size,
)
from .transport import max_transport, objective_value
from .utility import UtilityMatrix, sequence_utility

DEFAULT_SEQUENCE_CAP = 2**24
BRUTE_FORCE_MAX_N = 4


@dataclass(frozen=True)
class TieRule:
    kind: str
    threshold: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("worst_case", "lex_min"):
            raise ValueError(f"unknown tie rule {self.kind!r}")
        if self.kind == "worst_case":
            t = as_fraction(self.threshold)
            if not 0 <= t <= 1:
                raise ValueError("worst-case threshold must lie in [0, 1]")
            object.__setattr__(self, "threshold", t)

    @classmethod
    def worst_case(cls, threshold) -> "TieRule":
        return cls("worst_case", as_fraction(threshold))

    @classmethod
    def lex_min(cls) -> "TieRule":
        return cls("lex_min")


@dataclass(frozen=True)
class ReceiverStrategy:
    """Image-set decoder.  Exactly one of ``sequences`` / ``classes`` is set."""

    n: int
    q: int
    anchor: Seq
    sequences: frozenset[Seq] | None = None
    classes: tuple[TypeVector, ...] | None = None

    @property
    def is_type_union(self) -> bool:
        return self.classes is not None

    def contains(self, y: Sequence[int]) -> bool:
        y = tuple(y)
        if self.sequences is not None:
            return y in self.sequences
        counts = [0] * self.q
        for s in y:
            counts[s] += 1
        return TypeVector(counts) in self.classes

    def decode(self, y: Sequence[int]) -> Seq:
        y = tuple(y)
        return y if self.contains(y) else self.anchor

    def image(self) -> list[Seq]:
        """Materialized image in lexicographic order."""
        if self.sequences is not None:
            return sorted(self.sequences)
        out = []
        for t in self.classes:
            out.extend(type_class_sequences(t))
        return sorted(out)

    def image_size(self) -> int:
        if self.sequences is not None:
            return len(self.sequences)
        return sum(type_class_size(t) for t in self.classes)


def make_strategy(image: Iterable, n: int, q: int, anchor="lex_min") -> ReceiverStrategy:
    """Build a canonical strategy from type vectors or explicit sequences.

    ``anchor`` is ``"lex_min"`` or an explicit sequence inside the image.
    """
    items = list(image)
    if not items:
        raise ValueError("the image of a strategy must be nonempty")
    if all(isinstance(it, TypeVector) for it in items):
        classes = tuple(sorted(set(items)))
        for t in classes:
            if t.n != n or t.q != q:
                raise ValueError(f"type {t.counts} does not match n={n}, q={q}")
        lex_anchor = min(t.lex_min_sequence() for t in classes)
        g = ReceiverStrategy(n, q, lex_anchor, classes=classes)
    else:
        seqs = frozenset(check_sequence(s, q) for s in items)
        if any(len(s) != n for s in seqs):
            raise ValueError(f"all image sequences must have length {n}")
        g = ReceiverStrategy(n, q, min(seqs), sequences=seqs)
    if isinstance(anchor, str):
        if anchor != "lex_min":
            raise ValueError(f"unknown anchor rule {anchor!r}")
        return g
    anchor = check_sequence(anchor, q)
    if not g.contains(anchor):
        raise ValueError(f"anchor {anchor} lies outside the image")
    return ReceiverStrategy(n, q, anchor, g.sequences, g.classes)


def _threshold_count(t: Fraction, n: int) -> int:
    """Largest mismatch count whose mean distortion is still <= t."""
    return math.floor(t * n)


def best_response(g: ReceiverStrategy, x: Sequence[int], u: UtilityMatrix, tie: TieRule) -> Seq:
    """Reconstruction the sender induces for source ``x`` (search over the image)."""
    x = check_sequence(x, g.q)
    if len(x) != g.n:
        raise ValueError("source length does not match the strategy")
    scored = [(sequence_utility(y, x, u), y) for y in g.image()]
    top = max(s for s, _ in scored)
    maximizers = [y for s, y in scored if s == top]  # already lexicographic
    if tie.kind == "worst_case":
        limit = _threshold_count(tie.threshold, g.n)
        for y in maximizers:
            if mismatches(y, x) > limit:
                return y
    return maximizers[0]


@dataclass
class GameOutcome:
    """Metrics of one (strategy, utility, source, threshold) evaluation.

    ``rate`` is ``None`` when the set of used reconstructions is empty (the
    log of zero is not a rate) or when only bounds are known; see
    ``rate_exact`` and ``rate_bounds``.
    """

    n: int
    engine: str
    error_prob: Fraction
    coop_recovered_prob: Fraction
    recovered_by_type: dict[tuple[int, ...], int]
    used_size: int | None
    rate: float | None
    rate_exact: bool
    rate_bounds: tuple[float | None, float | None]
    image_size: int | None
    image_rate: float | None
    image_rate_bounds: tuple[float | None, float | None]
    used_reconstructions: frozenset[Seq] | None = None
    used_classes: tuple[TypeVector, ...] | None = None
    recovered_mask: np.ndarray | None = field(default=None, repr=False)

    @property
    def recovered_prob(self) -> Fraction:
        return 1 - self.error_prob

    @property
    def recovered_types(self) -> frozenset[tuple[int, ...]]:
        return frozenset(t for t, c in self.recovered_by_type.items() if c)


def _log_rate(size: int | None, n: int) -> float | None:
    if not size:
        return None
    return math.log2(size) / n


class _SequenceTables:
    """All of ``X^n`` as an integer array, with per-sequence exact weights."""

    def __init__(self, n: int, q: int, cap: int):
        total = q**n
        if total > cap:
            raise ValueError(
                f"q**n = {total} exceeds the sequence cap {cap}; use the type-level engine"
            )
        self.n, self.q = n, q
        self.xs = np.array(list(all_sequences(n, q)), dtype=np.int64).reshape(total, n)
        counts = np.stack([(self.xs == s).sum(axis=1) for s in range(q)], axis=1)
        base = n + 1
        self.type_key = counts @ (base ** np.arange(q - 1, -1, -1))
        self.counts = counts


def _group_count(keys: np.ndarray, mask: np.ndarray) -> dict[int, int]:
    vals, cnt = np.unique(keys[mask], return_counts=True)
    return dict(zip(vals.tolist(), cnt.tolist()))


def _key_to_counts(key: int, n: int, q: int) -> tuple[int, ...]:
    base = n + 1
    out = []
    for _ in range(q):
        key, r = divmod(key, base)
        out.append(r)
    return tuple(reversed(out))


def _prob_from_type_counts(by_key: dict[int, int], n: int, p: Distribution) -> Fraction:
    total = Fraction(0)
    for key in sorted(by_key):
        counts = _key_to_counts(key, n, p.q)
        per_seq = Fraction(1)
        for c, pi in zip(counts, p.probs):
            if c:
                per_seq *= pi**c
        total += by_key[key] * per_seq
    return total


def _score_against_image(xs: np.ndarray, ys: np.ndarray, iu: list[list[int]]):
    """Integer utilities and mismatch counts, shape ``(len(xs), len(ys))``."""
    table = np.array(iu, dtype=np.int64)
    util = np.zeros((xs.shape[0], ys.shape[0]), dtype=np.int64)
    mism = np.zeros_like(util)
    for k in range(xs.shape[1]):
        util += table[ys[None, :, k], xs[:, None, k]]
        mism += ys[None, :, k] != xs[:, None, k]
    return util, mism


def _choose(util: np.ndarray, mism: np.ndarray, tie: TieRule, n: int) -> np.ndarray:
    top = util.max(axis=1, keepdims=True)
    is_max = util == top
    first_max = is_max.argmax(axis=1)
    if tie.kind == "lex_min":
        return first_max
    bad = is_max & (mism > _threshold_count(tie.threshold, n))
    has_bad = bad.any(axis=1)
    return np.where(has_bad, bad.argmax(axis=1), first_max)


def evaluate(g: ReceiverStrategy, u: UtilityMatrix, p: Distribution, d, tie: TieRule | None = None,
             cap: int = DEFAULT_SEQUENCE_CAP, chunk: int = 4096) -> GameOutcome:
    """Sequence-level evaluation over all of ``X^n``."""
    d = as_fraction(d)
    if tie is None:
        tie = TieRule.worst_case(d)
    if u.q != g.q or p.q != g.q:
        raise ValueError("alphabet mismatch between strategy, utility and source")
    n, q = g.n, g.q
    tables = _SequenceTables(n, q, cap)
    image = g.image()
    ys = np.array(image, dtype=np.int64).reshape(len(image), n)
    _, iu = u.integer_entries()
    limit = _threshold_count(d, n)

    total = tables.xs.shape[0]
    chosen = np.empty(total, dtype=np.int64)
    chosen_mism = np.empty(total, dtype=np.int64)
    coop_ok = np.empty(total, dtype=bool)
    for start in range(0, total, chunk):
        xs = tables.xs[start:start + chunk]
        util, mism = _score_against_image(xs, ys, iu)
        pick = _choose(util, mism, tie, n)
        chosen[start:start + chunk] = pick
        chosen_mism[start:start + chunk] = mism[np.arange(len(pick)), pick]
        coop_ok[start:start + chunk] = mism.min(axis=1) <= limit

    recovered = chosen_mism <= limit
    rec_by_key = _group_count(tables.type_key, recovered)
    recovered_prob = _prob_from_type_counts(rec_by_key, n, p)
    coop_prob = _prob_from_type_counts(_group_count(tables.type_key, coop_ok), n, p)
    all_keys = np.unique(tables.type_key).tolist()
    recovered_by_type = {_key_to_counts(k, n, q): rec_by_key.get(k, 0) for k in all_keys}

    used_idx = np.unique(chosen[recovered])
    used = frozenset(image[i] for i in used_idx.tolist())
    reached = len(np.unique(chosen))
    rate = _log_rate(len(used), n)
    image_rate = _log_rate(reached, n)
    return GameOutcome(
        n=n,
        engine="sequence",
        error_prob=1 - recovered_prob,
        coop_recovered_prob=coop_prob,
        recovered_by_type=recovered_by_type,
        used_size=len(used),
        rate=rate,
        rate_exact=True,
        rate_bounds=(rate, rate),
        image_size=reached,
        image_rate=image_rate,
        image_rate_bounds=(image_rate, image_rate),
        used_reconstructions=used,
        recovered_mask=recovered,
    )


@dataclass(frozen=True)
class TypeBest:
    """Best utility of reporting from class ``Q`` against a source of type ``P``."""

    max_utility: Fraction
    max_distortion: Fraction
    min_distortion: Fraction
    w_max: tuple[tuple[int, ...], ...]
    w_min: tuple[tuple[int, ...], ...]


def _offdiag(q: int, sign: int = 1) -> list[list[int]]:
    return [[0 if i == j else sign for j in range(q)] for i in range(q)]


@functools.lru_cache(maxsize=None)
def _type_level_best(px: tuple[int, ...], qc: tuple[int, ...], u: UtilityMatrix) -> TypeBest:
    n = sum(px)
    if sum(qc) != n:
        raise ValueError(f"types of different lengths: {sum(px)} vs {sum(qc)}")
    lcd, iu = u.integer_entries()
    q = u.q
    w_hi = max_transport(qc, px, [iu, _offdiag(q, 1)])
    w_lo = max_transport(qc, px, [iu, _offdiag(q, -1)])
    util = objective_value(w_hi, iu)
    if util != objective_value(w_lo, iu):
        raise AssertionError("lexicographic solves disagree on the optimal utility")
    dist_hi = objective_value(w_hi, _offdiag(q))
    dist_lo = objective_value(w_lo, _offdiag(q))
    return TypeBest(
        Fraction(util, lcd * n),
        Fraction(dist_hi, n),
        Fraction(dist_lo, n),
        tuple(map(tuple, w_hi)),
        tuple(map(tuple, w_lo)),
    )


def type_level_best(px: TypeVector, qclass: TypeVector, u: UtilityMatrix) -> TypeBest:
    """Max of ``U_n(y, x)`` over ``y`` in class ``qclass`` for any ``x`` of type ``px``.

    Also reports the largest and smallest distortion among the maximizers.
    """
    if px.q != u.q or qclass.q != u.q:
        raise ValueError("alphabet mismatch")
    return _type_level_best(px.counts, qclass.counts, u)


def optimal_face_is_point(px: TypeVector, qclass: TypeVector, u: UtilityMatrix) -> bool:
    """True iff exactly one joint type attains the best utility."""
    best = type_level_best(px, qclass, u)
    _, iu = u.integer_entries()
    q = u.q
    for i in range(q):
        for j in range(q):
            if best.w_max[i][j] != best.w_min[i][j]:
                return False
            for sign in (1, -1):
                cell = [[sign if (a, b) == (i, j) else 0 for b in range(q)] for a in range(q)]
                w = max_transport(qclass.counts, px.counts, [iu, cell])
                if w[i][j] != best.w_max[i][j]:
                    return False
    return True


def _column_functional(w) -> bool:
    q = len(w)
    return all(sum(1 for i in range(q) if w[i][j]) <= 1 for j in range(q))


def type_level_evaluate(g: ReceiverStrategy, u: UtilityMatrix, p: Distribution, d,
                        tie: TieRule | None = None, types: Sequence[TypeVector] | None = None
                        ) -> GameOutcome:
    """Type-class evaluation; requires a type-union image and pessimistic ties at ``d``."""
    d = as_fraction(d)
    if not g.is_type_union:
        raise ValueError("the type-level engine needs an image made of full type classes")
    if tie is None:
        tie = TieRule.worst_case(d)
    if tie.kind != "worst_case" or tie.threshold != d:
        raise ValueError("the type-level engine supports only worst_case ties at the threshold d")
    n, q = g.n, g.q
    if types is None:
        types = enumerate_types(n, q)
    limit = _threshold_count(d, n)

    recovered_by_type: dict[tuple[int, ...], int] = {}
    recovered_prob = Fraction(0)
    coop_prob = Fraction(0)
    identity_classes: set[TypeVector] = set()
    reached_upper: set[TypeVector] = set()
    used_upper: set[TypeVector] = set()
    unique_targets: dict[TypeVector, TypeVector] = {}
    all_recovered_identity = True

    for t in types:
        bests = {c: type_level_best(t, c, u) for c in g.classes}
        top = max(b.max_utility for b in bests.values())
        winners = [c for c, b in bests.items() if b.max_utility == top]
        worst = max(bests[c].max_distortion for c in winners)
        ok = worst * n <= limit
        size = type_class_size(t)
        prob = type_class_prob(t, p)
        recovered_by_type[t.counts] = size if ok else 0
        if ok:
            recovered_prob += prob
            used_upper.update(winners)
        reached_upper.update(winners)
        is_identity = winners == [t] and bests[t].max_distortion == 0
        if is_identity:
            identity_classes.add(t)
        elif len(winners) == 1:
            unique_targets.setdefault(winners[0], t)
        if ok and not is_identity:
            all_recovered_identity = False
        closest = min(n - sum(min(a, b) for a, b in zip(t.counts, c.counts)) for c in g.classes)
        if closest <= limit:
            coop_prob += prob

    # classes hit in full: identity classes, plus classes that are the unique
    # target of some source type with a unique, column-functional optimum
    reached_lower = set(identity_classes)
    for c, t in unique_targets.items():
        if c in reached_lower:
            continue
        w = type_level_best(t, c, u).w_max
        if _column_functional(w) and optimal_face_is_point(t, c, u):
            reached_lower.add(c)

    def total(classes):
        return sum(type_class_size(c) for c in classes)

    recovered_types = [t for t, c in recovered_by_type.items() if c]
    if not recovered_types:
        rate, rate_exact, bounds, used_size, used_classes = None, True, (None, None), 0, ()
    elif all_recovered_identity:
        used_classes = tuple(sorted(TypeVector(t) for t in recovered_types))
        used_size = total(used_classes)
        rate = _log_rate(used_size, n)
        rate_exact, bounds = True, (rate, rate)
    else:
        used_classes = None
        used_size = None
        identified = [c for c in identity_classes if recovered_by_type[c.counts]]
        rate, rate_exact = None, False
        bounds = (_log_rate(total(identified), n), _log_rate(total(used_upper), n))

    img_lo, img_hi = total(reached_lower), total(reached_upper)
    image_exact = img_lo == img_hi
    return GameOutcome(
        n=n,
        engine="type",
        error_prob=1 - recovered_prob,
        coop_recovered_prob=coop_prob,
        recovered_by_type=recovered_by_type,
        used_size=used_size,
        rate=rate,
        rate_exact=rate_exact,
        rate_bounds=bounds,
        image_size=img_hi if image_exact else None,
        image_rate=_log_rate(img_hi, n) if image_exact else None,
        image_rate_bounds=(_log_rate(img_lo, n), _log_rate(img_hi, n)),
        used_classes=used_classes,
    )


def evaluate_auto(g: ReceiverStrategy, u: UtilityMatrix, p: Distribution, d, tie=None,
                  engine: str = "auto", cap: int = DEFAULT_SEQUENCE_CAP) -> GameOutcome:
    if engine == "auto":
        engine = "sequence" if g.q**g.n <= cap else "type"
    if engine == "sequence":
        return evaluate(g, u, p, d, tie, cap=cap)
    if engine == "type":
        return type_level_evaluate(g, u, p, d, tie)
    raise ValueError(f"unknown engine {engine!r}")


def compose_time_share(g1: ReceiverStrategy, g2: ReceiverStrategy) -> ReceiverStrategy:
    """Product strategy on a block of length ``n1 + n2``."""
    if g1.q != g2.q:
        raise ValueError("time sharing needs a common alphabet")
    image = frozenset(a + b for a in g1.image() for b in g2.image())
    return ReceiverStrategy(g1.n + g2.n, g1.q, g1.anchor + g2.anchor, sequences=image)


@dataclass(frozen=True)
class BruteForceResult:
    min_error: Fraction
    witness: ReceiverStrategy
    subsets_searched: int


def brute_force_min_error(n: int, p: Distribution, u: UtilityMatrix, d, q: int = 2
                          ) -> BruteForceResult:
    """Smallest worst-case error over every image set (anchors are irrelevant).

    The error of an image ``S`` is the mass of sources having some utility
    maximizer in ``S`` beyond distortion ``d``.  Ties among minimal images go
    to the smallest bitmask (bit ``k`` = ``k``-th sequence of ``X^n``).
    """
    d = as_fraction(d)
    if q != 2 or u.q != 2 or p.q != 2:
        raise ValueError("brute force search is implemented for the binary alphabet")
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"instance too large: n={n} > {BRUTE_FORCE_MAX_N}")
    seqs = list(all_sequences(n, q))
    m = len(seqs)
    xs = np.array(seqs, dtype=np.int64).reshape(m, n)
    _, iu = u.integer_entries()
    util, mism = _score_against_image(xs, xs, iu)  # [x, y]
    limit = _threshold_count(d, n)

    masks = np.arange(1, 2**m, dtype=np.int64)
    member = ((masks[:, None] >> np.arange(m)[None, :]) & 1).astype(bool)
    probs = [sequence_prob(x, p) for x in seqs]
    lcd = math.lcm(*(pr.denominator for pr in probs))
    weights = [int(pr * lcd) for pr in probs]
    error = np.zeros(len(masks), dtype=object if max(weights) * m > 2**62 else np.int64)
    floor = np.iinfo(np.int64).min
    for xi in range(m):
        vals = np.where(member, util[xi][None, :], floor)
        top = vals.max(axis=1, keepdims=True)
        bad = (member & (vals == top) & (mism[xi][None, :] > limit)).any(axis=1)
        error = error + bad.astype(np.int64) * weights[xi]
    best = int(np.argmin(error))
    chosen = [seqs[k] for k in range(m) if member[best, k]]
    witness = make_strategy(chosen, n, q)
    return BruteForceResult(Fraction(int(error[best]), lcd), witness, len(masks))
