"""Rate-region classification, the mismatched distortion-rate bound and the P' entropy bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .core import Distribution, as_fraction, binary_entropy, entropy, rd_binary
from .ratedist import rd_blahut_arimoto
from .transport import max_transport, objective_value
from .utility import UtilityMatrix, gamma_sign

MI_TOL = 1e-12


@dataclass(frozen=True)
class Bound:
    """A rate endpoint: ``kind`` is ``exact``, ``upper`` or ``lower``."""

    value: float
    kind: str
    clause: str

    def to_json(self) -> dict:
        return {"value": self.value, "kind": self.kind, "clause": self.clause}


@dataclass
class RegionReport:
    emptiness: str  # "empty" | "nonempty" | "unknown_gamma_zero" | "unknown"
    capacity: float
    r_inf: Bound | None = None
    r_sup: Bound | None = None
    strong_converse: bool = False
    strong_converse_precondition: str | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "emptiness": self.emptiness,
            "capacity": self.capacity,
            "r_inf": self.r_inf.to_json() if self.r_inf else None,
            "r_sup": self.r_sup.to_json() if self.r_sup else None,
            "strong_converse": self.strong_converse,
            "strong_converse_precondition": self.strong_converse_precondition,
            "notes": list(self.notes),
        }


def _classify_binary(u: UtilityMatrix, p: Fraction, d: Fraction) -> RegionReport:
    u01, u10 = u[0, 1], u[1, 0]
    total = u01 + u10
    rep = RegionReport("nonempty", 1.0)
    if d == 0:
        if total >= 0:
            rep.emptiness = "empty"
            rep.strong_converse = True
            rep.notes.append("error tends to one for every strategy sequence")
            return rep
        rep.r_inf = Bound(binary_entropy(p), "exact", "binary-lossless")
        if u01 < 0 and u10 < 0:
            rep.r_sup = Bound(1.0, "exact", "binary-lossless-truthful")
            return rep
        a, b = u.a, u.b
        ratio = Fraction(1, 2) if a == 0 else min(b * p / a, Fraction(1, 2))
        rep.r_sup = Bound(binary_entropy(ratio), "upper", "binary-lossless-mixed-sign")
        rep.strong_converse = u10 == -b and u01 == a
        rep.strong_converse_precondition = "U(1,0) = -b and U(0,1) = a"
        return rep

    # lossy: relabel so that p <= 1/2
    if p > Fraction(1, 2):
        p = 1 - p
        u01, u10 = u10, u01
        rep.notes.append("symbols relabelled so that P(0) <= 1/2")
    if d >= p:
        rep.r_inf = Bound(0.0, "exact", "binary-lossy-large-distortion")
        rep.notes.append("a single reconstruction meets the distortion level")
        if total >= 0:
            return rep
    elif total >= 0:
        rep.emptiness = "empty"
        return rep
    else:
        rep.r_inf = Bound(rd_binary(p, d), "exact", "binary-lossy")
    if (u01 < 0 and u10 < 0) or p + d >= Fraction(1, 2):
        rep.r_sup = Bound(1.0, "exact", "binary-lossy-upper")
    else:
        rep.r_sup = Bound(binary_entropy(p + d), "lower", "binary-lossy-upper")
    return rep


def _classify_general(u: UtilityMatrix, p: Distribution, d: Fraction) -> RegionReport:
    q = u.q
    rep = RegionReport("nonempty", math.log2(q))
    sign = gamma_sign(u)
    offdiag = [v for _, _, v in u.off_diagonal()]
    if d == 0:
        if sign.kind == "positive":
            rep.emptiness = "empty"
            rep.notes.append(f"positive cycle {sign.witness} with value {sign.witness_value}")
        elif sign.kind == "zero":
            rep.emptiness = "unknown_gamma_zero"
            rep.notes.append(f"zero-valued cycle {sign.witness}")
        else:
            rep.r_inf = Bound(entropy(p.probs), "exact", "general-lossless")
            if all(v < 0 for v in offdiag):
                rep.r_sup = Bound(math.log2(q), "exact", "general-lossless-truthful")
        return rep

    if sign.kind != "negative":
        rep.emptiness = "unknown"
        rep.notes.append(f"permutation optimum is {sign.kind}; lossy region not characterized")
        return rep
    if len(set(offdiag)) == 1 and offdiag[0] < 0:
        rep.r_inf = Bound(rd_blahut_arimoto(p, d), "exact", "general-lossy-constant")
        rep.r_sup = Bound(math.log2(q), "exact", "general-lossy-constant")
    else:
        value, _ = pprime_entropy_bound(p, d)
        rep.r_inf = Bound(value, "upper", "general-lossy-perturbed")
    return rep


def classify_region(u: UtilityMatrix, p: Distribution, d) -> RegionReport:
    """Emptiness and endpoint information for the achievable rate region."""
    d = as_fraction(d)
    if not 0 <= d < 1:
        raise ValueError(f"distortion level must lie in [0, 1), got {d}")
    if u.q != p.q:
        raise ValueError("alphabet mismatch between utility and source")
    if u.q == 2:
        return _classify_binary(u, p[0], d)
    return _classify_general(u, p, d)


def pprime_entropy_bound(p: Distribution, d) -> tuple[float, Distribution]:
    """Least entropy over sources obtained by moving ``d/(q-1)`` from one symbol to another."""
    d = as_fraction(d)
    q = p.q
    if d == 0:
        return entropy(p.probs), p
    step = d / (q - 1)
    best = None
    for j in range(q):
        for k in range(q):
            if j == k:
                continue
            probs = list(p.probs)
            probs[j] += step
            probs[k] -= step
            if probs[k] < 0 or probs[j] > 1:
                continue
            h = entropy(probs)
            if best is None or h < best[0]:
                best = (h, Distribution(probs))
    if best is None:
        raise ValueError(f"moving {step} between any two symbols leaves the simplex")
    return best


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator in ``[lo, hi]`` (continued fractions)."""
    if lo > hi:
        raise ValueError("empty interval")
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part; recurse on the reciprocals of the fractional parts
    rest = simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / rest


@dataclass(frozen=True)
class DbarProblem:
    """Inputs of the distortion bound for one reconstruction marginal ``p0``."""

    px: Distribution
    p0: Distribution
    rate: float
    u: UtilityMatrix
    regime: str  # "binary_exact" | "mi_inactive"

    def __post_init__(self):
        if self.regime not in ("binary_exact", "mi_inactive"):
            raise ValueError(f"unknown regime {self.regime!r}")
        if not (self.px.q == self.p0.q == self.u.q):
            raise ValueError("alphabet mismatch")
        if self.regime == "binary_exact" and self.u.q != 2:
            raise ValueError("binary_exact regime needs q = 2")
        if self.regime == "mi_inactive" and self.rate < entropy(self.p0.probs) - MI_TOL:
            raise ValueError("mi_inactive regime needs rate >= H(p0)")


def _binary_mi(px0: Fraction, p00: Fraction, s: float) -> float:
    """Mutual information of the binary joint with ``W(1,0) = s``."""
    w = [float(px0) - s, float(p00 - px0) + s, s, 1.0 - float(p00) - s]
    cells = [v for v in w if v > 0]
    return entropy([float(px0), 1 - float(px0)]) + entropy([float(p00), 1 - float(p00)]) - entropy(cells)


def _mi_boundary(px0, p00, s_inner: Fraction, s_outer: Fraction, rate: float) -> Fraction:
    """Point between the independent joint and an infeasible endpoint where MI hits ``rate``."""
    a, b = float(s_inner), float(s_outer)
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        if _binary_mi(px0, p00, mid) <= rate:
            a = mid
        else:
            b = mid
    fa, fb = Fraction(a), Fraction(b)
    lo, hi = min(fa, fb), max(fa, fb)
    return simplest_between(lo - Fraction(MI_TOL), hi + Fraction(MI_TOL))


def _dbar_binary(prob: DbarProblem) -> Fraction:
    px0, p00 = prob.px[0], prob.p0[0]
    lo = max(Fraction(0), px0 - p00)
    hi = min(px0, 1 - p00)
    s_ind = (1 - p00) * px0
    gsum = prob.u[0, 1] + prob.u[1, 0]
    target = lo if gsum < 0 else hi
    if _binary_mi(px0, p00, float(target)) <= prob.rate + MI_TOL:
        s = target
    else:
        s = _mi_boundary(px0, p00, s_ind, target, prob.rate)
    return p00 - px0 + 2 * s


def _dbar_transport(prob: DbarProblem) -> Fraction:
    scale = math.lcm(*(v.denominator for v in prob.px.probs + prob.p0.probs))
    cols = [int(v * scale) for v in prob.px.probs]
    rows = [int(v * scale) for v in prob.p0.probs]
    _, iu = prob.u.integer_entries()
    q = prob.u.q
    off = [[0 if i == j else 1 for j in range(q)] for i in range(q)]
    w = max_transport(rows, cols, [iu, off])
    return Fraction(objective_value(w, off), scale)


def dbar(prob: DbarProblem) -> Fraction:
    """Worst expected distortion among utility-maximizing joints for the given ``p0``."""
    if prob.regime == "binary_exact":
        return _dbar_binary(prob)
    return _dbar_transport(prob)


def dbar_min(px: Distribution, candidates: Iterable[Distribution], rate: float,
             u: UtilityMatrix, regime: str) -> tuple[Fraction, Distribution]:
    """Smallest bound over caller-supplied reconstruction marginals (first one wins ties)."""
    best = None
    for p0 in candidates:
        val = dbar(DbarProblem(px, p0, rate, u, regime))
        if best is None or val < best[0]:
            best = (val, p0)
    if best is None:
        raise ValueError("no candidate marginals supplied")
    return best


def rd_marginal(p, d) -> Fraction:
    """Reconstruction marginal ``(p - d) / (1 - 2d)`` of the binary test channel."""
    p, d = as_fraction(p), as_fraction(d)
    return (p - d) / (1 - 2 * d)


def binary_test_channel_point(p, d) -> Fraction:
    """Mass ``W(1,0)`` of the binary test channel at distortion ``d``."""
    p, d = as_fraction(p), as_fraction(d)
    return p - rd_marginal(p, d) * (1 - d)

