import math
import random
from fractions import Fraction

import pytest

from stratcomm.core import Distribution, binary_entropy, rd_binary
from stratcomm.rates import (
    DbarProblem,
    binary_test_channel_point,
    classify_region,
    dbar,
    dbar_min,
    pprime_entropy_bound,
    rd_marginal,
    simplest_between,
)
from stratcomm.utility import UtilityMatrix, gamma

P03 = Distribution.binary("3/10")


def h(x):
    return 0.0 if x in (0, 1) else -(x * math.log2(x) + (1 - x) * math.log2(1 - x))


def test_classify_binary_lossless():
    r = classify_region(UtilityMatrix.binary(1, -1), P03, 0)
    assert r.emptiness == "empty" and r.strong_converse
    r = classify_region(UtilityMatrix.binary(-2, 1), P03, 0)
    assert r.emptiness == "nonempty"
    assert r.r_inf.value == pytest.approx(0.881291, abs=1e-6) and r.r_inf.kind == "exact"
    assert r.r_sup.kind == "upper" and r.r_sup.value == pytest.approx(1.0)
    r = classify_region(UtilityMatrix.binary(-1, -1), P03, 0)
    assert (r.r_inf.value, r.r_sup.value, r.r_sup.kind) == (pytest.approx(h(0.3)), 1.0, "exact")


def test_classify_binary_lossless_mixed_sign_bound():
    # a = 1, b = 2, p = 1/10: H(min(2 * 0.1 / 1, 1/2)) = H(0.2)
    r = classify_region(UtilityMatrix.binary(1, -2), Distribution.binary("1/10"), 0)
    assert r.r_sup.value == pytest.approx(h(0.2), abs=1e-12)
    assert r.strong_converse_precondition


def test_classify_binary_lossy():
    u = UtilityMatrix.binary(1, -2)
    r = classify_region(u, P03, "1/10")
    assert r.r_inf.value == pytest.approx(h(0.3) - h(0.1), abs=1e-12)
    assert r.r_sup.kind == "lower" and r.r_sup.value == pytest.approx(h(0.4), abs=1e-12)
    r = classify_region(u, P03, "1/4")
    assert r.r_sup.value == 1.0 and r.r_sup.kind == "exact"
    assert classify_region(UtilityMatrix.binary(1, 0), P03, "1/10").emptiness == "empty"
    r = classify_region(u, P03, "3/10")
    assert r.r_inf.value == 0.0 and r.emptiness == "nonempty"


def test_binary_emptiness_tracks_gamma():
    rng = random.Random(21)
    for _ in range(200):
        u = UtilityMatrix.binary(rng.randint(-4, 4), rng.randint(-4, 4))
        dk = rng.randint(0, 4)
        d = Fraction(dk, 20)
        p = Fraction(dk + rng.randint(1, 10 - dk), 20)
        rep = classify_region(u, Distribution.binary(p), d)
        assert (rep.emptiness == "empty") == (gamma(u).value >= 0)


def test_classify_general():
    u1 = UtilityMatrix([[0, 1, 1], [-4, 0, 1], [-4, -4, 0]])
    p = Distribution([Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)])
    r = classify_region(u1, p, 0)
    assert r.emptiness == "nonempty" and r.r_sup is None
    assert r.r_inf.value == pytest.approx(-(0.5 * math.log2(0.5) + math.log2(1 / 3) / 3 + math.log2(1 / 6) / 6))
    zero = UtilityMatrix([[0] * 3 for _ in range(3)])
    assert classify_region(zero, p, 0).emptiness == "unknown_gamma_zero"
    pos = UtilityMatrix([[0, 1, -5], [-5, 0, 1], [1, -5, 0]])
    assert classify_region(pos, p, 0).emptiness == "empty"
    neg = UtilityMatrix([[0 if i == j else -1 for j in range(3)] for i in range(3)])
    r = classify_region(neg, p, 0)
    assert r.r_sup.value == pytest.approx(math.log2(3))
    r = classify_region(neg, p, "1/10")
    assert r.r_sup.kind == "exact" and 0 < r.r_inf.value < r.r_sup.value


def test_classify_rejects_bad_inputs():
    with pytest.raises(ValueError):
        classify_region(UtilityMatrix.binary(-1, -1), P03, 1)
    with pytest.raises(ValueError):
        classify_region(UtilityMatrix.binary(-1, -1), Distribution([Fraction(1, 3)] * 3), 0)


def test_pprime_examples():
    v, w = pprime_entropy_bound(P03, 0)
    assert w == P03 and v == pytest.approx(h(0.3))
    v, w = pprime_entropy_bound(P03, "1/10")
    assert v == pytest.approx(h(0.2), abs=1e-12) and w.probs == (Fraction(1, 5), Fraction(4, 5))
    uni = Distribution([Fraction(1, 3)] * 3)
    v, w = pprime_entropy_bound(uni, "3/10")
    assert v < math.log2(3) and w.probs[0] == Fraction(1, 3) + Fraction(3, 20)


def test_pprime_dominates_rate_distortion():
    for pk in range(1, 6):
        p = Fraction(pk, 10)
        for dk in range(1, pk * 2):
            d = Fraction(dk, 20)
            if d >= p:
                continue
            v, _ = pprime_entropy_bound(Distribution.binary(p), d)
            assert v >= rd_binary(p, d) - 1e-12


def test_simplest_between():
    assert simplest_between(Fraction(3, 10), Fraction(3, 10)) == Fraction(3, 10)
    assert simplest_between(Fraction(1, 3) - Fraction(1, 10**9), Fraction(1, 3) + Fraction(1, 10**9)) == Fraction(1, 3)
    assert simplest_between(Fraction(1, 2), Fraction(3)) == 1
    with pytest.raises(ValueError):
        simplest_between(Fraction(1), Fraction(0))


@pytest.mark.parametrize("u", [UtilityMatrix.binary(1, -2), UtilityMatrix.binary(-3, 1), UtilityMatrix.binary(-1, -1)])
@pytest.mark.parametrize("p", [Fraction(1, 10), Fraction(3, 10)])
@pytest.mark.parametrize("d", [Fraction(1, 20), Fraction(1, 10)])
def test_dbar_anchor_values(u, p, d):
    px = Distribution.binary(p)
    assert dbar(DbarProblem(px, px, binary_entropy(p), u, "binary_exact")) == 0
    assert dbar(DbarProblem(px, Distribution.binary(p + d), binary_entropy(p + d), u, "binary_exact")) == d
    pstar = rd_marginal(p, d)
    assert dbar(DbarProblem(px, Distribution.binary(pstar), rd_binary(p, d), u, "binary_exact")) == d


def test_test_channel_point():
    p, d = Fraction(3, 10), Fraction(1, 10)
    s = binary_test_channel_point(p, d)
    p0 = rd_marginal(p, d)
    # joint W(1,0) = P(xhat=1, x=0) = (1 - p0) * d and distortion is d
    assert s == (1 - p0) * d
    assert (p0 - p) + 2 * s == d


def test_dbar_monotone_in_rate():
    u = UtilityMatrix.binary(1, -2)
    px = P03
    for p0 in (Fraction(1, 5), Fraction(2, 5), Fraction(1, 2)):
        vals = [dbar(DbarProblem(px, Distribution.binary(p0), r / 20, u, "binary_exact")) for r in range(21)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_dbar_transport_regime():
    u = UtilityMatrix([[0, -1, -2], [-1, 0, -3], [-1, -1, 0]])
    px = Distribution([Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)])
    assert dbar(DbarProblem(px, px, math.log2(3), u, "mi_inactive")) == 0
    p0 = Distribution([Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)])
    assert dbar(DbarProblem(px, p0, math.log2(3), u, "mi_inactive")) == Fraction(1, 6)
    with pytest.raises(ValueError):
        DbarProblem(px, p0, 1.0, u, "mi_inactive")
    val, best = dbar_min(px, [p0, px], math.log2(3), u, "mi_inactive")
    assert val == 0 and best == px


def test_dbar_regime_validation():
    with pytest.raises(ValueError):
        DbarProblem(P03, P03, 1.0, UtilityMatrix.binary(-1, -1), "other")
    with pytest.raises(ValueError):
        DbarProblem(Distribution([Fraction(1, 3)] * 3), Distribution([Fraction(1, 3)] * 3), 2.0,
                    UtilityMatrix([[0, -1, -1], [-1, 0, -1], [-1, -1, 0]]), "binary_exact")
