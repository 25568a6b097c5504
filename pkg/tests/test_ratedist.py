import math
from fractions import Fraction

import pytest

from stratcomm.core import Distribution, entropy, rd_binary
from stratcomm.ratedist import rd_blahut_arimoto


def h(x):
    return 0.0 if x in (0, 1) else -(x * math.log2(x) + (1 - x) * math.log2(1 - x))


def test_zero_distortion_is_entropy():
    p = Distribution([Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)])
    assert rd_blahut_arimoto(p, 0) == pytest.approx(entropy(p.probs), abs=1e-12)


@pytest.mark.parametrize("p,d", [("0.3", "0.1"), ("0.5", "0.25"), ("0.1", "0.05"), ("0.4", "0.01")])
def test_binary_matches_closed_form(p, d):
    got = rd_blahut_arimoto(Distribution.binary(p), d)
    assert got == pytest.approx(h(float(Fraction(p))) - h(float(Fraction(d))), abs=1e-6)
    assert got == pytest.approx(rd_binary(p, d), abs=1e-6)


def test_uniform_quaternary_closed_form():
    oracle = 2 - h(0.25) - 0.25 * math.log2(3)
    assert oracle == pytest.approx(0.79248, abs=1e-5)
    got = rd_blahut_arimoto(Distribution([Fraction(1, 4)] * 4), Fraction(1, 4))
    assert got == pytest.approx(oracle, abs=1e-6)


def test_beyond_maximal_distortion_is_zero():
    assert rd_blahut_arimoto(Distribution.binary("0.3"), "0.3") == 0.0
    assert rd_blahut_arimoto(Distribution([Fraction(1, 3)] * 3), "0.9") == 0.0


def test_nonincreasing_in_d():
    p = Distribution([Fraction(1, 2), Fraction(3, 10), Fraction(1, 5)])
    values = [rd_blahut_arimoto(p, Fraction(k, 40)) for k in range(0, 21)]
    assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        rd_blahut_arimoto(Distribution.binary("0.3"), "1.5")
    with pytest.raises(ValueError):
        rd_blahut_arimoto(Distribution.binary("0.3"), "0.1", tol=0)
