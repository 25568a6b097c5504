"""Acceptance criteria, one test (or a small group) per criterion.

Run ``pytest tests/test_acceptance.py`` for the pass/fail summary printed at
the end of the session.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from stratcomm import experiments as ex
from stratcomm.cli import main
from stratcomm.core import Distribution, all_sequences, hamming, rd_binary, sequence_prob
from stratcomm.game import _type_level_best, brute_force_min_error
from stratcomm.ratedist import rd_blahut_arimoto
from stratcomm.utility import UtilityMatrix, gamma, sequence_utility

criterion = pytest.mark.criterion


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f}s, limit {self.limit}s"


def permutation_oracle(entries):
    q = len(entries)
    return max(sum(Fraction(entries[perm[j]][j]) for j in range(q))
               for perm in itertools.permutations(range(q)) if list(perm) != list(range(q)))


@pytest.fixture(scope="module")
def example2_result():
    start = time.perf_counter()
    res = ex.example2()
    return res, time.perf_counter() - start


@pytest.fixture(scope="module")
def example3_report():
    _type_level_best.cache_clear()
    start = time.perf_counter()
    rep = ex.example3_report()
    return rep, time.perf_counter() - start


@criterion(1, "gamma anchors for the three- and four-symbol examples")
def test_gamma_anchors():
    with Timer(1):
        g1 = gamma(UtilityMatrix(ex.EXAMPLE1_U)).value
        g3 = gamma(UtilityMatrix(ex.EXAMPLE3_U)).value
    assert g1 == permutation_oracle(ex.EXAMPLE1_U) == -2
    assert g3 == permutation_oracle(ex.EXAMPLE3_U) == -1


@criterion(2, "binary gamma equals U(0,1) + U(1,0)")
def test_binary_reduction():
    rng = random.Random(2024)
    with Timer(1):
        for _ in range(1000):
            a = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
            b = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
            assert gamma(UtilityMatrix.binary(a, b)).value == a + b


@criterion(3, "distortion bound anchors 0, d, d")
def test_dbar_anchors():
    from stratcomm.core import binary_entropy
    from stratcomm.rates import DbarProblem, dbar, rd_marginal

    with Timer(5):
        for u in ex.DBAR_UTILITIES:
            assert gamma(u).value < 0
            for p in (Fraction(1, 10), Fraction(2, 10), Fraction(3, 10), Fraction(4, 10)):
                px = Distribution.binary(p)
                for d in (Fraction(1, 20), Fraction(1, 10)):
                    assert dbar(DbarProblem(px, px, binary_entropy(p), u, "binary_exact")) == 0
                    p0 = Distribution.binary(p + d)
                    assert dbar(DbarProblem(px, p0, binary_entropy(p + d), u, "binary_exact")) == d
                    ps = Distribution.binary(rd_marginal(p, d))
                    assert dbar(DbarProblem(px, ps, rd_binary(p, d), u, "binary_exact")) == d


def literal_recovered(g, u, p, d):
    """Recovered probability straight from the definitions (pessimistic ties)."""
    image = g.image()
    total = Fraction(0)
    for x in all_sequences(g.n, 2):
        vals = [sequence_utility(y, x, u) for y in image]
        top = max(vals)
        if all(hamming(y, x) <= d for y, v in zip(image, vals) if v == top):
            total += sequence_prob(x, p)
    return total


EXAMPLE2_GOLDEN = {
    (4, 1): "1029/2500", (4, 2): "1323/5000", (4, 3): "189/2500", (4, 4): "81/10000",
    (5, 1): "20923/25000", (5, 2): "16023/20000", (5, 3): "9387/20000", (5, 4): "4077/25000",
    (6, 1): "74431/100000", (6, 2): "811881/1000000", (6, 3): "56889/100000", (6, 4): "254961/1000000",
    (10, 1): "9244034877/10000000000",
}
EXAMPLE2_COOP_GOLDEN = {
    (4, 1): "1029/2500", (4, 2): "3381/5000", (4, 3): "3759/5000", (4, 4): "7599/10000",
    (5, 1): "20923/25000", (5, 2): "48461/50000", (5, 3): "99757/100000", (5, 4): "1",
}


@criterion(4, "recovered-probability curves for growing images")
def test_example2_exact_values(example2_result):
    res, elapsed = example2_result
    assert elapsed < 30
    u = UtilityMatrix.binary(ex.EXAMPLE2["u01"], ex.EXAMPLE2["u10"])
    p = Distribution.binary(ex.EXAMPLE2["p"])
    for n in range(1, 7):
        for i in range(1, 5):
            g = ex.example2_strategy(n, i)
            assert res.strategic[(n, i)] == literal_recovered(g, u, p, ex.EXAMPLE2["delta"])
    for key, val in EXAMPLE2_GOLDEN.items():
        assert res.strategic[key] == Fraction(val)
    for key, val in EXAMPLE2_COOP_GOLDEN.items():
        assert res.cooperative[key] == Fraction(val)
    for val in itertools.chain(res.strategic.values(), res.cooperative.values()):
        assert 0 <= val <= 1


@criterion(4, "recovered-probability curves for growing images")
def test_example2_engines_agree(example2_result):
    res, _ = example2_result
    assert res.engines_agree, res.disagreements


@criterion(4, "recovered-probability curves for growing images")
def test_example2_jump_and_cooperative_order(example2_result):
    res, _ = example2_result
    assert res.strategic[(5, 1)] > res.strategic[(4, 1)]
    for n in range(1, 11):
        for i in range(1, 4):
            assert res.cooperative[(n, i)] <= res.cooperative[(n, i + 1)]


@criterion(4, "recovered-probability curves for growing images")
def test_example2_strategic_order(example2_result):
    res, _ = example2_result
    violations = [(n, i) for n in range(5, 11) for i in range(1, 4)
                  if res.strategic[(n, i)] < res.strategic[(n, i + 1)]]
    assert not violations, f"strategic ordering fails at (n, i): {violations}"


@criterion(5, "four-symbol example at n=36, all five claims")
def test_example3_claims(example3_report):
    rep, elapsed = example3_report
    assert elapsed < 120
    claims = {c["id"]: c for c in rep["claims"]}
    assert claims["iii"]["max_utility_u_third"] == "4/1"
    assert math.isclose(float(claims["iv"]["rate_bits"]), math.log2(42840) / 36, abs_tol=1e-9)
    failed = [cid for cid, c in claims.items() if not c["passed"]]
    assert not failed, f"claims failed: {failed}: {[claims[c] for c in failed]}"


@criterion(6, "finite-n error stays positive without a negative permutation optimum")
def test_finite_n_error_positive():
    with Timer(120):
        for u in (UtilityMatrix.binary(1, -1), UtilityMatrix.binary(1, 0)):
            for p in (Fraction(3, 10), Fraction(1, 2)):
                for n in range(1, 5):
                    assert brute_force_min_error(n, Distribution.binary(p), u, 0).min_error > 0
        for p in (Fraction(3, 10), Fraction(1, 2)):
            for n in range(1, 5):
                res = brute_force_min_error(n, Distribution.binary(p), UtilityMatrix.binary(-1, -1), 0)
                assert res.min_error == 0
                assert res.witness.image() == list(all_sequences(n, 2))


@criterion(7, "exact-recovery sets are independent in the sender graph")
def test_exact_recovery_independent():
    with Timer(60):
        rep = ex.run_suite("independent_set")
    assert [c["strategies"] for c in rep["checks"]] == [200] * 5
    assert rep["passed"], [c for c in rep["checks"] if not c["passed"]]


@criterion(8, "biregular degree identity and exhaustive degree match")
def test_biregularity():
    with Timer(120):
        rep = ex.run_suite("biregular")
    assert len(rep["checks"]) == 2 * 10 * 2
    assert sum(c["brute_checked"] for c in rep["checks"]) == 2 * 8 * 2
    assert rep["passed"], [c for c in rep["checks"] if not c["passed"]]


@criterion(9, "same-type truthfulness and no positive cycles in maximizers")
def test_no_positive_cycle():
    with Timer(60):
        rep = ex.run_suite("no_positive_cycle")
    assert rep["passed"], [c for c in rep["checks"] if not c["passed"]]


@criterion(10, "time-sharing product structure")
def test_time_share():
    with Timer(30):
        rep = ex.run_suite("time_share")
    assert rep["passed"], rep["checks"]


@criterion(11, "Blahut-Arimoto against closed forms")
def test_blahut_arimoto():
    def h(x):
        return -(x * math.log2(x) + (1 - x) * math.log2(1 - x))

    with Timer(10):
        for pk in range(1, 6):
            for dk in range(1, 2 * pk):
                p, d = Fraction(pk, 10), Fraction(dk, 20)
                got = rd_blahut_arimoto(Distribution.binary(p), d)
                assert abs(got - (h(float(p)) - h(float(d)))) <= 1e-6, (p, d)
        uni = Distribution([Fraction(1, 4)] * 4)
        for dk in range(1, 15):
            d = Fraction(dk, 20)
            got = rd_blahut_arimoto(uni, d)
            expected = 2 - h(float(d)) - float(d) * math.log2(3)
            assert abs(got - expected) <= 1e-6, d


@criterion(12, "byte-identical outputs across thread counts")
@pytest.mark.parametrize("command", ["example2", "example3"])
def test_determinism(command, tmp_path):
    outputs = []
    codes = set()
    for run, threads in enumerate((1, 8, 1, 8)):
        if command == "example3" and run % 2 == 0:
            _type_level_best.cache_clear()
        path = tmp_path / f"{command}-{run}.out"
        codes.add(main([command, "--threads", str(threads), "--out", str(path)]))
        outputs.append(path.read_bytes())
    assert len(set(outputs)) == 1
    assert len(codes) == 1
