import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratcomm.core import JointType, joint_type
from stratcomm.transport import contingency_tables
from stratcomm.utility import (
    UtilityMatrix,
    binary_closed_form,
    block_utility,
    cycle_decomposition,
    cycle_value,
    gamma,
    gamma_sign,
    normalize,
    permutation_value,
    prop1_holds,
    sequence_utility,
)

EX1 = UtilityMatrix([[0, 1, 1], [-4, 0, 1], [-4, -4, 0]])
EX3 = UtilityMatrix([[0, -2, -13, -18], [1, 0, -13, -18], [12, 1, 0, -18], [5, 5, 5, 0]])


def gamma_oracle(u):
    """Brute force over permutation matrices Q != I of sum Q(i,j) U(i,j)."""
    q = u.q
    best = None
    for perm in itertools.permutations(range(q)):
        if list(perm) == list(range(q)):
            continue
        # Q(i, j) = 1 iff i = perm[j]
        val = sum(Fraction(u.entries[i][j]) for j in range(q) for i in range(q) if i == perm[j])
        best = val if best is None else max(best, val)
    return best


def random_matrix(rng, q, lo=-5, hi=5, den=3):
    return UtilityMatrix([[0 if i == j else Fraction(rng.randint(lo, hi), rng.randint(1, den))
                           for j in range(q)] for i in range(q)])


def test_normalize_examples():
    assert normalize([[0, 0], [0, 0]]).entries == UtilityMatrix([[0, 0], [0, 0]]).entries
    assert normalize([[5, 1], [0, 5]]) == UtilityMatrix([[0, -4], [-5, 0]])
    assert normalize(EX1.entries) == EX1
    with pytest.raises(ValueError):
        UtilityMatrix([[1, 0], [0, 0]])


def test_binary_parameters():
    u = UtilityMatrix.binary(1, -2)
    assert (u.a, u.b, u.umax, u.umin) == (1, 2, 1, -2)
    with pytest.raises(ValueError):
        EX1.a


def test_block_utility_examples():
    u = UtilityMatrix.binary(1, -2)
    assert sequence_utility((0, 1, 1), (0, 1, 1), u) == 0
    assert sequence_utility((0, 0, 1, 1, 1), (0, 1, 1, 1, 1), u) == Fraction(1, 5)
    # same type class, k swaps each way
    y, x = (0, 1, 0, 1, 1, 1), (1, 0, 1, 0, 1, 1)
    assert sequence_utility(y, x, u) == Fraction(2, 6) * (1 - 2)
    assert block_utility(joint_type(y, x, 2), u) == sequence_utility(y, x, u)


def test_gamma_examples():
    assert gamma(UtilityMatrix.binary(1, -2)).value == -1
    g1 = gamma(EX1)
    assert g1.value == -2 == gamma_oracle(EX1)
    assert permutation_value(g1.witness, EX1) == -2
    g3 = gamma(EX3)
    assert g3.value == -1 == gamma_oracle(EX3)
    assert g3.witness == (1, 0, 2, 3)


def test_gamma_refuses_large_q():
    with pytest.raises(ValueError, match="gamma_sign"):
        gamma(UtilityMatrix([[0 if i == j else -1 for j in range(10)] for i in range(10)]))


def test_gamma_sign_examples():
    assert gamma_sign(UtilityMatrix([[0, -1, -2], [-1, 0, -3], [-1, -1, 0]])).kind == "negative"
    s = gamma_sign(UtilityMatrix.binary(1, -1))
    assert s.kind == "zero" and s.witness == (0, 1) and s.witness_value == 0
    assert gamma_sign(EX1).kind == "negative"
    pos = gamma_sign(UtilityMatrix([[0, 1, -5], [-5, 0, 1], [1, -5, 0]]))
    assert pos.kind == "positive" and pos.witness_value > 0


def test_cycle_decomposition_orientation():
    perm = (2, 0, 1)
    assert cycle_decomposition(perm) == [(0, 2, 1)]
    (cyc,) = cycle_decomposition(perm)
    assert cycle_value(cyc, EX1) == permutation_value(perm, EX1)


def test_prop1_examples():
    r = prop1_holds(EX1)
    assert r.holds and r.min_negative_magnitude == 4 and r.max_nonnegative == 1
    assert prop1_holds(UtilityMatrix.binary(1, -2)).holds
    r = prop1_holds(UtilityMatrix.binary(1, -1))
    assert not r.holds and r.failed_clause == "magnitude"
    r = prop1_holds(UtilityMatrix.binary(1, 1))
    assert not r.holds and r.failed_clause == "cycle"


def test_gamma_reduces_to_binary_sum():
    rng = random.Random(1)
    for _ in range(300):
        a, b = Fraction(rng.randint(-50, 50), rng.randint(1, 9)), Fraction(rng.randint(-50, 50), rng.randint(1, 9))
        assert gamma(UtilityMatrix.binary(a, b)).value == a + b


def test_gamma_sign_agrees_with_gamma():
    rng = random.Random(2)
    for q in range(2, 7):
        for _ in range(40 if q < 6 else 10):
            u = random_matrix(rng, q, -4, 2, 2)
            val = gamma(u).value
            assert gamma_sign(u).sign == (val > 0) - (val < 0)


def test_prop1_implies_negative_gamma():
    rng = random.Random(3)
    hits = 0
    for _ in range(2000):
        q = rng.randint(2, 5)
        u = random_matrix(rng, q, -12, 2, 1)
        if prop1_holds(u).holds:
            hits += 1
            assert gamma_oracle(u) < 0
    assert hits > 50


def test_truthful_is_best_within_a_type():
    # equal marginals: E_W[U] <= 0 with equality only on the diagonal
    rng = random.Random(4)
    for q in (2, 3):
        utils = []
        while len(utils) < 3:
            u = random_matrix(rng, q, -6, 3, 1)
            if gamma_sign(u).kind == "negative":
                utils.append(u)
        for n in range(1, 7):
            for t in itertools.product(range(n + 1), repeat=q):
                if sum(t) != n:
                    continue
                for w in contingency_tables(t, t):
                    jt = JointType(w)
                    for u in utils:
                        v = block_utility(jt, u)
                        assert v <= 0 and ((v == 0) == jt.is_diagonal())


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 8).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 1), min_size=n, max_size=n),
                        st.lists(st.integers(0, 1), min_size=n, max_size=n))),
       st.fractions(-5, 5, max_denominator=6), st.fractions(-5, 5, max_denominator=6))
def test_binary_closed_form_matches(pair, u01, u10):
    y, x = pair
    u = UtilityMatrix.binary(u01, u10)
    assert binary_closed_form(y, x, u) == sequence_utility(y, x, u)


def test_normalize_preserves_best_responses():
    rng = random.Random(5)
    for _ in range(50):
        q, n = rng.randint(2, 3), rng.randint(1, 3)
        raw = [[Fraction(rng.randint(-5, 5)) for _ in range(q)] for _ in range(q)]
        u = normalize(raw)
        seqs = list(itertools.product(range(q), repeat=n))
        image = rng.sample(seqs, rng.randint(1, len(seqs)))

        def raw_value(y, x):
            return sum(raw[a][b] for a, b in zip(y, x))

        for x in seqs:
            best_raw = max(raw_value(y, x) for y in image)
            best_norm = max(sequence_utility(y, x, u) for y in image)
            set_raw = {y for y in image if raw_value(y, x) == best_raw}
            set_norm = {y for y in image if sequence_utility(y, x, u) == best_norm}
            assert set_raw == set_norm
