"""Batch drivers: utility analysis, simulation sweeps, the worked examples and verification suites.

Every driver returns plain data (rows or dicts).  Parallel work goes through
``ThreadPoolExecutor.map``, which preserves input order, so outputs do not
depend on the thread count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .config import ExperimentConfig, build_strategy, fmt_rational
from .core import (
    Distribution,
    JointType,
    TypeVector,
    all_sequences,
    binary_entropy,
    enumerate_types,
    rd_binary,
    type_class_size,
)
from .game import (
    GameOutcome,
    TieRule,
    brute_force_min_error,
    compose_time_share,
    evaluate,
    evaluate_auto,
    make_strategy,
    type_level_best,
    type_level_evaluate,
)
from .graphs import GraphSpec, brute_degree_table, degree_counts, is_independent_set
from .rates import DbarProblem, classify_region, dbar, rd_marginal
from .transport import contingency_tables, positive_cycles_in_support
from .utility import (
    GAMMA_MAX_Q,
    UtilityMatrix,
    binary_closed_form,
    block_utility,
    gamma,
    gamma_sign,
    prop1_holds,
    sequence_utility,
)

EXAMPLE1_U = [[0, 1, 1], [-4, 0, 1], [-4, -4, 0]]
EXAMPLE3_U = [[0, -2, -13, -18], [1, 0, -13, -18], [12, 1, 0, -18], [5, 5, 5, 0]]
EXAMPLE3_P = [Fraction(1, 36)] * 3 + [Fraction(11, 12)]
EXAMPLE3_N = 36
EXAMPLE3_DELTA = Fraction(1, 400)
EXAMPLE3_COMPARATOR = 2.73

EXAMPLE2 = {
    "p": Fraction(3, 10),
    "delta": Fraction(1, 5),
    "u01": Fraction(1),
    "u10": Fraction(-2),
    "strategies": 4,
    "n_min": 1,
    "n_max": 10,
}


def fmt_real(x: float | None, missing: str = "undefined") -> str:
    if x is None:
        return missing
    return f"{x:.12g}"


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def write_csv(header: list[str], rows: Iterable[list[str]], config: dict) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- utility analysis -------------------------------------------------------

def analyze_utility(u: UtilityMatrix, p: Distribution, d: Fraction) -> dict:
    report: dict[str, Any] = {"q": u.q, "utility": u.to_json()}
    if u.q <= GAMMA_MAX_Q:
        g = gamma(u)
        report["gamma"] = {
            "value": fmt_rational(g.value),
            "witness": list(g.witness),
            "cycles": [list(c) for c in g.cycles],
        }
    else:
        report["gamma"] = None
    sign = gamma_sign(u)
    report["gamma_sign"] = {
        "kind": sign.kind,
        "witness_cycle": list(sign.witness) if sign.witness else None,
        "witness_value": fmt_rational(sign.witness_value) if sign.witness_value is not None else None,
    }
    pr = prop1_holds(u)
    report["prop1"] = {
        "holds": pr.holds,
        "acyclic": pr.acyclic,
        "magnitude_ok": pr.magnitude_ok,
        "failed_clause": pr.failed_clause,
        "nonnegative_cycle": list(pr.nonnegative_cycle) if pr.nonnegative_cycle else None,
    }
    if u.q == 2:
        report["binary_sum"] = fmt_rational(u[0, 1] + u[1, 0])
    report["region"] = classify_region(u, p, d).to_json()
    return report


# -- simulation sweeps ------------------------------------------------------

OUTCOME_HEADER = [
    "recovered_prob_strategic",
    "recovered_prob_cooperative",
    "error_prob",
    "rate_bits",
    "rate_lower_bits",
    "rate_upper_bits",
    "image_rate_bits",
    "image_rate_lower_bits",
    "image_rate_upper_bits",
]


def outcome_fields(o: GameOutcome) -> list[str]:
    rate = fmt_real(o.rate) if o.rate_exact else ""
    image = fmt_real(o.image_rate) if o.image_rate is not None else ""
    return [
        fmt_rational(o.recovered_prob),
        fmt_rational(o.coop_recovered_prob),
        fmt_rational(o.error_prob),
        rate,
        fmt_real(o.rate_bounds[0], ""),
        fmt_real(o.rate_bounds[1], ""),
        image,
        fmt_real(o.image_rate_bounds[0], ""),
        fmt_real(o.image_rate_bounds[1], ""),
    ]


def simulate(cfg: ExperimentConfig, threads: int = 1) -> tuple[list[str], list[list[str]]]:
    tie = cfg.tie_rule()

    def run(n: int) -> list[str]:
        g = build_strategy(cfg, n)
        o = evaluate_auto(g, cfg.utility, cfg.source, cfg.threshold, tie, cfg.engine, cfg.cap)
        return [str(n), o.engine, str(g.image_size())] + outcome_fields(o)

    rows = _pmap(run, list(range(cfg.n_min, cfg.n_max + 1)), threads)
    return ["n", "engine", "image_size"] + OUTCOME_HEADER, rows


# -- worked example: enlarging the image ------------------------------------

def example2_strategy(n: int, i: int):
    """Image: the classes with ``k`` zeros for ``k = k1, ..., k1 + i - 1``.

    ``k1`` is the largest zero count with ``k1 / n <= p``.  Classes that would
    need more than ``n`` zeros do not exist and are left out.
    """
    p = EXAMPLE2["p"]
    k1 = math.floor(p * n)
    classes = [TypeVector((k, n - k)) for k in range(k1, k1 + i) if k <= n]
    return make_strategy(classes, n, 2)


@dataclass
class Example2Result:
    rows: list[list[str]]
    strategic: dict[tuple[int, int], Fraction]
    cooperative: dict[tuple[int, int], Fraction]
    engines_agree: bool
    disagreements: list[tuple[int, int]] = field(default_factory=list)


def example2(threads: int = 1) -> Example2Result:
    u = UtilityMatrix.binary(EXAMPLE2["u01"], EXAMPLE2["u10"])
    p = Distribution.binary(EXAMPLE2["p"])
    d = EXAMPLE2["delta"]
    tasks = [(n, i) for n in range(EXAMPLE2["n_min"], EXAMPLE2["n_max"] + 1)
             for i in range(1, EXAMPLE2["strategies"] + 1)]

    def run(task):
        n, i = task
        g = example2_strategy(n, i)
        return evaluate(g, u, p, d), type_level_evaluate(g, u, p, d)

    results = _pmap(run, tasks, threads)
    rows, strategic, cooperative, bad = [], {}, {}, []
    for (n, i), (seq, typ) in zip(tasks, results):
        if (seq.error_prob != typ.error_prob or seq.recovered_by_type != typ.recovered_by_type
                or seq.coop_recovered_prob != typ.coop_recovered_prob):
            bad.append((n, i))
        strategic[(n, i)] = seq.recovered_prob
        cooperative[(n, i)] = seq.coop_recovered_prob
        for o in (seq, typ):
            rows.append([str(n), f"g{i}", o.engine] + outcome_fields(o))
    return Example2Result(rows, strategic, cooperative, not bad, bad)


def example2_config() -> dict:
    return {
        "p": fmt_rational(EXAMPLE2["p"]),
        "delta": fmt_rational(EXAMPLE2["delta"]),
        "utility": [["0/1", fmt_rational(EXAMPLE2["u01"])], [fmt_rational(EXAMPLE2["u10"]), "0/1"]],
        "strategies": EXAMPLE2["strategies"],
        "n_min": EXAMPLE2["n_min"],
        "n_max": EXAMPLE2["n_max"],
        "tie": "worst_case",
    }


def example2_checks(res: Example2Result) -> list[dict]:
    """Qualitative facts about the recovered-probability curves."""
    checks = []
    k = EXAMPLE2["strategies"]
    n_max = EXAMPLE2["n_max"]
    bad_strat = [n for n in range(5, n_max + 1)
                 if any(res.strategic[(n, i)] < res.strategic[(n, i + 1)] for i in range(1, k))]
    checks.append({"name": "strategic_decreasing_in_i_for_n_ge_5", "passed": not bad_strat,
                   "violations_at_n": bad_strat})
    bad_coop = [n for n in range(EXAMPLE2["n_min"], n_max + 1)
                if any(res.cooperative[(n, i)] > res.cooperative[(n, i + 1)] for i in range(1, k))]
    checks.append({"name": "cooperative_increasing_in_i", "passed": not bad_coop,
                   "violations_at_n": bad_coop})
    checks.append({"name": "jump_g1_from_n4_to_n5",
                   "passed": res.strategic[(5, 1)] > res.strategic[(4, 1)],
                   "n4": fmt_rational(res.strategic[(4, 1)]),
                   "n5": fmt_rational(res.strategic[(5, 1)])})
    checks.append({"name": "engines_agree", "passed": res.engines_agree,
                   "disagreements": [list(t) for t in res.disagreements]})
    return checks


EXAMPLE2_HEADER = ["n", "strategy_id", "engine"] + OUTCOME_HEADER


# -- worked example: image rate above the rate supremum --------------------

def example3_report(threads: int = 1) -> dict:
    n = EXAMPLE3_N
    u = UtilityMatrix(EXAMPLE3_U)
    p = Distribution(EXAMPLE3_P)
    d = EXAMPLE3_DELTA
    u_px = TypeVector((1, 1, 1, 33))
    u_third = TypeVector((0, 12, 12, 12))
    hat = TypeVector((12, 12, 0, 12))
    g = make_strategy([u_px, u_third], n, 4)
    types = enumerate_types(n, 4)

    def best_pair(t):
        return type_level_best(t, u_px, u), type_level_best(t, u_third, u)

    # warm the per-pair cache in parallel; the evaluation below then reads it
    _pmap(best_pair, types, threads)
    out = type_level_evaluate(g, u, p, d)

    claims = []
    low = [t for t in types if 3 * t.counts[3] <= 2 * n]
    recovered_low = [list(t.counts) for t in low if out.recovered_by_type[t.counts]]
    claims.append({
        "id": "i",
        "statement": "every source type with P(3) <= 2/3 errors",
        "passed": not recovered_low,
        "types_checked": len(low),
        "types_total": len(types),
        "recovered_exceptions": recovered_low,
    })

    diag = type_level_best(u_px, u_px, u)
    other = type_level_best(u_px, u_third, u)
    ok_ii = (diag.max_utility == 0 and diag.max_distortion == 0
             and other.max_utility < 0 and out.recovered_by_type[u_px.counts] == type_class_size(u_px))
    claims.append({
        "id": "ii",
        "statement": "sources in U_PX are decoded as themselves (unique diagonal maximizer)",
        "passed": ok_ii,
        "best_utility_own_class": fmt_rational(diag.max_utility),
        "best_utility_other_class": fmt_rational(other.max_utility),
    })

    to_third = type_level_best(hat, u_third, u)
    to_px = type_level_best(hat, u_px, u)
    claims.append({
        "id": "iii",
        "statement": "type (1/3,1/3,0,1/3) best class is U_1/3 with max utility 4",
        "passed": to_third.max_utility == 4 and to_third.max_utility > to_px.max_utility,
        "max_utility_u_third": fmt_rational(to_third.max_utility),
        "max_utility_u_px": fmt_rational(to_px.max_utility),
    })

    expected_rate = math.log2(type_class_size(u_px)) / n
    ok_iv = (out.rate_exact and out.used_classes == (u_px,)
             and out.rate is not None and abs(out.rate - expected_rate) <= 1e-9)
    claims.append({
        "id": "iv",
        "statement": "A = U_PX and rate = log2(42840)/36",
        "passed": ok_iv,
        "class_size": type_class_size(u_px),
        "rate_bits": fmt_real(out.rate),
        "expected_rate_bits": fmt_real(expected_rate),
    })

    floor_rate = math.log2(type_class_size(u_third)) / n
    comparator = math.log2(EXAMPLE3_COMPARATOR)
    lower = out.image_rate_bounds[0]
    claims.append({
        "id": "v",
        "statement": "reachable-image rate >= log2|U_1/3|/36 and > log2(2.73)",
        "passed": lower is not None and lower >= floor_rate and lower > comparator,
        "image_rate_lower_bits": fmt_real(lower),
        "image_rate_upper_bits": fmt_real(out.image_rate_bounds[1]),
        "log2_class_size_over_n": fmt_real(floor_rate),
        "comparator_bits": fmt_real(comparator),
    })

    return {
        "config": {
            "n": n,
            "source": [fmt_rational(v) for v in EXAMPLE3_P],
            "utility": u.to_json(),
            "threshold": fmt_rational(d),
            "image": [list(u_px.counts), list(u_third.counts)],
            "engine": "type",
            "tie": "worst_case",
        },
        "error_prob": fmt_rational(out.error_prob),
        "recovered_prob": fmt_real(float(out.recovered_prob)),
        "claims": claims,
        "passed": all(c["passed"] for c in claims),
    }


# -- exhaustive search ------------------------------------------------------

def brute_force_sweep(cfg: ExperimentConfig, threads: int = 1) -> dict:
    d = cfg.threshold

    def run(n):
        res = brute_force_min_error(n, cfg.source, cfg.utility, d, cfg.q)
        return {
            "n": n,
            "min_error": fmt_rational(res.min_error),
            "min_error_real": fmt_real(float(res.min_error)),
            "witness_image": [list(s) for s in res.witness.image()],
            "witness_anchor": list(res.witness.anchor),
            "subsets_searched": res.subsets_searched,
        }

    return {"config": cfg.to_json(), "results": _pmap(run, list(range(cfg.n_min, cfg.n_max + 1)), threads)}


# -- verification suites ----------------------------------------------------

def _check(name: str, passed: bool, **detail) -> dict:
    return {"name": name, "passed": bool(passed), **detail}


def random_utility(rng: random.Random, q: int, lo: int = -4, hi: int = 4, den: int = 1) -> UtilityMatrix:
    return UtilityMatrix([[0 if i == j else Fraction(rng.randint(lo, hi), den) for j in range(q)]
                          for i in range(q)])


def random_image(rng: random.Random, n: int, q: int = 2) -> list[tuple[int, ...]]:
    seqs = list(all_sequences(n, q))
    size = rng.randint(1, len(seqs))
    return sorted(rng.sample(seqs, size))


def suite_positive_error(threads: int = 1) -> list[dict]:
    cases = [(u01, u10, p, n) for (u01, u10) in [(1, -1), (1, 0)]
             for p in (Fraction(3, 10), Fraction(1, 2)) for n in range(1, 5)]

    def run(case):
        u01, u10, p, n = case
        res = brute_force_min_error(n, Distribution.binary(p), UtilityMatrix.binary(u01, u10), 0)
        return _check(f"min_error_positive U=({u01},{u10}) p={fmt_rational(p)} n={n}",
                      res.min_error > 0, min_error=fmt_rational(res.min_error))

    checks = _pmap(run, cases, threads)
    for p in (Fraction(3, 10), Fraction(1, 2)):
        for n in range(1, 5):
            res = brute_force_min_error(n, Distribution.binary(p), UtilityMatrix.binary(-1, -1), 0)
            identity = res.witness.image() == list(all_sequences(n, 2))
            checks.append(_check(f"all_negative_zero p={fmt_rational(p)} n={n}",
                                 res.min_error == 0 and identity,
                                 min_error=fmt_rational(res.min_error)))
    return checks


def exact_recovery_set(g, u: UtilityMatrix, p: Distribution) -> list[tuple[int, ...]]:
    out = evaluate(g, u, p, 0, TieRule.worst_case(0))
    seqs = list(all_sequences(g.n, g.q))
    return [s for s, ok in zip(seqs, out.recovered_mask.tolist()) if ok]


def suite_independent_set(threads: int = 1, per_n: int = 200, seed: int = 7) -> list[dict]:
    rng = random.Random(seed)
    p = Distribution.binary(Fraction(3, 10))
    cases = []
    for n in range(2, 7):
        for _ in range(per_n):
            cases.append((n, random_utility(rng, 2), random_image(rng, n)))

    def run(case):
        n, u, image = case
        rec = exact_recovery_set(make_strategy(image, n, 2), u, p)
        return is_independent_set(rec, u)

    results = _pmap(run, cases, threads)
    checks = []
    for n in range(2, 7):
        ok = [r for (m, _, _), r in zip(cases, results) if m == n]
        checks.append(_check(f"exact_recovery_independent n={n}", all(ok), strategies=len(ok),
                             failures=ok.count(False)))
    return checks


BIREGULAR_UTILITIES = {
    2: UtilityMatrix.binary(1, -2),
    3: UtilityMatrix([[0, 1, -3], [-2, 0, 2], [1, -4, 0]]),
}
BIREGULAR_DELTA = Fraction(1, 10)


def suite_biregular(threads: int = 1, n_max: int = 10, brute_n_max: int = 8) -> list[dict]:
    cases = [(q, n, delta) for q in (2, 3) for n in range(1, n_max + 1)
             for delta in (None, BIREGULAR_DELTA)]

    def run(case):
        q, n, delta = case
        spec = GraphSpec(BIREGULAR_UTILITIES[q], n, delta)
        types = enumerate_types(n, q)
        table = brute_degree_table(spec) if n <= brute_n_max else None
        identity_fail = brute_fail = 0
        for a in types:
            for b in types:
                r = degree_counts(a, b, spec)
                if r.delta_out * type_class_size(a) != r.delta_in * type_class_size(b):
                    identity_fail += 1
                if table is not None and table[(a.counts, b.counts)] != r:
                    brute_fail += 1
        variant = "undirected" if delta is None else f"directed({fmt_rational(delta)})"
        return _check(f"biregular q={q} n={n} {variant}", identity_fail == 0 and brute_fail == 0,
                      pairs=len(types) ** 2, identity_failures=identity_fail,
                      brute_mismatches=brute_fail, brute_checked=table is not None)

    return _pmap(run, cases, threads)


def _engine_cases(seed: int) -> list[tuple]:
    rng = random.Random(seed)
    cases = []
    u2 = UtilityMatrix.binary(EXAMPLE2["u01"], EXAMPLE2["u10"])
    p2 = Distribution.binary(EXAMPLE2["p"])
    for n in range(1, 11):
        for i in range(1, 5):
            cases.append((f"example2 n={n} g{i}", example2_strategy(n, i), u2, p2, EXAMPLE2["delta"]))
    for k in range(40):
        q = 2 if k % 2 == 0 else 3
        n = rng.randint(1, 10 if q == 2 else 6)
        types = enumerate_types(n, q)
        image = rng.sample(types, rng.randint(1, min(3, len(types))))
        u = random_utility(rng, q)
        probs = [rng.randint(1, 5) for _ in range(q)]
        p = Distribution([Fraction(v, sum(probs)) for v in probs])
        d = Fraction(rng.randint(0, 3), 10)
        cases.append((f"random#{k} q={q} n={n}", make_strategy(image, n, q), u, p, d))
    return cases


def suite_engine_equiv(threads: int = 1, seed: int = 11) -> list[dict]:
    cases = _engine_cases(seed)

    def run(case):
        name, g, u, p, d = case
        a = evaluate(g, u, p, d)
        b = type_level_evaluate(g, u, p, d)
        same = (a.error_prob == b.error_prob and a.recovered_by_type == b.recovered_by_type
                and a.coop_recovered_prob == b.coop_recovered_prob)
        if b.rate_exact:
            same = same and a.used_size == b.used_size
        return _check(f"engine_equiv {name}", same, error_prob=fmt_rational(a.error_prob))

    return _pmap(run, cases, threads)


def suite_time_share(threads: int = 1, trials: int = 30, seed: int = 5) -> list[dict]:
    rng = random.Random(seed)
    p = Distribution.binary(Fraction(3, 10))
    cases = []
    for _ in range(trials):
        u = random_utility(rng, 2)
        cases.append((u, random_image(rng, 3), random_image(rng, 3)))

    def run(case):
        u, im1, im2 = case
        g1, g2 = make_strategy(im1, 3, 2), make_strategy(im2, 3, 2)
        g = compose_time_share(g1, g2)
        o1, o2, o = (evaluate(x, u, p, 0) for x in (g1, g2, g))
        product = frozenset(a + b for a in o1.used_reconstructions for b in o2.used_reconstructions)
        ok = o.used_reconstructions == product
        if o.rate is not None:
            ok = ok and math.isclose(o.rate, (3 * o1.rate + 3 * o2.rate) / 6, rel_tol=0, abs_tol=1e-12)
        else:
            ok = ok and (o1.rate is None or o2.rate is None)
        ok = ok and o.error_prob <= o1.error_prob + o2.error_prob
        return ok

    results = _pmap(run, cases, threads)
    return [_check("time_share_product_structure", all(results), trials=len(results),
                   failures=results.count(False))]


DBAR_UTILITIES = [UtilityMatrix.binary(1, -2), UtilityMatrix.binary(-3, 1), UtilityMatrix.binary(-1, -1)]


def suite_dbar_anchors(threads: int = 1) -> list[dict]:
    checks = []
    for u in DBAR_UTILITIES:
        for p in (Fraction(1, 10), Fraction(2, 10), Fraction(3, 10), Fraction(4, 10)):
            px = Distribution.binary(p)
            for d in (Fraction(1, 20), Fraction(1, 10)):
                a = dbar(DbarProblem(px, px, binary_entropy(p), u, "binary_exact"))
                b = dbar(DbarProblem(px, Distribution.binary(p + d), binary_entropy(p + d), u,
                                     "binary_exact"))
                c = dbar(DbarProblem(px, Distribution.binary(rd_marginal(p, d)), rd_binary(p, d), u,
                                     "binary_exact"))
                tag = f"U=({u[0, 1]},{u[1, 0]}) p={fmt_rational(p)} d={fmt_rational(d)}"
                checks.append(_check(f"dbar_anchors {tag}", a == 0 and b == d and c == d,
                                     values=[fmt_rational(a), fmt_rational(b), fmt_rational(c)]))
    return checks


def _binary_decomp_mismatch(n: int, u: UtilityMatrix, spot: int = 64) -> int:
    """Count pairs where the zero-count closed form differs from the joint-type sum.

    Whole ``X^n x X^n`` in integer arithmetic (utilities scaled by their lcd),
    plus ``binary_closed_form`` itself on a strided subset of pairs.
    """
    _, iu = u.integer_entries()
    u01, u10 = iu[0][1], iu[1][0]
    xs = np.array(list(all_sequences(n, 2)), dtype=np.int64).reshape(2**n, n)
    y, x = xs[:, None, :], xs[None, :, :]
    w01 = ((y == 0) & (x == 1)).sum(axis=2)
    w10 = ((y == 1) & (x == 0)).sum(axis=2)
    direct = u01 * w01 + u10 * w10
    zy = (xs == 0).sum(axis=1)[:, None]
    zx = (xs == 0).sum(axis=1)[None, :]
    less = u10 * (zx - zy) + (u10 + u01) * w01
    more = u01 * (zy - zx) + (u10 + u01) * w10
    closed = np.where(zy <= zx, less, more)
    bad = int((closed != direct).sum())
    seqs = list(all_sequences(n, 2))
    m = len(seqs)
    for k in range(0, m * m, max(1, m * m // spot)):
        yy, xx = seqs[k // m], seqs[k % m]
        if binary_closed_form(yy, xx, u) != sequence_utility(yy, xx, u):
            bad += 1
    return bad


def suite_binary_decomp(threads: int = 1, n_max: int = 10) -> list[dict]:
    utilities = [UtilityMatrix.binary(1, -2), UtilityMatrix.binary(Fraction(-5, 3), Fraction(1, 2)),
                 UtilityMatrix.binary(-1, -1), UtilityMatrix.binary(2, 3)]

    def run(n):
        bad = sum(_binary_decomp_mismatch(n, u) for u in utilities)
        return _check(f"binary_decomposition n={n}", bad == 0, pairs=4**n * len(utilities),
                      failures=bad)

    return _pmap(run, list(range(1, n_max + 1)), threads)


def negative_gamma_utilities(rng: random.Random, q: int, count: int) -> list[UtilityMatrix]:
    out = []
    while len(out) < count:
        u = random_utility(rng, q, -6, 3)
        if gamma_sign(u).kind == "negative":
            out.append(u)
    return out


def suite_no_positive_cycle(threads: int = 1, seed: int = 3) -> list[dict]:
    rng = random.Random(seed)
    checks = []
    # equal-marginal joint types never beat truth telling, and tie it only on the diagonal
    for q in (2, 3):
        utils = negative_gamma_utilities(rng, q, 3)
        bad = 0
        total = 0
        for n in range(1, 9):
            for t in enumerate_types(n, q):
                for w in contingency_tables(t.counts, t.counts):
                    jt = JointType(w)
                    total += 1
                    for u in utils:
                        val = block_utility(jt, u)
                        if val > 0 or (val == 0) != jt.is_diagonal():
                            bad += 1
        checks.append(_check(f"same_type_truthful q={q}", bad == 0, joint_types=total, failures=bad))
    # transportation maximizers carry no cycle of positive mass
    for q in (2, 3, 4):
        utils = negative_gamma_utilities(rng, q, 4)
        bad = 0
        total = 0
        for u in utils:
            for n in (4, 7, 9):
                types = enumerate_types(n, q)
                for _ in range(25):
                    a, b = rng.choice(types), rng.choice(types)
                    best = type_level_best(a, b, u)
                    total += 1
                    if positive_cycles_in_support(best.w_max) or positive_cycles_in_support(best.w_min):
                        bad += 1
        checks.append(_check(f"no_positive_cycle q={q}", bad == 0, instances=total, failures=bad))
    return checks


SUITES: dict[str, Callable[..., list[dict]]] = {
    "theorem1": suite_positive_error,
    "independent_set": suite_independent_set,
    "biregular": suite_biregular,
    "engine_equiv": suite_engine_equiv,
    "time_share": suite_time_share,
    "dbar_anchors": suite_dbar_anchors,
    "lemma_binary_decomp": suite_binary_decomp,
    "no_positive_cycle": suite_no_positive_cycle,
}


def run_suite(name: str, threads: int = 1) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    checks = SUITES[name](threads=threads)
    return {"suite": name, "passed": all(c["passed"] for c in checks), "checks": checks}
