import math
import random
from fractions import Fraction
from itertools import product

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_words, golden_count, sgap_growth
from shiftkit.decomp import builtin_decompositions
from shiftkit.shifts import BetaShift, BetaShiftParams, FullShift, SGapParams, SGapShift
from shiftkit.thermo import (Bernoulli, GraphPerron, Markov, Potential, birkhoff_sum_range,
                             bounded_range_check, bowen_variation, count_words, entropy,
                             exact_pressure, gibbs_check, max_birkhoff, partition_sum, pressure,
                             permutation_count_bound, sgap_exact_pressure, sgap_pressure_gap,
                             spectral_pressure,
                             stirling_check)
from shiftkit.words import Alphabet

A2 = Alphabet.digits(2)
FULL = FullShift(A2)
GOLDEN = BetaShift(BetaShiftParams.golden())
LOG_PHI = math.log((1 + math.sqrt(5)) / 2)


def no11(w):
    return "11" not in w


def brute_range(w, table, k, admissible):
    """inf and sup of S_n over every admissible length n+k-1 extension of w."""
    vals = []
    for tail in product("01", repeat=k - 1):
        x = w + "".join(tail)
        if admissible(x):
            vals.append(sum(table[x[i:i + k]] for i in range(len(w))))
    return min(vals), max(vals)


def random_table(rng, k, scale=1.0):
    return {"".join(t): rng.uniform(-scale, scale) for t in product("01", repeat=k)}


def test_window_one_has_no_end_effect():
    phi = Potential.symbols(A2, {"0": 0.25, "1": -0.5})
    lo, hi = birkhoff_sum_range("0110", phi, FULL)
    assert lo == hi == pytest.approx(0.25 * 2 - 0.5 * 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3), st.text(alphabet="01", min_size=1, max_size=8))
def test_birkhoff_range_matches_extensions(seed, k, w):
    table = random_table(random.Random(seed), k)
    phi = Potential(A2, k, table)
    lo, hi = birkhoff_sum_range(w, phi, FULL)
    blo, bhi = brute_range(w, table, k, lambda x: True)
    assert lo == pytest.approx(blo, abs=1e-12) and hi == pytest.approx(bhi, abs=1e-12)
    if k == 2:
        assert hi - lo <= 2 * phi.norm + 1e-12
    if no11(w):
        lo, hi = birkhoff_sum_range(w, phi, GOLDEN)
        blo, bhi = brute_range(w, table, k, no11)
        assert lo == pytest.approx(blo, abs=1e-12) and hi == pytest.approx(bhi, abs=1e-12)


def test_partition_zero_potential_counts():
    zero = Potential.constant(A2)
    for n in range(1, 21):
        assert partition_sum(GOLDEN, n, zero) == pytest.approx(math.log(golden_count(n)), abs=1e-12)
    assert count_words(GOLDEN, 20) == golden_count(20)


def test_bernoulli_normalisation():
    b = Bernoulli(A2, ["1/3", "2/3"])
    phi = b.log_potential()
    for n in range(1, 15):
        assert partition_sum(FULL, n, phi) == pytest.approx(0.0, abs=1e-12)


def test_partition_sum_brute_force():
    rng = random.Random(3)
    table = random_table(rng, 2)
    phi = Potential(A2, 2, table)
    d = builtin_decompositions(GOLDEN)
    for n in range(1, 10):
        words = [w for w in all_words("01", n) if no11(w)]
        want = math.log(math.fsum(math.exp(brute_range(w, table, 2, no11)[1]) for w in words))
        assert partition_sum(GOLDEN, n, phi) == pytest.approx(want, rel=1e-12)
        core = [w for w in words if w.endswith("0")]
        want_core = math.log(math.fsum(math.exp(brute_range(w, table, 2, no11)[1]) for w in core))
        assert partition_sum(d.core, n, phi) == pytest.approx(want_core, rel=1e-12)
        assert max_birkhoff(GOLDEN, n, phi) == pytest.approx(
            max(brute_range(w, table, 2, no11)[1] for w in words))


def test_entropy_full_shift_exact():
    est = entropy(FullShift(Alphabet.digits(3)), range(1, 8))
    assert all(v == pytest.approx(math.log(3), abs=1e-14) for v in est.values)


def test_golden_entropy_perron():
    perron = math.log(max(abs(np.linalg.eigvals(np.array([[1.0, 1.0], [1.0, 0.0]])))))
    est = entropy(GOLDEN, range(1, 25))
    assert est.exact == pytest.approx(perron, abs=1e-12)
    assert abs(est.values[-1] - perron) < 0.02


def test_sgap_evens_entropy_root():
    # sum over even s of x^-(s+1) = x / (x^2 - 1); the root is the golden mean
    root = sgap_exact_pressure(SGapParams.evens(), 0.0, 0.0)
    assert root.value == pytest.approx(LOG_PHI, abs=1e-12)
    assert root.value == pytest.approx(sgap_growth(list(range(0, 400, 2))), abs=1e-10)
    assert exact_pressure(SGapShift(SGapParams.evens()), Potential.constant(A2))[0] == \
        pytest.approx(LOG_PHI, abs=1e-12)


@pytest.mark.parametrize("a,b", [(0.0, 0.3), (0.3, 0.0), (0.15, -0.15), (-0.2, 0.1)])
def test_sgap_weighted_pressure(a, b):
    # zeros carry weight a, ones weight b; a gap s followed by its 1 contributes s a + b
    got = sgap_exact_pressure(SGapParams.powers(), a, b).value
    want = sgap_growth([2 ** j for j in range(0, 60)], a, b)
    assert got == pytest.approx(want, abs=1e-9)


def test_spectral_pressure_window_one():
    a, b = 0.2, -0.1
    phi = Potential.symbols(A2, {"0": a, "1": b})
    M = np.array([[math.exp(a), math.exp(a)], [math.exp(b), 0.0]])
    want = math.log(max(abs(np.linalg.eigvals(M))))
    assert spectral_pressure(GOLDEN, phi) == pytest.approx(want, abs=1e-12)
    est = pressure(GOLDEN, phi, range(1, 25))
    assert est.exact == pytest.approx(want, abs=1e-12)


def test_bowen_variation():
    assert bowen_variation(GOLDEN, Potential.symbols(A2, {"0": 1, "1": -2}), range(1, 9)) == 0
    assert bowen_variation(FULL, Potential.constant(A2, 3.0), range(1, 9)) == 0
    adversarial = Potential(A2, 2, {"00": 1, "01": -1, "10": 1, "11": -1})
    v = bowen_variation(FULL, adversarial, range(1, 13))
    assert v == pytest.approx(2 * adversarial.norm)
    rng = random.Random(9)
    for _ in range(5):
        phi = Potential(A2, 2, random_table(rng, 2))
        assert bowen_variation(FULL, phi, range(1, 9)) <= 2 * phi.norm + 1e-12


def test_gibbs_bernoulli_exact():
    b = Bernoulli(A2, ["1/3", "2/3"])
    rep = gibbs_check(b, b.log_potential(), 0.0, FULL, range(1, 21))
    assert rep.K == 1.0 and rep.K_prime == 1.0
    assert rep.passed


@pytest.mark.parametrize("P", [[["1/4", "3/4"], ["1/2", "1/2"]], [["3/10", "7/10"], ["1", "0"]]])
def test_gibbs_markov_closed_form(P):
    Pf = [[Fraction(x) for x in row] for row in P]
    # stationary vector of a 2-state chain
    p01, p10 = Pf[0][1], Pf[1][0]
    pi = [p10 / (p01 + p10), p01 / (p01 + p10)]
    positive = [x for row in Pf for x in row if x > 0]
    K_prime = float(max(pi) / min(positive))
    K = float(min(pi) / max(positive))
    m = Markov(A2, P)
    lang = FULL if all(x > 0 for x in positive) and len(positive) == 4 else None
    phi = m.log_potential()
    core = lang if lang is not None else m_lang(P)
    rep = gibbs_check(m, phi, 0.0, core, range(2, 17))
    assert rep.K_prime == pytest.approx(K_prime, rel=1e-12)
    assert rep.K == pytest.approx(K, rel=1e-12)
    # enumeration agrees with the local dynamic programme
    rep2 = gibbs_check(m, phi, 0.0, core, range(2, 9), method="enumerate")
    assert rep2.K_prime == pytest.approx(K_prime, rel=1e-12)


def m_lang(P):
    from shiftkit.shifts import SFT
    forb = [a + b for a in "01" for b in "01" if Fraction(P[int(a)][int(b)]) == 0]
    return SFT(A2, forb)


def test_gibbs_graph_perron_stable():
    m = GraphPerron(GOLDEN, n_trunc=64)
    d = builtin_decompositions(GOLDEN)
    rep = gibbs_check(m, Potential.constant(A2), LOG_PHI, d.core, range(1, 19), language=GOLDEN)
    assert math.isfinite(rep.K) and math.isfinite(rep.K_prime) and rep.K > 0
    assert rep.stable


def test_bounded_range():
    zero = Potential.constant(A2)
    r = bounded_range_check(zero, LOG_PHI)
    assert r["holds"] and r["margin"] == pytest.approx(LOG_PHI)
    edge = Potential.symbols(A2, {"0": 0.0, "1": 0.4})
    assert not bounded_range_check(edge, 0.4)["holds"]
    assert bounded_range_check(Potential.symbols(A2, {"0": 0, "1": 0.3}), LOG_PHI, 0.0)["holds"]


@pytest.mark.parametrize("a,b", [(0.0, 0.0), (0.0, 0.05), (0.05, 0.0), (0.02, -0.03)])
def test_sgap_margin_positive(a, b):
    phi = Potential.symbols(A2, {"0": a, "1": b})
    r = sgap_pressure_gap(SGapShift(SGapParams.evens()), phi, range(8, 13))
    assert r["margin"] > 0
    if a == b == 0:
        assert r["margin"] == pytest.approx(LOG_PHI, abs=1e-9)


@pytest.mark.parametrize("n", [100, 1000, 10000])
def test_stirling(n):
    r = stirling_check(n)
    assert r["holds"] and not r["violations"]
    assert r["checked"] == n // 2


def test_stirling_independent_sample():
    with mpmath.workdps(50):
        for n in (100, 1000):
            for k in range(1, n // 2 + 1, 7):
                d = mpmath.mpf(k) / n
                lhs = mpmath.log(mpmath.binomial(n, k))
                assert lhs >= -n * d * mpmath.log(d) - 2 * mpmath.log(n)


@pytest.mark.parametrize("params,S", [(SGapParams.evens(), {0, 2, 4, 6, 8}),
                                      (SGapParams.powers(), {1, 2, 4, 8})])
def test_permutation_count_bound(params, S):
    from itertools import permutations
    from oracles import sgap_match
    lang = SGapShift(params)
    zero = Potential.constant(A2)
    for k in (1, 2, 3):
        r = permutation_count_bound(lang, zero, k)
        blocks = ["0" * s + "1" for s in r["S_used"]]
        words = {"".join(p) for p in permutations(blocks)}
        assert len(words) == math.factorial(k)
        assert all(sgap_match(S, w) for w in words)
        assert r["rhs"] == pytest.approx(math.log(math.factorial(k)))
        assert r["holds"] and r["lhs"] >= math.log(len(words))
