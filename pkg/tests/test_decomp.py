import math
from itertools import product

import pytest

from oracles import all_words, sgap_match
from shiftkit.decomp import (Collection, GluingTable, builtin_decompositions,
                             check_GM_extendability, check_specification, glue,
                             multiplicity_bound, multiplicity_check, truncated_glue)
from shiftkit.errors import ParameterError, ResourceLimitError
from shiftkit.shifts import (SFT, BetaShift, BetaShiftParams, CodedShift, FullShift, SGapParams,
                             SGapShift)
from shiftkit.words import Alphabet

A2 = Alphabet.digits(2)


def sgap_core_oracle(S, w):
    # 0^{n1} 1 ... 0^{nk} 1 with every n_i in S; k = 0 gives the empty word
    if w == "":
        return True
    if not w.endswith("1"):
        return False
    return all(len(run) in S for run in w[:-1].split("1"))


@pytest.fixture(scope="module")
def evens():
    return builtin_decompositions(SGapShift(SGapParams.evens()))


@pytest.fixture(scope="module")
def golden():
    return builtin_decompositions(BetaShift(BetaShiftParams.golden()))


def test_sgap_split_examples(evens):
    assert evens.prefix.contains("0001")
    assert evens.suffix.contains("00")
    assert evens.core.contains("001")
    assert not evens.core.contains("0001")


def test_sgap_core_oracle(evens):
    S = set(range(0, 20, 2))
    for n in range(11):
        for w in all_words("01", n):
            if sgap_match(S, w):
                assert evens.core.contains(w) == sgap_core_oracle(S, w), w


@pytest.mark.parametrize("name", ["evens", "golden"])
def test_every_word_splits(name, request):
    d = request.getfixturevalue(name)
    assert d.check_complete(10)["complete"]
    for n in range(9):
        for w in d.language.words(n):
            p, c, s = d.split(w)
            assert p + c + s == w
            assert d.prefix.contains(p) and d.suffix.contains(s)
            assert c == "" or d.core.contains(c)


def test_golden_core_by_graph_walk(golden):
    # vertex v1 is "after a 0 or at the start"; the core is the set of loops at v1:
    # no 11 and either empty or ending in 0
    for n in range(1, 11):
        for w in all_words("01", n):
            if "11" in w:
                continue
            assert golden.core.contains(w) == w.endswith("0"), w


def test_full_shift_trivial_decomposition():
    d = builtin_decompositions(FullShift(A2))
    assert d.prefix.words(0) == [""] and d.prefix.words(1) == []
    assert d.suffix.words(1) == []
    assert d.core.words(4) == all_words("01", 4)


@pytest.mark.parametrize("shift", [SGapShift(SGapParams.evens()), SGapShift(SGapParams.powers()),
                                   BetaShift(BetaShiftParams.golden()),
                                   BetaShift(BetaShiftParams.tribonacci())])
def test_zero_specification(shift):
    d = builtin_decompositions(shift)
    rep = check_specification(d.core, "0", 0, n_max=7)
    assert rep.holds and rep.tested > 0


def test_full_shift_strong_specification():
    d = builtin_decompositions(FullShift(A2))
    rep = check_specification(d.core, "S", 0, m_max=3, n_max=4)
    assert rep.holds


def test_zero_spec_needs_tau_zero(evens):
    with pytest.raises(ParameterError):
        check_specification(evens.core, "0", 1)


def test_spec_budget(evens):
    with pytest.raises(ResourceLimitError):
        check_specification(evens.core, "W", 0, m_max=4, n_max=10, max_tuples=100)


def test_gm_extension_sgap_powers():
    d = builtin_decompositions(SGapShift(SGapParams.powers()))
    S = [1, 2, 4, 8]
    M = 3
    # runs of length a <= M are completed by min{s in S, s >= a} - a zeros, plus one 1 at the right
    gap = max(min(s for s in S if s >= a) - a for a in range(M + 1))
    rep = check_GM_extendability(d.GM(M), 8)
    assert rep["holds"]
    assert rep["max_left"] <= gap + 1
    assert rep["max_right"] <= gap + 1


def test_gm_zero_is_core(evens):
    gm = evens.GM(0)
    for n in range(9):
        assert gm.words(n) == evens.core.words(n)
    rep = check_GM_extendability(gm, 8)
    assert rep["holds"] and rep["max_left"] == rep["max_right"] == 0


def test_gm_extension_beta(golden):
    for M in range(4):
        rep = check_GM_extendability(golden.GM(M), 8)
        assert rep["holds"]
        assert max(rep["max_left"], rep["max_right"]) <= M + golden.tau


def test_glue_single_and_concat(evens):
    t = GluingTable(evens.language, "0", 0, evens.core)
    assert glue(["001"], t) == "001"
    assert glue(["001", "1", "00001"], t) == "001100001"
    assert truncated_glue(["001", "1"], t) == "0011"


def test_full_glue_is_concat():
    d = builtin_decompositions(FullShift(A2))
    t = GluingTable(d.language, "S", 0, d.core)
    for tup in product(["0", "10", "111"], repeat=3):
        assert glue(list(tup), t) == "".join(tup)


def w_collection(forbidden, tau):
    lang = SFT(A2, forbidden)
    core = Collection("ones", lang, lambda w: w.startswith("1") and w.endswith("1"))
    return lang, core, GluingTable(lang, "W", tau, core)


def test_truncated_glue_strict_prefix():
    lang, core, table = w_collection(["11", "101"], 2)
    for tup in product(core.words_upto(5), repeat=2):
        full = glue(list(tup), table)
        cut = truncated_glue(list(tup), table)
        assert len(cut) == sum(map(len, tup))
        assert lang.contains(full)
        assert full.startswith(cut) and len(full) > len(cut)


def test_multiplicity_bound_formula():
    assert multiplicity_bound(2, 0, 5) == 1
    assert multiplicity_bound(2, 1, 2) == (2 ** 1 * 2) ** 2 == 16
    assert multiplicity_bound(3, 2, 3) == (9 * 3) ** 3


def test_multiplicity_sgap(evens):
    t = GluingTable(evens.language, "0", 0, evens.core)
    worst = 0
    for k in range(1, 4):
        for lens in product(range(1, 9), repeat=k):
            if sum(lens) > 16:
                continue
            rep = multiplicity_check(evens.core, 0, lens, t)
            assert rep.passed and rep.bound == 1
            worst = max(worst, rep.max_count)
    assert worst == 1


def test_multiplicity_tau_one_brute_force():
    lang, core, table = w_collection(["11"], 1)
    for lens in product(range(1, 6), repeat=2):
        rep = multiplicity_check(core, 1, lens, table)
        # independent count of preimages of each truncated gluing
        counts = {}
        for tup in product(*(core.words(n) for n in lens)):
            z = truncated_glue(list(tup), table)
            counts[z] = counts.get(z, 0) + 1
        want = max(counts.values(), default=0)
        assert rep.max_count == want
        assert want <= 16
