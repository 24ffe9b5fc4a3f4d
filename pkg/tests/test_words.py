import math
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_words, bfs_edit_distance, wagner_fischer
from shiftkit.errors import AlphabetMismatchError, ParameterError, ResourceLimitError
from shiftkit.words import (Alphabet, edit_ball, edit_ball_bound, edit_distance, edit_script,
                            hamming_distance, neighbours)

A2 = Alphabet.digits(2)
short = st.text(alphabet="01", max_size=10)


def test_distance_examples():
    assert edit_distance("0101", "0101") == 0
    assert edit_distance("00", "01") == 1
    assert edit_distance("0110", "110") == 1
    assert edit_distance("", "0000") == 4


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="01", max_size=6), st.text(alphabet="01", max_size=6))
def test_distance_matches_bfs(u, v):
    assert edit_distance(u, v, A2) == bfs_edit_distance(u, v, "01")


@settings(max_examples=200, deadline=None)
@given(short, short, short)
def test_metric_axioms(u, v, w):
    d = edit_distance
    assert d(u, v) == d(v, u) == wagner_fischer(u, v)
    assert (d(u, v) == 0) == (u == v)
    assert d(u, w) <= d(u, v) + d(v, w)
    assert d(u, v) >= abs(len(u) - len(v))


@settings(max_examples=200, deadline=None)
@given(short, short)
def test_script_replays(u, v):
    s = edit_script(u, v)
    assert len(s) == edit_distance(u, v)
    assert s.apply(u) == v


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatchError):
        edit_distance("012", "01", A2)


def test_hamming():
    assert hamming_distance("0110", "0011") == 2
    with pytest.raises(ParameterError):
        hamming_distance("0", "01")


def test_ball_radius_zero():
    assert edit_ball("0110", 0, A2) == ["0110"]


def test_ball_of_01_radius_one():
    ball = set(edit_ball("01", 1, A2))
    # DP distance over every candidate of length <= 3
    oracle = {w for n in range(4) for w in all_words("01", n) if wagner_fischer("01", w) <= 1}
    assert ball == oracle
    assert len(ball) == len(oracle) == 9


def test_ball_filtered_is_subset():
    no11 = lambda w: "11" not in w
    full = set(edit_ball("0100", 2, A2))
    filt = set(edit_ball("0100", 2, A2, no11))
    assert filt <= full
    assert filt == {w for w in full if no11(w)}


def test_ball_radius_cap():
    with pytest.raises(ResourceLimitError):
        edit_ball("0", 3, A2, max_radius=2)


def test_neighbours_single_edits():
    nb = neighbours("01", "01")
    assert all(wagner_fischer("01", w) == 1 for w in nb)


def test_bound_examples():
    assert edit_ball_bound(5, 0, 2) == 1
    assert edit_ball_bound(3, 1, 2) == 24
    assert edit_ball_bound(12, 3, 2) == 6 ** 3 * math.comb(15, 12)
    assert math.isclose(edit_ball_bound(12, 3, 2, log=True), math.log(edit_ball_bound(12, 3, 2)))


@pytest.mark.parametrize("n", range(0, 8))
def test_bound_dominates_ball(n):
    for m in range(0, 3):
        b = edit_ball_bound(n, m, 2)
        for t in product("01", repeat=n):
            assert len(edit_ball("".join(t), m, A2)) <= b


def test_alphabet_codec_roundtrip():
    A = Alphabet(("a", "bc", "d"))
    w = A.encode(["bc", "a", "d"])
    assert A.decode(w) == ["bc", "a", "d"]
    assert A.parse(A.serialize(w)) == w
