"""Independent reference implementations used only by the test-suite.

Nothing here imports shiftkit.  Each oracle is deliberately naive.
"""
from __future__ import annotations

import math
import re
from collections import deque
from fractions import Fraction
from itertools import product


def bfs_edit_distance(u: str, v: str, chars: str) -> int:
    """Shortest path from u to v in the graph of single edits."""
    limit = max(len(u), len(v)) + 1
    seen = {u: 0}
    queue = deque([u])
    while queue:
        w = queue.popleft()
        d = seen[w]
        if w == v:
            return d
        nxt = set()
        for i in range(len(w) + 1):
            for c in chars:
                nxt.add(w[:i] + c + w[i:])
        for i in range(len(w)):
            nxt.add(w[:i] + w[i + 1:])
            for c in chars:
                nxt.add(w[:i] + c + w[i + 1:])
        for x in nxt:
            if x not in seen and len(x) <= limit:
                seen[x] = d + 1
                queue.append(x)
    raise AssertionError("unreachable")


def wagner_fischer(u: str, v: str) -> int:
    prev = list(range(len(v) + 1))
    for i, a in enumerate(u, 1):
        cur = [i]
        for j, b in enumerate(v, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a != b)))
        prev = cur
    return prev[-1]


def all_words(chars: str, n: int):
    return ["".join(t) for t in product(chars, repeat=n)]


def golden_count(n: int) -> int:
    # golden beta shift = SFT without "11": two-vertex graph from vertex "last was 0"
    A = [[1, 1], [1, 0]]
    vec = [1, 1]
    for _ in range(n):
        vec = [A[0][0] * vec[0] + A[0][1] * vec[1], A[1][0] * vec[0] + A[1][1] * vec[1]]
    return vec[0]


def sgap_regex(S: set[int], max_len: int) -> re.Pattern:
    """Words 0^a (1 0^s)* [1 0^b] with every s in S, built from the display."""
    gaps = "|".join(f"0{{{s}}}" for s in sorted(S) if s <= max_len) or "(?!)"
    return re.compile(rf"0*(?:1(?:{gaps})(?=1))*(?:10*)?")


def sgap_match(S: set[int], w: str) -> bool:
    """Second implementation: split on 1 and check internal runs."""
    parts = w.split("1")
    return all(len(p) in S for p in parts[1:-1])


def sgap_count(S: set[int], n: int) -> int:
    """DP over positions: f[i] = words of length i ending in 1 whose internal gaps lie in S."""
    if n == 0:
        return 1
    end1 = [0] * (n + 1)      # length-i words ending with 1, admissible
    for i in range(1, n + 1):
        end1[i] = 1           # leading run 0^{i-1} then 1
        for s in S:
            j = i - 1 - s     # previous 1 at position j
            if s <= i - 2 and j >= 1:
                end1[i] += end1[j]
    total = 1                 # 0^n
    for i in range(1, n + 1):
        total += end1[i]      # trailing zeros unconstrained
    return total


def binomial_tail(n: int, lo: int) -> Fraction:
    return Fraction(sum(math.comb(n, j) for j in range(lo, n + 1)), 2 ** n)


def binary_entropy(q: float) -> float:
    return -q * math.log(q) - (1 - q) * math.log(1 - q)


def bisect_root(f, lo: float, hi: float, it: int = 200) -> float:
    flo = f(lo)
    for _ in range(it):
        mid = (lo + hi) / 2
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def sgap_growth(S_upto: list[int], weight0: float = 0.0, weight1: float = 0.0) -> float:
    """log x with sum_s x^-(s+1) e^{s a + b} = 1 over a finite list of gaps (bisection in log x)."""
    def f(lx):
        return sum(math.exp(min(700.0, s * weight0 + weight1 - (s + 1) * lx)) for s in S_upto) - 1
    lo, hi = -50.0, 50.0
    return bisect_root(f, lo, hi)
