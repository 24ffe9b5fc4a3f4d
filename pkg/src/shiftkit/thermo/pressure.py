"""Partition sums, pressure and entropy.

Λ_n(D, φ) = Σ_{w ∈ D_n} exp(sup_{[w]} S_n φ) is accumulated in the log domain.
The main route is a dynamic programme over (language state, collection state,
last k-1 symbols); words sharing a key share the boundary sup, so only the
interior windows need to be carried along.  Partial sums are merged with
``math.fsum`` after factoring out the maximum, in a fixed key order, so the
result does not depend on how words are visited.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from ..decomp import Collection
from ..errors import ParameterError
from ..shifts.base import ShiftLanguage, reachable_states
from ..shifts.sgap import SGapShift
from .potential import BoundaryCache, Potential, birkhoff_sum_range


def log_sum_exp(values: Iterable[float]) -> float:
    vals = sorted(values)
    if not vals:
        return -math.inf
    top = vals[-1]
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(math.exp(v - top) for v in vals))


def _language_of(D) -> tuple[ShiftLanguage, object]:
    if isinstance(D, ShiftLanguage):
        return D, None
    if isinstance(D, Collection):
        return D.language, D.automaton
    raise ParameterError(f"unsupported word collection {type(D).__name__}")


def _layers(D, phi: Potential, n: int, combine):
    """Run the (state, collection state, tail) programme for n steps.

    ``combine`` merges the list of values arriving at a key (log-sum-exp for
    partition sums, max for Birkhoff maxima).
    """
    lang, auto = _language_of(D)
    k = phi.window
    start = (lang.start(), auto.start() if auto is not None else None, "")
    layer = {start: 0.0}
    for _ in range(n):
        incoming: dict = defaultdict(list)
        for (ls, cs, tail), val in layer.items():
            for ch, l2 in lang.successors(ls):
                if auto is not None:
                    c2 = auto.step(cs, ch)
                    if c2 is None:
                        continue
                else:
                    c2 = None
                if k == 1:
                    incoming[(l2, c2, "")].append(val + phi(ch))
                    continue
                if len(tail) == k - 1:
                    v2 = val + phi(tail + ch)
                    t2 = (tail + ch)[1:]
                else:
                    v2 = val
                    t2 = tail + ch
                incoming[(l2, c2, t2)].append(v2)
        layer = {key: combine(vals) for key, vals in incoming.items()}
    return layer, lang, auto


def _finals(D, phi: Potential, n: int, combine, use_hi: bool):
    layer, lang, auto = _layers(D, phi, n, combine)
    cache = BoundaryCache(lang, phi)
    out = []
    for (ls, cs, tail), val in layer.items():
        if auto is not None and not auto.accepting(cs):
            continue
        lo, hi = cache(ls, tail)
        out.append(val + (hi if use_hi else lo))
    return out


def partition_sum(D, n: int, phi: Potential, method: str = "auto") -> float:
    """log Λ_n(D, φ) for a ShiftLanguage or Collection ``D``.

    ``method='enumerate'`` sums over the enumerated words instead of running
    the state programme (collections without an automaton always enumerate).
    """
    if n < 0:
        raise ParameterError("n must be nonnegative")
    if n == 0:
        return 0.0
    if method == "enumerate" or (isinstance(D, Collection) and D.automaton is None):
        lang, _ = _language_of(D)
        words = D.words(n)
        return partition_sum_words(words, phi, lang)
    return log_sum_exp(_finals(D, phi, n, log_sum_exp, use_hi=True))


def partition_sum_words(words: Sequence[str], phi: Potential, lang: ShiftLanguage) -> float:
    """log Σ_{w ∈ words} exp(sup_{[w]} S_n φ) by direct enumeration."""
    cache = BoundaryCache(lang, phi)
    return log_sum_exp(birkhoff_sum_range(w, phi, lang, cache)[1] for w in words)


def max_birkhoff(D, n: int, phi: Potential) -> float:
    """max over w ∈ D_n of sup_{[w]} S_n φ."""
    vals = _finals(D, phi, n, max, use_hi=True)
    if not vals:
        raise ParameterError(f"no words of length {n}")
    return max(vals)


def bowen_variation(D, phi: Potential, n_range: Iterable[int]) -> float:
    """max over n and w ∈ D_n of sup_{[w]} S_n φ - inf_{[w]} S_n φ."""
    lang, auto = _language_of(D)
    cache = BoundaryCache(lang, phi)
    best = 0.0
    for n in n_range:
        if n < 1:
            continue
        layer, _, _ = _layers(D, phi, n, max)
        for (ls, cs, tail) in layer:
            if auto is not None and not auto.accepting(cs):
                continue
            lo, hi = cache(ls, tail)
            best = max(best, hi - lo)
    return best


# ---------------------------------------------------------------------------
# exact values


def spectral_pressure(lang: ShiftLanguage, phi: Potential, cap: int = 2000) -> float | None:
    """log of the Perron root of the weighted transfer matrix, or None.

    Available when the live automaton states are finite (at most ``cap``).
    Nodes are (state, last k-1 symbols).
    """
    states, complete = reachable_states(lang, cap)
    if not complete:
        return None
    k = phi.window
    nodes: dict = {}
    frontier = [(lang.start(), "")]
    nodes[frontier[0]] = 0
    edges: list[tuple[int, int, float]] = []
    i = 0
    while i < len(frontier):
        s, tail = frontier[i]
        for ch, s2 in lang.successors(s):
            if k == 1:
                w, t2 = phi(ch), ""
            elif len(tail) == k - 1:
                w, t2 = phi(tail + ch), (tail + ch)[1:]
            else:
                w, t2 = None, tail + ch
            key = (s2, t2)
            if key not in nodes:
                if len(nodes) >= cap:
                    return None
                nodes[key] = len(frontier)
                frontier.append(key)
            edges.append((nodes[(s, tail)], nodes[key], w))
        i += 1
    size = len(frontier)
    mat = np.zeros((size, size))
    for a, b, w in edges:
        # edges inside the initial transient carry no weight yet; they do not
        # affect the spectral radius of the recurrent part
        mat[a, b] += 1.0 if w is None else math.exp(w)
    rho = max(abs(np.linalg.eigvals(mat)))
    return math.log(rho)


@dataclass
class GapRoot:
    value: float
    radius: float
    terms: int


def sgap_exact_pressure(params, phi0: float, phi1: float, tol: float = 1e-13) -> GapRoot:
    """log x* with Σ_{s∈S} exp(s φ0 + φ1) x^{-(s+1)} = 1, tail certified.

    The truncated sum F_T gives F_T(x*) <= 1 <= F_T(x*) + tail(x*), so the root
    is bracketed by the roots of F_T = 1 and F_T + tail = 1.
    """
    if params.is_finite:
        S = params.values(params.max_element)
    else:
        S = None
    lo_x = math.exp(phi0)

    def trunc(x, T):
        vals = S if S is not None else params.values(T)
        return math.fsum(math.exp(s * phi0 + phi1 - (s + 1) * math.log(x)) for s in vals)

    def tail(x, T):
        if S is not None:
            return 0.0
        r = lo_x / x
        return math.exp(phi1) / x * r ** (T + 1) / (1 - r)

    T = 64
    while True:
        f = lambda x: trunc(x, T) - 1.0  # noqa: E731
        g = lambda x: trunc(x, T) + tail(x, T) - 1.0  # noqa: E731
        a = lo_x * (1 + 1e-12)
        b = lo_x + math.exp(phi1) + 2.0 + lo_x
        while f(b) > 0 or g(b) > 0:
            b *= 2
        if f(a) <= 0:
            raise ParameterError("S too sparse near exp(φ(0)); root not isolated")
        x1 = brentq(f, a, b, xtol=1e-15, rtol=1e-15)
        if g(a) <= 0:
            T *= 2
            continue
        x2 = brentq(g, a, b, xtol=1e-15, rtol=1e-15)
        if tail(x1, T) < tol or T > 1 << 16:
            lo, hi = sorted((math.log(x1), math.log(x2)))
            return GapRoot((lo + hi) / 2, (hi - lo) / 2 + 1e-15, T)
        T *= 2


def exact_pressure(lang: ShiftLanguage, phi: Potential) -> tuple[float | None, str | None]:
    if isinstance(lang, SGapShift) and phi.window == 1:
        root = sgap_exact_pressure(lang.params, phi("0"), phi("1"))
        return root.value, "generating-function root"
    val = spectral_pressure(lang, phi)
    if val is not None:
        return val, "Perron root"
    return None, None


@dataclass
class PressureEstimate:
    ns: list[int]
    values: list[float]
    exact: float | None = None
    exact_method: str | None = None
    extrapolated: float | None = None
    upper_bound: float | None = None
    status: str = "ok"
    tolerance: float = 0.02

    def at(self, n: int) -> float:
        return self.values[self.ns.index(n)]

    @property
    def agrees(self) -> bool | None:
        if self.exact is None or self.extrapolated is None:
            return None
        return abs(self.exact - self.extrapolated) <= self.tolerance

    def to_rows(self) -> list[dict]:
        return [{"n": n, "value": v, "exact": self.exact} for n, v in zip(self.ns, self.values)]

    def to_json(self) -> dict:
        return {"ns": self.ns, "values": self.values, "exact": self.exact,
                "exact_method": self.exact_method, "extrapolated": self.extrapolated,
                "upper_bound": self.upper_bound, "status": self.status}


def _estimate(ns, logs, exact, method, is_language, tolerance):
    values = [lv / n for n, lv in zip(ns, logs)]
    extrap = None
    status = "ok"
    if len(ns) >= 3 and ns[-1] - ns[-2] == 1 and ns[-2] - ns[-3] == 1:
        d1 = logs[-1] - logs[-2]
        d0 = logs[-2] - logs[-3]
        extrap = d1
        if abs(d1 - d0) > tolerance:
            status = "inconclusive"
    upper = min(values) if is_language and values else None
    return PressureEstimate(list(ns), values, exact, method, extrap, upper, status, tolerance)


def pressure(D, phi: Potential, n_range: Iterable[int], exact: bool = True,
             tolerance: float = 0.02) -> PressureEstimate:
    """Finite-n pressures (1/n) log Λ_n, with the exact value when available."""
    ns = [n for n in n_range if n >= 1]
    logs = [partition_sum(D, n, phi) for n in ns]
    ex, method = (None, None)
    if exact and isinstance(D, ShiftLanguage):
        ex, method = exact_pressure(D, phi)
    return _estimate(ns, logs, ex, method, isinstance(D, ShiftLanguage), tolerance)


def count_words(D, n: int) -> int:
    if isinstance(D, ShiftLanguage):
        return D.count(n)
    lang, auto = _language_of(D)
    if auto is None:
        return len(D.words(n))
    layer = {(lang.start(), auto.start()): 1}
    for _ in range(n):
        nxt: dict = defaultdict(int)
        for (ls, cs), c in layer.items():
            for ch, l2 in lang.successors(ls):
                c2 = auto.step(cs, ch)
                if c2 is not None:
                    nxt[(l2, c2)] += c
        layer = nxt
    return sum(c for (ls, cs), c in layer.items() if auto.accepting(cs))


def entropy(D, n_range: Iterable[int], exact: bool = True,
            tolerance: float = 0.02) -> PressureEstimate:
    """(1/n) log #D_n from exact integer counts."""
    ns = [n for n in n_range if n >= 1]
    logs = []
    for n in ns:
        c = count_words(D, n)
        logs.append(math.log(c) if c > 0 else -math.inf)
    ex, method = (None, None)
    if exact and isinstance(D, ShiftLanguage):
        ex, method = exact_pressure(D, Potential.constant(D.alphabet, 0.0))
    return _estimate(ns, logs, ex, method, isinstance(D, ShiftLanguage), tolerance)
