"""Gibbs constants, the bounded-range test and the S-gap pressure-gap program."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from ..errors import ParameterError
from ..shifts.base import ShiftLanguage
from ..shifts.sgap import SGapShift
from .measures import MeasureModel
from .potential import BoundaryCache, Potential, birkhoff_sum_range
from .pressure import bowen_variation, max_birkhoff, partition_sum, pressure


@dataclass
class GibbsReport:
    """K = min over G-cylinders of m[w] e^{nP - sup S_n φ}; K' = max over L-cylinders
    of m[w] e^{nP - inf S_n φ} (the constants of the two-sided Gibbs bound)."""

    K: float
    K_prime: float
    P: float
    P_exact: bool
    ns: list[int]
    per_n: list[dict] = field(default_factory=list)
    stable: bool = True
    passed: bool = True

    def to_json(self) -> dict:
        return {"K": self.K, "K_prime": self.K_prime, "P": self.P, "P_exact": self.P_exact,
                "n_range": [self.ns[0], self.ns[-1]] if self.ns else [],
                "stable": self.stable, "pass": self.passed, "per_n": self.per_n}


def cylinder_extremes(m: MeasureModel, phi: Potential, lang: ShiftLanguage, automaton,
                      ns: Iterable[int]) -> dict[int, tuple]:
    """For each n: (max log m[w] - inf S_n φ, argmax, min log m[w] - sup S_n φ, argmin).

    w ranges over the length-n words of ``lang`` accepted by ``automaton``
    (all words if None).  Needs a measure with local log weights; the
    programme runs over (language state, automaton state, tail, last symbol)
    and keeps the lexicographically least word among equal values.
    """
    if not m.local:
        raise ParameterError(f"{m.kind} measures have no local log weights")
    wanted = sorted(set(n for n in ns if n >= 1))
    if not wanted:
        return {}
    k = phi.window
    cache = BoundaryCache(lang, phi)
    start = (lang.start(), automaton.start() if automaton is not None else None, "", None)
    # value = log m[w] - (interior part of S_n φ); max and min with witnesses
    layer = {start: (0.0, "", 0.0, "")}
    out = {}
    for n in range(1, wanted[-1] + 1):
        nxt: dict = {}
        for key in sorted(layer, key=lambda t: layer[t][1]):
            ls, cs, tail, last = key
            hi_v, hi_w, lo_v, lo_w = layer[key]
            for ch, l2 in lang.successors(ls):
                if automaton is not None:
                    c2 = automaton.step(cs, ch)
                    if c2 is None:
                        continue
                else:
                    c2 = None
                step = m.log_step(last, ch)
                if step == -math.inf:
                    continue
                if k == 1:
                    inner, t2 = phi(ch), ""
                elif len(tail) == k - 1:
                    inner, t2 = phi(tail + ch), (tail + ch)[1:]
                else:
                    inner, t2 = 0.0, tail + ch
                key2 = (l2, c2, t2, ch)
                a, b = hi_v + step - inner, lo_v + step - inner
                cur = nxt.get(key2)
                if cur is None:
                    nxt[key2] = (a, hi_w + ch, b, lo_w + ch)
                    continue
                ha, hw, la, lw = cur
                if a > ha or (a == ha and hi_w + ch < hw):
                    ha, hw = a, hi_w + ch
                if b < la or (b == la and lo_w + ch < lw):
                    la, lw = b, lo_w + ch
                nxt[key2] = (ha, hw, la, lw)
        layer = nxt
        if n in wanted:
            best_hi, arg_hi, best_lo, arg_lo = -math.inf, None, math.inf, None
            for (ls, cs, tail, last), (hv, hw, lv, lw) in layer.items():
                if automaton is not None and not automaton.accepting(cs):
                    continue
                blo, bhi = cache(ls, tail)
                v = hv - blo
                if v > best_hi or (v == best_hi and hw < arg_hi):
                    best_hi, arg_hi = v, hw
                v = lv - bhi
                if v < best_lo or (v == best_lo and lw < arg_lo):
                    best_lo, arg_lo = v, lw
            out[n] = (best_hi, arg_hi, best_lo, arg_lo)
    return out


def _extremes_by_enumeration(m, phi, lang, words_of, ns):
    cache = BoundaryCache(lang, phi)
    out = {}
    for n in ns:
        best_hi, arg_hi, best_lo, arg_lo = -math.inf, None, math.inf, None
        for w in words_of(n):
            lm = m.log_cylinder(w)
            if lm == -math.inf:
                continue
            lo, hi = birkhoff_sum_range(w, phi, lang, cache)
            if lm - lo > best_hi:
                best_hi, arg_hi = lm - lo, w
            if lm - hi < best_lo:
                best_lo, arg_lo = lm - hi, w
        out[n] = (best_hi, arg_hi, best_lo, arg_lo)
    return out


def gibbs_check(m: MeasureModel, phi: Potential, P_value: float, core, n_range: Iterable[int],
                language: ShiftLanguage | None = None, P_exact: bool = True,
                stability_tol: float = 1e-6, method: str = "auto") -> GibbsReport:
    """Empirical Gibbs constants over n in ``n_range``.

    ``core`` is the collection on which the lower bound is required (a
    Collection or a ShiftLanguage).  Stability means the per-n constants at
    the last two lengths agree to ``stability_tol`` in log scale.  Measures
    with local log weights use a state programme unless ``method`` is
    ``"enumerate"``.
    """
    lang = language or (core if isinstance(core, ShiftLanguage) else core.language)
    if lang.alphabet != m.alphabet:
        raise ParameterError("measure and language use different alphabets")
    ns = [n for n in n_range if n >= 1]
    core_auto = None if isinstance(core, ShiftLanguage) else core.automaton
    use_dp = (method != "enumerate" and m.local
              and (isinstance(core, ShiftLanguage) or core_auto is not None))
    if use_dp:
        upper = cylinder_extremes(m, phi, lang, None, ns)
        lower = upper if isinstance(core, ShiftLanguage) else \
            cylinder_extremes(m, phi, lang, core_auto, ns)
    else:
        upper = _extremes_by_enumeration(m, phi, lang, lang.words, ns)
        lower = upper if isinstance(core, ShiftLanguage) else \
            _extremes_by_enumeration(m, phi, lang, core.words, ns)
    K, Kp = math.inf, 0.0
    rows = []
    log_lo_seq, log_hi_seq = [], []
    for n in ns:
        best_hi, arg_hi = upper[n][0] + n * P_value, upper[n][1]
        best_lo, arg_lo = lower[n][2] + n * P_value, lower[n][3]
        log_hi_seq.append(best_hi)
        log_lo_seq.append(best_lo)
        rows.append({"n": n, "K_n": math.exp(best_lo) if best_lo < math.inf else None,
                     "K_prime_n": math.exp(best_hi), "argmin": arg_lo, "argmax": arg_hi})
        Kp = max(Kp, math.exp(best_hi))
        if best_lo < math.inf:
            K = min(K, math.exp(best_lo))
    stable = True
    if len(ns) >= 2:
        stable = (abs(log_hi_seq[-1] - log_hi_seq[-2]) <= stability_tol
                  and abs(log_lo_seq[-1] - log_lo_seq[-2]) <= stability_tol)
    passed = 0 < K <= Kp < math.inf and stable
    return GibbsReport(K, Kp, P_value, P_exact, ns, rows, stable, passed)


def bounded_range_check(phi: Potential, h_X: float, h_C: float = 0.0) -> dict:
    """sup φ - inf φ < h(X) - h(C), strictly."""
    osc = phi.oscillation
    gap = h_X - h_C
    return {"oscillation": osc, "gap": gap, "margin": gap - osc, "holds": osc < gap}


# ---------------------------------------------------------------------------
# S-gap pressure gap


def stirling_check(n: int, k_range: Iterable[int] | None = None) -> dict:
    """Exact check of log C(n, k) >= -nδ log δ - 2 log n with δ = k/n, 1 <= k <= n/2.

    With δ = k/n the claim is C(n, k) · n² · k^k >= n^k, compared as integers.
    """
    if n < 2:
        raise ParameterError("need n >= 2")
    ks = range(1, n // 2 + 1) if k_range is None else k_range
    violations = []
    checked = 0
    binom = 1
    last_k = 0
    n2 = n * n
    for k in sorted(ks):
        if not 1 <= k <= n // 2:
            raise ParameterError(f"k = {k} outside [1, n/2]")
        while last_k < k:
            binom = binom * (n - last_k) // (last_k + 1)
            last_k += 1
        checked += 1
        if binom * n2 * k ** k < n ** k:
            violations.append(k)
    return {"n": n, "checked": checked, "violations": violations, "holds": not violations}


def permutation_count_bound(lang: SGapShift, phi: Potential, k: int, m: int = 1,
                  V: float | None = None, max_length: int = 40) -> dict:
    """Counting lower bound Λ_{mN} >= (k!)^m exp(mNφ(0) - mkV').

    Uses the k smallest positive elements s_1 < ... < s_k of S; each block is
    a permutation of the words 0^{s_i}1, so N = Σ (s_i + 1).  V' = V + φ(0) -
    inf φ with V the Bowen constant (computed when not given).
    """
    if k < 1 or m < 1:
        raise ParameterError("need k, m >= 1")
    S = []
    s = 1
    while len(S) < k:
        if s in lang.params:
            S.append(s)
        s += 1
        if s > 10 * max_length:
            raise ParameterError("not enough elements of S")
    N = sum(x + 1 for x in S)
    L = m * N
    phi0 = phi("0" * phi.window)
    if V is None:
        V = bowen_variation(lang, phi, range(1, min(L, 12) + 1))
    Vp = V + phi0 - phi.inf
    rhs = m * math.lgamma(k + 1) + L * phi0 - m * k * Vp
    out = {"k": k, "m": m, "S_used": S, "N": N, "V": V, "V_prime": Vp, "rhs": rhs,
           "pressure_lower_bound": math.lgamma(k + 1) / N + phi0 - k * Vp / N}
    if L <= max_length:
        lhs = partition_sum(lang, L, phi)
        out.update({"lhs": lhs, "holds": lhs >= rhs - 1e-12})
    else:
        out.update({"lhs": None, "holds": None})
    return out


def sgap_pressure_gap(lang: SGapShift, phi: Potential, n_range: Iterable[int],
                      k: int = 3, tol: float = 1e-9) -> dict:
    """φ(0^∞), the maxima of (1/n) sup S_n φ over L_n, the pressure and the margin."""
    if not isinstance(lang, SGapShift):
        raise ParameterError("the pressure-gap program is for S-gap shifts")
    ns = [n for n in n_range if n >= 1]
    phi0 = phi("0" * phi.window)
    est = pressure(lang, phi, ns)
    P = est.exact if est.exact is not None else est.values[-1]
    maxima = [max_birkhoff(lang, n, phi) / n for n in ns]
    margin = P - maxima[-1]
    count_bound = permutation_count_bound(lang, phi, k)
    status = "inconclusive" if abs(margin) <= tol else ("holds" if margin > 0 else "fails")
    return {"phi_zero": phi0, "pressure": P, "pressure_exact": est.exact is not None,
            "ns": ns, "sup_birkhoff": maxima, "margin": margin,
            "margin_over_phi_zero": P - phi0, "status": status, "count_bound": count_bound}
