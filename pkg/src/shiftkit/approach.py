"""Mistake functions and edit approachability of a language by its core collection."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .decomp import Collection, Decomposition, WordAutomaton
from .errors import MembershipError, ParameterError
from .shifts.base import ShiftLanguage
from .shifts.beta import BetaShiftParams, _digit_char
from .shifts.sgap import BINARY, SGapParams, SGapShift
from .thermo.potential import BoundaryCache, Potential
from .words import Alphabet, edit_distance, edit_layers


class MistakeFunction:
    """A nondecreasing g: N → N with g(n)/n → 0 (checked on finite ranges only)."""

    def __init__(self, fn: Callable[[int], int], name: str):
        self._fn = fn
        self.name = name
        self._cache: dict[int, int] = {}

    def __call__(self, n: int) -> int:
        v = self._cache.get(n)
        if v is None:
            v = int(self._fn(n))
            if v < 0:
                raise ParameterError("mistake functions are nonnegative")
            self._cache[n] = v
        return v

    @classmethod
    def constant(cls, c: int) -> "MistakeFunction":
        return cls(lambda n: c, f"const({c})")

    @classmethod
    def sqrt_ceil(cls) -> "MistakeFunction":
        return cls(lambda n: math.isqrt(n - 1) + 1 if n > 0 else 0, "ceil(sqrt(n))")

    @classmethod
    def sgap(cls, params: SGapParams) -> "MistakeFunction":
        def g(n):
            if n == 0:
                return 0
            s = params.selector(n)
            return 2 * (-(-n // s) + s)
        return cls(g, f"2(ceil(n/s_n)+s_n), s_n=min S∩[sqrt n, ∞) for S={params.config}")

    def check(self, n_range: Iterable[int], thresholds=(0.5, 0.25)) -> dict:
        ns = sorted(n for n in n_range if n >= 1)
        vals = [self(n) for n in ns]
        nondecr = all(a <= b for a, b in zip(vals, vals[1:]))
        ratios = [v / n for v, n in zip(vals, ns)]
        below = {}
        for t in thresholds:
            # first n from which every tested ratio stays below t
            first = None
            for i in range(len(ns)):
                if all(r < t for r in ratios[i:]):
                    first = ns[i]
                    break
            below[str(t)] = first
        return {"name": self.name, "nondecreasing": nondecr, "ratios": ratios,
                "eventually_below": below}


# ---------------------------------------------------------------------------
# β-shifts


def greedy_admissible(params: BetaShiftParams, word: str) -> bool:
    """Every suffix ⪯ the greedy-expansion prefix of equal length.

    This contains the language (which uses ω*); the two differ only for
    simple β.
    """
    params.alphabet.check(word)
    n = len(word)
    omega = "".join(_digit_char(d) for d in params.greedy_digits(n)) if n else ""
    return all(word[i:] <= omega[: n - i] for i in range(n))


def approach_beta(word: str, params: BetaShiftParams) -> str:
    """Decrement the last nonzero symbol; all-zero words are returned unchanged."""
    if not greedy_admissible(params, word):
        raise MembershipError(f"{word!r} is not an admissible β-word")
    j = max((i for i, ch in enumerate(word) if ch != "0"), default=None)
    if j is None:
        return word
    return word[:j] + chr(ord(word[j]) - 1) + word[j + 1:]


# ---------------------------------------------------------------------------
# S-gap shifts


@dataclass
class ApproachResult:
    u: str
    core: str
    v: str
    s: int
    g: int
    distance: int
    source: str = ""

    def __iter__(self):
        return iter((self.u, self.core, self.v))

    @property
    def word(self) -> str:
        return self.u + self.core + self.v


def _fill_run(length: int, s: int) -> tuple[str, int, int]:
    """Rewrite 0^length as 0^i (1 0^s)^t with length = i + t(s+1), 0 <= i <= s."""
    t, i = divmod(length, s + 1)
    return "0" * i + ("1" + "0" * s) * t, i, t


def approach_sgap(word: str, params: SGapParams, g: MistakeFunction | None = None) -> ApproachResult:
    """The edit construction towards G for S-gap shifts.

    With z = 0^k 1 ⋯ 1 0^ℓ and s = s_n: the leading run becomes
    z^p = 0^i (1 0^s)^t, the trailing run becomes z^s = (0^s 1)^{t'} 0^j, and
    u = 0^{s-i}, v = 0^{s-j} 1, so that u z^p ⋯ z^s v has every gap equal to s
    or to an internal gap of z.  A word without a 1 is treated as a leading
    run followed by v = 1.
    """
    BINARY.check(word)
    if not SGapShift(params).contains(word) and not _all_gaps_ok(word, params):
        raise MembershipError(f"{word!r} is not in the S-gap language")
    n = len(word)
    g = g or MistakeFunction.sgap(params)
    s = params.selector(max(n, 1))
    if "1" not in word:
        zp, i, _ = _fill_run(n, s)
        u, core, v = "0" * (s - i), zp, "1"
    else:
        k = word.index("1")
        last = word.rindex("1")
        ell = n - last - 1
        zp, i, _ = _fill_run(k, s)
        t2, j = divmod(ell, s + 1)
        zs = ("0" * s + "1") * t2 + "0" * j
        u = "0" * (s - i)
        core = zp + word[k:last + 1] + zs
        v = "0" * (s - j) + "1"
    dist = edit_distance(word, u + core + v)
    return ApproachResult(u, core, v, s, g(n), dist, word)


def _all_gaps_ok(word, params):
    ones = [i for i, ch in enumerate(word) if ch == "1"]
    return all(b - a - 1 in params for a, b in zip(ones, ones[1:]))


# ---------------------------------------------------------------------------
# nearest words


def nearest_in_collection(word: str, contains: Callable[[str], bool], alphabet: Alphabet,
                          r_max: int) -> tuple[str, int] | None:
    """Breadth-first search of edit layers; lexicographically least word of the first hit."""
    alphabet.check(word)
    for d, layer in enumerate(edit_layers(word, alphabet.chars, r_max)):
        hits = [w for w in layer if contains(w)]
        if hits:
            return min(hits), d
    return None


def automaton_distance(word: str, lang: ShiftLanguage, automaton: WordAutomaton,
                       r_max: int) -> int | None:
    """Edit distance from ``word`` to the nearest accepted word of the language.

    0-1 breadth-first search over (position in word, language state,
    automaton state); None if the distance exceeds ``r_max``.
    """
    n = len(word)
    start = (0, lang.start(), automaton.start())
    dist = {start: 0}
    dq = deque([start])
    while dq:
        node = dq.popleft()
        d = dist[node]
        i, ls, cs = node
        if i == n and automaton.accepting(cs):
            return d
        moves = []
        if i < n:
            moves.append(((i + 1, ls, cs), 1))
        for ch, l2 in lang.successors(ls):
            c2 = automaton.step(cs, ch)
            if c2 is None:
                continue
            if i < n:
                moves.append(((i + 1, l2, c2), 0 if ch == word[i] else 1))
            moves.append(((i, l2, c2), 1))
        for nxt, c in moves:
            nd = d + c
            if nd > r_max:
                continue
            if nd < dist.get(nxt, math.inf):
                dist[nxt] = nd
                if c == 0:
                    dq.appendleft(nxt)
                else:
                    dq.append(nxt)
    return None


@dataclass
class ApproachReport:
    g_name: str
    rows: list[dict] = field(default_factory=list)
    holds: bool = True
    counterexample: str | None = None

    def csv_rows(self) -> list[tuple]:
        return [(r["n"], r["max_observed_distance"], r["g"], r["pass"]) for r in self.rows]


def verify_edit_approachability(shift: ShiftLanguage, decomposition: Decomposition,
                                g: MistakeFunction, n_max: int, n_min: int = 1,
                                method: str = "auto") -> ApproachReport:
    """For every w ∈ L_n, n_min <= n <= n_max: distance from w to G is <= g(n)."""
    core = decomposition.core
    use_auto = core.automaton is not None and method in ("auto", "automaton")
    report = ApproachReport(g.name)
    for n in range(n_min, n_max + 1):
        bound = g(n)
        worst = 0
        for w in shift.words(n):
            if use_auto:
                d = automaton_distance(w, shift, core.automaton, bound)
            else:
                hit = nearest_in_collection(w, core.contains, shift.alphabet, bound)
                d = None if hit is None else hit[1]
            if d is None:
                report.rows.append({"n": n, "max_observed_distance": None, "g": bound,
                                    "pass": False})
                report.holds = False
                report.counterexample = w
                return report
            worst = max(worst, d)
        report.rows.append({"n": n, "max_observed_distance": worst, "g": bound, "pass": True})
    return report


# ---------------------------------------------------------------------------
# Birkhoff closeness under edits


def variation_closed_form(phi: Potential, m: int) -> float:
    """V(m) = sup |S_{m'}φ(x) - S_{m''}φ(y)| over x, y agreeing on m symbols,
    m', m'' ∈ {m, m+1, m+2}, bounded window by window.

    The first max(0, m-k+1) terms coincide; each side has at most k+1 others,
    each in [inf φ, sup φ].
    """
    k = phi.window
    common = max(0, m - k + 1)
    hi, lo = phi.sup, phi.inf
    best = 0.0
    for a in (m, m + 1, m + 2):
        for b in (m, m + 1, m + 2):
            ea, eb = a - common, b - common
            best = max(best, ea * hi - eb * lo, eb * hi - ea * lo)
    return best


def epsilon(phi: Potential, z: float) -> float:
    """ε(z) = sup_{m >= z} V(m)/m; V is constant from m = k - 1 on."""
    start = max(1, math.ceil(z))
    stop = max(start, phi.window - 1)
    return max(variation_closed_form(phi, m) / m for m in range(start, stop + 1))


def birkhoff_deviation_bound(n: int, g, phi: Potential) -> float:
    """δ_n = 4‖φ‖√(ĝ/n) + ε(C_n) + (ĝ/n)‖φ‖ with ĝ = g + 1 and C_n = √(n/ĝ)."""
    if n < 1:
        raise ParameterError("need n >= 1")
    gh = (g(n) if callable(g) else int(g)) + 1
    norm = phi.norm
    Cn = math.sqrt(n / gh)
    return 4 * norm * math.sqrt(gh / n) + epsilon(phi, Cn) + gh / n * norm


def max_birkhoff_deviation(lang: ShiftLanguage, phi: Potential, n: int, radius: int) -> float:
    """max |S_nφ(x)/n - S_mφ(y)/m| over x ∈ [u], y ∈ [v], u ∈ L_n, v ∈ L_m, d̂(u, v) <= radius.

    Exact: a dynamic programme over alignments of (u, v) pairs with at most
    ``radius`` edits, run once per target length m and sign.
    """
    cache = BoundaryCache(lang, phi)
    best = 0.0
    for m in range(max(1, n - radius), n + radius + 1):
        for sign in (1, -1):
            val = _pair_dp(lang, phi, cache, n, m, radius, sign)
            if val is not None:
                best = max(best, val)
    return best


def _push(ctx: str, ch: str, k: int, phi: Potential) -> tuple[str, float]:
    if k == 1:
        return "", phi(ch)
    if len(ctx) == k - 1:
        return (ctx + ch)[1:], phi(ctx + ch)
    return ctx + ch, 0.0


def _pair_dp(lang, phi, cache, n, m, radius, sign):
    k = phi.window
    wx, wy = sign / n, -sign / m
    s0 = lang.start()
    layer = {(0, 0, 0, s0, "", s0, ""): 0.0}
    best = None
    # states are grouped by i + j so every move goes to the next groups
    buckets: dict[int, dict] = {0: layer}
    for total in range(n + m + 1):
        cur = buckets.pop(total, {})
        for (i, j, e, us, uc, vs, vc), val in cur.items():
            if i == n and j == m:
                ulo, uhi = cache(us, uc)
                vlo, vhi = cache(vs, vc)
                fin = val + (wx * (uhi if wx > 0 else ulo)) + (wy * (vhi if wy > 0 else vlo))
                best = fin if best is None else max(best, fin)
                continue
            u_moves = list(lang.successors(us)) if i < n else []
            v_moves = list(lang.successors(vs)) if j < m else []
            for a, us2 in u_moves:
                uc2, gx = _push(uc, a, k, phi)
                # deletion of a
                if e < radius:
                    _relax(buckets, total + 1, (i + 1, j, e + 1, us2, uc2, vs, vc), val + wx * gx)
                for b, vs2 in v_moves:
                    c = 0 if a == b else 1
                    if e + c > radius:
                        continue
                    vc2, gy = _push(vc, b, k, phi)
                    _relax(buckets, total + 2, (i + 1, j + 1, e + c, us2, uc2, vs2, vc2),
                           val + wx * gx + wy * gy)
            if e < radius:
                for b, vs2 in v_moves:
                    vc2, gy = _push(vc, b, k, phi)
                    _relax(buckets, total + 1, (i, j + 1, e + 1, us, uc, vs2, vc2), val + wy * gy)
    return best


def _relax(buckets, key_total, state, val):
    bucket = buckets.setdefault(key_total, {})
    old = bucket.get(state)
    if old is None or val > old:
        bucket[state] = val


def max_birkhoff_deviation_bruteforce(lang: ShiftLanguage, phi: Potential, n: int,
                                      radius: int) -> float:
    """Reference implementation by pair enumeration (small n only)."""
    from .thermo.potential import birkhoff_sum_range
    from .words import edit_ball

    cache = BoundaryCache(lang, phi)
    best = 0.0
    for u in lang.words(n):
        ulo, uhi = birkhoff_sum_range(u, phi, lang, cache)
        for v in edit_ball(u, radius, lang.alphabet, lang.contains, max_radius=radius):
            if not v:
                continue
            vlo, vhi = birkhoff_sum_range(v, phi, lang, cache)
            m = len(v)
            best = max(best, uhi / n - vlo / m, vhi / m - ulo / n)
    return best
