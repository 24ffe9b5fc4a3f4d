"""Empirical measures, generic words, level-2 decay rates and horseshoe subshifts."""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import binomtest

from .decomp import Collection, Decomposition, _extend_to_core, check_specification
from .errors import AlphabetMismatchError, ParameterError, ResourceLimitError, SpecificationError
from .shifts.base import MAX_WORDS, ShiftLanguage
from .shifts.sft import FullShift
from .shifts.coded import CodedShift
from .thermo.gibbs import _extremes_by_enumeration, cylinder_extremes
from .thermo.measures import Bernoulli, MeasureModel
from .thermo.potential import BoundaryCache, Potential, birkhoff_sum_range
from .thermo.pressure import entropy as entropy_estimate
from .thermo.pressure import spectral_pressure
from .words import Alphabet


# ---------------------------------------------------------------------------
# empirical statistics


@dataclass(frozen=True)
class EmpiricalStats:
    """Block frequencies of a word: counts / (n - k + 1) over its length-k windows."""

    word: str
    depth: int
    counts: Mapping[str, int]

    @property
    def n(self) -> int:
        return len(self.word)

    def freq(self, u: str) -> Fraction:
        return Fraction(self.counts.get(u, 0), self.n - self.depth + 1)

    @property
    def frequencies(self) -> dict[str, Fraction]:
        return {u: self.freq(u) for u in sorted(self.counts)}

    def marginal(self, k: int) -> "EmpiricalStats":
        return empirical_stats(self.word, k)

    def integral(self, u: str) -> Fraction:
        """Integral of the indicator of [u], read off the word itself."""
        if len(u) == self.depth:
            return self.freq(u)
        return empirical_stats(self.word, len(u)).freq(u)


def empirical_stats(w: str, k: int) -> EmpiricalStats:
    if k < 1 or len(w) < k:
        raise ParameterError(f"need 1 <= k <= |w| (k = {k}, |w| = {len(w)})")
    counts = Counter(w[i:i + k] for i in range(len(w) - k + 1))
    return EmpiricalStats(w, k, dict(counts))


def indicator(alphabet: Alphabet, u: str) -> Potential:
    """The indicator of the cylinder [u] as a window-|u| potential."""
    return Potential.from_function(alphabet, len(u), lambda x: 1.0 if x == u else 0.0)


def with_cylinder_bounds(w: str, phi: Potential, lang: ShiftLanguage,
                         cache: BoundaryCache | None = None) -> tuple[float, float]:
    """inf and sup of 𝓔_{|w|}(x)(φ) = S_{|w|}φ(x)/|w| over x ∈ [w].

    The k-1 symbols after w are enumerated over admissible extensions.
    """
    if len(w) < phi.window:
        raise ParameterError("word shorter than the window of the test function")
    lo, hi = birkhoff_sum_range(w, phi, lang, cache)
    n = len(w)
    return lo / n, hi / n


# ---------------------------------------------------------------------------
# the weak* pseudo-metric


def cylinder_family(alphabet: Alphabet, k_max: int) -> list[str]:
    """Cylinder words of depth 1..k_max in (depth, lexicographic) order."""
    return [u for d in range(1, k_max + 1) for u in alphabet.words(d)]


def _integrals(obj, family: Sequence[str]) -> list[float]:
    if isinstance(obj, EmpiricalStats):
        return [float(obj.integral(u)) if len(u) <= obj.n else 0.0 for u in family]
    if isinstance(obj, MeasureModel):
        return [obj.cylinder(u) for u in family]
    if isinstance(obj, Mapping):
        return [float(obj.get(u, 0.0)) for u in family]
    raise ParameterError(f"cannot integrate against {type(obj).__name__}")


def _alphabet_of(obj):
    if isinstance(obj, MeasureModel):
        return obj.alphabet
    return None


def weakstar_distance(a, b, k_max: int, alphabet: Alphabet | None = None) -> tuple[float, float]:
    """Σ_i |∫φ_i da - ∫φ_i db| / 2^{i+1} over the cylinder family, plus the tail bound 2^{-N}.

    Indicators have sup norm 1 and both sides are probability vectors, so the
    omitted terms contribute at most 2^{-N} with N the family size.
    """
    alph_a, alph_b = _alphabet_of(a), _alphabet_of(b)
    if alph_a is not None and alph_b is not None and alph_a != alph_b:
        raise AlphabetMismatchError("measures over different alphabets")
    alphabet = alphabet or alph_a or alph_b
    if alphabet is None:
        raise ParameterError("an alphabet is needed to build the cylinder family")
    fam = cylinder_family(alphabet, k_max)
    ia, ib = _integrals(a, fam), _integrals(b, fam)
    val = math.fsum(abs(x - y) / 2.0 ** (i + 1) for i, (x, y) in enumerate(zip(ia, ib)))
    return val, 2.0 ** (-len(fam))


def generic_words(nu: MeasureModel, zeta: float, n: int, k_max: int,
                  lang: ShiftLanguage | None = None, certified: bool = True,
                  max_words: int = MAX_WORDS) -> list[str]:
    """Words w ∈ L_n with D(𝓔_n(x), ν) < ζ for all x ∈ [w].

    ``certified=True`` bounds the supremum over the cylinder term by term and
    adds the series tail, which gives a subset of the true set.  With
    ``certified=False`` the truncated distance is evaluated on the word's own
    block frequencies.
    """
    lang = lang or nu.language
    if lang.alphabet != nu.alphabet:
        raise AlphabetMismatchError("measure and language use different alphabets")
    fam = cylinder_family(lang.alphabet, k_max)
    target = [nu.cylinder(u) for u in fam]
    weights = [2.0 ** -(i + 1) for i in range(len(fam))]
    tail = 2.0 ** (-len(fam))
    out = []
    if certified:
        if tail >= zeta:
            return out
        tests = [indicator(lang.alphabet, u) for u in fam]
        caches = [BoundaryCache(lang, t) for t in tests]
        for w in lang.words(n, max_words):
            total = []
            for t, c, m, wt in zip(tests, caches, target, weights):
                lo, hi = with_cylinder_bounds(w, t, lang, c)
                total.append(wt * max(hi - m, m - lo))
            if math.fsum(total) + tail < zeta:
                out.append(w)
        return out
    for w in lang.words(n, max_words):
        stats = {d: empirical_stats(w, d) for d in range(1, min(k_max, n) + 1)}
        vals = [float(stats[len(u)].freq(u)) if len(u) <= n else 0.0 for u in fam]
        if math.fsum(wt * abs(v - m) for wt, v, m in zip(weights, vals, target)) < zeta:
            out.append(w)
    return out


# ---------------------------------------------------------------------------
# neighbourhoods


RELATIONS = (">=", "<=", ">", "<", "between")


@dataclass
class Constraint:
    phi: Potential
    relation: str
    threshold: float | tuple[float, float]

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ParameterError(f"unknown relation {self.relation!r}")
        if self.relation == "between":
            a, b = self.threshold
            if not a < b:
                raise ParameterError("open interval needs a < b")

    def holds(self, value) -> bool:
        r, t = self.relation, self.threshold
        if r == ">=":
            return value >= t
        if r == "<=":
            return value <= t
        if r == ">":
            return value > t
        if r == "<":
            return value < t
        return t[0] < value < t[1]

    def all_hold(self, lo, hi) -> bool:
        """Every value in [lo, hi] satisfies the constraint."""
        return self.holds(lo) and self.holds(hi)

    def some_hold(self, lo, hi) -> bool:
        r, t = self.relation, self.threshold
        if r in (">=", ">"):
            return self.holds(hi)
        if r in ("<=", "<"):
            return self.holds(lo)
        return hi > t[0] and lo < t[1] and not (lo == hi and not self.holds(lo))


@dataclass
class NeighborhoodSpec:
    constraints: list[Constraint] = field(default_factory=list)
    k_max: int = 4

    def __post_init__(self):
        for c in self.constraints:
            if c.phi.window > self.k_max:
                raise ParameterError(f"test function window {c.phi.window} exceeds k_max")

    @property
    def window(self) -> int:
        return max((c.phi.window for c in self.constraints), default=1)

    def contains_measure(self, mu: MeasureModel) -> bool:
        return all(c.holds(mu.integral(c.phi)) for c in self.constraints)


# ---------------------------------------------------------------------------
# decay rates


@dataclass
class DecayBracket:
    n: int
    lower: Fraction | float
    upper: Fraction | float
    exact: bool
    method: str

    @staticmethod
    def _rate(p, n):
        if p == 0:
            return -math.inf
        if isinstance(p, Fraction):
            return (math.log(p.numerator) - math.log(p.denominator)) / n
        return math.log(p) / n

    @property
    def lower_rate(self) -> float:
        return self._rate(self.lower, self.n)

    @property
    def upper_rate(self) -> float:
        return self._rate(self.upper, self.n)

    def to_json(self) -> dict:
        return {"n": self.n, "lower": float(self.lower), "upper": float(self.upper),
                "lower_rate": self.lower_rate, "upper_rate": self.upper_rate,
                "exact": self.exact, "method": self.method}


def _compositions(n: int, p: int):
    if p == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, p - 1):
            yield (first,) + rest


def _type_class_decay(m: Bernoulli, U: NeighborhoodSpec, n: int) -> DecayBracket:
    chars = m.alphabet.chars
    p = len(chars)
    exact = m.exact
    total = Fraction(0) if exact else []
    fact = [1] * (n + 1)
    for i in range(1, n + 1):
        fact[i] = fact[i - 1] * i
    weights = [m.weight(c) for c in chars]
    for comp in _compositions(n, p):
        if any(c and not weights[i] for i, c in enumerate(comp)):
            continue
        ok = True
        for con in U.constraints:
            val = Fraction(0)
            for i, c in enumerate(comp):
                if c:
                    val += c * Fraction(con.phi(chars[i]))
            if not con.holds(val / n):
                ok = False
                break
        if not ok:
            continue
        mult = fact[n]
        for c in comp:
            mult //= fact[c]
        if exact:
            prob = Fraction(mult)
            for i, c in enumerate(comp):
                prob *= Fraction(weights[i]) ** c
            total += prob
        else:
            total.append(math.log(mult) + math.fsum(c * math.log(float(weights[i]))
                                                    for i, c in enumerate(comp) if c))
    if not exact:
        from .thermo.pressure import log_sum_exp
        lse = log_sum_exp(total)
        total = math.exp(lse) if lse > -math.inf else 0.0
    return DecayBracket(n, total, total, exact, "type classes")


def _fast_path(m, U, lang) -> bool:
    return (isinstance(m, Bernoulli) and isinstance(lang, FullShift) and
            all(c.phi.window == 1 for c in U.constraints))


def ldp_decay_exact(m: MeasureModel, U: NeighborhoodSpec, n: int,
                    lang: ShiftLanguage | None = None, threads: int = 1,
                    max_words: int = MAX_WORDS) -> DecayBracket:
    """Bracket on m({x : 𝓔_n(x) ∈ U}).

    The lower end sums m[w] over words whose whole cylinder satisfies U, the
    upper end over words whose cylinder meets U.  Bernoulli measures on the
    full shift with window-1 constraints are summed by type classes.
    """
    lang = lang or m.language
    if lang.alphabet != m.alphabet:
        raise AlphabetMismatchError("measure and language use different alphabets")
    if n < U.window:
        raise ParameterError("n is shorter than the constraint windows")
    if _fast_path(m, U, lang):
        return _type_class_decay(m, U, n)
    if lang.count(n) > max_words:
        raise ResourceLimitError(f"#L_{n} exceeds {max_words}; use ldp_decay_sampled")
    caches = [BoundaryCache(lang, c.phi) for c in U.constraints]
    words = lang.words(n, max_words)

    def chunk(ws):
        lo_terms, hi_terms = [], []
        for w in ws:
            inside = meets = True
            for c, cache in zip(U.constraints, caches):
                lo, hi = with_cylinder_bounds(w, c.phi, lang, cache)
                if not c.all_hold(lo, hi):
                    inside = False
                if not c.some_hold(lo, hi):
                    meets = False
                    break
            if not meets:
                continue
            wt = m.cylinder_exact(w) if m.exact else m.cylinder(w)
            hi_terms.append(wt)
            if inside:
                lo_terms.append(wt)
        return lo_terms, hi_terms

    size = max(1, -(-len(words) // max(1, threads)))
    parts = [words[i:i + size] for i in range(0, len(words), size)] or [[]]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(chunk, parts))
    else:
        results = [chunk(part) for part in parts]
    lo_terms = [t for r in results for t in r[0]]
    hi_terms = [t for r in results for t in r[1]]
    if m.exact:
        return DecayBracket(n, sum(lo_terms, Fraction(0)), sum(hi_terms, Fraction(0)), True,
                            "enumeration")
    return DecayBracket(n, math.fsum(lo_terms), math.fsum(hi_terms), False, "enumeration")


@dataclass
class SampledDecay:
    n: int
    hits: int
    samples: int
    estimate: float
    ci_low: float
    ci_high: float
    seed: int

    def to_json(self) -> dict:
        return {"n": self.n, "hits": self.hits, "samples": self.samples,
                "estimate": self.estimate, "ci_low": self.ci_low, "ci_high": self.ci_high,
                "seed": self.seed}


SAMPLE_STREAMS = 16


def _phi_array(phi: Potential, alphabet: Alphabet) -> np.ndarray:
    p = alphabet.size
    arr = np.full(p ** phi.window, np.nan)
    for i, u in enumerate(alphabet.words(phi.window)):
        if u in phi.table:
            arr[i] = phi.table[u]
    return arr


def ldp_decay_sampled(m: MeasureModel, U: NeighborhoodSpec, n: int, sample_count: int,
                      seed: int, threads: int = 1, confidence: float = 0.95) -> SampledDecay:
    """Monte Carlo estimate of m({x : 𝓔_n(x) ∈ U}) with a Wilson interval.

    Samples are split across a fixed number of independent streams spawned
    from ``seed``; the stream assignment does not depend on ``threads``.
    """
    if not m.samplable:
        raise ParameterError(f"{m.kind} measures cannot be sampled")
    if sample_count < 1:
        raise ParameterError("need at least one sample")
    extra = U.window - 1
    length = n + extra
    p = m.alphabet.size
    tables = [(_phi_array(c.phi, m.alphabet), c) for c in U.constraints]
    streams = np.random.SeedSequence(seed).spawn(SAMPLE_STREAMS)
    base, rem = divmod(sample_count, SAMPLE_STREAMS)
    sizes = [base + (1 if i < rem else 0) for i in range(SAMPLE_STREAMS)]

    def run(i):
        if sizes[i] == 0:
            return 0
        rng = np.random.default_rng(streams[i])
        x = m.sample(sizes[i], length, rng)
        ok = np.ones(sizes[i], dtype=bool)
        for arr, con in tables:
            k = con.phi.window
            codes = np.zeros((sizes[i], n), dtype=np.int64)
            for j in range(k):
                codes = codes * p + x[:, j:j + n]
            vals = arr[codes]
            if np.isnan(vals).any():
                raise ParameterError("sampled window outside the potential's table")
            # fixed-order summation keeps results independent of threading
            avg = vals.sum(axis=1) / n
            ok &= np.array([con.holds(float(v)) for v in avg])
        return int(ok.sum())

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            hits = sum(ex.map(run, range(SAMPLE_STREAMS)))
    else:
        hits = sum(run(i) for i in range(SAMPLE_STREAMS))
    ci = binomtest(hits, sample_count).proportion_ci(confidence, method="wilson")
    return SampledDecay(n, hits, sample_count, hits / sample_count, float(ci.low),
                        float(ci.high), seed)


# ---------------------------------------------------------------------------
# rate function


def rate_function(mu: MeasureModel, phi: Potential, P_value: float) -> float:
    """q^φ(μ) = h(μ) + ∫φ dμ - P(φ) for invariant μ, -inf otherwise."""
    if not mu.is_invariant:
        return -math.inf
    h = mu.entropy()
    if h is None:
        raise ParameterError("entropy unavailable for this measure")
    return h + mu.integral(phi) - P_value


def _simplex_grid(p: int, resolution: int):
    for comp in _compositions(resolution, p):
        yield [Fraction(c, resolution) for c in comp]


@dataclass
class RateSweep:
    family: str
    resolution: int
    best: float
    argmax: list[str] | None
    points: int

    def to_json(self) -> dict:
        return {"family": self.family, "resolution": self.resolution, "value": self.best,
                "argmax": self.argmax, "points": self.points, "is_lower_bound": True}


def rate_sweep(alphabet: Alphabet, U: NeighborhoodSpec, phi: Potential, P_value: float,
               resolution: int = 400) -> RateSweep:
    """sup of q^φ over the Bernoulli measures on a rational grid that lie in U.

    A lower bound for sup over all invariant measures in U.
    """
    best, arg, count = -math.inf, None, 0
    for weights in _simplex_grid(alphabet.size, resolution):
        mu = Bernoulli(alphabet, weights)
        count += 1
        if not U.contains_measure(mu):
            continue
        q = rate_function(mu, phi, P_value)
        if q > best:
            best, arg = q, [str(w) for w in weights]
    return RateSweep("bernoulli", resolution, best, arg, count)


# ---------------------------------------------------------------------------
# upper-bound condition


def upper_bound_condition(m: MeasureModel, phi: Potential, n_range: Iterable[int],
                          P_value: float, K_prime: float, lang: ShiftLanguage | None = None,
                          tol: float = 1e-9) -> dict:
    """Per-n max over L_n of (1/n) log m[w] + (1/n) sup_{[w]} S_n ψ with ψ = P - φ,
    compared with (log K')/n."""
    lang = lang or m.language
    ns = [n for n in n_range if n >= 1]
    if m.local:
        ext = cylinder_extremes(m, phi, lang, None, ns)
    else:
        ext = _extremes_by_enumeration(m, phi, lang, lang.words, ns)
    rows = []
    ok = True
    for n in ns:
        best = ext[n][0] / n + P_value
        bound = math.log(K_prime) / n
        passed = best <= bound + tol
        ok &= passed
        rows.append({"n": n, "max": best, "bound": bound, "argmax": ext[n][1], "pass": passed})
    return {"K_prime": K_prime, "rows": rows, "pass": ok}


# ---------------------------------------------------------------------------
# horseshoes


@dataclass
class HorseshoeLevel:
    n: int
    tau: int
    generators: tuple[str, ...]
    language: ShiftLanguage
    decomposition: Decomposition

    @property
    def transition_time(self) -> int:
        return 3 * self.tau + 2 * self.n

    @property
    def extension_bound(self) -> int:
        return self.n + self.tau

    def contains(self, w: str) -> bool:
        return self.language.contains(w)

    def check_extendability(self, m_max: int) -> dict:
        """Every w ∈ L(X_n) with |w| <= m_max has u, v of length <= n + τ with uwv ∈ G."""
        dec = self.decomposition
        worst = 0
        checked = 0
        for m in range(1, m_max + 1):
            for w in self.language.words(m):
                checked += 1
                found = _extend_to_core(dec.language, dec.core, w, self.extension_bound)
                if found is None:
                    return {"holds": False, "checked": checked, "counterexample": w}
                worst = max(worst, len(found[0]), len(found[1]))
        return {"holds": True, "checked": checked, "max_extension": worst,
                "bound": self.extension_bound}

    def check_specification(self, m_max: int = 3, n_max: int = 4):
        coll = Collection(f"L(X_{self.n})", self.language, lambda w: True)
        return check_specification(coll, "W", self.transition_time, m_max, n_max)


def horseshoe_build(decomposition: Decomposition, n: int, length_budget: int = 64) -> HorseshoeLevel:
    """The level-n horseshoe X_n: subwords of gluings of G-words of length <= n.

    With (0)-specification gluing is concatenation, so L(X_n) is the language
    of the coded system generated by G_{<=n}.
    """
    if decomposition.kind != "0" or decomposition.tau != 0:
        raise SpecificationError("horseshoe levels are built for (0)-specification cores")
    gens = decomposition.core.words_upto(n, 1)
    if not gens:
        raise ParameterError(f"no core words of length <= {n}")
    if len(gens) > length_budget * 1000:
        raise ResourceLimitError("too many generators")
    lang = CodedShift(decomposition.language.alphabet, gens)
    return HorseshoeLevel(n, decomposition.tau, tuple(gens), lang, decomposition)


def horseshoe_entropy_trend(decomposition: Decomposition, n_levels: Sequence[int],
                            m_range: Sequence[int], h_X: float | None = None) -> dict:
    """Entropy of each level: finite-m estimates and the Perron value of the level automaton."""
    rows = []
    for n in n_levels:
        level = horseshoe_build(decomposition, n)
        est = entropy_estimate(level.language, m_range, exact=False)
        exact = spectral_pressure(level.language, Potential.constant(level.language.alphabet))
        rows.append({"n": n, "generators": len(level.generators),
                     "finite_m": dict(zip(est.ns, est.values)), "h_exact": exact})
    exacts = [r["h_exact"] for r in rows]
    nondecr = all(a is not None and b is not None and a <= b + 1e-12
                  for a, b in zip(exacts, exacts[1:]))
    matched = all(r1["finite_m"][m] <= r2["finite_m"][m] + 1e-12
                  for r1, r2 in zip(rows, rows[1:]) for m in r1["finite_m"])
    out = {"levels": rows, "nondecreasing": nondecr and matched}
    if h_X is not None:
        gaps = [h_X - e for e in exacts]
        out["h_X"] = h_X
        out["gaps"] = gaps
        out["gap_shrinking"] = all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
    return out
