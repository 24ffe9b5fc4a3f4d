"""Decompositions L = Cp G Cs, the filtration G^M, specification checkers and gluing."""
from __future__ import annotations

import itertools
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import ParameterError, ResourceLimitError, SpecificationError
from .shifts.base import MAX_WORDS, ShiftLanguage
from .shifts.beta import BetaShift
from .shifts.coded import CodedShift
from .shifts.sft import FullShift
from .shifts.sgap import SGapShift
from .words import Alphabet

SPEC_KINDS = ("W", "S", "gcW", "0")

#: Default cap on tuples examined by a specification check.
MAX_TUPLES = 500_000


@dataclass
class WordAutomaton:
    """Prefix automaton for a collection: ``step`` returns None on dead prefixes."""

    start: Callable[[], object]
    step: Callable[[object, str], object]
    accepting: Callable[[object], bool]

    def accepts(self, word: str) -> bool:
        state = self.start()
        for ch in word:
            state = self.step(state, ch)
            if state is None:
                return False
        return self.accepting(state)


class Collection:
    """A (possibly infinite) set of words inside a shift language.

    Membership is a predicate; ``words(n)`` enumerates the length-n members
    by filtering the ambient language, or by a pruned search when an automaton
    is supplied.
    """

    def __init__(self, name: str, language: ShiftLanguage,
                 predicate: Callable[[str], bool] | None = None,
                 automaton: WordAutomaton | None = None,
                 finite: Iterable[str] | None = None):
        if predicate is None and automaton is None and finite is None:
            raise ParameterError("a collection needs a predicate, automaton or word list")
        self.name = name
        self.language = language
        self.automaton = automaton
        self._finite = None if finite is None else frozenset(finite)
        if predicate is None:
            predicate = automaton.accepts if automaton is not None else self._finite.__contains__
        self._predicate = predicate
        self._cache: dict[int, list[str]] = {}
        self._lock = threading.Lock()

    @property
    def alphabet(self) -> Alphabet:
        return self.language.alphabet

    def contains(self, word: str) -> bool:
        return self._predicate(word)

    __contains__ = contains

    def words(self, n: int, max_words: int = MAX_WORDS) -> list[str]:
        """Sorted members of length ``n`` (members outside the language are ignored)."""
        with self._lock:
            if n in self._cache:
                return self._cache[n]
        if self._finite is not None:
            out = sorted(w for w in self._finite if len(w) == n and self.language.contains(w))
        elif self.automaton is not None:
            out = []
            self._search(n, "", self.language.start(), self.automaton.start(), out, max_words)
        else:
            out = [w for w in self.language.words(n, max_words) if self._predicate(w)]
        with self._lock:
            self._cache[n] = out
        return out

    def _search(self, n, prefix, ls, cs, out, max_words):
        if len(prefix) == n:
            if self.automaton.accepting(cs):
                if len(out) >= max_words:
                    raise ResourceLimitError(f"collection {self.name} exceeds {max_words} words")
                out.append(prefix)
            return
        for ch, l2 in self.language.successors(ls):
            c2 = self.automaton.step(cs, ch)
            if c2 is not None:
                self._search(n, prefix + ch, l2, c2, out, max_words)

    def words_upto(self, n_max: int, min_len: int = 1) -> list[str]:
        return [w for n in range(min_len, n_max + 1) for w in self.words(n)]

    def __repr__(self):
        return f"Collection({self.name!r})"


class Decomposition:
    """The triple (Cp, G, Cs) with gap size τ and the specification kind enjoyed by G."""

    def __init__(self, language: ShiftLanguage, prefix: Collection, core: Collection,
                 suffix: Collection, tau: int = 0, kind: str = "0", name: str = ""):
        if kind not in SPEC_KINDS:
            raise ParameterError(f"unknown specification kind {kind!r}")
        if kind == "0" and tau != 0:
            raise ParameterError("(0)-specification requires gap size 0")
        self.language = language
        self.prefix, self.core, self.suffix = prefix, core, suffix
        self.tau = tau
        self.kind = kind
        self.name = name or type(language).__name__
        self.table = GluingTable(language, kind, tau, core)

    def splits(self, word: str) -> Iterable[tuple[str, str, str]]:
        """Every split ``word = u v x`` with u ∈ Cp, v ∈ G, x ∈ Cs."""
        n = len(word)
        for i in range(n + 1):
            u = word[:i]
            if not self.prefix.contains(u):
                continue
            auto = self.core.automaton
            if auto is not None:
                state = auto.start()
                for j in range(i, n + 1):
                    if j > i:
                        state = auto.step(state, word[j - 1])
                        if state is None:
                            break
                    if auto.accepting(state) and self.suffix.contains(word[j:]):
                        yield u, word[i:j], word[j:]
            else:
                for j in range(i, n + 1):
                    if self.core.contains(word[i:j]) and self.suffix.contains(word[j:]):
                        yield u, word[i:j], word[j:]

    def split(self, word: str) -> tuple[str, str, str] | None:
        """The split minimising max(|u|, |x|), ties to the shortest u."""
        best = None
        for u, v, x in self.splits(word):
            key = (max(len(u), len(x)), len(u))
            if best is None or key < best[0]:
                best = (key, (u, v, x))
        return None if best is None else best[1]

    def level(self, word: str) -> int | None:
        """Smallest M with ``word`` in G^M, or None if no split exists."""
        s = self.split(word)
        return None if s is None else max(len(s[0]), len(s[2]))

    def GM(self, M: int) -> "GMCollection":
        return GMCollection(self, M)

    def check_complete(self, n_max: int) -> dict:
        """Exhaustive split check of L_n for n <= n_max."""
        for n in range(n_max + 1):
            for w in self.language.words(n):
                if self.split(w) is None:
                    return {"complete": False, "n_max": n_max, "counterexample": w}
        return {"complete": True, "n_max": n_max}


class GMCollection(Collection):
    """G^M = {u v x ∈ L : u ∈ Cp, v ∈ G, x ∈ Cs, |u| <= M, |x| <= M}."""

    def __init__(self, decomposition: Decomposition, M: int):
        if M < 0:
            raise ParameterError("M must be nonnegative")
        self.decomposition = decomposition
        self.M = M

        def pred(w):
            if not decomposition.language.contains(w):
                return False
            lvl = decomposition.level(w)
            return lvl is not None and lvl <= M

        super().__init__(f"G^{M}", decomposition.language, predicate=pred)


# ---------------------------------------------------------------------------
# gluing


class GluingTable:
    """Connecting words chosen per tuple, shortest first then lexicographic.

    Entries are computed on demand and appended under a lock; a tuple always
    receives the same connectors.
    """

    def __init__(self, language: ShiftLanguage, kind: str = "W", tau: int = 0,
                 collection: Collection | None = None):
        if kind not in SPEC_KINDS:
            raise ParameterError(f"unknown specification kind {kind!r}")
        if kind == "0" and tau != 0:
            raise ParameterError("(0)-specification requires gap size 0")
        if kind == "gcW" and collection is None:
            raise ParameterError("(gcW) gluing needs the collection")
        self.language = language
        self.kind = kind
        self.tau = tau
        self.collection = collection
        self._entries: dict[tuple[str, ...], tuple[str, ...]] = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._entries)

    def entries(self) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
        with self._lock:
            return sorted(self._entries.items())

    def _lengths(self):
        if self.kind == "0":
            return (0,)
        if self.kind == "S":
            return (self.tau,)
        return range(self.tau + 1)

    def _options(self, state):
        for k in self._lengths():
            yield from self.language.continuations(state, k)

    def _sub_gluings_ok(self, words, conns) -> bool:
        m = len(words)
        for i in range(m):
            piece = words[i]
            for j in range(i + 1, m):
                piece += conns[j - 1] + words[j]
                if not self.collection.contains(piece):
                    return False
        return True

    def _search(self, words: tuple[str, ...]) -> tuple[str, ...] | None:
        state = self.language.run(words[0])
        if state is None:
            return None

        def rec(i, state, conns):
            if i == len(words):
                if self.kind == "gcW" and not self._sub_gluings_ok(words, conns):
                    return None
                return conns
            for v in self._options(state):
                s2 = self.language.run(v + words[i], state)
                if s2 is not None:
                    found = rec(i + 1, s2, conns + (v,))
                    if found is not None:
                        return found
            return None

        return rec(1, state, ())

    def connectors(self, words: Sequence[str]) -> tuple[str, ...]:
        key = tuple(words)
        if not key:
            raise ParameterError("cannot glue an empty tuple")
        with self._lock:
            hit = self._entries.get(key)
        if hit is not None:
            return hit
        found = self._search(key)
        if found is None:
            raise SpecificationError(
                f"no admissible connectors of length <= {self.tau} ({self.kind}) for {key!r}"
            )
        with self._lock:
            self._entries.setdefault(key, found)
            return self._entries[key]

    def try_connectors(self, words: Sequence[str]) -> tuple[str, ...] | None:
        try:
            return self.connectors(words)
        except SpecificationError:
            return None


def glue(words: Sequence[str], table: GluingTable) -> str:
    """Φ(w¹, ..., wᵐ) = w¹ v¹ w² ⋯ v^{m-1} wᵐ."""
    words = tuple(words)
    if len(words) == 1:
        if table.language.run(words[0]) is None:
            raise SpecificationError(f"{words[0]!r} is not in the language")
        return words[0]
    conns = table.connectors(words)
    out = [words[0]]
    for v, w in zip(conns, words[1:]):
        out.append(v)
        out.append(w)
    return "".join(out)


def truncated_glue(words: Sequence[str], table: GluingTable) -> str:
    """The first Σ|wⁱ| symbols of the gluing."""
    return glue(words, table)[: sum(len(w) for w in words)]


# ---------------------------------------------------------------------------
# reports


@dataclass
class SpecReport:
    property: str
    tau: int
    m_max: int
    n_max: int
    holds: bool
    tested: int = 0
    counterexample: list[str] | None = None
    max_multiplicity: int | None = None

    def to_json(self) -> dict:
        out = {"property": self.property, "tau": self.tau, "m_max": self.m_max,
               "n_max": self.n_max, "holds": self.holds, "tested": self.tested}
        if self.counterexample is not None:
            out["counterexample"] = list(self.counterexample)
        if self.max_multiplicity is not None:
            out["max_multiplicity"] = self.max_multiplicity
        return out


def check_specification(collection: Collection, kind: str, tau: int = 0, m_max: int = 4,
                        n_max: int = 6, table: GluingTable | None = None,
                        min_len: int = 1, max_tuples: int = MAX_TUPLES) -> SpecReport:
    """Exhaustive finite check of a specification property.

    All tuples of 2..m_max words with lengths in [min_len, n_max] are tested;
    for (0) all pairs are tested for uw ∈ G.  Connectors found are recorded
    in ``table`` (created if not given).
    """
    if kind not in SPEC_KINDS:
        raise ParameterError(f"unknown specification kind {kind!r}")
    if kind == "0" and tau != 0:
        raise ParameterError("(0)-specification requires gap size 0")
    words = collection.words_upto(n_max, min_len)
    if kind == "0":
        m_max = 2
    total = sum(len(words) ** m for m in range(2, m_max + 1))
    if total > max_tuples:
        raise ResourceLimitError(f"{total} tuples exceed the budget {max_tuples}")
    if kind == "0":
        tested = 0
        for u in words:
            for w in words:
                tested += 1
                if not collection.contains(u + w):
                    return SpecReport("0", 0, 2, n_max, False, tested, [u, w])
        if table is not None:
            for u in words:
                for w in words:
                    table.connectors((u, w))
        return SpecReport("0", 0, 2, n_max, True, tested)
    if table is None:
        table = GluingTable(collection.language, kind, tau, collection)
    elif table.kind != kind or table.tau != tau:
        raise ParameterError("gluing table kind/tau does not match the requested check")
    tested = 0
    for m in range(2, m_max + 1):
        for tup in itertools.product(words, repeat=m):
            tested += 1
            if table.try_connectors(tup) is None:
                return SpecReport(kind, tau, m_max, n_max, False, tested, list(tup))
    return SpecReport(kind, tau, m_max, n_max, True, tested)


@dataclass
class MultiplicityReport:
    lengths: tuple[int, ...]
    tau: int
    alphabet_size: int
    max_count: int
    bound: int
    tuples: int
    passed: bool
    witness: str | None = None

    def to_json(self) -> dict:
        return {"lengths": list(self.lengths), "tau": self.tau, "p": self.alphabet_size,
                "max_multiplicity": self.max_count, "bound": self.bound,
                "tuples": self.tuples, "pass": self.passed, "witness": self.witness}


def multiplicity_bound(p: int, tau: int, k: int) -> int:
    return (p ** tau * (tau + 1)) ** k


def multiplicity_check(collection: Collection, tau: int, lengths: Sequence[int],
                       table: GluingTable, max_tuples: int = MAX_TUPLES) -> MultiplicityReport:
    """Preimage counts of the truncated gluing map on ∏ D_{n_i}."""
    pools = [collection.words(n) for n in lengths]
    size = 1
    for pool in pools:
        size *= len(pool)
    if size > max_tuples:
        raise ResourceLimitError(f"{size} tuples exceed the budget {max_tuples}")
    counts: Counter = Counter()
    for tup in itertools.product(*pools):
        counts[truncated_glue(tup, table)] += 1
    p = collection.alphabet.size
    bound = multiplicity_bound(p, tau, len(lengths))
    if counts:
        witness, top = max(counts.items(), key=lambda kv: (kv[1], [-ord(c) for c in kv[0]]))
    else:
        witness, top = None, 0
    return MultiplicityReport(tuple(lengths), tau, p, top, bound, size, top <= bound, witness)


def check_GM_extendability(gm: GMCollection, n_max: int, max_ext: int | None = None) -> dict:
    """For each w ∈ G^M with |w| <= n_max find u, v with u w v ∈ G.

    Extensions are searched by increasing max(|u|, |v|) up to ``max_ext``
    (default M + 8).  Returns the observed maximal |u| and |v| and the first
    failure, if any.
    """
    dec = gm.decomposition
    core = dec.core
    lang = dec.language
    limit = gm.M + 8 if max_ext is None else max_ext
    worst_u = worst_v = 0
    checked = 0
    for n in range(n_max + 1):
        for w in gm.words(n):
            checked += 1
            found = _extend_to_core(lang, core, w, limit)
            if found is None:
                return {"M": gm.M, "n_max": n_max, "holds": False, "checked": checked,
                        "counterexample": w, "max_ext": limit}
            worst_u = max(worst_u, len(found[0]))
            worst_v = max(worst_v, len(found[1]))
    return {"M": gm.M, "n_max": n_max, "holds": True, "checked": checked,
            "max_left": worst_u, "max_right": worst_v, "max_ext": limit}


def _extend_to_core(lang: ShiftLanguage, core: Collection, w: str, limit: int):
    auto = core.automaton
    for bound in range(limit + 1):
        for lu in range(bound + 1):
            for u in _words_ending_with(lang, w, lu):
                uw = u + w
                ls = lang.run(uw)
                if ls is None:
                    continue
                for lv in range(bound + 1):
                    if max(lu, lv) != bound:
                        continue
                    for v in lang.continuations(ls, lv):
                        cand = uw + v
                        ok = auto.accepts(cand) if auto is not None else core.contains(cand)
                        if ok:
                            return u, v
    return None


def _words_ending_with(lang: ShiftLanguage, w: str, k: int):
    """Words u of length k with u w in the language (sorted)."""
    for u in lang.continuations(lang.start(), k):
        if lang.run(w, lang.run(u)) is not None:
            yield u


# ---------------------------------------------------------------------------
# built-in decompositions


def _sgap_core_automaton(params) -> WordAutomaton:
    # state (seen_one, run); a 1 is allowed only after a run in S
    cap = params.max_element

    def step(state, ch):
        seen, r = state
        if ch == "0":
            if cap is not None and r + 1 > cap:
                return None
            return (seen, r + 1)
        return (True, 0) if r in params else None

    return WordAutomaton(lambda: (False, 0), step, lambda s: s == (False, 0) or s[1] == 0 and s[0])


def builtin_decompositions(shift: ShiftLanguage) -> Decomposition:
    """The standard decomposition of a β, S-gap, coded or full shift."""
    if isinstance(shift, SGapShift):
        params = shift.params

        def cp(w):
            if w == "":
                return True
            return w.endswith("1") and w.count("1") == 1 and (len(w) - 1) not in params

        def cs(w):
            return "1" not in w

        core = Collection("G", shift, automaton=_sgap_core_automaton(params))
        return Decomposition(shift, Collection("Cp", shift, cp), core,
                             Collection("Cs", shift, cs), 0, "0", "sgap")
    if isinstance(shift, BetaShift):
        params = shift.params
        core = Collection("G", shift, automaton=WordAutomaton(
            shift.start, shift.step, lambda s: s == 1))

        def cs(w):
            return all(ord(ch) - 48 == params.quasi_digit(i) for i, ch in enumerate(w, 1))

        return Decomposition(shift, Collection("Cp", shift, lambda w: w == ""), core,
                             Collection("Cs", shift, cs), 0, "0", "beta")
    if isinstance(shift, CodedShift):
        gens = shift.generators
        core = Collection("G", shift, automaton=WordAutomaton(
            shift.concat_start, shift.concat_step, lambda s: ("#",) in s))

        def cp(w):
            return w == "" or any(g.endswith(w) for g in gens)

        def cs(w):
            return w == "" or any(w in g for g in gens)

        return Decomposition(shift, Collection("Cp", shift, cp), core,
                             Collection("Cs", shift, cs), 0, "0", "coded")
    if isinstance(shift, FullShift):
        core = Collection("G", shift, automaton=WordAutomaton(
            shift.start, shift.step, lambda s: True))
        empty = lambda w: w == ""  # noqa: E731
        return Decomposition(shift, Collection("Cp", shift, empty), core,
                             Collection("Cs", shift, empty), 0, "0", "full")
    raise ParameterError(f"no built-in decomposition for {type(shift).__name__}")
