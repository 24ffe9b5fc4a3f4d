"""Locally constant potentials and exact Birkhoff-sum ranges over cylinders."""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Mapping

from ..errors import ParameterError
from ..shifts.base import ShiftLanguage
from ..words import Alphabet


class Potential:
    """φ(x) = table[x_1 ⋯ x_k] for a window of length ``k``.

    The table only has to cover the windows that occur in the language the
    potential is used with; :meth:`validate` checks that.
    """

    def __init__(self, alphabet: Alphabet, window: int, table: Mapping[str, float]):
        if window < 1:
            raise ParameterError("window must be positive")
        self.alphabet = alphabet
        self.window = window
        self.table = {}
        for key, val in table.items():
            alphabet.check(key)
            if len(key) != window:
                raise ParameterError(f"window word {key!r} does not have length {window}")
            v = float(val)
            if not math.isfinite(v):
                raise ParameterError(f"potential value on {key!r} is not finite")
            self.table[key] = v
        if not self.table:
            raise ParameterError("empty potential table")

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, alphabet: Alphabet, c: float = 0.0) -> "Potential":
        return cls(alphabet, 1, {a: c for a in alphabet.chars})

    @classmethod
    def symbols(cls, alphabet: Alphabet, values: Mapping[str, float]) -> "Potential":
        """Window-1 potential φ(x) = values[x_1]."""
        return cls(alphabet, 1, dict(values))

    @classmethod
    def from_function(cls, alphabet: Alphabet, window: int,
                      fn: Callable[[str], float]) -> "Potential":
        return cls(alphabet, window, {w: fn(w) for w in alphabet.words(window)})

    # -- values -------------------------------------------------------------

    def __call__(self, window_word: str) -> float:
        try:
            return self.table[window_word]
        except KeyError:
            raise ParameterError(f"potential undefined on window {window_word!r}") from None

    @property
    def norm(self) -> float:
        return max(abs(v) for v in self.table.values())

    @property
    def sup(self) -> float:
        return max(self.table.values())

    @property
    def inf(self) -> float:
        return min(self.table.values())

    @property
    def oscillation(self) -> float:
        return self.sup - self.inf

    @property
    def is_constant(self) -> bool:
        return self.oscillation == 0

    def validate(self, lang: ShiftLanguage) -> None:
        missing = [w for w in lang.words(self.window) if w not in self.table]
        if missing:
            raise ParameterError(f"potential table misses language windows {missing[:5]}")

    def birkhoff(self, x: str, n: int) -> float:
        """S_n φ(x) for a point known through its first n + k - 1 symbols."""
        k = self.window
        if len(x) < n + k - 1:
            raise ParameterError("point prefix too short for the Birkhoff sum")
        return math.fsum(self(x[t:t + k]) for t in range(n))

    def to_config(self) -> dict:
        return {"window": self.window,
                "table": {self.alphabet.serialize(k): v for k, v in sorted(self.table.items())}}

    @classmethod
    def from_config(cls, alphabet: Alphabet, cfg: dict) -> "Potential":
        if "constant" in cfg:
            return cls.constant(alphabet, float(cfg["constant"]))
        table = {alphabet.parse(k): v for k, v in cfg["table"].items()}
        return cls(alphabet, int(cfg.get("window", 1)), table)


class BoundaryCache:
    """Extremes of the end-effect terms, keyed by (automaton state, tail).

    For a word w of length n the sum S_n φ over [w] splits into the windows
    lying inside w and ``min(n, k-1)`` boundary windows that reach into the
    unseen extension; the latter depend only on the automaton state reached
    by w and the last ``min(n, k-1)`` symbols.
    """

    def __init__(self, lang: ShiftLanguage, phi: Potential):
        self.lang = lang
        self.phi = phi
        self._get = lru_cache(maxsize=None)(self._compute)

    def _compute(self, state, tail: str) -> tuple[float, float]:
        k = self.phi.window
        if k == 1 or not tail:
            return 0.0, 0.0
        lo, hi = math.inf, -math.inf
        for e in self.lang.continuations(state, k - 1):
            s = tail + e
            val = math.fsum(self.phi(s[i:i + k]) for i in range(len(tail)))
            lo, hi = min(lo, val), max(hi, val)
        if lo == math.inf:
            raise ParameterError("language state without admissible extension")
        return lo, hi

    def __call__(self, state, tail: str) -> tuple[float, float]:
        return self._get(state, tail)


def interior_sum(w: str, phi: Potential) -> float:
    """Σ of φ over the windows lying entirely inside ``w``."""
    k = phi.window
    return math.fsum(phi(w[t:t + k]) for t in range(len(w) - k + 1))


def birkhoff_sum_range(w: str, phi: Potential, lang: ShiftLanguage,
                       cache: BoundaryCache | None = None) -> tuple[float, float]:
    """(inf, sup) of S_{|w|} φ over the cylinder [w]."""
    if len(w) < 1:
        raise ParameterError("need |w| >= 1")
    state = lang.run(w)
    if state is None:
        raise ParameterError(f"{w!r} is not in the language")
    cache = cache or BoundaryCache(lang, phi)
    tail = w[len(w) - min(len(w), phi.window - 1):] if phi.window > 1 else ""
    lo, hi = cache(state, tail)
    base = interior_sum(w, phi)
    return base + lo, base + hi
