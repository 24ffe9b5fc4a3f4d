"""Full shifts and shifts of finite type given by forbidden words."""
from __future__ import annotations

from functools import lru_cache

from ..errors import ParameterError
from ..words import Alphabet
from .base import ShiftLanguage


class FullShift(ShiftLanguage):
    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet

    @property
    def descriptor(self):
        return {"kind": "full", "alphabet": list(self.alphabet.symbols)}

    def start(self):
        return 0

    def step(self, state, ch):
        return 0

    def count(self, n):
        return self.alphabet.size ** n


class SFT(ShiftLanguage):
    """One-sided shift avoiding a finite list of forbidden words.

    A state is the last ``K - 1`` symbols read (``K`` the longest forbidden
    word); states without an infinite admissible future are pruned, so the
    automaton accepts exactly the language of the shift space.
    """

    def __init__(self, alphabet: Alphabet, forbidden):
        self.alphabet = alphabet
        self.forbidden = tuple(sorted({alphabet.check(f) for f in forbidden}))
        if any(len(f) == 0 for f in self.forbidden):
            raise ParameterError("the empty word cannot be forbidden")
        self.memory = max((len(f) for f in self.forbidden), default=1) - 1
        self._forbidden_set = frozenset(self.forbidden)
        self._live_core = self._compute_live_core()
        self._live = lru_cache(maxsize=None)(self._live_uncached)
        if not self._live(""):
            raise ParameterError("the forbidden list leaves an empty shift space")

    @property
    def descriptor(self):
        return {
            "kind": "sft",
            "alphabet": list(self.alphabet.symbols),
            "forbidden": [self.alphabet.serialize(f) for f in self.forbidden],
        }

    def _bad_suffix(self, s: str) -> bool:
        return any(s.endswith(f) for f in self.forbidden)

    def _compute_live_core(self) -> frozenset:
        k = self.memory
        contexts = {w for w in self.alphabet.words(k) if not self._contains_forbidden(w)}
        # greatest fixed point: keep contexts that have a successor context
        changed = True
        while changed:
            changed = False
            for c in list(contexts):
                if not any(
                    not self._bad_suffix(c + a) and (c + a)[1:] in contexts
                    for a in self.alphabet.chars
                ):
                    contexts.discard(c)
                    changed = True
        return frozenset(contexts)

    def _contains_forbidden(self, w: str) -> bool:
        return any(f in w for f in self.forbidden)

    def _live_uncached(self, s: str) -> bool:
        if len(s) >= self.memory:
            return s[len(s) - self.memory:] in self._live_core
        return any(
            not self._bad_suffix(s + a) and self._live(s + a) for a in self.alphabet.chars
        )

    def start(self):
        return ""

    def step(self, state, ch):
        s = state + ch
        if self._bad_suffix(s):
            return None
        if len(s) > self.memory:
            s = s[len(s) - self.memory:]
        return s if self._live(s) else None
