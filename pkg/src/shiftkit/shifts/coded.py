"""Coded systems generated by a finite list of generator words."""
from __future__ import annotations

from typing import Iterable

from ..errors import ParameterError
from ..words import Alphabet
from .base import ShiftLanguage

_BOUNDARY = ("#",)


class CodedShift(ShiftLanguage):
    """Closure of the free concatenations of ``generators``.

    The language automaton tracks the set of positions ``(g, offset)`` inside
    generators that are consistent with the word read so far; a factor may
    start anywhere inside a generator.
    """

    def __init__(self, alphabet: Alphabet, generators: Iterable[str]):
        self.alphabet = alphabet
        gens = sorted({alphabet.check(g) for g in generators})
        if not gens or any(g == "" for g in gens):
            raise ParameterError("coded systems need a nonempty list of nonempty generators")
        self.generators = tuple(gens)
        self._starts = frozenset((i, 0) for i in range(len(gens)))
        self._anywhere = frozenset(
            (i, o) for i, g in enumerate(gens) for o in range(len(g))
        )

    @property
    def descriptor(self):
        return {
            "kind": "coded",
            "alphabet": list(self.alphabet.symbols),
            "generators": [self.alphabet.serialize(g) for g in self.generators],
        }

    def _advance(self, positions, ch):
        out = set()
        completed = False
        for i, o in positions:
            g = self.generators[i]
            if g[o] == ch:
                if o + 1 == len(g):
                    completed = True
                else:
                    out.add((i, o + 1))
        if completed:
            out |= self._starts
        return out, completed

    def start(self):
        return self._anywhere

    def step(self, state, ch):
        out, _ = self._advance(state, ch)
        return frozenset(out) if out else None

    # -- the collection of finite concatenations --------------------------------

    def concat_start(self):
        return self._starts | {_BOUNDARY}

    def concat_step(self, state, ch):
        out, completed = self._advance(state - {_BOUNDARY}, ch)
        if completed:
            out.add(_BOUNDARY)
        return frozenset(out) if out else None

    def is_concatenation(self, word: str) -> bool:
        """True iff ``word`` is a (possibly empty) concatenation of generators."""
        state = self.concat_start()
        for ch in word:
            state = self.concat_step(state, ch)
            if state is None:
                return False
        return _BOUNDARY in state
