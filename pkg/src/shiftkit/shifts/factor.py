"""Sliding block codes and the factor shifts they induce."""
from __future__ import annotations

from typing import Callable, Mapping

from ..errors import ParameterError
from ..words import Alphabet
from .base import MAX_WORDS, ShiftLanguage, enumerate_language


class BlockCode:
    """A local rule ψ on windows of length ``2r + 1``.

    ``rule`` maps source windows (internal strings) to target characters,
    either as a mapping or as a callable.
    """

    def __init__(self, radius: int, rule: Mapping[str, str] | Callable[[str], str],
                 target: Alphabet, source: Alphabet | None = None):
        if radius < 0:
            raise ParameterError("radius must be nonnegative")
        self.radius = radius
        self.target = target
        self.source = source
        if callable(rule):
            self._fn = rule
            self.table = None
        else:
            self.table = dict(rule)
            self._fn = self.table.__getitem__

    @property
    def width(self) -> int:
        return 2 * self.radius + 1

    def symbol(self, window: str) -> str:
        try:
            out = self._fn(window)
        except KeyError:
            raise ParameterError(f"block rule undefined on window {window!r}") from None
        if out not in self.target:
            raise ParameterError(f"block rule maps {window!r} outside the target alphabet")
        return out

    def apply(self, word: str) -> str:
        """Ψ(w): one target symbol per window, so |Ψ(w)| = |w| - 2r."""
        k = self.width
        return "".join(self.symbol(word[i:i + k]) for i in range(len(word) - k + 1))

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "BlockCode":
        return cls(0, {c: c for c in alphabet.chars}, alphabet, alphabet)

    @classmethod
    def relabel(cls, source: Alphabet, target: Alphabet, mapping: Mapping[str, str]) -> "BlockCode":
        return cls(0, dict(mapping), target, source)

    @classmethod
    def xor(cls) -> "BlockCode":
        """r = 1 rule on {0,1}: the sum mod 2 of the two outer symbols."""
        bits = Alphabet(("0", "1"))
        return cls(1, lambda w: "1" if w[0] != w[2] else "0", bits, bits)

    def to_config(self) -> dict:
        if self.table is None:
            raise ParameterError("callable block rules have no config form")
        return {"radius": self.radius, "target": list(self.target.symbols),
                "rule": dict(sorted(self.table.items()))}


class FactorShift(ShiftLanguage):
    """Image of ``source`` under a block code.

    A state is the set of pairs (source automaton state, last 2r source
    symbols) compatible with the target word read so far.
    """

    def __init__(self, source: ShiftLanguage, code: BlockCode):
        self.source = source
        self.code = code
        self.alphabet = code.target
        r2 = 2 * code.radius
        init = set()
        for ctx in source.continuations(source.start(), r2):
            init.add((source.run(ctx), ctx))
        self._start = frozenset(init)

    @property
    def descriptor(self):
        out = {"kind": "factor", "source": self.source.descriptor}
        if self.code.table is not None:
            out["code"] = self.code.to_config()
        return out

    def start(self):
        return self._start

    def step(self, state, ch):
        out = set()
        for s, ctx in state:
            for a, s2 in self.source.successors(s):
                window = ctx + a
                if self.code.symbol(window) == ch:
                    out.add((s2, window[1:]))
        return frozenset(out) if out else None


def factor_language(lang: ShiftLanguage, code: BlockCode, n: int,
                    max_words: int = MAX_WORDS, workers: int = 1) -> list[str]:
    """Ψ(L_{n+2r}), sorted and deduplicated."""
    source = enumerate_language(lang, n + 2 * code.radius, max_words=max_words, workers=workers)
    return sorted({code.apply(w) for w in source})
