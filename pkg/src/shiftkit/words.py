"""Alphabets, words and the edit metric.

Words are plain ``str`` objects in which every character is one symbol.  An
:class:`Alphabet` maps user-facing symbol identifiers (which may be longer than
one character) onto those internal characters and back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .errors import AlphabetMismatchError, ParameterError, ResourceLimitError

#: Largest radius :func:`edit_ball` will expand unless told otherwise.
MAX_BALL_RADIUS = 6

_PRIVATE_BASE = 0xE000


@dataclass(frozen=True)
class Alphabet:
    """An ordered finite set of symbol identifiers.

    When every identifier is a single character the internal character of a
    symbol is the identifier itself; otherwise symbols are mapped to private-use
    code points in order, so string comparison of internal words always agrees
    with the alphabet order.
    """

    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise ParameterError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ParameterError(f"alphabet symbols are not distinct: {symbols}")
        if all(len(s) == 1 for s in symbols):
            chars = symbols
            if list(chars) != sorted(chars):
                raise ParameterError(
                    "single-character alphabets must be listed in code-point order"
                )
        else:
            chars = tuple(chr(_PRIVATE_BASE + i) for i in range(len(symbols)))
        object.__setattr__(self, "chars", chars)
        object.__setattr__(self, "_to_char", dict(zip(symbols, chars)))
        object.__setattr__(self, "_to_symbol", dict(zip(chars, symbols)))
        object.__setattr__(self, "_charset", frozenset(chars))

    @classmethod
    def digits(cls, p: int) -> "Alphabet":
        """The alphabet ``{0, 1, ..., p-1}``."""
        if p < 1:
            raise ParameterError("alphabet size must be positive")
        return cls(tuple(chr(48 + i) for i in range(p)))

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.chars)

    def __contains__(self, ch) -> bool:
        return ch in self._charset

    def index(self, ch: str) -> int:
        return self.chars.index(ch)

    def check(self, word: str) -> str:
        """Return ``word`` unchanged, raising if a character is foreign."""
        bad = set(word) - self._charset
        if bad:
            raise AlphabetMismatchError(
                f"symbols {sorted(bad)!r} are not in alphabet {self.symbols!r}"
            )
        return word

    def encode(self, symbols: Iterable[str]) -> str:
        try:
            return "".join(self._to_char[str(s)] for s in symbols)
        except KeyError as exc:
            raise AlphabetMismatchError(f"unknown symbol {exc.args[0]!r}") from None

    def decode(self, word: str) -> list[str]:
        self.check(word)
        return [self._to_symbol[c] for c in word]

    def serialize(self, word: str) -> str:
        """Concatenate identifiers; commas separate multi-character identifiers."""
        parts = self.decode(word)
        return "".join(parts) if self.single_char else ",".join(parts)

    def parse(self, text: str) -> str:
        if self.single_char:
            return self.check(text)
        if text == "":
            return ""
        return self.encode(text.split(","))

    def words(self, n: int) -> Iterator[str]:
        """All ``p**n`` words of length ``n`` in lexicographic order."""
        if n == 0:
            yield ""
            return
        for prefix in self.words(n - 1):
            for ch in self.chars:
                yield prefix + ch


# ---------------------------------------------------------------------------
# edit scripts


@dataclass(frozen=True)
class EditStep:
    op: str  # "sub", "ins" or "del"
    position: int
    symbol: str | None = None

    def apply(self, word: str) -> str:
        i = self.position
        if self.op == "sub":
            if not 0 <= i < len(word):
                raise ParameterError(f"substitution position {i} out of range")
            return word[:i] + self.symbol + word[i + 1:]
        if self.op == "ins":
            if not 0 <= i <= len(word):
                raise ParameterError(f"insertion position {i} out of range")
            return word[:i] + self.symbol + word[i:]
        if self.op == "del":
            if not 0 <= i < len(word):
                raise ParameterError(f"deletion position {i} out of range")
            return word[:i] + word[i + 1:]
        raise ParameterError(f"unknown edit operation {self.op!r}")


@dataclass(frozen=True)
class EditScript:
    """Edits applied left to right in list order.

    Scripts produced by :func:`edit_script` run from the right end of the word
    to the left, so every position refers to the source word's coordinates.
    """

    steps: tuple[EditStep, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def apply(self, word: str) -> str:
        for step in self.steps:
            word = step.apply(word)
        return word


def _dp_table(u: str, v: str) -> list[list[int]]:
    n, m = len(u), len(v)
    prev = list(range(m + 1))
    table = [prev]
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        a = u[i - 1]
        for j in range(1, m + 1):
            cost = prev[j - 1] + (a != v[j - 1])
            if prev[j] + 1 < cost:
                cost = prev[j] + 1
            if cur[j - 1] + 1 < cost:
                cost = cur[j - 1] + 1
            cur[j] = cost
        table.append(cur)
        prev = cur
    return table


def _check_pair(u: str, v: str, alphabet: Alphabet | None) -> None:
    if alphabet is not None:
        alphabet.check(u)
        alphabet.check(v)


def edit_distance(u: str, v: str, alphabet: Alphabet | None = None) -> int:
    """Minimum number of substitutions, insertions and deletions turning u into v.

    Transpositions are not an edit.  With ``alphabet`` given, both words are
    validated against it first.
    """
    _check_pair(u, v, alphabet)
    if len(u) < len(v):
        u, v = v, u
    # two-row Wagner-Fischer
    prev = list(range(len(v) + 1))
    for i, a in enumerate(u, 1):
        cur = [i]
        for j, b in enumerate(v, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a != b)))
        prev = cur
    return prev[-1]


def edit_script(u: str, v: str, alphabet: Alphabet | None = None) -> EditScript:
    """A minimal edit script transforming ``u`` into ``v``."""
    _check_pair(u, v, alphabet)
    table = _dp_table(u, v)
    steps: list[EditStep] = []
    i, j = len(u), len(v)
    while i > 0 or j > 0:
        here = table[i][j]
        if i > 0 and j > 0 and table[i - 1][j - 1] + (u[i - 1] != v[j - 1]) == here:
            if u[i - 1] != v[j - 1]:
                steps.append(EditStep("sub", i - 1, v[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and table[i - 1][j] + 1 == here:
            steps.append(EditStep("del", i - 1))
            i -= 1
        else:
            steps.append(EditStep("ins", i, v[j - 1]))
            j -= 1
    return EditScript(tuple(steps))


def hamming_distance(u: str, v: str) -> int:
    if len(u) != len(v):
        raise ParameterError("Hamming distance needs words of equal length")
    return sum(a != b for a, b in zip(u, v))


def neighbours(word: str, chars: Sequence[str]) -> set[str]:
    """Every word exactly one edit away from ``word``."""
    out = set()
    n = len(word)
    for i in range(n + 1):
        head, tail = word[:i], word[i:]
        for ch in chars:
            out.add(head + ch + tail)
        if i < n:
            out.add(head + tail[1:])
            for ch in chars:
                if ch != word[i]:
                    out.add(head + ch + tail[1:])
    out.discard(word)
    return out


def edit_layers(word: str, chars: Sequence[str], radius: int) -> Iterator[list[str]]:
    """Breadth-first layers of the edit ball: layer ``d`` holds words at distance d."""
    seen = {word}
    frontier = [word]
    yield frontier
    for _ in range(radius):
        nxt = set()
        for w in frontier:
            for x in neighbours(w, chars):
                if x not in seen:
                    nxt.add(x)
        seen |= nxt
        frontier = sorted(nxt, key=lambda s: (len(s), s))
        if not frontier:
            return
        yield frontier


def edit_ball(
    word: str,
    radius: int,
    alphabet: Alphabet,
    language: Callable[[str], bool] | None = None,
    max_radius: int = MAX_BALL_RADIUS,
) -> list[str]:
    """All words within edit distance ``radius`` of ``word``.

    ``language`` (any membership predicate, e.g. ``ShiftLanguage.contains``)
    filters the result.  Words are returned ordered by length, then
    lexicographically.
    """
    if radius < 0:
        raise ParameterError("radius must be nonnegative")
    if radius > max_radius:
        raise ResourceLimitError(f"edit-ball radius {radius} exceeds the limit {max_radius}")
    alphabet.check(word)
    ball: list[str] = []
    for layer in edit_layers(word, alphabet.chars, radius):
        ball.extend(layer)
    if language is not None:
        ball = [w for w in ball if language(w)]
    ball.sort(key=lambda s: (len(s), s))
    return ball


def edit_ball_bound(n: int, m: int, p: int, log: bool = False) -> int | float:
    """Counting bound ``(2p + 2)**m * C(n + m, n)`` on an edit ball of radius m."""
    if n < 0 or m < 0 or p < 1:
        raise ParameterError("need n >= 0, m >= 0, p >= 1")
    if log:
        return m * math.log(2 * p + 2) + (
            math.lgamma(n + m + 1) - math.lgamma(n + 1) - math.lgamma(m + 1)
        )
    return (2 * p + 2) ** m * math.comb(n + m, n)
