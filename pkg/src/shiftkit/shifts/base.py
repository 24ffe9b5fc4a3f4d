"""Language engines as deterministic prefix automata.

Every engine exposes ``start()`` and ``step(state, ch)``; ``step`` returns
``None`` once the prefix read so far has left the language.  Because a one-sided
shift language is factorial and right-extensible, a word belongs to the
language exactly when it can be read to the end without dying, and depth-first
search over live states enumerates ``L_n`` in sorted order.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from typing import Hashable, Iterator

from ..errors import ResourceLimitError
from ..words import Alphabet

#: Default cap on the number of words a single enumeration may produce.
MAX_WORDS = 4_000_000

State = Hashable


class ShiftLanguage(ABC):
    alphabet: Alphabet

    @property
    @abstractmethod
    def descriptor(self) -> dict:
        """Construction tag and parameters (JSON-friendly)."""

    @abstractmethod
    def start(self) -> State: ...

    @abstractmethod
    def step(self, state: State, ch: str) -> State | None: ...

    # -- derived operations -------------------------------------------------

    def run(self, word: str, state: State | None = None) -> State | None:
        if state is None:
            state = self.start()
        for ch in word:
            state = self.step(state, ch)
            if state is None:
                return None
        return state

    def contains(self, word: str) -> bool:
        if any(ch not in self.alphabet for ch in word):
            return False
        return self.run(word) is not None

    __contains__ = contains

    def successors(self, state: State) -> Iterator[tuple[str, State]]:
        for ch in self.alphabet.chars:
            nxt = self.step(state, ch)
            if nxt is not None:
                yield ch, nxt

    def continuations(self, state: State, k: int) -> Iterator[str]:
        """Words ``e`` of length ``k`` readable from ``state``, in sorted order."""
        if k == 0:
            yield ""
            return
        for ch, nxt in self.successors(state):
            for tail in self.continuations(nxt, k - 1):
                yield ch + tail

    def extensions(self, word: str, k: int) -> list[str]:
        """Admissible right extensions of ``word`` by exactly ``k`` symbols."""
        state = self.run(word)
        if state is None:
            return []
        return list(self.continuations(state, k))

    def count(self, n: int) -> int:
        """``#L_n`` by dynamic programming over automaton states."""
        layer = {self.start(): 1}
        for _ in range(n):
            nxt: dict = defaultdict(int)
            for state, c in layer.items():
                for _, s2 in self.successors(state):
                    nxt[s2] += c
            layer = nxt
        return sum(layer.values())

    def words(self, n: int, max_words: int = MAX_WORDS) -> list[str]:
        return enumerate_language(self, n, max_words=max_words)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.descriptor})"


def _dfs(lang: ShiftLanguage, prefix: str, state: State, depth: int, out: list) -> None:
    if depth == 0:
        out.append(prefix)
        return
    for ch, nxt in lang.successors(state):
        _dfs(lang, prefix + ch, nxt, depth - 1, out)


def enumerate_language(
    lang: ShiftLanguage,
    n: int,
    max_words: int = MAX_WORDS,
    workers: int = 1,
    split_depth: int = 2,
) -> list[str]:
    """Exactly ``L_n``, sorted and duplicate free.

    The search is partitioned by prefixes of length ``split_depth``; partitions
    are concatenated in prefix order, so the result does not depend on
    ``workers``.
    """
    if n < 0:
        raise ValueError("length must be nonnegative")
    total = lang.count(n)
    if total > max_words:
        raise ResourceLimitError(f"#L_{n} = {total} exceeds the word budget {max_words}")
    depth = min(split_depth, n)
    seeds: list[tuple[str, State]] = []
    _collect_seeds(lang, "", lang.start(), depth, seeds)

    def work(seed):
        out: list[str] = []
        _dfs(lang, seed[0], seed[1], n - depth, out)
        return out

    if workers > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, seeds))
    else:
        parts = [work(s) for s in seeds]
    return [w for part in parts for w in part]


def _collect_seeds(lang, prefix, state, depth, out):
    if depth == 0:
        out.append((prefix, state))
        return
    for ch, nxt in lang.successors(state):
        _collect_seeds(lang, prefix + ch, nxt, depth - 1, out)


def reachable_states(lang: ShiftLanguage, cap: int = 5000) -> tuple[list, bool]:
    """Breadth-first closure of the live states; the flag is False if ``cap`` was hit."""
    start = lang.start()
    seen = {start: 0}
    order = [start]
    i = 0
    while i < len(order):
        for _, nxt in lang.successors(order[i]):
            if nxt not in seen:
                if len(order) >= cap:
                    return order, False
                seen[nxt] = len(order)
                order.append(nxt)
        i += 1
    return order, True
