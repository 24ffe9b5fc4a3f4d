"""S-gap shifts: binary sequences whose 0-runs between consecutive 1's have length in S."""
from __future__ import annotations

import bisect
import math
from typing import Callable, Iterable

from ..errors import ParameterError
from ..words import Alphabet
from .base import ShiftLanguage

BINARY = Alphabet(("0", "1"))


class SGapParams:
    """The gap set S, as a predicate plus a sorted enumeration.

    ``values(upto)`` lists the elements of S that are ``<= upto``.  ``finite``
    is the largest element when S is finite and ``None`` otherwise.
    """

    def __init__(self, kind: str, predicate: Callable[[int], bool],
                 values: Callable[[int], list[int]], config: dict,
                 finite: int | None = None):
        self.kind = kind
        self._predicate = predicate
        self._values = values
        self.config = config
        self.max_element = finite

    # -- families -----------------------------------------------------------

    @classmethod
    def evens(cls) -> "SGapParams":
        return cls("evens", lambda s: s >= 0 and s % 2 == 0,
                   lambda m: list(range(0, m + 1, 2)), {"kind": "evens"})

    @classmethod
    def odds(cls) -> "SGapParams":
        return cls("odds", lambda s: s >= 0 and s % 2 == 1,
                   lambda m: list(range(1, m + 1, 2)), {"kind": "odds"})

    @classmethod
    def residue(cls, modulus: int, residues: Iterable[int]) -> "SGapParams":
        res = sorted({int(r) % modulus for r in residues})
        if modulus < 1 or not res:
            raise ParameterError("residue class needs modulus >= 1 and a residue")
        rs = frozenset(res)
        return cls("residue", lambda s: s >= 0 and s % modulus in rs,
                   lambda m: [s for s in range(m + 1) if s % modulus in rs],
                   {"kind": "residue", "modulus": modulus, "residues": res})

    @classmethod
    def powers(cls, base: int = 2) -> "SGapParams":
        if base < 2:
            raise ParameterError("powers need base >= 2")

        def values(m):
            out, v = [], 1
            while v <= m:
                out.append(v)
                v *= base
            return out

        def pred(s):
            if s < 1:
                return False
            while s % base == 0:
                s //= base
            return s == 1

        return cls("powers", pred, values, {"kind": "powers", "base": base})

    @classmethod
    def explicit(cls, values: Iterable[int]) -> "SGapParams":
        vals = sorted({int(v) for v in values})
        if not vals or vals[0] < 0:
            raise ParameterError("explicit S must be a nonempty set of naturals")
        vs = frozenset(vals)
        return cls("explicit", vs.__contains__,
                   lambda m: vals[: bisect.bisect_right(vals, m)],
                   {"kind": "explicit", "values": vals}, finite=vals[-1])

    @classmethod
    def from_config(cls, cfg: dict) -> "SGapParams":
        kind = cfg.get("kind")
        if kind == "evens":
            return cls.evens()
        if kind == "odds":
            return cls.odds()
        if kind == "powers":
            return cls.powers(int(cfg.get("base", 2)))
        if kind == "residue":
            return cls.residue(int(cfg["modulus"]), cfg["residues"])
        if kind == "explicit":
            return cls.explicit(cfg["values"])
        raise ParameterError(f"unknown S kind {kind!r}")

    # -- queries ------------------------------------------------------------

    def __contains__(self, s: int) -> bool:
        return self._predicate(s)

    def values(self, upto: int) -> list[int]:
        return self._values(upto)

    @property
    def is_finite(self) -> bool:
        return self.max_element is not None

    def selector(self, n: int) -> int:
        """s_n: the smallest s in S with s >= max(1, sqrt(n))."""
        target = max(1, math.isqrt(n) + (0 if math.isqrt(n) ** 2 == n else 1))
        s = target
        limit = max(4 * target + 64, 2 * n + 64)
        while s <= limit:
            if s in self:
                return s
            s += 1
        if self.is_finite:
            raise ParameterError("finite S has no element above sqrt(n)")
        raise ParameterError(f"no element of S found in [{target}, {limit}]")

    def to_config(self) -> dict:
        return dict(self.config)


class SGapShift(ShiftLanguage):
    """Automaton state: ``-1`` before the first 1, else the 0-run since the last 1."""

    alphabet = BINARY

    def __init__(self, params: SGapParams):
        self.params = params

    @property
    def descriptor(self):
        return {"kind": "sgap", "S": self.params.to_config()}

    def start(self):
        return -1

    def step(self, state, ch):
        if ch == "0":
            if state < 0:
                return state
            r = state + 1
            m = self.params.max_element
            return r if m is None or r <= m else None
        if state < 0 or state in self.params:
            return 0
        return None


def sgap_membership(params: SGapParams, word: str) -> bool:
    """True iff every 0-run strictly between two 1's has length in S.

    Prefix and suffix runs are unconstrained.  (For a finite S the language
    engine additionally caps the suffix run, since longer runs do not extend.)
    """
    BINARY.check(word)
    ones = [i for i, ch in enumerate(word) if ch == "1"]
    return all(b - a - 1 in params for a, b in zip(ones, ones[1:]))
