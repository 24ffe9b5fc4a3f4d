"""β-shifts.

Digits of the greedy β-expansion of 1 are certified: for algebraic β the
remainders are kept exactly in Q(β) and compared against integers using
rational interval enclosures of β that are refined by bisection on the minimal
polynomial.  A β known only up to an interval produces digits only while every
β in the interval agrees; otherwise :class:`PrecisionError` is raised.

The language uses the quasi-greedy expansion ω* (equal to the greedy one unless
the greedy expansion is finite, in which case ``d1..dk 0^∞`` becomes
``(d1..d(k-1) (dk - 1))^∞``).  A word is admissible iff every suffix is
lexicographically at most the prefix of ω* of the same length.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Sequence

import sympy

from ..errors import ParameterError, PrecisionError
from ..words import Alphabet
from .base import ShiftLanguage

#: Bisection steps allowed when separating a remainder from an integer.
DEFAULT_MAX_BITS = 4096


def _digit_char(d: int) -> str:
    return chr(48 + d)


def _frac_interval_pow(lo: Fraction, hi: Fraction, k: int) -> tuple[Fraction, Fraction]:
    return lo ** k, hi ** k  # endpoints are positive


class _ExactField:
    """Arithmetic in Q[x]/(p) for monic irreducible p, with β isolated in [lo, hi]."""

    def __init__(self, monic: Sequence[Fraction], lo: Fraction, hi: Fraction):
        # monic = [c_0, ..., c_{d-1}] for x^d + c_{d-1} x^{d-1} + ... + c_0
        self.c = tuple(Fraction(v) for v in monic)
        self.d = len(self.c)
        self.lo, self.hi = Fraction(lo), Fraction(hi)
        self.bits = 0

    def p(self, x: Fraction) -> Fraction:
        acc = Fraction(1)
        for coef in reversed(self.c):
            acc = acc * x + coef
        return acc

    def one(self):
        return (Fraction(1),) + (Fraction(0),) * (self.d - 1)

    def mul_beta(self, e):
        top = e[-1]
        shifted = (Fraction(0),) + e[:-1]
        return tuple(s - top * c for s, c in zip(shifted, self.c))

    def sub_int(self, e, k: int):
        return (e[0] - k,) + e[1:]

    @staticmethod
    def is_zero(e) -> bool:
        return all(v == 0 for v in e)

    def enclose(self, e) -> tuple[Fraction, Fraction]:
        lo = hi = Fraction(0)
        for i, coef in enumerate(e):
            if coef == 0:
                continue
            plo, phi = _frac_interval_pow(self.lo, self.hi, i)
            a, b = coef * plo, coef * phi
            lo += min(a, b)
            hi += max(a, b)
        return lo, hi

    def refine(self) -> None:
        if self.lo == self.hi:
            return
        mid = (self.lo + self.hi) / 2
        pm = self.p(mid)
        if pm == 0:
            self.lo = self.hi = mid
        elif (pm > 0) == (self.p(self.hi) > 0):
            self.hi = mid
        else:
            self.lo = mid
        self.bits += 1

    def floor(self, e, max_bits: int) -> int:
        while True:
            lo, hi = self.enclose(e)
            if math.floor(lo) == math.floor(hi):
                return math.floor(lo)
            k = math.floor(hi)
            if self.is_zero(self.sub_int(e, k)):
                return k
            if self.bits >= max_bits:
                raise PrecisionError(
                    f"cannot separate a remainder from {k} within {max_bits} bisections"
                )
            self.refine()


class BetaShiftParams:
    """β with a certified, lazily extended greedy expansion of 1.

    Construct with :meth:`from_polynomial`, :meth:`from_decimal` or
    :meth:`from_rational`.
    """

    def __init__(self, *, field: _ExactField | None = None,
                 interval: tuple[Fraction, Fraction] | None = None,
                 description: dict, max_bits: int = DEFAULT_MAX_BITS):
        self._field = field
        self._interval = interval
        self.description = description
        self.max_bits = max_bits
        self._lock = threading.Lock()
        self._greedy: list[int] = []
        self._finite_at: int | None = None  # greedy expansion ends after this digit
        self._period: tuple[int, int] | None = None  # (preperiod, period) of ω*
        if field is not None:
            lo, hi = field.lo, field.hi
            self._remainder = field.one()
            self._seen = {self._remainder: 0}
        else:
            lo, hi = interval
            self._poly = [1]  # remainder as integer polynomial in β, constant term first
        if lo <= 1:
            raise ParameterError("β must exceed 1")
        if field is not None:
            self.b = field.floor(field.mul_beta(field.one()), max_bits)
            self.b = self.b if self._is_integer_beta() else self.b + 1
        else:
            if math.floor(lo) != math.floor(hi) or (hi == math.floor(hi) and lo != hi):
                raise PrecisionError("⌈β⌉ is not determined by the given interval")
            self.b = math.ceil(hi)
        self.alphabet = Alphabet.digits(self.b)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_polynomial(cls, coefficients: Sequence, interval: Sequence, **kw) -> "BetaShiftParams":
        """β = the unique root of the polynomial inside ``interval``.

        ``coefficients`` are listed from the highest degree down, e.g.
        ``[1, -1, -1]`` for x² - x - 1.
        """
        x = sympy.Symbol("x")
        coeffs = [sympy.Rational(str(Fraction(str(c)))) for c in coefficients]
        poly = sympy.Poly(coeffs, x)
        lo, hi = (Fraction(str(v)) for v in interval)
        if not lo < hi:
            raise ParameterError("isolating interval must have lo < hi")
        chosen = None
        for factor, _ in poly.factor_list()[1]:
            if factor.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                                  sympy.Rational(hi.numerator, hi.denominator)) > 0:
                if chosen is not None:
                    raise ParameterError("interval does not isolate a single root")
                chosen = factor
        if chosen is None:
            raise ParameterError("no root of the polynomial lies in the interval")
        if chosen.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                              sympy.Rational(hi.numerator, hi.denominator)) != 1:
            raise ParameterError("interval does not isolate a single root")
        monic = chosen.monic().all_coeffs()  # highest first, leading 1
        low_first = [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1]))
                     for c in reversed(monic[1:])]
        if len(low_first) == 1:
            root = -low_first[0]
            field = _ExactField(low_first, root, root)
        else:
            field = _ExactField(low_first, lo, hi)
            if field.p(lo) == 0 or field.p(hi) == 0:
                raise ParameterError("interval endpoints must not be roots")
            # shrink by bisection so that lo > 1 when the root itself exceeds 1
            sign_lo = field.p(lo) > 0
            for _ in range(200):
                if field.lo > 1 or field.hi <= 1:
                    break
                mid = (field.lo + field.hi) / 2
                pm = field.p(mid)
                if pm == 0:
                    field = _ExactField(low_first, mid, mid)
                    break
                if (pm > 0) == sign_lo:
                    field.lo = mid
                else:
                    field.hi = mid
        desc = {"polynomial": [str(c) for c in coefficients],
                "interval": [str(lo), str(hi)]}
        return cls(field=field, description=desc, **kw)

    @classmethod
    def from_rational(cls, value, **kw) -> "BetaShiftParams":
        v = Fraction(value)
        field = _ExactField([-v], v, v)
        return cls(field=field, description={"value": str(v)}, **kw)

    @classmethod
    def from_decimal(cls, text: str, radius: str | None = None, **kw) -> "BetaShiftParams":
        """β given in decimal.

        Without ``radius`` the decimal is taken as the exact (rational) value.
        With ``radius`` β is only known to lie in ``[text - radius, text + radius]``.
        """
        v = Fraction(text)
        if radius is None:
            inst = cls.from_rational(v, **kw)
            inst.description = {"decimal": text}
            return inst
        r = Fraction(radius)
        return cls(interval=(v - r, v + r),
                   description={"decimal": text, "radius": radius}, **kw)

    @classmethod
    def golden(cls) -> "BetaShiftParams":
        return cls.from_polynomial([1, -1, -1], ["1.5", "1.7"])

    @classmethod
    def tribonacci(cls) -> "BetaShiftParams":
        return cls.from_polynomial([1, -1, -1, -1], ["1.8", "1.9"])

    # -- digit generation ---------------------------------------------------

    def _is_integer_beta(self) -> bool:
        f = self._field
        e = f.mul_beta(f.one())
        k = f.floor(e, self.max_bits)
        return f.is_zero(f.sub_int(e, k))

    @property
    def is_integer(self) -> bool:
        return self._field is not None and self._is_integer_beta()

    def _extend_exact(self, n: int) -> None:
        f = self._field
        while len(self._greedy) < n and self._finite_at is None and self._period is None:
            y = f.mul_beta(self._remainder)
            d = f.floor(y, self.max_bits)
            x = f.sub_int(y, d)
            self._greedy.append(d)
            j = len(self._greedy)
            if f.is_zero(x):
                self._finite_at = j
                self._period = (0, j)
            elif x in self._seen:
                q = self._seen[x]
                self._period = (q, j - q)
            else:
                self._seen[x] = j
            self._remainder = x

    def _extend_interval(self, n: int) -> None:
        lo, hi = self._interval
        while len(self._greedy) < n:
            y = [0] + self._poly  # multiply by β
            ylo, yhi = _poly_enclose(y, lo, hi)
            if math.floor(ylo) != math.floor(yhi):
                raise PrecisionError(
                    f"digit {len(self._greedy) + 1} of the β-expansion is not determined "
                    f"by β ∈ [{float(lo)}, {float(hi)}]"
                )
            d = math.floor(ylo)
            y[0] -= d
            self._greedy.append(d)
            self._poly = y

    def _ensure(self, n: int) -> None:
        if len(self._greedy) >= n or self._period is not None:
            return
        with self._lock:
            if self._field is not None:
                self._extend_exact(n)
            else:
                self._extend_interval(n)

    def greedy_digit(self, j: int) -> int:
        """The j-th digit (1-based) of the greedy expansion of 1."""
        self._ensure(j)
        if j <= len(self._greedy):
            return self._greedy[j - 1]
        if self._finite_at is not None:
            return 0
        q, p = self._period
        return self._greedy[q + (j - q - 1) % p]

    def greedy_digits(self, n: int) -> list[int]:
        return [self.greedy_digit(j) for j in range(1, n + 1)]

    def quasi_digit(self, j: int) -> int:
        """The j-th digit of the quasi-greedy expansion ω*."""
        self._ensure(j)
        if self._finite_at is not None:
            k = self._finite_at
            i = (j - 1) % k
            return self._greedy[i] - (1 if i == k - 1 else 0)
        return self.greedy_digit(j)

    def quasi_digits(self, n: int) -> list[int]:
        return [self.quasi_digit(j) for j in range(1, n + 1)]

    @property
    def period(self) -> tuple[int, int] | None:
        """(preperiod, period) of ω* once detected (exact β only)."""
        return self._period

    def detect_period(self, limit: int = 256) -> tuple[int, int] | None:
        if self._field is not None:
            self._ensure(limit)
        return self._period

    @property
    def is_simple(self) -> bool:
        return self._finite_at is not None

    def next_vertex(self, i: int) -> int:
        j = i + 1
        if self._period is not None:
            q, p = self._period
            if j > q + p:
                j -= p
        return j

    def to_config(self) -> dict:
        return {"kind": "beta", **self.description}


def _poly_enclose(coeffs: list[int], lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Enclosure of Σ c_i β^i over β ∈ [lo, hi] with lo > 0."""
    a = b = Fraction(0)
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        plo, phi = lo ** i, hi ** i
        u, v = c * plo, c * phi
        a += min(u, v)
        b += max(u, v)
    return a, b


def beta_expansion(params: BetaShiftParams, n: int) -> str:
    """First ``n`` greedy digits of the β-expansion of 1 as a word."""
    if params.is_integer:
        raise ParameterError("integer β: the greedy expansion leaves the digit alphabet; "
                             "the β-shift is the full shift on β symbols")
    return "".join(_digit_char(d) for d in params.greedy_digits(n))


class BetaShift(ShiftLanguage):
    """Language of Σ_β read through its countable-graph presentation.

    The state is the current vertex ``v_i`` (1-based); reading digit ``a`` at
    ``v_i`` goes to ``v_1`` if ``a < ω*_i``, to ``v_{i+1}`` if ``a == ω*_i`` and
    dies otherwise.  Vertices are folded when ω* is eventually periodic.
    """

    def __init__(self, params: BetaShiftParams):
        self.params = params
        self.alphabet = params.alphabet
        params.detect_period(64)

    @property
    def descriptor(self):
        return self.params.to_config()

    def start(self):
        return 1

    def step(self, state, ch):
        a = ord(ch) - 48
        d = self.params.quasi_digit(state)
        if a < d:
            return 1
        if a == d:
            return self.params.next_vertex(state)
        return None


def beta_membership(params: BetaShiftParams, word: str) -> bool:
    """Suffix test: every suffix of ``word`` is ⪯ the ω* prefix of the same length."""
    params.alphabet.check(word)
    n = len(word)
    star = "".join(_digit_char(d) for d in params.quasi_digits(n))
    return all(word[i:] <= star[: n - i] for i in range(n))
