"""Reference measures given by their cylinder weights."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from ..errors import ParameterError
from ..shifts.base import ShiftLanguage, reachable_states
from ..shifts.sft import FullShift
from ..words import Alphabet
from .potential import Potential


def _as_number(v):
    """Fractions stay exact; decimal strings and ints become Fractions; floats stay floats."""
    if isinstance(v, (Fraction, int)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    return float(v)


def _plogp(p) -> float:
    return 0.0 if p == 0 else float(p) * math.log(p)


class MeasureModel:
    kind = "abstract"
    exact = False
    samplable = False
    is_invariant = True
    #: True when log m[w] is a sum of log_step(previous symbol, symbol) terms
    local = False

    alphabet: Alphabet
    language: ShiftLanguage

    def cylinder(self, w: str) -> float:
        raise NotImplementedError

    def cylinder_exact(self, w: str) -> Fraction | None:
        return None

    def log_cylinder(self, w: str) -> float:
        ex = self.cylinder_exact(w)
        if ex is not None:
            if ex == 0:
                return -math.inf
            return math.log(ex.numerator) - math.log(ex.denominator)
        c = self.cylinder(w)
        return math.log(c) if c > 0 else -math.inf

    def marginal(self, k: int) -> dict[str, float]:
        """μ[u] for every u of length k (the integrals of depth-k cylinder indicators)."""
        return {u: self.cylinder(u) for u in self.alphabet.words(k)}

    def entropy(self) -> float | None:
        return None

    def integral(self, phi: Potential) -> float:
        """∫ φ dμ = Σ_u μ[u] φ(u) over windows u (invariant measures)."""
        total = []
        for u in self.language.words(phi.window):
            total.append(self.cylinder(u) * phi(u))
        return math.fsum(total)

    def sample(self, count: int, n: int, rng: np.random.Generator) -> np.ndarray:
        raise ParameterError(f"{self.kind} measures do not support forward sampling")

    def describe(self) -> dict:
        return {"kind": self.kind}


class Bernoulli(MeasureModel):
    kind = "bernoulli"
    samplable = True

    def __init__(self, alphabet: Alphabet, weights: Mapping[str, object] | Sequence):
        self.alphabet = alphabet
        self.language = FullShift(alphabet)
        if isinstance(weights, Mapping):
            vals = [_as_number(weights.get(a, 0)) for a in alphabet.chars]
        else:
            vals = [_as_number(v) for v in weights]
        if len(vals) != alphabet.size:
            raise ParameterError("one weight per symbol is required")
        if any(v < 0 for v in vals):
            raise ParameterError("weights must be nonnegative")
        self.exact = all(isinstance(v, Fraction) for v in vals)
        total = sum(vals)
        if self.exact:
            if total != 1:
                raise ParameterError(f"weights sum to {total}, not 1")
        elif abs(total - 1) > 1e-12:
            raise ParameterError(f"weights sum to {total}, not 1")
        self.weights = tuple(vals)
        self._w = dict(zip(alphabet.chars, vals))
        self._float = np.array([float(v) for v in vals])

    local = True

    def weight(self, ch: str):
        return self._w[ch]

    def log_step(self, prev: str | None, ch: str) -> float:
        v = self._w[ch]
        return math.log(v) if v > 0 else -math.inf

    def cylinder_exact(self, w: str) -> Fraction | None:
        if not self.exact:
            return None
        out = Fraction(1)
        for ch in w:
            out *= self._w[ch]
        return out

    def cylinder(self, w: str) -> float:
        return math.exp(math.fsum(math.log(self._w[ch]) if self._w[ch] > 0 else -math.inf
                                  for ch in w)) if w else 1.0

    def entropy(self) -> float:
        return -math.fsum(_plogp(v) for v in self.weights)

    def log_potential(self) -> Potential:
        """φ(x) = log q_{x_1}; the measure is Gibbs for φ with P(φ) = 0."""
        return Potential.symbols(self.alphabet, {a: math.log(self._w[a]) for a in self.alphabet.chars
                                                 if self._w[a] > 0})

    def sample(self, count, n, rng):
        return rng.choice(self.alphabet.size, size=(count, n), p=self._float)

    def describe(self):
        return {"kind": self.kind, "weights": [str(v) for v in self.weights]}


def _stationary_exact(P: list[list[Fraction]]) -> list[Fraction]:
    """Solve π P = π, Σπ = 1 by exact Gauss-Jordan elimination."""
    p = len(P)
    # equations: Σ_i π_i (P_ij - δ_ij) = 0 for j < p-1, and Σ π_i = 1
    rows = []
    for j in range(p - 1):
        rows.append([P[i][j] - (1 if i == j else 0) for i in range(p)] + [Fraction(0)])
    rows.append([Fraction(1)] * p + [Fraction(1)])
    for col in range(p):
        piv = next((r for r in range(col, p) if rows[r][col] != 0), None)
        if piv is None:
            raise ParameterError("stationary vector is not unique")
        rows[col], rows[piv] = rows[piv], rows[col]
        lead = rows[col][col]
        rows[col] = [v / lead for v in rows[col]]
        for r in range(p):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return [rows[i][p] for i in range(p)]


def _stationary_float(P: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eig(P.T)
    i = int(np.argmin(abs(vals - 1)))
    v = np.real(vecs[:, i])
    v = v / v.sum()
    if (v < -1e-12).any():
        raise ParameterError("stationary vector is not unique")
    return np.clip(v, 0, None)


class MarkovLanguage(ShiftLanguage):
    """Topological Markov chain of the positive transitions of a stochastic matrix."""

    def __init__(self, alphabet: Alphabet, allowed: list[list[bool]]):
        self.alphabet = alphabet
        self.allowed = allowed

    @property
    def descriptor(self):
        return {"kind": "markov-support", "alphabet": list(self.alphabet.symbols)}

    def start(self):
        return None

    def step(self, state, ch):
        j = self.alphabet.index(ch)
        if state is None or self.allowed[state][j]:
            return j
        return None


class Markov(MeasureModel):
    kind = "markov"
    samplable = True

    def __init__(self, alphabet: Alphabet, matrix: Sequence[Sequence], initial: Sequence | None = None):
        self.alphabet = alphabet
        p = alphabet.size
        P = [[_as_number(v) for v in row] for row in matrix]
        if len(P) != p or any(len(r) != p for r in P):
            raise ParameterError("transition matrix must be p x p")
        self.exact = all(isinstance(v, Fraction) for r in P for v in r)
        for r in P:
            if any(v < 0 for v in r):
                raise ParameterError("negative transition probability")
            s = sum(r)
            if (self.exact and s != 1) or (not self.exact and abs(s - 1) > 1e-12):
                raise ParameterError("rows must sum to 1")
        self.P = P
        self._Pf = np.array([[float(v) for v in r] for r in P])
        if self.exact:
            pi = _stationary_exact(P)
        else:
            pi = list(_stationary_float(self._Pf))
        self.stationary = pi
        if initial is None:
            self.initial = list(pi)
            self.is_invariant = True
        else:
            init = [_as_number(v) for v in initial]
            self.exact = self.exact and all(isinstance(v, Fraction) for v in init)
            self.initial = init
            self.is_invariant = all(abs(float(a) - float(b)) <= 1e-15 for a, b in zip(init, pi))
        allowed = [[v > 0 for v in r] for r in P]
        self.language = FullShift(alphabet) if all(all(r) for r in allowed) else \
            MarkovLanguage(alphabet, allowed)

    local = True

    def log_step(self, prev: str | None, ch: str) -> float:
        j = self.alphabet.index(ch)
        v = self.initial[j] if prev is None else self.P[self.alphabet.index(prev)][j]
        return math.log(v) if v > 0 else -math.inf

    def cylinder_exact(self, w: str) -> Fraction | None:
        if not self.exact:
            return None
        if not w:
            return Fraction(1)
        idx = [self.alphabet.index(c) for c in w]
        out = Fraction(self.initial[idx[0]])
        for a, b in zip(idx, idx[1:]):
            out *= self.P[a][b]
        return out

    def cylinder(self, w: str) -> float:
        if not w:
            return 1.0
        idx = [self.alphabet.index(c) for c in w]
        terms = [math.log(float(self.initial[idx[0]])) if self.initial[idx[0]] > 0 else -math.inf]
        for a, b in zip(idx, idx[1:]):
            v = self._Pf[a, b]
            terms.append(math.log(v) if v > 0 else -math.inf)
        if any(t == -math.inf for t in terms):
            return 0.0
        return math.exp(math.fsum(terms))

    def entropy(self) -> float | None:
        if not self.is_invariant:
            return None
        return -math.fsum(float(self.stationary[i]) * _plogp(self.P[i][j])
                          for i in range(len(self.P)) for j in range(len(self.P)))

    def log_potential(self) -> Potential:
        """Window-2 φ(ab) = log P(a, b); Gibbs with P(φ) = 0."""
        tab = {}
        for i, a in enumerate(self.alphabet.chars):
            for j, b in enumerate(self.alphabet.chars):
                if self.P[i][j] > 0:
                    tab[a + b] = math.log(self.P[i][j])
        return Potential(self.alphabet, 2, tab)

    def sample(self, count, n, rng):
        out = np.empty((count, n), dtype=np.int64)
        if n == 0:
            return out
        init = np.array([float(v) for v in self.initial])
        out[:, 0] = rng.choice(len(init), size=count, p=init)
        cdf = np.cumsum(self._Pf, axis=1)
        cdf[:, -1] = 1.0
        for t in range(1, n):
            u = rng.random(count)
            rows = cdf[out[:, t - 1]]
            out[:, t] = (u[:, None] >= rows).sum(axis=1)
        return out

    def describe(self):
        return {"kind": self.kind, "matrix": [[str(v) for v in r] for r in self.P],
                "initial": [str(v) for v in self.initial]}


class GraphPerron(MeasureModel):
    """Parry-type measure of the automaton graph of a language, truncated.

    The live automaton states (at most ``n_trunc``) form a labelled graph; on
    its strongly connected component of largest spectral radius λ with left
    and right Perron vectors l, r the path measure is pushed to labels:
    m[w] = Σ_v l_v r_{δ(v, w)} / (λ^{|w|} ⟨l, r⟩).
    """

    kind = "graph-perron"

    def __init__(self, lang: ShiftLanguage, n_trunc: int = 64):
        self.language = lang
        self.alphabet = lang.alphabet
        self.n_trunc = n_trunc
        states, complete = reachable_states(lang, n_trunc)
        self.truncated = not complete
        index = {s: i for i, s in enumerate(states)}
        size = len(states)
        A = np.zeros((size, size))
        trans: dict = {}
        for i, s in enumerate(states):
            for ch, s2 in lang.successors(s):
                j = index.get(s2)
                if j is not None:
                    A[i, j] += 1
                    trans[(i, ch)] = j
        ncomp, labels = connected_components(A, directed=True, connection="strong")
        best, best_rho = None, -1.0
        for c in range(ncomp):
            members = np.flatnonzero(labels == c)
            sub = A[np.ix_(members, members)]
            if not sub.any():
                continue
            rho = max(abs(np.linalg.eigvals(sub)))
            if rho > best_rho + 1e-12:
                best, best_rho = members, rho
        if best is None:
            raise ParameterError("graph has no cycle")
        sub = A[np.ix_(best, best)]
        lam, right = _perron(sub)
        _, left = _perron(sub.T)
        self.lam = lam
        self.members = [int(i) for i in best]
        self._pos = {v: k for k, v in enumerate(self.members)}
        self._l = left
        self._r = right
        self._norm = float(left @ right)
        self._trans = trans
        self._states = states

    def _run(self, v: int, w: str) -> int | None:
        for ch in w:
            v = self._trans.get((v, ch))
            if v is None or v not in self._pos:
                return None
        return v

    def cylinder(self, w: str) -> float:
        terms = []
        for v in self.members:
            end = self._run(v, w)
            if end is not None:
                terms.append(self._l[self._pos[v]] * self._r[self._pos[end]])
        return math.fsum(terms) / (self.lam ** len(w) * self._norm)

    def entropy(self) -> float:
        return math.log(self.lam)

    def describe(self):
        return {"kind": self.kind, "n_trunc": self.n_trunc, "truncated": self.truncated,
                "perron_root": self.lam}


def _perron(M: np.ndarray) -> tuple[float, np.ndarray]:
    vals, vecs = np.linalg.eig(M)
    i = int(np.argmax(vals.real))
    v = np.real(vecs[:, i])
    if v.sum() < 0:
        v = -v
    v = np.clip(v, 0, None)
    return float(vals[i].real), v / v.sum()


def measure_from_config(cfg: dict, alphabet: Alphabet, lang: ShiftLanguage | None = None) -> MeasureModel:
    kind = cfg.get("kind")
    if kind == "bernoulli":
        return Bernoulli(alphabet, cfg["weights"])
    if kind == "markov":
        return Markov(alphabet, cfg["matrix"], cfg.get("initial"))
    if kind == "graph-perron":
        if lang is None:
            raise ParameterError("graph-perron needs the shift")
        return GraphPerron(lang, int(cfg.get("n_trunc", 64)))
    raise ParameterError(f"unknown measure kind {kind!r}")
