"""Independent evaluation of ``Z(s)`` through the periodic-orbit expansion.

Closed orbits of length ``k`` are the cyclically admissible ``k``-tuples of
letters, counted as ordered tuples (periodic points of the ``k``-th iterate)
rather than conjugacy classes. Their geodesic lengths enter the operator
traces, and the traces feed the recursion for the Taylor coefficients of
``det(1 - z L_s)`` at ``z = 1``.

Left of the critical line the traces grow like ``|lambda_1|^k`` while the
coefficients they produce are tiny, so the recursion cancels many digits.
The expansion then switches to multiprecision: word traces are exact
integer products of the (binary) generator entries and the weights are
evaluated with mpmath.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import EnumerationCap, NonHyperbolicWord
from .schottky import SchottkyData

ENUMERATION_CAP = 10_000_000
RENORMALIZE_AFTER = 20
HYPERBOLIC_TOL = 1e-12
# digits kept beyond those cancelled in the recursion
GUARD_DIGITS = 25


@dataclass(frozen=True)
class SymbolicOrbit:
    word: tuple
    length: float
    trace: float


@dataclass(frozen=True)
class OrbitTable:
    """All closed orbits of one word length, as arrays.

    ``trace`` is the signed trace of the word's projectively normalized
    matrix. It overflows to ``inf`` for long words, while ``length`` stays
    accurate through the tracked log-scale.
    """

    k: int
    words: np.ndarray
    lengths: np.ndarray
    traces: np.ndarray

    def __len__(self):
        return len(self.lengths)

    def orbits(self) -> list:
        return [
            SymbolicOrbit(tuple(int(x) for x in w), float(l), float(t))
            for w, l, t in zip(self.words, self.lengths, self.traces)
        ]


def orbit_count(q: int, k: int) -> int:
    """Number of cyclically admissible ``k``-tuples over ``2q`` letters."""
    return (2 * q - 1) ** k + q + (q - 1) * (-1) ** k


def _check_cap(q: int, k: int, cap: int):
    if k < 1:
        raise ValueError("word length must be positive")
    if (2 * q - 1) ** k > cap:
        raise EnumerationCap(f"(2q-1)^k = {(2 * q - 1) ** k} tuples exceed the cap {cap}")


def _extend(words: np.ndarray, size: int):
    """Append every letter that does not cancel the last one; returns words and parent rows."""
    inverse_of = size - 1 - np.arange(size)
    nxt = np.broadcast_to(np.arange(size), (len(words), size))
    keep = nxt != inverse_of[words[:, -1]][:, None]
    parent = np.nonzero(keep)[0]
    return np.hstack([words[parent], nxt[keep][:, None]]), parent


def _closed(words: np.ndarray, size: int) -> np.ndarray:
    return words[:, 0] != size - 1 - words[:, -1]


def orbit_table(data: SchottkyData, k: int, cap: int = ENUMERATION_CAP) -> OrbitTable:
    """Enumerate every cyclically admissible ``k``-tuple and its geodesic length."""
    _check_cap(data.q, k, cap)
    letters = np.array(data.letters)
    size = len(letters)
    gens = [data.generator(int(x)) for x in letters]
    mats = np.array([g.matrix for g in gens])
    # the stored generators have determinant 1 only up to rounding; every
    # factor is projectively normalized by its exact determinant via log_scale
    half_log_det = np.array([0.5 * math.log1p(g.det_defect) for g in gens])

    words = np.arange(size)[:, None]
    prods = mats.copy()
    log_scale = -half_log_det
    for step in range(1, k):
        words, parent = _extend(words, size)
        letter = words[:, -1]
        prods = prods[parent] @ mats[letter]
        log_scale = log_scale[parent] - half_log_det[letter]
        if step >= RENORMALIZE_AFTER:
            scale = np.max(np.abs(prods), axis=(1, 2))
            prods = prods / scale[:, None, None]
            log_scale = log_scale + np.log(scale)
    closed = _closed(words, size)
    words, prods, log_scale = words[closed], prods[closed], log_scale[closed]

    tr = prods[:, 0, 0] + prods[:, 1, 1]
    log_half = np.log(np.abs(tr) / 2) + log_scale
    if np.any(log_half < math.log1p(HYPERBOLIC_TOL / 2)):
        bad = words[np.argmin(log_half)]
        raise NonHyperbolicWord(f"word {tuple(int(x) for x in letters[bad])} is not hyperbolic")
    # arccosh(T) = log T + log(1 + sqrt(1 - T^-2)), usable with T in log form
    lengths = 2.0 * (log_half + np.log1p(np.sqrt(-np.expm1(-2.0 * log_half))))
    with np.errstate(over="ignore"):
        traces = np.sign(tr) * np.exp(np.log(np.abs(tr)) + log_scale)
    return OrbitTable(k, letters[words], lengths, traces)


def orbits(data: SchottkyData, k: int, cap: int = ENUMERATION_CAP) -> list:
    return orbit_table(data, k, cap).orbits()


def _trace_from_lengths(lengths: np.ndarray, s: complex) -> complex:
    return complex(np.sum(np.exp(-s * lengths) / -np.expm1(-lengths)))


def trace_power(data: SchottkyData, s: complex, k: int, cap: int = ENUMERATION_CAP) -> complex:
    """``Tr L_s^k`` as the sum of ``e^{-s l} / (1 - e^{-l})`` over closed orbits of length ``k``."""
    return _trace_from_lengths(orbit_table(data, k, cap).lengths, complex(s))


def _canonical_classes(words: np.ndarray, size: int):
    """One representative per class under rotation and inversion, with class sizes.

    Traces are invariant under both operations. Returns ``words`` unchanged
    with unit counts when the class codes would not fit in 63 bits.
    """
    n, k = words.shape
    if k * math.log2(size) > 62:
        return words, np.ones(n, dtype=np.int64)
    inverted = (size - 1 - words)[:, ::-1]
    weights = size ** np.arange(k - 1, -1, -1, dtype=np.int64)
    codes = np.full(n, np.iinfo(np.int64).max)
    for variant in (words, inverted):
        for r in range(k):
            codes = np.minimum(codes, np.roll(variant, -r, axis=1) @ weights)
    _, first, counts = np.unique(codes, return_index=True, return_counts=True)
    return words[first], counts


def _integer_generators(data: SchottkyData):
    """Generator matrices scaled by a common power of two to exact integers, and that scale."""
    letters = data.letters
    entries = {x: [Fraction(v) for v in data.generator(x).matrix.ravel()] for x in letters}
    scale = max(f.denominator for fs in entries.values() for f in fs)
    return {x: tuple(int(f * scale) for f in fs) for x, fs in entries.items()}


class _ExactLengths:
    """``log e^{-l}`` for every closed orbit class, to a requested precision.

    Word products are exact integers; ``e^{-l}`` is the eigenvalue ratio
    ``4 D / (|T| + sqrt(T^2 - 4 D))^2`` of the product's trace ``T`` and
    determinant ``D``, which also normalizes projectively.
    """

    def __init__(self, data: SchottkyData):
        self.data = data
        self.letters = data.letters
        self.ints = _integer_generators(data)
        self._products = {}
        self._classes = {}

    def _product(self, word: tuple):
        if len(word) == 1:
            return self.ints[word[0]]
        cached = self._products.get(word)
        if cached is None:
            a, b, c, d = self._product(word[:-1])
            e, f, g, h = self.ints[word[-1]]
            cached = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
            self._products[word] = cached
        return cached

    def classes(self, k: int):
        """``(T, D, count)`` integer triples for the classes of closed words of length ``k``."""
        if k not in self._classes:
            size = len(self.letters)
            words = np.arange(size)[:, None]
            for _ in range(1, k):
                words, _ = _extend(words, size)
            words = words[_closed(words, size)]
            reps, counts = _canonical_classes(words, size)
            out = []
            for rep, count in zip(reps, counts):
                word = tuple(self.letters[i] for i in rep)
                a, b, c, d = self._product(word)
                out.append((a + d, a * d - b * c, int(count)))
            self._classes[k] = out
        return self._classes[k]

    def log_ratios(self, k: int, ctx) -> list:
        """``(log e^{-l}, e^{-l}, count)`` in the mpmath context ``ctx``."""
        out = []
        for trace, det, count in self.classes(k):
            disc = trace * trace - 4 * det
            if disc <= 0:
                raise NonHyperbolicWord(f"a closed word of length {k} is not hyperbolic")
            root = abs(ctx.mpf(trace)) + ctx.sqrt(ctx.mpf(disc))
            ratio = 4 * ctx.mpf(det) / (root * root)
            out.append((ctx.log(ratio), ratio, count))
        return out


@dataclass
class OrbitExpansion:
    """Periodic-orbit expansion of ``Z`` for one surface, caching orbit data by ``k``.

    ``dps`` selects the arithmetic: ``None`` for double precision, an integer
    for that many mpmath digits, ``"auto"`` to pick multiprecision only when
    the recursion would cancel more digits than double precision can spare.
    """

    data: SchottkyData
    cap: int = ENUMERATION_CAP
    dps: object = "auto"
    _lengths: dict = field(default_factory=dict, repr=False)
    _exact: object = field(default=None, repr=False)

    def lengths(self, k: int) -> np.ndarray:
        if k not in self._lengths:
            self._lengths[k] = orbit_table(self.data, k, self.cap).lengths
        return self._lengths[k]

    def traces(self, s: complex, order: int) -> np.ndarray:
        s = complex(s)
        return np.array([_trace_from_lengths(self.lengths(k), s) for k in range(1, order + 1)])

    def required_digits(self, s: complex, order: int) -> int:
        """Digits cancelled by the recursion, estimated from the largest trace."""
        biggest = max(1.0, float(np.max(np.abs(self.traces(s, order)))))
        return int(math.ceil(math.log10(biggest)))

    def _digits(self, s: complex, order: int):
        if self.dps == "auto":
            lost = self.required_digits(s, order)
            return None if lost <= 3 else lost + GUARD_DIGITS
        return self.dps

    def _exact_traces(self, s: complex, order: int, ctx) -> list:
        if self._exact is None:
            self._exact = _ExactLengths(self.data)
        s = ctx.mpc(s)
        out = []
        for k in range(1, order + 1):
            _check_cap(self.data.q, k, self.cap)
            terms = [
                count * ctx.exp(s * log_ratio) / (1 - ratio)
                for log_ratio, ratio, count in self._exact.log_ratios(k, ctx)
            ]
            out.append(ctx.fsum(terms))
        return out

    def coefficients(self, s: complex, order: int) -> np.ndarray:
        """``d_0 .. d_order`` from ``d_n = -(1/n) sum_k d_{n-k} Tr L_s^k``."""
        digits = self._digits(s, order)
        if digits is None:
            return _recursion(list(self.traces(s, order)), order, complex(1), complex)
        ctx = mpmath.mp.clone()
        ctx.dps = digits
        d = _recursion(self._exact_traces(s, order, ctx), order, ctx.mpc(1), ctx.mpc)
        return np.array([complex(x) for x in d])

    def zeta(self, s: complex, order: int) -> complex:
        digits = self._digits(s, order)
        if digits is None:
            return complex(np.sum(self.coefficients(s, order)))
        ctx = mpmath.mp.clone()
        ctx.dps = digits
        d = _recursion(self._exact_traces(s, order, ctx), order, ctx.mpc(1), ctx.mpc)
        return complex(ctx.fsum(d))


def _recursion(traces: list, order: int, one, zero_type) -> list:
    d = [one] + [zero_type(0)] * order
    for n in range(1, order + 1):
        d[n] = -sum(d[n - k] * traces[k - 1] for k in range(1, n + 1)) / n
    return d


def zeta_poe(
    data: SchottkyData, s: complex, truncation: int, cap: int = ENUMERATION_CAP, dps="auto"
) -> complex:
    """``Z`` truncated after ``truncation`` terms of the periodic-orbit expansion."""
    return OrbitExpansion(data, cap, dps).zeta(s, truncation)
