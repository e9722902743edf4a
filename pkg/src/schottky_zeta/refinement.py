"""Word sets indexing the refined intervals and the block sparsity of the operator.

A word of level ``n`` is a tuple ``(w_1, ..., w_n, l)`` of letters in
``{+-1, ..., +-q}`` with ``w_k != -w_{k-1}`` and ``l != w_n``. It labels the
interval ``S_{w_1} ... S_{w_n} . I_l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Interval, map_interval, moebius_apply
from .schottky import SchottkyData


def letters(q: int) -> list:
    return list(range(-q, 0)) + list(range(1, q + 1))


def is_admissible(word, q: int | None = None) -> bool:
    if len(word) == 0:
        return False
    if q is not None and any(x == 0 or abs(x) > q for x in word):
        return False
    n = len(word) - 1
    if any(word[k] == -word[k - 1] for k in range(1, n)):
        return False
    return n == 0 or word[-1] != word[-2]


def index_set(q: int, n: int) -> list:
    """Admissible words of level ``n``, in a fixed prepend order.

    Level 0 lists the single letters; each further level prepends every
    allowed letter to each word of the previous level. At level 1 the
    prepended letter must differ from ``l``; beyond that it must not cancel
    the current first letter.
    """
    if q < 1 or n < 0:
        raise ValueError("need q >= 1 and n >= 0")
    alphabet = letters(q)
    words = [(k,) for k in alphabet]
    for level in range(1, n + 1):
        r = 1 if level < 2 else -1
        words = [(k,) + w for w in words for k in alphabet if r * k != w[0]]
    return words


def word_count(q: int, n: int) -> int:
    return 2 * q * (2 * q - 1) ** n


def refined_interval(data: SchottkyData, word) -> Interval:
    interval = data.interval(word[-1])
    for letter in reversed(word[:-1]):
        interval = map_interval(data.generator(letter), interval)
    return interval


def block_partners(v, q: int) -> list:
    """Column words ``w`` with a nonzero operator block in row ``v``.

    Level 0: every ``w != -v``. Level ``n >= 1``: the words
    ``(w_1, v_1, ..., v_{n-1}, -v_n)`` with ``w_1 != -v_1``.
    """
    n = len(v) - 1
    if n == 0:
        return [(w,) for w in letters(q) if w != -v[0]]
    tail = tuple(v[: n - 1]) + (-v[n - 1],)
    return [(w1,) + tail for w1 in letters(q) if w1 != -v[0]]


def block_letter(v, w) -> int:
    """Letter ``k`` such that block ``(v, w)`` is the weighted composition with ``S_k``."""
    return w[0] if len(v) == 1 else -w[0]


def sparsity_pattern(q: int, n: int, words=None) -> np.ndarray:
    """Boolean block pattern, rows and columns ordered like ``words``."""
    words = index_set(q, n) if words is None else list(words)
    pos = {w: i for i, w in enumerate(words)}
    pattern = np.zeros((len(words), len(words)), dtype=bool)
    for i, v in enumerate(words):
        for w in block_partners(v, q):
            pattern[i, pos[w]] = True
    return pattern


def _real_array(x) -> np.ndarray:
    """Float array that keeps extended precision when given it."""
    x = np.asarray(x)
    return x if x.dtype == np.longdouble else x.astype(np.float64)


def word_map(data: SchottkyData, word):
    """``z -> S_{w_1} ... S_{w_n} z`` for the prefix of ``word``, vectorized, any float precision."""

    def apply(z):
        z = _real_array(z)
        for letter in reversed(word[:-1]):
            z = data.generator(letter).act(z)
        return z

    return apply


@dataclass(frozen=True)
class Chart:
    """Unit coordinates of a refined interval pulled back to its base interval.

    For ``w = (w_1, ..., w_n, l)`` with ``Q = S_{w_1} ... S_{w_n}`` this is the
    Moebius map ``x -> Q^-1(c_w + r_w x)`` from ``[-1, 1]`` onto ``I_l``. Working
    through it avoids the cancellation in ``(y - c_w) / r_w`` once ``r_w`` is
    far below the spacing of doubles around ``c_w``.
    """

    base: Interval
    pole: float | None

    def to_base(self, x):
        x = _real_array(x)
        if self.pole is None:
            return self.base.from_unit(x)
        kappa, gamma = self._coefficients()
        return self.pole + gamma / (x - kappa)

    def from_base(self, z):
        z = _real_array(z)
        if self.pole is None:
            return self.base.to_unit(z)
        kappa, gamma = self._coefficients()
        return kappa + gamma / (z - self.pole)

    def _coefficients(self):
        lo, hi, p = self.base.lo, self.base.hi, self.pole
        kappa = (hi + lo - 2.0 * p) / (hi - lo)
        return kappa, (hi - p) * (1.0 - kappa)


def chart(data: SchottkyData, word) -> Chart:
    base = data.interval(word[-1])
    if len(word) == 1:
        return Chart(base, None)
    p = math.inf
    for letter in word[:-1]:
        p = moebius_apply(data.generator(-letter), p)
    return Chart(base, p)
