"""Chebyshev nodes, the Lagrange-Chebyshev kernel and the operator sub-blocks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import ContainmentViolation, NonpositiveDerivative
from .geometry import Interval, MoebiusTransform

CONTAINMENT_TOL = 1e-12


def nodes(N: int, dtype=np.float64) -> np.ndarray:
    """Gauss-Chebyshev points ``cos((2j - 1) pi / 2N)``, decreasing in ``j``.

    ``dtype=np.longdouble`` evaluates them in extended precision.
    """
    pi = np.arccos(np.asarray(-1, dtype=dtype))
    j = np.arange(1, N + 1, dtype=dtype)
    return np.cos((2 * j - 1) * pi / (2 * N))


@dataclass(frozen=True)
class ChebGrid:
    order: int

    @property
    def nodes(self) -> np.ndarray:
        return nodes(self.order)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.order, 1.0 / self.order)


def chebyshev_T(N: int, x) -> np.ndarray:
    """Values ``T_0(x) .. T_{N-1}(x)`` by the three-term recurrence; shape ``x.shape + (N,)``."""
    x = np.asarray(x)
    if x.dtype != np.longdouble:
        x = x.astype(np.float64)
    out = np.empty(x.shape + (N,), dtype=x.dtype)
    out[..., 0] = 1.0
    if N > 1:
        out[..., 1] = x
    for k in range(2, N):
        out[..., k] = 2.0 * x * out[..., k - 1] - out[..., k - 2]
    return out


def _kernel_weights(N: int, dtype=np.float64) -> np.ndarray:
    w = np.full(N, 2, dtype=dtype) / N
    w[0] = w[0] / 2
    return w


def kernel(N: int, x, y):
    """``K_N(x, y) = (1/N) [1 + 2 sum_{k<N} T_k(x) T_k(y)]``, broadcasting over x and y."""
    tx = chebyshev_T(N, x)
    ty = chebyshev_T(N, y)
    return np.sum(tx * ty * _kernel_weights(N, tx.dtype), axis=-1)


def kernel_matrix(N: int, x) -> np.ndarray:
    """Matrix ``K_N(x_i, node_j)`` for the points ``x``."""
    tx = chebyshev_T(N, x)
    return (tx * _kernel_weights(N, tx.dtype)) @ chebyshev_T(N, nodes(N, tx.dtype)).T


def coefficients(values) -> np.ndarray:
    """Chebyshev coefficients ``mu_k`` of the interpolant from node values (a DCT-II)."""
    values = np.asarray(values)
    return scipy.fft.dct(values, type=2, axis=0) / (2 * values.shape[0])


def interpolate(values, interval: Interval, x):
    """Evaluate the interpolant through ``values`` at the scaled nodes of ``interval``."""
    values = np.asarray(values)
    N = values.shape[0]
    u = np.atleast_1d(interval.to_unit(x))
    out = kernel_matrix(N, u) @ values
    return out if np.ndim(x) else out[0]


@dataclass(frozen=True)
class LBlockResult:
    f: np.ndarray
    m: np.ndarray

    def block(self, s) -> np.ndarray:
        """The weighted block ``diag(f**s) m``."""
        return np.exp(s * np.log(self.f))[:, None] * self.m


def mapped_points(N: int, I_v: Interval, g: MoebiusTransform) -> np.ndarray:
    return g.act(I_v.from_unit(nodes(N)))


def lblock(N: int, I_v: Interval, I_w: Interval, g: MoebiusTransform) -> LBlockResult:
    """Discretize ``f -> (g')^s f o g`` from node values on ``I_w`` to nodes on ``I_v``."""
    y = I_v.from_unit(nodes(N))
    u = I_w.to_unit(g.act(y))
    den = g.c * y + g.d
    if np.any(den == 0):
        raise NonpositiveDerivative("collocation point at the pole of the map")
    return collocation_block(N, u, g.deriv(y))


def collocation_block(N: int, u, f) -> LBlockResult:
    """Block from mapped nodes ``u`` (unit coordinates of ``I_w``) and derivatives ``f``."""
    u = np.asarray(u)
    f = np.asarray(f)
    if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > 1.0 + CONTAINMENT_TOL:
        raise ContainmentViolation(f"mapped nodes leave the target interval (max |u| = {np.max(np.abs(u))!r})")
    if not np.all(f > 0):
        raise NonpositiveDerivative("derivative is not positive at every collocation point")
    return LBlockResult(f, kernel_matrix(N, u))
