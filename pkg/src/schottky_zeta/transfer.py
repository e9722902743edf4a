"""Discretized transfer operator and ``Z(s) = det(1 - L_s)`` via LU factorization.

The static parts (kernel samples and log-derivatives for every nonzero
block) depend only on the Schottky data, the Chebyshev order ``N`` and the
refinement level ``n``; only ``exp(s log f)`` is recomputed per ``s``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .chebyshev import LBlockResult, collocation_block, mapped_points, nodes
from .errors import ContainmentViolation, DimensionCap, Overflow
from .geometry import Interval, MoebiusTransform
from .refinement import block_letter, block_partners, chart, index_set, refined_interval, word_map
from .schottky import SchottkyData

DENSE_CUTOFF = 8192
MAX_DIM = 2_000_000
OVERFLOW_LIMIT = 1e300
PRECISIONS = {"double": np.float64, "extended": np.longdouble}


@dataclass(frozen=True)
class ScaledComplex:
    """A complex number stored as ``exp(log_modulus + i phase)``."""

    log_modulus: float
    phase: float

    @classmethod
    def from_complex(cls, z: complex) -> "ScaledComplex":
        if z == 0:
            return cls(-math.inf, 0.0)
        return cls(math.log(abs(z)), cmath.phase(z))

    def to_complex(self, offset: float = 0.0) -> complex:
        """``exp(log_modulus - offset + i phase)``."""
        if self.log_modulus == -math.inf:
            return 0j
        return cmath.exp(complex(self.log_modulus - offset, self.phase))

    def __complex__(self):
        return self.to_complex()

    def __abs__(self):
        return math.exp(self.log_modulus)

    def conjugate(self) -> "ScaledComplex":
        return ScaledComplex(self.log_modulus, _wrap(-self.phase))

    def __mul__(self, other: "ScaledComplex") -> "ScaledComplex":
        return ScaledComplex(self.log_modulus + other.log_modulus, _wrap(self.phase + other.phase))


def _wrap(phase: float) -> float:
    """Reduce to the half-open interval ``(-pi, pi]``."""
    p = math.remainder(phase, 2 * math.pi)
    return math.pi if p == -math.pi else p


@dataclass(frozen=True, eq=False)
class StaticParts:
    data: SchottkyData
    N: int
    n: int
    words: tuple
    rows: np.ndarray
    cols: np.ndarray
    log_f: np.ndarray
    m: np.ndarray

    @property
    def precision(self) -> str:
        return "extended" if self.m.dtype == np.longdouble else "double"

    @property
    def dim(self) -> int:
        return len(self.words) * self.N

    @property
    def block_count(self) -> int:
        return len(self.rows)

    def block(self, i: int) -> LBlockResult:
        return LBlockResult(np.exp(self.log_f[i]), self.m[i])

    def blocks(self) -> dict:
        """Map ``(v, w) -> LBlockResult`` over the nonzero blocks."""
        return {
            (self.words[r], self.words[c]): self.block(i)
            for i, (r, c) in enumerate(zip(self.rows, self.cols))
        }

    def reordered(self, permutation) -> "StaticParts":
        """Same operator with the words listed in the order ``words[permutation]``."""
        permutation = np.asarray(permutation)
        new_pos = np.empty_like(permutation)
        new_pos[permutation] = np.arange(len(permutation))
        return StaticParts(
            self.data,
            self.N,
            self.n,
            tuple(self.words[i] for i in permutation),
            new_pos[self.rows],
            new_pos[self.cols],
            self.log_f,
            self.m,
        )


def pullback_map(data: SchottkyData, v, w, I_v: Interval, I_w: Interval, N: int) -> MoebiusTransform:
    """The branch ``g`` of block ``(v, w)``: the candidate sending the ``I_v`` nodes into ``I_w``.

    The block is the weighted composition with ``S_k``, ``k`` from
    :func:`block_letter`, whose pullback is ``S_{-k}``. Both ``S_{-k}`` and
    ``S_k`` are tested, with a tolerance covering the rounding of absolute
    coordinates at this interval size, and exactly one must be admitted.
    """
    k = block_letter(v, w)
    slack = 1e-12 + 64 * np.finfo(float).eps * (abs(I_w.center) + I_w.radius) / I_w.radius
    admitted = []
    for letter in (-k, k):
        g = data.generator(letter)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = I_w.to_unit(mapped_points(N, I_v, g))
        if np.all(np.isfinite(u)) and np.max(np.abs(u)) <= 1.0 + slack:
            admitted.append(g)
    if len(admitted) != 1:
        raise ContainmentViolation(
            f"block {v}->{w}: {len(admitted)} candidate maps send I_v into I_w (expected exactly one)"
        )
    return admitted[0]


def lparts(
    data: SchottkyData, N: int, n: int, max_dim: int = MAX_DIM, precision: str = "double"
) -> StaticParts:
    """Static parts of the level-``n``, order-``N`` discretization.

    ``precision="extended"`` evaluates every static part in ``np.longdouble``.
    At refinement level 2 and beyond the determinant can be sensitive enough
    to entrywise rounding that double precision limits its relative accuracy
    to about ``1e-8``.
    """
    if precision not in PRECISIONS:
        raise ValueError(f"precision must be one of {sorted(PRECISIONS)}, got {precision!r}")
    dtype = PRECISIONS[precision]
    words = index_set(data.q, n)
    dim = len(words) * N
    if dim > max_dim:
        raise DimensionCap(f"dimension {dim} exceeds cap {max_dim}")
    pos = {w: i for i, w in enumerate(words)}
    intervals = [refined_interval(data, w) for w in words]
    charts = [chart(data, w) for w in words]
    x = nodes(N, dtype)
    rows, cols, log_f, ms = [], [], [], []
    for i, v in enumerate(words):
        z = charts[i].to_base(x)
        # the collocation points themselves, consistent with the chart
        y = intervals[i].from_unit(x) if n == 0 else word_map(data, v)(z)
        for w in block_partners(v, data.q):
            j = pos[w]
            g = pullback_map(data, v, w, intervals[i], intervals[j], N)
            if n == 0:
                u = intervals[j].to_unit(g.act(y))
            else:
                # g o Q_v = Q_w o S_{v_n}, so in chart coordinates the block map is S_{v_n}
                u = charts[j].from_base(data.generator(v[-2]).act(z))
            res = collocation_block(N, u, g.deriv(y))
            rows.append(i)
            cols.append(j)
            log_f.append(np.log(res.f))
            ms.append(res.m)
    return StaticParts(
        data, N, n, tuple(words), np.array(rows), np.array(cols),
        np.array(log_f, dtype=dtype), np.array(ms, dtype=dtype),
    )


def _weights(parts: StaticParts, s: complex) -> np.ndarray:
    s = complex(s)
    worst = s.real * parts.log_f
    if np.max(worst) > math.log(OVERFLOW_LIMIT):
        i = int(np.argmax(np.max(worst, axis=1)))
        v, w = parts.words[parts.rows[i]], parts.words[parts.cols[i]]
        raise Overflow(
            f"|f^s| exceeds {OVERFLOW_LIMIT:g} in block {v}->{w} at s={s}; "
            "use smaller |Re s| or a higher refinement level"
        )
    if parts.precision == "extended":
        return np.exp(parts.log_f * np.clongdouble(s))
    return np.exp(s * parts.log_f)


def weighted_blocks(parts: StaticParts, s: complex) -> np.ndarray:
    """The nonzero blocks ``diag(f^s) m`` stacked along the first axis."""
    return _weights(parts, s)[:, :, None] * parts.m


def operator_matrix(parts: StaticParts, s: complex) -> np.ndarray:
    """Dense matrix of the discretized operator ``L_s``."""
    d, N = len(parts.words), parts.N
    blocks = weighted_blocks(parts, s)
    if complex(s).imag == 0:
        blocks = blocks.real
    out = np.zeros((d, N, d, N), dtype=blocks.dtype)
    out[parts.rows, :, parts.cols, :] = blocks
    return out.reshape(d * N, d * N)


def assemble(parts: StaticParts, s: complex) -> np.ndarray:
    """Dense ``1 - L_s``."""
    a = -operator_matrix(parts, s)
    a[np.diag_indices_from(a)] += 1.0
    return a


def assemble_sparse(parts: StaticParts, s: complex) -> scipy.sparse.csc_matrix:
    N = parts.N
    blocks = weighted_blocks(parts, s)
    if complex(s).imag == 0:
        blocks = blocks.real
    ii, jj = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    r = (parts.rows[:, None, None] * N + ii).ravel()
    c = (parts.cols[:, None, None] * N + jj).ravel()
    lop = scipy.sparse.coo_matrix((blocks.ravel(), (r, c)), shape=(parts.dim, parts.dim))
    return (scipy.sparse.identity(parts.dim, dtype=lop.dtype, format="csc") - lop).tocsc()


def _parity(perm: np.ndarray) -> int:
    """Parity of a permutation given as an index array."""
    seen = np.zeros(len(perm), dtype=bool)
    swaps = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        swaps += length - 1
    return swaps % 2


def _from_diagonal(diag: np.ndarray, parity: int) -> ScaledComplex:
    if np.any(diag == 0):
        return ScaledComplex(-math.inf, 0.0)
    log_mod = float(np.sum(np.log(np.abs(diag))))
    if np.isrealobj(diag):
        # count signs so that a real determinant gets a phase of exactly 0 or pi
        negative = int(np.count_nonzero(diag < 0)) + parity
        return ScaledComplex(log_mod, math.pi if negative % 2 else 0.0)
    phase = float(np.sum(np.angle(diag))) + math.pi * parity
    return ScaledComplex(log_mod, _wrap(phase))


def _lu_extended(a: np.ndarray):
    """Diagonal of ``U`` and pivot parity from LU with partial pivoting in the array's own precision.

    LAPACK works in double at most, so extended-precision matrices are
    factorized here with row-wise rank-one updates.
    """
    a = np.array(a)
    n = a.shape[0]
    swaps = 0
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if p != k:
            a[[k, p]] = a[[p, k]]
            swaps += 1
        if a[k, k] == 0:
            continue
        a[k + 1 :, k] /= a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    return np.diagonal(a).copy(), swaps % 2


def log_det(matrix) -> ScaledComplex:
    """Log-modulus and phase of the determinant from an LU factorization with partial pivoting."""
    if not scipy.sparse.issparse(matrix) and np.asarray(matrix).dtype in (np.longdouble, np.clongdouble):
        return _from_diagonal(*_lu_extended(matrix))
    if scipy.sparse.issparse(matrix):
        lu = scipy.sparse.linalg.splu(scipy.sparse.csc_matrix(matrix))
        parity = (_parity(lu.perm_r) + _parity(lu.perm_c)) % 2
        return _from_diagonal(lu.U.diagonal(), parity)
    a = np.asarray(matrix)
    if a.shape[0] == 0:
        return ScaledComplex(0.0, 0.0)
    with warnings.catch_warnings():
        # an exactly singular matrix is reported through log_modulus = -inf
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    parity = int(np.count_nonzero(piv != np.arange(len(piv)))) % 2
    return _from_diagonal(np.diag(lu), parity)


def zeta(parts: StaticParts, s: complex, dense_cutoff: int = DENSE_CUTOFF) -> ScaledComplex:
    """``Z(s) = det(1 - L_s)`` for the discretized operator."""
    if parts.dim <= dense_cutoff or parts.precision == "extended":
        return log_det(assemble(parts, s))
    return log_det(assemble_sparse(parts, s))
