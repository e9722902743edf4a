"""Real Moebius transformations acting on the extended real line.

Elements of PSL(2, R) are stored as the normalized representative with
``ad - bc = 1`` and the first nonzero entry of ``(a, c)`` positive, so
that equality and hashing are projective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import AffineGenerator, InvalidParameter, PoleAtPoint, PoleInsideInterval

POLE_TOL = 1e-14
_EPS = float(np.finfo(float).eps)

INF = math.inf


def _exact_det(a, b, c, d) -> tuple:
    """The exact determinant of the floats, rounded, and its exact distance from 1, rounded."""
    det = Fraction(a) * Fraction(d) - Fraction(b) * Fraction(c)
    return float(det), float(det - 1)


@dataclass(frozen=True, init=False)
class MoebiusTransform:
    """Element of PSL(2, R).

    ``det`` is the exact determinant of the stored floats. Entries that are
    large cannot have ``ad - bc == 1`` exactly in floating point, and the
    derivative ``det / (cx + d)^2`` stays consistent with the action only if
    this rounding defect is carried along.
    """

    a: float
    b: float
    c: float
    d: float
    det: float = field(compare=False, repr=False)
    det_defect: float = field(compare=False, repr=False)

    def __init__(self, a, b, c, d):
        a, b, c, d = float(a), float(b), float(c), float(d)
        det, defect = _exact_det(a, b, c, d)
        if not det > 0:
            raise InvalidParameter(f"determinant must be positive, got {det!r}")
        if abs(det - 1.0) > 64 * _EPS * (a * a + b * b + c * c + d * d):
            scale = 1.0 / math.sqrt(det)
            a, b, c, d = a * scale, b * scale, c * scale, d * scale
            det, defect = _exact_det(a, b, c, d)
        lead = a if a != 0 else c
        if lead < 0:
            a, b, c, d = -a, -b, -c, -d
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "det", det)
        object.__setattr__(self, "det_defect", defect)

    @classmethod
    def from_matrix(cls, m) -> "MoebiusTransform":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "MoebiusTransform":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        """Trace of the normalized representative (sign is projective)."""
        return self.a + self.d

    @property
    def translation_length(self) -> float:
        """Displacement ``2 arccosh(|tr|/2)``; zero for non-hyperbolic elements."""
        t = abs(self.trace) / 2.0
        return 2.0 * math.acosh(t) if t > 1.0 else 0.0

    def compose(self, other: "MoebiusTransform") -> "MoebiusTransform":
        """Return ``self o other`` (apply ``other`` first)."""
        return MoebiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    __matmul__ = compose

    def inverse(self) -> "MoebiusTransform":
        return MoebiusTransform(self.d, -self.b, -self.c, self.a)

    def __call__(self, x):
        return moebius_apply(self, x)

    def act(self, x):
        """Vectorized action on finite points (no infinity handling)."""
        x = np.asarray(x)
        return (self.a * x + self.b) / (self.c * x + self.d)

    def deriv(self, x):
        """Vectorized derivative ``det / (cx + d)^2`` on finite points, in the precision of ``x``."""
        x = np.asarray(x)
        det = np.asarray(1, dtype=x.dtype) + self.det_defect if x.dtype == np.longdouble else self.det
        return det / (self.c * x + self.d) ** 2

    def pole(self) -> float:
        """The point sent to infinity, ``-d/c`` (infinity for affine maps)."""
        if self.c == 0:
            return INF
        return -self.d / self.c

    def close_to(self, other: "MoebiusTransform", tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - other.matrix)) <= tol)


@dataclass(frozen=True)
class Interval:
    center: float
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius) and math.isfinite(self.center)):
            raise InvalidParameter(f"invalid interval center={self.center}, radius={self.radius}")

    @classmethod
    def from_endpoints(cls, lo: float, hi: float) -> "Interval":
        if hi < lo:
            lo, hi = hi, lo
        return cls(0.5 * (lo + hi), 0.5 * (hi - lo))

    @property
    def lo(self) -> float:
        return self.center - self.radius

    @property
    def hi(self) -> float:
        return self.center + self.radius

    def contains(self, other: "Interval", margin: float = 0.0) -> bool:
        return other.lo >= self.lo + margin and other.hi <= self.hi - margin

    def gap(self, other: "Interval") -> float:
        """Signed distance between closures; negative when they overlap."""
        return max(other.lo - self.hi, self.lo - other.hi)

    def to_unit(self, y):
        return (np.asarray(y) - self.center) / self.radius

    def from_unit(self, x):
        return self.center + self.radius * np.asarray(x)


def moebius_apply(g: MoebiusTransform, x: float) -> float:
    """Extended action of ``g`` on R u {inf}; either signed infinity means inf."""
    if math.isinf(x):
        return INF if g.c == 0 else g.a / g.c
    den = g.c * x + g.d
    if den == 0:
        return INF
    return (g.a * x + g.b) / den


def moebius_derivative(g: MoebiusTransform, x: float) -> float:
    den = g.c * x + g.d
    if abs(den) < POLE_TOL:
        raise PoleAtPoint(f"derivative undefined at pole x={x!r}")
    return g.det / (den * den)


def compose(g: MoebiusTransform, h: MoebiusTransform) -> MoebiusTransform:
    return g.compose(h)


def inverse(g: MoebiusTransform) -> MoebiusTransform:
    return g.inverse()


def generator_S(l: float, a: float) -> MoebiusTransform:
    """Hyperbolic generator with translation length ``l`` and fixed points ``+-a``."""
    if not l > 0:
        raise InvalidParameter(f"length must be positive, got {l!r}")
    if a == 0:
        raise InvalidParameter("parameter a must be nonzero")
    ch, sh = math.cosh(l / 2), math.sinh(l / 2)
    return MoebiusTransform(ch, a * sh, sh / a, ch)


def rotation(psi: float) -> MoebiusTransform:
    c, s = math.cos(psi), math.sin(psi)
    return MoebiusTransform(c, -s, s, c)


def isometric_disk(g: MoebiusTransform) -> Interval:
    """Real trace of the disk ``|cz + d| < sqrt(det)``, on whose complement ``g`` contracts."""
    if abs(g.c) < POLE_TOL:
        raise AffineGenerator("affine map has no bounded isometric disk; conjugate the data first")
    return Interval(-g.d / g.c, math.sqrt(g.det) / abs(g.c))


def map_interval(g: MoebiusTransform, interval: Interval) -> Interval:
    pole = g.pole()
    if math.isfinite(pole) and abs(pole - interval.center) <= interval.radius:
        raise PoleInsideInterval(
            f"pole {pole!r} of the map lies in [{interval.lo!r}, {interval.hi!r}]"
        )
    return Interval.from_endpoints(moebius_apply(g, interval.lo), moebius_apply(g, interval.hi))
