"""Schottky data for the surface families: cylinders, n-funnel surfaces, funneled tori.

Disks are always taken to be isometric disks: ``D_k`` is the disk on whose
complement ``S_k`` contracts, so ``S_k`` maps the exterior of ``D_k`` into
``D_{-k}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidParameter, NoConvergence, OverlappingDisks
from .geometry import (
    Interval,
    MoebiusTransform,
    generator_S,
    isometric_disk,
    moebius_apply,
    rotation,
)

VALIDATION_MARGIN = 1e-10


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: tuple
    margin: float

    def __str__(self):
        return f"{self.kind} at {self.indices}: margin {self.margin:.3e}"


@dataclass(frozen=True)
class SchottkyData:
    """Generators ``S_1..S_q`` and the intervals ``I_k`` for ``k`` in ``{+-1..+-q}``."""

    generators: tuple
    intervals: dict = field(compare=False)
    label: str = ""

    @classmethod
    def from_generators(cls, generators: Sequence[MoebiusTransform], label: str = "") -> "SchottkyData":
        gens = tuple(generators)
        intervals = {}
        for k, g in enumerate(gens, start=1):
            intervals[k] = isometric_disk(g)
            intervals[-k] = isometric_disk(g.inverse())
        return cls(gens, intervals, label)

    @property
    def q(self) -> int:
        return len(self.generators)

    @property
    def letters(self) -> list:
        """The index set ``[-q, ..., -1, 1, ..., q]``."""
        return list(range(-self.q, 0)) + list(range(1, self.q + 1))

    @property
    def euler_characteristic(self) -> int:
        return 1 - self.q

    def generator(self, k: int) -> MoebiusTransform:
        if k == 0 or abs(k) > self.q:
            raise InvalidParameter(f"letter {k} outside +-1..+-{self.q}")
        g = self.generators[abs(k) - 1]
        return g if k > 0 else g.inverse()

    def interval(self, k: int) -> Interval:
        return self.intervals[k]

    def is_valid(self) -> bool:
        return not validate(self)


def validate(data: SchottkyData) -> list:
    """List every violated invariant; an empty list means the data are valid."""
    report = []
    letters = data.letters
    for i, j in ((i, j) for i in letters for j in letters if i < j):
        gap = data.intervals[i].gap(data.intervals[j])
        if gap <= VALIDATION_MARGIN:
            report.append(Violation("overlap", (i, j), gap))
    for k in letters:
        g = data.generator(k)
        target = data.intervals[-k]
        for j in letters:
            if j == k:
                continue
            src = data.intervals[j]
            pole = g.pole()
            if math.isfinite(pole) and abs(pole - src.center) <= src.radius:
                report.append(Violation("pole-in-interval", (k, j), abs(pole - src.center) - src.radius))
                continue
            images = [moebius_apply(g, src.lo), moebius_apply(g, src.hi)]
            margin = min(min(y - target.lo, target.hi - y) for y in images)
            if not margin > VALIDATION_MARGIN:
                report.append(Violation("image-not-inside", (k, j), margin))
    return report


def checked(data: SchottkyData) -> SchottkyData:
    """``data`` itself, or :class:`OverlappingDisks` listing every violation."""
    report = validate(data)
    if report:
        raise OverlappingDisks(
            f"invalid Schottky data {data.label}: " + "; ".join(map(str, report)), report
        )
    return data


def hyperbolic_cylinder(length: float) -> SchottkyData:
    if not length > 0:
        raise InvalidParameter("cylinder length must be positive")
    return SchottkyData.from_generators([generator_S(length, 1.0)], f"cylinder({length:g})")


def waist_function_A(l1: float, l2: float, l3: float) -> float:
    """Parameter ``a`` of the second generator making the third funnel width ``l3``."""
    if min(l1, l2, l3) <= 0:
        raise InvalidParameter("funnel widths must be positive")
    d = (math.cosh(l1 / 2) * math.cosh(l2 / 2) + math.cosh(l3 / 2)) / (
        math.sinh(l1 / 2) * math.sinh(l2 / 2)
    )
    # d - sqrt(d^2 - 1) == 1 / (d + sqrt(d^2 - 1)), the latter without cancellation
    return 1.0 / (d + math.sqrt(d * d - 1.0))


def three_funnel(l1: float, l2: float, l3: float) -> SchottkyData:
    gens = [generator_S(l1, 1.0), generator_S(l2, waist_function_A(l1, l2, l3))]
    return checked(SchottkyData.from_generators(gens, f"X({l1:g},{l2:g},{l3:g})"))


def _chain_parameters(widths, ls) -> list:
    """Fixed-point parameters ``a_k`` of the generator chain, built multiplicatively."""
    a = [1.0]
    for k in range(len(ls) - 1):
        a.append(waist_function_A(ls[k], ls[k + 1], widths[k + 1]) * a[k])
    return a


def _chain_generators(widths, ls):
    return [generator_S(l, ak) for l, ak in zip(ls, _chain_parameters(widths, ls))]


def waist_mismatch(widths, inner) -> np.ndarray:
    """Length of ``S_{k-1} S_{k+1}^-1`` minus ``l_k`` for every inner generator ``k``.

    The trace ``2 ch ch' - sh sh' (a/a' + a'/a)`` is evaluated from the
    parameters rather than from matrices, since generators with long
    translation lengths cannot be stored with a positive rounded determinant.
    """
    ls = [widths[0], *inner, widths[-1]]
    a = _chain_parameters(widths, ls)
    out = []
    for k in range(1, len(ls) - 1):
        l1, l2 = ls[k - 1] / 2, ls[k + 1] / 2
        ratio = a[k - 1] / a[k + 1]
        trace = 2 * math.cosh(l1) * math.cosh(l2) - math.sinh(l1) * math.sinh(l2) * (ratio + 1 / ratio)
        out.append(2.0 * math.acosh(max(1.0, abs(trace) / 2.0)) - ls[k])
    return np.array(out)


def _bisect(f, lo, hi, tol):
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoConvergence(f"waist equation not bracketed on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def symmetric_inner_lengths(widths, tol=1e-10, max_sweeps=200) -> list:
    """Tune the inner generator lengths until each waist pair has equal length."""
    n = len(widths)
    top = max(widths)
    lo, hi = top, 4.0 * top
    inner = [0.5 * (lo + hi)] * (n - 3)
    for _ in range(max_sweeps):
        previous = list(inner)
        for k in range(n - 3):
            def f(x, k=k):
                trial = list(inner)
                trial[k] = x
                return waist_mismatch(widths, trial)[k]

            inner[k] = _bisect(f, lo, hi, tol)
        if max((abs(x - y) for x, y in zip(inner, previous)), default=0.0) <= tol:
            return inner
    raise NoConvergence(f"waist sweep did not settle after {max_sweeps} sweeps on [{lo}, {hi}]")


def n_funnel(widths: Sequence[float], inner_l: Sequence[float] | None = None) -> SchottkyData:
    """Surface with ``n`` funnels built from a chain of ``n - 1`` generators.

    The first and last generator lengths are the outer funnel widths; funnel
    ``k + 1`` sits between generators ``k`` and ``k + 1``. Without ``inner_l``
    the inner lengths are tuned for symmetry, which needs equal widths.
    """
    widths = [float(w) for w in widths]
    n = len(widths)
    if n < 3:
        raise InvalidParameter("need at least three funnels")
    if min(widths) <= 0:
        raise InvalidParameter("funnel widths must be positive")
    if inner_l is None:
        if n > 3 and max(widths) - min(widths) > 0:
            raise InvalidParameter("automatic symmetrization needs equal widths; pass inner_l")
        inner = symmetric_inner_lengths(widths) if n > 3 else []
    else:
        inner = [float(x) for x in inner_l]
        if len(inner) != n - 3:
            raise InvalidParameter(f"expected {n - 3} inner lengths, got {len(inner)}")
    ls = [widths[0], *inner, widths[-1]]
    gens = _chain_generators(widths, ls)
    label = "funnels(" + ",".join(f"{w:g}" for w in widths) + ")"
    return checked(SchottkyData.from_generators(gens, label))


def _torus_generators(l1, l2, phi, psi):
    e = math.exp(l1 / 2)
    ch, sh = math.cosh(l2 / 2), math.sinh(l2 / 2)
    t1 = MoebiusTransform(e, 0.0, 0.0, 1.0 / e)
    t2 = MoebiusTransform(ch - math.cos(phi) * sh, math.sin(phi) ** 2 * sh, sh, ch + math.cos(phi) * sh)
    r, rinv = rotation(psi), rotation(-psi)
    return [r @ t1 @ rinv, r @ t2 @ rinv]


def funneled_torus(
    l1: float, l2: float, phi: float, psi: float = math.pi / 8, check: bool = True
) -> SchottkyData:
    """Torus with one funnel; generators conjugated by the rotation ``R(psi)``.

    With ``check=False`` invalid (overlapping) data are returned for inspection
    instead of raising :class:`OverlappingDisks`.
    """
    if min(l1, l2) <= 0 or not 0 < phi < math.pi:
        raise InvalidParameter("need l1, l2 > 0 and 0 < phi < pi")
    data = SchottkyData.from_generators(_torus_generators(l1, l2, phi, psi), f"Y({l1:g},{l2:g},{phi:g})")
    return checked(data) if check else data
