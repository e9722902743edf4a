"""Zeros of ``Z`` in a rectangle: Newton from a seed line, deduplication, winding numbers.

An evaluator is any callable ``s -> ScaledComplex``. Newton works on ``Z``
rescaled by ``exp(-log|Z(s_k)|)`` at the current iterate, which removes
both the exponential growth of ``|Z|`` and any ambiguity in the phase.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import AmbiguousWinding, Diverged, Overflow
from .transfer import ScaledComplex, StaticParts, zeta

ZERO_TOL = 1e-9
STEP_TOL = 1e-10
DEDUP_TOL = 1e-6
FD_STEP = 1e-6
MAX_ITER = 100
TOPOLOGICAL_TOL = 1e-6
WINDING_RADIUS = 1e-2
WINDING_POINTS = 64
WINDING_MAX_POINTS = 8192
WINDING_SLACK = 0.2

Evaluator = Callable[[complex], ScaledComplex]


@dataclass(frozen=True)
class Window:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"empty search window {self}")

    def contains(self, s: complex, margin: float = 0.0) -> bool:
        return (
            self.re_min - margin <= s.real <= self.re_max + margin
            and self.im_min - margin <= s.imag <= self.im_max + margin
        )

    @property
    def margin(self) -> float:
        """Distance an iterate may stray outside before Newton gives up."""
        return 0.5 * max(self.re_max - self.re_min, self.im_max - self.im_min)


@dataclass(frozen=True)
class Resonance:
    s: complex
    residual: float
    multiplicity: int | None = None
    topological_flag: bool = False
    seed: complex = complex("nan")


@dataclass
class ResonanceSet:
    label: str
    N: int
    n: int
    window: Window
    resonances: list = field(default_factory=list)

    def __post_init__(self):
        self.resonances = sort_resonances(self.resonances)

    def __len__(self):
        return len(self.resonances)

    def __iter__(self):
        return iter(self.resonances)

    @property
    def points(self) -> np.ndarray:
        return np.array([r.s for r in self.resonances], dtype=complex)


def sort_resonances(resonances) -> list:
    return sorted(resonances, key=lambda r: (-r.s.real, r.s.imag))


def worker_count() -> int:
    """Thread pool size from ``RESONANCE_THREADS`` (0 or unset: one per CPU)."""
    raw = os.environ.get("RESONANCE_THREADS", "0").strip() or "0"
    n = int(raw)
    return n if n > 0 else (os.cpu_count() or 1)


def parts_evaluator(parts: StaticParts) -> Evaluator:
    return lambda s: zeta(parts, s)


def _scaled_derivative(evaluate: Evaluator, s: complex, h: float, offset: float) -> complex:
    plus = evaluate(s + h).to_complex(offset)
    minus = evaluate(s - h).to_complex(offset)
    return (plus - minus) / (2 * h)


def newton_residual(evaluate: Evaluator, s: complex, fd_step: float = FD_STEP) -> float:
    """Scale-free residual ``|Z / Z'|``: the Newton estimate of the distance to the nearest zero."""
    z = evaluate(s)
    if z.log_modulus == -math.inf:
        return 0.0
    h = fd_step * (1 + abs(s))
    dz = _scaled_derivative(evaluate, s, h, z.log_modulus)
    return abs(z.to_complex(z.log_modulus) / dz) if dz != 0 else math.inf


def newton_refine(
    evaluate: Evaluator,
    s0: complex,
    tol: float = STEP_TOL,
    max_iter: int = MAX_ITER,
    zero_tol: float = ZERO_TOL,
    fd_step: float = FD_STEP,
    window: Window | None = None,
) -> Resonance:
    """Newton iteration ``s <- s - Z/Z'`` with a central-difference derivative.

    Raises :class:`Diverged` on NaN, on leaving ``window`` by more than its
    margin, on overflow of the evaluator, or when ``max_iter`` is exhausted.
    """
    s = complex(s0)
    for _ in range(max_iter):
        try:
            z = evaluate(s)
            if z.log_modulus == -math.inf:
                return Resonance(s, 0.0, seed=complex(s0))
            h = fd_step * (1 + abs(s))
            dz = _scaled_derivative(evaluate, s, h, z.log_modulus)
        except Overflow as exc:
            raise Diverged(f"seed {s0}: {exc}") from exc
        if dz == 0 or not np.isfinite(dz):
            raise Diverged(f"seed {s0}: vanishing or non-finite derivative at {s}")
        step = z.to_complex(z.log_modulus) / dz
        s = s - step
        if not np.isfinite(s):
            raise Diverged(f"seed {s0}: iterate became non-finite")
        if window is not None and not window.contains(s, window.margin):
            raise Diverged(f"seed {s0}: iterate {s} left the search window")
        if abs(step) < tol:
            try:
                residual = newton_residual(evaluate, s, fd_step)
            except Overflow as exc:
                raise Diverged(f"seed {s0}: {exc}") from exc
            if residual < zero_tol:
                return Resonance(s, residual, seed=complex(s0))
    raise Diverged(f"seed {s0}: no convergence after {max_iter} iterations")


def dedup(resonances, tol: float = DEDUP_TOL) -> list:
    """Keep the first of any zeros closer than ``tol (1 + |s|)``; order is preserved."""
    kept = []
    for r in resonances:
        if all(abs(r.s - k.s) >= tol * (1 + abs(k.s)) for k in kept):
            kept.append(r)
    return kept


def seed_line(c: float, im_range, spacing: float) -> list:
    if not spacing > 0:
        raise ValueError("seed spacing must be positive")
    lo, hi = im_range
    m_lo, m_hi = math.ceil(lo / spacing - 1e-9), math.floor(hi / spacing + 1e-9)
    return [complex(c, m * spacing) for m in range(m_lo, m_hi + 1)]


def _map(fn, items, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def scan_line(
    evaluate: Evaluator,
    c: float,
    im_range,
    spacing: float,
    window: Window,
    tol: float = STEP_TOL,
    max_iter: int = MAX_ITER,
    zero_tol: float = ZERO_TOL,
    fd_step: float = FD_STEP,
    dedup_tol: float = DEDUP_TOL,
    workers: int | None = None,
    label: str = "",
    N: int = 0,
    n: int = 0,
) -> ResonanceSet:
    """Newton from every seed ``c + i m spacing`` in ``im_range``; converged zeros inside ``window``."""

    def run(seed):
        try:
            return newton_refine(evaluate, seed, tol, max_iter, zero_tol, fd_step, window)
        except Diverged:
            return None

    seeds = seed_line(c, im_range, spacing)
    found = _map(run, seeds, worker_count() if workers is None else workers)
    inside = [r for r in found if r is not None and window.contains(r.s)]
    return ResonanceSet(label, N, n, window, dedup(inside, dedup_tol))


def winding_number(
    evaluate: Evaluator,
    center: complex,
    radius: float,
    points: int = WINDING_POINTS,
    max_points: int = WINDING_MAX_POINTS,
) -> float:
    """Total phase change of ``Z`` around the circle, in turns.

    The contour is refined by doubling until no phase increment exceeds
    ``pi/4``, so that unwrapping each increment to ``(-pi, pi]`` is safe.
    """
    phases = None
    while True:
        t = 2 * math.pi * np.arange(points) / points
        if phases is None:
            phases = np.array([evaluate(center + radius * np.exp(1j * a)).phase for a in t])
        else:
            # reuse the even points from the coarser contour
            odd = np.array([evaluate(center + radius * np.exp(1j * a)).phase for a in t[1::2]])
            merged = np.empty(points)
            merged[0::2], merged[1::2] = phases, odd
            phases = merged
        steps = np.diff(np.append(phases, phases[0]))
        steps = np.angle(np.exp(1j * steps))
        if np.max(np.abs(steps)) <= math.pi / 4 or points >= max_points:
            return float(np.sum(steps) / (2 * math.pi))
        points *= 2


def multiplicity(
    evaluate: Evaluator,
    s0: complex,
    radius: float = WINDING_RADIUS,
    points: int = WINDING_POINTS,
    max_points: int = WINDING_MAX_POINTS,
) -> int:
    """Winding number of ``Z`` around ``s0``, rounded; :class:`AmbiguousWinding` if not near an integer."""
    w = winding_number(evaluate, s0, radius, points, max_points)
    k = round(w)
    if abs(w - k) > WINDING_SLACK:
        raise AmbiguousWinding(f"winding {w:.3f} around {s0} (radius {radius}) is not near an integer")
    return int(k)


def is_topological(s: complex, tol: float = TOPOLOGICAL_TOL) -> bool:
    """True when ``s`` lies within ``tol`` of a nonpositive integer."""
    return s.real < tol and abs(s - round(s.real)) < tol


def annotate(
    evaluate: Evaluator,
    resonances,
    radius: float = WINDING_RADIUS,
    workers: int | None = None,
    with_multiplicity: bool = True,
) -> list:
    """Set multiplicities (winding radius shrunk below neighbour spacing) and topological flags."""
    resonances = list(resonances)
    pts = np.array([r.s for r in resonances], dtype=complex)

    def run(i):
        r = resonances[i]
        mult = None
        if with_multiplicity:
            others = np.delete(pts, i)
            gap = float(np.min(np.abs(others - r.s))) if len(others) else math.inf
            mult = multiplicity(evaluate, r.s, min(radius, gap / 2.5))
        return Resonance(r.s, r.residual, mult, is_topological(r.s), r.seed)

    return _map(run, list(range(len(resonances))), worker_count() if workers is None else workers)


def bisect_real_zero(evaluate: Evaluator, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Sign change of the real ``Z`` on ``[lo, hi]``, located by bisection."""

    def sign(x):
        z = evaluate(complex(x, 0.0))
        return 0 if z.log_modulus == -math.inf else (1 if math.cos(z.phase) > 0 else -1)

    slo, shi = sign(lo), sign(hi)
    if slo == 0:
        return lo
    if shi == 0:
        return hi
    if slo == shi:
        raise ValueError(f"no sign change of Z on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        sm = sign(mid)
        if sm == 0:
            return mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def default_seed_re(evaluate: Evaluator, window: Window) -> float:
    """``delta + 0.1`` when a sign change of real ``Z`` locates ``delta`` in ``(0, 2)``, else ``re_max``."""
    try:
        delta = bisect_real_zero(evaluate, 1e-3, 2.0, tol=1e-6)
    except (ValueError, Overflow):
        return window.re_max
    return min(window.re_max, delta) + 0.1


def find_resonances(config, parts: StaticParts | None = None) -> ResonanceSet:
    """Build the operator once, scan every seed line, then classify each zero."""
    from .transfer import lparts

    data = config.surface.build()
    disc = config.disc
    if parts is None:
        parts = lparts(data, disc.N, disc.refinement, precision=disc.precision)
    evaluate = lambda s: zeta(parts, s, disc.dense_cutoff)  # noqa: E731
    search, newton = config.search, config.newton
    window = search.window()
    lines = list(search.seed_re) or [default_seed_re(evaluate, window)]
    found = []
    for c in lines:
        found += scan_line(
            evaluate,
            c,
            (search.im_min, search.im_max),
            search.seed_spacing,
            window,
            tol=newton.tol,
            max_iter=newton.max_iter,
            zero_tol=newton.zero_tol,
            fd_step=newton.fd_step,
            dedup_tol=config.dedup.tol,
        ).resonances
    found = dedup(found, config.dedup.tol)
    annotated = annotate(evaluate, found, search.winding_radius, with_multiplicity=search.multiplicity)
    return ResonanceSet(data.label, disc.N, disc.refinement, window, annotated)
