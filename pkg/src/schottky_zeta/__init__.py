"""Selberg zeta functions and resonances of Schottky surfaces.

``Z(s)`` is computed as the Fredholm determinant of a transfer operator,
discretized by Lagrange-Chebyshev collocation on refined intervals, and
checked against the periodic-orbit expansion.
"""

__version__ = "0.1.0"

from .geometry import MoebiusTransform, Interval, generator_S
from .schottky import (
    SchottkyData,
    funneled_torus,
    hyperbolic_cylinder,
    n_funnel,
    three_funnel,
    validate,
)
from .transfer import ScaledComplex, StaticParts, lparts, zeta
from .orbit_oracle import OrbitExpansion, orbit_table, orbits, trace_power, zeta_poe
from .zerofinder import (
    Resonance,
    ResonanceSet,
    Window,
    find_resonances,
    multiplicity,
    newton_refine,
    scan_line,
)

__all__ = [
    "MoebiusTransform",
    "Interval",
    "generator_S",
    "SchottkyData",
    "funneled_torus",
    "hyperbolic_cylinder",
    "n_funnel",
    "three_funnel",
    "validate",
    "ScaledComplex",
    "StaticParts",
    "lparts",
    "zeta",
    "OrbitExpansion",
    "orbit_table",
    "orbits",
    "trace_power",
    "zeta_poe",
    "Resonance",
    "ResonanceSet",
    "Window",
    "find_resonances",
    "multiplicity",
    "newton_refine",
    "scan_line",
]
