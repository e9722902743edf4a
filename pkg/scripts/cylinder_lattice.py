"""Resonances of the hyperbolic cylinder of funnel width 4 against the analytic lattice."""

import math
import time

from schottky_zeta.config import RunConfig
from schottky_zeta.zerofinder import find_resonances


def main():
    cfg = RunConfig()
    for key, value in {
        "surface.type": "cylinder",
        "surface.lengths": "4",
        "disc.N": "16",
        "disc.refinement": "0",
        "search.re_min": "-2.5",
        "search.re_max": "0.5",
        "search.im_min": "-6.8",
        "search.im_max": "6.8",
        "search.seed_re": "-0.5, -1.5, -2.5",
        "search.seed_spacing": "0.1",
    }.items():
        cfg.set(key, value)
    start = time.perf_counter()
    found = find_resonances(cfg.validate())
    print(f"{len(found)} zeros in {time.perf_counter() - start:.1f}s")
    print(f"{'s':>24} {'lattice error':>14} {'winding':>8} {'topological':>12}")
    for r in found:
        k, m = round(-r.s.real), round(r.s.imag / (math.pi / 2))
        error = abs(r.s - complex(-k, m * math.pi / 2))
        print(f"{r.s.real:11.7f}{r.s.imag:+12.7f}i {error:14.2e} {r.multiplicity:8d} {str(r.topological_flag):>12}")


if __name__ == "__main__":
    main()
