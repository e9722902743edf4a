"""Winding numbers of resonances for a symmetric and a slightly perturbed three-funnel surface."""

import sys
import time

from schottky_zeta.config import RunConfig
from schottky_zeta.schottky import three_funnel
from schottky_zeta.transfer import lparts
from schottky_zeta.zerofinder import bisect_real_zero, find_resonances, parts_evaluator


def scan(lengths, N=16, im_max=12.0):
    parts = lparts(three_funnel(*lengths), N, 1)
    delta = bisect_real_zero(parts_evaluator(parts), 0.01, 1.0, tol=1e-10)
    cfg = RunConfig()
    for key, value in {
        "surface.lengths": ", ".join(map(str, lengths)),
        "disc.N": str(N),
        "search.re_min": "-1",
        "search.re_max": str(delta + 0.05),
        "search.im_min": "0",
        "search.im_max": str(im_max),
        "search.seed_re": str(delta + 0.1),
        "search.seed_spacing": "0.05",
    }.items():
        cfg.set(key, value)
    return delta, find_resonances(cfg.validate(), parts)


def main(im_max=12.0):
    for lengths in ((7, 7, 7), (10, 10, 10.2)):
        start = time.perf_counter()
        delta, found = scan(lengths, im_max=im_max)
        print(f"X{lengths}: delta = {delta:.8f}, {len(found)} zeros, {time.perf_counter() - start:.1f}s")
        for r in found:
            mark = "  <- double" if r.multiplicity == 2 else ""
            print(f"  {r.s.real:11.6f}{r.s.imag:+11.6f}i  winding {r.multiplicity}{mark}")


if __name__ == "__main__":
    main(*(float(a) for a in sys.argv[1:2]))
