"""Inner length of the symmetric 4-funnel and the largest real zero for widths 1.

The dimension run at refinement 3 takes about half a minute per order; pass a
list of orders on the command line to change them (default: 4 6).
"""

import sys
import time

from schottky_zeta.schottky import n_funnel, symmetric_inner_lengths
from schottky_zeta.transfer import lparts
from schottky_zeta.zerofinder import bisect_real_zero, parts_evaluator


def main(orders=(4, 6)):
    print(f"widths 3: inner length {symmetric_inner_lengths([3, 3, 3, 3])[0]:.7f}")
    data = n_funnel([1, 1, 1, 1])
    for N in orders:
        start = time.perf_counter()
        parts = lparts(data, N, 3)
        delta = bisect_real_zero(parts_evaluator(parts), 0.5, 0.99, tol=1e-8)
        print(f"widths 1, n=3, N={N} (dim {parts.dim}): delta = {delta:.7f}, {time.perf_counter() - start:.0f}s")


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or (4, 6))
