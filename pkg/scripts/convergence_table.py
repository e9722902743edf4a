"""Convergence of the transfer determinant of X(10,10,10) in N and n, against the orbit expansion."""

from schottky_zeta.orbit_oracle import zeta_poe
from schottky_zeta.schottky import three_funnel
from schottky_zeta.transfer import lparts, zeta

POINTS = (0.3, 0.3 + 5j, -0.5 + 2j)


def main():
    data = three_funnel(10, 10, 10)
    reference = {s: zeta_poe(data, s, 12) for s in POINTS}
    print(f"{'n':>2} {'N':>3} {'precision':>9} " + " ".join(f"{str(s):>14}" for s in POINTS))
    for n in (0, 1, 2):
        for N in (8, 12, 16, 24):
            for precision in ("double", "extended"):
                if n == 2 and precision == "extended" and N > 16:
                    continue
                parts = lparts(data, N, n, precision=precision)
                errs = [abs(zeta(parts, s).to_complex() - reference[s]) for s in POINTS]
                print(f"{n:2d} {N:3d} {precision:>9} " + " ".join(f"{e:14.2e}" for e in errs))


if __name__ == "__main__":
    main()
