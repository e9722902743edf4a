"""Command-line frontend.

Commands read a flat ``key = value`` config (``--config``) with repeatable
``--set key=value`` overrides and write CSV to ``output.path`` (``-`` for
stdout). Every CSV opens with a ``#`` metadata block echoing the full config.

Exit codes: 0 success, 1 invalid configuration or Schottky data,
2 computation error, 3 method comparison failed.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import sys

import numpy as np

from . import __version__
from . import config as config_mod
from .errors import ConfigError, InvalidParameter, OverlappingDisks, ResonanceError

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_COMPARE = 0, 1, 2, 3
COMMANDS = ("validate", "zeta-grid", "resonances", "lengths", "compare")


def fmt(x: float) -> str:
    return f"{x:.17g}"


@contextlib.contextmanager
def _output(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _write_csv(cfg, command: str, header: list, rows):
    with _output(cfg.output.path) as fh:
        fh.write(f"# schottky-zeta {__version__}\n")
        fh.write(f"# command = {command}\n")
        for key, value in cfg.items():
            fh.write(f"# {key} = {value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _parts(cfg, data):
    from .transfer import lparts

    return lparts(data, cfg.disc.N, cfg.disc.refinement, precision=cfg.disc.precision)


def cmd_validate(cfg) -> int:
    from .schottky import validate

    data = cfg.surface.build(check=False)
    report = validate(data)
    print(f"surface {data.label}: q = {data.q}")
    for k in data.letters:
        iv = data.interval(k)
        print(f"  I[{k:+d}] center {fmt(iv.center)} radius {fmt(iv.radius)}")
    if not report:
        print("valid")
        return EXIT_OK
    print(f"invalid: {len(report)} violation(s)")
    for v in report:
        print(f"  {v}")
    return EXIT_CONFIG


def cmd_zeta_grid(cfg) -> int:
    from .transfer import zeta
    from .zerofinder import _map, worker_count

    parts = _parts(cfg, cfg.surface.build())
    s = cfg.search
    res = np.linspace(s.re_min, s.re_max, cfg.grid.re_steps)
    ims = np.linspace(s.im_min, s.im_max, cfg.grid.im_steps)
    points = [complex(x, y) for x in res for y in ims]
    values = _map(lambda p: zeta(parts, p, cfg.disc.dense_cutoff), points, worker_count())
    rows = [[fmt(p.real), fmt(p.imag), fmt(v.log_modulus), fmt(v.phase)] for p, v in zip(points, values)]
    _write_csv(cfg, "zeta-grid", ["re_s", "im_s", "log_abs_Z", "arg_Z"], rows)
    return EXIT_OK


def cmd_resonances(cfg) -> int:
    from .zerofinder import find_resonances

    found = find_resonances(cfg)
    rows = [
        [
            fmt(r.s.real),
            fmt(r.s.imag),
            fmt(r.residual),
            "" if r.multiplicity is None else str(r.multiplicity),
            "1" if r.topological_flag else "0",
            fmt(r.seed.real),
            fmt(r.seed.imag),
        ]
        for r in found
    ]
    header = ["re_s", "im_s", "residual", "multiplicity", "topological", "seed_re", "seed_im"]
    _write_csv(cfg, "resonances", header, rows)
    return EXIT_OK


def cmd_lengths(cfg) -> int:
    from .orbit_oracle import orbit_table

    data = cfg.surface.build()
    rows = []
    for k in range(1, cfg.lengths.max_k + 1):
        table = orbit_table(data, k)
        for word, length, trace in zip(table.words, table.lengths, table.traces):
            rows.append([str(k), " ".join(str(int(x)) for x in word), fmt(length), fmt(trace)])
    _write_csv(cfg, "lengths", ["k", "word", "length", "trace"], rows)
    return EXIT_OK


def compare_rows(cfg, data=None) -> list:
    """``(s, |Z_LC - Z_POE|, log|Z_LC|, log|Z_POE|)`` at every configured test point."""
    from .orbit_oracle import OrbitExpansion
    from .transfer import zeta

    data = cfg.surface.build() if data is None else data
    parts = _parts(cfg, data)
    expansion = OrbitExpansion(data, dps=cfg.oracle.digits)
    out = []
    for s in cfg.oracle.points:
        lc = zeta(parts, s, cfg.disc.dense_cutoff)
        poe = expansion.zeta(s, cfg.oracle.truncation)
        diff = abs(lc.to_complex() - poe)
        log_poe = float(np.log(abs(poe))) if poe != 0 else -np.inf
        out.append((complex(s), diff, lc.log_modulus, log_poe))
    return out


def cmd_compare(cfg) -> int:
    table = compare_rows(cfg)
    rows = [[fmt(s.real), fmt(s.imag), fmt(d), fmt(a), fmt(b)] for s, d, a, b in table]
    _write_csv(cfg, "compare", ["re_s", "im_s", "abs_diff", "log_abs_Z_lc", "log_abs_Z_poe"], rows)
    worst = max(d for _, d, _, _ in table)
    status = "pass" if worst < cfg.oracle.tol else "FAIL"
    print(f"compare: max |Z_LC - Z_POE| = {worst:.3e} (tolerance {cfg.oracle.tol:g}): {status}", file=sys.stderr)
    return EXIT_OK if worst < cfg.oracle.tol else EXIT_COMPARE


HANDLERS = {
    "validate": cmd_validate,
    "zeta-grid": cmd_zeta_grid,
    "resonances": cmd_resonances,
    "lengths": cmd_lengths,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schottky-zeta",
        description="Zeta functions and resonances of Schottky surfaces.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", "-c", help="flat key = value configuration file")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override one setting (repeatable)",
    )
    parser.add_argument("--output", "-o", help="shorthand for --set output.path=PATH")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.output:
        overrides.append(f"output.path={args.output}")
    try:
        cfg = config_mod.load(args.config, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return HANDLERS[args.command](cfg)
    except (ConfigError, InvalidParameter, OverlappingDisks) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResonanceError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
