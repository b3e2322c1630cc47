"""Command line interface.

Subcommands::

    waveobs analyze  REGION [--n N] [--supersample S] [--estimate] [--modes M]
                     [--seed K] [--format text|json] [--out FILE]
    waveobs witness  REGION [--n N] [--supersample S] [--out PREFIX]
    waveobs render   REGION [--n N] [--supersample S] [--out FILE.pgm]
                     [--components] [--characteristics K]
    waveobs simulate REGION (--data FILE | --witness) [--n N] [--supersample S]
                     [--export PREFIX] [--dump]

Exit codes of ``analyze``: 0 observable, 10 not observable,
11 indeterminate at this resolution, 2 input error.
``witness`` refuses (exit 1) when the region is observable.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import numpy as np

from . import __version__
from .dsl import DslError, parse_region_file, serialize_region
from .io import write_pgm, write_series_csv, write_state_csv, write_trajectory
from .regions import RasterMask, rasterize
from .report import build_report
from .verdict import INDETERMINATE, NO, YES, Verdict, classify
from .wavelab import (
    WaveState,
    conservation_functional,
    observed_energy,
    solve_free_wave,
)

EXIT_OBSERVABLE = 0
EXIT_NOT_OBSERVABLE = 10
EXIT_INDETERMINATE = 11
EXIT_INPUT_ERROR = 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("region", help="region DSL file")
    p.add_argument("--n", type=int, default=256, help="space bins (default 256)")
    p.add_argument("--supersample", type=int, default=4,
                   help="antialias samples per cell side (default 4)")
    p.add_argument("--seed", type=int, default=0, help="seed recorded in reports")


def _load(args) -> tuple:
    region = parse_region_file(args.region)
    mask = rasterize(region, n=args.n, supersample=args.supersample)
    return region, mask


def cmd_analyze(args) -> int:
    region, mask = _load(args)
    modes = [args.modes // 4, args.modes // 2, args.modes] if args.estimate else None
    verdict = classify(mask, estimate_modes=modes)
    report = build_report(serialize_region(region), verdict, args.seed, __version__)
    text = report.to_json() if args.format == "json" else report.to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if verdict.observable == YES:
        return EXIT_OBSERVABLE
    if verdict.observable == NO:
        return EXIT_NOT_OBSERVABLE
    return EXIT_INDETERMINATE


def cmd_witness(args) -> int:
    region, mask = _load(args)
    verdict = classify(mask)
    if verdict.observable == YES:
        sys.stderr.write("region is observable: no defeating witness exists\n")
        return 1
    if verdict.witness_state is None:
        sys.stderr.write("verdict is indeterminate at this resolution; "
                         "refusing to emit a witness\n")
        return 1
    state = verdict.witness_state
    res = state.res
    prefix = args.out or "witness"
    write_state_csv(f"{prefix}.csv", res.x_centers(), state.u0x, state.u1)
    summary = _simulate_summary(state, mask if res.n == mask.res.n else
                                rasterize(region, res=res, supersample=args.supersample))
    sys.stdout.write(
        f"witness written to {prefix}.csv\n"
        f"total energy     : {summary['total']:.12g}\n"
        f"observed energy  : {summary['observed']:.12g}\n"
        f"observed/total   : {summary['ratio']:.3e}\n"
    )
    return 0


def _simulate_summary(state: WaveState, mask: RasterMask) -> dict:
    traj = solve_free_wave(state)
    total = state.energy
    observed = observed_energy(traj, mask)
    return {"total": total, "observed": observed,
            "ratio": observed / total if total else 0.0}


def cmd_render(args) -> int:
    region, mask = _load(args)
    out = args.out or "region.pgm"
    img = mask.w.copy()
    if args.components:
        from .fibers import fiber_profiles
        from .symmetry import build_fiber_graph

        graph = build_fiber_graph(fiber_profiles(mask))
        k = max(1, graph.component_count)
        nt, n = mask.w.shape
        i = np.arange(nt)[:, None]
        j = np.arange(n)[None, :]
        labels = graph.labels_xi[(i + j) % n]
        shade = np.where(labels >= 0, (labels + 1.0) / (k + 1.0), 1.0)
        img = np.where(mask.w > 0.5, shade, 0.0)
    if args.characteristics:
        nt, n = mask.w.shape
        step = max(1, n // args.characteristics)
        i = np.arange(nt)[:, None]
        for j0 in range(0, n, step):
            img[i, (j0 + i) % n] = 1.0
            img[i, (j0 - i) % n] = 1.0
    write_pgm(out, img)
    sys.stdout.write(f"render written to {out}\n")
    return 0


def cmd_simulate(args) -> int:
    region, mask = _load(args)
    res = mask.res
    if args.witness:
        verdict = classify(mask)
        if verdict.witness_state is None or verdict.witness_state.res.n != res.n:
            sys.stderr.write("no grid-compatible witness for this region\n")
            return 1
        state = verdict.witness_state
        if verdict.witness is not None:
            a_bins = verdict.witness.a_bins
            b_bins = verdict.witness.b_bins
        else:
            a_bins = np.ones(res.n, dtype=bool)
            b_bins = np.ones(res.n, dtype=bool)
    else:
        from .io import read_state_csv

        u0x, u1 = read_state_csv(args.data)
        if u0x.size != res.n:
            sys.stderr.write(
                f"data has {u0x.size} samples but the grid needs {res.n}\n"
            )
            return 1
        state = WaveState(u0x, u1, res)
        a_bins = np.ones(res.n, dtype=bool)
        b_bins = np.ones(res.n, dtype=bool)
    traj = solve_free_wave(state)
    energies = traj.energy_series()
    i_series = conservation_functional(traj, a_bins, b_bins)
    ut_mid = 0.5 * (traj.u_t[:-1] + traj.u_t[1:])
    per_step = (mask.w * ut_mid**2).sum(axis=1) * res.dt * res.dx
    observed_cum = np.concatenate(([0.0], np.cumsum(per_step)))
    prefix = args.export or "series"
    write_series_csv(f"{prefix}.csv", res.t_nodes(), energies, i_series, observed_cum)
    sys.stdout.write(f"series written to {prefix}.csv\n")
    if args.dump:
        write_trajectory(f"{prefix}.traj", [traj.u_t, traj.u_x], res.dt)
        sys.stdout.write(f"trajectory written to {prefix}.traj\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waveobs",
        description="Spacetime observability analysis for waves on the circle",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify a region")
    _add_common(p)
    p.add_argument("--estimate", action="store_true",
                   help="attach the quantitative estimator")
    p.add_argument("--modes", type=int, default=32,
                   help="estimator trial-space order (default 32)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="write the report to a file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("witness", help="emit data defeating observability")
    _add_common(p)
    p.add_argument("--out", help="output prefix (default 'witness')")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("render", help="render the region to a PGM image")
    _add_common(p)
    p.add_argument("--out", help="output file (default 'region.pgm')")
    p.add_argument("--components", action="store_true",
                   help="shade symmetry components")
    p.add_argument("--characteristics", type=int, default=0,
                   help="overlay this many sample characteristics per family")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("simulate", help="evolve data and export time series")
    _add_common(p)
    p.add_argument("--data", help="CSV with columns x,u0x,u1")
    p.add_argument("--witness", action="store_true",
                   help="simulate the region's own witness")
    p.add_argument("--export", help="output prefix (default 'series')")
    p.add_argument("--dump", action="store_true", help="also write a binary dump")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and not args.witness and not args.data:
        sys.stderr.write("simulate needs --data FILE or --witness\n")
        return EXIT_INPUT_ERROR
    try:
        return args.func(args)
    except (DslError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
