"""Command-line front end: place, field, compare.

fieldplace place --synthetic 500 --seed 1 --solver analytic-fast --out-dir out
fieldplace field --synthetic 200 --out-dir out --diff analytic-fast spectral-baseline
fieldplace compare --synthetic 10000 --seeds 1,2,3 --out-dir out
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import export, fastsolve, series
from .density import build_bin_density, exact_density_for
from .legalize import count_overlaps, detailed_swap, legalize_rows
from .netlist import (
    Circuit,
    NetlistError,
    generate_synthetic,
    parse_bookshelf,
    read_placement,
    write_placement,
)
from .placer import (
    SOLVERS,
    PlacerConfig,
    default_bins,
    hpwl,
    run_global_placement,
)


def _add_common(p: argparse.ArgumentParser, repeat_input: bool = False) -> None:
    if repeat_input:
        p.add_argument("--input", action="append", help="Bookshelf .aux file (repeatable)")
    else:
        p.add_argument("--input", help="Bookshelf .aux file")
    p.add_argument("--synthetic", type=int, metavar="N", help="generate N random cells")
    p.add_argument("--nets", type=int, help="net count for --synthetic (default 1.2N)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="fieldplace-out")
    p.add_argument("--bins", type=int, help="density grid side (power of two)")
    p.add_argument("--solver", choices=SOLVERS, default="analytic-fast")
    p.add_argument("--K", type=int, dest="series_order", help="series truncation order")


def _add_placer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--tau", type=float, help="target overflow ratio")
    p.add_argument("--gamma", type=float, help="wirelength smoothing length")
    p.add_argument("--lambda0", type=float, help="initial penalty scale")
    p.add_argument("--lambda-growth", type=float, help="penalty growth per iteration")
    p.add_argument("--max-iters", type=int)
    p.add_argument("--filler-ratio", type=float)


def _load_circuit(args) -> Circuit:
    if args.input:
        return parse_bookshelf(args.input)
    if args.synthetic:
        n_nets = args.nets if args.nets is not None else int(round(1.2 * args.synthetic))
        return generate_synthetic(args.synthetic, n_nets, (100.0, 100.0), args.seed)
    raise SystemExit("need --input or --synthetic")


def _input_name(args) -> str:
    if args.input:
        return os.path.splitext(os.path.basename(args.input))[0]
    return f"synthetic{args.synthetic}-s{args.seed}"


def _make_config(args) -> PlacerConfig:
    overrides = dict(
        target_overflow=args.tau,
        gamma=args.gamma,
        lambda0=args.lambda0,
        lambda_growth=args.lambda_growth,
        max_iters=args.max_iters,
        filler_ratio=args.filler_ratio,
        seed=args.seed,
        bins=args.bins,
        solver=args.solver,
        series_order=args.series_order,
    )
    if args.config:
        return PlacerConfig.from_file(args.config, **overrides)
    return PlacerConfig(**{k: v for k, v in overrides.items() if v is not None})


def write_trace_csv(trace, path: str) -> None:
    with open(path, "w") as fh:
        fh.write("iteration,hpwl,lse,energy,lambda,overflow,wall_ms\n")
        for r in trace:
            fh.write(
                f"{r.iteration},{r.hpwl:.10g},{r.lse:.10g},{r.energy:.10g},"
                f"{r.lam:.10g},{r.overflow:.10g},{r.wall_ms:.3f}\n"
            )


def _positions_from(circuit: Circuit, placement) -> np.ndarray:
    return np.array([placement[b.id] for b in circuit.blocks])


def _run_pipeline(circuit: Circuit, config: PlacerConfig):
    """Global placement, legalization and swap pass; returns a report dict,
    the trace, and the final positions."""
    t0 = time.perf_counter()
    gp_placement, trace = run_global_placement(circuit, config)
    gp_seconds = time.perf_counter() - t0
    gp_pos = _positions_from(circuit, gp_placement)
    gp_hpwl = hpwl(circuit, gp_pos)

    legal = legalize_rows(circuit, gp_pos)
    final = detailed_swap(circuit, legal)
    total_seconds = time.perf_counter() - t0
    report = {
        "blocks": len(circuit.blocks),
        "nets": len(circuit.nets),
        "region_w": circuit.W,
        "region_h": circuit.H,
        "solver": config.solver,
        "seed": config.seed,
        "gp_hpwl": gp_hpwl,
        "final_hpwl": hpwl(circuit, final),
        "gp_seconds": round(gp_seconds, 3),
        "total_seconds": round(total_seconds, 3),
        "iterations": trace[-1].iteration,
        "final_overflow": trace[-1].overflow,
        "converged": int(trace[-1].overflow <= config.target_overflow),
        "overlaps": count_overlaps(circuit, final),
    }
    return report, trace, final


def cmd_place(args) -> int:
    circuit = _load_circuit(args)
    config = _make_config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    report, trace, final = _run_pipeline(circuit, config)

    placement = {b.id: (float(final[i, 0]), float(final[i, 1])) for i, b in enumerate(circuit.blocks)}
    write_placement(circuit, placement, os.path.join(args.out_dir, "placement.pl"))
    write_trace_csv(trace, os.path.join(args.out_dir, "trace.csv"))
    with open(os.path.join(args.out_dir, "report.kv"), "w") as fh:
        for key, val in report.items():
            fh.write(f"{key}={val}\n")

    lines = [
        f"circuit: {_input_name(args)} ({report['blocks']} blocks, {report['nets']} nets, "
        f"region {report['region_w']:g} x {report['region_h']:g})",
        f"solver: {report['solver']}   seed: {report['seed']}",
        f"global placement: HPWL {report['gp_hpwl']:.6g} in {report['gp_seconds']}s, "
        f"{report['iterations']} iterations, overflow {report['final_overflow']:.4f}",
        f"final placement:  HPWL {report['final_hpwl']:.6g} in {report['total_seconds']}s total, "
        f"{report['overlaps']} overlaps",
    ]
    text = "\n".join(lines)
    with open(os.path.join(args.out_dir, "report.txt"), "w") as fh:
        fh.write(text + "\n")
    print(text)
    return 0


def _series_field_map(circuit: Circuit, placement, m: int, order: int) -> fastsolve.FieldMap:
    d = exact_density_for(circuit, placement)
    coeffs = series.exact_coefficients(d, order)
    centers = (np.arange(m) + 0.5) / m
    gx, gy = np.meshgrid(centers * circuit.W, centers * circuit.H, indexing="ij")
    psi = series.eval_potential(coeffs, gx.ravel(), gy.ravel()).reshape(m, m)
    xi_x, xi_y = series.eval_field(coeffs, gx.ravel(), gy.ravel())
    return fastsolve.FieldMap(
        m, psi, xi_x.reshape(m, m), xi_y.reshape(m, m), circuit.W, circuit.H
    )


def _solve_map(circuit: Circuit, placement, grid, solver: str, order: int) -> fastsolve.FieldMap:
    if solver == "analytic-fast":
        return fastsolve.solve_fast(grid)
    if solver == "spectral-baseline":
        return fastsolve.spectral_baseline(grid)
    return _series_field_map(circuit, placement, grid.m, order)


def cmd_field(args) -> int:
    circuit = _load_circuit(args)
    placement = None
    if args.placement:
        placement = read_placement(args.placement, circuit)
    else:
        placement = {b.id: (b.x, b.y) for b in circuit.blocks}
    m = args.bins or default_bins(len(circuit.blocks))
    order = args.series_order or 64
    os.makedirs(args.out_dir, exist_ok=True)

    grid = build_bin_density(placement, circuit, m)
    export.write_grid_csv(grid.values, os.path.join(args.out_dir, "density.csv"))
    export.write_grid_ppm(grid.values, os.path.join(args.out_dir, "density.ppm"))

    solvers = [args.solver] if not args.diff else list(args.diff)
    maps = {}
    for solver in solvers:
        fmap = _solve_map(circuit, placement, grid, solver, order)
        maps[solver] = fmap
        export.write_grid_csv(fmap.psi, os.path.join(args.out_dir, f"psi_{solver}.csv"))
        export.write_grid_ppm(fmap.psi, os.path.join(args.out_dir, f"psi_{solver}.ppm"))
        mag = np.hypot(fmap.xi_x, fmap.xi_y)
        export.write_grid_csv(mag, os.path.join(args.out_dir, f"ximag_{solver}.csv"))
        export.write_grid_ppm(mag, os.path.join(args.out_dir, f"ximag_{solver}.ppm"))

    if args.diff:
        a, b = args.diff
        resid = maps[a].psi - maps[b].psi
        export.write_grid_csv(resid, os.path.join(args.out_dir, f"psi_diff_{a}_vs_{b}.csv"))
        export.write_grid_ppm(resid, os.path.join(args.out_dir, f"psi_diff_{a}_vs_{b}.ppm"))

    if args.dump_coeffs:
        if args.solver == "exact-series":
            coeffs = series.exact_coefficients(exact_density_for(circuit, placement), order)
        else:
            coeffs = fastsolve.scale_coefficients(
                fastsolve.reduced_transform(grid), (circuit.W, circuit.H)
            )
        export.write_grid_csv(coeffs.a, os.path.join(args.out_dir, "coeffs.csv"))
    print(f"field maps written to {args.out_dir} (m={m})")
    return 0


def cmd_compare(args) -> int:
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else [args.seed]
    solvers = args.solvers.split(",") if args.solvers else ["analytic-fast", "spectral-baseline"]
    inputs: list[tuple[str, Circuit, int]] = []
    for aux in args.input or []:
        inputs.append((os.path.splitext(os.path.basename(aux))[0], parse_bookshelf(aux), args.seed))
    if args.synthetic:
        n_nets = args.nets if args.nets is not None else int(round(1.2 * args.synthetic))
        for s in seeds:
            inputs.append(
                (
                    f"synthetic{args.synthetic}-s{s}",
                    generate_synthetic(args.synthetic, n_nets, (100.0, 100.0), s),
                    s,
                )
            )
    if not inputs:
        raise SystemExit("need --input or --synthetic")

    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    for name, circuit, seed in inputs:
        for solver in solvers:
            config = _make_config(args)
            config.solver = solver
            config.seed = seed
            try:
                report, _, _ = _run_pipeline(circuit.clone(), config)
                rows.append((name, solver, report))
            except Exception as exc:  # record, keep going
                rows.append((name, solver, {"error": str(exc)}))

    header = f"{'input':24s} {'solver':18s} {'GP-HPWL':>14s} {'HPWL':>14s} {'GP-CPU':>8s} {'CPU':>8s}"
    print(header)
    lines = [header]
    for name, solver, rep in rows:
        if "error" in rep:
            line = f"{name:24s} {solver:18s} FAILED: {rep['error']}"
        else:
            line = (
                f"{name:24s} {solver:18s} {rep['gp_hpwl']:14.6g} {rep['final_hpwl']:14.6g}"
                f" {rep['gp_seconds']:8.2f} {rep['total_seconds']:8.2f}"
            )
        print(line)
        lines.append(line)

    # Normalized row: geometric-mean ratio per solver against analytic-fast.
    base = {
        name: rep
        for name, solver, rep in rows
        if solver == "analytic-fast" and "error" not in rep
    }
    for solver in solvers:
        ratios = {"gp_hpwl": [], "final_hpwl": [], "total_seconds": []}
        for name, sv, rep in rows:
            if sv != solver or "error" in rep or name not in base:
                continue
            for key in ratios:
                if base[name][key] > 0:
                    ratios[key].append(rep[key] / base[name][key])
        if not ratios["final_hpwl"]:
            continue
        gm = {k: math.exp(np.mean(np.log(v))) if v else float("nan") for k, v in ratios.items()}
        line = (
            f"{'Normalized':24s} {solver:18s} {gm['gp_hpwl']:14.3f} {gm['final_hpwl']:14.3f}"
            f" {'':8s} {gm['total_seconds']:8.3f}"
        )
        print(line)
        lines.append(line)

    with open(os.path.join(args.out_dir, "compare.csv"), "w") as fh:
        fh.write("input,solver,gp_hpwl,final_hpwl,gp_seconds,total_seconds,error\n")
        for name, solver, rep in rows:
            if "error" in rep:
                fh.write(f"{name},{solver},,,,,{rep['error']}\n")
            else:
                fh.write(
                    f"{name},{solver},{rep['gp_hpwl']:.10g},{rep['final_hpwl']:.10g},"
                    f"{rep['gp_seconds']},{rep['total_seconds']},\n"
                )
    with open(os.path.join(args.out_dir, "compare.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="fieldplace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_place = sub.add_parser("place", help="run global placement and legalization")
    _add_common(p_place)
    _add_placer_flags(p_place)
    p_place.set_defaults(func=cmd_place)

    p_field = sub.add_parser("field", help="emit density/potential/field heatmaps")
    _add_common(p_field)
    p_field.add_argument("--placement", help=".pl file with block positions")
    p_field.add_argument("--diff", nargs=2, metavar=("A", "B"), help="emit residual map of two solvers")
    p_field.add_argument("--dump-coeffs", action="store_true")
    p_field.set_defaults(func=cmd_field)

    p_cmp = sub.add_parser("compare", help="run several solvers and tabulate results")
    _add_common(p_cmp, repeat_input=True)
    _add_placer_flags(p_cmp)
    p_cmp.add_argument("--seeds", help="comma-separated seeds for synthetic instances")
    p_cmp.add_argument("--solvers", help="comma-separated solver list")
    p_cmp.set_defaults(func=cmd_compare)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NetlistError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
