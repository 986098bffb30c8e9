"""Command-line surface.

Exit codes: 0 success, 1 acceptance-criterion failure, 2 config error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, ScenarioConfig, config_hash, load_config
from .textio import fnum
from .scenarios import (FIGURE_IDS, export_awg, noise_sweep, run_scenario,
                        scheme_program, write_program_artifacts,
                        write_sweep_csv)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvepulse",
        description="Curve-shaped pulse design, exact qutrit simulation and "
                    "report reproduction.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("config", nargs="?", default=None,
                       help="JSON config file (defaults used when omitted)")
        p.add_argument("--out", default="out", help="output directory")

    for name, desc in (
        ("synthesize", "synthesize the configured scheme's drive program"),
        ("simulate", "synthesize and propagate; write the population trace"),
        ("optimize", "scan the (a, b) landscape and refine the optimum"),
        ("accept", "run the acceptance suite"),
    ):
        add_common(sub.add_parser(name, help=desc))

    p = sub.add_parser("sweep", help="noise sweep of the configured scheme")
    add_common(p)
    p.add_argument("--axis", choices=("delta", "epsilon"), default="delta")

    p = sub.add_parser("reproduce", help="reproduce report figures")
    p.add_argument("figure", choices=FIGURE_IDS + ("all",))
    add_common(p)

    p = sub.add_parser("export-awg", help="export normalized waveform file(s)")
    add_common(p)
    p.add_argument("--program", default=None,
                   help="program CSV to export (default: synthesize from config)")
    p.add_argument("--reference", type=float, default=None,
                   help="normalization reference in rad/s "
                        "(default: the program's own envelope peak)")
    return parser


def _load(args) -> ScenarioConfig:
    if args.config is None:
        return ScenarioConfig()
    return load_config(args.config)


def _run(args) -> int:
    cfg = _load(args)
    prov = config_hash(cfg)
    out = Path(args.out)

    if args.command == "accept":
        from .acceptance import run_all

        results = run_all()
        for res in results:
            print(res.line)
        n_fail = sum(not r.passed for r in results)
        print(f"{len(results) - n_fail}/{len(results)} criteria passed")
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "acceptance.csv", "w", encoding="utf-8") as fh:
            fh.write(f"#provenance,{prov}\n")
            fh.write("criterion,name,passed,elapsed_s,detail\n")
            for r in results:
                detail = r.detail.replace(",", ";")
                fh.write(f"{r.number},{r.name},{int(r.passed)},"
                         f"{fnum(r.elapsed_s)},{detail}\n")
        return 1 if n_fail else 0

    out.mkdir(parents=True, exist_ok=True)

    if args.command == "synthesize":
        program = scheme_program(cfg)
        paths = write_program_artifacts(program, out,
                                        f"program_{cfg.scheme.lower()}", prov)
        if cfg.scheme == "STA_SCQC":
            from .curve import CurveParams, geometry, write_geometry_csv

            geom = geometry(CurveParams(a=cfg.curve_a_over_pi * np.pi,
                                        b=cfg.curve_b))
            geom_path = out / "curve_geometry.csv"
            write_geometry_csv(geom, geom_path, provenance=prov)
            paths.append(geom_path)
        for p in paths:
            print(p)
        return 0

    if args.command == "simulate":
        from . import plotting
        from .qutrit import basis_state, propagate

        program = scheme_program(cfg)
        result = propagate(program, basis_state("+1"))
        csv_path = out / f"simulate_{cfg.scheme.lower()}.csv"
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(f"#provenance,{prov}\n")
            fh.write("t_s,p_plus1,p_zero,p_minus1\n")
            for k in range(len(result.times)):
                fh.write(f"{fnum(result.times[k])},{fnum(result.populations[k, 0])},"
                         f"{fnum(result.populations[k, 1])},"
                         f"{fnum(result.populations[k, 2])}\n")
        svg_path = out / f"simulate_{cfg.scheme.lower()}.svg"
        t_us = result.times * 1e6
        plotting.line_plot(svg_path, [t_us] * 3,
                           [result.p_plus1, result.p_zero, result.p_minus1],
                           ["P+1", "P0", "P-1"], "t (us)", "population",
                           f"{cfg.scheme} populations")
        print(csv_path)
        print(svg_path)
        if cfg.scheme == "STA_SCQC":
            from .diagnostics import (accumulate_m, extract_angles,
                                      infidelity_scaling,
                                      write_diagnostics_csv)

            angles = extract_angles(program)
            ef = accumulate_m(program)
            fit = infidelity_scaling(
                program, 2 * np.pi * 1e3 * np.array([3, 5, 8, 12, 20, 30]))
            diag_path = out / "diagnostics_sta.csv"
            write_diagnostics_csv(
                angles, ef, diag_path,
                summary={"C_first_order": ef.C_first_order,
                         "closure_ratio": ef.closure_ratio,
                         "scaling_exponent": fit.slope},
                provenance=prov)
            print(diag_path)
        return 0

    if args.command == "optimize":
        paths = run_scenario(cfg, ["fig2a"], out)
        for p in paths:
            print(p)
        return 0

    if args.command == "sweep":
        program = scheme_program(cfg)
        if args.axis == "delta":
            report = noise_sweep(program, "delta_rad_s", cfg.delta_grid_rad_s())
        else:
            report = noise_sweep(program, "epsilon", cfg.epsilon_grid.values(),
                                 epsilon_axis=True)
        csv_path = out / f"sweep_{args.axis}_{cfg.scheme.lower()}.csv"
        write_sweep_csv(report, csv_path, prov)
        print(csv_path)
        if report.values.size:
            from . import plotting

            svg_path = out / f"sweep_{args.axis}_{cfg.scheme.lower()}.svg"
            plotting.line_plot(svg_path, [report.values],
                               [report.populations[:, 2]], [cfg.scheme],
                               report.axis_name, "P-1(T)",
                               f"{cfg.scheme} {args.axis} sweep")
            print(svg_path)
        return 0

    if args.command == "reproduce":
        fig_ids = list(FIGURE_IDS) if args.figure == "all" else [args.figure]
        paths = run_scenario(cfg, fig_ids, out)
        for p in paths:
            print(p)
        return 0

    if args.command == "export-awg":
        if args.program is not None:
            from .pulses import read_program_csv

            program = read_program_csv(args.program)
        else:
            program = scheme_program(cfg)
        peak = max(float(np.max(np.abs(program.omega_plus))),
                   float(np.max(np.abs(program.omega_minus))))
        reference = args.reference if args.reference is not None else peak
        paths = export_awg(program, reference, out / "awg_waveform.csv",
                           cfg=cfg, provenance=prov)
        for p in paths:
            print(p)
        return 0

    raise AssertionError(f"unhandled command {args.command}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
