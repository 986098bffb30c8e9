"""Scenario runner: reproduce each report figure as CSV + SVG artifacts.

Every CSV carries a header row and a `#provenance,<hash>` comment tying it to
the resolved config; the resolved config itself is echoed next to the
artifacts so a run can be reproduced byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import plotting
from .config import ScenarioConfig, config_hash, dumps_canonical
from .curve import CurveParams
from .optimize import optimize, write_landscape_csv
from .pulses import (NoiseSpec, PulseProgram, apply_noise,
                     calibrate_srt_pi_time, calibrate_stirap_sign,
                     synth_srt, synth_sta, synth_stirap, write_program_csv)
from .qutrit import basis_state, propagate
from .textio import fnum

FIGURE_IDS = ("fig2a", "fig3a", "fig3b", "fig4a", "fig4b")


@dataclass
class SweepReport:
    scheme: str
    axis_name: str
    values: np.ndarray
    populations: np.ndarray  # (n, 3) rows of (P+1, P0, P-1)


def _write_rows(path: Path, header: str, rows, provenance: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"#provenance,{provenance}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fnum(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _sta_program(cfg: ScenarioConfig) -> PulseProgram:
    params = CurveParams(a=cfg.curve_a_over_pi * np.pi, b=cfg.curve_b)
    return synth_sta(params, cfg.omega_max_rad_s, n_samples=cfg.sta_samples)


def _stirap_program(cfg: ScenarioConfig, T: float, sign: int) -> PulseProgram:
    amp = cfg.omega_max_rad_s
    return synth_stirap(T, amp, amp, sigma=cfg.stirap_sigma_fraction * T,
                        delta_tau=sign * cfg.stirap_delta_tau_fraction * T,
                        n_samples=cfg.baseline_samples)


def _srt_time(cfg: ScenarioConfig) -> float:
    if cfg.srt_duration_us is not None:
        return cfg.srt_duration_us * 1e-6
    t_star, _ = calibrate_srt_pi_time(cfg.omega_max_rad_s,
                                      cfg.srt_detuning_rad_s)
    return t_star


def _srt_program(cfg: ScenarioConfig, T: float) -> PulseProgram:
    return synth_srt(T, cfg.omega_max_rad_s, cfg.srt_detuning_rad_s,
                     n_samples=cfg.baseline_samples)


def noise_sweep(program: PulseProgram, axis_name: str, values,
                epsilon_axis: bool = False) -> SweepReport:
    """Propagate the program once per grid point of a quasi-static error."""
    psi0 = basis_state("+1")
    values = np.asarray(values, dtype=float)
    pops = np.empty((values.size, 3))
    for i, v in enumerate(values):
        noise = NoiseSpec(epsilon=v) if epsilon_axis else NoiseSpec(delta=v)
        pops[i] = propagate(apply_noise(program, noise), psi0).populations[-1]
    return SweepReport(scheme=program.scheme.value, axis_name=axis_name,
                       values=values, populations=pops)


def _trace_rows(program: PulseProgram, n_points: int):
    """Population trace decimated to ~n_points rows (always keeps the end)."""
    result = propagate(program, basis_state("+1"))
    n = len(result.times)
    stride = max(n // max(n_points - 1, 1), 1)
    idx = list(range(0, n, stride))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    return [(float(result.times[k]), float(result.populations[k, 0]),
             float(result.populations[k, 1]), float(result.populations[k, 2]))
            for k in idx]


def run_scenario(cfg: ScenarioConfig, fig_ids, out_dir) -> list[Path]:
    """Produce the CSV + SVG artifact set for the requested figure ids."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prov = config_hash(cfg)
    (out / "config_echo.json").write_text(dumps_canonical(cfg),
                                          encoding="utf-8")
    artifacts = [out / "config_echo.json"]

    for fig_id in fig_ids:
        if fig_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {fig_id!r}; "
                             f"expected one of {FIGURE_IDS}")

    if "fig2a" in fig_ids:
        report = optimize(cfg.omega_max_rad_s,
                          box=tuple(map(tuple, cfg.optimizer_box)),
                          coarse_grid=tuple(cfg.optimizer_grid),
                          refine=cfg.optimizer_refine,
                          workers=cfg.optimizer_workers)
        csv_path = out / "fig2a_landscape.csv"
        write_landscape_csv(report, csv_path, provenance=prov)
        svg_path = out / "fig2a_landscape.svg"
        opt = (None if report.best_params is None else
               (report.best_params.a_over_pi, report.best_params.b))
        plotting.landscape_plot(svg_path, report.landscape[:, 0],
                                report.landscape[:, 1],
                                np.where(np.isfinite(report.landscape[:, 2]),
                                         report.landscape[:, 2] * 1e6, np.nan),
                                optimum=opt)
        artifacts += [csv_path, svg_path]

    if "fig3a" in fig_ids:
        program = _sta_program(cfg)
        rows = _trace_rows(program, cfg.trace_points)
        csv_path = out / "fig3a_sta_populations.csv"
        _write_rows(csv_path, "t_s,p_plus1,p_zero,p_minus1", rows, prov)
        svg_path = out / "fig3a_sta_populations.svg"
        t = [r[0] * 1e6 for r in rows]
        plotting.line_plot(svg_path, [t, t, t],
                           [[r[1] for r in rows], [r[2] for r in rows],
                            [r[3] for r in rows]],
                           ["P+1", "P0", "P-1"], "t (us)", "population",
                           "Curve-shaped transfer populations")
        artifacts += [csv_path, svg_path]

    if "fig3b" in fig_ids:
        sign = calibrate_stirap_sign(cfg.omega_max_rad_s)
        rows = []
        xs, ys, labels = [], [], []
        sta = _sta_program(cfg)
        sta_rows = _trace_rows(sta, cfg.trace_points)
        rows += [("STA_SCQC", sta.duration * 1e6, r[0], r[3])
                 for r in sta_rows]
        xs.append([r[0] * 1e6 for r in sta_rows])
        ys.append([r[3] for r in sta_rows])
        labels.append("STA")
        for T_us in cfg.stirap_durations_us:
            prog = _stirap_program(cfg, T_us * 1e-6, sign)
            trows = _trace_rows(prog, cfg.trace_points)
            rows += [("STIRAP", T_us, r[0], r[3]) for r in trows]
            xs.append([r[0] * 1e6 for r in trows])
            ys.append([r[3] for r in trows])
            labels.append(f"STIRAP T={T_us:g} us")
        csv_path = out / "fig3b_transfer_traces.csv"
        _write_rows(csv_path, "scheme,T_us,t_s,p_minus1", rows, prov)
        svg_path = out / "fig3b_transfer_traces.svg"
        plotting.line_plot(svg_path, xs, ys, labels, "t (us)", "P-1",
                           "Transfer vs time")
        artifacts += [csv_path, svg_path]

    if "fig4a" in fig_ids or "fig4b" in fig_ids:
        sta = _sta_program(cfg)
        srt = _srt_program(cfg, _srt_time(cfg))

    if "fig4a" in fig_ids:
        deltas = cfg.delta_grid_rad_s()
        reports = [noise_sweep(sta, "delta_rad_s", deltas),
                   noise_sweep(srt, "delta_rad_s", deltas)]
        rows = [(rep.scheme, float(v), float(p[0]), float(p[1]), float(p[2]))
                for rep in reports
                for v, p in zip(rep.values, rep.populations)]
        csv_path = out / "fig4a_detuning_sweep.csv"
        _write_rows(csv_path, "scheme,delta_rad_s,p_plus1,p_zero,p_minus1",
                    rows, prov)
        svg_path = out / "fig4a_detuning_sweep.svg"
        if deltas.size:
            plotting.line_plot(
                svg_path,
                [r.values / (2 * np.pi * 1e3) for r in reports],
                [r.populations[:, 2] for r in reports],
                [r.scheme for r in reports],
                "delta / 2pi (kHz)", "P-1(T)", "Detuning robustness")
            artifacts.append(svg_path)
        artifacts.append(csv_path)

    if "fig4b" in fig_ids:
        eps = cfg.epsilon_grid.values()
        reports = [noise_sweep(sta, "epsilon", eps, epsilon_axis=True),
                   noise_sweep(srt, "epsilon", eps, epsilon_axis=True)]
        rows = [(rep.scheme, float(v), float(p[0]), float(p[1]), float(p[2]))
                for rep in reports
                for v, p in zip(rep.values, rep.populations)]
        csv_path = out / "fig4b_amplitude_sweep.csv"
        _write_rows(csv_path, "scheme,epsilon,p_plus1,p_zero,p_minus1",
                    rows, prov)
        svg_path = out / "fig4b_amplitude_sweep.svg"
        if eps.size:
            plotting.line_plot(
                svg_path, [r.values for r in reports],
                [r.populations[:, 2] for r in reports],
                [r.scheme for r in reports],
                "epsilon", "P-1(T)", "Amplitude robustness")
            artifacts.append(svg_path)
        artifacts.append(csv_path)

    return artifacts


def export_awg(program: PulseProgram, a_max_reference: float, out_path,
               cfg: ScenarioConfig | None = None,
               provenance: str | None = None) -> list[Path]:
    """Write normalized waveform file(s): columns `t_s,amplitude_normalized`.

    Amplitudes are envelope/a_max_reference and must stay within [-1, 1]
    (0.5% slack); a program exceeding that is rejected.  Two files (plus and
    minus channels) are written when the two envelopes differ; header
    comments carry the lab-frame carrier frequencies and the convention that
    a negative amplitude is a pi phase flip of the carrier.
    """
    if a_max_reference <= 0:
        raise ValueError("a_max_reference must be positive")
    peak = max(float(np.max(np.abs(program.omega_plus))),
               float(np.max(np.abs(program.omega_minus))))
    if peak > a_max_reference * 1.005:
        raise ValueError(
            f"envelope peak {peak:.6g} rad/s exceeds the reference "
            f"{a_max_reference:.6g} rad/s by more than 0.5%")

    cfg = cfg or ScenarioConfig()
    out_path = Path(out_path)
    identical = np.array_equal(program.omega_plus, program.omega_minus)
    channels = ([("", program.omega_plus)] if identical else
                [("_plus", program.omega_plus), ("_minus", program.omega_minus)])

    t = program.midpoint_times
    paths = []
    for suffix, envelope in channels:
        path = out_path.with_name(out_path.stem + suffix + out_path.suffix)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if provenance:
                fh.write(f"#provenance,{provenance}\n")
            fh.write(f"#scheme,{program.scheme.value}\n")
            fh.write(f"#carrier_omega_plus_ghz,{fnum(cfg.lab_omega_plus_ghz)}\n")
            fh.write(f"#carrier_omega_minus_ghz,{fnum(cfg.lab_omega_minus_ghz)}\n")
            fh.write(f"#splitting_ghz,{fnum(cfg.lab_splitting_ghz)}\n")
            fh.write("#sign_convention,negative amplitude = pi phase flip "
                     "of the carrier\n")
            fh.write(f"#a_max_reference_rad_s,{fnum(a_max_reference)}\n")
            fh.write("t_s,amplitude_normalized\n")
            amp = envelope / a_max_reference
            for k in range(program.n_samples):
                fh.write(f"{fnum(t[k])},{fnum(amp[k])}\n")
        paths.append(path)
    return paths


def scheme_program(cfg: ScenarioConfig) -> PulseProgram:
    """Synthesize the program selected by cfg.scheme with its defaults."""
    if cfg.scheme == "STA_SCQC":
        return _sta_program(cfg)
    if cfg.scheme == "STIRAP":
        sign = calibrate_stirap_sign(cfg.omega_max_rad_s)
        T = cfg.stirap_durations_us[-1] * 1e-6
        return _stirap_program(cfg, T, sign)
    if cfg.scheme == "SRT":
        return _srt_program(cfg, _srt_time(cfg))
    if cfg.scheme == "PI_PULSE":
        from .pulses import synth_pi

        return synth_pi(cfg.omega_max_rad_s, "both",
                        n_samples=cfg.baseline_samples)
    raise ValueError(f"unknown scheme {cfg.scheme!r}")


def write_sweep_csv(report: SweepReport, path, provenance: str) -> None:
    rows = [(report.scheme, float(v), float(p[0]), float(p[1]), float(p[2]))
            for v, p in zip(report.values, report.populations)]
    _write_rows(Path(path), f"scheme,{report.axis_name},p_plus1,p_zero,p_minus1",
                rows, provenance)


def write_program_artifacts(program: PulseProgram, out_dir, stem: str,
                            provenance: str) -> list[Path]:
    """Program CSV plus the rendered envelope figure."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    write_program_csv(program, csv_path, provenance=provenance)
    svg_path = out / f"{stem}.svg"
    plotting.envelope_plot(svg_path, program,
                           title=f"{program.scheme.value} envelopes")
    return [csv_path, svg_path]
