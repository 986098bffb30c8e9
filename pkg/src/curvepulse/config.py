"""Scenario configuration: JSON in, validated dataclasses out.

Frequencies in configs are ordinary (MHz/kHz) unless the `angular` flag is
set, in which case the numbers are taken as already carrying the 2*pi (i.e.
Mrad/s / krad/s).  Unknown fields anywhere are errors, reported with the
JSON path to the offending key.  The resolved config serializes canonically,
so a config -> run -> echo -> rerun loop is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

TWO_PI = 2.0 * np.pi


class ConfigError(ValueError):
    """Invalid configuration; `path` points at the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class SweepGrid:
    start: float
    stop: float
    points: int

    def values(self) -> np.ndarray:
        if self.points <= 0:
            return np.array([])
        return np.linspace(self.start, self.stop, self.points)


@dataclass
class ScenarioConfig:
    scheme: str = "STA_SCQC"
    angular: bool = False
    omega_max_mhz: float = 1.9
    curve_a_over_pi: float = 0.15
    curve_b: float = 0.06
    stirap_durations_us: list = field(default_factory=lambda: [0.8, 5.0, 6.0])
    stirap_sigma_fraction: float = 1.0 / 6.0
    stirap_delta_tau_fraction: float = 0.1
    srt_detuning_mhz: float = 2.5
    srt_duration_us: float | None = None  # None: use the calibrated pi-time
    delta_grid_khz: SweepGrid = field(
        default_factory=lambda: SweepGrid(-1000.0, 1000.0, 41))
    epsilon_grid: SweepGrid = field(
        default_factory=lambda: SweepGrid(-0.3, 0.3, 31))
    sta_samples: int | None = None
    baseline_samples: int | None = None
    trace_points: int = 241
    optimizer_grid: list = field(default_factory=lambda: [60, 60])
    optimizer_box: list = field(default_factory=lambda: [[0.05, 0.5], [0.0, 0.2]])
    optimizer_refine: bool = True
    optimizer_workers: int = 1
    lab_omega_plus_ghz: float = 4.284
    lab_omega_minus_ghz: float = 1.457
    lab_splitting_ghz: float = 2.827

    # --- unit resolution -------------------------------------------------
    def _to_rad_s(self, value: float, scale: float) -> float:
        return value * scale if self.angular else TWO_PI * value * scale

    @property
    def omega_max_rad_s(self) -> float:
        return self._to_rad_s(self.omega_max_mhz, 1e6)

    @property
    def srt_detuning_rad_s(self) -> float:
        return self._to_rad_s(self.srt_detuning_mhz, 1e6)

    def delta_grid_rad_s(self) -> np.ndarray:
        scale = 1e3 if self.angular else TWO_PI * 1e3
        return self.delta_grid_khz.values() * scale


_SCHEMES = ("STA_SCQC", "STIRAP", "SRT", "PI_PULSE")


def _expect(cond: bool, path: str, message: str):
    if not cond:
        raise ConfigError(path, message)


def _take_number(raw: dict, key: str, path: str, default, minimum=None,
                 allow_none=False):
    if key not in raw:
        return default
    value = raw.pop(key)
    if value is None and allow_none:
        return None
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool),
            f"{path}.{key}", f"expected a number, got {value!r}")
    if minimum is not None:
        _expect(value >= minimum, f"{path}.{key}", f"must be >= {minimum}")
    return float(value)


def _take_int(raw: dict, key: str, path: str, default, minimum=None,
              allow_none=False):
    if key not in raw:
        return default
    value = raw.pop(key)
    if value is None and allow_none:
        return None
    _expect(isinstance(value, int) and not isinstance(value, bool),
            f"{path}.{key}", f"expected an integer, got {value!r}")
    if minimum is not None:
        _expect(value >= minimum, f"{path}.{key}", f"must be >= {minimum}")
    return int(value)


def _take_bool(raw: dict, key: str, path: str, default):
    if key not in raw:
        return default
    value = raw.pop(key)
    _expect(isinstance(value, bool), f"{path}.{key}",
            f"expected true/false, got {value!r}")
    return value


def _take_grid(raw: dict, key: str, path: str, default: SweepGrid) -> SweepGrid:
    if key not in raw:
        return default
    value = raw.pop(key)
    _expect(isinstance(value, dict), f"{path}.{key}", "expected an object")
    sub = dict(value)
    grid = SweepGrid(
        start=_take_number(sub, "start", f"{path}.{key}", default.start),
        stop=_take_number(sub, "stop", f"{path}.{key}", default.stop),
        points=_take_int(sub, "points", f"{path}.{key}", default.points,
                         minimum=0),
    )
    for leftover in sub:
        raise ConfigError(f"{path}.{key}.{leftover}", "unknown field")
    return grid


def resolve_config(data: dict, path: str = "$") -> ScenarioConfig:
    """Validate a raw JSON object into a ScenarioConfig."""
    _expect(isinstance(data, dict), path, "config root must be a JSON object")
    raw = dict(data)
    cfg = ScenarioConfig()

    if "scheme" in raw:
        scheme = raw.pop("scheme")
        _expect(scheme in _SCHEMES, f"{path}.scheme",
                f"expected one of {_SCHEMES}, got {scheme!r}")
        cfg.scheme = scheme
    cfg.angular = _take_bool(raw, "angular", path, cfg.angular)
    cfg.omega_max_mhz = _take_number(raw, "omega_max_mhz", path,
                                     cfg.omega_max_mhz, minimum=1e-12)

    if "curve" in raw:
        sub_raw = raw.pop("curve")
        _expect(isinstance(sub_raw, dict), f"{path}.curve", "expected an object")
        sub = dict(sub_raw)
        cfg.curve_a_over_pi = _take_number(sub, "a_over_pi", f"{path}.curve",
                                           cfg.curve_a_over_pi, minimum=1e-9)
        cfg.curve_b = _take_number(sub, "b", f"{path}.curve", cfg.curve_b,
                                   minimum=0.0)
        _expect(cfg.curve_b < 0.5, f"{path}.curve.b", "must be < 0.5")
        for leftover in sub:
            raise ConfigError(f"{path}.curve.{leftover}", "unknown field")

    if "stirap" in raw:
        sub_raw = raw.pop("stirap")
        _expect(isinstance(sub_raw, dict), f"{path}.stirap", "expected an object")
        sub = dict(sub_raw)
        if "durations_us" in sub:
            durations = sub.pop("durations_us")
            _expect(isinstance(durations, list) and durations
                    and all(isinstance(x, (int, float)) and x > 0
                            for x in durations),
                    f"{path}.stirap.durations_us",
                    "expected a non-empty list of positive numbers")
            cfg.stirap_durations_us = [float(x) for x in durations]
        cfg.stirap_sigma_fraction = _take_number(
            sub, "sigma_fraction", f"{path}.stirap",
            cfg.stirap_sigma_fraction, minimum=1e-9)
        cfg.stirap_delta_tau_fraction = _take_number(
            sub, "delta_tau_fraction", f"{path}.stirap",
            cfg.stirap_delta_tau_fraction, minimum=0.0)
        for leftover in sub:
            raise ConfigError(f"{path}.stirap.{leftover}", "unknown field")

    if "srt" in raw:
        sub_raw = raw.pop("srt")
        _expect(isinstance(sub_raw, dict), f"{path}.srt", "expected an object")
        sub = dict(sub_raw)
        cfg.srt_detuning_mhz = _take_number(sub, "detuning_mhz", f"{path}.srt",
                                            cfg.srt_detuning_mhz)
        cfg.srt_duration_us = _take_number(sub, "duration_us", f"{path}.srt",
                                           cfg.srt_duration_us, minimum=1e-9,
                                           allow_none=True)
        for leftover in sub:
            raise ConfigError(f"{path}.srt.{leftover}", "unknown field")

    if "noise" in raw:
        sub_raw = raw.pop("noise")
        _expect(isinstance(sub_raw, dict), f"{path}.noise", "expected an object")
        sub = dict(sub_raw)
        cfg.delta_grid_khz = _take_grid(sub, "delta_khz", f"{path}.noise",
                                        cfg.delta_grid_khz)
        cfg.epsilon_grid = _take_grid(sub, "epsilon", f"{path}.noise",
                                      cfg.epsilon_grid)
        for leftover in sub:
            raise ConfigError(f"{path}.noise.{leftover}", "unknown field")

    if "samples" in raw:
        sub_raw = raw.pop("samples")
        _expect(isinstance(sub_raw, dict), f"{path}.samples", "expected an object")
        sub = dict(sub_raw)
        cfg.sta_samples = _take_int(sub, "sta", f"{path}.samples",
                                    cfg.sta_samples, minimum=2, allow_none=True)
        cfg.baseline_samples = _take_int(sub, "baselines", f"{path}.samples",
                                         cfg.baseline_samples, minimum=2,
                                         allow_none=True)
        cfg.trace_points = _take_int(sub, "trace_points", f"{path}.samples",
                                     cfg.trace_points, minimum=2)
        for leftover in sub:
            raise ConfigError(f"{path}.samples.{leftover}", "unknown field")

    if "optimizer" in raw:
        sub_raw = raw.pop("optimizer")
        _expect(isinstance(sub_raw, dict), f"{path}.optimizer",
                "expected an object")
        sub = dict(sub_raw)
        if "grid" in sub:
            grid = sub.pop("grid")
            _expect(isinstance(grid, list) and len(grid) == 2
                    and all(isinstance(x, int) and x >= 1 for x in grid),
                    f"{path}.optimizer.grid",
                    "expected [na, nb] with positive integers")
            cfg.optimizer_grid = [int(grid[0]), int(grid[1])]
        if "box" in sub:
            box = sub.pop("box")
            ok = (isinstance(box, list) and len(box) == 2
                  and all(isinstance(r, list) and len(r) == 2
                          and all(isinstance(x, (int, float)) for x in r)
                          and r[0] < r[1] for r in box))
            _expect(ok, f"{path}.optimizer.box",
                    "expected [[a_lo, a_hi], [b_lo, b_hi]]")
            cfg.optimizer_box = [[float(box[0][0]), float(box[0][1])],
                                 [float(box[1][0]), float(box[1][1])]]
        cfg.optimizer_refine = _take_bool(sub, "refine", f"{path}.optimizer",
                                          cfg.optimizer_refine)
        cfg.optimizer_workers = _take_int(sub, "workers", f"{path}.optimizer",
                                          cfg.optimizer_workers, minimum=1)
        for leftover in sub:
            raise ConfigError(f"{path}.optimizer.{leftover}", "unknown field")

    if "lab_frame" in raw:
        sub_raw = raw.pop("lab_frame")
        _expect(isinstance(sub_raw, dict), f"{path}.lab_frame",
                "expected an object")
        sub = dict(sub_raw)
        cfg.lab_omega_plus_ghz = _take_number(sub, "omega_plus_ghz",
                                              f"{path}.lab_frame",
                                              cfg.lab_omega_plus_ghz)
        cfg.lab_omega_minus_ghz = _take_number(sub, "omega_minus_ghz",
                                               f"{path}.lab_frame",
                                               cfg.lab_omega_minus_ghz)
        cfg.lab_splitting_ghz = _take_number(sub, "splitting_ghz",
                                             f"{path}.lab_frame",
                                             cfg.lab_splitting_ghz)
        for leftover in sub:
            raise ConfigError(f"{path}.lab_frame.{leftover}", "unknown field")

    for leftover in raw:
        raise ConfigError(f"{path}.{leftover}", "unknown field")
    return cfg


def load_config(path) -> ScenarioConfig:
    raw_text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw_text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from exc
    return resolve_config(data)


def canonical_dict(cfg: ScenarioConfig) -> dict:
    """Nested plain-dict form matching the accepted JSON schema."""
    return {
        "scheme": cfg.scheme,
        "angular": cfg.angular,
        "omega_max_mhz": cfg.omega_max_mhz,
        "curve": {"a_over_pi": cfg.curve_a_over_pi, "b": cfg.curve_b},
        "stirap": {
            "durations_us": cfg.stirap_durations_us,
            "sigma_fraction": cfg.stirap_sigma_fraction,
            "delta_tau_fraction": cfg.stirap_delta_tau_fraction,
        },
        "srt": {"detuning_mhz": cfg.srt_detuning_mhz,
                "duration_us": cfg.srt_duration_us},
        "noise": {
            "delta_khz": asdict(cfg.delta_grid_khz),
            "epsilon": asdict(cfg.epsilon_grid),
        },
        "samples": {"sta": cfg.sta_samples, "baselines": cfg.baseline_samples,
                    "trace_points": cfg.trace_points},
        "optimizer": {"grid": cfg.optimizer_grid, "box": cfg.optimizer_box,
                      "refine": cfg.optimizer_refine,
                      "workers": cfg.optimizer_workers},
        "lab_frame": {"omega_plus_ghz": cfg.lab_omega_plus_ghz,
                      "omega_minus_ghz": cfg.lab_omega_minus_ghz,
                      "splitting_ghz": cfg.lab_splitting_ghz},
    }


def dumps_canonical(cfg: ScenarioConfig) -> str:
    return json.dumps(canonical_dict(cfg), sort_keys=True, indent=2) + "\n"


def config_hash(cfg: ScenarioConfig) -> str:
    compact = json.dumps(canonical_dict(cfg), sort_keys=True,
                         separators=(",", ":"))
    return hashlib.sha256(compact.encode("utf-8")).hexdigest()[:16]
