"""Experiment configuration.

Configs are flat ``key = value`` files with dotted section paths (a TOML
subset). Every key has a default; unknown keys are rejected. The canonical
echo lists every key in schema order, and its SHA-256 is the provenance hash
stamped on each report.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, replace
from importlib import resources

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .detection import CCDModel, SPCMModel, scatter_rate_vs_angle
from .field import ComplexFieldGrid, OpticalLayout, TransverseGrid, load_mask, to_cloud_plane
from .glyphs import resolve_mask
from .medium import AtomicCloud, LambdaSystem, StorageChannel
from .sequencer import Medium, ScheduleError, TimingConfig, build_schedule

TWO_PI = 2 * math.pi

# key -> (type, default); list types are ("list", element type)
SCHEMA: dict[str, tuple] = {
    "seed": (int, 20130101),
    "grid.n": (int, 256),
    "grid.pitch": (float, 20e-6),
    "optics.f1": (float, 0.300),
    "optics.f2": (float, 0.500),
    "optics.wavelength": (float, 795e-9),
    "timing.repetition": (float, 1000.0),
    "timing.load_duration": (float, 800e-6),
    "timing.window_duration": (float, 200e-6),
    "timing.pulse_period": (float, 3.536e-6),
    "timing.probe_width": (float, 500e-9),
    "timing.coupling_width": (float, 1.61e-6),
    "timing.storage_time": (float, 1.826e-6),
    "timing.switch_off_fraction": (float, 0.5),
    "timing.max_pulses": (int, 50),
    "medium.omega_c": (float, TWO_PI * 5e6),
    "medium.g_sqrtN": (float, TWO_PI * 5e8),
    "medium.gamma_e": (float, TWO_PI * 5.75e6),
    "medium.gamma_gs": (float, 0.0),
    "medium.optical_depth": (float, 50.0),
    "medium.tau_coherence": (float, 10e-6),
    "cloud.length": (float, 30e-3),
    "cloud.transverse_size": (float, 2e-3),
    "cloud.atom_count": (float, 9.1e8),
    "cloud.v_rms": (float, 0.1),
    "cloud.velocity_correlation_time": (float, 0.913e-6),
    "channel1.probe_angle_deg": (float, 3.3),
    "channel1.write_efficiency": (float, 0.8),
    "channel1.read_efficiency": (float, 1.0),
    "channel2.probe_angle_deg": (float, 3.75),
    "channel2.write_efficiency": (float, 0.8),
    "channel2.read_efficiency": (float, 1.0),
    "detection.quantum_efficiency": (float, 0.25),
    "detection.sensor_extent": (float, 13.3e-3),
    "detection.dark_rate": (float, 0.0),
    "detection.scatter_anchor_angles_deg": (("list", float), [0.0, 3.3]),
    "detection.scatter_anchor_rates": (("list", float), [0.0, 0.0]),
    "detection.coupling_power": (float, 50e-6),
    "detection.anchor_power": (float, 50e-6),
    "detection.gate_width": (float, 500e-9),
    "detection.spcm_dead_time": (float, 50e-9),
    "detection.spcm_efficiency": (float, 1.0),
    "scenario.photons_per_pulse": (float, 1000.0),
    "scenario.mask1": (str, "glyph:2"),
    "scenario.mask2": (str, "glyph:5"),
    "scenario.sweep_mask": (str, "glyph:2"),
    "scenario.beam_waist": (float, 1.5e-3),
    "scenario.dual_frames": (int, 100),
    "scenario.dual_exposure_time": (float, 0.3),
    "scenario.photon_sweep": (("list", float), [305.0, 162.0, 80.0, 40.0, 22.0, 10.0, 5.3, 1.2]),
    "scenario.sweep_frames": (("list", int), [50, 50, 50, 200, 200, 500, 1000, 1000]),
    "scenario.sweep_exposure_time": (float, 1.0),
    "scenario.subensembles": (int, 5),
    "scenario.profile_axis": (str, "vertical"),
    "scenario.profile_anchor": (str, "centroid"),
    "scenario.storage_sweep": (("list", float), [0.0, 30e-6 / 7, 60e-6 / 7, 90e-6 / 7, 120e-6 / 7,
                                                 150e-6 / 7, 180e-6 / 7, 30e-6]),
    "scenario.decay_photons": (float, 1000.0),
    "scenario.decay_frames": (int, 1),
    "scenario.decay_exposure_time": (float, 0.3),
    "scenario.decay_profile_axis": (str, "horizontal"),
    "scenario.decay_noise": (bool, True),
}


class ConfigError(ValueError):
    """Bad configuration. ``field`` is the dotted key path when known."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None,
                 column: int | None = None):
        super().__init__(message)
        self.field = field
        self.line = line
        self.column = column


def _flatten(table: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in table.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _coerce(key: str, value, typ):
    if isinstance(typ, tuple):
        if not isinstance(value, list):
            raise ConfigError(f"{key} must be a list", key)
        return [_coerce(key, v, typ[1]) for v in value]
    if typ is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{key} must be true or false", key)
        return value
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer", key)
        return value
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number", key)
        if not math.isfinite(value):
            raise ConfigError(f"{key} must be finite", key)
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{key} must be a string", key)
    return value


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    return "[" + ", ".join(_format(v) for v in value) + "]"


@dataclass(frozen=True)
class ExperimentConfig:
    values: dict
    source: str | None = None

    def __getitem__(self, key: str):
        return self.values[key]

    def with_overrides(self, changes: dict) -> "ExperimentConfig":
        """Copy with dotted keys replaced, revalidated."""
        vals = dict(self.values)
        for key, v in changes.items():
            if key not in SCHEMA:
                raise ConfigError(f"unknown config key {key}", key)
            vals[key] = _coerce(key, v, SCHEMA[key][0])
        cfg = replace(self, values=vals)
        cfg.validate()
        return cfg

    def canonical(self) -> str:
        return "".join(f"{k} = {_format(self.values[k])}\n" for k in SCHEMA)

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    # component builders

    def grid(self) -> TransverseGrid:
        return TransverseGrid.square(self["grid.n"], self["grid.pitch"])

    def layout(self) -> OpticalLayout:
        return OpticalLayout(self["optics.f1"], self["optics.f2"])

    def timing(self, **changes) -> TimingConfig:
        t = TimingConfig(
            repetition=self["timing.repetition"],
            load_duration=self["timing.load_duration"],
            window_duration=self["timing.window_duration"],
            pulse_period=self["timing.pulse_period"],
            probe_width=self["timing.probe_width"],
            coupling_width=self["timing.coupling_width"],
            storage_time=self["timing.storage_time"],
            switch_off_fraction=self["timing.switch_off_fraction"],
            max_pulses=self["timing.max_pulses"] if self["timing.max_pulses"] > 0 else None,
        )
        return replace(t, **changes)

    def channel(self, i: int) -> StorageChannel:
        p = f"channel{i}."
        return StorageChannel(str(i), math.radians(self[p + "probe_angle_deg"]),
                              self[p + "write_efficiency"], self[p + "read_efficiency"])

    def medium(self) -> Medium:
        system = LambdaSystem(self["medium.omega_c"], self["medium.g_sqrtN"], self["medium.gamma_e"],
                              self["medium.gamma_gs"], self["medium.optical_depth"])
        cloud = AtomicCloud(self["cloud.length"], self["cloud.transverse_size"], self["cloud.atom_count"],
                            self["cloud.v_rms"], self["cloud.velocity_correlation_time"])
        return Medium(system, cloud, {"1": self.channel(1), "2": self.channel(2)},
                      self["medium.tau_coherence"])

    def scatter_rate(self, angle: float) -> float:
        angles = [math.radians(a) for a in self["detection.scatter_anchor_angles_deg"]]
        rates = self["detection.scatter_anchor_rates"]
        ratio = self["detection.coupling_power"] / self["detection.anchor_power"]
        return scatter_rate_vs_angle(angle, tuple(zip(angles, rates)), ratio)

    def ccd(self, exposure_time: float, label: str | None = None, timing: TimingConfig | None = None) -> CCDModel:
        """Camera model for one exposure; the scatter rate follows channel ``label``'s angle."""
        schedule = build_schedule(timing or self.timing())
        gates = max(1, int(round(exposure_time * schedule.pulses_per_second)))
        scatter = self.scatter_rate(self.channel(int(label)).probe_angle) if label else 0.0
        n = self["grid.n"]
        return CCDModel(
            shape=(n, n),
            sensor_extent=(self["detection.sensor_extent"],) * 2,
            quantum_efficiency=self["detection.quantum_efficiency"],
            dark_rate=self["detection.dark_rate"],
            coupling_scatter_rate=scatter,
            gate_width=self["detection.gate_width"],
            gates_per_exposure=gates,
        )

    def mask_field(self, spec: str, photons: float = 1.0) -> ComplexFieldGrid:
        """Probe image at the mask plane from a ``glyph:`` reference or PGM path."""
        grid = self.grid()
        try:
            raster = resolve_mask(spec, grid.shape)
        except OSError as exc:
            raise ConfigError(f"cannot read mask {spec!r}: {exc}", "scenario") from exc
        return load_mask(raster, grid, photons, self["optics.wavelength"])

    def spcm(self) -> SPCMModel:
        return SPCMModel(self["detection.spcm_dead_time"], self["detection.spcm_efficiency"])

    def validate(self) -> None:
        """Build every component; raise ``ConfigError`` naming the first bad field."""
        v = self.values
        for key in ("grid.n",):
            if v[key] < 2:
                raise ConfigError(f"{key} must be >= 2", key)
        sections = [
            ("grid", self.grid),
            ("optics", self.layout),
            ("medium", self.medium),
        ]
        for section, build in sections:
            try:
                build()
            except ScheduleError:
                raise
            except ValueError as exc:
                raise ConfigError(f"{section}: {exc}", section) from exc
        if not v["optics.wavelength"] > 0:
            raise ConfigError("optics.wavelength must be > 0", "optics.wavelength")
        try:
            build_schedule(self.timing())
        except ScheduleError as exc:
            raise ConfigError(str(exc), exc.field) from exc
        try:
            self.ccd(1.0, "1")
            self.spcm()
        except ValueError as exc:
            raise ConfigError(f"detection: {exc}", "detection") from exc
        if len(v["detection.scatter_anchor_angles_deg"]) != 2 or len(v["detection.scatter_anchor_rates"]) != 2:
            raise ConfigError("scatter anchors need exactly two angles and two rates", "detection.scatter_anchor_rates")
        if v["detection.anchor_power"] <= 0 or v["detection.coupling_power"] < 0:
            raise ConfigError("coupling powers must be positive", "detection.anchor_power")
        sweep = v["scenario.photon_sweep"]
        if not sweep or any(p <= 0 for p in sweep):
            raise ConfigError("photon sweep values must be > 0", "scenario.photon_sweep")
        if len(v["scenario.sweep_frames"]) != len(sweep):
            raise ConfigError("sweep_frames must match photon_sweep in length", "scenario.sweep_frames")
        if any(n < 1 for n in v["scenario.sweep_frames"]):
            raise ConfigError("frame counts must be >= 1", "scenario.sweep_frames")
        for key in ("scenario.dual_frames", "scenario.decay_frames", "scenario.subensembles"):
            if v[key] < 1:
                raise ConfigError(f"{key} must be >= 1", key)
        for key in ("scenario.profile_axis", "scenario.decay_profile_axis"):
            if v[key] not in ("vertical", "horizontal"):
                raise ConfigError(f"{key} must be 'vertical' or 'horizontal'", key)
        anchor = v["scenario.profile_anchor"]
        if anchor != "centroid" and not anchor.lstrip("-").isdigit():
            raise ConfigError("profile_anchor must be 'centroid' or an integer index", "scenario.profile_anchor")
        if any(t < 0 for t in v["scenario.storage_sweep"]):
            raise ConfigError("storage times must be >= 0", "scenario.storage_sweep")
        if v["scenario.photons_per_pulse"] < 0 or v["scenario.decay_photons"] < 0:
            raise ConfigError("photon numbers must be >= 0", "scenario.photons_per_pulse")
        if not v["scenario.beam_waist"] > 0:
            raise ConfigError("scenario.beam_waist must be > 0", "scenario.beam_waist")


def parse_config(text: str, source: str | None = None) -> ExperimentConfig:
    try:
        table = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}", None, getattr(exc, "lineno", None),
                          getattr(exc, "colno", None)) from exc
    flat = _flatten(table)
    values = {k: d for k, (_, d) in SCHEMA.items()}
    for key, value in flat.items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key}", key)
        values[key] = _coerce(key, value, SCHEMA[key][0])
    cfg = ExperimentConfig(values, source)
    cfg.validate()
    return cfg


def load_config(path: str | os.PathLike | None = None) -> ExperimentConfig:
    """Read a config file; ``None`` loads the shipped default."""
    if path is None:
        text = resources.files("eitmem").joinpath("data/default.toml").read_text()
        return parse_config(text, "default")
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, os.fspath(path))


def default_config() -> ExperimentConfig:
    return load_config(None)


def derived_quantities(cfg: ExperimentConfig) -> dict:
    from .medium import dark_state_mixing, group_velocity
    from .sequencer import predicted_efficiency

    timing = cfg.timing()
    schedule = build_schedule(timing)
    med = cfg.medium()
    theta = dark_state_mixing(med.system)
    v_g = group_velocity(theta)
    lam = cfg["optics.wavelength"]
    k1 = med.channels["1"].k_transverse(lam)
    k2 = med.channels["2"].k_transverse(lam)
    grid = cfg.grid()
    return {
        "slots_per_window": schedule.slots_per_window,
        "probe_pulses_per_second": schedule.pulses_per_second,
        "mixing_angle_rad": theta,
        "group_velocity_m_per_s": v_g,
        "compressed_pulse_length_m": v_g * timing.probe_width,
        "cloud_transit_time_s": med.cloud.length / v_g,
        "delta_k_channels_rad_per_m": math.hypot(k2[0] - k1[0], k2[1] - k1[1]),
        "efficiency_channel1": predicted_efficiency(
            timing, med, "1", to_cloud_plane(cfg.mask_field(cfg["scenario.mask1"]), cfg.layout())),
        "efficiency_channel2": predicted_efficiency(
            timing, med, "2", to_cloud_plane(cfg.mask_field(cfg["scenario.mask2"]), cfg.layout())),
        "cloud_plane_pitch_m": lam * cfg["optics.f1"] / (grid.nx * grid.dx),
        "camera_pitch_m": grid.dx * cfg["optics.f2"] / cfg["optics.f1"],
        "camera_extent_m": grid.nx * grid.dx * cfg["optics.f2"] / cfg["optics.f1"],
        "scatter_rate_channel1": cfg.scatter_rate(med.channels["1"].probe_angle),
        "scatter_rate_channel2": cfg.scatter_rate(med.channels["2"].probe_angle),
    }
