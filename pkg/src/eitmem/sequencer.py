"""Pulse timing and write/hold/read trials.

Each slot of the experimental window carries one probe pulse. The coupling
back-edge at ``coupling_off`` writes, the next coupling front-edge at
``read_on`` reads. Efficiency follows the leakage-referenced convention:
retrieved energy over leakage energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .field import ComplexFieldGrid, OpticalLayout, TransverseGrid, energy, to_camera_plane, to_cloud_plane
from .medium import (
    AtomicCloud,
    LambdaSystem,
    PulseEnvelope,
    Trace,
    dark_state_mixing,
    eit_transmission,
    evolve_spinwave,
    group_velocity,
    read_spinwave,
    write_spinwave,
)

_EPS = 1e-9


class ScheduleError(ValueError):
    """A timing bound is violated. ``field`` names the offending parameter."""

    def __init__(self, message: str, field: str):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class TimingConfig:
    repetition: float = 1000.0
    load_duration: float = 800e-6
    window_duration: float = 200e-6
    pulse_period: float = 3.536e-6
    probe_width: float = 500e-9
    coupling_width: float = 1.61e-6
    storage_time: float = 1.826e-6
    switch_off_fraction: float = 0.5
    # the window holds 56 whole periods, but only 50 pulses were fired in it
    max_pulses: int | None = 50

    def check(self) -> None:
        """Raise ``ScheduleError`` naming the first violated bound."""
        if not self.repetition > 0:
            raise ScheduleError("repetition rate must be positive", "timing.repetition")
        for name in ("load_duration", "window_duration", "pulse_period", "probe_width", "coupling_width"):
            if not getattr(self, name) > 0:
                raise ScheduleError(f"{name} must be positive", f"timing.{name}")
        if self.storage_time < 0:
            raise ScheduleError("storage_time must be >= 0", "timing.storage_time")
        if self.load_duration + self.window_duration > (1.0 + _EPS) / self.repetition:
            raise ScheduleError(
                f"load_duration + window_duration = {self.load_duration + self.window_duration:g} s "
                f"exceeds the repetition period {1 / self.repetition:g} s", "timing.window_duration")
        if self.pulse_period > self.window_duration * (1 + _EPS):
            raise ScheduleError(
                f"pulse_period {self.pulse_period:g} s exceeds window_duration {self.window_duration:g} s; "
                "no slot fits", "timing.pulse_period")
        if self.probe_width >= self.pulse_period:
            raise ScheduleError("probe_width must be shorter than pulse_period", "timing.probe_width")
        if self.coupling_width >= self.pulse_period:
            raise ScheduleError("coupling_width must be shorter than pulse_period", "timing.coupling_width")
        if self.storage_time >= self.pulse_period:
            raise ScheduleError("storage_time must be shorter than pulse_period", "timing.storage_time")
        if not 0.0 < self.switch_off_fraction <= 1.0:
            raise ScheduleError("switch_off_fraction must lie in (0, 1]", "timing.switch_off_fraction")
        if self.switch_off_fraction * self.probe_width + self.storage_time >= self.pulse_period:
            raise ScheduleError("read-out would fall into the next slot", "timing.storage_time")
        if self.max_pulses is not None and self.max_pulses < 1:
            raise ScheduleError("max_pulses must be >= 1", "timing.max_pulses")


@dataclass(frozen=True)
class Slot:
    index: int
    probe_on: float
    probe_off: float
    coupling_on: float
    coupling_off: float
    read_on: float


@dataclass(frozen=True)
class PulseSchedule:
    slots: tuple[Slot, ...]
    slots_per_window: int
    repetition: float

    @property
    def pulses_per_second(self) -> float:
        return self.slots_per_window * self.repetition


@dataclass(frozen=True)
class TrialRecord:
    label: str
    leakage_energy: float
    retrieved_energy: float
    leakage_field: ComplexFieldGrid
    retrieved_field: ComplexFieldGrid
    storage_time: float
    input_energy: float
    stored_excitations: float
    leakage_trace: Trace = field(compare=False)
    retrieved_trace: Trace = field(compare=False)

    @property
    def input_referenced_efficiency(self) -> float:
        return self.retrieved_energy / self.input_energy if self.input_energy > 0 else 0.0


def build_schedule(cfg: TimingConfig) -> PulseSchedule:
    cfg.check()
    n = int(math.floor(cfg.window_duration / cfg.pulse_period + _EPS))
    if cfg.max_pulses is not None:
        n = min(n, cfg.max_pulses)
    slots = []
    for i in range(n):
        probe_on = cfg.load_duration + i * cfg.pulse_period
        coupling_off = probe_on + cfg.switch_off_fraction * cfg.probe_width
        slots.append(Slot(
            index=i,
            probe_on=probe_on,
            probe_off=probe_on + cfg.probe_width,
            coupling_on=coupling_off - cfg.coupling_width,
            coupling_off=coupling_off,
            read_on=coupling_off + cfg.storage_time,
        ))
    return PulseSchedule(tuple(slots), n, cfg.repetition)


@dataclass(frozen=True)
class Medium:
    """Everything the storage step needs besides the pulse itself."""

    system: LambdaSystem
    cloud: AtomicCloud
    channels: dict
    tau_coherence: float = 10e-6

    @property
    def group_velocity(self) -> float:
        return group_velocity(dark_state_mixing(self.system))

    @property
    def transmission(self) -> float:
        """Intensity transmittance of the slow-light passage on two-photon resonance."""
        return abs(eit_transmission(0.0, self.system)) ** 2


def run_trial(slot: Slot, timing: TimingConfig, medium: Medium, fields: dict,
              photons_per_pulse: float, layout: OpticalLayout | None = None) -> dict:
    """Write, hold and read one pulse per channel.

    ``fields`` maps channel labels to probe images. With a ``layout`` they are
    taken at the mask plane and the record fields come back at the camera
    plane; without one everything stays at the cloud plane.
    """
    if photons_per_pulse < 0:
        raise ValueError("photons_per_pulse must be >= 0")
    v_g = medium.group_velocity
    transit = medium.cloud.length / v_g
    out = {}
    for label, image in fields.items():
        channel = medium.channels[label]
        at_cloud = to_cloud_plane(image, layout) if layout is not None else image
        pulse = PulseEnvelope.square(slot.probe_on, timing.probe_width, photons_per_pulse)
        leak, wave = write_spinwave(pulse, at_cloud, channel, v_g, medium.cloud, slot.coupling_off,
                                    medium.tau_coherence, medium.transmission)
        held = evolve_spinwave(wave, slot.read_on - slot.coupling_off, medium.cloud)
        retrieved = read_spinwave(held, channel)
        r_energy = energy(retrieved)
        stored_total = wave.entry_profile.total
        shape = wave.entry_profile.scaled(r_energy / stored_total if stored_total > 0 else 0.0)
        r_trace = shape.shifted(slot.read_on - slot.coupling_off + transit)
        leak_field, r_field = leak.field, retrieved
        if layout is not None:
            leak_field = to_camera_plane(leak_field, layout)
            r_field = to_camera_plane(r_field, layout)
        out[label] = TrialRecord(
            label=label,
            leakage_energy=leak.energy,
            retrieved_energy=r_energy,
            leakage_field=leak_field,
            retrieved_field=r_field,
            storage_time=slot.read_on - slot.coupling_off,
            input_energy=leak.input_energy,
            stored_excitations=wave.excitations,
            leakage_trace=leak.trace,
            retrieved_trace=r_trace,
        )
    return out



def storage_efficiency(rec: TrialRecord) -> float:
    if not rec.leakage_energy > 0:
        raise ValueError("storage efficiency undefined: no leakage energy")
    return rec.retrieved_energy / rec.leakage_energy


def predicted_efficiency(timing: TimingConfig, medium: Medium, label: str,
                         image: ComplexFieldGrid | None = None) -> float:
    """Noiseless leakage-referenced efficiency of a channel for a square pulse.

    ``image`` is the probe pattern at the cloud plane; it matters only through
    diffusion during the hold. Without one a uniform pattern is used.
    """
    if image is None:
        grid = TransverseGrid.square(2, 1.0)
        image = ComplexFieldGrid(grid, np.ones(grid.shape))
    slot = build_schedule(timing).slots[0]
    rec = run_trial(slot, timing, medium, {label: image}, 1.0)[label]
    return storage_efficiency(rec)


def calibrate_read_efficiency(timing: TimingConfig, medium: Medium, label: str, target: float,
                              image: ComplexFieldGrid | None = None) -> float:
    """Read efficiency that makes ``label``'s efficiency equal ``target``."""
    ch = medium.channels[label]
    probe = replace(medium, channels={**medium.channels, label: replace(ch, read_efficiency=1.0)})
    base = predicted_efficiency(timing, probe, label, image)
    eta = target / base
    if not 0 <= eta <= 1:
        raise ValueError(f"target efficiency {target} needs read efficiency {eta:.4g} outside [0, 1]")
    return eta
