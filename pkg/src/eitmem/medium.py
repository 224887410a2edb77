"""Lambda-system storage physics in the adiabatic dark-state-polariton picture.

A probe pulse slowed to ``v_g`` is split at the coupling switch-off into the
part that already left the cloud, the part inside it (mapped onto a spin
wave), and the part that had not yet arrived. The spin wave keeps the
transverse image and the write-beam wavevector; it decays, diffuses, and is
read back out along the phase-matched direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .field import DEFAULT_WAVELENGTH, ComplexFieldGrid, TransverseGrid, energy

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class LambdaSystem:
    """Rates in rad/s. ``g_sqrtN`` is the collective probe coupling."""

    omega_c: float = 2 * np.pi * 5e6
    g_sqrtN: float = 2 * np.pi * 5e8
    gamma_e: float = 2 * np.pi * 5.75e6
    gamma_gs: float = 0.0
    optical_depth: float = 50.0

    def __post_init__(self):
        for name in ("omega_c", "g_sqrtN", "gamma_e", "gamma_gs", "optical_depth"):
            if getattr(self, name) < 0:
                raise ValueError(f"LambdaSystem.{name} must be >= 0")


@dataclass(frozen=True)
class AtomicCloud:
    """Cigar-shaped cold cloud.

    Transverse atomic motion is treated as diffusion with coefficient
    ``v_rms**2 * velocity_correlation_time``; with the default correlation
    time the rms displacement after the nominal 1.826 us hold equals
    ``v_rms * 1.826 us``.
    """

    length: float = 30e-3
    transverse_size: float = 2e-3
    atom_count: float = 9.1e8
    v_rms: float = 0.1
    velocity_correlation_time: float = 0.913e-6

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("AtomicCloud.length must be > 0")
        if not self.atom_count > 0:
            raise ValueError("AtomicCloud.atom_count must be > 0")
        if self.transverse_size <= 0 or self.v_rms < 0 or self.velocity_correlation_time < 0:
            raise ValueError("AtomicCloud sizes and speeds must be nonnegative")

    @property
    def diffusion_coefficient(self) -> float:
        return self.v_rms ** 2 * self.velocity_correlation_time

    def blur_sigma(self, dt: float) -> float:
        """Rms transverse displacement (m) accumulated over ``dt``."""
        return math.sqrt(2.0 * self.diffusion_coefficient * dt)


@dataclass(frozen=True)
class StorageChannel:
    label: str
    probe_angle: float
    write_efficiency: float = 1.0
    read_efficiency: float = 1.0

    def __post_init__(self):
        for name in ("write_efficiency", "read_efficiency"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"StorageChannel.{name} must lie in [0, 1], got {v}")

    def k_transverse(self, wavelength: float = DEFAULT_WAVELENGTH) -> tuple[float, float]:
        """Transverse grating wavevector ``k_probe - k_coupling`` (coupling on axis)."""
        return (2 * np.pi / wavelength * math.sin(self.probe_angle), 0.0)


@dataclass(frozen=True)
class Trace:
    """Energy per time bin. ``t`` holds bin centers, ``photons`` the bin contents."""

    t: np.ndarray
    photons: np.ndarray

    @property
    def total(self) -> float:
        return float(np.sum(self.photons))

    def shifted(self, dt: float) -> "Trace":
        return Trace(self.t + dt, self.photons)

    def scaled(self, factor: float) -> "Trace":
        return Trace(self.t, self.photons * factor)

    def window(self) -> tuple[float, float]:
        """Time span covered by nonzero bins (half-bin padded)."""
        nz = np.flatnonzero(self.photons > 0)
        if nz.size == 0:
            return (float(self.t[0]), float(self.t[0]))
        half = 0.5 * (self.t[1] - self.t[0]) if self.t.size > 1 else 0.0
        return (float(self.t[nz[0]] - half), float(self.t[nz[-1]] + half))


@dataclass(frozen=True)
class PulseEnvelope:
    """Piecewise-constant temporal envelope: photons per bin between ``edges``."""

    edges: np.ndarray
    photons: np.ndarray

    def __post_init__(self):
        if self.edges.size != self.photons.size + 1 or np.any(np.diff(self.edges) <= 0):
            raise ValueError("envelope edges must be increasing with one more entry than bins")
        if np.any(self.photons < 0):
            raise ValueError("pulse envelope must be nonnegative")

    @classmethod
    def square(cls, t0: float, width: float, photons: float, bins: int = 500) -> "PulseEnvelope":
        edges = t0 + np.linspace(0.0, width, bins + 1)
        return cls(edges, np.full(bins, photons / bins))

    @classmethod
    def from_function(cls, fn, t0: float, width: float, photons: float, bins: int = 500) -> "PulseEnvelope":
        edges = t0 + np.linspace(0.0, width, bins + 1)
        centers = 0.5 * (edges[1:] + edges[:-1])
        w = np.clip(np.asarray(fn(centers), dtype=float), 0, None)
        if w.sum() == 0:
            return cls(edges, np.zeros(bins))
        return cls(edges, photons * w / w.sum())

    @property
    def total(self) -> float:
        return float(self.photons.sum())

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def portion(self, a: float, b: float) -> np.ndarray:
        """Photons per bin whose entry time falls in ``(a, b]``."""
        lo = np.clip(a, self.edges[:-1], self.edges[1:])
        hi = np.clip(b, self.edges[:-1], self.edges[1:])
        frac = np.clip(hi - lo, 0.0, None) / np.diff(self.edges)
        return self.photons * frac


@dataclass(frozen=True)
class SpinWave:
    """Stored collective excitation at the cloud plane.

    ``amplitude`` is in sqrt-excitations per transverse sample. ``entry_profile``
    records when each stored slice entered the cloud, which fixes the
    retrieved pulse shape.
    """

    grid: TransverseGrid
    amplitude: np.ndarray
    k_transverse: tuple[float, float]
    created_at: float
    tau_coherence: float
    label: str
    wavelength: float = DEFAULT_WAVELENGTH
    age: float = 0.0
    entry_profile: Trace | None = field(default=None, compare=False)

    @property
    def excitations(self) -> float:
        return float(np.sum(np.abs(self.amplitude) ** 2))


@dataclass(frozen=True)
class Leakage:
    """Unstored part of a write, with the full energy bookkeeping."""

    field: ComplexFieldGrid
    trace: Trace
    energy: float
    input_energy: float
    exited_energy: float
    pending_energy: float
    inside_energy: float
    absorbed_energy: float


def dark_state_mixing(sys: LambdaSystem) -> float:
    if sys.omega_c == 0 and sys.g_sqrtN == 0:
        raise ValueError("mixing angle undefined with no coupling and no atoms")
    return math.atan2(sys.g_sqrtN, sys.omega_c)


def group_velocity(theta: float, c: float = SPEED_OF_LIGHT) -> float:
    if not 0.0 <= theta <= math.pi / 2 + 1e-15:
        raise ValueError(f"mixing angle must lie in [0, pi/2], got {theta}")
    return c * math.cos(theta) ** 2


def eit_transmission(delta, sys: LambdaSystem):
    """Amplitude transmittance of the cloud at two-photon detuning ``delta``.

    Resonant coupling; ``delta`` is also the one-photon probe detuning.
    """
    delta = np.asarray(delta, dtype=float)
    gamma = sys.gamma_e / 2.0
    if sys.omega_c == 0:
        response = gamma / (gamma - 1j * delta)
    else:
        ground = sys.gamma_gs - 1j * delta
        response = gamma * ground / ((gamma - 1j * delta) * ground + sys.omega_c ** 2 / 4.0)
    out = np.exp(-0.5 * sys.optical_depth * response)
    return out if out.ndim else complex(out)


def write_spinwave(pulse: PulseEnvelope, image: ComplexFieldGrid, channel: StorageChannel,
                   v_g: float, cloud: AtomicCloud, switch_off_time: float,
                   tau_coherence: float = math.inf, transmission: float = 1.0) -> tuple[Leakage, SpinWave]:
    """Map the in-cloud part of ``pulse`` onto a spin wave.

    Slices that entered at least ``length / v_g`` before switch-off have left
    the cloud (leakage, attenuated by the slow-light intensity
    ``transmission``). Slices that entered later but before switch-off are
    inside and get stored with the channel write efficiency. Slices that had
    not arrived yet are counted as leakage, undelayed.
    """
    if not v_g > 0:
        raise ValueError(f"group velocity must be positive, got {v_g}")
    if not 0.0 <= transmission <= 1.0:
        raise ValueError("slow-light transmission must lie in [0, 1]")
    transit = cloud.length / v_g
    boundary = switch_off_time - transit

    exited = pulse.portion(-np.inf, boundary)
    inside = pulse.portion(boundary, switch_off_time)
    pending = pulse.portion(switch_off_time, np.inf)
    # bins cut by the boundaries are split above; rounding can leave a tiny residue
    total = pulse.total
    e_exit, e_in, e_pend = float(exited.sum()), float(inside.sum()), float(pending.sum())

    leak_out = exited * transmission
    absorbed = e_exit - float(leak_out.sum())
    centers = pulse.centers
    leak_trace = Trace(np.concatenate([centers + transit, centers]),
                       np.concatenate([leak_out, pending]))
    order = np.argsort(leak_trace.t, kind="stable")
    leak_trace = Trace(leak_trace.t[order], leak_trace.photons[order])
    leak_energy = float(leak_out.sum()) + e_pend

    img_energy = energy(image)
    unit = image.amplitude / math.sqrt(img_energy) if img_energy > 0 else np.zeros_like(image.amplitude)
    stored = channel.write_efficiency * e_in
    wave = SpinWave(
        grid=image.grid,
        amplitude=unit * math.sqrt(stored),
        k_transverse=channel.k_transverse(image.wavelength),
        created_at=switch_off_time,
        tau_coherence=tau_coherence,
        label=channel.label,
        wavelength=image.wavelength,
        entry_profile=Trace(centers, inside),
    )
    leakage = Leakage(
        field=ComplexFieldGrid(image.grid, unit * math.sqrt(leak_energy), image.wavelength,
                               channel.k_transverse(image.wavelength)),
        trace=leak_trace,
        energy=leak_energy,
        input_energy=total,
        exited_energy=e_exit,
        pending_energy=e_pend,
        inside_energy=e_in,
        absorbed_energy=absorbed,
    )
    return leakage, wave


def diffusion_multiplier(grid: TransverseGrid, sigma2: float) -> np.ndarray:
    """Fourier-domain transfer function of a unit-area Gaussian blur of variance ``sigma2``."""
    fx, fy = grid.frequencies()
    return np.exp(-2.0 * np.pi ** 2 * sigma2 * (fx ** 2 + fy ** 2))


def evolve_spinwave(wave: SpinWave, dt: float, cloud: AtomicCloud) -> SpinWave:
    """Hold the spin wave for ``dt``: coherence decay plus transverse diffusion."""
    if dt < 0:
        raise ValueError(f"hold time must be >= 0, got {dt}")
    if dt == 0:
        return wave
    decay = math.exp(-dt / (2.0 * wave.tau_coherence)) if math.isfinite(wave.tau_coherence) else 1.0
    sigma2 = 2.0 * cloud.diffusion_coefficient * dt
    amp = wave.amplitude * decay
    if sigma2 > 0:
        H = diffusion_multiplier(wave.grid, sigma2)
        amp = np.fft.fftshift(np.fft.ifft2(np.fft.fft2(np.fft.ifftshift(amp)) * H))
    return replace(wave, amplitude=amp, age=wave.age + dt)


def read_spinwave(wave: SpinWave, channel: StorageChannel) -> ComplexFieldGrid:
    """Phase-matched retrieval: the field re-emitted along the stored grating direction."""
    amp = wave.amplitude * math.sqrt(channel.read_efficiency)
    return ComplexFieldGrid(wave.grid, amp, wave.wavelength, wave.k_transverse)


def crosstalk_coefficient(wave: SpinWave, readout_k, beam_waist: float, cloud: AtomicCloud) -> float:
    """Overlap of the stored grating with a plane-wave readout along ``readout_k``.

    Transverse part: modulus of the intensity-weighted mean of
    ``exp(i dk . r)``, with each sample treated as a uniform pixel and the
    weight tapered by a Gaussian readout beam of 1/e^2 radius ``beam_waist``.
    Longitudinal part: ``|sinc(dk_z L / 2)|`` over the cloud length.
    """
    if not beam_waist > 0:
        raise ValueError(f"beam waist must be positive, got {beam_waist}")
    dkx = float(readout_k[0]) - wave.k_transverse[0]
    dky = float(readout_k[1]) - wave.k_transverse[1]
    if dkx == 0 and dky == 0:
        return 1.0

    g = wave.grid
    X, Y = g.mesh()
    weights = np.abs(wave.amplitude) ** 2
    if math.isfinite(beam_waist):
        weights = weights * np.exp(-2.0 * (X ** 2 + Y ** 2) / beam_waist ** 2)
    if weights.sum() == 0:
        weights = np.ones(g.shape)
    pixel = np.sinc(dkx * g.dx / (2 * np.pi)) * np.sinc(dky * g.dy / (2 * np.pi))
    # separable phase sum keeps this O(nx*ny) without a full complex mesh
    phase_x = np.exp(1j * dkx * X[0])
    phase_y = np.exp(1j * dky * Y[:, 0])
    overlap = abs(phase_y @ weights @ phase_x) * abs(pixel) / weights.sum()

    k0 = 2 * np.pi / wave.wavelength
    kz_read = math.sqrt(max(k0 ** 2 - float(readout_k[0]) ** 2 - float(readout_k[1]) ** 2, 0.0))
    kz_wave = math.sqrt(max(k0 ** 2 - wave.k_transverse[0] ** 2 - wave.k_transverse[1] ** 2, 0.0))
    longitudinal = abs(np.sinc((kz_read - kz_wave) * cloud.length / (2 * np.pi)))
    return float(min(1.0, overlap * longitudinal))


def retrieve_into(wave: SpinWave, channel: StorageChannel, readout_k, beam_waist: float,
                  cloud: AtomicCloud) -> ComplexFieldGrid:
    """Retrieved field emitted along ``readout_k`` rather than the matched direction."""
    c = crosstalk_coefficient(wave, readout_k, beam_waist, cloud)
    out = read_spinwave(wave, channel).scaled(c)
    return replace(out, carrier_k=(float(readout_k[0]), float(readout_k[1])))
