"""Photon counting: gated intensified CCD frames and an SPCM with dead time.

All randomness goes through explicit seeds. Frame ``i`` of a stream whose
base seed is ``s`` is drawn from ``numpy.random.default_rng(s + i)``, so
frames can be produced in any order or in parallel and still sum to the
same accumulated image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CCDModel:
    """Gated camera.

    One exposure integrates ``gates_per_exposure`` gate openings of width
    ``gate_width``; the intensity map passed to :func:`expose_frame` is per
    gate (per probe pulse). Rates are counts per pixel per second of open gate.
    """

    shape: tuple[int, int] = (256, 256)
    sensor_extent: tuple[float, float] = (13.3e-3, 13.3e-3)
    quantum_efficiency: float = 0.25
    dark_rate: float = 0.0
    coupling_scatter_rate: float = 0.0
    gate_width: float = 500e-9
    gate_delay: float = 0.0
    gates_per_exposure: int = 1

    def __post_init__(self):
        if not 0.0 <= self.quantum_efficiency <= 1.0:
            raise ValueError("quantum_efficiency must lie in [0, 1]")
        if self.dark_rate < 0 or self.coupling_scatter_rate < 0:
            raise ValueError("count rates must be >= 0")
        if self.gate_width <= 0 or self.gates_per_exposure < 1:
            raise ValueError("gate_width must be > 0 and gates_per_exposure >= 1")

    @property
    def gate(self) -> tuple[float, float]:
        return (self.gate_delay, self.gate_delay + self.gate_width)

    @property
    def background_per_pixel(self) -> float:
        """Expected background counts per pixel per exposure."""
        return (self.dark_rate + self.coupling_scatter_rate) * self.gate_width * self.gates_per_exposure


@dataclass(frozen=True)
class SPCMModel:
    dead_time: float = 50e-9
    efficiency: float = 1.0

    def __post_init__(self):
        if self.dead_time < 0 or not 0.0 < self.efficiency <= 1.0:
            raise ValueError("dead_time must be >= 0 and efficiency in (0, 1]")


@dataclass(frozen=True)
class DetectorFrame:
    counts: np.ndarray
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.counts.dtype.kind not in "iu" or np.any(self.counts < 0):
            raise ValueError("frame counts must be nonnegative integers")


def scatter_rate_vs_angle(angle: float, anchors: tuple[tuple[float, float], tuple[float, float]],
                          power_ratio: float = 1.0) -> float:
    """Coupling-scatter rate, exponential in probe-coupling angle.

    ``anchors`` are two ``(angle, rate)`` points; the rate is scaled linearly by
    the coupling power relative to the power the anchors were taken at.
    """
    (a0, r0), (a1, r1) = anchors
    if r0 < 0 or r1 < 0:
        raise ValueError("scatter anchor rates must be >= 0")
    if r0 == 0 or r1 == 0:
        return 0.0
    if a0 == a1:
        raise ValueError("scatter anchors need distinct angles")
    if r1 > r0 and a1 > a0 or r1 < r0 and a1 < a0:
        raise ValueError("scatter rate must decrease with angle")
    return power_ratio * r0 * (r1 / r0) ** ((angle - a0) / (a1 - a0))


def gate_overlap(arrival_window: tuple[float, float], gate: tuple[float, float]) -> float:
    """Fraction of a uniformly spread arrival window that falls inside the gate."""
    t0, t1 = arrival_window
    if t1 <= t0:
        return 1.0 if gate[0] <= t0 <= gate[1] else 0.0
    lo, hi = max(t0, gate[0]), min(t1, gate[1])
    return max(0.0, hi - lo) / (t1 - t0)


def expected_counts(intensity_map: np.ndarray, arrival_window, ccd: CCDModel,
                    background: np.ndarray | float | None = None) -> np.ndarray:
    """Mean counts per pixel for one exposure.

    ``background`` overrides the uniform rate-based background with a per-pixel
    map (counts per exposure), used when regions see different scatter.
    """
    I = np.asarray(intensity_map, dtype=float)
    if np.any(I < 0):
        raise ValueError("intensity map must be nonnegative")
    signal = ccd.quantum_efficiency * gate_overlap(arrival_window, ccd.gate) * I * ccd.gates_per_exposure
    bg = ccd.background_per_pixel if background is None else background
    return signal + bg


def expose_frame(intensity_map: np.ndarray, arrival_window, ccd: CCDModel, rng_seed: int,
                 background=None) -> DetectorFrame:
    mean = expected_counts(intensity_map, arrival_window, ccd, background)
    rng = np.random.default_rng(rng_seed)
    counts = rng.poisson(mean).astype(np.int64)
    meta = {
        "gate_delay": ccd.gate_delay,
        "gate_width": ccd.gate_width,
        "gates": ccd.gates_per_exposure,
        "arrival_start": float(arrival_window[0]),
        "arrival_stop": float(arrival_window[1]),
        "seed": int(rng_seed),
    }
    return DetectorFrame(counts, meta)


def accumulate(frames) -> np.ndarray:
    frames = list(frames)
    if not frames:
        raise ValueError("nothing to accumulate")
    shape = frames[0].counts.shape
    total = np.zeros(shape, dtype=np.int64)
    for f in frames:
        if f.counts.shape != shape:
            raise ValueError(f"frame shape {f.counts.shape} does not match {shape}")
        total += f.counts
    return total.astype(float)


def accumulate_exposures(mean: np.ndarray, n_frames: int, base_seed: int, groups: int = 1):
    """Sum ``n_frames`` Poisson exposures of ``mean`` without keeping the frames.

    Returns ``(sums, totals)``: ``sums`` has shape ``(groups, *mean.shape)``,
    frame ``i`` landing in group ``i % groups``; ``totals`` holds each frame's
    total count.
    """
    sums = np.zeros((groups,) + mean.shape, dtype=np.int64)
    totals = np.empty(n_frames, dtype=np.int64)
    for i in range(n_frames):
        counts = np.random.default_rng(base_seed + i).poisson(mean)
        sums[i % groups] += counts
        totals[i] = counts.sum()
    return sums, totals


def subtract_background(image: np.ndarray, background: np.ndarray, clamp: bool = True) -> np.ndarray:
    image = np.asarray(image, dtype=float)
    background = np.asarray(background, dtype=float)
    if image.shape != background.shape:
        raise ValueError(f"image shape {image.shape} does not match background {background.shape}")
    diff = image - background
    return np.clip(diff, 0.0, None) if clamp else diff


def _registered_counts(arrivals: np.ndarray, dead_time: float) -> np.ndarray:
    """Non-paralyzable dead time over rows of sorted arrival times (NaN = no photon)."""
    n, k = arrivals.shape
    registered = np.zeros(n, dtype=np.int64)
    last = np.full(n, -np.inf)
    for j in range(k):
        t = arrivals[:, j]
        hit = ~np.isnan(t) & (t - last >= dead_time)
        registered += hit
        last = np.where(hit, t, last)
    return registered


def spcm_estimate(true_mean_photons_per_pulse: float, pulse_width: float, spcm: SPCMModel,
                  n_pulses: int, rng_seed: int, poisson: bool = True) -> float:
    """Photons per pulse as inferred from SPCM counts.

    Arrivals are uniform over the pulse; their number per pulse is Poisson
    (or, with ``poisson=False``, fixed to the rounded mean). Each arrival is
    detected with the SPCM efficiency, and a detection is dropped if it comes
    within ``dead_time`` of the previous registered one. The registered total
    is divided by efficiency and pulse count.
    """
    if not pulse_width > 0:
        raise ValueError("pulse_width must be > 0")
    if n_pulses < 1:
        raise ValueError("n_pulses must be >= 1")
    rng = np.random.default_rng(rng_seed)
    if poisson:
        n_photons = rng.poisson(true_mean_photons_per_pulse, n_pulses)
    else:
        n_photons = np.full(n_pulses, int(round(true_mean_photons_per_pulse)))
    if spcm.efficiency < 1.0:
        n_photons = rng.binomial(n_photons, spcm.efficiency)
    kmax = int(n_photons.max(initial=0))
    if kmax == 0:
        return 0.0
    registered = 0
    # process in chunks to bound memory at large means
    chunk = max(1, 4_000_000 // kmax)
    for start in range(0, n_pulses, chunk):
        k = n_photons[start:start + chunk]
        t = rng.uniform(0.0, pulse_width, (k.size, kmax))
        t[np.arange(kmax)[None, :] >= k[:, None]] = np.nan
        t.sort(axis=1)  # NaNs sort last
        registered += int(_registered_counts(t, spcm.dead_time).sum())
    return registered / spcm.efficiency / n_pulses


def saturation_bound(pulse_width: float, dead_time: float) -> int:
    """Most detections a non-paralyzable counter can register within one pulse."""
    if dead_time <= 0:
        return math.inf
    return int(math.floor(pulse_width / dead_time)) + 1
