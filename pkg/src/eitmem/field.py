"""Transverse complex fields and Fourier-optics propagation.

Amplitudes are stored in sqrt-photon units per sample, so ``energy`` of a
field is directly the expected photon number it carries. Arrays are indexed
``[y, x]`` with the optical axis at sample ``(ny // 2, nx // 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

DEFAULT_WAVELENGTH = 795e-9

# Fraction of output energy allowed in the outer border before a lens
# transform is flagged as aliased.
_ALIAS_BORDER = 1.0 / 16.0
_ALIAS_TOL = 1e-6


@dataclass(frozen=True)
class TransverseGrid:
    nx: int
    ny: int
    dx: float
    dy: float

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"grid needs at least 2x2 samples, got {self.nx}x{self.ny}")
        if not (np.isfinite(self.dx) and np.isfinite(self.dy)) or self.dx <= 0 or self.dy <= 0:
            raise ValueError(f"grid pitch must be finite and positive, got dx={self.dx}, dy={self.dy}")

    @classmethod
    def square(cls, n: int, pitch: float) -> "TransverseGrid":
        return cls(n, n, pitch, pitch)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def extent(self) -> tuple[float, float]:
        return (self.nx * self.dx, self.ny * self.dy)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """1-D sample coordinates (x, y) in meters, zero at the optical axis."""
        x = (np.arange(self.nx) - self.nx // 2) * self.dx
        y = (np.arange(self.ny) - self.ny // 2) * self.dy
        return x, y

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        x, y = self.coords()
        return np.meshgrid(x, y)

    def frequencies(self) -> tuple[np.ndarray, np.ndarray]:
        """Spatial frequencies (cycles/m) in unshifted FFT order, as a 2-D mesh."""
        fx = np.fft.fftfreq(self.nx, self.dx)
        fy = np.fft.fftfreq(self.ny, self.dy)
        return np.meshgrid(fx, fy)

    def fourier_plane(self, wavelength: float, focal_length: float) -> "TransverseGrid":
        """Grid of the back focal plane of a lens of the given focal length."""
        scale = wavelength * focal_length
        return TransverseGrid(self.nx, self.ny, scale / (self.nx * self.dx), scale / (self.ny * self.dy))


@dataclass(frozen=True)
class ComplexFieldGrid:
    """Sampled scalar field.

    ``carrier_k`` is a transverse wavevector (rad/m) riding on top of the
    sampled envelope. It is tracked analytically because the probe tilts are
    far too steep to sample at useful pitches.
    """

    grid: TransverseGrid
    amplitude: np.ndarray
    wavelength: float = DEFAULT_WAVELENGTH
    carrier_k: tuple[float, float] = (0.0, 0.0)
    aliased: bool = field(default=False, compare=False)

    def __post_init__(self):
        amp = np.array(self.amplitude, dtype=complex)
        if amp.shape != self.grid.shape:
            raise ValueError(f"amplitude shape {amp.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(amp)):
            raise ValueError("field amplitudes must be finite")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitude", amp)

    @classmethod
    def zeros(cls, grid: TransverseGrid, wavelength: float = DEFAULT_WAVELENGTH) -> "ComplexFieldGrid":
        return cls(grid, np.zeros(grid.shape, dtype=complex), wavelength)

    @property
    def intensity(self) -> np.ndarray:
        """Expected photons per sample."""
        return np.abs(self.amplitude) ** 2

    def with_amplitude(self, amplitude: np.ndarray, **changes) -> "ComplexFieldGrid":
        return replace(self, amplitude=amplitude, **changes)

    def scaled(self, factor: complex) -> "ComplexFieldGrid":
        return self.with_amplitude(self.amplitude * factor)

    def normalized(self, photons: float) -> "ComplexFieldGrid":
        """Rescale to carry ``photons`` expected photons."""
        e = energy(self)
        if photons == 0:
            return self.with_amplitude(np.zeros_like(self.amplitude))
        if e == 0:
            raise ValueError("cannot normalize a zero field to nonzero energy")
        return self.scaled(np.sqrt(photons / e))


@dataclass(frozen=True)
class OpticalLayout:
    """Two-lens relay: mask -f1- lens 1 -f1- cloud -f2- lens 2 -f2- camera."""

    f1: float = 0.300
    f2: float = 0.500

    def __post_init__(self):
        if not (self.f1 > 0 and self.f2 > 0):
            raise ValueError(f"focal lengths must be positive, got f1={self.f1}, f2={self.f2}")

    @property
    def spacings(self) -> tuple[float, float, float, float]:
        return (self.f1, self.f1, self.f2, self.f2)

    @property
    def magnification(self) -> float:
        return self.f2 / self.f1


def energy(field: ComplexFieldGrid) -> float:
    return float(np.sum(np.abs(field.amplitude) ** 2))


def _resample_bilinear(image: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    h, w = image.shape
    ny, nx = shape
    if (h, w) == (ny, nx):
        return image.astype(float)
    # sample centers of the target mapped onto source pixel centers
    yy = (np.arange(ny) + 0.5) * h / ny - 0.5
    xx = (np.arange(nx) + 0.5) * w / nx - 0.5
    Y, X = np.meshgrid(yy, xx, indexing="ij")
    return ndimage.map_coordinates(image.astype(float), [Y, X], order=1, mode="nearest")


def load_mask(image: np.ndarray, grid: TransverseGrid, total_photons: float,
              wavelength: float = DEFAULT_WAVELENGTH) -> ComplexFieldGrid:
    """Turn an 8-bit grayscale mask into a zero-phase field.

    The raster is stretched over the full grid with bilinear interpolation and
    treated as an intensity transmittance, so amplitude goes as
    ``sqrt(gray / 255)``. The result is rescaled to carry ``total_photons``.
    """
    image = np.asarray(image)
    if image.ndim != 2 or image.size == 0:
        raise ValueError("mask must be a nonempty 2-D raster")
    if total_photons < 0:
        raise ValueError(f"total_photons must be >= 0, got {total_photons}")
    gray = np.clip(_resample_bilinear(image, grid.shape), 0.0, 255.0)
    amp = np.sqrt(gray / 255.0)
    out = ComplexFieldGrid(grid, amp.astype(complex), wavelength)
    if total_photons == 0:
        return out.scaled(0.0)
    if not np.any(amp > 0):
        raise ValueError("mask is dark everywhere; cannot normalize to nonzero photon number")
    return out.normalized(total_photons)


def angular_spectrum_transfer(grid: TransverseGrid, wavelength: float, distance: float) -> np.ndarray:
    """Free-space transfer function in FFT order, evanescent part set to zero."""
    fx, fy = grid.frequencies()
    arg = 1.0 - (wavelength * fx) ** 2 - (wavelength * fy) ** 2
    propagating = arg > 0
    kz = 2 * np.pi / wavelength * np.sqrt(np.where(propagating, arg, 0.0))
    return np.where(propagating, np.exp(1j * kz * distance), 0.0)


def propagate_angular_spectrum(field: ComplexFieldGrid, distance: float) -> ComplexFieldGrid:
    """Propagate ``field`` by ``distance`` meters (negative goes backward)."""
    if not np.isfinite(distance):
        raise ValueError(f"propagation distance must be finite, got {distance}")
    if distance == 0:
        return field
    H = angular_spectrum_transfer(field.grid, field.wavelength, distance)
    spectrum = np.fft.fft2(np.fft.ifftshift(field.amplitude))
    out = np.fft.fftshift(np.fft.ifft2(spectrum * H))
    return field.with_amplitude(out)


def lens_transform(field: ComplexFieldGrid, focal_length: float) -> ComplexFieldGrid:
    """Front-focal-plane to back-focal-plane propagation through a thin lens.

    This is a unitary centered DFT; the output pitch is
    ``wavelength * focal_length / extent``. The constant ``-i`` phase of the
    Fresnel integral is kept so that two lenses in a row give the inverted
    image with a sign flip, as in a real relay.
    """
    if not focal_length > 0:
        raise ValueError(f"focal length must be positive, got {focal_length}")
    g = field.grid
    a = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(field.amplitude), norm="ortho"))
    a = -1j * a
    out_grid = g.fourier_plane(field.wavelength, focal_length)
    return ComplexFieldGrid(out_grid, a, field.wavelength, field.carrier_k, _border_energy_fraction(a) > _ALIAS_TOL)


def _border_energy_fraction(a: np.ndarray) -> float:
    I = np.abs(a) ** 2
    total = I.sum()
    if total == 0:
        return 0.0
    ny, nx = I.shape
    by = max(1, int(ny * _ALIAS_BORDER))
    bx = max(1, int(nx * _ALIAS_BORDER))
    inner = I[by:ny - by, bx:nx - bx].sum()
    return float((total - inner) / total)


def to_cloud_plane(field: ComplexFieldGrid, layout: OpticalLayout) -> ComplexFieldGrid:
    return lens_transform(field, layout.f1)


def to_camera_plane(field: ComplexFieldGrid, layout: OpticalLayout) -> ComplexFieldGrid:
    return lens_transform(field, layout.f2)


def relay_4f(field: ComplexFieldGrid, layout: OpticalLayout) -> ComplexFieldGrid:
    """Mask plane to camera plane: inverted image magnified by f2/f1."""
    return to_camera_plane(to_cloud_plane(field, layout), layout)
