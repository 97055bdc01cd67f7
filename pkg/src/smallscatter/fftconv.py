"""FFT matrix-free application of the lattice interaction matrix.

The dense sum  sum_{m != j} G(x_j - x_m) u_m  is a linear 3D convolution of
the field cube with the kernel cube. It is computed as a cyclic convolution
on the (2b-2)**3 padded cubes (kernel mirrored, field zero-padded), then
cropped back to b**3.
"""
from __future__ import annotations

import functools
import os
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .kernel import KernelCube, kernel_cube
from .lattice import UniformLattice
from .material import MaterialSpec

__all__ = ["SpectralKernel", "spectral_kernel", "convolve", "ori_apply", "fft_workers", "PRECISIONS"]

PRECISIONS = {"double": np.complex128, "single": np.complex64}


def fft_workers() -> int:
    """Thread count for the FFTs, from ``SMALLSCATTER_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("SMALLSCATTER_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SpectralKernel:
    b: int
    d: float
    k: float
    spectrum: np.ndarray

    @property
    def side(self) -> int:
        return self.spectrum.shape[0]

    @property
    def dtype(self):
        return self.spectrum.dtype

    @classmethod
    def from_kernel(cls, kc: KernelCube, precision: str = "double") -> "SpectralKernel":
        dtype = PRECISIONS[precision]
        spec = sfft.fftn(kc.values.astype(dtype, copy=False), workers=fft_workers())
        spec.flags.writeable = False
        return cls(b=kc.b, d=kc.d, k=kc.k, spectrum=spec)


@functools.lru_cache(maxsize=4)
def _cached_spectral_kernel(b: int, d: float, k: float, precision: str, length: int | None) -> SpectralKernel:
    return SpectralKernel.from_kernel(kernel_cube(b, d, k, length), precision)


def spectral_kernel(
    b: int, d: float, k: float, precision: str = "double", fast_len: bool = False
) -> SpectralKernel:
    """Forward FFT of the kernel cube; cached per (b, d, k, precision, size).

    ``fast_len`` rounds the padded size up to the next FFT-friendly length.
    """
    if precision not in PRECISIONS:
        raise ValueError(f"precision must be one of {sorted(PRECISIONS)}")
    if b < 2:
        raise ValueError("spectral kernel needs b >= 2")
    length = sfft.next_fast_len(2 * b - 2) if fast_len else None
    return _cached_spectral_kernel(int(b), float(d), float(k), precision, length)


def lattice_kernel(lat: UniformLattice, k: float, precision: str = "double", fast_len: bool = False):
    return spectral_kernel(lat.b, lat.d, k, precision, fast_len)


def convolve(sk: SpectralKernel, u: np.ndarray) -> np.ndarray:
    """sum_{m != j} G(x_j - x_m) u(x_m) for every node j, as a (b, b, b) cube."""
    u = np.asarray(u)
    b = sk.b
    if u.shape != (b, b, b):
        raise ValueError(f"field shape {u.shape} does not match kernel for b={b}")
    workers = fft_workers()
    L = sk.side
    fu = sfft.fftn(u.astype(sk.dtype, copy=False), s=(L, L, L), workers=workers)
    fu *= sk.spectrum
    out = sfft.ifftn(fu, overwrite_x=True, workers=workers)
    return out[:b, :b, :b]


def coupling(spec: MaterialSpec, lat: UniformLattice) -> float:
    """c_S a^(2-kappa), the per-particle weight in the original system."""
    return spec.c_S * lat.a ** (2.0 - spec.kappa)


def ori_apply(sk: SpectralKernel, spec: MaterialSpec, lat: UniformLattice, u: np.ndarray, h=None) -> np.ndarray:
    """Left-hand side of the original system: u + c_S a^(2-kappa) G (h u).

    ``h`` overrides ``spec.h`` and may be a (b, b, b) cube.
    """
    h = spec.h if h is None else h
    return u + coupling(spec, lat) * convolve(sk, h * u)
