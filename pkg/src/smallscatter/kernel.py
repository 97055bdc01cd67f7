"""Helmholtz Green's function and the mirrored kernel cube."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import UniformLattice

__all__ = ["green", "green_r", "mirror_pad", "kernel_cube", "build_kernel_cube", "KernelCube"]


def green_r(r, k: float):
    """exp(ikr) / (4 pi r) for distances r > 0 (vectorized)."""
    r = np.asarray(r, dtype=float)
    return np.exp(1j * k * r) / (4 * math.pi * r)


def green(x, y, k: float):
    """Free-space Green's function G(x, y). Raises on coincident points."""
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    if np.any(r == 0):
        raise ValueError("Green's function is singular at x = y")
    out = green_r(r, k)
    return out[()] if out.ndim == 0 else out


def mirror_pad(a: np.ndarray, axes=None, length: int | None = None) -> np.ndarray:
    """Extend each axis of length b to ``length`` (default 2b-2) periodically.

    Entry t >= b of the padded axis takes the value at |length - t| when that
    is < b; slots reached by neither side are filled with zeros. With the
    default length this is the classic [1 2 3 4] -> [1 2 3 4 3 2].
    """
    a = np.asarray(a)
    if axes is None:
        axes = range(a.ndim)
    for ax in axes:
        b = a.shape[ax]
        if b < 2:
            raise ValueError("mirror padding needs at least 2 entries per axis")
        L = 2 * b - 2 if length is None else length
        if L < 2 * b - 2:
            raise ValueError(f"padded length {L} < 2b-2 = {2 * b - 2}")
        shape = list(a.shape)
        shape[ax] = L
        out = np.zeros(shape, dtype=a.dtype)
        idx = [slice(None)] * a.ndim
        idx[ax] = slice(0, b)
        out[tuple(idx)] = a
        # slot L - t holds entry t; for L = 2b-2 slot b-1 is shared, so b-2 copies
        n_mirror = min(b - 1, L - b)
        if n_mirror > 0:
            src = [slice(None)] * a.ndim
            src[ax] = slice(n_mirror, 0, -1)
            idx[ax] = slice(L - n_mirror, L)
            out[tuple(idx)] = a[tuple(src)]
        a = out
    return a


@dataclass(frozen=True)
class KernelCube:
    """Green's function on all lattice offsets, periodically extended.

    ``values[t1, t2, t3]`` holds G at offset d * (t1, t2, t3) for t < b and
    the mirrored (negative) offsets beyond; the zero offset holds 0.
    """

    b: int
    d: float
    k: float
    values: np.ndarray

    @property
    def side(self) -> int:
        return self.values.shape[0]


def kernel_cube(b: int, d: float, k: float, length: int | None = None) -> KernelCube:
    if b < 2:
        raise ValueError("kernel cube needs b >= 2")
    t = d * np.arange(b, dtype=float)
    r = np.sqrt(t[:, None, None] ** 2 + t[None, :, None] ** 2 + t[None, None, :] ** 2)
    r[0, 0, 0] = 1.0
    g = green_r(r, k)
    g[0, 0, 0] = 0.0
    values = mirror_pad(g, length=length)
    values.flags.writeable = False
    return KernelCube(b=b, d=d, k=k, values=values)


def build_kernel_cube(lat: UniformLattice, k: float, length: int | None = None) -> KernelCube:
    """Kernel cube of the lattice: replaces the dense M x M interaction matrix."""
    return kernel_cube(lat.b, lat.d, k, length)
