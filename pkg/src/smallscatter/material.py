"""Refraction-coefficient design: impedance h <-> refraction coefficient n."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

log = logging.getLogger(__name__)

SPHERE_CS = 4 * math.pi

__all__ = ["MaterialSpec", "branch_sqrt", "h_from_target_n", "n_from_h", "design", "SPHERE_CS"]


@dataclass(frozen=True)
class MaterialSpec:
    """Physical constants of the embedding experiment.

    ``h`` is the (constant) impedance function, N the particle density
    constant. A positive Im(h) is tolerated up to ``imag_h_threshold`` (with
    a warning) unless ``force`` is set.
    """

    k: float
    c_S: float = SPHERE_CS
    kappa: float = 0.5
    N: float = 1.0
    h: complex = 0j
    n0: complex = 1 + 0j
    alpha: tuple[float, float, float] = (1.0, 0.0, 0.0)
    imag_h_threshold: float = 1e-4
    force: bool = False

    def __post_init__(self):
        if not 0.0 <= self.kappa < 1.0:
            raise ValueError(f"kappa must lie in [0, 1), got {self.kappa}")
        if self.k < 0:
            raise ValueError("wave number must be non-negative")
        if self.N < 0:
            raise ValueError("particle density N must be non-negative")
        if self.c_S <= 0:
            raise ValueError("shape constant c_S must be positive")
        if abs(float(np.linalg.norm(self.alpha)) - 1.0) > 1e-12:
            raise ValueError(f"incident direction must be a unit vector, got {self.alpha}")
        if (complex(self.n0) ** 2).imag < 0:
            raise ValueError("Im(n0^2) must be non-negative")
        im_h = complex(self.h).imag
        if im_h > 0:
            if im_h > self.imag_h_threshold and not self.force:
                raise ValueError(
                    f"Im(h)={im_h:.3g} > 0 exceeds threshold {self.imag_h_threshold:g}; set force=True to override"
                )
            log.warning("Im(h)=%.3g > 0: outside the passive-particle regime, accepted as a small perturbation", im_h)


def branch_sqrt(z):
    """Square root |z|^(1/2) exp(i phi/2) with phi = arg z taken in [0, 2 pi).

    The cut runs along the positive real axis, so results lie in the closed
    upper half plane and a target like -1 + 0.001i is reachable.
    """
    z = np.asarray(z, dtype=complex)
    phi = np.mod(np.angle(z), 2 * np.pi)
    # arguments just below the cut can round up to exactly 2 pi
    phi = np.where(phi >= 2 * np.pi, 0.0, phi)
    out = np.sqrt(np.abs(z)) * np.exp(0.5j * phi)
    return out[()] if out.ndim == 0 else out


def h_from_target_n(n_target: complex, spec: MaterialSpec) -> complex:
    """Impedance that turns the background n0 into ``n_target``."""
    if spec.N == 0:
        raise ValueError("N = 0: without particles the medium cannot change")
    if spec.k <= 0:
        raise ValueError("k must be positive")
    n_target = complex(n_target)
    p = spec.k**2 * (complex(spec.n0) ** 2 - n_target**2)
    return p / (spec.c_S * spec.N)


def n_from_h(spec: MaterialSpec) -> complex:
    """Refraction coefficient of the limiting medium for the spec's h."""
    n2 = complex(spec.n0) ** 2 - spec.c_S * complex(spec.h) * spec.N / spec.k**2
    return complex(branch_sqrt(n2))


def n_squared(spec: MaterialSpec) -> complex:
    return complex(spec.n0) ** 2 - spec.c_S * complex(spec.h) * spec.N / spec.k**2


def design(n_target: complex, spec: MaterialSpec, *, force: bool | None = None) -> MaterialSpec:
    """Return ``spec`` with h set so the medium has refraction ``n_target``."""
    h = h_from_target_n(n_target, spec)
    return replace(spec, h=h, force=spec.force if force is None else force)


def coupling_density(spec: MaterialSpec) -> complex:
    """p = c_S N h, the coefficient of the limiting integral equation."""
    return spec.c_S * spec.N * complex(spec.h)
