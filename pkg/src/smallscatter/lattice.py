"""Particle lattice, subcube partition and collocation grid geometry.

Every cube of values in this package is indexed ``[i1, i2, i3]`` with the
third index fastest (C order), so ``np.ravel_multi_index`` gives the linear
particle index.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "UniformLattice",
    "SubcubePartition",
    "CollocationGrid",
    "build_lattice",
    "particle_position",
    "partition",
    "collocation_grid",
    "report_points",
    "check_scales",
]


def _integer_cube_root(M: int) -> int | None:
    b = int(round(M ** (1.0 / 3.0)))
    for cand in (b - 1, b, b + 1):
        if cand > 0 and cand**3 == M:
            return cand
    return None


@dataclass(frozen=True)
class UniformLattice:
    """b x b x b particles on lattice nodes ``origin + d * (m1, m2, m3)``."""

    b: int
    d: float
    a: float
    kappa: float = 0.5
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def M(self) -> int:
        return self.b**3

    @property
    def side(self) -> float:
        return self.b * self.d

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.b, self.b, self.b)

    def axis(self) -> np.ndarray:
        """Node coordinates along one axis (origin component excluded)."""
        return self.d * np.arange(self.b, dtype=float)

    def positions(self) -> np.ndarray:
        """All particle positions, shape (M, 3), linear index order."""
        m = np.indices(self.shape).reshape(3, -1).T
        return np.asarray(self.origin, dtype=float) + self.d * m

    def index_of(self, linear: int) -> tuple[int, int, int]:
        return tuple(int(i) for i in np.unravel_index(linear, self.shape))

    def linear_index(self, m) -> int:
        return int(np.ravel_multi_index(tuple(m), self.shape))


@dataclass(frozen=True)
class CollocationGrid:
    """n x n x n cell centres of a uniform subdivision of a cube.

    Also used for the subcube centres of the reduced system, which form the
    same kind of grid.
    """

    n: int
    side: float = 1.0
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def spacing(self) -> float:
        return self.side / self.n

    @property
    def weight(self) -> float:
        """Cell volume, the quadrature weight of each centre."""
        return self.spacing**3

    @property
    def size(self) -> int:
        return self.n**3

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    def axis(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.spacing

    def positions(self) -> np.ndarray:
        c = np.indices(self.shape).reshape(3, -1).T
        return np.asarray(self.origin, dtype=float) + (c + 0.5) * self.spacing


@dataclass(frozen=True)
class SubcubePartition:
    """Split of the lattice domain into p_side**3 equal, disjoint subcubes."""

    p_side: int
    b: int
    side: float
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def P(self) -> int:
        return self.p_side**3

    @property
    def b_sub(self) -> float:
        return self.side / self.p_side

    @property
    def volume(self) -> float:
        return self.b_sub**3

    @property
    def centers(self) -> np.ndarray:
        return self.as_grid().positions()

    def as_grid(self) -> CollocationGrid:
        return CollocationGrid(self.p_side, self.side, self.origin)

    def axis_labels(self) -> np.ndarray:
        """Subcube index along one axis for each lattice node index."""
        # floor(m * d / b_sub) in exact integer arithmetic
        return (np.arange(self.b) * self.p_side) // self.b

    def labels(self) -> np.ndarray:
        """Linear subcube id of every particle, as a (b, b, b) cube."""
        ax = self.axis_labels()
        p = self.p_side
        return (ax[:, None, None] * p + ax[None, :, None]) * p + ax[None, None, :]

    def counts(self) -> np.ndarray:
        """Particles per subcube, shape (p_side,)*3."""
        per_axis = np.bincount(self.axis_labels(), minlength=self.p_side)
        return per_axis[:, None, None] * per_axis[None, :, None] * per_axis[None, None, :]


def build_lattice(
    M: int | None = None,
    kappa: float = 0.5,
    domain_side: float = 1.0,
    *,
    b: int | None = None,
    origin=(0.0, 0.0, 0.0),
) -> UniformLattice:
    """Lattice of M = b**3 particles filling a cube of side ``domain_side``.

    Exactly one of ``M`` (a perfect cube) or ``b`` must be given. The radius
    follows a = d**(3/(2-kappa)), i.e. one particle per d**3 with density 1.
    """
    if (M is None) == (b is None):
        raise ValueError("give exactly one of M or b")
    if not 0.0 <= kappa < 1.0:
        raise ValueError(f"kappa must lie in [0, 1), got {kappa}")
    if domain_side <= 0:
        raise ValueError("domain_side must be positive")
    if b is None:
        if M < 1:
            raise ValueError(f"M must be positive, got {M}")
        b = _integer_cube_root(int(M))
        if b is None:
            lo = int(math.floor(M ** (1.0 / 3.0)))
            while (lo + 1) ** 3 <= M:
                lo += 1
            while lo**3 > M:
                lo -= 1
            raise ValueError(
                f"M={M} is not a perfect cube; nearest cubes are "
                f"{lo**3} (b={lo}) and {(lo + 1)**3} (b={lo + 1})"
            )
    if b < 1:
        raise ValueError(f"b must be positive, got {b}")
    d = domain_side / b
    a = d ** (3.0 / (2.0 - kappa))
    if a / d > 0.1:
        warnings.warn(f"particle radius is not small against spacing (a/d={a / d:.3g})", stacklevel=2)
    return UniformLattice(b=int(b), d=d, a=a, kappa=kappa, origin=tuple(float(o) for o in origin))


def check_scales(lat: UniformLattice, k: float) -> None:
    """Warn when a << d << wavelength is visibly violated."""
    if lat.a / lat.d > 0.1:
        warnings.warn(f"a/d = {lat.a / lat.d:.3g} > 0.1", stacklevel=2)
    if k > 0:
        lam = 2 * math.pi / k
        if lat.d / lam > 0.1:
            warnings.warn(f"d/wavelength = {lat.d / lam:.3g} > 0.1", stacklevel=2)


def particle_position(lat: UniformLattice, m) -> np.ndarray:
    m = np.asarray(m)
    if m.shape != (3,) or np.any(m < 0) or np.any(m >= lat.b):
        raise IndexError(f"lattice index {tuple(m)} outside [0, {lat.b})^3")
    return np.asarray(lat.origin, dtype=float) + lat.d * m


def partition(lat: UniformLattice, p_side: int) -> SubcubePartition:
    if p_side < 1:
        raise ValueError("p_side must be positive")
    if p_side > lat.b:
        raise ValueError(f"p_side={p_side} exceeds particles per side b={lat.b}")
    if lat.b % p_side:
        warnings.warn(f"p_side={p_side} does not divide b={lat.b}; subcubes hold unequal counts", stacklevel=2)
    part = SubcubePartition(p_side=p_side, b=lat.b, side=lat.side, origin=lat.origin)
    if part.b_sub < 10 * lat.d:
        warnings.warn(f"subcube side {part.b_sub:.3g} is not much larger than d={lat.d:.3g}", stacklevel=2)
    return part


def collocation_grid(c_side: int, side: float = 1.0, origin=(0.0, 0.0, 0.0)) -> CollocationGrid:
    if c_side < 1:
        raise ValueError("c_side must be positive")
    return CollocationGrid(c_side, side, tuple(float(o) for o in origin))


def report_points(n: int = 5, side: float = 1.0) -> np.ndarray:
    """The n**3 table points {0, side/n, ..., (n-1) side/n}**3, x slowest."""
    t = side * np.arange(n) / n
    g = np.stack(np.meshgrid(t, t, t, indexing="ij"), axis=-1)
    return g.reshape(-1, 3)
