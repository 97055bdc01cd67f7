"""The three formulations of the many-particle scattering problem.

ORI  one unknown per particle (effective field), solved matrix-free by COCG
     on the FFT convolution.
RED  one unknown per subcube of a coarse partition, dense operator.
IE   collocation of the limiting integral equation on cell centres, using
     the same FFT engine since the centres form a uniform grid.
"""
from __future__ import annotations

import logging
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import fftconv
from .kernel import green_r
from .lattice import CollocationGrid, UniformLattice, collocation_grid, partition, report_points
from .material import MaterialSpec, coupling_density
from .solvers import SolveOptions, SolveReport, solve

log = logging.getLogger(__name__)

FORMULATIONS = ("ORI", "RED", "IE")

__all__ = [
    "FORMULATIONS",
    "ScatteringConfig",
    "Charges",
    "incident_field",
    "solve_ori",
    "solve_red",
    "solve_ie",
    "solve_formulation",
    "charges",
    "evaluate_field",
    "field_from_sources",
    "report_values",
    "dense_green_matrix",
    "ori_operator",
    "red_matrix",
    "ie_operator",
]


@dataclass(frozen=True)
class ScatteringConfig:
    lat: UniformLattice
    spec: MaterialSpec
    formulation: str = "ORI"
    p_side: int = 20
    c_side: int = 40
    solve: SolveOptions = field(default_factory=SolveOptions)
    precision: str = "double"
    method: str | None = None
    fast_fft: bool = False

    def __post_init__(self):
        if self.formulation not in FORMULATIONS:
            raise ValueError(f"formulation must be one of {FORMULATIONS}, got {self.formulation!r}")
        if self.precision not in fftconv.PRECISIONS:
            raise ValueError(f"precision must be one of {sorted(fftconv.PRECISIONS)}")
        if abs(self.lat.kappa - self.spec.kappa) > 1e-12:
            raise ValueError(f"lattice kappa {self.lat.kappa} differs from material kappa {self.spec.kappa}")
        density = self.lat.a ** (2 - self.lat.kappa) * self.lat.M / self.lat.side**3
        if self.spec.N > 0 and abs(density / self.spec.N - 1) > 1e-6:
            warnings.warn(f"lattice density {density:.6g} differs from N={self.spec.N:g}", stacklevel=2)

    @property
    def dtype(self):
        return fftconv.PRECISIONS[self.precision]

    def with_formulation(self, formulation: str) -> "ScatteringConfig":
        return replace(self, formulation=formulation)


@dataclass(frozen=True)
class Charges:
    """Monopole strength Q_m of each particle, as a (b, b, b) cube."""

    Q: np.ndarray


def incident_field(spec: MaterialSpec, x) -> np.ndarray:
    """Plane wave exp(i k alpha . x) at points x of shape (..., 3)."""
    x = np.asarray(x, dtype=float)
    out = np.exp(1j * spec.k * (x @ np.asarray(spec.alpha, dtype=float)))
    return out[()] if out.ndim == 0 else out


def _incident_on_axes(spec: MaterialSpec, origin, axis: np.ndarray) -> np.ndarray:
    # separable plane wave on a tensor grid, avoids materializing positions
    a = np.asarray(spec.alpha, dtype=float)
    o = np.asarray(origin, dtype=float)
    f = [np.exp(1j * spec.k * a[i] * (o[i] + axis)) for i in range(3)]
    return f[0][:, None, None] * f[1][None, :, None] * f[2][None, None, :]


def dense_green_matrix(points: np.ndarray, k: float, dtype=np.complex128, chunk: int = 512) -> np.ndarray:
    """G(x_i, x_j) for all pairs, zero on the diagonal."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    G = np.empty((n, n), dtype=dtype)
    for s in range(0, n, chunk):
        blk = points[s : s + chunk]
        r = np.sqrt(((blk[:, None, :] - points[None, :, :]) ** 2).sum(-1))
        rows = np.arange(len(blk))
        r[rows, s + rows] = 1.0
        g = green_r(r, k)
        g[rows, s + rows] = 0.0
        G[s : s + chunk] = g
    return G


# ---- ORI -------------------------------------------------------------------


def ori_operator(cfg: ScatteringConfig, h=None):
    lat, spec = cfg.lat, cfg.spec
    if lat.b < 2:
        return lambda u: u
    sk = fftconv.lattice_kernel(lat, spec.k, cfg.precision, cfg.fast_fft)
    return lambda u: fftconv.ori_apply(sk, spec, lat, u, h)


def solve_ori(cfg: ScatteringConfig, h=None) -> SolveReport:
    """Effective field at every particle; ``report.solution`` is a (b, b, b) cube.

    A non-constant ``h`` cube breaks the complex symmetry of the operator,
    so the default method then switches to GMRES.
    """
    t0 = time.perf_counter()
    lat, spec = cfg.lat, cfg.spec
    rhs = _incident_on_axes(spec, lat.origin, lat.axis()).astype(cfg.dtype)
    method = cfg.method or ("cocg" if np.ndim(h) == 0 else "gmres")
    rep = solve(ori_operator(cfg, h), rhs, cfg.solve, method)
    rep.formulation = "ORI"
    rep.elapsed = time.perf_counter() - t0
    log.info("ORI M=%d: %d its, rel res %.3e", lat.M, rep.iterations, rep.rel_residual)
    return rep


def charges(u_e: np.ndarray, lat: UniformLattice, spec: MaterialSpec, h=None) -> Charges:
    h = spec.h if h is None else h
    return Charges(-spec.c_S * lat.a ** (2 - spec.kappa) * h * np.asarray(u_e))


def field_from_sources(
    x, src_positions: np.ndarray, strengths: np.ndarray, spec: MaterialSpec, skip_tol: float = 1e-9
) -> np.ndarray:
    """u0(x) + sum_s G(x, y_s) q_s, skipping sources that coincide with x."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    src = np.asarray(src_positions, dtype=float).reshape(-1, 3)
    q = np.asarray(strengths).ravel().astype(complex)
    out = incident_field(spec, x).astype(complex)
    for i, xi in enumerate(x):
        r = np.sqrt(((src - xi) ** 2).sum(-1))
        near = r <= skip_tol
        r[near] = 1.0
        g = green_r(r, spec.k)
        g[near] = 0.0
        out[i] += g @ q
    return out


def evaluate_field(x, q: Charges, lat: UniformLattice, spec: MaterialSpec) -> np.ndarray:
    """Total field u0(x) + sum_m G(x, x_m) Q_m from the particle charges."""
    return field_from_sources(x, lat.positions(), q.Q, spec, skip_tol=1e-9 * lat.d)


# ---- RED -------------------------------------------------------------------


def red_matrix(cfg: ScatteringConfig) -> np.ndarray:
    """Dense P x P operator I + c_S h N |Delta| G (no self term)."""
    part = partition(cfg.lat, cfg.p_side)
    G = dense_green_matrix(part.centers, cfg.spec.k, dtype=cfg.dtype)
    G *= coupling_density(cfg.spec) * part.volume
    G[np.diag_indices_from(G)] = 1.0
    return G


def solve_red(cfg: ScatteringConfig) -> SolveReport:
    """Field at subcube centres; ``report.solution`` is a (p, p, p) cube."""
    t0 = time.perf_counter()
    part = partition(cfg.lat, cfg.p_side)
    grid = part.as_grid()
    rhs = _incident_on_axes(cfg.spec, grid.origin, grid.axis()).astype(cfg.dtype)
    if coupling_density(cfg.spec) == 0:
        A = None
        op = lambda u: u  # noqa: E731
    else:
        A = red_matrix(cfg)
        op = lambda u: (A @ u.ravel()).reshape(u.shape)  # noqa: E731
    rep = solve(op, rhs, cfg.solve, cfg.method or "gmres")
    rep.formulation = "RED"
    rep.elapsed = time.perf_counter() - t0
    log.info("RED P=%d: %d its, rel res %.3e", part.P, rep.iterations, rep.rel_residual)
    return rep


# ---- IE --------------------------------------------------------------------


def ie_grid(cfg: ScatteringConfig) -> CollocationGrid:
    return collocation_grid(cfg.c_side, cfg.lat.side, cfg.lat.origin)


def ie_operator(cfg: ScatteringConfig, dense: bool = False):
    """u + p w sum_{c' != c} G(x_c, x_c') u_c' with p = c_S N h, w = cell volume."""
    grid = ie_grid(cfg)
    scale = coupling_density(cfg.spec) * grid.weight
    if scale == 0 or grid.n < 2:
        return lambda u: u
    if dense:
        A = dense_green_matrix(grid.positions(), cfg.spec.k, dtype=cfg.dtype) * scale
        A[np.diag_indices_from(A)] = 1.0
        return lambda u: (A @ u.ravel()).reshape(u.shape)
    sk = fftconv.spectral_kernel(grid.n, grid.spacing, cfg.spec.k, cfg.precision, cfg.fast_fft)
    return lambda u: u + scale * fftconv.convolve(sk, u)


def solve_ie(cfg: ScatteringConfig, dense: bool = False) -> SolveReport:
    """Field at collocation centres; ``report.solution`` is a (c, c, c) cube."""
    t0 = time.perf_counter()
    grid = ie_grid(cfg)
    rhs = _incident_on_axes(cfg.spec, grid.origin, grid.axis()).astype(cfg.dtype)
    rep = solve(ie_operator(cfg, dense), rhs, cfg.solve, cfg.method or "gmres")
    rep.formulation = "IE"
    rep.elapsed = time.perf_counter() - t0
    log.info("IE C=%d: %d its, rel res %.3e", grid.size, rep.iterations, rep.rel_residual)
    return rep


def solve_formulation(cfg: ScatteringConfig) -> SolveReport:
    return {"ORI": solve_ori, "RED": solve_red, "IE": solve_ie}[cfg.formulation](cfg)


# ---- field at arbitrary points ---------------------------------------------


def sources(cfg: ScatteringConfig, rep: SolveReport) -> tuple[np.ndarray, np.ndarray, float]:
    """Source positions, strengths and coincidence tolerance of a solution.

    The field anywhere is then u0(x) + sum G(x, y_s) q_s.
    """
    spec = cfg.spec
    u = np.asarray(rep.solution, dtype=complex)
    if rep.formulation == "ORI":
        return cfg.lat.positions(), charges(u, cfg.lat, spec).Q, 1e-9 * cfg.lat.d
    if rep.formulation == "RED":
        part = partition(cfg.lat, cfg.p_side)
        q = -coupling_density(spec) * part.volume * u
        return part.centers, q, 1e-9 * part.b_sub
    if rep.formulation == "IE":
        grid = ie_grid(cfg)
        q = -coupling_density(spec) * grid.weight * u
        return grid.positions(), q, 1e-9 * grid.spacing
    raise ValueError(rep.formulation)


def report_values(cfg: ScatteringConfig, rep: SolveReport, points=None, n: int = 5) -> tuple[np.ndarray, np.ndarray]:
    """Field of a solved formulation at the report grid (or given points)."""
    if points is None:
        points = report_points(n, cfg.lat.side) + np.asarray(cfg.lat.origin)
    pos, q, tol = sources(cfg, rep)
    return points, field_from_sources(points, pos, q, cfg.spec, skip_tol=tol)
