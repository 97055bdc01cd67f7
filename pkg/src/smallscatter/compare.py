"""Difference metric between solutions living on different grids.

For a fine sample set A and a coarse set B, every A value is compared with
the B value of the B cell containing it; the absolute differences are
averaged per subcube of a partition and the worst subcube mean is the
metric. With B equal to the partition itself this is exactly

    sup_q  1/N(q) * sum_{x_i in q} |x_i - y_q| .
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import SubcubePartition

__all__ = ["DiffReport", "GridSpec", "diff_grids", "diff_ori_red", "axis_cells", "nearest_diff"]


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid of n samples per axis over [origin, origin + side).

    ``centered`` samples sit at cell centres (i + 0.5) h, otherwise at the
    lattice nodes i h.
    """

    n: int
    centered: bool

    def cells(self, n_cells: int) -> np.ndarray:
        """Index of the cell, out of n_cells equal cells, holding each sample."""
        i = np.arange(self.n)
        if self.centered:
            return ((2 * i + 1) * n_cells) // (2 * self.n)
        return (i * n_cells) // self.n


def axis_cells(n: int, centered: bool, n_cells: int) -> np.ndarray:
    return GridSpec(n, centered).cells(n_cells)


@dataclass
class DiffReport:
    metric: float
    pair: str
    per_subcube: np.ndarray

    @property
    def rounded(self) -> float:
        return round(self.metric, 4)

    def rows(self):
        """(subcube id, mean absolute difference) pairs."""
        return list(enumerate(self.per_subcube.ravel().tolist()))


def diff_grids(
    u_a: np.ndarray,
    u_b: np.ndarray,
    part: SubcubePartition,
    *,
    a_centered: bool,
    b_centered: bool = True,
    pair: str = "",
) -> DiffReport:
    """Sup over subcubes of the mean |a_i - b(cell(a_i))| of A points in it.

    ``u_a`` and ``u_b`` are cubes on tensor grids spanning the partition's
    domain (nodes or cell centres, see GridSpec).
    """
    u_a, u_b = np.asarray(u_a), np.asarray(u_b)
    if u_a.ndim != 3 or u_b.ndim != 3:
        raise ValueError("expected value cubes")
    na, nb = u_a.shape[0], u_b.shape[0]
    ga = GridSpec(na, a_centered)
    to_b = ga.cells(nb)
    diff = np.abs(u_a - u_b[np.ix_(to_b, to_b, to_b)])

    p = part.p_side
    to_q = ga.cells(p)
    per_axis = np.bincount(to_q, minlength=p)
    counts = per_axis[:, None, None] * per_axis[None, :, None] * per_axis[None, None, :]
    if np.any(counts == 0):
        raise ValueError("partition has subcubes without samples; use a coarser partition")
    # reduce one axis at a time: sum over samples sharing a subcube index
    s = diff
    for ax in range(3):
        s = np.add.reduceat(np.moveaxis(s, ax, 0), _starts(to_q), axis=0)
        s = np.moveaxis(s, 0, ax)
    means = s / counts
    return DiffReport(metric=float(means.max()), pair=pair, per_subcube=means)


def _starts(labels: np.ndarray) -> np.ndarray:
    # labels are non-decreasing; first index of each run
    return np.flatnonzero(np.r_[True, labels[1:] != labels[:-1]])


def diff_ori_red(u_ori: np.ndarray, u_red: np.ndarray, part: SubcubePartition) -> DiffReport:
    """Particle values against the reduced-system value of their subcube."""
    if u_ori.shape != (part.b,) * 3:
        raise ValueError(f"ORI cube {u_ori.shape} does not match partition lattice b={part.b}")
    if u_red.shape != (part.p_side,) * 3:
        raise ValueError(f"RED cube {u_red.shape} does not match p_side={part.p_side}")
    return diff_grids(u_ori, u_red, part, a_centered=False, b_centered=True, pair="ORI-RED")


def nearest_diff(
    pts_a: np.ndarray, vals_a: np.ndarray, pts_b: np.ndarray, vals_b: np.ndarray, p_side: int, side: float = 1.0,
    origin=(0.0, 0.0, 0.0), pair: str = "",
) -> DiffReport:
    """Metric for two scattered point tables.

    Each A point is compared with the nearest B point and the differences
    are averaged per subcube of a p_side**3 partition of the cube.
    """
    from scipy.spatial import cKDTree

    pts_a = np.asarray(pts_a, dtype=float)
    pts_b = np.asarray(pts_b, dtype=float)
    _, nn = cKDTree(pts_b).query(pts_a)
    diff = np.abs(np.asarray(vals_a) - np.asarray(vals_b)[nn])
    rel = (pts_a - np.asarray(origin, dtype=float)) / side
    cell = np.clip(np.floor(rel * p_side + 1e-9).astype(int), 0, p_side - 1)
    lab = np.ravel_multi_index(cell.T, (p_side,) * 3)
    counts = np.bincount(lab, minlength=p_side**3)
    sums = np.bincount(lab, weights=diff, minlength=p_side**3)
    if np.any(counts == 0):
        raise ValueError(f"{int((counts == 0).sum())} of {p_side**3} subcubes hold no points of the first table")
    means = sums / counts
    return DiffReport(metric=float(means.max()), pair=pair, per_subcube=means.reshape((p_side,) * 3))
