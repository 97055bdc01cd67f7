"""Krylov solvers for the complex systems: COCG and restarted GMRES.

Both take the operator as a callable on arrays of the right-hand side's
shape, so field cubes are iterated on directly without flattening.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)

__all__ = ["SolveOptions", "SolveReport", "SolverError", "cocg", "gmres", "relative_residual", "solve"]

Operator = Callable[[np.ndarray], np.ndarray]


class SolverError(RuntimeError):
    """Iterates became non-finite."""


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 2e-5
    max_iter: int = 500
    restart: int = 30

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1 or self.restart < 1:
            raise ValueError("max_iter and restart must be positive")


@dataclass
class SolveReport:
    solution: np.ndarray
    iterations: int
    rel_residual: float
    converged: bool
    breakdown: bool = False
    formulation: str = ""
    method: str = ""
    elapsed: float = 0.0
    history: list[float] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "formulation": self.formulation,
            "method": self.method,
            "unknowns": int(self.solution.size),
            "iterations": self.iterations,
            "rel_residual": self.rel_residual,
            "converged": self.converged,
            "breakdown": self.breakdown,
        }


def _bilinear(a: np.ndarray, b: np.ndarray):
    # unconjugated: sum a_i b_i
    return np.dot(a.ravel(), b.ravel())


def relative_residual(apply: Operator, rhs: np.ndarray, x: np.ndarray) -> float:
    """||rhs - A x|| / ||rhs||, recomputed from scratch."""
    nb = np.linalg.norm(rhs)
    if nb == 0:
        return float(np.linalg.norm(apply(x)))
    return float(np.linalg.norm(rhs - apply(x)) / nb)


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise SolverError("non-finite values in Krylov iterate")


def cocg(apply: Operator, rhs: np.ndarray, opts: SolveOptions = SolveOptions(), x0=None) -> SolveReport:
    """Conjugate orthogonal CG for complex-symmetric A (A = A^T, not Hermitian).

    Same recurrence as CG with every inner product replaced by the
    unconjugated bilinear form. Convergence is declared only after the true
    residual is recomputed; if it disagrees with the recurrence the
    iteration restarts from the true residual.
    """
    t0 = time.perf_counter()
    rhs = np.asarray(rhs)
    nb = float(np.linalg.norm(rhs))
    if nb == 0:
        return SolveReport(np.zeros_like(rhs), 0, 0.0, True, method="cocg")

    x = np.zeros_like(rhs) if x0 is None else np.array(x0, dtype=rhs.dtype)
    r = rhs - apply(x) if x0 is not None else rhs.copy()
    p = r.copy()
    rho = _bilinear(r, r)
    history = [float(np.linalg.norm(r)) / nb]
    it = 0
    breakdown = False
    converged = False
    while it < opts.max_iter:
        if history[-1] <= opts.tol:
            true_res = relative_residual(apply, rhs, x)
            if true_res <= opts.tol:
                converged = True
                break
            r = rhs - apply(x)
            p = r.copy()
            rho = _bilinear(r, r)
        if abs(rho) <= np.finfo(float).tiny or abs(rho) <= 1e-30 * float(np.linalg.norm(r)) ** 2:
            breakdown = True
            break
        q = apply(p)
        pq = _bilinear(p, q)
        if not np.isfinite(pq):
            raise SolverError("non-finite value of <p, Ap>")
        if pq == 0:
            breakdown = True
            break
        alpha = rho / pq
        x = x + alpha * p
        r = r - alpha * q
        _check_finite(x, r)
        rho_new = _bilinear(r, r)
        beta = rho_new / rho
        rho = rho_new
        p = r + beta * p
        it += 1
        history.append(float(np.linalg.norm(r)) / nb)
        log.debug("cocg it=%d res=%.3e", it, history[-1])

    rel = relative_residual(apply, rhs, x)
    if not converged and not breakdown:
        converged = rel <= opts.tol
    if breakdown:
        log.warning("cocg breakdown after %d iterations (rel residual %.3e)", it, rel)
    return SolveReport(
        solution=x,
        iterations=it,
        rel_residual=rel,
        converged=converged and rel <= opts.tol,
        breakdown=breakdown,
        method="cocg",
        elapsed=time.perf_counter() - t0,
        history=history,
    )


def _givens(a, b):
    """Complex Givens rotation (c, s) with c real, zeroing b against a."""
    if b == 0:
        return 1.0, 0j
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    t = np.hypot(abs(a), abs(b))
    c = abs(a) / t
    s = (a / abs(a)) * np.conj(b) / t
    return c, s


def gmres(apply: Operator, rhs: np.ndarray, opts: SolveOptions = SolveOptions(), x0=None) -> SolveReport:
    """Restarted GMRES(m), Arnoldi with modified Gram-Schmidt and Givens QR."""
    t0 = time.perf_counter()
    rhs = np.asarray(rhs)
    shape, dtype = rhs.shape, rhs.dtype
    b = rhs.ravel()
    nb = float(np.linalg.norm(b))
    if nb == 0:
        return SolveReport(np.zeros_like(rhs), 0, 0.0, True, method="gmres")

    def A(v):
        return np.asarray(apply(v.reshape(shape))).ravel()

    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=dtype).ravel()
    m = opts.restart
    it = 0
    history = []
    converged = False
    while it < opts.max_iter:
        r = b - A(x) if it or x0 is not None else b.copy()
        beta = float(np.linalg.norm(r))
        history.append(beta / nb)
        if beta / nb <= opts.tol:
            converged = True
            break
        V = np.zeros((m + 1, b.size), dtype=dtype)
        H = np.zeros((m + 1, m), dtype=complex)
        cs = np.zeros(m)
        sn = np.zeros(m, dtype=complex)
        g = np.zeros(m + 1, dtype=complex)
        g[0] = beta
        V[0] = r / beta
        j_used = 0
        for j in range(m):
            w = A(V[j])
            _check_finite(w)
            for i in range(j + 1):
                H[i, j] = np.vdot(V[i], w)
                w = w - H[i, j] * V[i]
            H[j + 1, j] = np.linalg.norm(w)
            happy = abs(H[j + 1, j]) <= 1e-14 * beta
            if not happy:
                V[j + 1] = w / H[j + 1, j]
            for i in range(j):
                tmp = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -np.conj(sn[i]) * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = tmp
            cs[j], sn[j] = _givens(H[j, j], H[j + 1, j])
            H[j, j] = cs[j] * H[j, j] + sn[j] * H[j + 1, j]
            H[j + 1, j] = 0
            g[j + 1] = -np.conj(sn[j]) * g[j]
            g[j] = cs[j] * g[j]
            it += 1
            j_used = j + 1
            history.append(abs(g[j + 1]) / nb)
            log.debug("gmres it=%d res=%.3e", it, history[-1])
            if happy or history[-1] <= opts.tol or it >= opts.max_iter:
                break
        y = np.linalg.solve(np.triu(H[:j_used, :j_used]), g[:j_used])
        x = x + (V[:j_used].T @ y).astype(dtype, copy=False)
        _check_finite(x)
        rel = relative_residual(A, b, x)
        if rel <= opts.tol:
            converged = True
            break

    x = x.reshape(shape)
    rel = relative_residual(apply, rhs, x)
    return SolveReport(
        solution=x,
        iterations=it,
        rel_residual=rel,
        converged=converged and rel <= opts.tol,
        method="gmres",
        elapsed=time.perf_counter() - t0,
        history=history,
    )


def solve(apply: Operator, rhs: np.ndarray, opts: SolveOptions = SolveOptions(), method: str = "cocg", **kw) -> SolveReport:
    methods = {"cocg": cocg, "gmres": gmres}
    if method not in methods:
        raise ValueError(f"unknown method {method!r}")
    return methods[method](apply, rhs, opts, **kw)
