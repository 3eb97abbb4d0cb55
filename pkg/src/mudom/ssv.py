"""Structured singular value for repeated scalar blocks.

For the block structure ``E = {diag(z_1 I_{r_1}, ..., z_s I_{r_s})}`` we have
``rho(A) <= mu_E(A) <= ||A||``.  Two independent routes are provided:

* :func:`mu_lower_torus` maximises ``rho(X A)`` over unimodular ``X`` in ``E``.
  This is always a lower bound for ``mu_E(A)``.
* :func:`mu_bisection` bisects on the radius ``r``: ``mu_E(A) <= 1/r`` exactly
  when ``det(I - A X)``, i.e. ``R_{pi(A)}``, has no zero in the open
  polydisc of radius ``r``.  Each step is decided by a nonvanishing certificate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .clinalg import as_matrix, operator_norm, pi_map, spectral_radius
from .cpoly import (
    CertStatus,
    DiscStatus,
    all_roots_outside_closed_disc,
    certify_nonvanishing,
    golden_max,
    univariate_R_coeffs,
)
from .errors import InvalidArgumentError, NumericFailure
from .multiindex import MultiIndexTable

__all__ = [
    "MuInterval",
    "MuResult",
    "OmegaStatus",
    "PshResult",
    "in_omega",
    "mu",
    "mu_bisection",
    "mu_lower_torus",
    "mu_lower_torus_batch",
    "psh_circle_test",
]


def _block_phases(table: MultiIndexTable, thetas: np.ndarray) -> np.ndarray:
    """Expand per-block angles ``(..., s)`` into the diagonal of ``X``, ``(..., n)``."""
    rep = np.repeat(np.arange(table.s), table.blocks)
    return np.exp(1j * thetas[..., rep])


def mu_lower_torus_batch(
    table: MultiIndexTable, A, grid: int = 64, refine: bool = True, cap: int = 4096
) -> np.ndarray:
    """Vectorised :func:`mu_lower_torus` over a stack ``(B, n, n)``."""
    if grid < 4:
        raise InvalidArgumentError("grid must be at least 4")
    A = as_matrix(A, table.n).reshape(-1, table.n, table.n)
    B = A.shape[0]
    if table.s == 1:
        return np.atleast_1d(spectral_radius(A))
    # a common phase does not change rho, so the first block angle stays 0
    dim = table.s - 1
    g = max(4, min(grid, int(cap ** (1.0 / dim) + 1e-9)))
    ang = 2 * np.pi * np.arange(g) / g
    mesh = np.meshgrid(*([ang] * dim), indexing="ij")
    pts = np.stack([np.zeros(mesh[0].size)] + [m.ravel() for m in mesh], axis=-1)  # (P, s)
    diag = _block_phases(table, pts)  # (P, n)
    XA = diag[None, :, :, None] * A[:, None, :, :]
    vals = np.asarray(spectral_radius(XA)).reshape(B, -1)
    best_idx = np.argmax(vals, axis=1)
    best_val = vals[np.arange(B), best_idx]
    if not refine:
        return best_val
    theta = pts[best_idx].copy()  # (B, s)
    step = 2 * np.pi / g

    def along(i, base):
        def f(t):
            th = base.copy()
            th[:, i] = t
            d = _block_phases(table, th)
            return np.asarray(spectral_radius(d[:, :, None] * A)).reshape(B)

        return f

    sweeps = 1 if dim == 1 else 3
    for sweep in range(sweeps):
        width = step if sweep == 0 else step / 2
        for i in range(1, table.s):
            t, _ = golden_max(along(i, theta), theta[:, i] - width, theta[:, i] + width)
            theta = theta.copy()
            theta[:, i] = t
    refined = along(1, theta)(theta[:, 1])
    return np.maximum(best_val, refined)


def mu_lower_torus(table: MultiIndexTable, A, grid: int = 64) -> float:
    """Lower bound ``max rho(X A)`` over ``X = diag(e^{i t_1} I_{r_1}, ...)``.

    For a single block this is exactly the spectral radius.
    """
    A = as_matrix(A, table.n)
    if A.ndim != 2:
        raise InvalidArgumentError("mu_lower_torus takes a single matrix")
    return float(mu_lower_torus_batch(table, A[None], grid)[0])


@dataclass(frozen=True)
class MuInterval:
    lo: float
    hi: float
    exact: bool = True
    steps: int = 0

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= value <= self.hi + slack

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "exact": self.exact, "steps": self.steps}


def _decide(table, x, t, resolution, max_depth):
    """Certify at radius ``1/t``: returns ``'le'`` (mu <= t), ``'ge'`` (mu >= t) or None."""
    if table.s == 1:
        # one variable: the roots of R(z / t) decide directly
        c = univariate_R_coeffs(x) * np.power(1.0 / t, np.arange(table.N + 1))
        try:
            test = all_roots_outside_closed_disc(c, 1e-9)
        except NumericFailure:
            return None
        return {DiscStatus.YES: "le", DiscStatus.NO: "ge"}.get(test.status)
    cert = certify_nonvanishing(table, x, radius=1.0 / t, resolution=resolution, max_depth=max_depth)
    if cert.status is CertStatus.INSIDE:
        return "le"
    if cert.status is CertStatus.OUTSIDE:
        return "ge"
    return None


def mu_bisection(
    table: MultiIndexTable,
    A,
    tol: float = 1e-3,
    resolution: int = 8,
    max_depth: int = 8,
    max_steps: int = 60,
) -> MuInterval:
    """Enclose ``mu_E(A)`` by bisection on the certification radius.

    The bracket starts at ``[0, ||A||]``.  When a midpoint cannot be decided
    the two points a quarter-width either side are tried; if neither helps the
    current bracket is returned with ``exact=False``.
    """
    if tol <= 0:
        raise InvalidArgumentError("tol must be positive")
    A = as_matrix(A, table.n)
    x = pi_map(table, A)
    if not np.any(x):
        return MuInterval(0.0, 0.0, True, 0)
    lo = 0.0
    hi = operator_norm(A) * (1 + 1e-9) + 1e-300
    steps = 0
    exact = True
    while hi - lo > tol and steps < max_steps:
        steps += 1
        t = 0.5 * (lo + hi)
        verdict = _decide(table, x, t, resolution, max_depth)
        if verdict == "le":
            hi = t
        elif verdict == "ge":
            lo = t
        else:
            w = hi - lo
            moved = False
            if _decide(table, x, t + w / 4, resolution, max_depth) == "le":
                hi, moved = t + w / 4, True
            if _decide(table, x, t - w / 4, resolution, max_depth) == "ge":
                lo, moved = t - w / 4, True
            if not moved:
                exact = False
                break
    if hi - lo > tol:
        exact = False
    return MuInterval(lo, hi, exact, steps)


@dataclass(frozen=True)
class MuResult:
    lower: float
    upper: float
    certified: Optional[MuInterval] = None
    grid: int = 64

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "certified": None if self.certified is None else self.certified.to_json(),
            "grid": self.grid,
        }


def mu(table: MultiIndexTable, A, grid: int = 64, tol: Optional[float] = None, resolution: int = 8) -> MuResult:
    """Lower (torus) and upper (operator norm) bounds, plus an optional certified interval."""
    A = as_matrix(A, table.n)
    lower = mu_lower_torus(table, A, grid)
    upper = operator_norm(A)
    cert = mu_bisection(table, A, tol, resolution) if tol is not None else None
    return MuResult(lower, upper, cert, grid)


class OmegaStatus(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNDETERMINED = "Undetermined"


def in_omega(table: MultiIndexTable, A, tol: float = 1e-6, grid: int = 64, resolution: int = 8) -> OmegaStatus:
    """Decide ``mu_E(A) < 1``.

    ``mu_E(A) < 1`` holds exactly when ``R_{pi(A)}`` has no zero on the closed
    unit polydisc, so a certificate at radius 1 decides YES.  NO requires a
    lower bound above ``1 + tol``: either the torus bound, or a zero strictly
    inside the polydisc.
    """
    A = as_matrix(A, table.n)
    if operator_norm(A) < 1 - tol:
        return OmegaStatus.YES
    if mu_lower_torus(table, A, grid) > 1 + tol:
        return OmegaStatus.NO
    cert = certify_nonvanishing(table, pi_map(table, A), 1.0, resolution, max_depth=8)
    if cert.status is CertStatus.INSIDE:
        return OmegaStatus.YES
    if cert.status is CertStatus.OUTSIDE and np.max(np.abs(cert.witness)) < 1 - tol:
        return OmegaStatus.NO
    return OmegaStatus.UNDETERMINED


@dataclass(frozen=True)
class PshResult:
    passed: Optional[bool]
    deficit: float
    center: float
    mean: float

    @property
    def skipped(self) -> bool:
        return self.passed is None


def psh_circle_test(
    table: MultiIndexTable,
    A,
    B,
    radius: float = 0.1,
    samples: int = 64,
    grid: int = 64,
    tol: float = 1e-3,
) -> PshResult:
    """Sampled sub-mean-value check of ``log mu`` on the circle ``A + radius e^{it} B``.

    ``mu`` is the torus lower bound at a fixed grid (itself log-psh, being a
    maximum of log-psh functions).  ``deficit`` is
    ``log mu(A) - mean log mu`` (positive means a violation); a zero value of
    ``mu`` anywhere yields a skipped result.
    """
    if samples < 16:
        raise InvalidArgumentError("at least 16 circle samples required")
    A = as_matrix(A, table.n)
    B = as_matrix(B, table.n)
    ang = 2 * np.pi * np.arange(samples) / samples
    stack = np.concatenate([A[None], A[None] + radius * np.exp(1j * ang)[:, None, None] * B[None]])
    vals = mu_lower_torus_batch(table, stack, grid)
    if np.any(vals <= 0):
        return PshResult(None, math.nan, float(vals[0]), math.nan)
    logs = np.log(vals)
    center, mean = float(logs[0]), float(logs[1:].mean())
    deficit = center - mean
    return PshResult(bool(deficit <= tol), deficit, center, mean)
