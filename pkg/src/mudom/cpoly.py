"""Polynomial engine: evaluation of ``R_x``, univariate roots, nonvanishing
certificates on closed polydiscs and the quotient ``Psi``.

Conventions
-----------
* Univariate coefficient vectors are in *ascending* order,
  ``c[0] + c[1] z + ... + c[d] z**d``.
* ``R_x(z) = 1 + sum_j (-1)**|alpha^j| x_j z**alpha^j`` for a table
  ``alpha^1 < ... < alpha^N``.
"""
from __future__ import annotations

import contextlib
import enum
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BudgetError,
    InvalidArgumentError,
    InvalidStateError,
    NumericFailure,
)
from .multiindex import MultiIndexTable, SplitTable

__all__ = [
    "CertStatus",
    "DiscStatus",
    "DiscTest",
    "NonvanishingCertificate",
    "PsiValue",
    "all_roots_outside_closed_disc",
    "certify_nonvanishing",
    "coefficients_in",
    "eval_R",
    "eval_psi",
    "eval_split",
    "golden_max",
    "roots_batch",
    "roots_univariate",
    "sup_psi_torus",
    "torus_argmax_psi",
    "torus_argmax_psi_batch",
    "univariate_R_coeffs",
]

ZERO_TOL = 1e-9
DISC_BAND = 1e-7
POLE_TOL = 1e-14
DEFAULT_CELL_BUDGET = 10**8
MAX_ITER = 200

# Mutation hook used by the self-test canary: flips the sign of every term of R.
_sign_flip = False


@contextlib.contextmanager
def _canary():
    global _sign_flip
    old, _sign_flip = _sign_flip, True
    try:
        yield
    finally:
        _sign_flip = old


def cell_budget() -> int:
    env = os.environ.get("MUDOM_BUDGET")
    return int(float(env)) if env else DEFAULT_CELL_BUDGET


def _as_point(x, length: int, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=complex)
    if arr.shape[-1:] != (length,):
        raise InvalidArgumentError(f"{name} must have length {length}, got shape {arr.shape}")
    return arr


def _monomials(table: MultiIndexTable, z: np.ndarray) -> np.ndarray:
    """``z**alpha^j`` for every table entry; ``z`` has shape ``(..., s)``."""
    out = np.ones(z.shape[:-1] + (table.N,), dtype=complex)
    alphas = table.alpha_array
    for i, r in enumerate(table.blocks):
        zi = z[..., i : i + 1]
        pw = np.power(zi, np.arange(r + 1))  # (..., r+1)
        out = out * pw[..., alphas[:, i]]
    return out


def eval_R(table: MultiIndexTable, x, z):
    """Evaluate ``R_x`` at ``z``.

    ``z`` may carry leading batch dimensions, ``(..., s)``; the result then has
    shape ``(...)``.  ``x`` may be a single point or a stack broadcasting
    against those dimensions.
    """
    x = _as_point(x, table.N, "x")
    z = _as_point(z, table.s, "z")
    coeff = table.signs * x
    if _sign_flip:
        coeff = -coeff
    mono = _monomials(table, z)
    # a stack of points x is paired row by row with z
    val = 1.0 + (mono @ coeff if coeff.ndim == 1 else np.sum(mono * coeff, axis=-1))
    return val if val.ndim else complex(val)


def eval_split(table: MultiIndexTable, split: SplitTable, x, z):
    """Evaluate ``R_x`` through the prefix/fiber decomposition.

    ``R_x(z) = R'_{x'}(z') + sum_k (-1)**|beta^k| z''**beta^k
    sum_{j=0}^{N'} (-1)**|(alpha^j)'| x_{k(N'+1)+j} z'**(alpha^j)'``.
    """
    x = _as_point(x, table.N, "x")
    z = _as_point(z, table.s, "z")
    pre = split.prefix
    n1 = split.N_prime
    zp, zpp = z[..., : split.s_prime], z[..., split.s_prime :]
    # (alpha^0)' = 0 contributes the constant monomial
    mono_p = np.concatenate(
        [np.ones(zp.shape[:-1] + (1,), dtype=complex), _monomials(pre, zp)], axis=-1
    )
    sign_p = np.concatenate([[1.0], pre.signs])
    total = 1.0 + mono_p[..., 1:] @ (pre.signs * x[:n1])
    for k, beta in enumerate(split.betas, start=1):
        block = x[split.fiber_position(k, 0) : split.fiber_position(k, n1) + 1]
        inner = mono_p @ (sign_p * block)
        zb = np.prod(np.power(zpp, np.asarray(beta)), axis=-1)
        total = total + (-1.0) ** sum(beta) * zb * inner
    return total if np.ndim(total) else complex(total)


# ---------------------------------------------------------------- roots


def _horner(a: np.ndarray, z: np.ndarray):
    """Value and derivative of ascending-coefficient polys ``a`` (B, d+1) at ``z`` (B, d)."""
    p = np.broadcast_to(a[:, -1:], z.shape).astype(complex)
    dp = np.zeros_like(p)
    for k in range(a.shape[1] - 2, -1, -1):
        dp = dp * z + p
        p = p * z + a[:, k : k + 1]
    return p, dp


def roots_batch(coeffs, tol: float = 1e-10, max_iter: int = MAX_ITER) -> np.ndarray:
    """Aberth iteration on a batch of polynomials of common degree.

    Parameters
    ----------
    coeffs : array_like, shape (B, d+1)
        Ascending coefficients; every leading coefficient must be nonzero.

    Returns
    -------
    ndarray, shape (B, d)

    Raises NumericFailure unless every root has backward error
    ``|p(z)| / sum_k |a_k| |z|**k <= tol``.
    """
    c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    d = c.shape[1] - 1
    if d < 1:
        raise InvalidArgumentError("degree must be at least 1")
    lead = c[:, -1]
    if np.any(lead == 0):
        raise InvalidArgumentError("leading coefficient is zero")
    a = c / lead[:, None]
    if d == 1:
        return -a[:, :1]
    # Fujiwara-type bound fixes the scale of the starting circle.
    mags = np.abs(a[:, :-1])
    expo = 1.0 / (d - np.arange(d))
    bound = 2.0 * np.max(mags**expo, axis=1)
    radius = np.where(bound > 0, 0.5 * bound, 1.0)
    ang = 2 * np.pi * np.arange(d) / d + 0.4
    z = radius[:, None] * np.exp(1j * ang)[None, :]
    active = np.ones(z.shape, dtype=bool)
    # z**d: every root is exactly zero
    pure = bound == 0
    z[pure] = 0
    active[pure] = False
    eye = np.eye(d, dtype=bool)
    absa = np.abs(a)
    rows = np.flatnonzero(~pure)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            # only polynomials with unconverged roots are iterated
            zr, ar, act = z[rows], a[rows], active[rows]
            p, dp = _horner(ar, zr)
            newton = np.where(dp != 0, p / dp, p)
            diff = zr[:, :, None] - zr[:, None, :]
            inv = np.where(eye | (diff == 0), 0, 1.0 / diff)
            S = inv.sum(axis=2)
            w = newton / (1.0 - newton * S)
            w = np.where(np.isfinite(w), w, newton)
            w = np.where(act, w, 0)
            # stop on a negligible step or a residual at rounding level; the
            # residual is judged where it was measured, before the step
            noise = 8 * np.finfo(float).eps * _horner(absa[rows], np.abs(zr))[0].real
            settled = np.abs(p) <= noise
            w = np.where(settled, 0, w)
            zr = zr - w
            small = np.abs(w) <= 4 * np.finfo(float).eps * np.abs(zr)
            act &= ~(small | settled)
            z[rows] = zr
            active[rows] = act
            rows = rows[act.any(axis=1)]
            if rows.size == 0:
                break
    p, _ = _horner(a, z)
    # backward error: residual relative to sum |a_k| |z|**k
    scale = _horner(absa, np.abs(z))[0].real
    resid = np.abs(p) / np.maximum(scale, np.finfo(float).tiny)
    if not np.all(np.isfinite(z)) or np.any(resid > tol):
        raise NumericFailure("Aberth iteration did not reach the residual tolerance")
    return z


def _trim(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex).ravel()
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise InvalidArgumentError("the zero polynomial has no well-defined roots")
    return c[: nz[-1] + 1]


def roots_univariate(coeffs: Sequence[complex], tol: float = 1e-10) -> np.ndarray:
    """All complex roots (with multiplicity) of an ascending-coefficient polynomial."""
    c = _trim(coeffs)
    if c.size == 1:
        raise InvalidArgumentError("constant polynomial has no roots")
    return roots_batch(c[None, :], tol=tol)[0]


class DiscStatus(enum.Enum):
    YES = "yes"
    NO = "no"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class DiscTest:
    status: DiscStatus
    min_modulus: float
    witness: Optional[complex] = None


def all_roots_outside_closed_disc(coeffs, tol: float = DISC_BAND) -> DiscTest:
    """Classify whether every root of ``coeffs`` lies outside the closed unit disc.

    ``coeffs`` is the ascending coefficient vector of a polynomial with
    constant term 1 (an ``R`` polynomial).
    """
    c = _trim(coeffs)
    if c.size == 1:
        return DiscTest(DiscStatus.YES, math.inf)
    roots = roots_univariate(c)
    mods = np.abs(roots)
    k = int(np.argmin(mods))
    m = float(mods[k])
    if m > 1 + tol:
        return DiscTest(DiscStatus.YES, m)
    if m < 1 - tol:
        return DiscTest(DiscStatus.NO, m, complex(roots[k]))
    return DiscTest(DiscStatus.MARGINAL, m, complex(roots[k]))


def univariate_R_coeffs(x) -> np.ndarray:
    """Ascending coefficients of ``R_x`` for a single-block table (``s = 1``)."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    signs = np.where(np.arange(1, n + 1) % 2 == 0, 1.0, -1.0)
    ones = np.ones(x.shape[:-1] + (1,), dtype=complex)
    return np.concatenate([ones, signs * x], axis=-1)


def coefficients_in(table: MultiIndexTable, x, z, var: int) -> np.ndarray:
    """Ascending coefficients of ``R_x`` as a polynomial in ``z[var]``, the
    other variables held at ``z``.  A stack ``z`` of shape (K, s) gives (K, r+1)."""
    x = _as_point(x, table.N, "x")
    z = _as_point(z, table.s, "z")
    alphas = table.alpha_array
    others = np.delete(np.arange(table.s), var)
    coeff = table.signs * x
    if _sign_flip:
        coeff = -coeff
    rest = np.prod(np.power(z[..., None, others], alphas[:, others]), axis=-1)  # (..., N)
    terms = coeff * rest
    out = np.zeros(z.shape[:-1] + (table.blocks[var] + 1,), dtype=complex)
    out[..., 0] = 1.0
    for k in range(1, table.blocks[var] + 1):
        out[..., k] = terms[..., alphas[:, var] == k].sum(axis=-1)
    # terms with alpha_var = 0 belong to the constant coefficient
    out[..., 0] += terms[..., alphas[:, var] == 0].sum(axis=-1)
    return out


# ------------------------------------------------------- certification


class CertStatus(enum.Enum):
    INSIDE = "Inside"
    OUTSIDE = "Outside"
    UNDETERMINED = "Undetermined"


@dataclass
class NonvanishingCertificate:
    """Outcome of :func:`certify_nonvanishing`.

    ``margin`` is a certified lower bound for ``min |R_x|`` on the closed
    polydisc when ``status`` is INSIDE; ``witness`` is a point of the polydisc
    with ``|R_x| <= 1e-9`` when it is OUTSIDE.
    """

    status: CertStatus
    margin: float = 0.0
    witness: Optional[np.ndarray] = None
    grid_cells: int = 0
    lipschitz_bound: float = 0.0
    radius: float = 1.0
    depth: int = 0

    def to_json(self) -> dict:
        wit = None
        if self.witness is not None:
            wit = [[float(w.real), float(w.imag)] for w in self.witness]
        return {
            "status": self.status.value,
            "margin": self.margin,
            "witness": wit,
            "cells": self.grid_cells,
            "lipschitz_bound": self.lipschitz_bound,
            "radius": self.radius,
        }


def _lipschitz(table: MultiIndexTable, x: np.ndarray, rad) -> np.ndarray:
    """Per-variable bounds on ``|dR/dz_i|`` where ``|z_l| <= rad_l``.

    ``rad`` is a scalar or an array ``(..., s)``; the result has shape ``(..., s)``.
    """
    rad = np.broadcast_to(np.asarray(rad, dtype=float), np.shape(rad)[:-1] + (table.s,)) \
        if np.ndim(rad) else np.full(table.s, float(rad))
    alphas = table.alpha_array
    ax = np.abs(x)
    out = np.empty(rad.shape)
    for i in range(table.s):
        expo = alphas.copy()
        expo[:, i] = np.maximum(expo[:, i] - 1, 0)
        mono = np.prod(np.power(rad[..., None, :], expo), axis=-1)  # (..., N)
        out[..., i] = mono @ (ax * alphas[:, i])
    return out


def _taylor_slack(table: MultiIndexTable, x: np.ndarray, c: np.ndarray, delta: np.ndarray):
    """Bound ``|R(z) - R(c)|`` for ``|z_i - c_i| <= delta_i`` by the gradient at
    ``c`` plus the majorant remainder.

    With ``a = |c|`` each monomial satisfies
    ``|m(c+h) - m(c) - grad m(c) h| <= m(a+delta) - m(a) - grad m(a) delta``,
    since every Taylor coefficient of the real majorant is non-negative.
    Returns the total slack ``(K,)``, the per-variable first-order parts
    ``(K, s)`` and the remainder ``(K,)``.
    """
    alphas = table.alpha_array
    coeff = table.signs * x
    if _sign_flip:
        coeff = -coeff
    ax = np.abs(x)
    a = np.abs(c)
    # per-variable power tables k -> v**k and k -> k v**(k-1), gathered by exponent
    def powers(v, r):
        out = np.ones(v.shape + (r + 1,), dtype=v.dtype)
        for k in range(1, r + 1):
            out[..., k] = out[..., k - 1] * v
        return out

    tabs = []
    for i, r in enumerate(table.blocks):
        k = np.arange(r + 1)
        pa, pu, pc = powers(a[:, i], r), powers(a[:, i] + delta[:, i], r), powers(c[:, i], r)
        da = np.zeros_like(pa)
        dc = np.zeros_like(pc)
        da[:, 1:] = k[1:] * pa[:, :-1]
        dc[:, 1:] = k[1:] * pc[:, :-1]
        sel = alphas[:, i]
        tabs.append((pa[:, sel], da[:, sel], pu[:, sel], pc[:, sel], dc[:, sel]))
    up = np.prod([t[2] for t in tabs], axis=0)  # (K, N)
    base = np.prod([t[0] for t in tabs], axis=0)
    rem = up - base
    first = np.empty(c.shape)
    for i in range(table.s):
        mono_a = tabs[i][1]
        mono_c = tabs[i][4]
        for j in range(table.s):
            if j != i:
                mono_a = mono_a * tabs[j][0]
                mono_c = mono_c * tabs[j][3]
        first[:, i] = np.abs(mono_c @ coeff) * delta[:, i]
        rem -= mono_a * delta[:, i : i + 1]
    remainder = np.maximum(rem, 0.0) @ ax
    # guard against rounding in the subtraction above
    guard = 16 * np.finfo(float).eps * (up @ ax + 1.0)
    return first.sum(axis=1) + remainder + guard, first, remainder


def _squares_in_disc(centers: np.ndarray, half: float, radius: float) -> np.ndarray:
    dx = np.maximum(np.abs(centers.real) - half, 0.0)
    dy = np.maximum(np.abs(centers.imag) - half, 0.0)
    return np.hypot(dx, dy) <= radius


def _polish(table, x, Z0, radius, zero_tol) -> Optional[np.ndarray]:
    """Try to turn near-zeros ``Z0`` (K, s) into an exact zero inside the
    polydisc by solving in one variable with the others frozen."""
    lim = radius * (1 + 1e-9)
    Z0 = Z0[np.all(np.abs(Z0) <= lim, axis=1)]
    if not len(Z0):
        return None
    for var in range(table.s):
        C = coefficients_in(table, x, Z0, var)
        lead = np.abs(C[:, -1])
        rows = np.flatnonzero(lead > 1e-14 * np.abs(C).max(axis=1))
        if not rows.size:
            continue
        try:
            R = roots_batch(C[rows])
        except NumericFailure:
            continue
        for k, row in enumerate(rows):
            roots = R[k]
            for root in roots[np.argsort(np.abs(roots - Z0[row, var]))]:
                if abs(root) > lim:
                    continue
                w = Z0[row].copy()
                w[var] = root
                if abs(eval_R(table, x, w)) <= zero_tol:
                    return w
    return None


def certify_nonvanishing(
    table: MultiIndexTable,
    x,
    radius: float = 1.0,
    resolution: int = 8,
    max_depth: int = 6,
    zero_tol: float = ZERO_TOL,
    budget: Optional[int] = None,
    max_frontier: int = 1 << 18,
) -> NonvanishingCertificate:
    """Certify ``R_x != 0`` on the closed polydisc of the given radius.

    The polydisc is covered by products of squares; on a cell with centre
    ``c`` and per-variable covering radius ``delta`` the bound
    ``|R(z) - R(c)| <= sum_i L_i delta`` holds with
    ``L_i = sum_j |x_j| alpha^j_i rho**(|alpha^j| - 1)``, ``rho = radius + delta``.
    Cells whose centre value does not beat the slack are split up to
    ``max_depth`` times, each square into four, but only in the variables
    whose term ``L_i delta_i`` is at least a quarter of the largest one.  Near-zeros are polished into
    exact zeros, which give an OUTSIDE answer with a witness.

    The total number of evaluated cells is capped by ``budget`` (default
    ``MUDOM_BUDGET`` or 1e8) and each refinement level by ``max_frontier``;
    hitting either cap yields UNDETERMINED.
    """
    if radius <= 0:
        raise InvalidArgumentError("radius must be positive")
    if resolution < 2:
        raise InvalidArgumentError("resolution must be at least 2")
    x = _as_point(x, table.N, "x")
    budget = cell_budget() if budget is None else budget
    s = table.s
    half = radius / resolution
    ticks = -radius + half * (2 * np.arange(resolution) + 1)
    sq = (ticks[:, None] + 1j * ticks[None, :]).ravel()
    sq = sq[_squares_in_disc(sq, half, radius)]
    n_cells = sq.size**s
    if n_cells > budget:
        raise BudgetError(f"{n_cells} initial cells exceed the budget {budget}")
    grids = np.meshgrid(*([sq] * s), indexing="ij")
    centers = np.stack([g.ravel() for g in grids], axis=-1)
    halves = np.full(centers.shape, half)

    L0 = _lipschitz(table, x, radius)
    total = 0
    margin = math.inf
    children = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / 2
    for depth in range(max_depth + 1):
        delta = halves * math.sqrt(2)
        # Project centres into the disc: projection is non-expansive, so every
        # point of cell ∩ polydisc stays within delta of the projected centre.
        mod = np.abs(centers)
        proj = np.where(mod > radius, centers * (radius / np.maximum(mod, 1e-300)), centers)
        rad = np.minimum(np.abs(proj) + delta, radius)
        parts = _lipschitz(table, x, rad) * delta
        slack = parts.sum(axis=1)
        tslack, tparts, trem = _taylor_slack(table, x, proj, delta)
        sharper = tslack < slack
        # the split direction follows whichever bound is in force; the
        # remainder is shared out like the Lipschitz terms
        share = parts / np.maximum(slack, 1e-300)[:, None]
        parts = np.where(sharper[:, None], tparts + trem[:, None] * share, parts)
        slack = np.where(sharper, tslack, slack)
        vals = np.abs(eval_R(table, x, proj))
        total += len(centers)
        ok = vals > slack
        if ok.any():
            margin = min(margin, float((vals[ok] - slack[ok]).min()))
        if ok.all():
            return NonvanishingCertificate(
                CertStatus.INSIDE, margin, None, total, float(L0.sum()), radius, depth
            )
        bad = ~ok
        badproj = proj[bad]
        # polish only cells whose Newton step stays within about two cell widths
        reach = vals[bad] / np.maximum(tparts[bad].sum(axis=1), 1e-300)
        near = np.flatnonzero(reach <= 2.0)
        if near.size:
            w = _polish(table, x, badproj[near[np.argsort(reach[near])[:4]]], radius, zero_tol)
            if w is not None:
                return NonvanishingCertificate(
                    CertStatus.OUTSIDE, 0.0, w, total, float(L0.sum()), radius, depth
                )
        if depth == max_depth:
            break
        # Split a failing cell only in the variables carrying a sizeable share
        # of its slack; variables R barely depends on stay coarse.
        parts = parts[bad]
        split = parts >= 0.25 * parts.max(axis=1, keepdims=True)
        kids, kid_halves = [centers[bad]], [halves[bad]]
        for i in range(s):
            c, h = kids[-1], kid_halves[-1]
            sel = split[:, i]
            hi_ = h[sel].copy()
            hi_[:, i] /= 2
            moved = c[sel][:, None, :] + (np.eye(s)[i] * 2 * hi_[:, i : i + 1])[:, None, :] * children[None, :, None]
            moved = moved.reshape(-1, s)
            mh = np.repeat(hi_, 4, axis=0)
            keep = _squares_in_disc(moved[:, i], mh[:, i], radius)
            split = np.concatenate([split[~sel], np.repeat(split[sel], 4, axis=0)[keep]])
            kids.append(np.concatenate([c[~sel], moved[keep]]))
            kid_halves.append(np.concatenate([h[~sel], mh[keep]]))
        centers, halves = kids[-1], kid_halves[-1]
        if total + len(centers) > budget or len(centers) > max_frontier:
            break
    return NonvanishingCertificate(
        CertStatus.UNDETERMINED, 0.0, None, total, float(L0.sum()), radius, depth
    )


# ---------------------------------------------------------------- Psi


@dataclass(frozen=True)
class PsiValue:
    numerator: complex
    denominator: complex
    value: Optional[complex]


def _check_last_split(table: MultiIndexTable, split: SplitTable) -> None:
    if split.parent.blocks != table.blocks:
        raise InvalidArgumentError("split does not belong to this table")
    if split.s_prime != table.s - 1 or table.blocks[-1] != 1:
        raise InvalidArgumentError("Psi needs the last block to have size 1 and s' = s - 1")


def _psi_parts(table, split, x, zp):
    """Numerator ``P_{x''}(z')`` and denominator ``R'_{x'}(z')`` on a batch of ``z'``."""
    pre = split.prefix
    n1 = split.N_prime
    mono = _monomials(pre, zp)
    coeff = pre.signs * x[:n1]
    tail = pre.signs * x[n1 + 1 :]
    if _sign_flip:
        coeff, tail = -coeff, -tail
    den = 1.0 + mono @ coeff
    num = x[n1] + mono @ tail
    return num, den


def eval_psi(table: MultiIndexTable, split: SplitTable, x, z_prime) -> PsiValue:
    """``Psi_{z'}(x) = P_{x''}(z') / R'_{x'}(z')`` where ``R_x = R' - z_s P``."""
    _check_last_split(table, split)
    x = _as_point(x, table.N, "x")
    zp = _as_point(z_prime, split.s_prime, "z_prime")
    num, den = _psi_parts(table, split, x, zp)
    num, den = complex(num), complex(den)
    value = num / den if abs(den) >= POLE_TOL else None
    return PsiValue(num, den, value)


def golden_max(f, lo: np.ndarray, hi: np.ndarray, iters: int = 48):
    """Lock-step golden-section maximisation of a batch of 1-D problems.

    ``f`` maps an array of abscissae (same shape as ``lo``) to values.
    Returns ``(argmax, max)``.
    """
    g = (math.sqrt(5) - 1) / 2
    a, b = np.array(lo, dtype=float), np.array(hi, dtype=float)
    c = b - g * (b - a)
    d = a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        nc = np.where(left, b - g * (b - a), d)
        nd = np.where(left, c, a + g * (b - a))
        fnew = f(np.where(left, nc, nd))
        fc, fd = np.where(left, fnew, fd), np.where(left, fc, fnew)
        c, d = nc, nd
    xs = np.where(fc >= fd, c, d)
    return xs, np.maximum(fc, fd)


def _torus_points_per_angle(dim: int, grid: int, cap: int = 1 << 16) -> int:
    return max(4, min(grid, int(math.floor(cap ** (1.0 / dim) + 1e-9))))


def _psi_rows(table, split, X, zp):
    """Numerator and denominator of ``Psi`` for row-wise points.

    ``X`` is (B, N); ``zp`` is either a shared grid (P, s') or per-row points
    (B, P, s').  Both outputs have shape (B, P).
    """
    pre = split.prefix
    n1 = split.N_prime
    mono = _monomials(pre, zp)
    coeff = pre.signs * X[:, :n1]
    tail = pre.signs * X[:, n1 + 1 :]
    if _sign_flip:
        coeff, tail = -coeff, -tail
    if mono.ndim == 2:
        den = 1.0 + coeff @ mono.T
        num = X[:, n1 : n1 + 1] + tail @ mono.T
    else:
        den = 1.0 + np.einsum("bpn,bn->bp", mono, coeff)
        num = X[:, n1 : n1 + 1] + np.einsum("bpn,bn->bp", mono, tail)
    return num, den


def _sup_last(table, split, X, head):
    """Exact maximum of ``|Psi|`` over the last torus coordinate.

    The prefix blocks after the first have size 1, so ``Psi`` is a Moebius
    map ``(p + q w) / (u + v w)`` in the last coordinate ``w``; with
    ``|v| < |u|`` the unit circle maps to a circle and the maximum modulus is
    ``|centre| + radius``.  ``head`` holds the other coordinates, shared
    (P, s'-1) or per row (B, P, s'-1).  Returns the maxima and the maximising
    ``w``, both (B, P).
    """
    pad = np.zeros(head.shape[:-1] + (1,), dtype=complex)
    p, u = _psi_rows(table, split, X, np.concatenate([head, pad], axis=-1))
    n1, d1 = _psi_rows(table, split, X, np.concatenate([head, pad + 1], axis=-1))
    q, v = n1 - p, d1 - u
    gap = np.abs(u) ** 2 - np.abs(v) ** 2
    if np.any(gap <= POLE_TOL * np.maximum(np.abs(u) ** 2, 1.0)):
        raise InvalidStateError("R' vanishes on the closed polydisc: x' is not in the prefix domain")
    centre = (p * u.conj() - q * v.conj()) / gap
    rad = np.abs(q * u - p * v) / gap
    mod = np.abs(centre)
    sup = mod + rad
    y = centre + rad * np.where(mod > 0, centre / np.where(mod > 0, mod, 1), 1)
    den = v * y - q
    w = np.where(np.abs(den) > 0, (p - u * y) / np.where(den != 0, den, 1), 1)
    w = np.where(np.abs(w) > 0, w / np.where(np.abs(w) > 0, np.abs(w), 1), 1)
    return sup, w


def torus_argmax_psi_batch(
    table: MultiIndexTable, split: SplitTable, X, grid: int = 256, refine_steps: int = 2,
    chunk_points: int = 1 << 21,
) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise :func:`torus_argmax_psi` for a stack ``X`` of shape ``(B, N)``.

    With ``s' = 1`` the circle is scanned on ``grid`` points and refined by
    golden section.  With ``s' > 1`` the last coordinate is maximised in
    closed form and only the others are scanned and refined.
    Returns the maxima ``(B,)`` and maximisers ``(B, s')``.
    """
    _check_last_split(table, split)
    X = np.atleast_2d(_as_point(X, table.N, "x"))
    dim = split.s_prime
    scan = max(dim - 1, 1)
    g = _torus_points_per_angle(scan, grid)
    ang = 2 * np.pi * np.arange(g) / g
    mesh = np.meshgrid(*([ang] * scan), indexing="ij")
    thetas = np.stack([m.ravel() for m in mesh], axis=-1)  # (P, scan)
    rows = max(1, chunk_points // len(thetas))
    if len(X) > rows:
        parts = [torus_argmax_psi_batch(table, split, X[i : i + rows], grid, refine_steps, chunk_points)
                 for i in range(0, len(X), rows)]
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
    B = len(X)

    def evaluate(th):
        """``|Psi|`` maxima and full maximisers for scanned angles ``th``."""
        z = np.exp(1j * th)
        if dim == 1:
            num, den = _psi_rows(table, split, X, z)
            if np.any(np.abs(den) < POLE_TOL):
                raise InvalidStateError("R' vanishes on the torus: x' is not in the prefix domain")
            return np.abs(num / den), z
        sup, w = _sup_last(table, split, X, z)
        full = np.concatenate([np.broadcast_to(z, sup.shape + (scan,)), w[..., None]], axis=-1)
        return sup, full

    vals, _ = evaluate(thetas)
    if not np.all(np.isfinite(vals)):
        raise InvalidStateError("non-finite Psi on the torus")
    nstart = min(4, vals.shape[1])
    order = np.argpartition(-vals, nstart - 1, axis=1)[:, :nstart]  # (B, 4)
    best = thetas[order]  # (B, 4, scan)
    step = 2 * np.pi / g

    def f_coord(i, base):
        def f(t):
            th = base.copy()
            th[..., i] = t
            return evaluate(th)[0]

        return f

    for sweep in range(max(1, refine_steps) if scan > 1 else 1):
        width = step if sweep == 0 else step / 4
        for i in range(scan):
            t, _ = golden_max(f_coord(i, best), best[..., i] - width, best[..., i] + width)
            best = best.copy()
            best[..., i] = t
    # golden section never loses the bracket's best end, but keep the coarse
    # value as a floor in case refinement wandered
    starts = thetas[order]
    fine, fine_z = evaluate(best)
    coarse, coarse_z = evaluate(starts)
    take = fine >= coarse
    fv = np.where(take, fine, coarse)
    zv = np.where(take[..., None], fine_z, coarse_z)
    k = np.argmax(fv, axis=1)
    return fv[np.arange(B), k], zv[np.arange(B), k]


def torus_argmax_psi(
    table: MultiIndexTable, split: SplitTable, x, grid: int = 256, refine_steps: int = 2
) -> tuple[float, np.ndarray]:
    """Maximise ``|Psi_{z'}(x)|`` over the torus ``T^{s-1}``.

    Returns the best value found (a lower bound on the true maximum) and the
    maximising ``z'``.
    """
    x = _as_point(x, table.N, "x")
    sup, arg = torus_argmax_psi_batch(table, split, x[None, :], grid, refine_steps)
    return float(sup[0]), arg[0]


def sup_psi_torus(
    table: MultiIndexTable, split: SplitTable, x, grid: int = 256, refine_steps: int = 2
) -> float:
    """Lower bound for ``max_{T^{s-1}} |Psi_{z'}(x)|`` (grid scan plus golden refinement)."""
    return torus_argmax_psi(table, split, x, grid, refine_steps)[0]
