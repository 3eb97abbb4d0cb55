"""Domain handles for generalized tetrablocks, symmetrized polydiscs and
mu_{1,n}-quotients.

A point ``x`` lies in the domain of blocks ``(r_1, ..., r_s)`` when ``R_x``
has no zero on the closed unit polydisc.  Three membership methods exist:

``Roots``
    one block: all roots of the univariate ``R_x`` lie outside the closed disc.
``PsiRecursive``
    blocks ``(r_1, 1, ..., 1)``: the leading symmetrized polydisc is tested by
    roots, then each further block by ``max_{torus} |Psi| < 1``.
``CertifiedGrid``
    any blocks: Lipschitz-slack grid certificate over the closed polydisc.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .clinalg import operator_norm, pi_map
from .cpoly import (
    CertStatus,
    DiscStatus,
    all_roots_outside_closed_disc,
    certify_nonvanishing,
    eval_R,
    roots_batch,
    roots_univariate,
    torus_argmax_psi,
    torus_argmax_psi_batch,
    univariate_R_coeffs,
)
from .errors import (
    BudgetError,
    InvalidArgumentError,
    InvalidSpecError,
    InvalidStateError,
    UndeterminedError,
)
from .multiindex import MultiIndexTable, SplitTable, build_table, quasibalanced_act, split_table

__all__ = [
    "AffineFunctional",
    "DomainHandle",
    "EmbeddingResult",
    "Kind",
    "MembershipResult",
    "Method",
    "Status",
    "embed_symmetrized",
    "fiber_member",
    "g2_to_tetrablock",
    "handle_for",
    "gauge_bisect",
    "generalized_tetrablock",
    "member",
    "member_batch",
    "member_closure",
    "minkowski",
    "minkowski_interval",
    "mu_quotient",
    "retract_iota",
    "retract_theta",
    "sample_member",
    "sample_matrices",
    "sample_members",
    "separating_hyperplane",
    "symmetrized_polydisc",
    "task_rng",
    "tetrablock",
    "tetrablock_to_g2",
]

BAND = 1e-7


class Kind(enum.Enum):
    GENERALIZED_TETRABLOCK = "GeneralizedTetrablock"
    SYMMETRIZED_POLYDISC = "SymmetrizedPolydisc"
    MU_QUOTIENT = "MuQuotient"


class Status(enum.Enum):
    INSIDE = "Inside"
    OUTSIDE = "Outside"
    BOUNDARY = "Boundary"
    UNDETERMINED = "Undetermined"

    @property
    def exit_code(self) -> int:
        return {"Inside": 0, "Outside": 1}.get(self.value, 2)


class Method(enum.Enum):
    ROOTS = "Roots"
    PSI_RECURSIVE = "PsiRecursive"
    CERTIFIED_GRID = "CertifiedGrid"


@dataclass(frozen=True)
class MembershipResult:
    """Classification of one point.

    ``margin`` is signed distance from criticality in the method's own
    measure (root modulus minus 1, ``1 - max|Psi|``, or the certified minimum
    of ``|R|``); ``level`` is the block count of the level that decided a
    non-Inside answer.
    """

    status: Status
    method: Method
    margin: float = math.nan
    witness: Optional[np.ndarray] = None
    level: int = 0

    @property
    def inside(self) -> bool:
        return self.status is Status.INSIDE

    def to_json(self) -> dict:
        wit = None
        if self.witness is not None:
            wit = [[float(w.real), float(w.imag)] for w in np.atleast_1d(self.witness)]
        margin = None if not math.isfinite(self.margin) else self.margin
        return {
            "status": self.status.value,
            "method": self.method.value,
            "margin": margin,
            "witness": wit,
            "level": self.level,
        }


@dataclass(frozen=True)
class DomainHandle:
    """Immutable description of one domain plus its oracle settings."""

    table: MultiIndexTable
    kind: Kind
    resolution: int = 8
    max_depth: int = 6
    band: float = BAND
    psi_grid: int = 256

    def __post_init__(self):
        b = self.table.blocks
        if self.kind is Kind.SYMMETRIZED_POLYDISC and len(b) != 1:
            raise InvalidSpecError("a symmetrized polydisc has exactly one block")
        if self.kind is Kind.MU_QUOTIENT and (len(b) != 2 or b[1] != 1):
            raise InvalidSpecError("a mu-quotient has blocks (n-1, 1)")

    @property
    def blocks(self) -> tuple[int, ...]:
        return self.table.blocks

    @property
    def dim(self) -> int:
        return self.table.N

    @property
    def weights(self) -> tuple[int, ...]:
        return self.table.degrees

    @property
    def psi_form(self) -> bool:
        """True for blocks ``(r_1, 1, ..., 1)`` with at least two blocks."""
        return self.table.s >= 2 and all(r == 1 for r in self.table.blocks[1:])

    def with_settings(self, **kw) -> "DomainHandle":
        return replace(self, **kw)

    def prefix(self, s_prime: int) -> "DomainHandle":
        return handle_for(self.blocks[:s_prime], resolution=self.resolution,
                          max_depth=self.max_depth, band=self.band, psi_grid=self.psi_grid)

    # thin method wrappers so handles can be passed to the probers
    def member(self, x, method: Optional[Method] = None) -> MembershipResult:
        return member(self, x, method)

    def member_batch(self, X) -> list[MembershipResult]:
        return member_batch(self, X)

    def member_closure(self, x) -> MembershipResult:
        return member_closure(self, x)

    def minkowski(self, x, tol: float = 1e-7) -> float:
        return minkowski(self, x, tol)

    def sample_member(self, seed, norm_cap: float = 0.95) -> np.ndarray:
        return sample_member(self, seed, norm_cap)

    def sample_members(self, count: int, seed, norm_cap: float = 0.95, offset: int = 0) -> np.ndarray:
        return sample_members(self, count, seed, norm_cap, offset)

    def to_json(self) -> dict:
        return {"blocks": list(self.blocks), "kind": self.kind.value, "N": self.dim}


def handle_for(blocks: Sequence[int], **settings) -> DomainHandle:
    """Handle with the most specific kind for ``blocks``."""
    table = build_table(blocks)
    if table.s == 1:
        kind = Kind.SYMMETRIZED_POLYDISC
    elif table.s == 2 and table.blocks[1] == 1:
        kind = Kind.MU_QUOTIENT
    else:
        kind = Kind.GENERALIZED_TETRABLOCK
    return DomainHandle(table, kind, **settings)


def generalized_tetrablock(blocks: Sequence[int], **settings) -> DomainHandle:
    return handle_for(blocks, **settings)


def symmetrized_polydisc(n: int, **settings) -> DomainHandle:
    return DomainHandle(build_table([n]), Kind.SYMMETRIZED_POLYDISC, **settings)


def mu_quotient(n: int, **settings) -> DomainHandle:
    """``E_n``: blocks ``(n - 1, 1)``; ``mu_quotient(2)`` is the tetrablock."""
    if n < 2:
        raise InvalidSpecError("mu-quotients need n >= 2")
    return DomainHandle(build_table([n - 1, 1]), Kind.MU_QUOTIENT, **settings)


def tetrablock(**settings) -> DomainHandle:
    return mu_quotient(2, **settings)


@lru_cache(maxsize=None)
def _levels(blocks: tuple[int, ...]) -> tuple[tuple[MultiIndexTable, SplitTable], ...]:
    out = []
    for k in range(2, len(blocks) + 1):
        t = build_table(blocks[:k])
        out.append((t, split_table(t, k - 1)))
    return tuple(out)


def _point(handle: DomainHandle, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (handle.dim,):
        raise InvalidArgumentError(f"point must have length {handle.dim}, got shape {x.shape}")
    return x


# ------------------------------------------------------------ membership


def _member_roots(xs: np.ndarray, band: float) -> MembershipResult:
    test = all_roots_outside_closed_disc(univariate_R_coeffs(xs), band)
    margin = test.min_modulus - 1
    if test.status is DiscStatus.YES:
        return MembershipResult(Status.INSIDE, Method.ROOTS, margin, level=1)
    status = Status.OUTSIDE if test.status is DiscStatus.NO else Status.BOUNDARY
    wit = None if test.witness is None else np.array([test.witness])
    return MembershipResult(status, Method.ROOTS, margin, wit, level=1)


def _member_psi(handle: DomainHandle, x: np.ndarray) -> MembershipResult:
    band = handle.band
    r1 = handle.blocks[0]
    base = _member_roots(x[:r1], band)
    if not base.inside:
        return replace(base, method=Method.PSI_RECURSIVE)
    margin = base.margin
    for level, (t, sp) in enumerate(_levels(handle.blocks), start=2):
        sup, zp = torus_argmax_psi(t, sp, x[: t.N], grid=handle.psi_grid)
        gap = 1.0 - sup
        margin = min(margin, gap)
        if gap > band:
            continue
        status = Status.OUTSIDE if gap < -band else Status.BOUNDARY
        return MembershipResult(status, Method.PSI_RECURSIVE, gap, zp, level=level)
    return MembershipResult(Status.INSIDE, Method.PSI_RECURSIVE, margin, level=handle.table.s)


def _member_psi_batch(handle: DomainHandle, X: np.ndarray) -> list[MembershipResult]:
    """Row-wise :func:`_member_psi`, one torus search per level for all rows."""
    band = handle.band
    r1 = handle.blocks[0]
    out = [replace(res, method=Method.PSI_RECURSIVE) if not res.inside else res
           for res in member_batch(handle.prefix(1), X[:, :r1])]
    live = np.array([res.inside for res in out])
    margin = np.array([res.margin for res in out])
    for level, (t, sp) in enumerate(_levels(handle.blocks), start=2):
        rows = np.flatnonzero(live)
        if not rows.size:
            break
        sup, zp = torus_argmax_psi_batch(t, sp, X[rows, : t.N], grid=handle.psi_grid)
        gap = 1.0 - sup
        margin[rows] = np.minimum(margin[rows], gap)
        for k in np.flatnonzero(gap <= band):
            status = Status.OUTSIDE if gap[k] < -band else Status.BOUNDARY
            out[rows[k]] = MembershipResult(status, Method.PSI_RECURSIVE, float(gap[k]), zp[k], level=level)
            live[rows[k]] = False
    for i in np.flatnonzero(live):
        out[i] = MembershipResult(Status.INSIDE, Method.PSI_RECURSIVE, float(margin[i]), level=handle.table.s)
    return out


def _member_grid(handle: DomainHandle, x: np.ndarray) -> MembershipResult:
    depths = (handle.max_depth, handle.max_depth + 3)
    for depth in depths:
        try:
            cert = certify_nonvanishing(handle.table, x, 1.0, handle.resolution, depth)
        except BudgetError:
            break
        if cert.status is CertStatus.INSIDE:
            return MembershipResult(Status.INSIDE, Method.CERTIFIED_GRID, cert.margin, level=handle.table.s)
        if cert.status is CertStatus.OUTSIDE:
            return MembershipResult(Status.OUTSIDE, Method.CERTIFIED_GRID, -0.0, cert.witness, handle.table.s)
    return MembershipResult(Status.UNDETERMINED, Method.CERTIFIED_GRID, 0.0, level=handle.table.s)


def member(handle: DomainHandle, x, method: Optional[Method] = None) -> MembershipResult:
    """Classify ``x`` as Inside / Outside / Boundary / Undetermined.

    The default method is Roots for one block, PsiRecursive for blocks
    ``(r_1, 1, ..., 1)`` and CertifiedGrid otherwise.
    """
    x = _point(handle, x)
    if method is None:
        method = Method.ROOTS if handle.table.s == 1 else (
            Method.PSI_RECURSIVE if handle.psi_form else Method.CERTIFIED_GRID)
    if method is Method.ROOTS:
        if handle.table.s != 1:
            raise InvalidArgumentError("the Roots method needs a single block")
        return _member_roots(x, handle.band)
    if method is Method.PSI_RECURSIVE:
        if not handle.psi_form:
            raise InvalidArgumentError("PsiRecursive needs blocks of the form (r1, 1, ..., 1)")
        return _member_psi(handle, x)
    return _member_grid(handle, x)


def member_batch(handle: DomainHandle, X) -> list[MembershipResult]:
    """Membership of many points; vectorised for single-block domains."""
    X = np.asarray(X, dtype=complex).reshape(-1, handle.dim)
    if len(X) and handle.table.s > 1 and handle.psi_form:
        return _member_psi_batch(handle, X)
    if handle.table.s != 1 or len(X) == 0:
        return [member(handle, x) for x in X]
    out: list[Optional[MembershipResult]] = [None] * len(X)
    full = X[:, -1] != 0
    idx = np.flatnonzero(full)
    if idx.size:
        roots = roots_batch(univariate_R_coeffs(X[idx]))
        mods = np.abs(roots)
        k = np.argmin(mods, axis=1)
        for pos, (i, kk) in enumerate(zip(idx, k)):
            m = float(mods[pos, kk])
            if m > 1 + handle.band:
                out[i] = MembershipResult(Status.INSIDE, Method.ROOTS, m - 1, level=1)
            else:
                st = Status.OUTSIDE if m < 1 - handle.band else Status.BOUNDARY
                out[i] = MembershipResult(st, Method.ROOTS, m - 1, np.array([roots[pos, kk]]), 1)
    for i in np.flatnonzero(~full):
        out[i] = member(handle, X[i])
    return out


_LADDER = tuple(1 - 2.0**-k for k in range(1, 14)) + (1 - 1e-4,)


def member_closure(handle: DomainHandle, x) -> MembershipResult:
    """Membership in the closure, for one block or blocks ``(r_1, 1, ..., 1)``.

    ``x`` is in the closure iff the scaled points ``act(degrees, r, x)`` are
    members for every ``r < 1``; ``r`` runs along a ladder up to ``1 - 1e-4``.
    """
    if not (handle.table.s == 1 or handle.psi_form):
        raise InvalidArgumentError("closure test is only available for blocks (r1, 1, ..., 1)")
    x = _point(handle, x)
    res, unsure = None, None
    for r in _LADDER:
        res = member(handle, quasibalanced_act(handle.weights, r, x))
        if res.status is Status.OUTSIDE:
            return res
        if res.status is not Status.INSIDE and unsure is None:
            unsure = res
    if unsure is not None:
        return replace(unsure, status=Status.UNDETERMINED)
    return res


# ------------------------------------------------------------- gauge


def minkowski_interval(handle: DomainHandle, x, tol: float = 1e-7) -> tuple[float, float, bool]:
    """Bracket ``[lo, hi]`` of width ``<= tol * min(1, hi)`` around the quasibalanced gauge.

    The gauge is ``h(x) = inf{t > 0 : act(degrees, 1/t, x) in D}``, so
    ``D = {h < 1}`` and ``h(act(lam, x)) = |lam| h(x)``.  ``exact`` is False
    when an Undetermined membership answer was met (treated as outside).
    """
    x = _point(handle, x)
    w = handle.weights
    if not np.any(x):
        return 0.0, 0.0, True

    def status_at(r):
        # inside the reporting band the sign of the margin still orders points
        res = member(handle, quasibalanced_act(w, r, x))
        if res.status is Status.BOUNDARY:
            return Status.INSIDE if res.margin > 0 else Status.OUTSIDE
        return res.status

    return gauge_bisect(status_at, tol)


def gauge_bisect(status_at, tol: float) -> tuple[float, float, bool]:
    """Bisection for ``inf{t > 0 : status_at(1/t) is Inside}``.

    ``status_at(r)`` classifies the point scaled by ``r``.  The bracket is
    found by halving or doubling from ``t = 1`` and narrowed to width
    ``tol * min(1, hi)``.  Returns ``(lo, hi, exact)``
    with ``exact`` False when an Undetermined answer was met.
    """
    if tol <= 0:
        raise InvalidArgumentError("tol must be positive")
    exact = True

    def inside(t: float) -> bool:
        nonlocal exact
        st = status_at(1.0 / t)
        if st is Status.UNDETERMINED:
            exact = False
        return st is Status.INSIDE

    hi = 1.0
    if inside(hi):
        lo = hi / 2
        while inside(lo):
            hi, lo = lo, lo / 2
            if lo < 1e-300:
                return 0.0, hi, exact
    else:
        lo = hi
        hi = 2.0
        while not inside(hi):
            lo, hi = hi, hi * 2
            if hi > 1e300:
                raise InvalidStateError("gauge bracket search diverged")
    # absolute width tol, relative below 1 so that rescaling by 1/h stays accurate
    while hi - lo > tol * min(1.0, hi):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi, exact


def minkowski(handle: DomainHandle, x, tol: float = 1e-7) -> float:
    """Quasibalanced Minkowski functional with weights ``|alpha^j|``."""
    lo, hi, _ = minkowski_interval(handle, x, tol)
    return 0.5 * (lo + hi)


# ------------------------------------------------------------ retracts


def _check_split(handle: DomainHandle, split: SplitTable) -> None:
    if split.parent.blocks != handle.blocks:
        raise InvalidArgumentError("split belongs to a different table")


def retract_theta(handle: DomainHandle, split: SplitTable, x_prime, verify: bool = False) -> np.ndarray:
    """``x' -> (x', 0)``: embeds the prefix domain into ``handle``'s domain."""
    _check_split(handle, split)
    xp = np.asarray(x_prime, dtype=complex)
    if xp.shape != (split.N_prime,):
        raise InvalidArgumentError(f"x' must have length {split.N_prime}")
    if verify and not handle.prefix(split.s_prime).member(xp).inside:
        raise InvalidArgumentError("x' is not a member of the prefix domain")
    return np.concatenate([xp, np.zeros(split.N_doubleprime, dtype=complex)])


def retract_iota(handle: DomainHandle, split: SplitTable, x, verify: bool = False) -> np.ndarray:
    """``(x', x'') -> x'``: projects onto the prefix domain."""
    _check_split(handle, split)
    x = _point(handle, x)
    if verify and not member(handle, x).inside:
        raise InvalidArgumentError("x is not a member of the domain")
    return x[: split.N_prime].copy()


def g2_to_tetrablock(sp) -> np.ndarray:
    """``(s, p) -> (s/2, s/2, p)``."""
    s, p = np.asarray(sp, dtype=complex)
    return np.array([s / 2, s / 2, p])


def tetrablock_to_g2(x) -> np.ndarray:
    """``(x1, x2, x3) -> (x1 + x2, x3)``."""
    x1, x2, x3 = np.asarray(x, dtype=complex)
    return np.array([x1 + x2, x3])


def fiber_member(handle: DomainHandle, split: SplitTable, x_prime, x_dprime) -> MembershipResult:
    """Membership of ``x''`` in the fiber over ``x'``."""
    _check_split(handle, split)
    xp = np.asarray(x_prime, dtype=complex)
    xpp = np.asarray(x_dprime, dtype=complex)
    if xp.shape != (split.N_prime,) or xpp.shape != (split.N_doubleprime,):
        raise InvalidArgumentError("fiber coordinates have the wrong lengths")
    return member(handle, np.concatenate([xp, xpp]))


# ------------------------------------------------------------ embedding


@dataclass(frozen=True)
class EmbeddingResult:
    m_weights: tuple[int, ...]
    M: int
    x_tilde: np.ndarray
    positions: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "m": list(self.m_weights),
            "M": self.M,
            "positions": list(self.positions),
            "x_tilde": [[float(v.real), float(v.imag)] for v in self.x_tilde],
        }


@lru_cache(maxsize=None)
def _odd_weights(alphas: tuple[tuple[int, ...], ...], s: int, cap: int) -> tuple[int, ...]:
    A = np.asarray(alphas)
    for m in itertools.product(range(1, cap + 1, 2), repeat=s):
        pairing = A @ np.asarray(m)
        if len(set(pairing.tolist())) == len(pairing):
            return m
    raise BudgetError(f"no odd weight vector with entries <= {cap} separates the exponents")


def embed_symmetrized(handle: DomainHandle, x, cap: int = 99) -> EmbeddingResult:
    """Send ``x`` to the symmetrized polydisc ``G_M`` along ``z = (z0**m_1, ..., z0**m_s)``.

    ``m`` is the lexicographically smallest vector of odd weights making the
    pairings ``<m, alpha^j>`` pairwise distinct; coordinate ``<m, alpha^j>`` of
    the image carries ``x_j`` and all others are zero.
    """
    x = _point(handle, x)
    m = _odd_weights(handle.table.alphas, handle.table.s, cap)
    pos = tuple(int(v) for v in handle.table.alpha_array @ np.asarray(m))
    M = max(pos)
    xt = np.zeros(M, dtype=complex)
    xt[np.asarray(pos) - 1] = x
    return EmbeddingResult(tuple(m), M, xt, pos)


# ------------------------------------------------------------- sampling


def task_rng(seed, index: int) -> np.random.Generator:
    """Generator for task ``index`` under root ``seed``.

    Per-task streams use ``SeedSequence(seed, spawn_key=(index,))`` so results
    do not depend on how tasks are spread over workers.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def _draw(rng: np.random.Generator, n: int) -> tuple[np.ndarray, float]:
    A = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    return A, 1.0 - rng.random()  # second value lies in (0, 1]


def _rescale(mats: np.ndarray, u: np.ndarray, norm_cap: float) -> np.ndarray:
    norms = np.atleast_1d(operator_norm(mats))
    norms[norms == 0] = 1.0
    target = norm_cap * u * (1 - 1e-12)
    return mats * (target / norms)[:, None, None]


def sample_member(handle: DomainHandle, seed, norm_cap: float = 0.95) -> np.ndarray:
    """``pi(A)`` for a random ``A`` with ``||A|| <= norm_cap``.

    ``A`` has i.i.d. complex Gaussian entries rescaled to an operator norm
    drawn uniformly from ``(0, norm_cap]``.  No uniformity on the domain is
    implied.  ``seed`` may also be a ``numpy.random.Generator``.
    """
    if not 0 < norm_cap < 1:
        raise InvalidArgumentError("norm_cap must lie in (0, 1)")
    rng = seed if isinstance(seed, np.random.Generator) else task_rng(seed, 0)
    A, u = _draw(rng, handle.table.n)
    return pi_map(handle.table, _rescale(A[None], np.array([u]), norm_cap)[0])


def sample_matrices(n: int, count: int, seed, norm_cap: float = 0.95, offset: int = 0) -> np.ndarray:
    """``(count, n, n)`` matrices; matrix ``i`` comes from ``task_rng(seed, offset + i)``."""
    if not 0 < norm_cap < 1:
        raise InvalidArgumentError("norm_cap must lie in (0, 1)")
    if count == 0:
        return np.zeros((0, n, n), dtype=complex)
    draws = [_draw(task_rng(seed, offset + i), n) for i in range(count)]
    mats = np.stack([d[0] for d in draws])
    return _rescale(mats, np.array([d[1] for d in draws]), norm_cap)


def sample_members(handle: DomainHandle, count: int, seed, norm_cap: float = 0.95,
                   offset: int = 0) -> np.ndarray:
    """``count`` samples; sample ``i`` is drawn from ``task_rng(seed, offset + i)``,
    so ``sample_members(h, 1, seed, offset=i)`` reproduces row ``i``."""
    mats = sample_matrices(handle.table.n, count, seed, norm_cap, offset)
    if count == 0:
        return np.zeros((0, handle.dim), dtype=complex)
    return pi_map(handle.table, mats)


# ---------------------------------------------------------- separation


@dataclass(frozen=True)
class AffineFunctional:
    """``f(x) = const + coeffs . x``; its zero set is a complex hyperplane."""

    const: complex
    coeffs: np.ndarray
    level: int
    z: np.ndarray
    omega: Optional[complex] = None

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        return self.const + x @ self.coeffs

    def to_json(self) -> dict:
        c = lambda v: [float(np.real(v)), float(np.imag(v))]
        return {
            "const": c(self.const),
            "coeffs": [c(v) for v in self.coeffs],
            "level": self.level,
            "z": [c(v) for v in np.atleast_1d(self.z)],
            "omega": None if self.omega is None else c(self.omega),
        }


def _separator(handle: DomainHandle, x0: np.ndarray) -> AffineFunctional:
    N = handle.dim
    band = handle.band
    r1 = handle.blocks[0]
    base = _member_roots(x0[:r1], band)
    if not base.inside:
        if base.status is Status.BOUNDARY:
            raise UndeterminedError("leading symmetrized polydisc point lies in the boundary band")
        roots = roots_univariate(univariate_R_coeffs(x0[:r1]))
        z0 = complex(roots[np.argmin(np.abs(roots))])
        coeffs = np.zeros(N, dtype=complex)
        coeffs[:r1] = (-1.0) ** np.arange(1, r1 + 1) * z0 ** np.arange(1, r1 + 1)
        return AffineFunctional(1.0 + 0j, coeffs, 1, np.array([z0]))
    for level, (t, sp) in enumerate(_levels(handle.blocks), start=2):
        sup, zp = torus_argmax_psi(t, sp, x0[: t.N], grid=handle.psi_grid)
        if sup < 1 - band:
            continue
        if sup <= 1 + band:
            raise UndeterminedError(f"level {level} lies in the boundary band")
        pre = sp.prefix
        n1 = sp.N_prime
        mono = np.prod(np.power(zp[None, :], pre.alpha_array), axis=1) * pre.signs
        den = 1.0 + mono @ x0[:n1]
        num = x0[n1] + mono @ x0[n1 + 1 : t.N]
        omega = num / den
        coeffs = np.zeros(N, dtype=complex)
        coeffs[:n1] = -omega * mono
        coeffs[n1] = 1.0
        coeffs[n1 + 1 : t.N] = mono
        return AffineFunctional(-omega, coeffs, level, zp, complex(omega))
    raise UndeterminedError("no failing level found")


def separating_hyperplane(handle: DomainHandle, x0) -> AffineFunctional:
    """Complex hyperplane through ``x0`` missing the domain.

    For blocks ``(r_1, 1, ..., 1)`` and ``x0`` outside the closure.  If the
    leading ``G_{r_1}`` coordinates already fail, the hyperplane is
    ``{R_x(z0) = 0}`` for a root ``z0`` of ``R_{x0'}`` in the closed disc.
    Otherwise at the first level whose ``Psi`` exceeds 1 on the torus, take
    the maximiser ``z'`` and ``omega = Psi_{z'}(x0)`` and use
    ``P_{x''}(z') - omega R'_{x'}(z') = 0``.
    """
    if not (handle.table.s == 1 or handle.psi_form):
        raise InvalidArgumentError("separators are built for blocks (r1, 1, ..., 1)")
    x0 = _point(handle, x0)
    cl = member_closure(handle, x0)
    if cl.status is Status.INSIDE:
        raise InvalidArgumentError("x0 lies in the closure of the domain")
    if cl.status is not Status.OUTSIDE:
        raise UndeterminedError("x0 lies in the boundary band")
    return _separator(handle, x0)
