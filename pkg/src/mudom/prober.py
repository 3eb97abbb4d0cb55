"""Randomized geometric audits of domains: starlikeness witnesses, complex
line sections with component and hole counts, balanced-action spot checks
and separating-functional verification.

Every routine takes a *handle*: a :class:`~mudom.domains.DomainHandle` or any
object with ``dim``, ``weights``, ``member_batch(X)`` and
``sample_members(count, seed, offset=...)`` (see :class:`UnitBall`).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .cpoly import roots_batch, univariate_R_coeffs
from .domains import (
    AffineFunctional,
    DomainHandle,
    MembershipResult,
    Method,
    Status,
    member,
    minkowski,
    retract_theta,
    task_rng,
)
from .errors import BudgetError, InvalidArgumentError
from .multiindex import quasibalanced_act, split_table

__all__ = [
    "MAX_RASTER",
    "SectionMap",
    "SeparatorReport",
    "StarlikeWitness",
    "UnitBall",
    "balanced_spot_check",
    "count_topology",
    "disconnection_search",
    "gauges",
    "lift_witness",
    "line_section_scan",
    "starlike_witness_search",
    "verify_separator",
]

MAX_RASTER = 2048

_FOUR = ndimage.generate_binary_structure(2, 1)
_EIGHT = ndimage.generate_binary_structure(2, 2)


class UnitBall:
    """Open Euclidean unit ball in ``C^dim``; a convex test double."""

    def __init__(self, dim: int):
        self.dim = dim
        self.weights = (1,) * dim

    def member(self, x) -> MembershipResult:
        return self.member_batch(np.asarray(x)[None])[0]

    def member_batch(self, X) -> list[MembershipResult]:
        X = np.asarray(X, dtype=complex).reshape(-1, self.dim)
        gap = 1.0 - np.linalg.norm(X, axis=1)
        out = []
        for g in gap:
            st = Status.INSIDE if g > 1e-12 else (Status.OUTSIDE if g < -1e-12 else Status.BOUNDARY)
            out.append(MembershipResult(st, Method.ROOTS, float(g)))
        return out

    def gauge_batch(self, X) -> np.ndarray:
        return np.linalg.norm(np.asarray(X).reshape(-1, self.dim), axis=1)

    def sample_members(self, count: int, seed, norm_cap: float = 0.95, offset: int = 0) -> np.ndarray:
        out = np.empty((count, self.dim), dtype=complex)
        for i in range(count):
            rng = task_rng(seed, offset + i)
            v = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
            out[i] = v / np.linalg.norm(v) * norm_cap * (1.0 - rng.random())
        return out


def _statuses(handle, X) -> np.ndarray:
    """Membership statuses of the rows of ``X`` as an object array."""
    return np.array([r.status for r in handle.member_batch(X)], dtype=object)


def gauges(handle, X) -> np.ndarray:
    """Gauge values of the rows of ``X``.

    For a single block the gauge is the largest ``|lambda_i|`` with
    ``x = sigma(lambda)``, i.e. the reciprocal of the smallest root modulus
    of ``R_x``; other handles fall back to bisection.
    """
    X = np.asarray(X, dtype=complex).reshape(-1, handle.dim)
    if hasattr(handle, "gauge_batch"):
        return handle.gauge_batch(X)
    if isinstance(handle, DomainHandle) and handle.table.s == 1:
        out = np.zeros(len(X))
        full = X[:, -1] != 0
        if full.any():
            out[full] = 1.0 / np.abs(roots_batch(univariate_R_coeffs(X[full]))).min(axis=1)
        for i in np.flatnonzero(~full):
            out[i] = minkowski(handle, X[i], 1e-12)
        return out
    return np.array([minkowski(handle, x, 1e-10) for x in X])


# ----------------------------------------------------------------- topology


def count_topology(mask) -> tuple[int, int]:
    """Components (4-connected) of ``mask`` and holes of it.

    A hole is an 8-connected component of the complement that does not
    touch the raster frame.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise InvalidArgumentError("mask must be two-dimensional")
    _, comps = ndimage.label(mask, structure=_FOUR)
    labels, n_out = ndimage.label(~mask, structure=_EIGHT)
    frame = np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])
    touching = set(np.unique(frame[frame > 0]).tolist())
    holes = n_out - len(touching)
    return int(comps), int(holes)


_CODES = {Status.INSIDE: 0, Status.OUTSIDE: 1, Status.BOUNDARY: 2, Status.UNDETERMINED: 3}


@dataclass(frozen=True)
class SectionMap:
    """Membership raster of ``lam -> basepoint + lam * direction``.

    ``window`` is ``(re_min, re_max, im_min, im_max)``; ``codes[i, j]``
    belongs to ``lam = re[j] + 1j * im[i]`` with codes 0 Inside, 1 Outside,
    2 Boundary and 3 Undetermined.  ``grid`` is the Inside mask.
    """

    basepoint: np.ndarray
    direction: np.ndarray
    window: tuple[float, float, float, float]
    resolution: int
    codes: np.ndarray
    components: int
    holes: int

    @property
    def grid(self) -> np.ndarray:
        return self.codes == 0

    @property
    def undetermined(self) -> int:
        return int(np.count_nonzero(self.codes == 3))

    @property
    def boundary(self) -> int:
        return int(np.count_nonzero(self.codes == 2))

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        r0, r1, i0, i1 = self.window
        return np.linspace(r0, r1, self.resolution), np.linspace(i0, i1, self.resolution)

    def to_csv(self, fh=None) -> Optional[str]:
        """Rows ``lam_re, lam_im, status``; returns the text when ``fh`` is None."""
        names = {v: k.value for k, v in _CODES.items()}
        own = fh is None
        fh = io.StringIO() if own else fh
        w = csv.writer(fh)
        w.writerow(["lam_re", "lam_im", "status"])
        re, im = self.axes()
        for i, y in enumerate(im):
            for j, x in enumerate(re):
                w.writerow([repr(float(x)), repr(float(y)), names[int(self.codes[i, j])]])
        return fh.getvalue() if own else None

    def to_json(self) -> dict:
        c = lambda v: [[float(z.real), float(z.imag)] for z in v]
        return {
            "basepoint": c(self.basepoint),
            "direction": c(self.direction),
            "window": list(self.window),
            "resolution": self.resolution,
            "inside": int(np.count_nonzero(self.grid)),
            "boundary": self.boundary,
            "undetermined": self.undetermined,
            "components": self.components,
            "holes": self.holes,
        }


def line_section_scan(
    handle,
    basepoint,
    direction,
    window: Sequence[float] = (-3.0, 3.0, -3.0, 3.0),
    resolution: int = 128,
) -> SectionMap:
    """Rasterise the section of the domain by a complex affine line.

    Boundary and Undetermined cells count as outside for the topology.
    """
    b = np.asarray(basepoint, dtype=complex).reshape(handle.dim)
    d = np.asarray(direction, dtype=complex).reshape(handle.dim)
    if not np.any(d):
        raise InvalidArgumentError("direction must be nonzero")
    if resolution > MAX_RASTER:
        raise BudgetError(f"resolution {resolution} exceeds {MAX_RASTER}")
    if resolution < 2:
        raise InvalidArgumentError("resolution must be at least 2")
    r0, r1, i0, i1 = (float(v) for v in window)
    if not (r0 < r1 and i0 < i1):
        raise InvalidArgumentError("window must be (re_min, re_max, im_min, im_max) with min < max")
    re = np.linspace(r0, r1, resolution)
    im = np.linspace(i0, i1, resolution)
    lam = re[None, :] + 1j * im[:, None]
    X = b[None, :] + lam.reshape(-1, 1) * d[None, :]
    st = _statuses(handle, X)
    codes = np.array([_CODES[s] for s in st], dtype=np.int8).reshape(resolution, resolution)
    comps, holes = count_topology(codes == 0)
    return SectionMap(b, d, (r0, r1, i0, i1), resolution, codes, comps, holes)


def disconnection_search(handle, lines: int, seed, resolution: int = 96, window: float = 3.0):
    """Scan random lines through sampled members; report sections with more
    than one component or with holes, each confirmed at 4x resolution."""
    found = []
    for i in range(lines):
        rng = task_rng(seed, i)
        base = handle.sample_members(1, seed, offset=i)[0]
        d = rng.standard_normal(handle.dim) + 1j * rng.standard_normal(handle.dim)
        d /= np.linalg.norm(d)
        box = (-window, window, -window, window)
        sec = line_section_scan(handle, base, d, box, resolution)
        if sec.components >= 2 or sec.holes >= 1:
            fine = line_section_scan(handle, base, d, box, min(4 * resolution, MAX_RASTER))
            if fine.components >= 2 or fine.holes >= 1:
                found.append(fine)
    return found


# --------------------------------------------------------------- starlike


@dataclass(frozen=True)
class StarlikeWitness:
    """``x`` is a member while ``t * x`` (plain scaling, ``0 < t < 1``) is not."""

    x: np.ndarray
    t: float
    margin_x: float
    margin_tx: float
    samples_used: int
    verified_methods: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "x": [[float(v.real), float(v.imag)] for v in self.x],
            "t": self.t,
            "margin_x": self.margin_x,
            "margin_tx": self.margin_tx,
            "samples_used": self.samples_used,
            "verified_methods": list(self.verified_methods),
        }


def _verify_witness(handle, x, t) -> Optional[tuple[float, float, tuple[str, ...]]]:
    """Re-check with a 10x tighter band and with every applicable method."""
    if not isinstance(handle, DomainHandle):
        a, b = handle.member(x), handle.member(t * x)
        ok = a.status is Status.INSIDE and b.status is Status.OUTSIDE
        return (a.margin, b.margin, (a.method.value,)) if ok else None
    tight = handle.with_settings(band=handle.band / 10)
    # the default method, then the certified grid (which applies to every table)
    methods = [None, Method.CERTIFIED_GRID]
    used = []
    margins = None
    for m in methods:
        a, b = member(tight, x, m), member(tight, t * x, m)
        if a.status is not Status.INSIDE or b.status is not Status.OUTSIDE:
            return None
        used.append(a.method.value)
        margins = margins or (a.margin, b.margin)
    return margins[0], margins[1], tuple(used)


def _robustify(handle, x, t, w) -> np.ndarray:
    """Slide ``x`` along the weighted action to balance the two margins.

    Shrinking ``x`` raises its own margin and lowers that of ``t x``; the
    scale maximising the smaller of the two is kept.
    """
    best, best_score = x, -math.inf
    for c in np.linspace(0.8, 1.0, 201):
        y = x * np.power(c, w)
        a, b = handle.member(y), handle.member(t * y)
        if a.status is not Status.INSIDE or b.status is not Status.OUTSIDE:
            continue
        score = min(a.margin, -b.margin)
        if score > best_score:
            best, best_score = y, score
    return best


def starlike_witness_search(
    handle,
    budget: int = 10**5,
    seed=0,
    t_grid: int = 19,
    chunk: int = 1024,
    tol: float = 1e-6,
) -> Optional[StarlikeWitness]:
    """Look for a member ``x`` and ``t`` in ``(0, 1)`` with ``t x`` outside.

    Candidates are sampled members rescaled along the weighted action to a
    gauge value drawn from ``[0.9, 1 - tol]``; each is tested at ``t_grid``
    equally spaced ``t``.  ``budget`` bounds the number of candidates.  The
    first hit, moved inward to balance its margins, that survives
    re-verification is returned; None means no
    witness was found, which is a legitimate outcome.
    """
    if budget < 1:
        raise InvalidArgumentError("budget must be at least 1")
    ts = np.linspace(0.05, 0.95, t_grid)
    w = np.asarray(handle.weights)
    used = 0
    block = 0
    while used < budget:
        k = min(chunk, budget - used)
        X = handle.sample_members(k, seed, offset=used)
        rng = task_rng(seed, 1_000_000_000 + block)
        block += 1
        used += k
        h = gauges(handle, X)
        keep = h > 0
        X, h = X[keep], h[keep]
        target = rng.uniform(0.9, 1 - tol, len(X))
        X = X * np.power((target / h)[:, None], w[None, :])
        for t in ts:
            st = _statuses(handle, t * X)
            for i in np.flatnonzero(st == Status.OUTSIDE):
                x = _robustify(handle, X[i], float(t), w)
                v = _verify_witness(handle, x, float(t))
                if v is not None:
                    return StarlikeWitness(x.copy(), float(t), v[0], v[1], used, v[2])
    return None


def lift_witness(witness: StarlikeWitness, handle: DomainHandle) -> Optional[StarlikeWitness]:
    """Carry a ``G_{r_1}`` witness to blocks ``(r_1, 1, ..., 1)`` via ``x -> (x, 0)``.

    The zero padding commutes with plain scaling, so ``(x, 0)`` is a witness
    whenever both memberships transfer; they are re-verified here.
    """
    split = split_table(handle.table, 1)
    if len(witness.x) != split.N_prime:
        raise InvalidArgumentError("witness does not belong to the leading block")
    x = retract_theta(handle, split, witness.x)
    v = _verify_witness(handle, x, witness.t)
    if v is None:
        return None
    return StarlikeWitness(x, witness.t, v[0], v[1], witness.samples_used, v[2])


# ---------------------------------------------------------------- checks


def balanced_spot_check(handle, X, scalings: int, seed) -> dict:
    """Apply ``scalings`` random ``|lam| <= 1`` to each Inside row of ``X``.

    Returns counts of tested pairs and of failures (image not Inside).
    """
    X = np.asarray(X, dtype=complex).reshape(-1, handle.dim)
    w = np.asarray(handle.weights)
    tested = failed = 0
    bad = []
    for i, x in enumerate(X):
        if handle.member(x).status is not Status.INSIDE:
            continue
        rng = task_rng(seed, i)
        lam = np.sqrt(rng.random(scalings)) * np.exp(2j * np.pi * rng.random(scalings))
        imgs = x[None, :] * np.power(lam[:, None], w[None, :])
        st = _statuses(handle, imgs)
        miss = np.flatnonzero(st != Status.INSIDE)
        tested += scalings
        failed += miss.size
        if miss.size and len(bad) < 5:
            bad.append((i, complex(lam[miss[0]])))
    return {"tested": tested, "failed": failed, "examples": bad}


@dataclass(frozen=True)
class SeparatorReport:
    passed: bool
    min_modulus: float
    samples: int
    value_at_x0: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "min_modulus": self.min_modulus,
            "samples": self.samples,
            "value_at_x0": self.value_at_x0,
        }


def verify_separator(handle, functional: AffineFunctional, samples: int = 10**4, seed=0,
                     x0=None, threshold: float = 1e-9) -> SeparatorReport:
    """Minimum of ``|functional|`` over sampled members; passes iff it is ``>= threshold``."""
    X = handle.sample_members(samples, seed)
    vals = np.abs(functional(X))
    m = float(vals.min()) if vals.size else math.inf
    at = None if x0 is None else float(abs(functional(np.asarray(x0, dtype=complex))))
    return SeparatorReport(bool(m >= threshold), m, samples, at)
