"""The pentablock: points ``(a, s, p)`` with ``(s, p)`` in ``G_2`` and

    |a| < |1 - (s conj(beta) / 2) / (1 + sqrt(1 - |beta|**2))|,
    beta = (s - conj(s) p) / (1 - |p|**2).

It is a Hartogs domain over ``G_2`` with balanced fibers in ``a`` and is
``(k, 1, 2)``-balanced for every ``k >= 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .domains import (
    MembershipResult,
    Method,
    Status,
    gauge_bisect,
    member,
    member_batch,
    member_closure,
    symmetrized_polydisc,
)
from .errors import InconsistentStateError, InvalidArgumentError, NumericFailure

__all__ = [
    "PENTA_BAND",
    "PentaPoint",
    "beta",
    "member_penta",
    "member_penta_batch",
    "member_penta_closure",
    "penta_act",
    "penta_bound",
    "penta_iota",
    "penta_minkowski",
    "penta_minkowski_interval",
    "penta_theta",
]

PENTA_BAND = 1e-9
POLE_BAND = 1e-12

_G2 = symmetrized_polydisc(2)


@dataclass(frozen=True)
class PentaPoint:
    a: complex
    s: complex
    p: complex

    def __post_init__(self):
        for name in ("a", "s", "p"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InvalidArgumentError(f"{name} must be finite")
            object.__setattr__(self, name, v)

    @classmethod
    def of(cls, pt) -> "PentaPoint":
        if isinstance(pt, PentaPoint):
            return pt
        a, s, p = np.asarray(pt, dtype=complex).reshape(3)
        return cls(a, s, p)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.s, self.p])


def beta(s: complex, p: complex) -> complex:
    """``(s - conj(s) p) / (1 - |p|**2)``; raises NumericFailure near ``|p| = 1``."""
    s, p = complex(s), complex(p)
    den = 1.0 - abs(p) ** 2
    if abs(den) < 2 * POLE_BAND:
        raise NumericFailure("beta has a pole at |p| = 1")
    return (s - s.conjugate() * p) / den


def penta_bound(s: complex, p: complex, strict_g2: bool = True) -> float:
    """Right-hand side ``|1 - (s conj(beta)/2) / (1 + sqrt(1 - |beta|**2))|``.

    ``1 - |beta|**2`` is clamped at 0 when it is negative by at most ``1e-12``;
    a larger violation raises InconsistentStateError when ``strict_g2`` says
    ``(s, p)`` was found inside ``G_2``.
    """
    b = beta(s, p)
    q = 1.0 - abs(b) ** 2
    if q < 0:
        if q < -POLE_BAND and strict_g2 and abs(b) > 1 + PENTA_BAND:
            raise InconsistentStateError(f"|beta| = {abs(b)} > 1 for a point inside G_2")
        q = 0.0
    return abs(1.0 - 0.5 * complex(s) * b.conjugate() / (1.0 + math.sqrt(q)))


def member_penta(pt) -> MembershipResult:
    """Classify a point of ``C^3`` against the pentablock (band ``1e-9``)."""
    pt = PentaPoint.of(pt)
    base = member(_G2, [pt.s, pt.p])
    if base.status is not Status.INSIDE:
        return base
    gap = penta_bound(pt.s, pt.p) - abs(pt.a)
    if gap > PENTA_BAND:
        return MembershipResult(Status.INSIDE, Method.ROOTS, min(gap, base.margin), level=2)
    status = Status.OUTSIDE if gap < -PENTA_BAND else Status.BOUNDARY
    return MembershipResult(status, Method.ROOTS, gap, level=2)


def member_penta_batch(P) -> list[MembershipResult]:
    """Row-wise :func:`member_penta` for an array of ``(a, s, p)`` rows."""
    P = np.asarray(P, dtype=complex).reshape(-1, 3)
    if not np.all(np.isfinite(P)):
        raise InvalidArgumentError("points must be finite")
    out = member_batch(_G2, P[:, 1:])
    a, s, p = P.T
    den = 1.0 - np.abs(p) ** 2
    rows = np.flatnonzero([r.status is Status.INSIDE for r in out])
    safe = rows[np.abs(den[rows]) >= 2 * POLE_BAND]
    b = (s[safe] - s[safe].conj() * p[safe]) / den[safe]
    q = 1.0 - np.abs(b) ** 2
    if np.any((q < -POLE_BAND) & (np.abs(b) > 1 + PENTA_BAND)):
        raise InconsistentStateError("|beta| > 1 for a point inside G_2")
    bound = np.abs(1.0 - 0.5 * s[safe] * b.conj() / (1.0 + np.sqrt(np.maximum(q, 0.0))))
    gap = bound - np.abs(a[safe])
    for i, g in zip(safe, gap):
        base = out[i]
        if g > PENTA_BAND:
            out[i] = MembershipResult(Status.INSIDE, Method.ROOTS, min(float(g), base.margin), level=2)
        else:
            status = Status.OUTSIDE if g < -PENTA_BAND else Status.BOUNDARY
            out[i] = MembershipResult(status, Method.ROOTS, float(g), level=2)
    for i in np.setdiff1d(rows, safe):
        out[i] = member_penta(P[i])
    return out


def member_penta_closure(pt) -> MembershipResult:
    """Closure test: ``(s, p)`` in the closure of ``G_2`` and ``|a| <= bound``.

    When ``|p|`` is within ``1e-12`` of 1 the bound is not defined and the
    scaled family ``(r a, r s, r^2 p)``, ``r -> 1``, is tested instead.
    """
    pt = PentaPoint.of(pt)
    base = member_closure(_G2, [pt.s, pt.p])
    if base.status is not Status.INSIDE:
        return base
    if abs(1.0 - abs(pt.p)) < 2 * POLE_BAND:
        res = base
        for k in range(1, 14):
            r = 1 - 2.0**-k
            res = member_penta(penta_act(pt, 1, r))
            if res.status is Status.OUTSIDE:
                return res
        return replace(res, status=Status.INSIDE)
    gap = penta_bound(pt.s, pt.p, strict_g2=False) - abs(pt.a)
    status = Status.INSIDE if gap >= -PENTA_BAND else Status.OUTSIDE
    return MembershipResult(status, Method.ROOTS, gap, level=2)


def penta_act(pt, k: int, r: complex) -> PentaPoint:
    """``(r**k a, r s, r**2 p)``."""
    pt = PentaPoint.of(pt)
    if k < 0:
        raise InvalidArgumentError("k must be non-negative")
    r = complex(r)
    return PentaPoint(r**k * pt.a, r * pt.s, r * r * pt.p)


def penta_minkowski_interval(pt, k: int = 1, tol: float = 1e-7) -> tuple[float, float, bool]:
    if k < 1:
        raise InvalidArgumentError("the gauge needs k >= 1")
    pt = PentaPoint.of(pt)
    if not np.any(pt.as_array()):
        return 0.0, 0.0, True

    def status_at(r):
        res = member_penta(penta_act(pt, k, r))
        if res.status is Status.BOUNDARY:
            return Status.INSIDE if res.margin > 0 else Status.OUTSIDE
        return res.status

    return gauge_bisect(status_at, tol)


def penta_minkowski(pt, k: int = 1, tol: float = 1e-7) -> float:
    """Gauge for the action ``(r**k a, r s, r**2 p)``, ``k >= 1``."""
    lo, hi, _ = penta_minkowski_interval(pt, k, tol)
    return 0.5 * (lo + hi)


def penta_theta(s: complex, p: complex, verify: bool = False) -> PentaPoint:
    """``(s, p) -> (0, s, p)``."""
    if verify and not member(_G2, [s, p]).inside:
        raise InvalidArgumentError("(s, p) is not in G_2")
    return PentaPoint(0, s, p)


def penta_iota(pt, verify: bool = False) -> tuple[complex, complex]:
    """``(a, s, p) -> (s, p)``."""
    pt = PentaPoint.of(pt)
    if verify and not member_penta(pt).inside:
        raise InvalidArgumentError("point is not in the pentablock")
    return pt.s, pt.p
