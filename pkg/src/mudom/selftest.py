"""Small, deterministic invariant suites run by ``mudom selftest``.

Each suite returns ``(passed, failed)`` check counts.  ``canary=True`` runs
everything against a deliberately corrupted ``R`` (every term's sign
flipped) so that one can confirm the suites actually detect breakage.
"""
from __future__ import annotations

import time
from typing import Callable

import numpy as np

from . import cpoly
from .clinalg import det, det_expansion, operator_norm, pi_map, spectral_radius
from .cpoly import eval_R
from .domains import (
    Status,
    embed_symmetrized,
    g2_to_tetrablock,
    handle_for,
    member,
    minkowski,
    retract_iota,
    retract_theta,
    sample_matrices,
    sample_members,
    symmetrized_polydisc,
    task_rng,
    tetrablock,
    tetrablock_to_g2,
)
from .multiindex import build_table, compare, quasibalanced_act, split_table
from .pentablock import member_penta, penta_act
from .prober import count_topology
from .ssv import mu_lower_torus_batch

TABLES = ([2], [3], [1, 1], [2, 1], [1, 1, 1])


def _rand_c(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _tally(flags) -> tuple[int, int]:
    flags = np.asarray(flags, dtype=bool).ravel()
    return int(flags.sum()), int((~flags).sum())


def suite_table_order(seed) -> tuple[int, int]:
    ok = []
    for blocks in TABLES:
        t = build_table(blocks)
        ok += [compare(a, b) == -1 for a, b in zip(t.alphas, t.alphas[1:])]
        ok += [t.index_of(a) == j for j, a in enumerate(t.alphas)]
    return _tally(ok)


def suite_det_identity(seed) -> tuple[int, int]:
    """``R_{pi(A)}(z) = det(I - A X(z))`` and the minor expansion of the determinant."""
    ok = []
    for k, blocks in enumerate(TABLES):
        t = build_table(blocks)
        rng = task_rng(seed, k)
        for _ in range(20):
            A = _rand_c(rng, (t.n, t.n)) / 2
            z = _rand_c(rng, t.s) / 2
            X = np.diag(np.repeat(z, t.blocks))
            d = det(np.eye(t.n) - A @ X)
            ok.append(abs(eval_R(t, pi_map(t, A), z) - d) <= 1e-10 * (1 + abs(d)))
            ok.append(abs(det_expansion(A, np.diag(X)) - d) <= 1e-11 * (1 + abs(d)))
    return _tally(ok)


def suite_quasibalanced(seed) -> tuple[int, int]:
    ok = []
    for k, blocks in enumerate(TABLES):
        t = build_table(blocks)
        rng = task_rng(seed, 100 + k)
        for _ in range(20):
            x = _rand_c(rng, t.N)
            z = _rand_c(rng, t.s)
            lam = complex(_rand_c(rng, 1)[0])
            lhs = eval_R(t, quasibalanced_act(t.degrees, lam, x), z)
            rhs = eval_R(t, x, lam * z)
            ok.append(abs(lhs - rhs) <= 1e-12 * (1 + abs(rhs)))
    return _tally(ok)


def suite_pi_inclusion(seed) -> tuple[int, int]:
    ok = []
    for k, blocks in enumerate(TABLES):
        h = handle_for(blocks)
        X = sample_members(h, 20, seed + k)
        ok += [member(h, x).status is Status.INSIDE for x in X]
    return _tally(ok)


def suite_retracts(seed) -> tuple[int, int]:
    ok = []
    for k, blocks in enumerate(([1, 1], [2, 1], [1, 1, 1])):
        h = handle_for(blocks)
        sp = split_table(h.table, 1)
        prefix = h.prefix(1)
        for xp in sample_members(prefix, 10, seed + k):
            img = retract_theta(h, sp, xp)
            ok.append(np.array_equal(retract_iota(h, sp, img), xp))
            ok.append(member(h, img).status is Status.INSIDE)
    tb, g2 = tetrablock(), symmetrized_polydisc(2)
    for sp_ in sample_members(g2, 10, seed):
        ok.append(np.allclose(tetrablock_to_g2(g2_to_tetrablock(sp_)), sp_, rtol=0, atol=1e-15))
        ok.append(member(tb, g2_to_tetrablock(sp_)).status is Status.INSIDE)
    return _tally(ok)


def suite_mu_sandwich(seed) -> tuple[int, int]:
    ok = []
    for k, blocks in enumerate(([2], [1, 1], [2, 1])):
        t = build_table(blocks)
        A = sample_matrices(t.n, 10, seed + k, 0.9) * 1.5
        lo = mu_lower_torus_batch(t, A, 32)
        ok += list(spectral_radius(A) <= lo + 1e-8)
        ok += list(lo <= operator_norm(A) + 1e-8)
    return _tally(ok)


def suite_minkowski(seed) -> tuple[int, int]:
    ok = []
    h = tetrablock()
    rng = task_rng(seed, 7)
    for x in sample_members(h, 4, seed):
        lam = 0.3 + 0.6 * rng.random()
        a = minkowski(h, x, 1e-7)
        b = minkowski(h, quasibalanced_act(h.weights, lam, x), 1e-7)
        ok.append(abs(b - lam * a) <= 2e-7 + 1e-12)
    return _tally(ok)


def suite_embedding(seed) -> tuple[int, int]:
    ok = []
    for k, blocks in enumerate(([1, 1], [2, 1])):
        h = handle_for(blocks)
        for x in sample_members(h, 10, seed + k):
            e = embed_symmetrized(h, x)
            ok.append(member(symmetrized_polydisc(e.M), e.x_tilde).status is Status.INSIDE)
    return _tally(ok)


def suite_pentablock(seed) -> tuple[int, int]:
    ok = []
    rng = task_rng(seed, 9)
    g2 = symmetrized_polydisc(2)
    for s, p in sample_members(g2, 10, seed):
        pt = (0.5 * (1 - rng.random()), s, p)
        if member_penta(pt).status is not Status.INSIDE:
            continue
        for k in (1, 2, 3):
            lam = np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            ok.append(member_penta(penta_act(pt, k, lam)).status is Status.INSIDE)
    return _tally(ok)


def suite_topology(seed) -> tuple[int, int]:
    yy, xx = np.mgrid[-20:21, -20:21]
    r = np.hypot(xx, yy)
    annulus = (r < 15) & (r > 7)
    discs = (np.hypot(xx - 8, yy) < 5) | (np.hypot(xx + 8, yy) < 5)
    return _tally([count_topology(annulus) == (1, 1), count_topology(discs) == (2, 0)])


SUITES: dict[str, Callable[[int], tuple[int, int]]] = {
    "table_order": suite_table_order,
    "det_identity": suite_det_identity,
    "quasibalanced": suite_quasibalanced,
    "pi_inclusion": suite_pi_inclusion,
    "retracts": suite_retracts,
    "mu_sandwich": suite_mu_sandwich,
    "minkowski": suite_minkowski,
    "embedding": suite_embedding,
    "pentablock": suite_pentablock,
    "topology": suite_topology,
}


def selftest(seed: int = 0, canary: bool = False, suites=None) -> dict:
    """Run the suites; returns per-suite counts plus an overall flag."""
    names = list(SUITES) if suites is None else list(suites)
    out = {}
    ctx = cpoly._canary() if canary else _null()
    with ctx:
        for name in names:
            t0 = time.perf_counter()
            try:
                passed, failed = SUITES[name](seed)
                err = None
            except Exception as exc:  # a crash counts as a failed suite
                passed, failed, err = 0, 1, f"{type(exc).__name__}: {exc}"
            out[name] = {"passed": passed, "failed": failed, "seconds": time.perf_counter() - t0}
            if err:
                out[name]["error"] = err
    return {
        "seed": seed,
        "canary": canary,
        "suites": out,
        "ok": all(v["failed"] == 0 for v in out.values()),
    }


class _null:
    def __enter__(self):
        return None

    def __exit__(self, *exc):
        return False
