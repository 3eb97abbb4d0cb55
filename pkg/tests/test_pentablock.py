import math

import numpy as np
import pytest

from conftest import crandn
from mudom.domains import Status, member, sample_members, symmetrized_polydisc
from mudom.errors import InvalidArgumentError, NumericFailure
from mudom.pentablock import (
    PentaPoint,
    beta,
    member_penta,
    member_penta_batch,
    member_penta_closure,
    penta_act,
    penta_bound,
    penta_iota,
    penta_minkowski,
    penta_minkowski_interval,
    penta_theta,
)

G2 = symmetrized_polydisc(2)


def members(count, seed):
    """Pentablock members: (s, p) from G_2 and |a| a fraction of the bound."""
    rng = np.random.default_rng(seed)
    out = []
    for s, p in sample_members(G2, count, seed):
        a = rng.uniform(0, 0.999) * penta_bound(s, p) * np.exp(2j * np.pi * rng.random())
        out.append(PentaPoint(a, s, p))
    return out


def test_beta_examples():
    assert beta(0, 0.3) == 0
    assert beta(0.4 + 0.2j, 0) == 0.4 + 0.2j
    assert beta(1, 0.5) == pytest.approx(2 / 3)
    with pytest.raises(NumericFailure):
        beta(1, 1)


def test_member_examples():
    assert member_penta((0, 0, 0)).status is Status.INSIDE
    assert member_penta((0.999, 0, 0)).status is Status.INSIDE
    assert member_penta((1, 0, 0)).status is Status.BOUNDARY
    assert member_penta((1.001, 0, 0)).status is Status.OUTSIDE
    assert member_penta((0, 0.8, 0.15)).status is Status.INSIDE
    assert member_penta((0, 2.5, 1.2)).status is Status.OUTSIDE


def test_a_zero_inside_over_g2():
    for s, p in sample_members(G2, 200, 3):
        assert member_penta((0, s, p)).status is Status.INSIDE


def test_bound_against_unit_disc_description(rng):
    # over s = 0 the bound is 1 and beta = 0
    for p in crandn(rng, 10) * 0.3:
        assert penta_bound(0, p) == pytest.approx(1)


def test_closure_examples():
    assert member_penta_closure((0.2, 0.1, 0)).status is Status.INSIDE
    assert member_penta_closure((1, 0, 0)).status is Status.INSIDE
    assert member_penta((1, 0, 0)).status is not Status.INSIDE
    assert member_penta_closure((2, 0, 0)).status is Status.OUTSIDE
    assert member_penta_closure((0, 2, 1)).status is Status.INSIDE
    assert member_penta_closure((0.1, 0, 1)).status is Status.INSIDE


def test_minkowski_examples(rng):
    assert penta_minkowski((0, 0, 0)) == 0
    assert penta_minkowski((1, 0, 0), 1, 1e-8) == pytest.approx(1, abs=1e-7)
    with pytest.raises(InvalidArgumentError):
        penta_minkowski((1, 0, 0), 0)
    for pt in members(5, 2):
        for k in (1, 2):
            lam = 0.3 + 0.6 * rng.random()
            h = penta_minkowski(pt, k, 1e-7)
            assert penta_minkowski(penta_act(pt, k, lam), k, 1e-7) == pytest.approx(lam * h, abs=2e-7)


def test_boundary_consistency(rng):
    for pt in members(10, 4):
        lo, hi, exact = penta_minkowski_interval(pt, 1, 1e-10)
        assert exact
        edge = penta_act(pt, 1, 1 / hi)
        assert penta_minkowski(edge, 1, 1e-9) == pytest.approx(1, abs=1e-8)
        assert member_penta_closure(edge).status is Status.INSIDE
        assert member_penta(penta_act(pt, 1, 1 / lo)).status is not Status.INSIDE


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_balanced_action(k, rng):
    for pt in members(40, k):
        assert member_penta(pt).status is Status.INSIDE
        for _ in range(5):
            lam = np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            assert member_penta(penta_act(pt, k, lam)).status is Status.INSIDE


def test_fiber_balanced(rng):
    for pt in members(40, 9):
        lam = np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        assert member_penta(PentaPoint(lam * pt.a, pt.s, pt.p)).status is Status.INSIDE


def test_retract_pair():
    pt = penta_theta(0.8, 0.15, verify=True)
    assert pt == PentaPoint(0, 0.8, 0.15)
    assert member_penta(pt).status is Status.INSIDE
    assert penta_iota(pt) == (0.8, 0.15)
    assert penta_iota((0.3, 0.1, 0.2)) == (0.1, 0.2)
    for s, p in sample_members(G2, 50, 5):
        assert penta_iota(penta_theta(s, p)) == (s, p)
    with pytest.raises(InvalidArgumentError):
        penta_theta(3, 0, verify=True)
    with pytest.raises(InvalidArgumentError):
        penta_iota((5, 0, 0), verify=True)
    with pytest.raises(InvalidArgumentError):
        PentaPoint(math.nan, 0, 0)


def test_batch_matches_pointwise(rng):
    pts = np.array([pt.as_array() for pt in members(60, 4)])
    pts = np.concatenate([pts, pts * rng.uniform(0.9, 1.3, (60, 1)), [[0, 0, 0], [2, 0, 0], [0, 3, 0]]])
    for row, res in zip(pts, member_penta_batch(pts)):
        ref = member_penta(row)
        assert res.status is ref.status
        assert res.margin == pytest.approx(ref.margin, abs=1e-12)
