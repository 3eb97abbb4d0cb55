import numpy as np
import pytest

from conftest import crandn
from mudom.clinalg import operator_norm, spectral_radius
from mudom.errors import InvalidArgumentError
from mudom.multiindex import build_table
from mudom.ssv import (
    OmegaStatus,
    in_omega,
    mu,
    mu_bisection,
    mu_lower_torus,
    mu_lower_torus_batch,
    psh_circle_test,
)


def test_lower_examples(rng):
    t = build_table([1, 1])
    assert mu_lower_torus(t, np.zeros((2, 2))) == 0
    A = crandn(rng, (3, 3))
    assert mu_lower_torus(build_table([3]), A) == pytest.approx(spectral_radius(A))
    a = crandn(rng, 3)
    assert mu_lower_torus(build_table([1, 1, 1]), np.diag(a)) == pytest.approx(np.abs(a).max())
    with pytest.raises(InvalidArgumentError):
        mu_lower_torus(t, np.eye(2), grid=2)


def test_lower_two_by_two_closed_form(rng):
    # For blocks (1, 1): rho(diag(1, e^{it}) A) is maximal when the phases of
    # a11 and e^{it} a22 align with sqrt of the off-diagonal product; dense scan oracle.
    t = build_table([1, 1])
    for _ in range(10):
        A = crandn(rng, (2, 2))
        ths = np.linspace(0, 2 * np.pi, 20001)
        X = np.exp(1j * ths)
        tr = A[0, 0] + X * A[1, 1]
        dt = X * np.linalg.det(A)
        disc = np.sqrt(tr**2 - 4 * dt)
        dense = np.maximum(np.abs((tr + disc) / 2), np.abs((tr - disc) / 2)).max()
        assert mu_lower_torus(t, A) == pytest.approx(dense, rel=1e-6)


@pytest.mark.parametrize("blocks", [[2], [1, 1], [2, 1], [1, 1, 1]])
def test_sandwich_and_homogeneity(blocks, rng):
    t = build_table(blocks)
    A = crandn(rng, (40, t.n, t.n))
    lo = mu_lower_torus_batch(t, A)
    assert np.all(spectral_radius(A) <= lo + 1e-8)
    assert np.all(lo <= operator_norm(A) + 1e-9)
    lam = crandn(rng, 40)
    scaled = mu_lower_torus_batch(t, lam[:, None, None] * A)
    np.testing.assert_allclose(scaled, np.abs(lam) * lo, rtol=1e-9, atol=1e-12)


def test_bisection_examples(rng):
    t = build_table([1, 1])
    iv = mu_bisection(t, np.zeros((2, 2)))
    assert (iv.lo, iv.hi) == (0, 0)
    A = crandn(rng, (2, 2))
    A /= spectral_radius(A)
    iv = mu_bisection(build_table([2]), A, tol=1e-3)
    assert iv.contains(1.0)
    with pytest.raises(InvalidArgumentError):
        mu_bisection(t, A, tol=0)


@pytest.mark.parametrize("blocks", [[2], [1, 1], [2, 1]])
def test_bisection_contains_lower(blocks, rng):
    t = build_table(blocks)
    for _ in range(4):
        A = crandn(rng, (t.n, t.n))
        iv = mu_bisection(t, A, tol=1e-2)
        lo = mu_lower_torus(t, A)
        assert iv.contains(lo, 1e-9)
        assert iv.hi <= operator_norm(A) * (1 + 1e-9) + 1e-12


def test_mu_result(rng):
    t = build_table([1, 1])
    A = crandn(rng, (2, 2))
    r = mu(t, A, tol=1e-2)
    assert r.lower <= r.upper + 1e-9
    assert r.lower <= r.certified.hi + 1e-9 and r.certified.lo <= r.upper + 1e-9
    assert set(r.to_json()) == {"lower", "upper", "certified", "grid"}


def test_in_omega_examples(rng):
    t = build_table([1, 1])
    assert in_omega(t, 0.5 * np.eye(2)) is OmegaStatus.YES
    assert in_omega(t, 1.2 * np.eye(2)) is OmegaStatus.NO
    assert in_omega(t, np.eye(2)) is OmegaStatus.UNDETERMINED
    A = crandn(rng, (2, 2))
    A *= 0.95 / operator_norm(A)
    assert in_omega(t, A) is OmegaStatus.YES


def test_in_omega_balanced(rng):
    t = build_table([1, 1])
    hits = 0
    for _ in range(10):
        A = crandn(rng, (2, 2))
        A /= mu_lower_torus(t, A) * 1.05
        if in_omega(t, A) is OmegaStatus.YES:
            hits += 1
            lam = 0.9 * np.exp(2j * np.pi * rng.random())
            assert in_omega(t, lam * A) is OmegaStatus.YES
    assert hits > 0


def test_psh_examples(rng):
    t = build_table([2])
    A = crandn(rng, (2, 2))
    r = psh_circle_test(t, A, np.zeros((2, 2)))
    assert r.passed and abs(r.deficit) < 1e-12
    for blocks in ([2], [1, 1]):
        t = build_table(blocks)
        A, B = crandn(rng, (2, 2)), crandn(rng, (2, 2))
        assert psh_circle_test(t, A, B).passed
    skipped = psh_circle_test(build_table([2]), np.zeros((2, 2)), np.zeros((2, 2)))
    assert skipped.skipped
    with pytest.raises(InvalidArgumentError):
        psh_circle_test(t, A, B, samples=8)
