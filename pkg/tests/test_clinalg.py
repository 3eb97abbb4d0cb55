import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import crandn
from mudom.clinalg import (
    char_poly,
    det,
    det_expansion,
    minor_families,
    operator_norm,
    pi_map,
    spectral_radius,
)
from mudom.errors import InvalidArgumentError
from mudom.multiindex import build_table, quasibalanced_act

TABLES = [[2], [3], [1, 1], [2, 1], [1, 1, 1], [3, 1], [2, 2]]


def test_det_examples():
    assert det(np.eye(3)) == pytest.approx(1)
    assert det(np.diag([2, 3j])) == pytest.approx(6j)
    assert det([[1, 2], [3, 4]]) == pytest.approx(-2)


def test_families_examples():
    fam = minor_families(build_table([2]))
    assert [f.index_sets for f in fam] == [((0,), (1,)), ((0, 1),)]
    fam = minor_families(build_table([1, 1]))
    assert [f.index_sets for f in fam] == [((0,),), ((1,),), ((0, 1),)]
    fam = {f.alpha: f.index_sets for f in minor_families(build_table([2, 1]))}
    assert fam[(1, 1)] == ((0, 2), (1, 2))


@pytest.mark.parametrize("blocks", TABLES)
def test_families_partition(blocks):
    t = build_table(blocks)
    sets = [I for f in minor_families(t) for I in f.index_sets]
    assert len(sets) == len(set(sets)) == 2**t.n - 1
    assert set(sets) == {I for k in range(1, t.n + 1) for I in itertools.combinations(range(t.n), k)}
    for f in minor_families(t):
        assert len(f.index_sets) == math.prod(math.comb(r, a) for r, a in zip(t.blocks, f.alpha))
        assert all(list(I) == sorted(I) for I in f.index_sets)


def test_pi_examples(rng):
    A = crandn(rng, (2, 2))
    np.testing.assert_allclose(pi_map(build_table([2]), A), [np.trace(A), np.linalg.det(A)])
    np.testing.assert_allclose(pi_map(build_table([1, 1]), A), [A[0, 0], A[1, 1], np.linalg.det(A)])
    np.testing.assert_allclose(pi_map(build_table([2]), np.eye(2)), [2, 1])
    with pytest.raises(InvalidArgumentError):
        pi_map(build_table([2]), np.eye(3))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_det_expansion_identity(n, rng):
    for _ in range(200):
        A, z = crandn(rng, (n, n)), crandn(rng, n)
        d = np.linalg.det(np.eye(n) - A @ np.diag(z))
        assert abs(det_expansion(A, z) - d) <= 1e-11 * (1 + abs(d))
    assert det_expansion(np.zeros((3, 3)), crandn(rng, 3)) == 1
    assert det_expansion([[0.7]], [2]) == pytest.approx(1 - 1.4)


def test_det_expansion_is_R_of_pi(rng):
    from mudom.cpoly import eval_R

    for blocks in TABLES:
        t = build_table(blocks)
        A, z = crandn(rng, (t.n, t.n)), crandn(rng, t.s)
        full = np.repeat(z, t.blocks)
        assert abs(eval_R(t, pi_map(t, A), z) - det_expansion(A, full)) < 1e-10 * (1 + abs(det_expansion(A, full)))


def test_pi_degree_consistency(rng):
    for blocks in TABLES:
        t = build_table(blocks)
        A, lam = crandn(rng, (t.n, t.n)), complex(crandn(rng, 1)[0])
        lhs, rhs = pi_map(t, lam * A), quasibalanced_act(t.degrees, lam, pi_map(t, A))
        assert np.allclose(lhs, rhs, rtol=1e-11, atol=1e-11)


def test_pi_batched(rng):
    t = build_table([2, 1])
    A = crandn(rng, (4, 3, 3))
    np.testing.assert_allclose(pi_map(t, A)[2], pi_map(t, A[2]))


def test_char_poly(rng):
    A = crandn(rng, (5, 5))
    np.testing.assert_allclose(char_poly(A)[::-1], np.poly(A), atol=1e-10)


def test_spectral_radius_examples():
    assert spectral_radius(np.diag([0.5, 0.2j])) == pytest.approx(0.5)
    assert spectral_radius([[0, 1], [0, 0]]) == pytest.approx(0, abs=1e-7)
    assert spectral_radius([[0, 2], [0.5, 0]]) == pytest.approx(1)


def test_spectral_radius_vs_eig(rng):
    A = crandn(rng, (300, 6, 6))
    want = np.abs(np.linalg.eigvals(A)).max(axis=1)
    assert np.abs(spectral_radius(A) - want).max() < 1e-8


def test_operator_norm_examples(rng):
    assert operator_norm(np.eye(4)) == pytest.approx(1)
    assert operator_norm(np.diag([3, 4j])) == pytest.approx(4)
    u, v = crandn(rng, 4), crandn(rng, 4)
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    assert operator_norm(np.outer(u, v.conj())) == pytest.approx(1, rel=1e-10)
    assert operator_norm(np.zeros((3, 3))) == 0


@given(st.integers(1, 8), st.integers(0, 2**31))
def test_norm_and_rho(n, seed):
    A = crandn(np.random.default_rng(seed), (n, n))
    nrm = operator_norm(A)
    assert nrm == pytest.approx(np.linalg.norm(A, 2), rel=1e-10)
    assert spectral_radius(A) <= nrm * (1 + 1e-9)


def test_matrix_validation():
    with pytest.raises(InvalidArgumentError):
        det(np.zeros((2, 3)))
    with pytest.raises(InvalidArgumentError):
        det([[np.nan]])
