import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mudom.errors import InvalidArgumentError, InvalidSpecError, SizeError
from mudom.multiindex import (
    MultiIndexTable,
    build_table,
    compare,
    quasibalanced_act,
    split_table,
)

blocks_st = st.lists(st.integers(1, 3), min_size=1, max_size=4)


def brute_sorted(blocks):
    """Independent oracle: enumerate the box and sort by the reversed tuple."""
    box = itertools.product(*[range(r + 1) for r in blocks])
    return sorted((a for a in box if any(a)), key=lambda a: a[::-1])


def test_example_2_1():
    t = build_table([2, 1])
    assert t.N == 5
    assert t.alphas == ((1, 0), (2, 0), (0, 1), (1, 1), (2, 1))
    assert t.degrees == (1, 2, 1, 2, 3)


def test_single_block_and_tetrablock():
    assert build_table([4]).alphas == ((1,), (2,), (3,), (4,))
    assert build_table([4]).degrees == (1, 2, 3, 4)
    t = build_table([1, 1])
    assert t.alphas == ((1, 0), (0, 1), (1, 1))
    assert t.degrees == (1, 1, 2)


@pytest.mark.parametrize("bad", [[], [0], [2, -1], [1.5]])
def test_invalid_blocks(bad):
    with pytest.raises(InvalidSpecError):
        build_table(bad)


def test_size_caps():
    with pytest.raises(SizeError):
        build_table([1] * 9)
    with pytest.raises(SizeError):
        build_table([9, 8])


@given(blocks_st)
def test_table_matches_sorted_enumeration(blocks):
    t = build_table(blocks)
    assert list(t.alphas) == brute_sorted(blocks)
    assert t.N == math.prod(r + 1 for r in blocks) - 1
    assert all(compare(a, b) == -1 for a, b in zip(t.alphas, t.alphas[1:]))
    assert t.degrees == tuple(sum(a) for a in t.alphas)
    assert all(1 <= d <= t.n for d in t.degrees)
    assert t.n <= t.N <= 2**t.n - 1
    assert (t.N == t.n) == (t.s == 1)
    assert (t.N == 2**t.n - 1) == (t.s == t.n)
    for j, a in enumerate(t.alphas):
        assert t.index_of(a) == j


def test_compare_examples():
    assert compare((1, 0), (2, 0)) == -1
    assert compare((2, 0), (0, 1)) == -1
    assert compare((1, 1), (1, 1)) == 0
    assert compare((0, 1), (2, 0)) == 1
    with pytest.raises(InvalidArgumentError):
        compare((1,), (1, 0))


@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=3, max_size=3))
def test_compare_is_total_order(ts):
    a, b, c = ts
    assert compare(a, b) == -compare(b, a)
    if compare(a, b) <= 0 and compare(b, c) <= 0:
        assert compare(a, c) <= 0


def test_act_examples():
    np.testing.assert_array_equal(quasibalanced_act((1, 2), 1, [3 + 1j, 5]), [3 + 1j, 5])
    np.testing.assert_array_equal(quasibalanced_act((1, 2), 0, [3 + 1j, 5]), [0, 0])
    np.testing.assert_allclose(quasibalanced_act((1, 2), 0.5, [1, 1]), [0.5, 0.25])
    with pytest.raises(InvalidArgumentError):
        quasibalanced_act((1, 2), 0.5, [1, 1, 1])


@given(
    st.lists(st.integers(1, 5), min_size=1, max_size=6),
    st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False),
)
def test_act_group_law(w, lam, mu):
    x = np.arange(1, len(w) + 1) * (1 + 0.5j)
    lhs = quasibalanced_act(w, lam * mu, x)
    rhs = quasibalanced_act(w, lam, quasibalanced_act(w, mu, x))
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize(
    "blocks,sp,expect",
    [([2, 1], 1, (2, 3, 1, (1, 1, 1))), ([1, 1], 1, (1, 2, 1, (1, 1))), ([1, 1, 1], 2, (3, 4, 1, (1, 1, 1, 1)))],
)
def test_split_examples(blocks, sp, expect):
    s = split_table(build_table(blocks), sp)
    assert (s.N_prime, s.N_doubleprime, s.M, s.fiber_weights) == expect


@given(blocks_st.filter(lambda b: len(b) >= 2), st.data())
def test_split_invariants(blocks, data):
    t = build_table(blocks)
    sp = data.draw(st.integers(1, t.s - 1))
    s = split_table(t, sp)
    assert s.N_doubleprime == (s.N_prime + 1) * s.M
    assert list(s.prefix_indices()) + list(s.fiber_indices()) == list(range(t.N))
    for j in s.prefix_indices():
        assert not any(t.alphas[j][sp:])
        assert t.alphas[j][:sp] == s.prefix.alphas[j]
    for k in range(1, s.M + 1):
        run = s.fiber_weights[(k - 1) * (s.N_prime + 1) : k * (s.N_prime + 1)]
        head = t.alphas[k * (s.N_prime + 1) - 1]
        assert set(run) == {sum(head)} and sum(s.betas[k - 1]) == sum(head)
        for j in range(s.N_prime + 1):
            a = t.alphas[s.fiber_position(k, j)]
            assert a[sp:] == s.betas[k - 1]
            assert a[:sp] == ((0,) * sp if j == 0 else s.prefix.alphas[j - 1])


def test_split_range():
    with pytest.raises(InvalidArgumentError):
        split_table(build_table([1, 1]), 2)
    with pytest.raises(InvalidArgumentError):
        split_table(build_table([2]), 1)


def test_json_round_trip():
    t = build_table([2, 1])
    obj = t.to_json()
    assert obj["N"] == 5 and obj["degrees"] == [1, 2, 1, 2, 3]
    assert MultiIndexTable.from_json(obj) == t
    with pytest.raises(InvalidSpecError):
        MultiIndexTable.from_json({"blocks": [2, 1], "alphas": [[1, 0]]})
