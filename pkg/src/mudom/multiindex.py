"""Exponent tables for block structures.

For block sizes ``(r_1, ..., r_s)`` the exponent set consists of every
``alpha`` in ``{0..r_1} x ... x {0..r_s}`` except the zero tuple, ordered so
that the *last* coordinate in which two tuples differ decides which one is
smaller.  Listing the tuples in mixed radix with the first coordinate running
fastest produces exactly this order, so no sort is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, InvalidSpecError, SizeError

__all__ = [
    "MAX_BLOCKS",
    "MAX_DIM",
    "MultiIndexTable",
    "SplitTable",
    "build_table",
    "compare",
    "quasibalanced_act",
    "split_table",
]

#: Hard caps on the number of blocks and on ``n = sum(blocks)``.
MAX_BLOCKS = 8
MAX_DIM = 16


@dataclass(frozen=True)
class MultiIndexTable:
    """Ordered exponent set ``A(r_1, ..., r_s)``.

    Attributes
    ----------
    blocks : tuple of int
        Block sizes ``(r_1, ..., r_s)``.
    alphas : tuple of tuple of int
        The ``N`` exponent tuples in increasing order.
    """

    blocks: tuple[int, ...]
    alphas: tuple[tuple[int, ...], ...]

    @property
    def s(self) -> int:
        return len(self.blocks)

    @property
    def n(self) -> int:
        return sum(self.blocks)

    @property
    def N(self) -> int:
        return len(self.alphas)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sum(a) for a in self.alphas)

    @cached_property
    def alpha_array(self) -> np.ndarray:
        """``(N, s)`` integer array of exponents (read-only)."""
        arr = np.array(self.alphas, dtype=np.int64).reshape(self.N, self.s)
        arr.setflags(write=False)
        return arr

    @cached_property
    def signs(self) -> np.ndarray:
        """``(-1)**|alpha^j|`` as a float array."""
        arr = np.where(np.asarray(self.degrees) % 2 == 0, 1.0, -1.0)
        arr.setflags(write=False)
        return arr

    def index_of(self, alpha: Sequence[int]) -> int:
        """0-based position of ``alpha`` in the table."""
        if len(alpha) != self.s:
            raise InvalidArgumentError("exponent length does not match block count")
        idx, radix = 0, 1
        for a, r in zip(alpha, self.blocks):
            if not 0 <= a <= r:
                raise InvalidArgumentError(f"exponent {tuple(alpha)} outside block bounds")
            idx += a * radix
            radix *= r + 1
        if idx == 0:
            raise InvalidArgumentError("the zero exponent is not part of the table")
        return idx - 1

    def to_json(self) -> dict:
        return {
            "blocks": list(self.blocks),
            "N": self.N,
            "alphas": [list(a) for a in self.alphas],
            "degrees": list(self.degrees),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MultiIndexTable":
        table = build_table(obj["blocks"])
        if "alphas" in obj and [tuple(a) for a in obj["alphas"]] != list(table.alphas):
            raise InvalidSpecError("alphas do not match the table built from blocks")
        return table


def _check_blocks(blocks: Sequence[int]) -> tuple[int, ...]:
    try:
        out = tuple(int(r) for r in blocks)
    except (TypeError, ValueError) as exc:
        raise InvalidSpecError(f"blocks must be integers, got {blocks!r}") from exc
    if not out:
        raise InvalidSpecError("block list is empty")
    if any(r != b for r, b in zip(out, blocks)) or any(r < 1 for r in out):
        raise InvalidSpecError(f"block sizes must be positive integers, got {list(blocks)}")
    if len(out) > MAX_BLOCKS:
        raise SizeError(f"at most {MAX_BLOCKS} blocks supported, got {len(out)}")
    if sum(out) > MAX_DIM:
        raise SizeError(f"n = {sum(out)} exceeds the cap {MAX_DIM}")
    return out


def build_table(blocks: Sequence[int]) -> MultiIndexTable:
    """Build the ordered exponent table for ``blocks``.

    >>> build_table([2, 1]).alphas
    ((1, 0), (2, 0), (0, 1), (1, 1), (2, 1))
    """
    blocks = _check_blocks(blocks)
    total = math.prod(r + 1 for r in blocks)
    alphas = []
    for k in range(1, total):
        digits = []
        for r in blocks:
            k, d = divmod(k, r + 1)
            digits.append(d)
        alphas.append(tuple(digits))
    return MultiIndexTable(blocks=blocks, alphas=tuple(alphas))


def compare(alpha: Sequence[int], beta: Sequence[int]) -> int:
    """Three-way comparison: -1 if ``alpha < beta``, 0 if equal, 1 otherwise.

    The decisive coordinate is the largest index where the tuples differ.
    """
    if len(alpha) != len(beta):
        raise InvalidArgumentError("exponent tuples have different lengths")
    for a, b in zip(reversed(alpha), reversed(beta)):
        if a != b:
            return -1 if a < b else 1
    return 0


def quasibalanced_act(weights: Sequence[int], lam: complex, x) -> np.ndarray:
    """Weighted scalar action ``(lam**m_1 x_1, ..., lam**m_N x_N)``."""
    w = np.asarray(weights, dtype=np.int64)
    x = np.asarray(x, dtype=complex)
    if w.shape != x.shape[-1:]:
        raise InvalidArgumentError(f"{w.size} weights for a point of length {x.shape[-1]}")
    return x * np.power(complex(lam), w)


@dataclass(frozen=True)
class SplitTable:
    """Bookkeeping for splitting the blocks after position ``s_prime``.

    The first ``N_prime`` table entries only involve the leading blocks; the
    remaining ``N_doubleprime`` entries form ``M`` runs of length
    ``N_prime + 1``, run ``k`` sharing the tail exponent ``betas[k]``.
    """

    parent: MultiIndexTable
    s_prime: int
    prefix: MultiIndexTable
    N_prime: int
    N_doubleprime: int
    M: int
    fiber_weights: tuple[int, ...]
    betas: tuple[tuple[int, ...], ...]

    def prefix_indices(self) -> range:
        return range(self.N_prime)

    def fiber_indices(self) -> range:
        return range(self.N_prime, self.parent.N)

    def fiber_position(self, k: int, j: int) -> int:
        """0-based table index of the term ``(alpha^j)' * beta^k``.

        ``k`` runs over ``1..M`` and ``j`` over ``0..N_prime`` (``j = 0`` is
        the zero prefix exponent).
        """
        return k * (self.N_prime + 1) + j - 1


def split_table(table: MultiIndexTable, s_prime: int) -> SplitTable:
    """Split ``table`` into the leading ``s_prime`` blocks and the rest."""
    if not 1 <= s_prime < table.s:
        raise InvalidArgumentError(f"s_prime must satisfy 1 <= s_prime < {table.s}, got {s_prime}")
    prefix = build_table(table.blocks[:s_prime])
    n1 = prefix.N
    M = math.prod(r + 1 for r in table.blocks[s_prime:]) - 1
    n2 = table.N - n1
    betas = []
    weights = []
    for k in range(1, M + 1):
        head = table.alphas[k * (n1 + 1) - 1]
        beta = head[s_prime:]
        betas.append(beta)
        weights.extend([sum(head)] * (n1 + 1))
    return SplitTable(
        parent=table,
        s_prime=s_prime,
        prefix=prefix,
        N_prime=n1,
        N_doubleprime=n2,
        M=M,
        fiber_weights=tuple(weights),
        betas=tuple(betas),
    )
