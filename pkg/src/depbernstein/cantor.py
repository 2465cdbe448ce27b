"""Recursive Cantor-like blocking of {1..A} and the full decomposition of {1..n}.

The construction keeps two side blocks and drops a middle gap at every
level; after ell levels the kept set K_A is a union of 2^ell runs of
consecutive integers, each of length n_ell, and satisfies
A >= |K_A| >= A/2.  All index sets are 1-based to match the usual
"first n observations" bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


class CantorError(ValueError):
    """Invalid input to a blocking operation."""


@dataclass(frozen=True)
class CantorParams:
    A: int
    delta: float
    ell: int
    n_seq: tuple  # n_0 .. n_ell
    d_seq: tuple  # d_0 .. d_{ell-1}


@dataclass(frozen=True)
class CantorPartition:
    params: CantorParams
    K: tuple                 # sorted kept indices, subset of {1..A}
    leaves: tuple            # the 2^ell runs of consecutive integers
    remainders: tuple        # per level j = 0..ell-1, tuple of 2^j gap runs

    @property
    def card(self) -> int:
        return len(self.K)


@dataclass(frozen=True)
class FullDecomposition:
    n: int
    levels: tuple            # C_0 .. C_{L-1}, each a sorted tuple of original indices
    remainder: tuple         # final surviving indices, at most 2 of them
    cards: tuple             # A_0 .. A_L

    @property
    def L(self) -> int:
        return len(self.levels)


def cantor_params(A: int) -> CantorParams:
    """Level count ell, block sizes n_j and gap sizes d_j for {1..A}.

    delta = log 2 / (2 log A) and ell is the largest k >= 1 with
    A*delta*(1-delta)^(k-1)/2^k >= 2.  When no such k exists (small A,
    e.g. A <= 43) we take ell = 0 and the kept set is all of {1..A}.
    """
    if not isinstance(A, (int,)) or A < 2:
        raise CantorError(f"A must be an integer >= 2, got {A!r}")
    delta = math.log(2.0) / (2.0 * math.log(A))
    ell = 0
    k = 1
    while A * delta * (1.0 - delta) ** (k - 1) / 2.0 ** k >= 2.0:
        ell = k
        k += 1
    n_seq = [A]
    d_seq = []
    for j in range(1, ell + 1):
        nj = math.ceil(A * (1.0 - delta) ** j / 2.0 ** j)
        d_seq.append(n_seq[-1] - 2 * nj)
        n_seq.append(nj)
    return CantorParams(A=A, delta=delta, ell=ell, n_seq=tuple(n_seq), d_seq=tuple(d_seq))


def cantor_set(A: int) -> CantorPartition:
    """Recursive trisection of {1..A}: each block of n_{j-1} consecutive
    integers splits into a left block of n_j, a gap of d_{j-1} and a right
    block of n_j."""
    p = cantor_params(A)
    # blocks are (start, length) runs; start is the first 1-based index
    blocks = [(1, p.n_seq[0])]
    remainders = []
    for j in range(1, p.ell + 1):
        nj = p.n_seq[j]
        gap = p.d_seq[j - 1]
        next_blocks = []
        level_gaps = []
        for start, _ in blocks:
            next_blocks.append((start, nj))
            level_gaps.append((start + nj, gap))
            next_blocks.append((start + nj + gap, nj))
        blocks = next_blocks
        remainders.append(tuple(_run(s, m) for s, m in level_gaps))
    leaves = tuple(_run(s, m) for s, m in blocks)
    kept = tuple(i for leaf in leaves for i in leaf)
    return CantorPartition(params=p, K=kept, leaves=leaves, remainders=tuple(remainders))


def level_blocks(partition: CantorPartition, k: int):
    """The 2^k disjoint blocks K_{k,j} covering K: block j is the union of
    leaves (j-1)*2^(ell-k)+1 .. j*2^(ell-k)."""
    ell = partition.params.ell
    if not 0 <= k <= ell:
        raise CantorError(f"level k must be in [0, {ell}], got {k}")
    width = 2 ** (ell - k)
    leaves = partition.leaves
    return [
        tuple(i for leaf in leaves[j * width:(j + 1) * width] for i in leaf)
        for j in range(2 ** k)
    ]


def full_decomposition(n: int) -> FullDecomposition:
    """Iterate the construction on the surviving positions until at most 2
    remain.  Survivors are relabeled 1..A_i order-preservingly at each step
    and the extracted set is mapped back to original coordinates."""
    if not isinstance(n, int) or n < 2:
        raise CantorError(f"n must be an integer >= 2, got {n!r}")
    surviving = list(range(1, n + 1))
    levels = []
    cards = [n]
    while len(surviving) > 2:
        part = cantor_set(len(surviving))
        kept_rel = set(part.K)
        extracted = tuple(surviving[r - 1] for r in sorted(kept_rel))
        surviving = [surviving[r - 1] for r in range(1, len(surviving) + 1)
                     if r not in kept_rel]
        levels.append(extracted)
        cards.append(len(surviving))
    return FullDecomposition(
        n=n, levels=tuple(levels), remainder=tuple(surviving), cards=tuple(cards)
    )


@lru_cache(maxsize=None)
def decomposition_depth(n: int) -> int:
    """Number of extraction levels L for {1..n} (remainder excluded)."""
    return full_decomposition(n).L


def sub_block_partition(K, p: int):
    """Split an index set of size q into alternating intervals of length p.

    With m = floor(q/(2p)): 2m intervals of length p in order, plus a
    remainder interval of length q - 2pm (< 2p) appended to the odd family.
    Returns (odd_blocks, even_blocks) with m+1 and m intervals respectively.
    """
    K = tuple(K)
    q = len(K)
    if p < 1:
        raise CantorError(f"p must be >= 1, got {p}")
    if 2 * p > q:
        raise CantorError(f"need 2p <= |K|, got p={p}, |K|={q}")
    m = q // (2 * p)
    intervals = [K[i * p:(i + 1) * p] for i in range(2 * m)]
    intervals.append(K[2 * m * p:])  # remainder, possibly empty
    odd = [intervals[i] for i in range(0, 2 * m, 2)] + [intervals[-1]]
    even = [intervals[i] for i in range(1, 2 * m, 2)]
    return odd, even


def _run(start: int, length: int) -> tuple:
    return tuple(range(start, start + length))
