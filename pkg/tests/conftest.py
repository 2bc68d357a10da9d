"""Shared fixtures and independent oracles for the test suite.

The oracles here (Fraction-based elimination, brute-force mod-p rank,
definitional shadow membership) deliberately avoid the library's own
linear algebra so they can catch it lying.
"""

from __future__ import annotations

import math
from fractions import Fraction
from pathlib import Path

import pytest

from homoforge.complexes import Complex, load_complex

DATA = Path(__file__).parent / "data"


def validate_closed_surface(Y: Complex, expected_euler: int) -> None:
    """Fixture sanity: every edge in exactly two faces, Euler characteristic right."""
    assert Y.dim == 2
    assert Y.edge_cover_count is not None
    assert all(c == 2 for c in Y.edge_cover_count), "an edge is not in exactly 2 faces"
    euler = Y.n - math.comb(Y.n, 2) + Y.num_faces
    assert euler == expected_euler


@pytest.fixture(scope="session")
def rp2() -> Complex:
    Y = load_complex(str(DATA / "rp2_n6.txt"))
    validate_closed_surface(Y, expected_euler=1)
    return Y


@pytest.fixture(scope="session")
def torus() -> Complex:
    Y = load_complex(str(DATA / "torus_n7.txt"))
    validate_closed_surface(Y, expected_euler=0)
    return Y


def rank_over_Q(dense: list[list[int]]) -> int:
    """Row-reduction rank over the rationals, exact via Fraction."""
    A = [[Fraction(x) for x in row] for row in dense]
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, nrows) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = 1 / A[rank][c]
        A[rank] = [x * inv for x in A[rank]]
        for r in range(nrows):
            if r != rank and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


def rank_mod_p_oracle(dense: list[list[int]], p: int) -> int:
    """Plain-python Gaussian elimination rank over F_p."""
    A = [[x % p for x in row] for row in dense]
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, nrows) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [x * inv % p for x in A[rank]]
        for r in range(rank + 1, nrows):
            if A[r][c]:
                f = A[r][c]
                A[r] = [(x - f * y) % p for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


def random_complex(n: int, num_faces: int, rng) -> Complex:
    """A complex with up to num_faces distinct random triangles."""
    from itertools import combinations

    all_faces = list(combinations(range(n), 3))
    picked = rng.sample(all_faces, min(num_faces, len(all_faces)))
    return Complex(n, 2, picked)
