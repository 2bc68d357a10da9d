"""Exact linear algebra for boundary operators.

Integer matrices are kept exact throughout: Smith normal form runs on
machine words while a proven bound shows no overflow is possible and
transparently restarts with arbitrary-precision integers otherwise.
Rank computations over F_p use dense word-sized modular elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .complexes import Complex, rank_face

# entries are safe for an int64 row operation while |entry| * (1 + |quotient|)
# stays below this bound
_INT64_GUARD = 2**62


class MatrixFormatError(ValueError):
    """Malformed matrix file; carries the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


# ---------------------------------------------------------------------------
# sparse exact matrices


class SparseIntMatrix:
    """Sparse integer matrix with arbitrary-precision entries.

    Only nonzero entries are stored, keyed by (row, col).
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], int] = {}
        if entries:
            for (r, c), v in entries.items():
                self.set(r, c, v)

    def set(self, r: int, c: int, v: int) -> None:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise ValueError(f"entry ({r},{c}) outside {self.rows}x{self.cols}")
        if v == 0:
            self.entries.pop((r, c), None)
        else:
            self.entries[(r, c)] = int(v)

    def get(self, r: int, c: int) -> int:
        return self.entries.get((r, c), 0)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def density(self) -> float:
        total = self.rows * self.cols
        return self.nnz / total if total else 0.0

    def copy(self) -> "SparseIntMatrix":
        m = SparseIntMatrix(self.rows, self.cols)
        m.entries = dict(self.entries)
        return m

    def to_dense(self) -> list[list[int]]:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            dense[r][c] = v
        return dense

    @classmethod
    def from_dense(cls, rows2d: Sequence[Sequence[int]]) -> "SparseIntMatrix":
        nrows = len(rows2d)
        ncols = len(rows2d[0]) if nrows else 0
        m = cls(nrows, ncols)
        for r, row in enumerate(rows2d):
            if len(row) != ncols:
                raise ValueError("ragged rows in dense input")
            for c, v in enumerate(row):
                if v:
                    m.entries[(r, c)] = int(v)
        return m

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (
            other.rows,
            other.cols,
            other.entries,
        )

    def __repr__(self) -> str:
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


def read_matrix_file(path: str) -> SparseIntMatrix:
    """Parse the 'rows cols' + 'row col value' triple format (0-based indices)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    header_seen = False
    m: SparseIntMatrix | None = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if not header_seen:
            if len(parts) != 2:
                raise MatrixFormatError(lineno, "expected header 'rows cols'")
            try:
                rows, cols = int(parts[0]), int(parts[1])
            except ValueError:
                raise MatrixFormatError(lineno, "non-integer header") from None
            if rows < 0 or cols < 0:
                raise MatrixFormatError(lineno, "negative dimension")
            m = SparseIntMatrix(rows, cols)
            header_seen = True
            continue
        if len(parts) != 3:
            raise MatrixFormatError(lineno, "expected 'row col value'")
        try:
            r, c, v = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise MatrixFormatError(lineno, "non-integer entry") from None
        assert m is not None
        if not (0 <= r < m.rows and 0 <= c < m.cols):
            raise MatrixFormatError(lineno, f"index ({r},{c}) outside {m.rows}x{m.cols}")
        if (r, c) in m.entries:
            raise MatrixFormatError(lineno, f"duplicate entry ({r},{c})")
        if v:
            m.entries[(r, c)] = v
    if m is None:
        raise MatrixFormatError(1, "missing header 'rows cols'")
    return m


def write_matrix_file(m: SparseIntMatrix, path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{m.rows} {m.cols}\n")
        for (r, c) in sorted(m.entries):
            fh.write(f"{r} {c} {m.entries[(r, c)]}\n")


# ---------------------------------------------------------------------------
# boundary operators


def boundary_entries(face: Sequence[int]) -> list[tuple[int, int]]:
    """(row_rank, sign) pairs of the boundary of one face.

    Dropping vertex i of [v0 < ... < vd] contributes sign (-1)^i at the
    colex rank of the remaining face.
    """
    out = []
    for i in range(len(face)):
        sub = face[:i] + face[i + 1 :]
        out.append((rank_face(sub), -1 if i % 2 else 1))
    return out


def boundary_matrix(Y: Complex) -> SparseIntMatrix:
    """Boundary operator from d-faces of Y to the full set of (d-1)-faces.

    Rows: all C(n, d) faces of dimension d-1 in colex order. Columns: the
    faces of Y in colex order. Entries are +-1.
    """
    if Y.dim < 1:
        raise ValueError("boundary requires dim >= 1")
    nrows = math.comb(Y.n, Y.dim)
    faces = Y.faces_sorted()
    m = SparseIntMatrix(nrows, len(faces))
    for col, f in enumerate(faces):
        for row, sign in boundary_entries(f):
            m.entries[(row, col)] = sign
    return m


def boundary_columns_dense(
    faces: Iterable[Sequence[int]], n: int, d: int
) -> np.ndarray:
    """Dense int64 matrix whose columns are the boundaries of the given d-faces."""
    face_list = list(faces)
    out = np.zeros((math.comb(n, d), len(face_list)), dtype=np.int64)
    for col, f in enumerate(face_list):
        for row, sign in boundary_entries(f):
            out[row, col] = sign
    return out


def boundary_vector_dense(face: Sequence[int], n: int) -> np.ndarray:
    """Boundary of a single face as a dense int64 column."""
    v = np.zeros(math.comb(n, len(face) - 1), dtype=np.int64)
    for row, sign in boundary_entries(tuple(face)):
        v[row] = sign
    return v


# ---------------------------------------------------------------------------
# primality (word-sized p)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond word size."""
    if p < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


def _check_prime(p: int) -> None:
    if p >= 2**31:
        raise ValueError(f"modulus {p} exceeds the supported word-sized range")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


# ---------------------------------------------------------------------------
# rank over F_p (batch elimination)


def rank_mod_p(M: SparseIntMatrix | np.ndarray, p: int) -> int:
    """Rank of M over F_p by dense Gaussian elimination."""
    _check_prime(p)
    if isinstance(M, SparseIntMatrix):
        A = np.zeros((M.rows, M.cols), dtype=np.int64)
        for (r, c), v in M.entries.items():
            A[r, c] = v % p
    else:
        A = np.asarray(M, dtype=np.int64).copy()
    A %= p
    rows, cols = A.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(A[rank:, c])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, c]), -1, p)
        A[rank] = A[rank] * inv % p
        below = A[rank + 1 :, c]
        hit = np.nonzero(below)[0]
        if hit.size:
            A[rank + 1 + hit] = (A[rank + 1 + hit] - np.outer(below[hit], A[rank])) % p
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# incremental echelon basis over F_p


class EchelonBasis:
    """Mutually reduced column basis over F_p with incremental insertion.

    Every stored column has a 1 in its own pivot row and 0 in every other
    pivot row, so reducing a vector is a single matrix-vector product.
    """

    __slots__ = ("p", "nrows", "_cols", "_pivot_rows")

    def __init__(self, p: int, nrows: int):
        _check_prime(p)
        if nrows < 0:
            raise ValueError("row dimension must be nonnegative")
        self.p = p
        self.nrows = nrows
        self._cols = np.zeros((nrows, 0), dtype=np.int64)
        self._pivot_rows: list[int] = []

    @property
    def rank(self) -> int:
        return len(self._pivot_rows)

    @property
    def pivots(self) -> dict[int, np.ndarray]:
        """Pivot row -> reduced basis column (copies)."""
        return {
            r: self._cols[:, i].copy() for i, r in enumerate(self._pivot_rows)
        }

    def _check_vector(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        if v.shape != (self.nrows,):
            raise ValueError(f"vector has shape {v.shape}, expected ({self.nrows},)")
        return v % self.p

    def reduce(self, v: np.ndarray) -> np.ndarray:
        """Residual of v against the basis; the basis is unchanged."""
        v = self._check_vector(v)
        if self._pivot_rows:
            coeff = v[self._pivot_rows]
            if coeff.any():
                v = (v - self._cols @ coeff) % self.p
        return v

    def reduce_columns(self, V: np.ndarray) -> np.ndarray:
        """Residuals of many columns at once (shape nrows x k)."""
        V = np.asarray(V, dtype=np.int64) % self.p
        if V.shape[0] != self.nrows:
            raise ValueError(f"columns have {V.shape[0]} rows, expected {self.nrows}")
        if not self._pivot_rows:
            return V
        coeff = V[self._pivot_rows, :]
        return (V - _matmul_mod(self._cols, coeff, self.p)) % self.p

    def contains(self, v: np.ndarray) -> bool:
        return not self.reduce(v).any()

    def insert(self, v: np.ndarray) -> bool:
        """Reduce v and adjoin the residual if nonzero; True iff independent."""
        res = self.reduce(v)
        nz = np.nonzero(res)[0]
        if nz.size == 0:
            return False
        pivot_row = int(nz[0])
        res = res * pow(int(res[pivot_row]), -1, self.p) % self.p
        if self._pivot_rows:
            factors = self._cols[pivot_row, :]
            if factors.any():
                self._cols = (self._cols - np.outer(res, factors)) % self.p
        self._cols = np.concatenate([self._cols, res[:, None]], axis=1)
        self._pivot_rows.append(pivot_row)
        return True


def _matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    # BLAS float64 product is exact while every dot product stays below 2^53
    if p * p * A.shape[1] < 2**53:
        return (A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64) % p
    return (A @ B) % p


def echelon_insert(B: EchelonBasis, v: np.ndarray) -> tuple[EchelonBasis, bool]:
    """Insert a column into the basis; returns (basis, was_independent)."""
    return B, B.insert(v)


def in_colspan_mod_p(B: EchelonBasis, v: np.ndarray) -> bool:
    """True iff v lies in the span of the inserted columns; B is unchanged."""
    return B.contains(v)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfResult:
    """Invariant factors d1 | d2 | ... | dr of an integer matrix."""

    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def torsion_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)


class _Int64Overflow(Exception):
    pass


def smith_normal_form(M: SparseIntMatrix) -> SnfResult:
    """Invariant factors of M over the integers; the input is not mutated.

    Pivots are chosen by minimal absolute value (ties: lowest column, then
    lowest row); rows/columns are cleared by division with remainder, and a
    pivot failing to divide the remaining entries is repaired by adding the
    offending row and re-reducing. Runs on int64 with a strict pre-op bound
    check and restarts with python integers if the bound could be violated.
    """
    if M.rows == 0 or M.cols == 0 or not M.entries:
        return SnfResult(())
    try:
        if any(abs(v) >= _INT64_GUARD for v in M.entries.values()):
            raise _Int64Overflow
        factors = _snf_int64(M)
    except _Int64Overflow:
        factors = _snf_exact(M.to_dense())
    factors = [abs(int(d)) for d in factors]
    for a, b in zip(factors, factors[1:]):
        assert b % a == 0, f"invariant factor chain broken: {a} does not divide {b}"
    return SnfResult(tuple(factors))


def _select_pivot(A: np.ndarray, k: int) -> tuple[int, int]:
    """Position of the min-abs nonzero entry of A[k:, k:], ties by (col, row)."""
    sub = np.abs(A[k:, k:])
    nzr, nzc = np.nonzero(sub)
    vals = sub[nzr, nzc]
    m = vals.min()
    at = np.flatnonzero(vals == m)
    # lexicographic (col, row) among minimal entries
    best = min(at, key=lambda t: (nzc[t], nzr[t]))
    return k + int(nzr[best]), k + int(nzc[best])


def _snf_int64(M: SparseIntMatrix) -> list[int]:
    A = np.zeros((M.rows, M.cols), dtype=np.int64)
    for (r, c), v in M.entries.items():
        A[r, c] = v
    factors: list[int] = []
    for k in range(min(M.rows, M.cols)):
        if not A[k:, k:].any():
            break
        pi, pj = _select_pivot(A, k)
        if pi != k:
            A[[k, pi]] = A[[pi, k]]
        if pj != k:
            A[:, [k, pj]] = A[:, [pj, k]]
        while True:
            if A[k, k] < 0:
                A[k, :] = -A[k, :]
            p = int(A[k, k])
            col = A[k + 1 :, k]
            if col.any():
                _guarded_row_clear(A, k, p)
                col = A[k + 1 :, k]
                if col.any():  # remainders survive: promote the smallest
                    nz = np.nonzero(col)[0]
                    i = nz[np.abs(col[nz]).argmin()]
                    A[[k, k + 1 + int(i)]] = A[[k + 1 + int(i), k]]
                    continue
            row = A[k, k + 1 :]
            if row.any():
                _guarded_col_clear(A, k, p)
                row = A[k, k + 1 :]
                if row.any():
                    nz = np.nonzero(row)[0]
                    j = nz[np.abs(row[nz]).argmin()]
                    A[:, [k, k + 1 + int(j)]] = A[:, [k + 1 + int(j), k]]
                    continue
            # pivot row and column are clear; enforce divisibility of the rest
            rest = A[k + 1 :, k + 1 :]
            if rest.size:
                bad = np.nonzero((rest % p).any(axis=1))[0]
                if bad.size:
                    if 2 * int(np.abs(A).max()) >= _INT64_GUARD:
                        raise _Int64Overflow
                    A[k, :] += A[k + 1 + int(bad[0]), :]
                    continue
            break
        factors.append(int(A[k, k]))
    return factors


def _guarded_row_clear(A: np.ndarray, k: int, p: int) -> None:
    """Subtract nearest-multiple of the pivot row from all rows below (column k)."""
    col = A[k + 1 :, k]
    q = (col + p // 2) // p
    hit = np.nonzero(q)[0]
    if hit.size == 0:
        return
    qmax = int(np.abs(q[hit]).max())
    if (qmax + 1) * int(np.abs(A[k:, k:]).max()) >= _INT64_GUARD:
        raise _Int64Overflow
    A[k + 1 + hit, k:] -= q[hit, None] * A[k, k:]


def _guarded_col_clear(A: np.ndarray, k: int, p: int) -> None:
    row = A[k, k + 1 :]
    q = (row + p // 2) // p
    hit = np.nonzero(q)[0]
    if hit.size == 0:
        return
    qmax = int(np.abs(q[hit]).max())
    if (qmax + 1) * int(np.abs(A[k:, k:]).max()) >= _INT64_GUARD:
        raise _Int64Overflow
    A[k:, k + 1 + hit] -= np.outer(A[k:, k], q[hit])


def _snf_exact(rows2d: list[list[int]]) -> list[int]:
    """Same elimination as _snf_int64 over arbitrary-precision integers."""
    A = [list(map(int, row)) for row in rows2d]
    nrows, ncols = len(A), len(A[0])
    factors: list[int] = []
    for k in range(min(nrows, ncols)):
        pivot = None  # (abs, col, row)
        for r in range(k, nrows):
            Ar = A[r]
            for c in range(k, ncols):
                v = Ar[c]
                if v and (pivot is None or (abs(v), c, r) < pivot):
                    pivot = (abs(v), c, r)
        if pivot is None:
            break
        _, pj, pi = pivot
        if pi != k:
            A[k], A[pi] = A[pi], A[k]
        if pj != k:
            for row in A:
                row[k], row[pj] = row[pj], row[k]
        while True:
            if A[k][k] < 0:
                A[k] = [-x for x in A[k]]
            p = A[k][k]
            dirty = False
            for r in range(k + 1, nrows):
                a = A[r][k]
                if a:
                    q = (a + p // 2) // p
                    if q:
                        Ak, Ar = A[k], A[r]
                        for c in range(k, ncols):
                            Ar[c] -= q * Ak[c]
                    if A[r][k]:
                        dirty = True
            if dirty:
                best_r = min(
                    (r for r in range(k + 1, nrows) if A[r][k]),
                    key=lambda r: abs(A[r][k]),
                )
                A[k], A[best_r] = A[best_r], A[k]
                continue
            dirty = False
            for c in range(k + 1, ncols):
                a = A[k][c]
                if a:
                    q = (a + p // 2) // p
                    if q:
                        for row in A[k:]:
                            row[c] -= q * row[k]
                    if A[k][c]:
                        dirty = True
            if dirty:
                best_c = min(
                    (c for c in range(k + 1, ncols) if A[k][c]),
                    key=lambda c: abs(A[k][c]),
                )
                for row in A:
                    row[k], row[best_c] = row[best_c], row[k]
                continue
            repaired = False
            for r in range(k + 1, nrows):
                if any(A[r][c] % p for c in range(k + 1, ncols)):
                    Ak, Ar = A[k], A[r]
                    for c in range(k, ncols):
                        Ak[c] += Ar[c]
                    repaired = True
                    break
            if not repaired:
                break
        factors.append(A[k][k])
    return factors


# ---------------------------------------------------------------------------
# brute-force minor oracle

_MINOR_BUDGET = 5_000_000


def minor_gcd_oracle(M: SparseIntMatrix, k: int) -> int:
    """gcd of all k x k minors, by enumeration (0 if all vanish).

    Intended as an independent check of the invariant-factor products:
    prod_{i<=k} d_i equals this gcd. Enumeration stops early once the
    running gcd reaches 1. Refuses matrices beyond a small work budget
    (roughly 12x12).
    """
    if k < 1 or k > min(M.rows, M.cols):
        raise ValueError(f"k={k} outside [1, min(rows, cols)]")
    if M.rows > 16 or M.cols > 16:
        raise ValueError("matrix too large for minor enumeration")
    count = math.comb(M.rows, k) * math.comb(M.cols, k)
    if count > _MINOR_BUDGET:
        raise ValueError(f"{count} minors exceed the enumeration budget")
    from itertools import combinations

    dense = M.to_dense()
    g = 0
    for rows in combinations(range(M.rows), k):
        picked = [dense[r] for r in rows]
        for cols in combinations(range(M.cols), k):
            sub = [[row[c] for c in cols] for row in picked]
            g = math.gcd(g, _det_bareiss(sub))
            if g == 1:
                return 1
    return g


def _det_bareiss(m: list[list[int]]) -> int:
    """Exact integer determinant by fraction-free elimination (mutates m)."""
    n = len(m)
    sign = 1
    prev = 1
    for i in range(n - 1):
        if m[i][i] == 0:
            for r in range(i + 1, n):
                if m[r][i]:
                    m[i], m[r] = m[r], m[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) // prev
            m[r][i] = 0
        prev = m[i][i]
    return sign * m[-1][-1]
