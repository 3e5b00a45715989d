"""Exact integer matrices, Smith normal form and lattice helpers.

Everything here works on Python ints, so entries never overflow.  A
:class:`Matrix` carries its shape explicitly because empty matrices
(zero rows or zero columns) are routine in chain complexes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Matrix:
    rows: tuple[tuple[int, ...], ...]
    ncols: int

    def __post_init__(self):
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError(f"ragged matrix: row of length {len(r)}, expected {self.ncols}")

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]], ncols: int | None = None) -> "Matrix":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        return cls(rows, ncols)

    @classmethod
    def zeros(cls, m: int, n: int) -> "Matrix":
        return cls(tuple((0,) * n for _ in range(m)), n)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], nrows: int) -> "Matrix":
        return cls(tuple(tuple(c[i] for c in cols) for i in range(nrows)), len(cols))

    @classmethod
    def diagonal(cls, entries: Sequence[int], m: int, n: int) -> "Matrix":
        return cls(tuple(tuple(entries[i] if i == j and i < len(entries) else 0
                               for j in range(n)) for i in range(m)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "Matrix":
        return Matrix(tuple(self.column(j) for j in range(self.ncols)), self.nrows)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.columns()
        return Matrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols)
                            for r in self.rows), other.ncols)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for matrix {self.shape}")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return Matrix(tuple(tuple(a + b for a, b in zip(r, s))
                            for r, s in zip(self.rows, other.rows)), self.ncols)

    def scale(self, k: int) -> "Matrix":
        return Matrix(tuple(tuple(k * a for a in r) for r in self.rows), self.ncols)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ValueError("hstack needs equal row counts")
        return Matrix(tuple(a + b for a, b in zip(self.rows, other.rows)),
                      self.ncols + other.ncols)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise ValueError("vstack needs equal column counts")
        return Matrix(self.rows + other.rows, self.ncols)

    def select_rows(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(tuple(self.rows[i] for i in idx), self.ncols)

    def select_columns(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(tuple(tuple(r[j] for j in idx) for r in self.rows), len(idx))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self.rows) + "]"


def block_matrix(blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix; every block row must share heights, every block column widths."""
    rows: list[tuple[int, ...]] = []
    ncols = sum(b.ncols for b in blocks[0]) if blocks else 0
    for brow in blocks:
        h = brow[0].nrows if brow else 0
        for i in range(h):
            rows.append(tuple(x for b in brow for x in b.rows[i]))
    return Matrix(tuple(rows), ncols)


@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` in Smith form.

    ``U_inv`` and ``V_inv`` are carried along because the group code needs
    new generators expressed in old coordinates.
    """

    U: Matrix
    D: Matrix
    V: Matrix
    U_inv: Matrix
    V_inv: Matrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        m, n = self.D.shape
        return tuple(self.D.rows[i][i] for i in range(min(m, n)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _nearest_quotient(a: int, p: int) -> int:
    q, r = divmod(a, p)   # r carries the sign of p
    if 2 * abs(r) > abs(p):
        q += 1
    return q


def smith_normal_form(A: Matrix) -> SnfDecomposition:
    """Smith normal form by unimodular row and column operations.

    Pivots on the entry of least absolute value and reduces with nearest-integer
    quotients to keep intermediate entries small.  Diagonal entries come out
    non-negative with ``d[i] | d[i+1]``.
    """
    m, n = A.shape
    D = [list(r) for r in A.rows]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    # row op: row_i += q * row_t   (U <- E U,  U_inv <- U_inv E^-1)
    def row_add(i, t, q):
        if q == 0:
            return
        D[i] = [a + q * b for a, b in zip(D[i], D[t])]
        U[i] = [a + q * b for a, b in zip(U[i], U[t])]
        for r in Ui:
            r[t] -= q * r[i]

    def row_swap(i, t):
        if i == t:
            return
        D[i], D[t] = D[t], D[i]
        U[i], U[t] = U[t], U[i]
        for r in Ui:
            r[i], r[t] = r[t], r[i]

    def row_neg(t):
        D[t] = [-a for a in D[t]]
        U[t] = [-a for a in U[t]]
        for r in Ui:
            r[t] = -r[t]

    # col op: col_j += q * col_t   (V <- V E,  V_inv <- E^-1 V_inv)
    def col_add(j, t, q):
        if q == 0:
            return
        for r in D:
            r[j] += q * r[t]
        for r in V:
            r[j] += q * r[t]
        Vi[t] = [a - q * b for a, b in zip(Vi[t], Vi[j])]

    def col_swap(j, t):
        if j == t:
            return
        for r in D:
            r[j], r[t] = r[t], r[j]
        for r in V:
            r[j], r[t] = r[t], r[j]
        Vi[j], Vi[t] = Vi[t], Vi[j]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = D[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        row_swap(best[1], t)
        col_swap(best[2], t)
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    row_add(i, t, -_nearest_quotient(D[i][t], p))
                    dirty = dirty or D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    col_add(j, t, -_nearest_quotient(D[t][j], p))
                    dirty = dirty or D[t][j] != 0
            if dirty:
                # a remainder smaller than the pivot survived; move it into place
                best = None
                for i in range(t, m):
                    x = D[i][t]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, "r")
                for j in range(t, n):
                    x = D[t][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), j, "c")
                if best[2] == "r":
                    row_swap(best[1], t)
                else:
                    col_swap(best[1], t)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % p), None)
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if D[t][t] < 0:
            row_neg(t)

    return SnfDecomposition(
        U=Matrix.of(U, m), D=Matrix.of(D, n), V=Matrix.of(V, n),
        U_inv=Matrix.of(Ui, m), V_inv=Matrix.of(Vi, n),
    )


def column_hnf(B: Matrix) -> Matrix:
    """Column-style Hermite normal form of a full-column-rank matrix.

    Same column lattice, canonical basis: lower echelon with positive pivots
    and entries left of each pivot reduced into ``[0, pivot)``.
    """
    m, k = B.shape
    cols = [list(c) for c in B.columns()]
    pivots: list[int] = []
    c = 0
    for i in range(m):
        if c >= k:
            break
        # gcd-combine entries in row i across columns c..k-1 into column c
        for j in range(c + 1, k):
            a, b = cols[c][i], cols[j][i]
            if b == 0:
                continue
            g, x, y = _xgcd(a, b)
            u, v = a // g, b // g
            cc, cj = cols[c], cols[j]
            cols[c] = [x * s + y * t for s, t in zip(cc, cj)]
            cols[j] = [-v * s + u * t for s, t in zip(cc, cj)]
        if cols[c][i] == 0:
            continue
        if cols[c][i] < 0:
            cols[c] = [-x for x in cols[c]]
        pivots.append(i)
        c += 1
    if c != k:
        raise ValueError("column_hnf needs full column rank")
    for jc, i in enumerate(pivots):
        p = cols[jc][i]
        for j in range(jc):
            q = cols[j][i] // p
            if q:
                cols[j] = [s - q * t for s, t in zip(cols[j], cols[jc])]
    return Matrix.from_columns(cols, m)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def nullspace_basis(A: Matrix) -> Matrix:
    """Basis (as columns) of the integer kernel lattice ``{x : A x = 0}``."""
    snf = smith_normal_form(A)
    r = snf.rank
    return snf.V.select_columns(range(r, A.ncols))


def column_lattice_basis(G: Matrix) -> Matrix:
    """Basis (as columns) of the lattice spanned by the columns of ``G``."""
    snf = smith_normal_form(G)
    d = snf.diagonal
    cols = [tuple(d[i] * x for x in snf.U_inv.column(i)) for i in range(snf.rank)]
    return Matrix.from_columns(cols, G.nrows)


class LatticeSolver:
    """Solve ``B c = x`` exactly for a fixed full-column-rank ``B``."""

    def __init__(self, B: Matrix):
        self.B = B
        self.snf = smith_normal_form(B)
        if self.snf.rank != B.ncols:
            raise ValueError("LatticeSolver needs full column rank")

    def solve(self, x: Sequence[int]) -> tuple[int, ...] | None:
        y = self.snf.U.apply(x)
        d = self.snf.diagonal
        k = self.B.ncols
        z = []
        for i, yi in enumerate(y):
            if i < k:
                if yi % d[i]:
                    return None
                z.append(yi // d[i])
            elif yi:
                return None
        return self.snf.V.apply(z)


def determinant(A: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = A.nrows
    if n != A.ncols:
        raise ValueError("determinant of a non-square matrix")
    M = [list(r) for r in A.rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1
