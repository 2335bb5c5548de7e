"""Matrices over scalars and over Laurent polynomials, with exact solvers."""

from __future__ import annotations

from .errors import SingularMatrix
from .polynomials import LaurentPoly
from .scalars import same_backend


class ScalarMatrix:
    """Rectangular matrix of backend scalars (row-major)."""

    __slots__ = ("backend", "rows", "cols", "entries")

    def __init__(self, backend, entries, raw=False):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        data = []
        for row in entries:
            if len(row) != cols:
                raise ValueError("ragged matrix")
            data.append([c if raw else backend.scalar(c) for c in row])
        self.backend = backend
        self.rows = rows
        self.cols = cols
        self.entries = data

    @classmethod
    def identity(cls, backend, n):
        return cls(
            backend,
            [[backend.one if i == j else backend.zero for j in range(n)] for i in range(n)],
            raw=True,
        )

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def matvec(self, v):
        return [
            sum((self.entries[i][j] * v[j] for j in range(self.cols)), self.backend.zero)
            for i in range(self.rows)
        ]

    def __repr__(self):
        return f"ScalarMatrix({self.rows}x{self.cols})"


def _pivot_row(backend, col, start, rows, scale):
    """Index of the pivot row, or None if the column is numerically zero."""
    if backend.is_exact:
        for i in range(start, len(rows)):
            if rows[i][col] != 0:
                return i
        return None
    best, best_abs = None, None
    for i in range(start, len(rows)):
        a = backend.abs(rows[i][col])
        if best_abs is None or a > best_abs:
            best, best_abs = i, a
    if best is None or best_abs <= backend.tolerance * scale:
        return None
    return best


def solve_linear(a: ScalarMatrix, b):
    """Solve A x = b by Gaussian elimination with partial pivoting.

    Exact backend: the returned solution satisfies A x = b exactly.
    Raises SingularMatrix when no acceptable pivot exists; upstream this
    signals a non-normal multi-index.
    """
    if a.rows != a.cols:
        raise ValueError("solve_linear needs a square matrix")
    if len(b) != a.rows:
        raise ValueError("dimension mismatch")
    n = a.rows
    backend = a.backend
    if n == 0:
        return []
    m = [row[:] + [b[i]] for i, row in enumerate(a.entries)]
    scale = backend.zero
    if not backend.is_exact:
        for row in m:
            for v in row[:-1]:
                av = backend.abs(v)
                if av > scale:
                    scale = av
        if scale == 0:
            scale = backend.one
    for k in range(n):
        p = _pivot_row(backend, k, k, m, scale)
        if p is None:
            raise SingularMatrix(f"no pivot in column {k}")
        if p != k:
            m[k], m[p] = m[p], m[k]
        inv = backend.one / m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] * inv
            if backend.is_zero(f):
                continue
            for j in range(k, n + 1):
                m[i][j] = m[i][j] - f * m[k][j]
    x = [backend.zero] * n
    for k in range(n - 1, -1, -1):
        acc = m[k][n]
        for j in range(k + 1, n):
            acc = acc - m[k][j] * x[j]
        x[k] = acc / m[k][k]
    return x


def solve_overdetermined(a: ScalarMatrix, b, scale=None):
    """Solve a full-column-rank (possibly tall) system A x = b.

    Returns (x, max_inconsistency) where the second value is the largest
    residual among the dependent rows -- exactly zero when the system is
    consistent in the exact backend.  Raises SingularMatrix when the columns
    are not independent.
    """
    backend = a.backend
    rows = [row[:] + [b[i]] for i, row in enumerate(a.entries)]
    ncols = a.cols
    if scale is None:
        scale = backend.one
    pivots = []
    r = 0
    for c in range(ncols):
        p = _pivot_row(backend, c, r, rows, scale)
        if p is None:
            raise SingularMatrix(f"column {c} has no pivot")
        rows[r], rows[p] = rows[p], rows[r]
        pivots.append(c)
        inv = backend.one / rows[r][c]
        for i in range(len(rows)):
            if i == r:
                continue
            f = rows[i][c] * inv
            if backend.is_zero(f):
                continue
            for j in range(c, ncols + 1):
                rows[i][j] = rows[i][j] - f * rows[r][j]
        r += 1
    x = [backend.zero] * ncols
    for r, c in enumerate(pivots):
        x[c] = rows[r][ncols] / rows[r][c]
    worst = backend.zero
    for i in range(len(pivots), len(rows)):
        res = backend.abs(rows[i][ncols])
        if res > worst:
            worst = res
    return x, worst


class LaurentMatrix:
    """Matrix with LaurentPoly entries; supports the N/W matrix algebra."""

    __slots__ = ("backend", "rows", "cols", "entries")

    def __init__(self, backend, entries):
        self.backend = backend
        self.rows = len(entries)
        self.cols = len(entries[0]) if entries else 0
        for row in entries:
            if len(row) != self.cols:
                raise ValueError("ragged matrix")
            for e in row:
                same_backend(backend, e.backend)
        self.entries = [list(row) for row in entries]

    @classmethod
    def zero(cls, backend, rows, cols):
        z = LaurentPoly.zero(backend)
        return cls(backend, [[z for _ in range(cols)] for _ in range(rows)])

    @classmethod
    def identity(cls, backend, n):
        z = LaurentPoly.zero(backend)
        one = LaurentPoly.constant(backend, 1)
        return cls(backend, [[one if i == j else z for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __add__(self, other):
        self._check_dims(other, same=True)
        return LaurentMatrix(
            self.backend,
            [[self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
             for i in range(self.rows)],
        )

    def __sub__(self, other):
        self._check_dims(other, same=True)
        return LaurentMatrix(
            self.backend,
            [[self.entries[i][j] - other.entries[i][j] for j in range(self.cols)]
             for i in range(self.rows)],
        )

    def __mul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch: {self.cols} vs {other.rows}")
        same_backend(self.backend, other.backend)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = LaurentPoly.zero(self.backend)
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return LaurentMatrix(self.backend, out)

    def _check_dims(self, other, same=False):
        same_backend(self.backend, other.backend)
        if same and (self.rows != other.rows or self.cols != other.cols):
            raise ValueError("dimension mismatch")

    def derivative(self):
        """Entrywise d/dx."""
        return LaurentMatrix(
            self.backend,
            [[e.derivative() for e in row] for row in self.entries],
        )

    def transpose(self):
        return LaurentMatrix(
            self.backend,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def neg(self):
        return LaurentMatrix(self.backend, [[-e for e in row] for row in self.entries])

    def max_abs_coeff(self):
        m = self.backend.zero
        for row in self.entries:
            for e in row:
                a = e.max_abs_coeff()
                if a > m:
                    m = a
        return m

    def __eq__(self, other):
        return (
            isinstance(other, LaurentMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and all(
                self.entries[i][j] == other.entries[i][j]
                for i in range(self.rows)
                for j in range(self.cols)
            )
        )

    def __repr__(self):
        return f"LaurentMatrix({self.rows}x{self.cols})"
