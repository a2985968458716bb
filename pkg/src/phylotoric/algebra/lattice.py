"""Integer matrices: exact rank, Hermite normal form, kernel lattices, LLL."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class IntegerMatrix:
    """A dense rectangular matrix of Python ints (unbounded precision)."""

    entries: tuple[tuple[int, ...], ...]
    ncols: int

    def __init__(self, rows: Sequence[Sequence[int]], ncols: int | None = None):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("empty matrix needs an explicit column count")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError(f"ragged matrix: row of length {len(r)}, expected {ncols}")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "ncols", ncols)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntegerMatrix":
        return cls([[0] * n for _ in range(m)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> "IntegerMatrix":
        return cls([[c[i] for c in columns] for i in range(nrows)], len(columns))

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(self.columns(), self.nrows)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.ncols:
            raise ValueError("dimension mismatch")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]


def rank(A: IntegerMatrix | Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    rows = [list(r) for r in (A.entries if isinstance(A, IntegerMatrix) else A)]
    if not rows:
        return 0
    m, n = len(rows), len(rows[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        for i in range(r + 1, m):
            a = rows[i][c]
            rows[i] = [(p * x - a * y) // prev for x, y in zip(rows[i], rows[r])]
        prev = p
        r += 1
        if r == m:
            break
    return r


def determinant(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    M = [list(r) for r in rows]
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        p = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * p - M[i][k] * M[k][j]) // prev
        prev = p
    return sign * M[n - 1][n - 1]


def hermite_normal_form(rows: Sequence[Sequence[int]]):
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U @ rows == H``; ``H`` is in
    row echelon form with positive pivots and entries above each pivot reduced
    into ``[0, pivot)``. Zero rows of ``H`` sit at the bottom.
    """
    H = [list(r) for r in rows]
    m = len(H)
    n = len(H[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        # euclid down column c on rows r..m-1
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[i0] = H[i0], H[r]
            U[r], U[i0] = U[i0], U[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if r < m and H[r][c] != 0:
            if H[r][c] < 0:
                H[r] = [-x for x in H[r]]
                U[r] = [-x for x in U[r]]
            for i in range(r):
                q = H[i][c] // H[r][c]
                if q:
                    H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[r])]
            pivots.append(c)
            r += 1
    return H, U


def lattice_kernel(A: IntegerMatrix, reduce: bool = True) -> list[tuple[int, ...]]:
    """Z-basis of ``{v in Z^cols : A v = 0}``.

    Computed from the Hermite normal form of ``A^T``: the rows of the unimodular
    transform matching zero rows of the echelon form span the kernel. With
    ``reduce`` the basis is LLL-reduced, which keeps the derived binomials short.
    """
    n = A.ncols
    if n == 0:
        return []
    At = A.transpose().entries if A.nrows else [[] for _ in range(n)]
    H, U = hermite_normal_form([list(r) for r in At])
    basis = [tuple(U[i]) for i in range(n) if not any(H[i])]
    if reduce and len(basis) > 1:
        basis = lll_reduce(basis)
    return [_normalize_sign(v) for v in basis]


def _normalize_sign(v: Sequence[int]) -> tuple[int, ...]:
    first = next((x for x in v if x), 0)
    return tuple(v) if first >= 0 else tuple(-x for x in v)


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> list[tuple[int, ...]]:
    """LLL reduction of linearly independent integer vectors, exact rationals."""
    b = [list(v) for v in basis]
    k = len(b)
    if k == 0:
        return []

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    def gram_schmidt():
        bstar: list[list[Fraction]] = []
        mu = [[Fraction(0)] * k for _ in range(k)]
        norms: list[Fraction] = []
        for i in range(k):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = Fraction(dot(b[i], bstar[j])) / norms[j] if norms[j] else Fraction(0)
                v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
            bstar.append(v)
            norms.append(sum(x * x for x in v))
        return mu, norms, bstar

    mu, norms, _ = gram_schmidt()
    i = 1
    while i < k:
        for j in range(i - 1, -1, -1):
            q = round(mu[i][j])
            if q:
                b[i] = [x - q * y for x, y in zip(b[i], b[j])]
                for l in range(j):
                    mu[i][l] -= q * mu[j][l]
                mu[i][j] -= q
        if norms[i] >= (delta - mu[i][i - 1] ** 2) * norms[i - 1]:
            i += 1
            continue
        b[i], b[i - 1] = b[i - 1], b[i]
        for j in range(i - 1):
            mu[i][j], mu[i - 1][j] = mu[i - 1][j], mu[i][j]
        m = mu[i][i - 1]
        B = norms[i] + m * m * norms[i - 1]
        mu[i][i - 1] = m * norms[i - 1] / B
        norms[i] = norms[i - 1] * norms[i] / B
        norms[i - 1] = B
        for l in range(i + 1, k):
            t = mu[l][i]
            mu[l][i] = mu[l][i - 1] - m * t
            mu[l][i - 1] = t + mu[i][i - 1] * mu[l][i]
        i = max(i - 1, 1)
    return [tuple(v) for v in b]
