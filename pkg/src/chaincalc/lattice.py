"""Integer lattices in column Hermite normal form.

A full-rank lattice in Z^n is stored as the lower-triangular matrix ``H``
(tuple of rows) whose columns form a basis, with ``H[j][j] > 0`` and
``0 <= H[r][j] < H[r][r]`` for ``j < r``.  That form is unique, so two
lattices are equal exactly when their matrices are equal.
"""

from __future__ import annotations

from typing import Iterable, Sequence

Vector = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]


class LatticeError(ValueError):
    pass


def columns(m: Sequence[Sequence[int]]) -> list[list[int]]:
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    return [[m[r][c] for r in range(n_rows)] for c in range(n_cols)]


def from_columns(cols: Sequence[Sequence[int]], n: int) -> Matrix:
    return tuple(tuple(col[r] for col in cols) for r in range(n))


def hnf(gens: Iterable[Sequence[int]], n: int) -> Matrix:
    """Column HNF of the lattice spanned by the vectors ``gens``.

    Raises LatticeError if the span does not have full rank ``n``.
    """
    cols = [list(v) for v in gens]
    for v in cols:
        if len(v) != n:
            raise LatticeError(f"vector {v} has length {len(v)}, expected {n}")
    cols = [v for v in cols if any(v)]
    for r in range(n):
        active = cols[r:]
        while True:
            nonzero = [c for c in active if c[r] != 0]
            if len(nonzero) <= 1:
                break
            pivot = min(nonzero, key=lambda c: abs(c[r]))
            for c in nonzero:
                if c is pivot:
                    continue
                q = c[r] // pivot[r]
                for k in range(r, n):
                    c[k] -= q * pivot[k]
        nonzero = [c for c in active if c[r] != 0]
        if not nonzero:
            raise LatticeError("generators do not span a full-rank lattice")
        pivot = nonzero[0]
        if pivot[r] < 0:
            for k in range(r, n):
                pivot[k] = -pivot[k]
        rest = [c for c in active if c is not pivot and any(c)]
        cols = cols[:r] + [pivot] + rest
        for j in range(r):
            q = cols[j][r] // pivot[r]
            if q:
                for k in range(r, n):
                    cols[j][k] -= q * pivot[k]
    return from_columns(cols[:n], n)


def hnf_of_matrix(m: Sequence[Sequence[int]]) -> Matrix:
    return hnf(columns(m), len(m))


def determinant(h: Matrix) -> int:
    d = 1
    for j in range(len(h)):
        d *= h[j][j]
    return d


def reduce(v: Sequence[int], h: Matrix) -> Vector:
    """Canonical representative of ``v + h Z^n``."""
    n = len(h)
    w = list(v)
    for j in range(n):
        q = w[j] // h[j][j]
        if q:
            for r in range(j, n):
                w[r] -= q * h[r][j]
    return tuple(w)


def contains(h: Matrix, v: Sequence[int]) -> bool:
    return not any(reduce(v, h))


def solve(h: Matrix, v: Sequence[int]) -> Vector | None:
    """Integer ``x`` with ``h x = v``, or None (forward substitution)."""
    n = len(h)
    w = list(v)
    x = []
    for j in range(n):
        q, rem = divmod(w[j], h[j][j])
        if rem:
            return None
        x.append(q)
        if q:
            for r in range(j, n):
                w[r] -= q * h[r][j]
    return tuple(x)


def mat_vec(a: Matrix, v: Sequence[int]) -> Vector:
    return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, m, p = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p))
                 for i in range(n))


def int_det(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def identity(n: int) -> Matrix:
    return tuple(tuple(int(r == c) for c in range(n)) for r in range(n))


def sublattice(inner: Matrix, outer: Matrix) -> bool:
    """True if every column of ``inner`` lies in the lattice ``outer``."""
    return all(contains(outer, col) for col in columns(inner))
