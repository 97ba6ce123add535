"""Small exact linear algebra over Z and Q on tuple-of-tuples matrices."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Vec = tuple
Mat = tuple  # tuple of row tuples


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_vec(m: Mat, v: Sequence) -> Vec:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def vec_mat(v: Sequence, m: Mat) -> Vec:
    cols = len(m[0]) if m else 0
    return tuple(sum(v[i] * m[i][j] for i in range(len(v))) for j in range(cols))


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m))


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def add(u: Sequence, v: Sequence) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v: Sequence) -> Vec:
    return tuple(c * a for a in v)


def is_integral(v: Sequence) -> bool:
    return all(Fraction(a).denominator == 1 for a in v)


def as_int(v: Sequence) -> Vec:
    out = []
    for a in v:
        f = Fraction(a)
        if f.denominator != 1:
            raise ValueError(f"non-integral entry {f}")
        out.append(int(f))
    return tuple(out)


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(map(Fraction, r)) for r in rows]
    pivots: list[int] = []
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    return len(_rref([list(r) for r in m])[1])


def inverse(m: Mat) -> Mat:
    """Exact inverse; entries come back as ints when integral."""
    n = len(m)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, piv = _rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("singular matrix")
    inv = [row[n:] for row in red[:n]]
    return tuple(tuple(int(x) if x.denominator == 1 else x for x in row) for row in inv)


def solve(m: Sequence[Sequence], b: Sequence) -> Vec:
    """Solve m x = b for square invertible m."""
    return mat_vec(inverse(tuple(map(tuple, m))), b)


def left_inverse(cols: Mat) -> Mat:
    """For an injective N x r matrix B return (B^T B)^{-1} B^T."""
    bt = transpose(cols)
    return mat_mul(inverse(mat_mul(bt, cols)), bt)


def kernel_dim(m: Sequence[Sequence]) -> int:
    return len(m[0]) - rank(m) if m else 0


def normalize(v: Sequence) -> Vec:
    return tuple(int(x) if Fraction(x).denominator == 1 else Fraction(x) for x in v)
