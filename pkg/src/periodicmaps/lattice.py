"""Certification of integral symmetric bilinear forms.

Includes an exact replay of a greedy simultaneous row/column reduction
(pivot i outer, j inner, both in index order, repeated until no
off-diagonal entry is more than half of the smaller diagonal entry), and
an exact enumeration of norm-1 vectors used to recognise the standard
form n<+1>.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

Matrix = list[list[int]]


class NotSymmetric(ValueError):
    pass


@dataclass(frozen=True)
class IntSymMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix is not square")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise NotSymmetric(f"entry ({i},{j})={rows[i][j]} differs from ({j},{i})={rows[j][i]}")
        object.__setattr__(self, "entries", rows)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def tolist(self) -> Matrix:
        return [list(r) for r in self.entries]

    @classmethod
    def identity(cls, n: int) -> IntSymMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def direct_sum(self, other: IntSymMatrix) -> IntSymMatrix:
        n, k = self.n, other.n
        rows = [list(r) + [0] * k for r in self.entries]
        rows += [[0] * n + list(r) for r in other.entries]
        return IntSymMatrix(tuple(map(tuple, rows)))

    def congruent(self, u: Sequence[Sequence[int]]) -> IntSymMatrix:
        """U^T A U."""
        return IntSymMatrix(tuple(map(tuple, matmul(transpose(u), matmul(self.tolist(), u)))))

    # text formats ---------------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> IntSymMatrix:
        """Whitespace-separated integer rows, or a JSON nested array."""
        stripped = text.strip()
        if stripped.startswith("["):
            return cls(tuple(map(tuple, json.loads(stripped))))
        rows = []
        for line in stripped.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                rows.append(tuple(int(x) for x in line.split()))
        return cls(tuple(rows))

    @classmethod
    def load(cls, path: str | Path) -> IntSymMatrix:
        return cls.parse(Path(path).read_text())

    def format(self) -> str:
        width = max(len(str(x)) for r in self.entries for x in r) if self.n else 1
        return "\n".join(" ".join(str(x).rjust(width) for x in r) for r in self.entries) + "\n"


def transpose(a: Sequence[Sequence[int]]) -> Matrix:
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def _as_rows(a) -> Matrix:
    return a.tolist() if isinstance(a, IntSymMatrix) else [list(r) for r in a]


def determinant(a) -> int:
    """Exact determinant by Bareiss fraction-free elimination (with row pivoting)."""
    m = _as_rows(a)
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def leading_minors(a) -> list[int]:
    """All leading principal minors, from Bareiss elimination without pivoting."""
    m = _as_rows(a)
    n = len(m)
    minors = []
    prev = 1
    for k in range(n):
        pivot = m[k][k]
        minors.append(pivot)
        if pivot == 0:
            # later minors need pivoting; compute them directly
            minors.extend(determinant([row[: j + 1] for row in _as_rows(a)[: j + 1]]) for j in range(k + 1, n))
            return minors
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return minors


def is_positive_definite(a) -> bool:
    return all(x > 0 for x in leading_minors(a))


# greedy reduction -----------------------------------------------------------


def needs_reduction(a) -> bool:
    """True iff some pair has 2|a_ij| > min(|a_ii|, |a_jj|)."""
    m = _as_rows(a)
    n = len(m)
    for i in range(n - 1):
        for j in range(i + 1, n):
            if 2 * abs(m[i][j]) > min(abs(m[i][i]), abs(m[j][j])):
                return True
    return False


@dataclass
class Reduction:
    matrix: IntSymMatrix
    op_count: int
    transform: Matrix
    passes: int
    stalled: bool = False

    @property
    def is_identity(self) -> bool:
        return self.matrix == IntSymMatrix.identity(self.matrix.n)

    @property
    def is_diagonal(self) -> bool:
        e = self.matrix.entries
        return all(e[i][j] == 0 for i in range(len(e)) for j in range(len(e)) if i != j)


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def reduce_to_diagonal(a, max_passes: int = 10_000) -> Reduction:
    """Replay the greedy local-move reduction and return U with U^T A U = result.

    Each qualifying (i, j) adds -e*k times row/column i to row/column j,
    with k = floor(|b_ij| / |b_ii|) and e = sign(b_ij / b_ii); zero pivots
    are skipped.  A pass that changes nothing while the test predicate is
    still true would repeat forever, so it stops and is flagged ``stalled``.
    """
    b = _as_rows(a)
    n = len(b)
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    count = 0
    passes = 0
    stalled = False
    while needs_reduction(b):
        if passes >= max_passes:
            stalled = True
            break
        passes += 1
        changed = False
        for i in range(n):
            if b[i][i] == 0:
                continue
            for j in range(n):
                if j == i or not abs(2 * b[i][j]) > abs(b[i][i]):
                    continue
                count += 1
                k = abs(b[i][j]) // abs(b[i][i])
                c = -_sign(b[i][j]) * _sign(b[i][i]) * k
                if c == 0:
                    continue
                changed = True
                for r in range(n):
                    b[r][j] += c * b[r][i]
                for r in range(n):
                    b[j][r] += c * b[i][r]
                for r in range(n):
                    u[r][j] += c * u[r][i]
        if not changed:
            stalled = True
            break
    return Reduction(IntSymMatrix(tuple(map(tuple, b))), count, u, passes, stalled)


# norm-1 vectors ---------------------------------------------------------------


def _ldl(a: Matrix) -> tuple[list[Fraction], list[list[Fraction]]]:
    # Q(x) = sum_i d_i (x_i + sum_{j>i} mu[i][j] x_j)^2, exact
    n = len(a)
    q = [[Fraction(x) for x in row] for row in a]
    d = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = q[i][i]
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            mu[i][j] = q[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(j, n):
                q[j][k] -= mu[i][j] * q[i][k]
                q[k][j] = q[j][k]
    return d, mu


def vectors_of_norm(a, norm: int) -> list[tuple[int, ...]]:
    """All integer v with v^T A v == norm, by exact Fincke-Pohst enumeration.

    The rational LDL^T data are rescaled to one common denominator so the
    search itself runs in integer arithmetic.  Both v and -v are returned,
    sorted.
    """
    rows = _as_rows(a)
    n = len(rows)
    if norm <= 0:
        return []
    d, mu = _ldl(rows)
    # row i: centre offset s_i / den_i with s_i = sum_j nums[i][j] x_j
    dens = [math.lcm(1, *(mu[i][j].denominator for j in range(i + 1, n))) for i in range(n)]
    nums = [[int(mu[i][j] * dens[i]) for j in range(n)] for i in range(n)]
    scale = math.lcm(*(d[i].denominator * dens[i] ** 2 for i in range(n)))
    # term_i(x) = weight_i * (den_i x_i + s_i)^2, all scaled by ``scale``
    weights = [d[i].numerator * (scale // (d[i].denominator * dens[i] ** 2)) for i in range(n)]
    found: list[tuple[int, ...]] = []
    x = [0] * n

    def descend(i: int, remaining: int) -> None:
        s_i = sum(nums[i][j] * x[j] for j in range(i + 1, n))
        den, w = dens[i], weights[i]
        start = -((s_i + den // 2) // den)  # nearest integer to the centre -s_i/den
        hits = []
        step = start
        while True:
            t = w * (den * step + s_i) ** 2
            if t > remaining:
                break
            hits.append((step, t))
            step += 1
        step = start - 1
        while True:
            t = w * (den * step + s_i) ** 2
            if t > remaining:
                break
            hits.append((step, t))
            step -= 1
        hits.sort()
        for xi, t in hits:
            x[i] = xi
            if i == 0:
                if t == remaining and any(x):
                    found.append(tuple(x))
            else:
                descend(i - 1, remaining - t)
        x[i] = 0

    descend(n - 1, norm * scale)
    return sorted(v for v in found if _qform(rows, v) == norm)


def _qform(a: Matrix, v: Sequence[int]) -> int:
    return sum(a[i][j] * v[i] * v[j] for i in range(len(v)) for j in range(len(v)))


def _normalise_sign(v: tuple[int, ...]) -> tuple[int, ...]:
    lead = next(x for x in v if x)
    return v if lead > 0 else tuple(-x for x in v)


def norm_one_classes(a) -> list[tuple[int, ...]]:
    """Norm-1 vectors up to sign, each with first nonzero coordinate positive."""
    return sorted({_normalise_sign(v) for v in vectors_of_norm(a, 1)})


def norm_one_split(a) -> Matrix | None:
    """A unimodular U with U^T A U = I, built from norm-1 vectors, or None.

    In a positive definite integral form two norm-1 vectors u != +-v are
    orthogonal (otherwise u -+ v would have norm 0), so the form is n<+1>
    exactly when there are n sign classes of norm-1 vectors.
    """
    rows = _as_rows(a)
    n = len(rows)
    if not is_positive_definite(rows):
        raise ValueError("norm_one_split requires a positive definite form")
    if determinant(rows) != 1:
        raise ValueError("norm_one_split requires determinant 1")
    classes = norm_one_classes(rows)
    if len(classes) < n:
        return None
    # columns are the norm-1 vectors, ordered so that the identity maps to itself
    classes.sort(reverse=True)
    u = [[classes[c][r] for c in range(n)] for r in range(n)]
    check = matmul(transpose(u), matmul(rows, u))
    if check != [[int(i == j) for j in range(n)] for i in range(n)]:
        raise AssertionError("norm-1 vectors failed to be orthonormal")  # pragma: no cover
    return u


def e8_gram() -> IntSymMatrix:
    """Gram matrix of E8 in a simple-root basis (Cartan matrix)."""
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)]
    g = [[2 * int(i == j) for j in range(8)] for i in range(8)]
    for i, j in edges:
        g[i][j] = g[j][i] = -1
    return IntSymMatrix(tuple(map(tuple, g)))
