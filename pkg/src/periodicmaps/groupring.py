"""The integral group ring Z[C_m] and small matrices over it."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .cyclotomic import CyclotomicElement, _power_table, totient
from .lattice import IntSymMatrix


class OrderMismatch(ValueError):
    pass


class SupportViolation(ValueError):
    pass


@dataclass(frozen=True)
class GroupRingElement:
    """sum_i coeffs[i] T^i in Z[C_m]."""

    m: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        if len(c) > self.m:
            folded = [0] * self.m
            for i, x in enumerate(c):
                folded[i % self.m] += x
            c = tuple(folded)
        c = c + (0,) * (self.m - len(c))
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, m: int, value: int) -> GroupRingElement:
        return cls(m, (value,))

    @classmethod
    def monomial(cls, m: int, k: int, value: int = 1) -> GroupRingElement:
        c = [0] * m
        c[k % m] = value
        return cls(m, tuple(c))

    @classmethod
    def norm_element(cls, m: int) -> GroupRingElement:
        return cls(m, (1,) * m)

    @classmethod
    def from_terms(cls, m: int, terms: dict[int, int]) -> GroupRingElement:
        c = [0] * m
        for k, v in terms.items():
            c[k % m] += v
        return cls(m, tuple(c))

    def _check(self, other: GroupRingElement) -> None:
        if self.m != other.m:
            raise OrderMismatch(f"group orders differ: {self.m} vs {other.m}")

    def __add__(self, other: GroupRingElement) -> GroupRingElement:
        self._check(other)
        return GroupRingElement(self.m, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> GroupRingElement:
        return GroupRingElement(self.m, tuple(-x for x in self.coeffs))

    def __sub__(self, other: GroupRingElement) -> GroupRingElement:
        return self + (-other)

    def __mul__(self, other) -> GroupRingElement:
        if isinstance(other, int):
            return GroupRingElement(self.m, tuple(x * other for x in self.coeffs))
        self._check(other)
        m = self.m
        out = [0] * m
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    if y:
                        out[(i + j) % m] += x * y
        return GroupRingElement(m, tuple(out))

    __rmul__ = __mul__

    def involution(self) -> GroupRingElement:
        """T -> T^{-1}."""
        m = self.m
        return GroupRingElement(m, tuple(self.coeffs[(-i) % m] for i in range(m)))

    def augmentation(self) -> int:
        return sum(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs == (1,) + (0,) * (self.m - 1)

    def support(self) -> list[int]:
        return [i for i, x in enumerate(self.coeffs) if x]

    def evaluate_at_root(self, k: int) -> CyclotomicElement:
        """Substitute T -> zeta_m**k."""
        m = self.m
        table = _power_table(m)
        nums = [0] * totient(m)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, v in enumerate(table[(i * k) % m]):
                    if v:
                        nums[j] += x * v
        return CyclotomicElement._raw(m, nums, 1)

    def restrict(self, q: int) -> GroupRingElement:
        """View an element supported on <T^q> as an element of Z[C_{m/q}]."""
        m = self.m
        if m % q:
            raise SupportViolation(f"{q} does not divide {m}")
        bad = [i for i in self.support() if i % q]
        if bad:
            raise SupportViolation(f"coefficients at T^{bad[0]} lie off the subgroup generated by T^{q}")
        return GroupRingElement(m // q, tuple(self.coeffs[::q]))

    def __str__(self) -> str:
        terms = []
        for i, x in enumerate(self.coeffs):
            if x:
                terms.append(str(x) if i == 0 else (f"{x}*T^{i}" if x != 1 else f"T^{i}"))
        return " + ".join(terms) if terms else "0"


def gr_add(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    return x + y


def gr_mul(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    return x * y


def gr_involution(x: GroupRingElement) -> GroupRingElement:
    return x.involution()


def evaluate_at_root(x: GroupRingElement, k: int) -> CyclotomicElement:
    return x.evaluate_at_root(k)


@dataclass(frozen=True)
class GroupRingMatrix:
    m: int
    rows: tuple[tuple[GroupRingElement, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        for r in rows:
            if len(r) != len(rows[0]):
                raise ValueError("ragged group ring matrix")
            for x in r:
                if x.m != self.m:
                    raise OrderMismatch(f"entry over C_{x.m} in a matrix over C_{self.m}")
        object.__setattr__(self, "rows", rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    @classmethod
    def identity(cls, m: int, n: int) -> GroupRingMatrix:
        one, zero = GroupRingElement.constant(m, 1), GroupRingElement.constant(m, 0)
        return cls(m, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    def is_hermitian(self) -> bool:
        r, c = self.shape
        return r == c and all(
            self.rows[i][j] == self.rows[j][i].involution() for i in range(r) for j in range(r)
        )

    def to_list(self) -> list[list[list[int]]]:
        return [[list(x.coeffs) for x in r] for r in self.rows]

    @classmethod
    def from_list(cls, m: int, data: Sequence[Sequence[Sequence[int]]]) -> GroupRingMatrix:
        return cls(m, tuple(tuple(GroupRingElement(m, tuple(e)) for e in r) for r in data))

    def to_json(self) -> str:
        return json.dumps({"m": self.m, "matrix": self.to_list()}, separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: dict) -> GroupRingMatrix:
        m = int(doc["m"])
        rows = []
        for r in doc["matrix"]:
            row = []
            for e in r:
                # dense coefficient list, or {"power": coeff} sparse form
                if isinstance(e, dict):
                    row.append(GroupRingElement.from_terms(m, {int(k): int(v) for k, v in e.items()}))
                else:
                    row.append(GroupRingElement(m, tuple(e)))
            rows.append(tuple(row))
        return cls(m, tuple(rows))


def determinant(mat: GroupRingMatrix) -> GroupRingElement:
    """Cofactor expansion over the commutative ring Z[C_m]."""
    r, c = mat.shape
    if r != c:
        raise ValueError(f"determinant of a non-square {r}x{c} matrix")
    rows = [list(x) for x in mat.rows]

    def det(sub: list[list[GroupRingElement]]) -> GroupRingElement:
        if len(sub) == 1:
            return sub[0][0]
        total = GroupRingElement.constant(mat.m, 0)
        for j, x in enumerate(sub[0]):
            minor = [row[:j] + row[j + 1 :] for row in sub[1:]]
            term = x * det(minor)
            total = total + term if j % 2 == 0 else total - term
        return total

    if r == 0:
        return GroupRingElement.constant(mat.m, 1)
    return det(rows)


def det_2x2(mat: GroupRingMatrix) -> GroupRingElement:
    if mat.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got {mat.shape}")
    (a, b), (c, d) = mat.rows
    return a * d - b * c


def _circulant_block(x: GroupRingElement) -> list[list[int]]:
    # matrix of multiplication by x on the basis 1, S, ..., S^{n-1}
    n = x.m
    return [[x.coeffs[(r - c) % n] for c in range(n)] for r in range(n)]


def regular_expand(mat: GroupRingMatrix, q: int) -> IntSymMatrix:
    """Integer Gram matrix of the form on the subgroup ring Z[<T^q>]^rows."""
    r, c = mat.shape
    if r != c:
        raise ValueError("regular expansion needs a square matrix")
    if not mat.is_hermitian():
        raise ValueError("matrix is not involution-symmetric")
    n = mat.m // q
    blocks = [[_circulant_block(x.restrict(q)) for x in row] for row in mat.rows]
    out = [[0] * (r * n) for _ in range(r * n)]
    for bi in range(r):
        for bj in range(r):
            blk = blocks[bi][bj]
            for i in range(n):
                for j in range(n):
                    out[bi * n + i][bj * n + j] = blk[i][j]
    return IntSymMatrix(tuple(map(tuple, out)))


def character_norm_product(det: GroupRingElement) -> int:
    """prod_{k=0}^{m-1} det(zeta^k); equals the integer determinant of the regular expansion."""
    m = det.m
    acc = CyclotomicElement.one(m)
    for k in range(m):
        acc = acc * det.evaluate_at_root(k)
    value = acc.as_rational()
    if value is None or value.denominator != 1:
        raise ArithmeticError(f"character product is not a rational integer: {acc}")  # pragma: no cover
    return value.numerator


def symmetric_element(n: int, params: Sequence[int], m: int | None = None, q: int = 1) -> GroupRingElement:
    """x_0 + x_1 (S + S^-1) + x_2 (S^2 + S^-2) + ... in Z[C_n], S = T^q, embedded in Z[C_m].

    The entry a0 + a1(T^5 + T^20) + a2(T^10 + T^15) over C_25
    is ``symmetric_element(5, (a0, a1, a2), m=25, q=5)``.
    """
    m = n * q if m is None else m
    if len(params) != n // 2 + 1:
        raise ValueError(f"need {n // 2 + 1} parameters for a symmetric element of Z[C_{n}]")
    c = [0] * m
    c[0] = params[0]
    for i, x in enumerate(params[1:], start=1):
        for e in {(i * q) % m, (-i * q) % m}:
            c[e] += x
    return GroupRingElement(m, tuple(c))
