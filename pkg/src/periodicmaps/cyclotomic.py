"""Exact arithmetic in the cyclotomic field Q(zeta_m).

Elements are stored in canonical form: the unique polynomial in zeta of
degree < phi(m), with rational coefficients.  Internally the coefficients
are kept as a tuple of integer numerators over one positive common
denominator, reduced so that the gcd of all numerators and the denominator
is 1.  This keeps multiplication in integer arithmetic.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import factorint


class ConductorMismatch(ValueError):
    pass


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # exact division of integer polynomials by a monic (or unit-leading) divisor
    num = list(num)
    lead = den[-1]
    assert lead in (1, -1)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1] * lead
        q[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    rem = num[: len(den) - 1]
    return q, rem


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, constant term first.

    Prime powers p**t use 1 + x**(p**(t-1)) + ... + x**((p-1) p**(t-1));
    other m divide x**m - 1 by Phi_d for every proper divisor d.
    """
    if m < 1:
        raise ValueError(f"conductor must be positive, got {m}")
    if m == 1:
        return (-1, 1)
    f = factorint(m)
    if len(f) == 1:
        (p, t), = f.items()
        step = p ** (t - 1)
        coeffs = [0] * ((p - 1) * step + 1)
        for i in range(p):
            coeffs[i * step] = 1
        return tuple(coeffs)
    return _phi_by_division(m)


@functools.lru_cache(maxsize=None)
def _phi_by_division(m: int) -> tuple[int, ...]:
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            q, rem = _poly_divmod(num, list(cyclotomic_polynomial(d)))
            if any(rem):
                raise ArithmeticError(f"Phi_{d} does not divide x^{m}-1")  # pragma: no cover
            num = q
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return tuple(num)


@functools.lru_cache(maxsize=None)
def totient(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


def _reduce_ints(poly: list[int], m: int) -> list[int]:
    """Reduce an integer polynomial modulo Phi_m in place; returns length-phi list."""
    phi_poly = cyclotomic_polynomial(m)
    n = len(phi_poly) - 1
    for i in range(len(poly) - 1, n - 1, -1):
        c = poly[i]
        if c:
            base = i - n
            for j, pj in enumerate(phi_poly):
                if pj:
                    poly[base + j] -= c * pj
    if len(poly) < n:
        poly.extend([0] * (n - len(poly)))
    return poly[:n]


@functools.lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    # canonical integer coefficient vectors of zeta**j for j = 0..m-1
    n = totient(m)
    rows = []
    for j in range(m):
        poly = [0] * max(j + 1, n)
        poly[j] = 1
        rows.append(tuple(_reduce_ints(poly, m)))
    return tuple(rows)


class CyclotomicElement:
    """An element of Q(zeta_m), zeta = exp(2 pi i / m), in canonical form."""

    __slots__ = ("m", "_nums", "_den", "_hash")

    def __init__(self, m: int, coeffs: Iterable = ()):
        coeffs = [Fraction(c) for c in coeffs]
        n = totient(m)
        if len(coeffs) > n:
            # not canonical yet; reduce mod Phi_m
            den = math.lcm(*(c.denominator for c in coeffs))
            ints = [int(c * den) for c in coeffs]
            nums = _reduce_ints(ints, m)
        else:
            den = math.lcm(1, *(c.denominator for c in coeffs))
            nums = [int(c * den) for c in coeffs] + [0] * (n - len(coeffs))
        self._set(m, nums, den)

    def _set(self, m: int, nums: Sequence[int], den: int) -> None:
        g = math.gcd(den, *nums)
        if den < 0:
            g = -g
        self.m = m
        self._nums = tuple(x // g for x in nums)
        self._den = den // g
        self._hash = None
        assert len(self._nums) == totient(m)

    @classmethod
    def _raw(cls, m: int, nums: Sequence[int], den: int = 1) -> CyclotomicElement:
        obj = cls.__new__(cls)
        obj._set(m, nums, den)
        return obj

    # constructors -----------------------------------------------------

    @classmethod
    def zero(cls, m: int) -> CyclotomicElement:
        return cls._raw(m, [0] * totient(m))

    @classmethod
    def one(cls, m: int) -> CyclotomicElement:
        return cls.rational(m, 1)

    @classmethod
    def rational(cls, m: int, value) -> CyclotomicElement:
        value = Fraction(value)
        nums = [0] * totient(m)
        nums[0] = value.numerator
        return cls._raw(m, nums, value.denominator)

    # accessors --------------------------------------------------------

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self._den) for x in self._nums)

    @property
    def degree_bound(self) -> int:
        return len(self._nums)

    @property
    def denominator(self) -> int:
        return self._den

    def numerators_over(self, den: int) -> tuple[int, ...]:
        """Coefficients times ``den`` as integers; ``den`` must be a multiple of the denominator."""
        f, r = divmod(den, self._den)
        if r:
            raise ValueError(f"{den} is not a multiple of the denominator {self._den}")
        return tuple(x * f for x in self._nums)

    def is_zero(self) -> bool:
        return not any(self._nums)

    def __eq__(self, other) -> bool:
        if isinstance(other, CyclotomicElement):
            return self.m == other.m and self._den == other._den and self._nums == other._nums
        if isinstance(other, (int, Fraction)):
            r = self.as_rational()
            return r is not None and r == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            r = self.as_rational()
            self._hash = hash(r) if r is not None else hash((self.m, self._nums, self._den))
        return self._hash

    def key(self) -> tuple:
        """Hashable canonical key (conductor, numerators, denominator)."""
        return (self.m, self._nums, self._den)

    # arithmetic -------------------------------------------------------

    def _check(self, other: CyclotomicElement) -> None:
        if self.m != other.m:
            raise ConductorMismatch(f"conductors differ: {self.m} vs {other.m}")

    def _lift(self, other) -> CyclotomicElement:
        if isinstance(other, CyclotomicElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement.rational(self.m, other)
        return NotImplemented

    def __add__(self, other) -> CyclotomicElement:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        den = self._den * other._den // math.gcd(self._den, other._den)
        fa, fb = den // self._den, den // other._den
        return CyclotomicElement._raw(
            self.m, [x * fa + y * fb for x, y in zip(self._nums, other._nums)], den
        )

    __radd__ = __add__

    def __neg__(self) -> CyclotomicElement:
        return CyclotomicElement._raw(self.m, [-x for x in self._nums], self._den)

    def __sub__(self, other) -> CyclotomicElement:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> CyclotomicElement:
        return (-self) + other

    def __mul__(self, other) -> CyclotomicElement:
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return CyclotomicElement._raw(
                self.m, [x * other.numerator for x in self._nums], self._den * other.denominator
            )
        if not isinstance(other, CyclotomicElement):
            return NotImplemented
        self._check(other)
        a, b = self._nums, other._nums
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return CyclotomicElement._raw(self.m, _reduce_ints(prod, self.m), self._den * other._den)

    __rmul__ = __mul__

    def inverse(self) -> CyclotomicElement:
        return invert(self)

    def __truediv__(self, other) -> CyclotomicElement:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(zeta)")
            return self * (1 / Fraction(other))
        return self * invert(self._lift(other))

    def __rtruediv__(self, other) -> CyclotomicElement:
        return invert(self) * other

    def __pow__(self, e: int) -> CyclotomicElement:
        if e < 0:
            return invert(self) ** (-e)
        result = CyclotomicElement.one(self.m)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # conversions ------------------------------------------------------

    def as_rational(self) -> Fraction | None:
        if any(self._nums[1:]):
            return None
        return Fraction(self._nums[0], self._den)

    def __complex__(self) -> complex:
        z = complex(math.cos(2 * math.pi / self.m), math.sin(2 * math.pi / self.m))
        return sum((c / self._den) * z**i for i, c in enumerate(self._nums))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            terms.append(str(c) if not mono else f"{c}*{mono}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} (mod Phi_{self.m})"

    def __repr__(self) -> str:
        return f"CyclotomicElement({self.m}, {list(map(str, self.coeffs))})"


# free functions mirroring the operator surface ---------------------------


def root_power(m: int, k: int) -> CyclotomicElement:
    """zeta_m ** k in canonical form (k is taken mod m)."""
    return CyclotomicElement._raw(m, _power_table(m)[k % m])


def zeta(m: int) -> CyclotomicElement:
    return root_power(m, 1)


def add(x: CyclotomicElement, y: CyclotomicElement) -> CyclotomicElement:
    x._check(y)
    return x + y


def sub(x: CyclotomicElement, y: CyclotomicElement) -> CyclotomicElement:
    x._check(y)
    return x - y


def mul(x: CyclotomicElement, y: CyclotomicElement) -> CyclotomicElement:
    x._check(y)
    return x * y


def neg(x: CyclotomicElement) -> CyclotomicElement:
    return -x


def _frac_poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _frac_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    if len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, d in enumerate(b):
                a[i + j] -= c * d
    return q, _frac_poly_trim(a[: len(b) - 1])


def _frac_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _frac_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _frac_poly_trim([x - y for x, y in zip(a, b)])


def invert(x: CyclotomicElement) -> CyclotomicElement:
    """Multiplicative inverse via the extended Euclidean algorithm against Phi_m."""
    if x.is_zero():
        raise ZeroDivisionError("zero has no inverse in Q(zeta)")
    f = _frac_poly_trim([Fraction(c) for c in cyclotomic_polynomial(x.m)])
    g = _frac_poly_trim(list(x.coeffs))
    # invariant: s*g == r (mod f)
    r0, r1 = f, g
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _frac_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _frac_sub(s0, _frac_mul(q, s1))
    if not r1:
        raise ZeroDivisionError("element shares a factor with Phi_m")  # pragma: no cover
    c = r1[0]
    return CyclotomicElement(x.m, [s / c for s in s1])


def galois_substitute(x: CyclotomicElement, k: int) -> CyclotomicElement:
    """Apply the automorphism zeta -> zeta**k (k must be a unit mod m)."""
    m = x.m
    if math.gcd(k, m) != 1:
        raise ValueError(f"{k} is not prime to {m}; zeta -> zeta^{k} is not an automorphism")
    table = _power_table(m)
    nums = [0] * totient(m)
    for i, c in enumerate(x._nums):
        if c:
            for j, v in enumerate(table[(i * k) % m]):
                if v:
                    nums[j] += c * v
    return CyclotomicElement._raw(m, nums, x._den)


def embed(x: CyclotomicElement, big_m: int) -> CyclotomicElement:
    """View x in Q(zeta_big_m) through zeta_m = zeta_big_m ** (big_m / m)."""
    m = x.m
    if big_m % m:
        raise ConductorMismatch(f"Q(zeta_{m}) is not a subfield of Q(zeta_{big_m})")
    if big_m == m:
        return x
    step = big_m // m
    table = _power_table(big_m)
    nums = [0] * totient(big_m)
    for i, c in enumerate(x._nums):
        if c:
            for j, v in enumerate(table[(i * step) % big_m]):
                if v:
                    nums[j] += c * v
    return CyclotomicElement._raw(big_m, nums, x._den)


def as_rational_integer(x: CyclotomicElement) -> int | None:
    r = x.as_rational()
    if r is None or r.denominator != 1:
        return None
    return r.numerator


def lemma_inverse(m: int, a: int) -> CyclotomicElement:
    """(zeta^a - 1)^{-1} from the closed product formula -(1/m) prod_{i != a} (1 - zeta^i)."""
    a %= m
    if a == 0:
        raise ZeroDivisionError("zeta^0 - 1 = 0")
    acc = CyclotomicElement.one(m)
    for i in range(1, m):
        if i != a:
            acc = acc * (1 - root_power(m, i))
    return acc * Fraction(-1, m)
