"""Fixed point data bookkeeping for linear models, blow-ups and handle attachments."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cyclotomic import CyclotomicElement
from .gsignature import defect_term


class DegenerateData(ValueError):
    pass


@dataclass(frozen=True)
class DataList:
    """Ordered fixed point data (a, b) mod m."""

    m: int
    points: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pts = tuple((a % self.m, b % self.m) for a, b in self.points)
        for a, b in pts:
            if a == 0 or b == 0:
                raise DegenerateData(f"pair ({a}, {b}) has a zero entry mod {self.m}")
            if math.gcd(a, b, self.m) != 1:
                raise DegenerateData(f"pair ({a}, {b}) is not effective mod {self.m}")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def defect_sum(self) -> CyclotomicElement:
        total = CyclotomicElement.zero(self.m)
        for a, b in self.points:
            total = total + defect_term(self.m, a, b)
        return total


def linear_cp2_data(m: int, a: int, b: int) -> DataList:
    """Fixed points of T[x,y,z] = [z^a x, z^b y, z] on CP^2 when a != b mod m."""
    if m % 2 == 0:
        raise ValueError(f"m must be odd, got {m}")
    if (a - b) % m == 0:
        raise DegenerateData(
            f"a = b mod {m}: the action fixes a 2-sphere; model it with a sphere orbit instead"
        )
    if math.gcd(a, b, m) != 1:
        raise DegenerateData(f"gcd({a}, {b}, {m}) != 1, the action is not effective")
    return DataList(m, ((a, b), (a - b, -b), (b - a, -a)))


def linear_s4_data(m: int, a: int, b: int) -> DataList:
    """The two poles of T(x, y, t) = (z^a x, z^b y, t) on S^4, as (a, b), (-a, b)."""
    return DataList(m, ((a, b), (-a, b)))


def blow_up(data: DataList, index: int) -> DataList:
    """Equivariant connected sum with a linear CP^2 at the point ``data.points[index]``.

    The point (u, v) is replaced by (u+v, v) and (-u-v, -u), appended at the end.
    """
    m = data.m
    if not -len(data) <= index < len(data):
        raise IndexError(f"no point at index {index}")
    pts = list(data.points)
    u, v = pts.pop(index)
    new = [((u + v) % m, v % m), ((-u - v) % m, (-u) % m)]
    for a, b in new:
        if a == 0 or b == 0:
            raise DegenerateData(f"blowing up ({u}, {v}) mod {m} creates the degenerate pair ({a}, {b})")
    return DataList(m, tuple(pts + new))


def _inverse(x: int, m: int) -> int:
    try:
        return pow(x, -1, m)
    except ValueError:
        raise ValueError(f"{x} is not invertible mod {m}") from None


def equivariant_linking(m: int, a: int, b: int, x: int, y: int) -> int:
    """Linking number mod m of invariant curves rotated by x and y in the boundary of D^4(a, b)."""
    return (a * b * _inverse(x, m) * _inverse(y, m)) % m


def framed_handle_type(m: int, a: int, b: int, k: int, r: int) -> tuple[int, int]:
    """Local type of the action extended over a 2-handle on S_k with framing r."""
    return ((-k) % m, (-r * k + a * b * _inverse(k, m)) % m)


def framing_twist(m: int, a: int, b: int, r: int) -> tuple[int, int]:
    """Domain action (a, b - r a) making (z, w) -> (z, z^r w) equivariant."""
    return (a % m, (b - r * a) % m)


def is_degenerate(pair: tuple[int, int], m: int) -> bool:
    return pair[0] % m == 0 or pair[1] % m == 0


def solve_framing(m: int, a: int, b: int, k: int, target: tuple[int, int]) -> list[int]:
    """All framings r mod m for which the handle on S_k has local type ``target``."""
    return [r for r in range(m) if framed_handle_type(m, a, b, k, r) == (target[0] % m, target[1] % m)]
