"""G-signature and Lefschetz bookkeeping for candidate cyclic group actions.

Singular orbits are recorded against the generator of their isotropy
subgroup: an orbit of size q has isotropy generated by T**q, of order m/q,
and its local data are residues mod m/q for that generator.  The k-th
power T**k (with q | k) then acts at each of the q points with data
multiplied by k/q.  Every contribution to the k-th power is evaluated in
Q(zeta_{m/g}), g = gcd(k, m), which is where T**k naturally lives.
"""

from __future__ import annotations

import functools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .cyclotomic import CyclotomicElement, as_rational_integer, invert, root_power


class DegenerateRotation(ValueError):
    """A point or sphere claimed isolated lies on a fixed surface of some power."""

    def __init__(self, message: str, orbit: str | None = None, power: int | None = None):
        super().__init__(message)
        self.orbit = orbit
        self.power = power


class InvalidActionData(ValueError):
    pass


# local terms -------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _cot_factor(m: int, a: int) -> CyclotomicElement:
    # (zeta^a + 1) / (zeta^a - 1)
    w = root_power(m, a)
    return (w + 1) * invert(w - 1)


@functools.lru_cache(maxsize=None)
def defect_term(m: int, a: int, b: int) -> CyclotomicElement:
    """((z^a+1)/(z^a-1)) ((z^b+1)/(z^b-1)) at z = exp(2 pi i/m), exactly."""
    a, b = a % m, b % m
    if a == 0 or b == 0:
        raise DegenerateRotation(f"zero rotation exponent in defect term ({a}, {b}) mod {m}")
    return _cot_factor(m, a) * _cot_factor(m, b)


@functools.lru_cache(maxsize=None)
def surface_term(m: int, euler: int, e: int) -> CyclotomicElement:
    """-4 * euler * z^e / (z^e - 1)^2 at z = exp(2 pi i/m)."""
    e %= m
    if e == 0:
        raise DegenerateRotation(f"zero normal rotation mod {m}")
    w = root_power(m, e)
    inv = invert(w - 1)
    return w * inv * inv * (-4 * euler)


# data model ---------------------------------------------------------------


@dataclass(frozen=True)
class PermutationType:
    """Cycle type (p_1)(p_2)...(p_r) of the homology permutation representation."""

    cycles: tuple[int, ...]

    def __post_init__(self):
        cycles = tuple(sorted(int(c) for c in self.cycles))
        if any(c < 1 for c in cycles):
            raise InvalidActionData(f"cycle lengths must be positive: {cycles}")
        object.__setattr__(self, "cycles", cycles)

    @property
    def n(self) -> int:
        return sum(self.cycles)

    @property
    def m(self) -> int:
        return math.lcm(1, *self.cycles)

    @classmethod
    def parse(cls, text: str) -> PermutationType:
        """Parse '2(5)', '(3)+(9)', '3(9)+2(3)+1(1)' or a comma list '5,5'."""
        text = text.replace(" ", "")
        if "(" not in text:
            return cls(tuple(int(x) for x in text.split(",") if x))
        cycles: list[int] = []
        for part in text.split("+"):
            mult, _, rest = part.partition("(")
            length = int(rest.rstrip(")"))
            cycles.extend([length] * (int(mult) if mult else 1))
        return cls(tuple(cycles))

    def __str__(self) -> str:
        counts = Counter(self.cycles)
        return "+".join(
            (f"{c}({p})" if c > 1 else f"({p})") for p, c in sorted(counts.items(), reverse=True)
        )


@dataclass(frozen=True)
class IsolatedOrbit:
    q: int
    data: tuple[int, int]

    def label(self) -> str:
        return f"isolated q={self.q} data={self.data}"


@dataclass(frozen=True)
class SphereOrbit:
    q: int
    euler: int
    rot: int
    genus: int = 0

    def __post_init__(self):
        if self.genus != 0:
            raise InvalidActionData(
                "fixed surfaces of positive genus are incompatible with a permutation representation"
            )

    def label(self) -> str:
        return f"sphere q={self.q} euler={self.euler} rot={self.rot}"


@dataclass(frozen=True)
class ActionData:
    m: int
    perm: PermutationType
    isolated: tuple[IsolatedOrbit, ...] = ()
    spheres: tuple[SphereOrbit, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "isolated", tuple(self.isolated))
        object.__setattr__(self, "spheres", tuple(self.spheres))
        m = self.m
        if m < 2:
            raise InvalidActionData(f"group order must be at least 2, got {m}")
        if m % self.perm.m:
            raise InvalidActionData(f"cycle lengths {self.perm.cycles} do not divide m={m}")
        for orb in self.isolated:
            if orb.q < 1 or m % orb.q or orb.q == m:
                raise InvalidActionData(f"orbit size {orb.q} must be a proper divisor of {m}")
            mod = m // orb.q
            c, d = orb.data
            if math.gcd(c, d, mod) != 1:
                raise InvalidActionData(f"ineffective local data {orb.data} mod {mod}")
        for sph in self.spheres:
            if sph.q < 1 or m % sph.q or sph.q == m:
                raise InvalidActionData(f"orbit size {sph.q} must be a proper divisor of {m}")

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "perm": list(self.perm.cycles),
            "isolated": [{"q": o.q, "data": [o.data[0], o.data[1]]} for o in self.isolated],
            "spheres": [{"q": s.q, "euler": s.euler, "rot": s.rot} for s in self.spheres],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> ActionData:
        try:
            spheres = []
            for s in doc.get("spheres", []):
                spheres.append(SphereOrbit(int(s["q"]), int(s["euler"]), int(s["rot"]), int(s.get("genus", 0))))
            return cls(
                m=int(doc["m"]),
                perm=PermutationType(tuple(int(c) for c in doc["perm"])),
                isolated=tuple(
                    IsolatedOrbit(int(o["q"]), (int(o["data"][0]), int(o["data"][1])))
                    for o in doc.get("isolated", [])
                ),
                spheres=tuple(spheres),
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise InvalidActionData(f"malformed action data document: {exc!r}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def loads(cls, text: str) -> ActionData:
        return cls.from_dict(json.loads(text))


# formulas -----------------------------------------------------------------


def perm_trace(perm: PermutationType, k: int) -> int:
    """Number of basis vectors fixed by the k-th power."""
    return sum(p for p in perm.cycles if k % p == 0)


def g_signature(data: ActionData, k: int) -> CyclotomicElement:
    """Right-hand side of the G-signature formula for T**k, in Q(zeta_{m/gcd(k,m)})."""
    m = data.m
    if not 1 <= k < m:
        raise ValueError(f"power must satisfy 1 <= k < {m}, got {k}")
    g = math.gcd(k, m)
    field_m, mult = m // g, k // g
    total = CyclotomicElement.zero(field_m)
    for orb in data.isolated:
        if k % orb.q:
            continue
        c, d = (mult * orb.data[0]) % field_m, (mult * orb.data[1]) % field_m
        if c == 0 or d == 0:
            raise DegenerateRotation(
                f"{orb.label()} is not isolated in Fix(T^{k}): rotated data ({c}, {d}) mod {field_m}",
                orbit=orb.label(),
                power=k,
            )
        total = total + defect_term(field_m, c, d) * orb.q
    for sph in data.spheres:
        if k % sph.q:
            continue
        e = (mult * sph.rot) % field_m
        if e == 0:
            raise DegenerateRotation(
                f"{sph.label()} has trivial normal rotation under T^{k}", orbit=sph.label(), power=k
            )
        total = total + surface_term(field_m, sph.euler, e) * sph.q
    return total


def fixed_euler_characteristic(data: ActionData, k: int) -> int:
    return sum(o.q for o in data.isolated if k % o.q == 0) + sum(
        2 * s.q for s in data.spheres if k % s.q == 0
    )


@dataclass(frozen=True)
class LefschetzResult:
    power: int
    euler_char: int
    lefschetz_number: int

    @property
    def passed(self) -> bool:
        return self.euler_char == self.lefschetz_number


def lefschetz_check(data: ActionData, k: int) -> LefschetzResult:
    return LefschetzResult(k, fixed_euler_characteristic(data, k), 2 + perm_trace(data.perm, k))


@dataclass
class PowerRow:
    power: int
    signature: CyclotomicElement
    expected: int
    lefschetz: LefschetzResult

    @property
    def signature_ok(self) -> bool:
        return as_rational_integer(self.signature) == self.expected

    @property
    def passed(self) -> bool:
        return self.signature_ok and self.lefschetz.passed


@dataclass
class ActionReport:
    data: ActionData
    rows: list[PowerRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[int]:
        return [r.power for r in self.rows if not r.passed]

    def to_dict(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "powers": [
                {
                    "k": r.power,
                    "sigma": str(r.signature),
                    "trace": r.expected,
                    "chi": r.lefschetz.euler_char,
                    "lefschetz": r.lefschetz.lefschetz_number,
                    "ok": r.passed,
                }
                for r in self.rows
            ],
        }


def verify_action_data(data: ActionData, powers: Iterable[int] | None = None) -> ActionReport:
    """Check the G-signature and Lefschetz formulas at every nontrivial power.

    Non-integral or mismatched signatures are failures; degenerate rotations
    propagate as :class:`DegenerateRotation`.
    """
    report = ActionReport(data)
    for k in powers if powers is not None else range(1, data.m):
        sig = g_signature(data, k)
        report.rows.append(PowerRow(k, sig, perm_trace(data.perm, k), lefschetz_check(data, k)))
    return report
