"""Exhaustive searches: defect-sum solutions, candidate fixed point data, linking matrices."""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

from sympy import factorint, isprime

from .cyclotomic import CyclotomicElement
from .gsignature import ActionData, IsolatedOrbit, PermutationType, verify_action_data
from .groupring import (
    GroupRingElement,
    GroupRingMatrix,
    character_norm_product,
    det_2x2,
    regular_expand,
    symmetric_element,
)
from .lattice import IntSymMatrix, determinant, is_positive_definite, norm_one_split, reduce_to_diagonal
from .numtheory import DefectDataset, _add, _sub, _ValueTable, defect_sum, units
from .report import map_partitions


def canonical_pair(a: int, b: int, m: int) -> tuple[int, int]:
    """Least of (a,b), (b,a), (-a,-b), (-b,-a) mod m; all four give the same defect term."""
    a, b = a % m, b % m
    return min((a, b), (b, a), ((-a) % m, (-b) % m), ((-b) % m, (-a) % m))


def pair_classes(residues: Sequence[int], m: int) -> list[tuple[int, int]]:
    return sorted({canonical_pair(a, b, m) for a in residues for b in residues})


def _multisets_with_sum(
    table: _ValueTable, size: int, target: tuple[int, ...]
) -> Iterator[tuple[int, ...]]:
    # non-decreasing index tuples of ``size`` whose vectors sum to ``target``;
    # the last index is found by lookup instead of enumeration
    by_value: dict[tuple, list[int]] = defaultdict(list)
    for i, v in enumerate(table.vecs):
        by_value[v].append(i)
    count = len(table.vecs)
    if size == 0:
        if all(x == 0 for x in target):
            yield ()
        return

    def rec(prefix: tuple[int, ...], acc: tuple[int, ...]):
        if len(prefix) == size - 1:
            start = prefix[-1] if prefix else 0
            for i in by_value.get(_sub(target, acc), ()):
                if i >= start:
                    yield prefix + (i,)
            return
        start = prefix[-1] if prefix else 0
        for i in range(start, count):
            yield from rec(prefix + (i,), _add(acc, table.vecs[i]))

    yield from rec((), (0,) * len(target))


# defect-sum solutions ----------------------------------------------------------


def search_defect_solution(p: int, s: int) -> list[tuple[tuple[int, int], ...]]:
    """All multisets of s pair classes mod p whose defect sum equals s.

    Pairs are taken up to (a,b) ~ (b,a) ~ (-a,-b); each multiset is listed
    once, as a sorted tuple of canonical pairs.
    """
    if p < 3 or not isprime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if s < 1:
        raise ValueError("s must be positive")
    classes = pair_classes(range(1, p), p)
    table = _ValueTable(p, classes)
    out = []
    for combo in _multisets_with_sum(table, s, table.target(s)):
        terms = tuple(classes[i] for i in combo)
        if defect_sum(DefectDataset(p, terms)) != s:
            raise AssertionError(f"lookup produced a non-solution {terms}")  # pragma: no cover
        out.append(terms)
    return out


# fixed point data for C_{p^2} --------------------------------------------------


def _split_perm(perm: PermutationType, p: int) -> tuple[int, int, int]:
    r = s = t = 0
    for c in perm.cycles:
        if c == 1:
            t += 1
        elif c == p:
            s += 1
        elif c == p * p:
            r += 1
        else:
            raise ValueError(f"cycle length {c} is not 1, {p} or {p * p}")
    return r, s, t


def search_fixed_point_data(m: int, perm: PermutationType, modulo_generator: bool = False) -> list[ActionData]:
    """Pseudofree candidate data for C_m, m = p^2, with homology permutation type ``perm``.

    Lefschetz forces t + 2 global fixed points and s orbits of size p.
    Fixed points are unit pairs mod m summing to t at zeta_m; orbit data
    are pairs mod p.  The G-signature for T^p then reads
    F + p O = t + p s, with F the fixed-point sum re-evaluated at zeta_p,
    which matches the two halves by value.  Other powers are Galois
    conjugates of T or T^p and hold automatically; every match is still
    re-verified at all powers.
    """
    f = factorint(m)
    if len(f) != 1 or list(f.values())[0] != 2:
        raise ValueError(f"m must be the square of a prime, got {m}")
    p = list(f)[0]
    r, s, t = _split_perm(perm, p)
    n_fixed = t + 2

    fixed_classes = pair_classes(units(m), m)
    fixed_table = _ValueTable(m, fixed_classes)
    fixed_solutions = list(_multisets_with_sum(fixed_table, n_fixed, fixed_table.target(t)))

    orbit_classes = pair_classes(range(1, p), p)
    orbit_table = _ValueTable(p, orbit_classes)
    orbits_by_value: dict[tuple, list[tuple[int, ...]]] = defaultdict(list)
    for combo in itertools.combinations_with_replacement(range(len(orbit_classes)), s):
        acc = (0,) * orbit_table.dim
        for i in combo:
            acc = _add(acc, orbit_table.vecs[i])
        orbits_by_value[acc].append(combo)

    results = []
    seen = set()
    for combo in fixed_solutions:
        fixed_terms = tuple(fixed_classes[i] for i in combo)
        at_p = defect_sum(DefectDataset(m, fixed_terms), p)
        needed = (CyclotomicElement.rational(p, t + p * s) - at_p) / p
        if orbit_table.den % needed.denominator:
            continue
        key = needed.numerators_over(orbit_table.den)
        for orbit_combo in orbits_by_value.get(key, ()):
            orbit_terms = tuple(orbit_classes[i] for i in orbit_combo)
            if modulo_generator:
                canon = _generator_canonical(fixed_terms, orbit_terms, m, p)
                if canon in seen:
                    continue
                seen.add(canon)
            data = ActionData(
                m,
                perm,
                tuple(IsolatedOrbit(1, pr) for pr in fixed_terms)
                + tuple(IsolatedOrbit(p, pr) for pr in orbit_terms),
            )
            if verify_action_data(data).passed:
                results.append(data)
    return results


def _generator_canonical(fixed, orbits, m, p):
    # T -> T^u rescales all rotation data by u
    best = None
    for u in units(m):
        f = tuple(sorted(canonical_pair(u * a, u * b, m) for a, b in fixed))
        o = tuple(sorted(canonical_pair(u * c, u * d, p) for c, d in orbits))
        if best is None or (f, o) < best:
            best = (f, o)
    return best


# linking matrix search -----------------------------------------------------------


ENTRY_NAMES = ("a", "b", "c")


@dataclass
class SearchConstraints:
    """Congruence template and inclusive bounds for the symmetric 2x2 linking matrix.

    Parameters are named a0..a{h}, b0..b{h}, c0..c{h} with h = n // 2 and
    n = m / q; entry a is x0 + x1 (S + S^-1) + ... with S = T^q.
    """

    m: int
    q: int
    modulus: int
    residues: dict[str, int]
    bounds: dict[str, tuple[int, int]]
    note: str = ""

    def __post_init__(self):
        if self.m % self.q:
            raise ValueError(f"q={self.q} does not divide m={self.m}")
        self.residues = {k: int(v) % self.modulus for k, v in self.residues.items()}
        self.bounds = {k: (int(v[0]), int(v[1])) for k, v in self.bounds.items()}
        for name in self.param_names:
            if name not in self.bounds:
                raise ValueError(f"no bounds for parameter {name}")
            lo, hi = self.bounds[name]
            if lo > hi:
                raise ValueError(f"empty bounds for {name}: {lo} > {hi}")

    @property
    def n(self) -> int:
        return self.m // self.q

    @property
    def param_names(self) -> list[str]:
        h = self.n // 2
        return [f"{e}{i}" for e in ENTRY_NAMES for i in range(h + 1)]

    def entry_names(self, entry: str) -> list[str]:
        return [f"{entry}{i}" for i in range(self.n // 2 + 1)]

    def values(self, name: str) -> list[int]:
        lo, hi = self.bounds[name]
        if name not in self.residues:
            return list(range(lo, hi + 1))
        res = self.residues[name]
        first = lo + ((res - lo) % self.modulus)
        return list(range(first, hi + 1, self.modulus))

    def admits(self, name: str, value: int) -> bool:
        lo, hi = self.bounds[name]
        if not lo <= value <= hi:
            return False
        return name not in self.residues or value % self.modulus == self.residues[name]

    def space_size(self) -> int:
        return math.prod(len(self.values(n)) for n in self.param_names)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "q": self.q,
            "modulus": self.modulus,
            "residues": dict(sorted(self.residues.items())),
            "bounds": {k: list(v) for k, v in sorted(self.bounds.items())},
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> SearchConstraints:
        return cls(
            m=int(doc["m"]),
            q=int(doc["q"]),
            modulus=int(doc["modulus"]),
            residues=dict(doc["residues"]),
            bounds={k: tuple(v) for k, v in doc["bounds"].items()},
            note=doc.get("note", ""),
        )

    @classmethod
    def load(cls, path: str | Path) -> SearchConstraints:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def with_bounds(self, bounds: dict[str, tuple[int, int]]) -> SearchConstraints:
        return SearchConstraints(self.m, self.q, self.modulus, dict(self.residues), {**self.bounds, **bounds}, self.note)


def residues_from_template(template: GroupRingMatrix, q: int, modulus: int) -> dict[str, int]:
    """Read the congruence residues off a 2x2 linking matrix known mod ``modulus``."""
    if template.shape != (2, 2):
        raise ValueError("template must be 2x2")
    n = template.m // q
    entries = {"a": template.rows[0][0], "b": template.rows[0][1], "c": template.rows[1][1]}
    out = {}
    for name, x in entries.items():
        sub = x.restrict(q)
        for i in range(n // 2 + 1):
            out[f"{name}{i}"] = sub.coeffs[i] % modulus
    return out


@dataclass
class Candidate:
    params: dict[str, int]
    group_ring_det: str
    integer_det: int
    positive_definite: bool
    split: list[list[int]] | None = field(default=None, repr=False)

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(self.params[k] for k in sorted(self.params, key=_param_order))

    def to_dict(self) -> dict:
        return {
            "params": {k: self.params[k] for k in sorted(self.params, key=_param_order)},
            "group_ring_det": self.group_ring_det,
            "integer_det": self.integer_det,
            "positive_definite": self.positive_definite,
            "standard": self.split is not None,
        }


def _param_order(name: str) -> tuple[int, int]:
    return ENTRY_NAMES.index(name[0]), int(name[1:])


def linking_matrix(constraints: SearchConstraints, params: dict[str, int]) -> GroupRingMatrix:
    n, m, q = constraints.n, constraints.m, constraints.q
    a, b, c = (
        symmetric_element(n, [params[k] for k in constraints.entry_names(e)], m, q) for e in ENTRY_NAMES
    )
    return GroupRingMatrix(m, ((a, b), (b, c)))


def certify(constraints: SearchConstraints, params: dict[str, int]) -> Candidate | None:
    """Full certification without any pruning shortcuts."""
    mat = linking_matrix(constraints, params)
    det = det_2x2(mat)
    if not det.is_one():
        return None
    gram = regular_expand(mat, constraints.q)
    if determinant(gram) != 1 or not is_positive_definite(gram):
        return None
    split = norm_one_split(gram)
    if split is None:
        return None
    return Candidate(dict(params), str(det), 1, True, split)


def recertify(constraints: SearchConstraints, params: dict[str, int]) -> dict:
    """Independent check of an emitted tuple using only the integer Gram matrix.

    A unimodular U with U^T G U = I is taken from the greedy reduction when
    it reaches the identity, otherwise from the norm-1 vectors; either way
    the product is recomputed here.
    """
    gram = regular_expand(linking_matrix(constraints, params), constraints.q)
    det = determinant(gram)
    definite = is_positive_definite(gram)
    red = reduce_to_diagonal(gram)
    if red.is_identity:
        u, source = red.transform, "reduction"
    elif definite and det == 1:
        u, source = norm_one_split(gram), "norm_one"
    else:
        u, source = None, None
    ok = u is not None and gram.congruent(u) == IntSymMatrix.identity(gram.n)
    return {
        "params": {k: params[k] for k in sorted(params, key=_param_order)},
        "det": det,
        "positive_definite": definite,
        "reduction_ops": red.op_count,
        "reduces_to_identity": red.is_identity,
        "reduction_stalled": red.stalled,
        "transform_source": source,
        "certified": ok and det == 1 and definite,
    }


def _circulant_inverse(x: GroupRingElement) -> tuple[list[int], int] | None:
    # integer vector y and denominator D with x * (y / D) = 1 in Q[C_n]
    n = x.m
    mat = [[Fraction(x.coeffs[(r - c) % n]) for c in range(n)] + [Fraction(int(r == 0))] for r in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if mat[r][col] != 0), None)
        if piv is None:
            return None
        mat[col], mat[piv] = mat[piv], mat[col]
        pv = mat[col][col]
        mat[col] = [v / pv for v in mat[col]]
        for r in range(n):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
    sol = [mat[r][n] for r in range(n)]
    den = math.lcm(*(v.denominator for v in sol))
    return [int(v * den) for v in sol], den


def _conv(x: Sequence[int], y: Sequence[int]) -> list[int]:
    n = len(x)
    out = [0] * n
    for i, a in enumerate(x):
        if a:
            for j, b in enumerate(y):
                if b:
                    out[(i + j) % n] += a * b
    return out


def _sym_coeffs(n: int, params: Sequence[int]) -> list[int]:
    c = [0] * n
    c[0] = params[0]
    for i, x in enumerate(params[1:], start=1):
        for e in {i % n, (-i) % n}:
            c[e] += x
    return c


@dataclass
class PartitionStats:
    a_values: int = 0
    a_definite: int = 0
    ab_pairs: int = 0
    c_integral: int = 0
    c_in_template: int = 0
    det_ok: int = 0
    definite: int = 0
    standard: int = 0

    def merge(self, other: PartitionStats) -> None:
        for k in self.__dataclass_fields__:
            setattr(self, k, getattr(self, k) + getattr(other, k))


def _search_block(args) -> tuple[list[Candidate], PartitionStats]:
    """One (a0, b0) block with pruning: solve C from A C - B^2 = 1, then certify."""
    constraints, a0, b0 = args
    n = constraints.n
    h = n // 2
    stats = PartitionStats()
    out: list[Candidate] = []
    a_rest = [constraints.values(f"a{i}") for i in range(1, h + 1)]
    b_rest = [constraints.values(f"b{i}") for i in range(1, h + 1)]
    b_list = [(b0,) + tail for tail in itertools.product(*b_rest)]
    rhs_list = []
    for b in b_list:
        bc = _sym_coeffs(n, b)
        sq = _conv(bc, bc)
        sq[0] += 1
        rhs_list.append(sq)
    c_names = constraints.entry_names("c")
    for tail in itertools.product(*a_rest):
        a = (a0,) + tail
        stats.a_values += 1
        ac = _sym_coeffs(n, a)
        circ = [[ac[(r - c) % n] for c in range(n)] for r in range(n)]
        if not is_positive_definite(circ):
            continue
        stats.a_definite += 1
        inv = _circulant_inverse(GroupRingElement(n, tuple(ac)))
        if inv is None:  # pragma: no cover - definite blocks are invertible
            continue
        ynum, yden = inv
        for b, rhs in zip(b_list, rhs_list):
            stats.ab_pairs += 1
            cnum = _conv(ynum, rhs)
            if any(v % yden for v in cnum):
                continue
            stats.c_integral += 1
            cvals = [v // yden for v in cnum]
            c = cvals[: h + 1]
            if not all(constraints.admits(name, v) for name, v in zip(c_names, c)):
                continue
            stats.c_in_template += 1
            params = {f"a{i}": a[i] for i in range(h + 1)}
            params.update({f"b{i}": b[i] for i in range(h + 1)})
            params.update({f"c{i}": c[i] for i in range(h + 1)})
            cand = _certify_pruned(constraints, params, stats)
            if cand is not None:
                out.append(cand)
    return out, stats


def _certify_pruned(constraints: SearchConstraints, params: dict[str, int], stats: PartitionStats) -> Candidate | None:
    mat = linking_matrix(constraints, params)
    det = det_2x2(mat)
    sub = det.restrict(constraints.q)
    # (1) integer determinant as the product of character values
    int_det = character_norm_product(sub)
    if int_det != 1 or not det.is_one():
        return None
    stats.det_ok += 1
    gram = regular_expand(mat, constraints.q)
    # (2) definiteness by leading minors
    if not is_positive_definite(gram):
        return None
    stats.definite += 1
    # (3) standardness by norm-1 vectors
    split = norm_one_split(gram)
    if split is None:
        return None
    stats.standard += 1
    if determinant(gram) != int_det:
        raise AssertionError("character product disagrees with the integer determinant")  # pragma: no cover
    return Candidate(params, str(det), int_det, True, split)


def _search_block_unpruned(args) -> tuple[list[Candidate], PartitionStats]:
    constraints, a0, b0 = args
    stats = PartitionStats()
    names = constraints.param_names
    pools = [[a0] if nm == "a0" else [b0] if nm == "b0" else constraints.values(nm) for nm in names]
    out = []
    for values in itertools.product(*pools):
        stats.ab_pairs += 1
        cand = certify(constraints, dict(zip(names, values)))
        if cand is not None:
            out.append(cand)
    stats.standard = len(out)
    return out, stats


def search_blocks(constraints: SearchConstraints) -> list[tuple[int, int]]:
    return [(a0, b0) for a0 in constraints.values("a0") for b0 in constraints.values("b0")]


def search_linking_matrix(
    constraints: SearchConstraints,
    threads: int = 1,
    prune: bool = True,
    stats: PartitionStats | None = None,
    skip_blocks: int = 0,
    on_block=None,
) -> Iterator[Candidate]:
    """Stream certified tuples in deterministic (a0, b0) block order.

    ``skip_blocks`` resumes after that many completed blocks; ``on_block``
    is called with (block_index, candidates) after each block, which is
    how the CLI writes its cursor file.
    """
    blocks = search_blocks(constraints)[skip_blocks:]
    worker = _search_block if prune else _search_block_unpruned
    jobs = [(constraints, a0, b0) for a0, b0 in blocks]
    if threads <= 1:
        results: Iterator = map(worker, jobs)
        pool = None
    else:
        from concurrent.futures import ProcessPoolExecutor

        pool = ProcessPoolExecutor(max_workers=threads)
        results = pool.map(worker, jobs, chunksize=max(1, len(jobs) // (threads * 4)))
    try:
        for idx, (cands, block_stats) in enumerate(results, start=skip_blocks):
            if stats is not None:
                stats.merge(block_stats)
            if on_block is not None:
                on_block(idx, cands)
            yield from cands
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
