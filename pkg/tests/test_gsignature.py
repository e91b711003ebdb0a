from __future__ import annotations

import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from periodicmaps.cyclotomic import galois_substitute
from periodicmaps.gsignature import (
    ActionData,
    DegenerateRotation,
    InvalidActionData,
    IsolatedOrbit,
    PermutationType,
    SphereOrbit,
    defect_term,
    g_signature,
    lefschetz_check,
    perm_trace,
    surface_term,
    verify_action_data,
)
from periodicmaps.report import fixture_path


def c25():
    return ActionData.loads(fixture_path("c25_action.json").read_text())


def test_small_values():
    assert defect_term(3, 1, 1) == Fraction(-1, 3)
    assert surface_term(3, 1, 1) == Fraction(4, 3)
    assert defect_term(5, 1, 4) + defect_term(5, 2, 3) == 2


def test_zero_exponent_is_degenerate():
    with pytest.raises(DegenerateRotation):
        defect_term(9, 3, 9)
    with pytest.raises(DegenerateRotation):
        surface_term(9, 1, 0)


pairs = st.sampled_from([3, 5, 7, 9, 11, 15, 25, 27]).flatmap(
    lambda m: st.tuples(st.just(m), st.integers(1, m - 1), st.integers(1, m - 1))
)


@given(pairs)
def test_defect_matches_cotangents(t):
    # (z^a+1)/(z^a-1) = -i cot(pi a / m)
    m, a, b = t
    expected = -1 / (math.tan(math.pi * a / m) * math.tan(math.pi * b / m))
    assert cmath.isclose(complex(defect_term(m, a, b)), expected, abs_tol=1e-9)


@given(pairs)
def test_defect_symmetries(t):
    m, a, b = t
    d = defect_term(m, a, b)
    assert defect_term(m, b, a) == d
    assert defect_term(m, -a, b) == -d
    assert defect_term(m, -a, -b) == d


@given(pairs, st.integers(1, 100))
def test_defect_galois_equivariant(t, k):
    m, a, b = t
    if math.gcd(k, m) != 1:
        return
    assert galois_substitute(defect_term(m, a, b), k) == defect_term(m, k * a, k * b)


@given(pairs)
def test_cp2_triple_and_sphere(t):
    m, a, b = t
    if a == b or math.gcd(a, b, m) != 1:
        return
    assert defect_term(m, a, b) + defect_term(m, a - b, -b) + defect_term(m, b - a, -a) == 1
    if math.gcd(a, m) == 1:
        assert defect_term(m, a, a) + surface_term(m, 1, a) == 1


def test_permutation_type_parsing():
    assert PermutationType.parse("2(5)").cycles == (5, 5)
    assert PermutationType.parse("(3)+(9)").cycles == (3, 9)
    assert PermutationType.parse("5,5") == PermutationType.parse("2(5)")
    perm = PermutationType.parse("3(9)+2(3)+(1)")
    assert perm.n == 34 and perm.m == 9
    assert str(PermutationType.parse("(3)+2(5)")) == "2(5)+(3)"


def test_perm_trace():
    perm = PermutationType.parse("2(5)")
    assert perm_trace(perm, 1) == 0
    assert perm_trace(perm, 5) == 10
    assert perm_trace(perm, 25) == perm.n


def test_c25_fixture():
    data = c25()
    report = verify_action_data(data)
    assert report.passed and len(report.rows) == 24
    assert g_signature(data, 1) == 0
    assert g_signature(data, 5) == 10
    assert lefschetz_check(data, 1).euler_char == 2
    assert lefschetz_check(data, 5).euler_char == 12


def test_broken_data_fails():
    data = c25()
    bad = ActionData(data.m, data.perm, data.isolated[:1] + (IsolatedOrbit(1, (1, 2)),) + data.isolated[2:])
    report = verify_action_data(bad)
    assert not report.passed
    assert 1 in report.failures()


def test_roundtrip():
    data = c25()
    assert ActionData.loads(data.dumps()) == data
    assert ActionData.from_dict(data.to_dict()) == data


def test_validation():
    perm = PermutationType.parse("2(5)")
    with pytest.raises(InvalidActionData):
        ActionData(25, PermutationType.parse("(3)"))
    with pytest.raises(InvalidActionData):
        ActionData(25, perm, (IsolatedOrbit(25, (1, 1)),))
    with pytest.raises(InvalidActionData):
        ActionData(25, perm, (IsolatedOrbit(1, (5, 10)),))
    with pytest.raises(InvalidActionData):
        SphereOrbit(1, 1, 1, genus=1)


def test_degenerate_power_is_reported():
    # data (1, 5) mod 25 is not isolated for T^5
    data = ActionData(25, PermutationType.parse("2(5)"), (IsolatedOrbit(1, (1, 5)),))
    with pytest.raises(DegenerateRotation) as info:
        g_signature(data, 5)
    assert info.value.power == 5


def test_linear_cp2_action_with_sphere():
    # a = b fixes a sphere of self-intersection 1 plus an isolated point
    for m in (3, 5, 9):
        data = ActionData(m, PermutationType((1,)), (IsolatedOrbit(1, (1, m - 1)),), ())
        sphere = ActionData(m, PermutationType((1,)), (IsolatedOrbit(1, (1, 1)),), (SphereOrbit(1, 1, 1),))
        assert g_signature(sphere, 1) == 1
        assert lefschetz_check(sphere, 1).passed
        assert not lefschetz_check(data, 1).passed


def test_power_range():
    with pytest.raises(ValueError):
        g_signature(c25(), 25)
