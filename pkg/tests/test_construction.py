from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from periodicmaps.construction import (
    DataList,
    DegenerateData,
    blow_up,
    equivariant_linking,
    framed_handle_type,
    framing_twist,
    is_degenerate,
    linear_cp2_data,
    linear_s4_data,
    solve_framing,
)


def test_linear_cp2_examples():
    assert linear_cp2_data(5, 1, 2).points == ((1, 2), (4, 3), (1, 4))
    assert linear_cp2_data(25, 1, 24).points == ((1, 24), (2, 1), (23, 24))
    with pytest.raises(DegenerateData):
        linear_cp2_data(5, 2, 2)
    with pytest.raises(DegenerateData):
        linear_cp2_data(9, 3, 6)


def test_s4_has_no_signature():
    assert linear_s4_data(9, 1, 2).defect_sum() == 0


def test_blow_up_example():
    assert blow_up(linear_cp2_data(5, 1, 2), 1).points == ((1, 2), (1, 4), (2, 3), (3, 1))
    with pytest.raises(IndexError):
        blow_up(linear_cp2_data(5, 1, 2), 3)


cp2 = st.sampled_from([5, 7, 9, 11, 25]).flatmap(
    lambda m: st.tuples(st.just(m), st.integers(1, m - 1), st.integers(1, m - 1), st.lists(st.integers(0, 20), max_size=3))
)


@given(cp2)
def test_blow_ups_add_one_to_signature(t):
    m, a, b, picks = t
    if a == b or math.gcd(a, b, m) != 1:
        return
    data = linear_cp2_data(m, a, b)
    assert data.defect_sum() == 1
    for i, pick in enumerate(picks, start=2):
        try:
            data = blow_up(data, pick % len(data))
        except DegenerateData:
            return
        assert data.defect_sum() == i


def test_handle_examples():
    assert framed_handle_type(5, 1, 1, -1, 0) == (1, 4)
    assert solve_framing(5, 1, 1, -1, (1, 4)) == [0]
    assert solve_framing(5, 1, 1, -2, (2, 3)) == [3]
    assert equivariant_linking(25, 1, 1, -1, -2) == 13
    with pytest.raises(ValueError):
        equivariant_linking(25, 1, 1, 5, 1)


def test_framing_twist():
    assert framing_twist(25, 1, 1, 1) == (1, 0)
    assert is_degenerate(framing_twist(25, 1, 1, 1), 25)
    assert not is_degenerate((1, 4), 5)


@pytest.mark.parametrize("m", [5, 7, 9, 25])
def test_framing_shift_is_linear(m):
    # raising the framing by s moves the second coordinate by -s k
    for a in range(1, m):
        for b in range(1, m):
            for k in range(1, m):
                if math.gcd(k, m) != 1:
                    continue
                base = framed_handle_type(m, a, b, k, 0)
                for s in range(m):
                    shifted = framed_handle_type(m, a, b, k, s)
                    assert shifted[0] == base[0]
                    assert (shifted[1] - base[1]) % m == (-s * k) % m


def test_datalist_validation():
    with pytest.raises(DegenerateData):
        DataList(9, ((3, 6),))
    with pytest.raises(DegenerateData):
        DataList(9, ((0, 1),))


@pytest.mark.parametrize("m,a,b", [(7, 1, 3), (9, 2, 5), (25, 1, 7)])
def test_blow_up_second_point(m, a, b):
    data = linear_cp2_data(m, a, b)
    out = blow_up(data, 1)
    expected = DataList(m, ((a, b), (b - a, -a), (a - 2 * b, -b), (2 * b - a, b - a)))
    assert out == expected


@pytest.mark.parametrize("m", [5, 9, 25])
def test_framing_twist_inverse(m):
    for a in range(m):
        for b in range(m):
            for r in range(m):
                x, y = framing_twist(m, a, b, r)
                assert framing_twist(m, x, y, -r) == (a % m, b % m)
