from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from trigbethe.scalars import (
    Kernel,
    PoleError,
    RationalSampler,
    determinant,
    format_scalar,
    izergin,
    izergin_over_f,
    parse_scalar,
    set_product,
    to_scalar,
)

K = Kernel(mpq(5, 3))

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=30).filter(lambda x: x != 0).map(mpq)


def test_kernel_frozen_values():
    # c = 5/3 - 3/5 = 16/15; hand-evaluated at (u, v) = (2, 1)
    assert K.c == mpq(16, 15)
    assert K.f(2, 1) == mpq(41, 15)
    assert K.g(2, 1) == mpq(32, 15)
    assert K.gt(2, 1) == mpq(16, 15)
    assert K.finv(2, 1) == mpq(15, 41)
    assert K.hinv(2, 1) == mpq(32, 41)
    assert K.htinv(2, 1) == mpq(16, 41)


def test_r_matrix_coefficients():
    assert K.p(1, 1, 2, 1) == K.f(2, 1) - 1
    assert K.p(1, 2, 2, 1) == K.g(2, 1)
    assert K.p(2, 1, 2, 1) == K.gt(2, 1)


def test_poles_raise():
    with pytest.raises(PoleError):
        K.f(3, 3)
    with pytest.raises(PoleError):
        K.g(mpq(1, 2), mpq(1, 2))
    # 1/f vanishes at coinciding arguments instead of blowing up
    assert K.finv(3, 3) == 0
    assert K.hinv(3, 3) == K.c / (K.q - 1 / K.q)


@settings(max_examples=60, deadline=None)
@given(rationals, rationals)
def test_kernel_identities(u, v):
    if u == v or K.q * u == v / K.q:
        return
    assert K.f(u, v) == K.g(u, v) + 1 / K.q
    assert K.f(u, v) == K.gt(u, v) + K.q
    assert K.g(u, v) == -K.gt(v, u)
    assert K.hinv(u, v) * K.f(u, v) == K.g(u, v)
    assert K.htinv(u, v) * K.f(u, v) == K.gt(u, v)
    # the dual substitution q -> 1/q, x -> 1/x leaves f invariant and swaps g and g~
    Ki = K.inverted()
    assert Ki.f(1 / u, 1 / v) == K.f(u, v)
    assert Ki.g(1 / u, 1 / v) == K.gt(u, v)


def test_izergin_single_entry():
    x, y = mpq(2), mpq(-1, 3)
    assert izergin([x], [y], K) == K.g(x, y)
    assert izergin_over_f([x], [y], K, "K") == K.hinv(x, y)
    assert izergin_over_f([x], [y], K, "Kt") == K.htinv(x, y)


def test_izergin_over_f_regular_at_coincidence():
    xs = [mpq(2), mpq(3)]
    ys = [mpq(3), mpq(-1)]  # x_2 = y_1 makes the literal prefactor singular
    val = izergin_over_f(xs, ys, K, "K")
    assert val == val  # finite and exact


def test_izergin_over_f_matches_literal():
    S = RationalSampler(3)
    xs = S.generic(2, [], K.q)
    ys = S.generic(2, xs, K.q)
    lit = izergin(xs, ys, K) / set_product(K.f, xs, ys)
    assert izergin_over_f(xs, ys, K, "K") == lit


def test_determinant():
    assert determinant([[mpq(1), mpq(2)], [mpq(3), mpq(4)]]) == -2
    assert determinant([]) == 1


@settings(max_examples=80, deadline=None)
@given(st.fractions(max_denominator=10**6))
def test_format_roundtrip(x):
    v = to_scalar(Fraction(x))
    assert parse_scalar(format_scalar(v)) == v


def test_format_complex():
    assert format_scalar(1.5 - 2j) == [1.5, -2.0]
    assert to_scalar([1.5, -2.0]) == 1.5 - 2j
    assert format_scalar(mpq(-7, 3)) == "-7/3"


def test_to_scalar_rejects_bool():
    with pytest.raises(TypeError):
        to_scalar(True)


def test_sampler_is_deterministic_and_generic():
    a, b = RationalSampler(7), RationalSampler(7)
    assert [a.scalar() for _ in range(10)] == [b.scalar() for _ in range(10)]
    S = RationalSampler(1)
    xs = S.generic(8, [mpq(1)], K.q)
    assert len(set(xs)) == 8
    bad = {mpq(1), K.q**2, K.q**-2}
    for x in xs:
        assert x not in bad
        for y in xs:
            if x != y:
                assert x != y * K.q**2
