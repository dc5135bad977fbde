import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistsum.errors import NonInvertible, NotCoprime, UndefinedForZero
from twistsum.modular import (
    PrimePowerModulus,
    crt_combine,
    mod_inverse,
    multiplicative_order,
    ord_p,
    primes_in_interval,
    primitive_root,
)


def test_mod_inverse_examples():
    assert mod_inverse(1, 7) == 1
    assert mod_inverse(3, 7) == 5
    with pytest.raises(NonInvertible):
        mod_inverse(2, 4)


@pytest.mark.parametrize("p,gamma,expected", [(3, 1, 2), (5, 2, 2), (7, 1, 3)])
def test_primitive_root_examples(p, gamma, expected):
    m = PrimePowerModulus(p, gamma)
    assert primitive_root(m) == expected
    assert multiplicative_order(expected, p**gamma) == m.phi


def test_lifted_generator_when_least_root_fails_mod_p_squared():
    # 5 is the least primitive root mod 40487 and 5^40486 = 1 mod 40487^2, so the lift is 5 + p.
    p = 40487
    assert pow(5, p - 1, p * p) == 1
    m = PrimePowerModulus(p, 2, table_cap=0)
    assert m.generator == 5 + p
    assert multiplicative_order(m.generator, p * p) == m.phi


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
@pytest.mark.parametrize("gamma", [1, 2, 3])
def test_generator_order(p, gamma):
    m = PrimePowerModulus(p, gamma)
    assert multiplicative_order(m.generator, m.q_val) == m.phi


def test_ord_p_examples():
    assert ord_p(10, 5) == 1
    assert ord_p(49, 7) == 2
    assert ord_p(6, 5) == 0
    with pytest.raises(UndefinedForZero):
        ord_p(0, 3)


def test_crt_examples():
    assert crt_combine([(1, 3), (1, 5)]) == 1
    assert crt_combine([(2, 3), (3, 5)]) == 8
    assert crt_combine([(0, 4), (0, 9)]) == 0
    with pytest.raises(NotCoprime):
        crt_combine([(1, 6), (1, 4)])


@pytest.mark.parametrize("p,gamma", [(3, 6), (5, 4), (7, 3), (11, 2), (3, 10), (13, 4)])
def test_dlog_roundtrip_exhaustive(p, gamma):
    m = PrimePowerModulus(p, gamma)
    assert m.q_val <= 10**5 and m.dlog_table is not None
    for u in range(1, m.q_val):
        if u % p:
            assert pow(m.generator, m.dlog(u), m.q_val) == u
            assert mod_inverse(mod_inverse(u, m.q_val), m.q_val) == u


def test_bsgs_matches_table():
    big = PrimePowerModulus(3, 11)
    assert big.dlog_table is None
    small = PrimePowerModulus(3, 11, table_cap=10**6)
    for u in [2, 5, 100, 12346, 3**11 - 1]:
        assert big.dlog(u) == small.dlog(u)
        assert pow(big.generator, big.dlog(u), big.q_val) == u


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**6), st.integers(1, 10**6), st.sampled_from([2, 3, 5, 7, 11]))
def test_ord_p_additive(m, n, p):
    assert ord_p(m * n, p) == ord_p(m, p) + ord_p(n, p)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(-1000, 1000), st.sampled_from([3, 4, 5, 7, 11, 13])), min_size=1, max_size=4))
def test_crt_property(pairs):
    moduli = [m for _, m in pairs]
    if len(set(moduli)) != len(moduli) or any(math.gcd(a, b) > 1 for i, a in enumerate(moduli) for b in moduli[i + 1 :]):
        return
    x = crt_combine(pairs)
    assert 0 <= x < math.prod(moduli)
    for v, m in pairs:
        assert (x - v) % m == 0


def test_primes_in_interval():
    assert primes_in_interval(10, 30) == [11, 13, 17, 19, 23, 29]
