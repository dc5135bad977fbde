import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_char_table, naive_e
from twistsum.characters import (
    DirichletCharacter,
    char_eval,
    enumerate_primitive,
    gauss_sum,
    gauss_sums_all,
    psi_additive,
)
from twistsum.errors import NotPrimitive
from twistsum.modular import PrimePowerModulus


def test_char_eval_examples():
    m = PrimePowerModulus(3, 1)
    (chi,) = enumerate_primitive(m)
    assert char_eval(chi, 1) == pytest.approx(1)
    assert char_eval(chi, 3) == 0
    assert char_eval(chi, 2) == pytest.approx(-1)
    # orthogonality over the group
    assert abs(sum(char_eval(chi, n) for n in range(3))) < 1e-12


@pytest.mark.parametrize("p,gamma,count", [(3, 1, 1), (5, 2, 16), (7, 1, 5), (3, 3, 12)])
def test_enumerate_primitive_counts(p, gamma, count):
    chars = enumerate_primitive(PrimePowerModulus(p, gamma))
    assert len(chars) == count
    assert len({c.index for c in chars}) == count
    assert all(c.primitive for c in chars)


@pytest.mark.parametrize("p,gamma", [(3, 2), (5, 3), (7, 2), (11, 1)])
def test_values_match_independent_table(p, gamma):
    m = PrimePowerModulus(p, gamma)
    for chi in enumerate_primitive(m)[:4]:
        ref = naive_char_table(m.q_val, p, m.generator, chi.index)
        vals = chi.values(np.arange(m.q_val))
        for n in range(m.q_val):
            assert abs(vals[n] - ref.get(n, 0)) < 1e-12


@pytest.mark.parametrize("p,gamma", [(3, 7), (5, 5), (7, 4)])
def test_multiplicativity_exhaustive(p, gamma):
    m = PrimePowerModulus(p, gamma)
    assert m.q_val <= 3125 or p == 3
    chi = enumerate_primitive(m)[2]
    tab = chi.values(np.arange(m.q_val))
    a = np.arange(m.q_val)
    prod = (a[:, None] * a[None, :]) % m.q_val
    assert np.abs(tab[prod] - tab[:, None] * tab[None, :]).max() < 1e-12


def test_gauss_examples():
    (chi,) = enumerate_primitive(PrimePowerModulus(3, 1))
    assert gauss_sum(chi) == pytest.approx(1j * math.sqrt(3), abs=1e-12)
    direct = sum(char_eval(chi, a) * naive_e(a / 3) for a in range(3))
    assert gauss_sum(chi) == pytest.approx(direct, abs=1e-12)
    for chi in enumerate_primitive(PrimePowerModulus(5, 2)):
        assert abs(abs(gauss_sum(chi)) - 5) < 1e-10
    for chi in enumerate_primitive(PrimePowerModulus(7, 1)):
        assert abs(abs(gauss_sum(chi)) - math.sqrt(7)) < 1e-10


def test_gauss_rejects_imprimitive():
    m = PrimePowerModulus(5, 2)
    with pytest.raises(NotPrimitive):
        gauss_sum(DirichletCharacter(m, 5))


@pytest.mark.parametrize("p", [3, 5, 7, 11])
@pytest.mark.parametrize("gamma", [1, 2, 3, 4])
def test_gauss_modulus_all_primitive(p, gamma):
    m = PrimePowerModulus(p, gamma)
    idx, taus = gauss_sums_all(m)
    prim = np.array([DirichletCharacter(m, int(j)).primitive for j in idx])
    assert prim.sum() == len(enumerate_primitive(m))
    assert np.abs(np.abs(taus[prim]) - p ** (gamma / 2)).max() < 1e-9
    for j in idx[prim][:: max(1, prim.sum() // 5)]:
        assert abs(gauss_sum(DirichletCharacter(m, int(j))) - taus[j]) < 1e-9


@pytest.mark.parametrize("p,gamma", [(3, 3), (5, 2), (7, 2)])
def test_primitivity_criterion(p, gamma):
    m = PrimePowerModulus(p, gamma)
    step = p ** (gamma - 1)
    for j in range(m.phi):
        chi = DirichletCharacter(m, j)
        vals = chi.values(1 + step * np.arange(p))
        nontrivial = np.abs(vals - 1).max() > 1e-9
        assert nontrivial == chi.primitive


def test_psi_additive_examples():
    m = PrimePowerModulus(5, 3)
    for chi in enumerate_primitive(m)[:6]:
        assert psi_additive(chi, 1, 0) == pytest.approx(1)
        for x in range(5):
            assert psi_additive(chi, 1, x) * psi_additive(chi, 1, -x) == pytest.approx(1)
        assert abs(np.sum(psi_additive(chi, 1, np.arange(5)))) < 1e-12


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from([(3, 4, 2), (5, 4, 2), (5, 3, 1), (7, 2, 1), (3, 6, 3)]),
    st.integers(0, 10**4),
    st.integers(0, 10**4),
    st.integers(0, 10**3),
)
def test_psi_additive_property(case, x, y, j):
    p, gamma, nu = case
    m = PrimePowerModulus(p, gamma)
    chi = DirichletCharacter(m, j * p + 1)
    assert chi.primitive
    lhs = psi_additive(chi, nu, x + y)
    assert lhs == pytest.approx(psi_additive(chi, nu, x) * psi_additive(chi, nu, y), abs=1e-12)
    vals = psi_additive(chi, nu, np.arange(p**nu))
    assert np.abs(vals - 1).max() > 1e-6
    assert abs(lhs - psi_additive(chi, nu, x + y + p**nu)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10**6), st.integers(1, 10**6), st.integers(0, 10**3))
def test_multiplicativity_property(a, b, j):
    m = PrimePowerModulus(7, 3)
    chi = DirichletCharacter(m, j)
    assert chi.values(a * b) == pytest.approx(chi.values(a) * chi.values(b), abs=1e-12)
    if a % 7:
        assert abs(abs(chi.values(a)) - 1) < 1e-12
    assert cmath.isclose(chi.conj().values(a), np.conj(chi.values(a)), abs_tol=1e-12)
