import math

import numpy as np
import pytest

from twistsum.cuspforms import (
    HeckeEigenvalueTable,
    delta_coefficients,
    deligne_violations,
    divisor_counts,
    hecke_extend,
    load_table,
    rankin_selberg_partial,
    save_table,
    weight16_coefficients,
)
from twistsum.errors import MissingPrime, OutOfRange, TableValidationError


def naive_tau(n_max):
    """prod (1 - q^n)^24 by repeated schoolbook multiplication."""
    poly = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        for _ in range(24):
            for i in range(n_max, n - 1, -1):
                poly[i] -= poly[i - n]
    return [0] + poly[:n_max]


def test_delta_small_values():
    table = delta_coefficients(60)
    ref = naive_tau(60)
    for n in range(1, 61):
        assert table.lam[n] * n**5.5 == pytest.approx(ref[n], rel=1e-14)
    assert table.lam[1] == 1
    assert table.lam[2] == pytest.approx(-24 / 2**5.5)
    assert table.lam[2] == pytest.approx(-0.5303301, abs=1e-7)
    known = {3: 252, 5: 4830, 7: -16744, 11: 534612, 23: 18643272}
    for n, t in known.items():
        assert round(table.lam[n] * n**5.5) == t


def test_weight16_small_values():
    table = weight16_coefficients(40)
    assert table.k == 16
    assert round(table.lam[2] * 2**7.5) == 216
    assert round(table.lam[3] * 3**7.5) == -3348
    assert table.lam[1] == 1
    for m, n in [(2, 3), (4, 5), (3, 7)]:
        assert table.lam[m * n] == pytest.approx(table.lam[m] * table.lam[n], rel=1e-10)


def test_hecke_relation_examples(delta_table):
    lam = delta_table.lam
    assert lam[4] == pytest.approx(lam[2] ** 2 - 1, rel=1e-12)
    assert lam[6] == pytest.approx(lam[2] * lam[3], rel=1e-12)


def test_deligne_to_1e5(delta_table):
    assert deligne_violations(delta_table).size == 0
    w16 = weight16_coefficients(10**4)
    assert deligne_violations(w16).size == 0


def test_hecke_extend_full_agreement(delta_table):
    base = HeckeEigenvalueTable(12, 1, delta_table.lam[: 10**4 + 1].copy())
    ext = hecke_extend(base, 10**4)
    assert np.abs(ext.lam - base.lam).max() < 1e-10


def test_hecke_extend_missing_prime(delta_table):
    lam = delta_table.lam[:101].copy()
    lam[97] = np.nan
    with pytest.raises(MissingPrime):
        hecke_extend(HeckeEigenvalueTable(12, 1, lam), 100)
    with pytest.raises(MissingPrime):
        hecke_extend(HeckeEigenvalueTable(12, 1, delta_table.lam[:101].copy()), 50)


def test_multiplicativity_and_recursion_table(delta_table):
    lam = delta_table.lam
    n_max = 10**5
    rng = np.random.default_rng(0)
    a = rng.integers(1, 400, 5000)
    b = rng.integers(1, 250, 5000)
    ok = np.gcd(a, b) == 1
    a, b = a[ok], b[ok]
    assert np.abs(lam[a * b] - lam[a] * lam[b]).max() < 1e-10
    for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]:
        pk = p
        while pk * p * p <= n_max:
            assert lam[pk * p] == pytest.approx(lam[p] * lam[pk] - lam[pk // p], abs=1e-10)
            pk *= p


def test_rankin_selberg(delta_table):
    assert rankin_selberg_partial(delta_table, 1) == 1
    prev = 0
    for N in (10**2, 10**3, 10**4, 10**5):
        val = rankin_selberg_partial(delta_table, N)
        assert 0.1 <= val / N <= 10
        assert val >= prev
        prev = val
    with pytest.raises(OutOfRange):
        rankin_selberg_partial(delta_table, delta_table.n_max + 1)


def test_divisor_counts():
    d = divisor_counts(30)
    assert [int(x) for x in d[1:13]] == [1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]


def test_table_roundtrip_and_validation(tmp_path, delta_table):
    small = HeckeEigenvalueTable(12, 1, delta_table.lam[:200].copy(), None, "Delta")
    path = tmp_path / "delta.tsv"
    save_table(small, path)
    loaded = load_table(path)
    assert loaded.k == 12 and loaded.M == 1 and loaded.xi is None
    assert np.array_equal(loaded.lam, small.lam)

    bad = small.lam.copy()
    bad[1] = 1.1
    save_table(HeckeEigenvalueTable(12, 1, bad), path)
    with pytest.raises(TableValidationError):
        load_table(path)

    bad = small.lam.copy()
    bad[7] = 2.5
    save_table(HeckeEigenvalueTable(12, 1, bad), path)
    with pytest.raises(TableValidationError):
        load_table(path)

    path.write_text("n\tlambda\n1\t1.0\n")
    with pytest.raises(TableValidationError):
        load_table(path)


def test_complex_table_with_nebentypus(tmp_path):
    path = tmp_path / "neb.tsv"
    path.write_text("#k=3 M=7 xi=3\n1\t1\n2\t(0.5+0.5j)\n3\t-0.25j\n4\t0.1\n")
    table = load_table(path)
    assert table.M == 7 and table.xi is not None
    assert table.lam[2] == pytest.approx(0.5 + 0.5j)
    assert abs(table.xi_value(3)) == pytest.approx(1)
