import cmath
import math

import pytest


def naive_e(x: float) -> complex:
    return cmath.exp(2j * math.pi * x)


def naive_char_table(q: int, p: int, g: int, j: int) -> dict[int, complex]:
    """Character values built by walking powers of g, independent of the package tables."""
    phi = q - q // p
    out = {}
    x = 1
    for k in range(phi):
        out[x] = naive_e(j * k / phi)
        x = x * g % q
    return out


@pytest.fixture(scope="session")
def delta_table():
    from twistsum.cuspforms import delta_coefficients

    return delta_coefficients(2 * 10**5)
