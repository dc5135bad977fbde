"""Primitive Dirichlet characters modulo odd prime powers and their Gauss sums."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NotPrimitive, PreconditionViolated
from .modular import DLOG_TABLE_CAP, PrimePowerModulus

TWO_PI = 2.0 * np.pi


def e_rat(num, den) -> np.ndarray | complex:
    """e(num/den) = exp(2 pi i num/den) with exact integer reduction of the numerator."""
    num = np.asarray(num)
    if num.dtype.kind in "iu":
        r = np.mod(num, den).astype(np.float64) / den
    else:
        r = np.mod(num / den, 1.0)
    out = np.exp(1j * TWO_PI * r)
    return complex(out) if out.ndim == 0 else out


def e(x) -> np.ndarray | complex:
    """e(x) = exp(2 pi i x) for real x."""
    x = np.asarray(x, dtype=np.float64)
    out = np.exp(1j * TWO_PI * np.mod(x, 1.0))
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DirichletCharacter:
    """chi(g) = e(index/phi) against the fixed generator g of the modulus."""

    modulus: PrimePowerModulus
    index: int
    primitive: bool = field(init=False)

    def __post_init__(self):
        m = self.modulus
        j = self.index % m.phi
        object.__setattr__(self, "index", j)
        if m.gamma >= 2:
            prim = j % m.p != 0
        else:
            prim = j != 0
        object.__setattr__(self, "primitive", prim)

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def gamma(self) -> int:
        return self.modulus.gamma

    @property
    def q_val(self) -> int:
        return self.modulus.q_val

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, -self.index)

    @cached_property
    def _roots(self) -> np.ndarray:
        phi = self.modulus.phi
        return np.exp(1j * TWO_PI * np.arange(phi) / phi)

    @cached_property
    def table(self) -> np.ndarray | None:
        """Values chi(n) for n in [0, p**gamma), or None above the table cap."""
        m = self.modulus
        if m.q_val > DLOG_TABLE_CAP:
            return None
        logs = m.dlog_array(np.arange(m.q_val))
        vals = self._roots[(logs * self.index) % m.phi]
        vals[logs < 0] = 0.0
        return vals

    @cached_property
    def gauss(self) -> complex:
        q = self.q_val
        a = np.arange(q, dtype=np.int64)
        return complex(np.sum(self.values(a) * e_rat(a, q)))

    def __call__(self, n) -> complex | np.ndarray:
        return self.values(n)

    def values(self, n) -> complex | np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        tab = self.table
        if tab is not None:
            out = tab[np.mod(n, self.q_val)]
        else:
            logs = self.modulus.dlog_array(n)
            out = self._roots[(logs * self.index) % self.modulus.phi]
            out = np.where(logs < 0, 0.0, out)
        return complex(out) if out.ndim == 0 else out


def char_eval(chi: DirichletCharacter, n: int) -> complex:
    return complex(chi.values(n))


def enumerate_primitive(m: PrimePowerModulus) -> list[DirichletCharacter]:
    chars = [DirichletCharacter(m, j) for j in range(m.phi)]
    return [c for c in chars if c.primitive]


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum over a mod p**gamma of chi(a) e(a/p**gamma)."""
    if not chi.primitive:
        raise NotPrimitive("Gauss sum modulus identity requires a primitive character")
    return chi.gauss


def gauss_sums_all(m: PrimePowerModulus) -> tuple[np.ndarray, np.ndarray]:
    """Direct Gauss sums for every character index j, as (indices, tau values).

    Uses the generator parametrization tau_j = sum_k e(j k/phi) e(g^k/q), summed in blocks.
    """
    phi, q = m.phi, m.q_val
    powers = np.empty(phi, dtype=np.int64)
    x = 1
    for k in range(phi):
        powers[k] = x
        x = x * m.generator % q
    w = e_rat(powers, q)
    roots = np.exp(1j * TWO_PI * np.arange(phi) / phi)
    k = np.arange(phi, dtype=np.int64)
    j = np.arange(phi, dtype=np.int64)
    out = np.empty(phi, dtype=complex)
    block = max(1, 2_000_000 // phi)
    for s in range(0, phi, block):
        jj = j[s : s + block]
        out[s : s + block] = roots[(jj[:, None] * k[None, :]) % phi] @ w
    return j, out


def psi_additive(chi: DirichletCharacter, nu: int, x) -> complex | np.ndarray:
    """psi(x) = chi(1 + x p**(gamma - nu)); additive in x mod p**nu when nu <= gamma/2."""
    if not chi.primitive:
        raise NotPrimitive("psi_additive needs a primitive character")
    if not 1 <= nu <= chi.gamma:
        raise PreconditionViolated(f"need 1 <= nu <= gamma, got nu={nu}")
    x = np.asarray(x, dtype=np.int64)
    return chi.values(1 + x * chi.p ** (chi.gamma - nu))
