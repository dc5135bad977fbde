"""Exact modular arithmetic over odd prime powers and small composites."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt

import numpy as np

from .errors import NonInvertible, NotCoprime, PreconditionViolated, UndefinedForZero

DLOG_TABLE_CAP = 10**5


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def primes_up_to(n: int) -> np.ndarray:
    """Sieve of Eratosthenes."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for d in range(2, isqrt(n) + 1):
        if sieve[d]:
            sieve[d * d :: d] = False
    return np.flatnonzero(sieve).astype(np.int64)


def primes_in_interval(lo: float, hi: float) -> list[int]:
    """Primes in the closed interval [lo, hi], found by sieving."""
    top = int(np.floor(hi))
    return [int(q) for q in primes_up_to(top) if q >= lo]


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def euler_phi(n: int) -> int:
    result = n
    for p in prime_factors(n):
        result -= result // p
    return result


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m, normalized to [0, m)."""
    if m < 1:
        raise PreconditionViolated(f"modulus must be positive, got {m}")
    if m == 1:
        return 0
    if gcd(a, m) != 1:
        raise NonInvertible(f"{a} is not invertible modulo {m}")
    return pow(a, -1, m)


def ord_p(n: int, p: int) -> int:
    """The p-adic valuation of a nonzero integer."""
    if n == 0:
        raise UndefinedForZero("ord_p(0) is undefined")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def crt_combine(residues: list[tuple[int, int]]) -> int:
    """Combine (value, modulus) pairs with pairwise coprime moduli."""
    x, m = 0, 1
    for v, mi in residues:
        if gcd(m, mi) != 1:
            raise NotCoprime(f"modulus {mi} shares a factor with {m}")
        t = ((v - x) * pow(m, -1, mi)) % mi if mi > 1 else 0
        x = x + m * t
        m *= mi
    return x % m


def _bsgs(g: int, h: int, mod: int, order: int) -> int:
    """Baby-step giant-step discrete log of h to base g."""
    s = isqrt(order) + 1
    baby = {}
    e = 1
    for j in range(s):
        baby.setdefault(e, j)
        e = e * g % mod
    step = pow(g, -s, mod)
    y = h % mod
    for i in range(s + 1):
        j = baby.get(y)
        if j is not None:
            return (i * s + j) % order
        y = y * step % mod
    raise NonInvertible(f"{h} is not a power of {g} modulo {mod}")


@dataclass(frozen=True)
class PrimePowerModulus:
    """The group of units modulo p**gamma for an odd prime p."""

    p: int
    gamma: int
    table_cap: int = DLOG_TABLE_CAP
    q_val: int = field(init=False)
    phi: int = field(init=False)
    generator: int = field(init=False)
    dlog_table: np.ndarray | None = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p, gamma = self.p, self.gamma
        if p == 2 or not is_prime(p):
            raise PreconditionViolated(f"p must be an odd prime, got {p}")
        if gamma < 1:
            raise PreconditionViolated(f"gamma must be positive, got {gamma}")
        q = p**gamma
        phi = q - q // p
        object.__setattr__(self, "q_val", q)
        object.__setattr__(self, "phi", phi)
        g = _least_primitive_root_mod_p(p)
        if gamma >= 2 and pow(g, p - 1, p * p) == 1:
            g += p
        object.__setattr__(self, "generator", g)
        table = None
        if q <= self.table_cap:
            table = np.full(q, -1, dtype=np.int64)
            powers = np.empty(phi, dtype=np.int64)
            e = 1
            for i in range(phi):
                powers[i] = e
                e = e * g % q
            table[powers] = np.arange(phi, dtype=np.int64)
        object.__setattr__(self, "dlog_table", table)

    def is_unit(self, n: int) -> bool:
        return n % self.p != 0

    def dlog(self, u: int) -> int:
        u %= self.q_val
        if u % self.p == 0:
            raise NonInvertible(f"{u} is not a unit modulo {self.q_val}")
        if self.dlog_table is not None:
            return int(self.dlog_table[u])
        return _bsgs(self.generator, u, self.q_val, self.phi)

    def dlog_array(self, n) -> np.ndarray:
        """Vectorized discrete log; non-units map to -1."""
        n = np.mod(np.asarray(n, dtype=np.int64), self.q_val)
        if self.dlog_table is not None:
            return self.dlog_table[n]
        flat = n.ravel()
        out = np.full(flat.shape, -1, dtype=np.int64)
        cache: dict[int, int] = {}
        for i, u in enumerate(flat.tolist()):
            if u % self.p:
                if u not in cache:
                    cache[u] = _bsgs(self.generator, u, self.q_val, self.phi)
                out[i] = cache[u]
        return out.reshape(n.shape)


def _least_primitive_root_mod_p(p: int) -> int:
    factors = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in factors):
            return g
    return 1  # p == 2 only, excluded upstream


def primitive_root(m: PrimePowerModulus) -> int:
    """Least primitive root mod p, lifted to generate the units mod p**gamma."""
    return m.generator


def multiplicative_order(a: int, m: int) -> int:
    if gcd(a, m) != 1:
        raise NonInvertible(f"{a} is not a unit modulo {m}")
    order = euler_phi(m)
    for f in prime_factors(order):
        while order % f == 0 and pow(a, order // f, m) == 1:
            order //= f
    return order
