"""Kloosterman sums and the two-level character sums C and E.

Brute-force routines follow the defining sums literally (up to reassociation of
finite sums); the fast routines evaluate the reciprocity-reduced closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from .characters import DirichletCharacter, e_rat, gauss_sum
from .errors import NonInvertibleInnerTerm, PreconditionViolated
from .modular import mod_inverse, ord_p, prime_factors


# ---------------------------------------------------------------------------
# Kloosterman sums


@lru_cache(maxsize=256)
def _units_and_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    if c == 1:
        return np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64)
    units = np.array([a for a in range(c) if gcd(a, c) == 1], dtype=np.int64)
    inv = np.array([pow(int(a), -1, c) for a in units], dtype=np.int64)
    return units, inv


def kloosterman(r: int, n: int, c: int) -> complex:
    """S(r, n; c) = sum over units a mod c of e((a r + a_bar n)/c)."""
    if c < 1:
        raise PreconditionViolated(f"c must be positive, got {c}")
    a, ainv = _units_and_inverses(c)
    return complex(np.sum(e_rat(a * r + ainv * n, c)))


@lru_cache(maxsize=32)
def kloosterman_table(c: int) -> np.ndarray:
    """Real matrix of S(r, n; c) for r, n in [0, c), computed as a product of phase matrices."""
    a, ainv = _units_and_inverses(c)
    idx = np.arange(c, dtype=np.int64)
    left = e_rat(np.outer(idx, a), c)
    right = e_rat(np.outer(ainv, idx), c)
    table = (left @ right).real
    table.setflags(write=False)
    return table


def _prime_power_split(c: int) -> list[int]:
    out = []
    for p in prime_factors(c):
        pe = 1
        while c % (pe * p) == 0:
            pe *= p
        out.append(pe)
    return out


def kloosterman_rows(r, c: int) -> np.ndarray:
    """S(r, n0; c) for each r in the input and every n0 in [0, c).

    Uses twisted multiplicativity S(m,n;c1 c2) = S(c2_bar m, c2_bar n; c1) S(c1_bar m, c1_bar n; c2)
    so only tables for the prime-power parts of c are needed.
    """
    r = np.atleast_1d(np.asarray(r, dtype=np.int64))
    n0 = np.arange(c, dtype=np.int64)
    out = np.ones((r.size, c))
    for ci in _prime_power_split(c):
        di = c // ci
        dbar = mod_inverse(di, ci)
        tab = kloosterman_table(ci)
        rr = (dbar * r) % ci
        nn = (dbar * n0) % ci
        out *= tab[rr[:, None], nn[None, :]]
    return out


# ---------------------------------------------------------------------------
# The character sum C(n, r, c, d) with c = p^alpha q^tau and d = p^gamma q^tau


def _check_cq(chi: DirichletCharacter, alpha: int, q: int, tau_flag: int):
    if tau_flag not in (0, 1):
        raise PreconditionViolated("tau_flag must be 0 or 1")
    if q < 1 or gcd(q, chi.p) != 1:
        raise PreconditionViolated(f"q={q} must be a positive integer coprime to p={chi.p}")
    if not 0 <= alpha <= chi.gamma:
        raise PreconditionViolated(f"alpha={alpha} outside [0, gamma]")


def _moduli(chi, alpha, q, tau_flag):
    qq = q if tau_flag else 1
    return chi.p**alpha * qq, chi.q_val * qq


def charsum_C_bruteforce(chi: DirichletCharacter, n: int, r: int, alpha: int, q: int, tau_flag: int) -> complex:
    """(1/d) sum_{b mod d} chi(b) S(b, n; c) e(r b/d) by direct double summation."""
    _check_cq(chi, alpha, q, tau_flag)
    c, d = _moduli(chi, alpha, q, tau_flag)
    b = np.arange(d, dtype=np.int64)
    a, ainv = _units_and_inverses(c)
    kl = e_rat(np.outer(b % c, a) + (ainv * n)[None, :], c).sum(axis=1)
    return complex(np.sum(chi.values(b) * kl * e_rat(r * b, d)) / d)


def charsum_C_bruteforce_all(chi: DirichletCharacter, r: int, alpha: int, q: int, tau_flag: int) -> np.ndarray:
    """Brute-force C(n) for every n in [0, c), reassociated as (1/d) (W^T E) E'^T.

    W[b0] collects chi(b) e(r b/d) over b = b0 mod c; the cost is O(d + c phi(c)).
    """
    _check_cq(chi, alpha, q, tau_flag)
    c, d = _moduli(chi, alpha, q, tau_flag)
    b = np.arange(d, dtype=np.int64)
    terms = chi.values(b) * e_rat(r * b, d)
    w = np.zeros(c, dtype=complex)
    np.add.at(w, b % c, terms)
    a, ainv = _units_and_inverses(c)
    idx = np.arange(c, dtype=np.int64)
    inner = w @ e_rat(np.outer(idx, a), c)
    return (e_rat(np.outer(ainv, idx), c).T @ inner) / d


def _reduced_a_sum(chi: DirichletCharacter, n: int, r: int, alpha: int, q: int) -> complex:
    """sum over units a mod p^alpha of chi_bar(r + a p^(gamma-alpha)) e(bar(a q) n / p^alpha)."""
    p, gamma = chi.p, chi.gamma
    pa = p**alpha
    if alpha == 0:
        return complex(np.conj(chi.values(r)))
    a, _ = _units_and_inverses(pa)
    aq_inv = np.array([pow(int(x) * q, -1, pa) for x in a], dtype=np.int64)
    vals = np.conj(chi.values(r + a * p ** (gamma - alpha)))
    return complex(np.sum(vals * e_rat(aq_inv * n, pa)))


@lru_cache(maxsize=64)
def inverse_table(m: int) -> np.ndarray:
    """inv[x] = x^{-1} mod m for units, -1 otherwise."""
    inv = np.full(m, -1, dtype=np.int64)
    a, ainv = _units_and_inverses(m)
    inv[a] = ainv
    if m == 1:
        inv[0] = 0
    return inv


def _reduced_a_sum_all(chi: DirichletCharacter, r: int, alpha: int, q: int) -> np.ndarray:
    """The a-sum of the closed form for every n in [0, p^alpha)."""
    p, gamma = chi.p, chi.gamma
    pa = p**alpha
    if alpha == 0:
        return np.array([np.conj(chi.values(r))], dtype=complex)
    a, _ = _units_and_inverses(pa)
    aq_inv = inverse_table(pa)[(a * q) % pa]
    vals = np.conj(chi.values(r + a * p ** (gamma - alpha)))
    n = np.arange(pa, dtype=np.int64)
    return vals @ e_rat(np.outer(aq_inv, n), pa)


def reduced_charsum_all(chi: DirichletCharacter, r: int, alpha: int, q: int) -> np.ndarray:
    """c^alpha(n, r, q) for every n in [0, p^alpha q)."""
    _check_cq(chi, alpha, q, 1)
    if gcd(r, q) != 1:
        raise PreconditionViolated(f"(r, q) = ({r}, {q}) must be coprime")
    p, gamma = chi.p, chi.gamma
    pa = p**alpha
    n = np.arange(pa * q, dtype=np.int64)
    out = _reduced_a_sum_all(chi, r, alpha, q)[n % pa]
    if q > 1:
        coef = (p**gamma % q) * mod_inverse(p ** (2 * alpha), q) * mod_inverse(r, q)
        out = out * e_rat(-coef * n, q)
    return out


def charsum_C_fast_all(chi: DirichletCharacter, r: int, alpha: int, q: int, tau_flag: int) -> np.ndarray:
    """charsum_C_fast for every n in one period [0, p^alpha q^tau)."""
    _check_cq(chi, alpha, q, tau_flag)
    if tau_flag == 0:
        return chi.gauss / chi.q_val * _reduced_a_sum_all(chi, r, alpha, 1)
    return complex(chi.values(q)) * chi.gauss / chi.q_val * reduced_charsum_all(chi, r, alpha, q)


def reduced_charsum(chi: DirichletCharacter, n: int, r: int, alpha: int, q: int) -> complex:
    """The normalized sum c^alpha(n, r, q): the tau=1 closed form stripped of chi(q) tau(chi)/p^gamma."""
    _check_cq(chi, alpha, q, 1)
    if gcd(r, q) != 1:
        raise PreconditionViolated(f"(r, q) = ({r}, {q}) must be coprime")
    p, gamma = chi.p, chi.gamma
    twist = 1.0 + 0j
    if q > 1:
        pinv2a = mod_inverse(p ** (2 * alpha), q)
        rinv = mod_inverse(r, q)
        twist = complex(e_rat(-(p**gamma % q) * pinv2a * rinv * n, q))
    return twist * _reduced_a_sum(chi, n, r, alpha, q)


def charsum_C_fast(chi: DirichletCharacter, n: int, r: int, alpha: int, q: int, tau_flag: int) -> complex:
    """Closed form of C(n, r, p^alpha q^tau, p^gamma q^tau) after reciprocity."""
    _check_cq(chi, alpha, q, tau_flag)
    if not chi.primitive:
        raise PreconditionViolated("closed form needs a primitive character")
    tau_chi = gauss_sum(chi)
    if tau_flag == 0:
        return tau_chi / chi.q_val * _reduced_a_sum(chi, n, r, alpha, 1)
    if gcd(r, q) != 1:
        raise PreconditionViolated(f"(r, q) = ({r}, {q}) must be coprime when tau_flag=1")
    return complex(chi.values(q)) * tau_chi / chi.q_val * reduced_charsum(chi, n, r, alpha, q)


# ---------------------------------------------------------------------------
# The sum E^alpha(n; r1, r2, q1, q2)


@dataclass(frozen=True)
class CharSumInput:
    chi: DirichletCharacter
    alpha: int
    r1: int
    r2: int
    q1: int
    q2: int
    n: int

    def __post_init__(self):
        p, gamma = self.chi.p, self.chi.gamma
        if not 0 <= self.alpha <= 2 * (gamma // 3):
            raise PreconditionViolated(f"alpha={self.alpha} exceeds 2*floor(gamma/3)={2 * (gamma // 3)}")
        if self.q1 < 1 or self.q2 < 1 or gcd(self.q1 * self.q2, p) != 1:
            raise PreconditionViolated("q1, q2 must be positive and coprime to p")
        if gcd(self.r1, self.q1) != 1 or gcd(self.r2, self.q2) != 1:
            raise PreconditionViolated("r_i must be coprime to q_i")


def q_congruence_holds(inp: CharSumInput) -> bool:
    """p^(gamma-alpha) (r2_bar q1 - r1_bar q2) + n = 0 mod q1 q2 (inverses mod q2 and q1)."""
    p, gamma, alpha = inp.chi.p, inp.chi.gamma, inp.alpha
    m = inp.q1 * inp.q2
    if m == 1:
        return True
    r2bar = mod_inverse(inp.r2, inp.q2) if inp.q2 > 1 else 0
    r1bar = mod_inverse(inp.r1, inp.q1) if inp.q1 > 1 else 0
    val = p ** (gamma - alpha) * (r2bar * inp.q1 - r1bar * inp.q2) + inp.n
    return val % m == 0


def charsum_E_bruteforce(inp: CharSumInput) -> complex:
    """(1/(p^alpha q1 q2)) sum_b c(b,r1,q1) conj(c(b,r2,q2)) e(n b/(p^alpha q1 q2))."""
    chi, alpha = inp.chi, inp.alpha
    m = chi.p**alpha * inp.q1 * inp.q2
    b = np.arange(m)
    c1 = _reduced_row(chi, inp.r1, alpha, inp.q1, m)
    c2 = _reduced_row(chi, inp.r2, alpha, inp.q2, m)
    return complex(np.sum(c1 * np.conj(c2) * e_rat(inp.n * b, m)) / m)


def _reduced_row(chi, r, alpha, q, m):
    row = reduced_charsum_all(chi, r, alpha, q)
    return np.tile(row, m // row.size)


def charsum_E_bruteforce_all(inp: CharSumInput) -> np.ndarray:
    """Brute-force E(n) for every n in [0, p^alpha q1 q2); the b-sum is an inverse DFT."""
    chi, alpha = inp.chi, inp.alpha
    m = chi.p**alpha * inp.q1 * inp.q2
    g = _reduced_row(chi, inp.r1, alpha, inp.q1, m) * np.conj(_reduced_row(chi, inp.r2, alpha, inp.q2, m))
    return np.fft.ifft(g)


def charsum_E_closed_zero(inp: CharSumInput) -> complex:
    """Exact value at n = 0 mod p^alpha (alpha >= 1), assuming the q-congruence holds."""
    chi, p, alpha = inp.chi, inp.chi.p, inp.alpha
    if inp.r1 % p == 0 or inp.r2 % p == 0:
        return 0j
    pa = p**alpha
    diff = inp.r1 * inp.q1 - inp.r2 * inp.q2
    val = complex(chi.values(mod_inverse(inp.r1, chi.q_val) * inp.r2))
    if diff % pa == 0:
        return val * p ** (alpha - 1) * (p - 1)
    if diff % (pa // p) == 0:
        return -val * p ** (alpha - 1)
    return 0j


def charsum_E_fast(inp: CharSumInput, strict: bool = True) -> complex:
    """Single a-sum closed form, gated by the congruence modulo q1 q2.

    Terms where a_bar q2 + n is not a unit mod p have no inverse. With strict=True
    such an input raises NonInvertibleInnerTerm; with strict=False those terms are
    skipped, which is what the brute-force definition produces (they contribute 0).
    """
    chi, p, gamma, alpha = inp.chi, inp.chi.p, inp.chi.gamma, inp.alpha
    if not q_congruence_holds(inp):
        return 0j
    if alpha == 0:
        return complex(np.conj(chi.values(inp.r1)) * chi.values(inp.r2))
    pa = p**alpha
    if inp.n % pa == 0:
        return charsum_E_closed_zero(inp)
    a, ainv = _units_and_inverses(pa)
    inner = (ainv * inp.q2 + inp.n) % pa
    ok = inner % p != 0
    if strict and not ok.all():
        raise NonInvertibleInnerTerm(
            f"a_bar q2 + n is divisible by p for {int((~ok).sum())} values of a (n={inp.n}, alpha={alpha})"
        )
    a, inner = a[ok], inner[ok]
    inv_inner = np.array([pow(int(x), -1, pa) for x in inner], dtype=np.int64)
    shift = p ** (gamma - alpha)
    first = np.conj(chi.values(inp.r1 + a * shift))
    second = chi.values(inp.r2 + inv_inner * inp.q1 * shift)
    return complex(np.sum(first * second))


def charsum_E_fast_all(inp: CharSumInput) -> np.ndarray:
    """charsum_E_fast (non-strict) for every n in [0, p^alpha q1 q2); inp.n is ignored."""
    chi, p, gamma, alpha = inp.chi, inp.chi.p, inp.chi.gamma, inp.alpha
    m = p**alpha * inp.q1 * inp.q2
    out = np.zeros(m, dtype=complex)
    for n in range(m):
        gated = CharSumInput(chi, alpha, inp.r1, inp.r2, inp.q1, inp.q2, n)
        if not q_congruence_holds(gated):
            continue
        if alpha == 0 or n % p**alpha == 0:
            out[n] = charsum_E_fast(gated, strict=False)
            continue
        out[n] = np.nan
    todo = np.flatnonzero(np.isnan(out.real))
    if todo.size:
        pa = p**alpha
        a, ainv = _units_and_inverses(pa)
        shift = p ** (gamma - alpha)
        first = np.conj(chi.values(inp.r1 + a * shift))
        inner = (ainv[None, :] * inp.q2 + todo[:, None]) % pa
        inv_inner = inverse_table(pa)[inner]
        second = chi.values(inp.r2 + inv_inner * inp.q1 * shift)
        second = np.where(inv_inner < 0, 0.0, second)
        out[todo] = second @ first
    return out


def charsum_E_bound(inp: CharSumInput, with_constant: bool = True) -> float:
    """Bound for |E| when n is not 0 mod p^alpha, times the count constant (2 if p does not divide n)."""
    p, alpha = inp.chi.p, inp.alpha
    if inp.n % p**alpha == 0:
        raise PreconditionViolated("bound applies only when n is not 0 mod p^alpha")
    delta = ord_p(inp.n, p)
    half_up = math.ceil(alpha / 2)
    if inp.n % p ** (alpha // 2) != 0:
        bound = float(p) ** (half_up + delta)
    else:
        bound = float(p) ** (half_up + delta / 2)
    if with_constant and delta == 0:
        bound *= 2.0
    return bound


def congruence_gate_p(inp: CharSumInput) -> bool:
    """r1 q1 = r2 q2 mod p^ord_p(n), the necessary condition for nonvanishing when n != 0 mod p^alpha."""
    p = inp.chi.p
    delta = ord_p(inp.n, p)
    return (inp.r1 * inp.q1 - inp.r2 * inp.q2) % p**delta == 0


# ---------------------------------------------------------------------------
# Helper sums of chi over arithmetic progressions


def lemma_sum_of_chi(
    chi: DirichletCharacter,
    nu: int,
    mu: int,
    u: int,
    v: int,
    w: int,
    w_prime: int = 1,
    variant: str = "full",
) -> complex:
    """The three helper sums: full a1-sum, unit a0-sum, and unit a0-sum with a quadratic term."""
    p, gamma = chi.p, chi.gamma
    if not (0 <= mu < nu and 2 * nu <= gamma):
        raise PreconditionViolated(f"need mu < nu <= gamma/2, got mu={mu}, nu={nu}, gamma={gamma}")
    if w % p == 0:
        raise PreconditionViolated("w must be coprime to p")
    pn = p**nu
    shift = p ** (gamma - nu)
    if variant == "full":
        a = np.arange(pn, dtype=np.int64)
        return complex(np.sum(chi.values(u + v * w * a * shift)))
    a = np.array([x for x in range(pn) if x % p], dtype=np.int64)
    if variant == "unit":
        return complex(np.sum(chi.values(u + v * w * a * shift)))
    if variant == "quadratic":
        if w_prime % p == 0:
            raise PreconditionViolated("w_prime must be coprime to p")
        arg = u + v * w * a * shift + w_prime * a * a * p ** (gamma - nu + mu)
        return complex(np.sum(chi.values(arg)))
    raise PreconditionViolated(f"unknown variant {variant!r}")


def lemma_sum_of_chi_closed(chi: DirichletCharacter, nu: int, mu: int, u: int, v: int, variant: str) -> complex | float:
    """Stated closed forms (values for full/unit; the modulus for quadratic)."""
    p = chi.p
    cu = complex(chi.values(u))
    pn = p**nu
    if variant == "full":
        return cu * pn if v % pn == 0 else 0j
    if variant == "unit":
        if v % pn == 0:
            return cu * p ** (nu - 1) * (p - 1)
        if v % p ** (nu - 1) == 0:
            return -cu * p ** (nu - 1)
        return 0j
    if variant == "quadratic":
        exact_mu = v != 0 and ord_p(v, p) == mu
        return float(p) ** ((nu + mu) / 2) if exact_mu else 0.0
    raise PreconditionViolated(f"unknown variant {variant!r}")
