"""Verification suites as lists of result records.

Every record is a dict {op, inputs, value_re, value_im, bound, ratio, tolerance, pass}; `ratio` is
the quantity compared against `tolerance`. Suites take a `mapper` (a map-like callable) so that
independent grid cells can run on a worker pool; results always come back in input order.
"""

from __future__ import annotations

import math
import random

import numpy as np

from .characters import DirichletCharacter, enumerate_primitive, gauss_sums_all
from .cuspforms import builtin_form, delta_coefficients
from .errors import ConfigError
from .expsums import (
    CharSumInput,
    charsum_C_bruteforce_all,
    charsum_C_fast_all,
    charsum_E_bound,
    charsum_E_bruteforce_all,
    charsum_E_closed_zero,
    charsum_E_fast_all,
    kloosterman_table,
    q_congruence_holds,
)
from .modular import PrimePowerModulus, is_prime, mod_inverse, ord_p, primes_up_to


def record(op: str, inputs: dict, value, bound: float, ratio: float, tolerance: float, ok: bool | None = None) -> dict:
    v = complex(value)
    return {
        "op": op,
        "inputs": inputs,
        "value_re": v.real,
        "value_im": v.imag,
        "bound": float(bound),
        "ratio": float(ratio),
        "tolerance": float(tolerance),
        "pass": bool(ratio <= tolerance) if ok is None else bool(ok),
    }


def form_for_weight(k: int, n_max: int):
    if k == 12:
        return builtin_form("delta", n_max)
    if k == 16:
        return builtin_form("w16", n_max)
    raise ConfigError(f"no built-in form of weight {k}; use 12 or 16")


# --- Gauss sums -----------------------------------------------------------------------------

GAUSS_GRID = [(p, g) for p in (3, 5, 7, 11) for g in (1, 2, 3, 4)]


def _gauss_cell(cell):
    p, g = cell
    bound = p ** (g / 2)
    js, taus = gauss_sums_all(PrimePowerModulus(p, g))
    prim = js % p != 0 if g >= 2 else js != 0
    return [
        record("gauss_modulus", {"p": p, "gamma": g, "j": int(j)}, t, bound, abs(abs(t) - bound), 1e-9)
        for j, t in zip(js[prim], taus[prim])
    ]


def gauss_suite(grid=GAUSS_GRID, mapper=map) -> list[dict]:
    return [r for rows in mapper(_gauss_cell, list(grid)) for r in rows]


# --- character sums C and E -------------------------------------------------------------------

CHARSUM_PRIMES = (3, 5)
CHARSUM_GAMMA_MAX = 6
CHARSUM_Q = (1, 2, 3)


def _unit(x: int, m: int) -> int:
    while math.gcd(x, m) != 1:
        x += 1
    return x


def _r_pairs(p: int, alpha: int, q1: int, q2: int, rng: random.Random, modulus: int) -> list[tuple[int, int]]:
    """r1 at random; for t = 0..alpha an r2 with r1 q1 = r2 q2 mod p^t but not mod p^(t+1); one r2 at random."""
    r1 = _unit(rng.randrange(1, modulus), p * q1)
    out = []
    for t in range(alpha + 1):
        pt, pt1 = p**t, p ** (t + 1)
        target = r1 * q1 * mod_inverse(q2, pt1) % pt1
        s = [x for x in range(1, p) if (target + pt * x) % p][rng.randrange(p - 2 if t == 0 else p - 1)]
        r2 = target + pt * s
        while math.gcd(r2, q2) != 1:
            r2 += pt1
        out.append((r1, r2))
    out.append((r1, _unit(rng.randrange(1, modulus), p * q2)))
    return out


def charsum_cells(primes=CHARSUM_PRIMES, gamma_max=CHARSUM_GAMMA_MAX, alpha_max=None, q_list=CHARSUM_Q, seed=0):
    cells = []
    for p in primes:
        for g in range(1, gamma_max + 1):
            m = PrimePowerModulus(p, g)
            prim = enumerate_primitive(m)
            rng = random.Random(f"{seed}:{p}:{g}")
            js = sorted({prim[0].index, rng.choice(prim).index})
            top = 2 * (g // 3) if alpha_max is None else min(alpha_max, 2 * (g // 3))
            qs = [q for q in q_list if math.gcd(q, p) == 1]
            for j in js:
                for alpha in range(top + 1):
                    for q1 in qs:
                        for q2 in qs:
                            for r1, r2 in _r_pairs(p, alpha, q1, q2, rng, p**g * q1 * q2):
                                cells.append((p, g, j, alpha, q1, q2, r1, r2))
    return cells


def _charsum_cell(cell):
    p, g, j, alpha, q1, q2, r1, r2 = cell
    chi = DirichletCharacter(PrimePowerModulus(p, g), j)
    inputs = {"p": p, "gamma": g, "j": j, "alpha": alpha, "q1": q1, "q2": q2, "r1": r1, "r2": r2}
    rows = []
    if q1 == q2:
        for tau in (0, 1):
            brute = charsum_C_bruteforce_all(chi, r1, alpha, q1, tau)
            fast = charsum_C_fast_all(chi, r1, alpha, q1, tau)
            d = np.abs(brute - fast)
            i = int(np.argmax(d))
            rows.append(record("charsum_C_oracle", {**inputs, "tau": tau, "n": i}, fast[i], abs(brute[i]), d[i], 1e-9))
    base = CharSumInput(chi, alpha, r1, r2, q1, q2, 0)
    brute = charsum_E_bruteforce_all(base)
    fast = charsum_E_fast_all(base)
    d = np.abs(brute - fast)
    i = int(np.argmax(d))
    rows.append(record("charsum_E_oracle", {**inputs, "n": i}, fast[i], abs(brute[i]), d[i], 1e-9))
    if alpha == 0:
        return rows
    pa = p**alpha
    worst_closed, worst_bound = None, None
    for n in range(brute.size):
        inp = CharSumInput(chi, alpha, r1, r2, q1, q2, n)
        if not q_congruence_holds(inp):
            continue
        if n % pa == 0:
            closed = charsum_E_closed_zero(inp)
            dev = abs(closed - brute[n])
            if worst_closed is None or dev > worst_closed[2]:
                worst_closed = (n, closed, dev)
        else:
            b = charsum_E_bound(inp)
            ratio = abs(brute[n]) / b
            if worst_bound is None or ratio > worst_bound[2]:
                worst_bound = (n, brute[n], ratio, b, ord_p(n, p))
    if worst_closed is not None:
        n, closed, dev = worst_closed
        rows.append(record("charsum_E_closed_zero", {**inputs, "n": n}, closed, abs(brute[n]), dev, 1e-10))
    if worst_bound is not None:
        n, val, ratio, b, delta = worst_bound
        rows.append(record("charsum_E_bound", {**inputs, "n": n, "ord_p_n": delta}, val, b, ratio, 1.0))
    return rows


def charsum_suite(primes=CHARSUM_PRIMES, gamma_max=CHARSUM_GAMMA_MAX, alpha_max=None, q_list=CHARSUM_Q, seed=0, mapper=map):
    cells = charsum_cells(primes, gamma_max, alpha_max, q_list, seed)
    return [r for rows in mapper(_charsum_cell, cells) for r in rows]


# --- Kloosterman sums ---------------------------------------------------------------------------


def _kloosterman_cell(c):
    tab = kloosterman_table(c)
    units = np.arange(1, c)
    block = np.abs(tab[np.ix_(units, units)])
    i, j = np.unravel_index(int(np.argmax(block)), block.shape)
    bound = 2 * math.sqrt(c)
    return record("kloosterman_weil", {"c": c, "r": int(units[i]), "n": int(units[j])}, tab[units[i], units[j]], bound, block[i, j] / bound, 1.0)


def kloosterman_suite(c_list=None, mapper=map) -> list[dict]:
    cs = [int(c) for c in primes_up_to(199)] if c_list is None else list(c_list)
    for c in cs:
        if not is_prime(c):
            raise ConfigError(f"Weil bound check needs prime moduli; {c} is not prime")
    return list(mapper(_kloosterman_cell, cs))


# --- Bessel delta identity ----------------------------------------------------------------------

DELTA_H, DELTA_N, DELTA_X = 31, 1e3, 1e6


def delta_grid(N: float = DELTA_N, h: int = DELTA_H, size: int = 20) -> list[int]:
    """20 points of [N, 2N] in one class mod h, so every off-diagonal entry is a nontrivial h | n - r case."""
    n0 = math.ceil(N)
    span = int((N) // h)
    return [n0 + h * ((i * span) // (size - 1)) for i in range(size)]


def delta_suite(k: int = 12, N: float = DELTA_N, h: int = DELTA_H, X: float = DELTA_X, mapper=map) -> list[dict]:
    from .delta import DeltaParams, delta_identity_eval

    params = DeltaParams(h, X, N, k)
    pts = delta_grid(N, h)

    def row(r):
        out = []
        for n in pts:
            v = delta_identity_eval(r, n, params)
            target = 1.0 if r == n else 0.0
            out.append(record("delta_matrix", {"r": r, "n": n, "h": h, "X": X, "k": k}, v, target, abs(v - target), 5e-3))
        return out

    return [r for rows in mapper(row, pts) for r in rows]


# --- Voronoi ------------------------------------------------------------------------------------

VORONOI_C = (1, 2, 3, 5)
VORONOI_WINDOWS = ((50.0, 100.0), (120.0, 300.0))


def voronoi_suite(k: int = 12, c_list=VORONOI_C, windows=VORONOI_WINDOWS, mapper=map) -> list[dict]:
    from .oscillatory import bump_weight
    from .voronoi import VoronoiInstance, voronoi_lhs, voronoi_rhs

    form = form_for_weight(k, 60000)
    cells = []
    for c in c_list:
        for a in sorted({1, max(1, c - 1)}):
            if math.gcd(a, c) == 1:
                for w in windows:
                    cells.append((c, a, w))

    def run(cell):
        c, a, (lo, hi) = cell
        inst = VoronoiInstance(form, a, c, bump_weight(lo, hi))
        lhs, rhs = voronoi_lhs(inst), voronoi_rhs(inst)
        scale = 1 + abs(lhs)
        return record("voronoi", {"k": k, "a": a, "c": c, "window": [lo, hi]}, rhs, scale, abs(lhs - rhs) / scale, 1e-6)

    return list(mapper(run, cells))


# --- Hecke / Deligne ----------------------------------------------------------------------------


def hecke_suite(n_max: int = 10**5) -> list[dict]:
    from .cuspforms import deligne_violations, divisor_counts, rankin_selberg_partial

    form = delta_coefficients(n_max)
    lam = form.lam
    rows = []
    rng = np.random.default_rng(0)
    a = rng.integers(1, 400, 5000)
    b = rng.integers(1, 250, 5000)
    ok = np.gcd(a, b) == 1
    dev = float(np.abs(lam[a[ok] * b[ok]] - lam[a[ok]] * lam[b[ok]]).max())
    rows.append(record("hecke_multiplicative", {"pairs": int(ok.sum())}, dev, 0.0, dev, 1e-10))
    worst = 0.0
    for p in (int(x) for x in primes_up_to(int(math.isqrt(n_max)))):
        pk = p
        while pk * p <= n_max:
            worst = max(worst, abs(lam[pk * p] - (lam[p] * lam[pk] - (lam[pk // p] if pk > 1 else 0.0))))
            pk *= p
    rows.append(record("hecke_recursion", {"n_max": n_max}, worst, 0.0, worst, 1e-10))
    d = divisor_counts(n_max)
    ratio = float(np.max(np.abs(lam[1:]) / d[1:]))
    rows.append(record("deligne", {"n_max": n_max, "violations": int(deligne_violations(form).size)}, ratio, 1.0, ratio, 1.0))
    for N in (10**2, 10**3, 10**4, 10**5):
        v = rankin_selberg_partial(form, N) / N
        rows.append(record("rankin_selberg", {"N": N}, v, 10.0, v, 10.0, ok=0.1 <= v <= 10))
    return rows
