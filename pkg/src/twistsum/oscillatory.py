"""Bessel functions, the canonical bump, and the oscillatory integrals built on them.

Integrals against J_nu(c sqrt x) are split with the scaled Hankel functions,

    exp(i z) J_nu(z) = (exp(2iz) hankel1e(nu, z) + hankel2e(nu, z)) / 2,

so every piece has a smooth amplitude and an explicit phase that the quadrature engine can size
its panels from. For small z, where the Hankel pieces are individually large, J is used directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import mpmath as mp
import numpy as np
from scipy import special

from .errors import DerivativeBoundViolated, OrderTooLarge, OutOfRange, PreconditionViolated
from .quadrature import OscillatoryIntegral, QuadResult, integrate

MAX_ORDER = 200
TWO_PI = 2.0 * np.pi
# A C_c^infty amplitude against a phase making this many cycles over its support integrates to
# far below double precision (the bump's Fourier transform decays like exp(-c sqrt(cycles))).
SKIP_CYCLES = 2000.0


# ----------------------------------------------------------------------------------------
# Bessel J


def _check_order(order) -> int:
    if int(order) != order or order < 0:
        raise PreconditionViolated(f"order must be a nonnegative integer, got {order}")
    if order > MAX_ORDER:
        raise OrderTooLarge(f"order {order} exceeds {MAX_ORDER}")
    return int(order)


def bessel_J(order: int, x):
    """J_order(x) for x >= 0 (scipy's AMOS-based jv)."""
    nu = _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise OutOfRange("bessel_J needs x >= 0")
    out = special.jv(nu, x)
    return float(out) if out.ndim == 0 else out


def bessel_J_series(order: int, x, dps: int | None = None) -> mp.mpf:
    """Power series sum_m (-1)^m (x/2)^(2m+nu) / (m! (m+nu)!) at working precision dps.

    The default precision grows with x to absorb the cancellation among terms of size e^x.
    """
    nu = _check_order(order)
    dps = dps or 30 + int(0.45 * float(x))
    with mp.workdps(dps):
        h = mp.mpf(x) / 2
        term = h**nu / mp.factorial(nu)
        total = term
        y = -h * h
        m = 0
        eps = mp.mpf(10) ** (-dps)
        while True:
            m += 1
            term = term * y / (m * (m + nu))
            total += term
            if m > h and abs(term) <= eps * max(abs(total), eps):
                break
        return +total


def bessel_J_asymptotic(order: int, x, terms: int = 12, dps: int = 40):
    """Hankel's expansion sqrt(2/(pi x)) (P cos w - Q sin w), w = x - nu pi/2 - pi/4.

    Returns (value, size of the first omitted term relative to 1).
    """
    nu = _check_order(order)
    with mp.workdps(dps):
        x = mp.mpf(x)
        mu = 4 * mp.mpf(nu) ** 2
        a = [mp.mpf(1)]
        for k in range(1, 2 * terms + 2):
            a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8))
        P = sum((-1) ** j * a[2 * j] / x ** (2 * j) for j in range(terms))
        Q = sum((-1) ** j * a[2 * j + 1] / x ** (2 * j + 1) for j in range(terms))
        w = x - nu * mp.pi / 2 - mp.pi / 4
        val = mp.sqrt(2 / (mp.pi * x)) * (P * mp.cos(w) - Q * mp.sin(w))
        tail = abs(a[2 * terms]) / x ** (2 * terms)
        return +val, float(tail)


def bessel_J_reference(order: int, x) -> float:
    """Independent extended-precision J: series for x <= max(30, 2 order), else Hankel's expansion
    with at least 10 terms when it has converged to 1e-20, else the series at raised precision."""
    nu = _check_order(order)
    if x <= max(30.0, 2.0 * nu):
        return float(bessel_J_series(nu, x))
    for terms in (10, 14, 20):
        val, tail = bessel_J_asymptotic(nu, x, terms)
        if tail < 1e-20:
            return float(val)
    return float(bessel_J_series(nu, x))


# ----------------------------------------------------------------------------------------
# Weights


def bump(u):
    """Canonical bump U(u) = exp(4 - 1/((u-1)(2-u))) on (1, 2), zero elsewhere; U(3/2) = 1."""
    u = np.asarray(u, dtype=float)
    t = (u - 1.0) * (2.0 - u)
    inside = t > 0
    out = np.zeros_like(u)
    out[inside] = np.exp(4.0 - 1.0 / t[inside])
    return float(out) if out.ndim == 0 else out


def bump_derivative(u):
    u = np.asarray(u, dtype=float)
    t = (u - 1.0) * (2.0 - u)
    inside = t > 0
    out = np.zeros_like(u)
    ti = t[inside]
    out[inside] = np.exp(4.0 - 1.0 / ti) * (3.0 - 2.0 * u[inside]) / ti**2
    return out


@lru_cache(maxsize=None)
def bump_mellin(s: float) -> float:
    """U~(s) = int_1^2 U(u) u^(s-1) du."""
    spec = OscillatoryIntegral(lambda u: bump(u) * u ** (s - 1.0), None, None, (1.0, 2.0), rel_tol=1e-14)
    return integrate(spec).value.real


def U_tilde_34() -> float:
    return bump_mellin(0.75)


@dataclass(frozen=True)
class SmoothWeight:
    """A weight function with known support.

    compact: vanishes with all derivatives at both ends of the support (true for bumps), which
    licenses dropping pieces whose phase makes more than SKIP_CYCLES cycles.
    """

    func: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    compact: bool = True
    real: bool = True
    scale: float = 0.0  # shortest length over which the weight varies; 0 means the support width

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def combine(self, alpha, other: "SmoothWeight", beta) -> "SmoothWeight":
        """alpha*self + beta*other."""
        lo = min(self.support[0], other.support[0])
        hi = max(self.support[1], other.support[1])
        f, g = self.func, other.func
        real = self.real and other.real and np.isrealobj(alpha) and np.isrealobj(beta)
        scales = [s for s in (self.scale, other.scale) if s > 0]
        return SmoothWeight(
            lambda x: alpha * f(x) + beta * g(x),
            (lo, hi),
            self.compact and other.compact,
            real,
            min(scales) if scales else 0.0,
        )


def bump_weight(lo: float, hi: float, height: float = 1.0) -> SmoothWeight:
    """height * U(1 + (x - lo)/(hi - lo)), supported on [lo, hi]."""
    w = hi - lo
    return SmoothWeight(lambda x: height * bump(1.0 + (x - lo) / w), (lo, hi))


CANONICAL_BUMP = bump_weight(1.0, 2.0)


def smooth_step(t):
    """s(t) = psi(t)/(psi(t)+psi(1-t)), psi(t) = exp(-1/t): 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def plateau_weight(delta: float) -> SmoothWeight:
    """V(x) = s(delta (x-1)) s(delta (2-x)): equal to 1 on [1+1/delta, 2-1/delta], V^(j) << delta^j."""
    if delta < 2:
        raise OutOfRange("plateau weight needs delta >= 2")
    return SmoothWeight(
        lambda x: smooth_step(delta * (x - 1.0)) * smooth_step(delta * (2.0 - x)),
        (1.0, 2.0),
        scale=1.0 / delta,
    )


# ----------------------------------------------------------------------------------------
# Integrals against J_nu(cb sqrt x) exp(i ca sqrt x)


def _frequency_groups(freq: np.ndarray) -> list[np.ndarray]:
    """Index groups of rows with comparable frequencies, so shared panels are not wasted."""
    order = np.argsort(freq, kind="stable")
    groups, cur, base = [], [], None
    for i in order:
        f = freq[i]
        if cur and f > 2.0 * base + 8.0:
            groups.append(np.array(cur))
            cur = []
        if not cur:
            base = f
        cur.append(i)
    if cur:
        groups.append(np.array(cur))
    return groups


def _panel_cap(w: SmoothWeight) -> float | None:
    lo, hi = w.support
    return min((hi - lo) / 4, 2.0 * w.scale) if w.scale > 0 else None


def bessel_kernel_integral(
    w: SmoothWeight,
    ca,
    cb,
    nu: int,
    rel_tol: float = 1e-10,
    abs_tol: float = 0.0,
    max_panels: int = 2**20,
):
    """int w(x) exp(i ca sqrt x) J_nu(cb sqrt x) dx over the support of w.

    ca, cb broadcast to a common shape; each entry is one integral, evaluated in batches.
    """
    _check_order(nu)
    ca_a, cb_a = np.broadcast_arrays(np.asarray(ca, dtype=float), np.asarray(cb, dtype=float))
    shape = ca_a.shape
    ca_a, cb_a = ca_a.ravel(), cb_a.ravel()
    lo, hi = w.support
    if lo < 0:
        raise PreconditionViolated("weight must be supported in [0, inf)")
    span = np.sqrt(hi) - np.sqrt(lo)
    out = np.zeros(ca_a.size, dtype=complex)
    z_split = max(2.0 * nu, 25.0)
    direct = cb_a * np.sqrt(max(lo, 0.0)) < z_split
    cap = _panel_cap(w)

    def run(rows, amp, ph, dph, afreq):
        spec = OscillatoryIntegral(
            amp, ph, dph, (lo, hi), rel_tol=rel_tol, abs_tol=abs_tol, max_panels=max_panels,
            amplitude_frequency=afreq, panel_cap=cap, check_phase=False,
        )
        r = integrate(spec)
        return np.atleast_1d(r.value)

    idx = np.flatnonzero(direct)
    if idx.size:
        freq = (np.abs(ca_a[idx]) + cb_a[idx]) * span
        for g in _frequency_groups(freq):
            rows = idx[g]
            A, B = ca_a[rows][:, None], cb_a[rows][:, None]
            out[rows] += run(
                rows,
                lambda x, A=A, B=B: w(x)[None, :] * special.jv(nu, B * np.sqrt(x)[None, :]),
                lambda x, A=A: A * np.sqrt(x)[None, :],
                lambda x, A=A: A / (2 * np.sqrt(x))[None, :],
                lambda x, B=B: B / (4 * np.pi * np.sqrt(x))[None, :],
            )

    idx = np.flatnonzero(~direct)
    # with w real and ca = 0 the minus piece is the conjugate of the plus piece
    mirror = w.real and idx.size and not np.any(ca_a[idx])
    pieces = [(+1, special.hankel1e)] if mirror else [(+1, special.hankel1e), (-1, special.hankel2e)]
    for sign, hfun in pieces:
        c = ca_a[idx] + sign * cb_a[idx]
        keep = ~(w.compact & (np.abs(c) * span / TWO_PI >= SKIP_CYCLES))
        rows_all, c = idx[keep], c[keep]
        for g in _frequency_groups(np.abs(c) * span) if rows_all.size else []:
            rows = rows_all[g]
            C = c[g][:, None]
            B = cb_a[rows][:, None]
            val = run(
                rows,
                lambda x, B=B, h=hfun: 0.5 * w(x)[None, :] * h(nu, B * np.sqrt(x)[None, :]),
                lambda x, C=C: C * np.sqrt(x)[None, :],
                lambda x, C=C: C / (2 * np.sqrt(x))[None, :],
                0.0,
            )
            out[rows] += 2 * val.real if mirror else val
    out = out.reshape(shape)
    return complex(out) if out.ndim == 0 else out


def I_k(a, b, X: float, k: int, rel_tol: float = 1e-10, abs_tol: float = 0.0):
    """I_k(a, b; X) = int U(x/X) e(2a sqrt x) J_{k-1}(4 pi b sqrt x) dx, computed as
    X int_1^2 U(u) e(2a sqrt(Xu)) J_{k-1}(4 pi b sqrt(Xu)) du."""
    if X <= 1:
        raise OutOfRange("X must exceed 1")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(b <= 0) or np.any(a < 0):
        raise OutOfRange("need a >= 0 and b > 0")
    sx = np.sqrt(X)
    val = bessel_kernel_integral(
        CANONICAL_BUMP, 2 * TWO_PI * a * sx, 2 * TWO_PI * b * sx, k - 1, rel_tol, abs_tol / X
    )
    return X * val


def I_k_diagonal_main(a: float, X: float, k: int) -> complex:
    """(1+i) i^(k-1) U~(3/4) X / (4 pi (a^2 X)^(1/4))."""
    return (1 + 1j) * 1j ** (k - 1) * U_tilde_34() * X / (4 * np.pi * (a * a * X) ** 0.25)


def hankel_transform(F: SmoothWeight, y, k: int, rel_tol: float = 1e-9, abs_tol: float = 0.0):
    """F-check(y) = 2 pi i^k int F(x) J_{k-1}(4 pi sqrt(x y)) dx."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise OutOfRange("y must be positive")
    if F.support[0] <= 0:
        raise PreconditionViolated("F must be supported in (0, inf)")
    pref = TWO_PI * 1j**k
    val = bessel_kernel_integral(F, 0.0, 2 * TWO_PI * np.sqrt(y), k - 1, rel_tol, abs_tol / TWO_PI)
    if F.real:
        val = np.real(val)
    out = pref * np.asarray(val)
    return complex(out) if out.ndim == 0 else out


# ----------------------------------------------------------------------------------------
# The J and L integrals


@dataclass(frozen=True)
class JContext:
    """Parameters of int V_nat(x) e(T phi(x) + 2 sqrt(N x y)/(sqrt(M) p^beta q) - r N x/(p^gamma q)) dx."""

    N: float
    T: float
    M: int
    X: float
    p_beta: int
    p_gamma: int
    vnat: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    phi: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    dphi: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    weight_scale: float = 0.0  # 1/Delta

    def phase_derivative_cycles(self, x, y, r, q):
        return (
            self.T * self.dphi(x)
            + np.sqrt(self.N * y / (self.M * x)) / (self.p_beta * q)
            - r * self.N / (self.p_gamma * q)
        )


def J_integral(y, r: int, q: int, ctx: JContext, rel_tol: float = 1e-8, abs_tol: float = 0.0):
    """The J integral for one (r, q) and a scalar or array of y."""
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    Y = ys[:, None]
    a2 = 2.0 * np.sqrt(ctx.N * Y / ctx.M) / (ctx.p_beta * q)
    lin = r * ctx.N / (ctx.p_gamma * q)

    def phase(x):
        return TWO_PI * (ctx.T * ctx.phi(x)[None, :] + a2 * np.sqrt(x)[None, :] - lin * x[None, :])

    def dphase(x):
        return TWO_PI * (ctx.T * ctx.dphi(x)[None, :] + a2 / (2 * np.sqrt(x))[None, :] - lin)

    def amp(x):
        return np.broadcast_to(ctx.vnat(x)[None, :], (ys.size, x.size))

    cap = min(0.25, 2 * ctx.weight_scale) if ctx.weight_scale > 0 else None
    spec = OscillatoryIntegral(
        amp, phase, dphase, (1.0, 2.0), rel_tol=rel_tol, abs_tol=abs_tol, panel_cap=cap, check_phase=False
    )
    out = np.atleast_1d(integrate(spec).value)
    return complex(out[0]) if np.ndim(y) == 0 else out


def L_integral(
    x: float, r1: int, r2: int, q1: int, q2: int, ctx: JContext, rel_tol: float = 1e-8,
    inner_rel_tol: float = 1e-12, abs_tol: float = 0.0,
) -> QuadResult:
    """int U(y) J(MXy, r1, q1) conj(J(MXy, r2, q2)) e(-x y) dy, with the J integrals batched over nodes."""
    MX = ctx.M * ctx.X

    def amp(ys):
        j1 = J_integral(MX * ys, r1, q1, ctx, inner_rel_tol)
        j2 = j1 if (r1, q1) == (r2, q2) else J_integral(MX * ys, r2, q2, ctx, inner_rel_tol)
        return bump(ys) * j1 * np.conj(j2)

    # each J oscillates in y at most sqrt(N X y_max)/(p^beta q) cycles per unit y
    f = np.sqrt(2 * ctx.N * ctx.X) / ctx.p_beta * (1.0 / q1 + 1.0 / q2)
    spec = OscillatoryIntegral(
        amp, lambda ys: -TWO_PI * x * ys, lambda ys: -TWO_PI * x + 0 * ys, (1.0, 2.0),
        rel_tol=rel_tol, abs_tol=abs_tol, amplitude_frequency=f,
    )
    return integrate(spec)


# ----------------------------------------------------------------------------------------
# Stationary phase


@dataclass
class StationaryPhaseReport:
    value: complex
    error: float
    min_derivative: float
    bounds: dict[int, float]
    holds: dict[int, bool]


def stationary_phase_check(
    spec: OscillatoryIntegral, R: float, P: float, U: float, Y: float, Z: float,
    A_values=(1, 2, 3), grid: int = 4001,
) -> StationaryPhaseReport:
    """Check |int| <= (b-a) Z (Y/(R P)^2 + 1/(R P) + 1/(R U))^A, phases measured in cycles.

    The lower bound |phase'|/2pi >= R is confirmed on a grid first.
    """
    lo, hi = spec.interval
    xs = np.linspace(lo, hi, grid)
    d = np.abs(np.asarray(spec.dphase(xs), dtype=float)) / TWO_PI
    dmin = float(d.min())
    if dmin < R * (1 - 1e-12):
        raise DerivativeBoundViolated(f"min |f'| = {dmin:.6g} < R = {R:.6g}")
    res = integrate(spec)
    base = Y / (R * P) ** 2 + 1.0 / (R * P) + 1.0 / (R * U)
    bounds = {A: (hi - lo) * Z * base**A for A in A_values}
    holds = {A: abs(res.value) <= bounds[A] for A in A_values}
    return StationaryPhaseReport(res.value, res.error, dmin, bounds, holds)
