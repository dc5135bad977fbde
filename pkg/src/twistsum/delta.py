"""The Bessel delta identity: the profiles I_k(x), V_k(x) and evaluation of the detector."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .characters import e_rat
from .constants import frozen
from .errors import BelowCalibratedRange, ParamsViolated, TwistSumError
from .oscillatory import I_k

X_REF = 1e6
EPSILON = 0.05


def x_min(k: int) -> float:
    return float(frozen("x_min", str(k)))


def _check_range(x, k: int, check: bool) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if check:
        lo = x_min(k)
        if np.any(x < lo):
            raise BelowCalibratedRange(f"x = {float(np.min(x)):.4g} below calibrated x_min = {lo} for k = {k}")
    return x


def I_k_profile(x, k: int, X_ref: float = X_REF, rel_tol: float = 1e-12, check: bool = True):
    """I_k(x) defined by I_k(a, a; X) = (i^k X / 2 pi) I_k(a sqrt X); computed at a reference X."""
    x = _check_range(x, k, check)
    a = x / np.sqrt(X_ref)
    val = (2 * np.pi / (1j**k * X_ref)) * np.asarray(I_k(a, a, X_ref, k, rel_tol))
    return complex(val) if val.ndim == 0 else val


def V_k_profile(x, k: int, X_ref: float = X_REF, rel_tol: float = 1e-12):
    """V_k(x) = 1 / (sqrt(x) I_k(x))."""
    x = np.asarray(x, dtype=float)
    val = 1.0 / (np.sqrt(x) * np.asarray(I_k_profile(x, k, X_ref, rel_tol)))
    return complex(val) if val.ndim == 0 else val


@dataclass
class VkInterpolant:
    """Chebyshev interpolant of V_k on [lo, hi]; accuracy confirmed at interleaved points."""

    k: int
    lo: float
    hi: float
    degree: int = 40
    tol: float = 1e-11
    coef: np.ndarray = field(init=False, repr=False)
    max_error: float = field(init=False)

    def __post_init__(self):
        if self.hi <= self.lo:
            self.hi = self.lo * (1 + 1e-9) + 1e-9
        cheb = np.polynomial.chebyshev
        while True:
            n = self.degree + 1
            t = np.cos(np.pi * (np.arange(n) + 0.5) / n)
            vals = V_k_profile(self._x(t), self.k)
            self.coef = cheb.chebfit(t, vals, self.degree)
            tm = np.cos(np.pi * np.arange(1, n) / n)
            self.max_error = float(np.max(np.abs(cheb.chebval(tm, self.coef) - V_k_profile(self._x(tm), self.k))))
            if self.max_error <= self.tol * np.max(np.abs(vals)) or self.degree >= 320:
                break
            self.degree *= 2
        if self.max_error > self.tol * np.max(np.abs(vals)):
            raise TwistSumError(f"V_k interpolant error {self.max_error:.3g} on [{self.lo}, {self.hi}]")

    def _x(self, t):
        return 0.5 * (self.lo + self.hi) + 0.5 * (self.hi - self.lo) * t

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        t = (2 * x - self.lo - self.hi) / (self.hi - self.lo)
        if np.any(np.abs(t) > 1 + 1e-9):
            raise BelowCalibratedRange(f"V_k interpolant evaluated outside [{self.lo}, {self.hi}]")
        return np.polynomial.chebyshev.chebval(t, self.coef)


@dataclass(frozen=True)
class DeltaParams:
    """Modulus h, scale X and window [N, 2N] of the delta identity."""

    h: int
    X: float
    N: float
    k: int = 12
    epsilon: float = EPSILON

    def __post_init__(self):
        if self.h < 1:
            raise ParamsViolated("h must be a positive integer")
        if self.X < self.h**2 / self.N:
            raise ParamsViolated(f"X >= h^2/N fails: X = {self.X:.4g} < {self.h**2 / self.N:.4g}")
        if self.X ** (1 - self.epsilon) <= self.N:
            raise ParamsViolated(f"X^(1-eps) > N fails: {self.X ** (1 - self.epsilon):.4g} <= {self.N:.4g}")


def delta_identity_eval(r: int, n: int, params: DeltaParams, literal: bool = False, rel_tol: float = 1e-11) -> complex:
    """(2 pi r^(1/4) / (i^k h^(1/2) X^(3/4))) (1/h) sum_{a mod h} e(a(n-r)/h) I_k(sqrt r/h, sqrt n/h; X) V_k(sqrt(rX)/h).

    The a-sum is the indicator h | n - r; literal=True sums it term by term.
    """
    h, X, N, k = params.h, params.X, params.N, params.k
    for v in (r, n):
        if not N <= v <= 2 * N:
            raise ParamsViolated(f"{v} outside [N, 2N] = [{N}, {2 * N}]")
    if literal:
        a = np.arange(h)
        asum = complex(np.sum(e_rat(a * (n - r), h))) / h
    else:
        asum = 1.0 if (n - r) % h == 0 else 0.0
    if asum == 0:
        return 0j
    pref = 2 * np.pi * r**0.25 / (1j**k * np.sqrt(h) * X**0.75)
    ik = I_k(np.sqrt(r) / h, np.sqrt(n) / h, X, k, rel_tol)
    vk = V_k_profile(np.sqrt(r * X) / h, k)
    return complex(pref * asum * ik * vk)


def delta_matrix(rs, ns, params: DeltaParams) -> np.ndarray:
    out = np.zeros((len(rs), len(ns)), dtype=complex)
    for i, r in enumerate(rs):
        for j, n in enumerate(ns):
            out[i, j] = delta_identity_eval(int(r), int(n), params)
    return out
