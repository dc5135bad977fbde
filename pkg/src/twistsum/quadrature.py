"""Panel-adaptive Gauss-Legendre quadrature for integrals of amplitude(x) * exp(i phase(x)).

Panels are first sized from the local frequency |phase'|/2pi + amplitude_frequency, then
bisected wherever the GL16 and GL32 estimates disagree. Amplitudes and phases may be batched:
a callable returning shape (m, n) for n nodes integrates m integrands on shared panels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BudgetExceeded, PhaseOracleMismatch, PreconditionViolated

_X16, _W16 = np.polynomial.legendre.leggauss(16)
_X32, _W32 = np.polynomial.legendre.leggauss(32)
_NODES = np.concatenate([_X16, _X32])
_EPS = np.finfo(float).eps
_NOISE = 16.0  # panel errors below this multiple of the roundoff floor are not refined
_CHUNK = 4_000_000  # complex values evaluated per call
PHASE_CHECK_POINTS = 100
PHASE_CHECK_TOL = 1e-5


@dataclass
class QuadResult:
    value: complex | np.ndarray
    error: float | np.ndarray
    panels: int
    evaluations: int


@dataclass
class OscillatoryIntegral:
    """Integral over [lo, hi] of amplitude(x) exp(i phase(x)); phase in radians.

    dphase is the analytic derivative of phase. amplitude_frequency (cycles per unit length,
    scalar or callable) declares oscillation carried by the amplitude itself, so that panel
    sizing accounts for it.
    """

    amplitude: Callable[[np.ndarray], np.ndarray]
    phase: Callable[[np.ndarray], np.ndarray] | None
    dphase: Callable[[np.ndarray], np.ndarray] | None
    interval: tuple[float, float]
    rel_tol: float = 1e-8
    abs_tol: float = 0.0
    max_panels: int = 2**20
    amplitude_frequency: float | Callable[[np.ndarray], np.ndarray] = 0.0
    cycles_per_panel: float = 1.0
    panel_cap: float | None = None
    seed: int = 0
    check_phase: bool = True
    _checked: bool = field(default=False, init=False, repr=False)

    def __post_init__(self):
        lo, hi = self.interval
        if not lo < hi:
            raise PreconditionViolated(f"need lo < hi, got {self.interval}")
        if not self.rel_tol > 0:
            raise PreconditionViolated("rel_tol must be positive")
        if (self.phase is None) != (self.dphase is None):
            raise PreconditionViolated("phase and dphase must be given together")
        if self.check_phase and self.phase is not None:
            self.self_check()

    @property
    def length(self) -> float:
        return self.interval[1] - self.interval[0]

    def self_check(self) -> None:
        """Compare dphase with a fourth-order central difference at random interior points."""
        lo, hi = self.interval
        rng = np.random.default_rng(self.seed)
        h = 1e-4 * (hi - lo)
        x = rng.uniform(lo + 2 * h, hi - 2 * h, PHASE_CHECK_POINTS)
        f = self.phase
        fd = (8 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12 * h)
        d = np.asarray(self.dphase(x), dtype=float)
        fd = np.asarray(fd, dtype=float)
        scale = np.maximum(np.abs(d), max(1e-3 * np.max(np.abs(d)), 1.0 / (hi - lo)))
        bad = np.abs(fd - d) > PHASE_CHECK_TOL * scale
        if np.any(bad):
            raise PhaseOracleMismatch(
                f"phase derivative disagrees with finite differences at {int(np.sum(bad))} points"
            )
        self._checked = True

    def local_frequency(self, x: np.ndarray) -> np.ndarray:
        """Cycles per unit length at x (maximum over batch rows)."""
        freq = np.zeros_like(x)
        if self.dphase is not None:
            d = np.abs(np.asarray(self.dphase(x), dtype=float)) / (2 * np.pi)
            freq = freq + (d.max(axis=0) if d.ndim == 2 else d)
        af = self.amplitude_frequency
        if callable(af):
            a = np.abs(np.asarray(af(x), dtype=float))
            freq = freq + (a.max(axis=0) if a.ndim == 2 else a)
        else:
            freq = freq + abs(af)
        return freq


def _initial_panels(spec: OscillatoryIntegral) -> np.ndarray:
    lo, hi = spec.interval
    cap = spec.panel_cap or (hi - lo) / 4
    grid = np.linspace(lo, hi, 4097)
    density = np.maximum(spec.local_frequency(grid) / spec.cycles_per_panel, 1.0 / cap)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(grid))])
    n = int(np.ceil(cum[-1]))
    if n > spec.max_panels:
        raise BudgetExceeded(f"{n} initial panels exceed max_panels={spec.max_panels}")
    edges = np.interp(np.linspace(0, cum[-1], n + 1), cum, grid)
    edges[0], edges[-1] = lo, hi
    return edges


def _eval_panels(spec: OscillatoryIntegral, a: np.ndarray, b: np.ndarray):
    """GL16 and GL32 estimates plus a roundoff floor on each panel; shapes (m, P)."""
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    amp = np.asarray(spec.amplitude(x))
    batched = amp.ndim == 2
    amp = amp.reshape(-1, x.size)
    if spec.phase is not None:
        ph = np.asarray(spec.phase(x), dtype=float).reshape(-1, x.size)
        vals = amp * np.exp(1j * ph)
        big = np.abs(ph).reshape(ph.shape[0], a.size, _NODES.size).max(axis=2)
    else:
        vals = amp.astype(complex)
        big = 0.0
    vals = vals.reshape(vals.shape[0], a.size, _NODES.size)
    q16 = (vals[:, :, :16] @ _W16) * half
    q32 = (vals[:, :, 16:] @ _W32) * half
    # roundoff floor: summation error plus the absolute error of exp(i phase) for large phases
    mass = (np.abs(vals[:, :, 16:]) @ _W32) * half * (64 + big) * _EPS
    return q16, q32, mass, batched


def _eval_chunked(spec, a, b):
    per = max(1, _CHUNK // (_NODES.size * 8))
    parts = []
    s = 0
    while s < a.size:
        q16, q32, mass, batched = _eval_panels(spec, a[s : s + per], b[s : s + per])
        parts.append((q16, q32, mass))
        s += per
        per = max(1, _CHUNK // (_NODES.size * q16.shape[0]))
    q16 = np.concatenate([p[0] for p in parts], axis=1)
    q32 = np.concatenate([p[1] for p in parts], axis=1)
    mass = np.concatenate([p[2] for p in parts], axis=1)
    return q16, q32, mass, batched


def integrate(spec: OscillatoryIntegral) -> QuadResult:
    """Adaptive integration; value is the GL32 sum, error the sum over panels of max(|GL32 - GL16|, roundoff floor)."""
    edges = _initial_panels(spec)
    a, b = edges[:-1], edges[1:]
    q16, q32, floor_p, batched = _eval_chunked(spec, a, b)
    evals = a.size * _NODES.size
    total = spec.length
    while True:
        value = q32.sum(axis=1)
        err_p = np.abs(q32 - q16)
        noise = _NOISE * floor_p
        active = np.where(err_p > noise, err_p, 0.0)
        error = np.maximum(err_p, floor_p).sum(axis=1)
        tol = np.maximum(np.maximum(spec.rel_tol * np.abs(value), spec.abs_tol), noise.sum(axis=1))
        open_rows = active.sum(axis=1) > tol
        if not np.any(open_rows):
            break
        share = 0.5 * tol[open_rows, None] * ((b - a) / total)[None, :]
        bad = np.any(active[open_rows] > share, axis=0)
        if not np.any(bad):
            worst = active[open_rows].max(axis=0)
            bad = worst >= np.median(worst[worst > 0])
        nb = int(np.sum(bad))
        if a.size + nb > spec.max_panels:
            raise BudgetExceeded(
                f"max_panels={spec.max_panels} reached with error {float(error.max()):.3g} > tol {float(tol.max()):.3g}"
            )
        ba, bb = a[bad], b[bad]
        m = 0.5 * (ba + bb)
        na = np.concatenate([ba, m])
        nb_ = np.concatenate([m, bb])
        n16, n32, nmass, _ = _eval_chunked(spec, na, nb_)
        evals += na.size * _NODES.size
        keep = ~bad
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb_])
        q16 = np.concatenate([q16[:, keep], n16], axis=1)
        q32 = np.concatenate([q32[:, keep], n32], axis=1)
        floor_p = np.concatenate([floor_p[:, keep], nmass], axis=1)
    if not batched:
        return QuadResult(complex(value[0]), float(error[0]), a.size, evals)
    return QuadResult(value, error, a.size, evals)
