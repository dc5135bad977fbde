"""Both sides of the Voronoi summation formula for a Hecke eigenform twisted by e(an/c)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .characters import e_rat
from .cuspforms import HeckeEigenvalueTable
from .errors import NotCoprime, PreconditionViolated, TruncationNotReached
from .modular import mod_inverse
from .oscillatory import SmoothWeight, bump_weight, hankel_transform

ABS_TOL = 1e-12
CONSECUTIVE = 10
MAX_TERMS = 10**6
BLOCK = 128


@dataclass(frozen=True)
class VoronoiInstance:
    form: HeckeEigenvalueTable
    a: int
    c: int
    F: SmoothWeight
    eta_g: complex = 1.0

    def __post_init__(self):
        if self.c < 1:
            raise PreconditionViolated("c must be positive")
        if math.gcd(self.a, self.c) != 1:
            raise NotCoprime(f"gcd(a, c) = gcd({self.a}, {self.c}) != 1")
        if math.gcd(self.c, self.form.M) != 1:
            raise NotCoprime(f"gcd(c, M) = gcd({self.c}, {self.form.M}) != 1")
        if abs(abs(self.eta_g) - 1) > 1e-12:
            raise PreconditionViolated("|eta_g| must be 1")
        if self.F.support[0] <= 0:
            raise PreconditionViolated("F must be supported in (0, inf)")

    @property
    def a_bar(self) -> int:
        return mod_inverse(self.a, self.c) if self.c > 1 else 0


@dataclass
class DualSum:
    value: complex
    terms: int
    tail_start: int


def voronoi_lhs(inst: VoronoiInstance) -> complex:
    """sum_n lambda(n) e(an/c) F(n) over the integers in the support of F."""
    lo, hi = inst.F.support
    n = np.arange(max(1, math.ceil(lo)), math.floor(hi) + 1)
    if n.size == 0:
        return 0j
    inst.form.require(int(n[-1]))
    terms = inst.form.lam[n] * e_rat(n * inst.a, inst.c) * inst.F(n.astype(float))
    return complex(np.sum(terms))


def voronoi_rhs_terms(inst: VoronoiInstance, n_max: int | None = None, rel_tol: float = 1e-9) -> DualSum:
    """The dual sum without its prefactor, truncated after CONSECUTIVE transforms below ABS_TOL
    (or at exactly n_max terms when given)."""
    f = inst.form
    c, M, k = inst.c, f.M, f.k
    abar = inst.a_bar
    total = 0j
    quiet = 0
    n0 = 1
    limit = n_max if n_max is not None else MAX_TERMS
    while n0 <= limit:
        n = np.arange(n0, min(n0 + BLOCK, limit + 1))
        f.require(int(n[-1]))
        Fc = np.asarray(hankel_transform(inst.F, n / (c * c * M), k, rel_tol=rel_tol, abs_tol=1e-3 * ABS_TOL))
        total += complex(np.sum(np.conj(f.lam[n]) * e_rat(-abar * n, c) * Fc))
        if n_max is None:
            for v in np.abs(Fc):
                quiet = quiet + 1 if v < ABS_TOL else 0
            if quiet >= CONSECUTIVE:
                return DualSum(total, int(n[-1]), int(n[-1]) - quiet + 1)
        n0 = int(n[-1]) + 1
    if n_max is not None:
        return DualSum(total, n_max, n_max)
    raise TruncationNotReached(f"dual sum still above {ABS_TOL} after {MAX_TERMS} terms")


def rhs_prefactor(inst: VoronoiInstance) -> complex:
    f = inst.form
    xi = f.xi_value(-inst.c) if f.M > 1 else 1.0
    return inst.eta_g * xi / (inst.c * math.sqrt(f.M))


def voronoi_rhs(inst: VoronoiInstance, rel_tol: float = 1e-9) -> complex:
    """(eta_g xi(-c) / (c sqrt M)) sum_n conj(lambda(n)) e(-a_bar n/c) F-check(n/(c^2 M))."""
    return rhs_prefactor(inst) * voronoi_rhs_terms(inst, rel_tol=rel_tol).value


def calibrate_eta(form: HeckeEigenvalueTable, N: float = 50.0) -> complex:
    """eta_g from the c = 1 instance: lhs / rhs computed with eta_g = 1."""
    inst = VoronoiInstance(form, 1, 1, bump_weight(N, 2 * N))
    return voronoi_lhs(inst) / voronoi_rhs(inst)
