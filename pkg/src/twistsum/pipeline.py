"""Twisted GL(2) sums end to end: direct and sharp sums, parameter choice, the delta-method
decomposition, exponent scans and central L-values."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import jv, loggamma

from .characters import DirichletCharacter, e
from .constants import constants
from .cuspforms import HeckeEigenvalueTable
from .delta import DeltaParams, VkInterpolant
from .errors import ConfigError, ParamsViolated, PreconditionViolated, RangeGateFailed
from .expsums import kloosterman_rows
from .modular import PrimePowerModulus, is_prime, primes_in_interval
from .oscillatory import CANONICAL_BUMP, JContext, SmoothWeight, bump, plateau_weight

EPSILON = 0.05
TWO_PI = 2.0 * np.pi

# phase regularity on (1/2, 5/2): |phi''| >= PHI_C0 and |phi^(j)| <= PHI_CJ for j = 1, 2, 3
PHI_C0 = 1e-2
PHI_CJ = 1e2
PHI_GRID = np.linspace(0.5, 2.5, 403)[1:-1]

BLOCK_ELEMENTS = 4_000_000
D_CUT = 60.0


# ---------------------------------------------------------------------------------------
# Specification


@dataclass(frozen=True)
class Phase:
    """phi with its first two derivatives; the sum uses f(x) = T phi(x/N)."""

    phi: Callable = field(repr=False)
    d1: Callable = field(repr=False)
    d2: Callable = field(repr=False)
    name: str = "custom"


LOG_PHASE = Phase(
    lambda x: -np.log(x) / TWO_PI,
    lambda x: -1.0 / (TWO_PI * x),
    lambda x: 1.0 / (TWO_PI * x * x),
    "log",
)


def validate_phase(ph: Phase, grid=PHI_GRID) -> None:
    x = np.asarray(grid, dtype=float)
    d1, d2 = np.asarray(ph.d1(x), dtype=float), np.asarray(ph.d2(x), dtype=float)
    step = 1e-4
    fd1 = (ph.phi(x + step) - ph.phi(x - step)) / (2 * step)
    if np.any(np.abs(fd1 - d1) > 1e-5 * (1 + np.abs(d1))):
        raise PreconditionViolated(f"phase {ph.name}: phi' oracle disagrees with finite differences")
    d3 = (ph.d2(x + step) - ph.d2(x - step)) / (2 * step)
    if np.min(np.abs(d2)) < PHI_C0:
        raise PreconditionViolated(f"phase {ph.name}: min |phi''| = {np.min(np.abs(d2)):.3g} < {PHI_C0}")
    worst = max(np.max(np.abs(d1)), np.max(np.abs(d2)), np.max(np.abs(d3)))
    if worst > PHI_CJ:
        raise PreconditionViolated(f"phase {ph.name}: derivative of size {worst:.3g} exceeds {PHI_CJ}")


def default_weight(delta: float) -> SmoothWeight:
    """Plateau weight with ramps of width 1/delta; the canonical bump when delta < 2."""
    return plateau_weight(delta) if delta >= 2 else CANONICAL_BUMP


@dataclass(frozen=True)
class SumSpec:
    form: HeckeEigenvalueTable
    chi: DirichletCharacter
    N: float
    T: float
    Delta: float = 1.0
    phi: Phase = LOG_PHASE
    V: SmoothWeight | None = None
    epsilon: float = EPSILON

    def __post_init__(self):
        if self.N < 1 or self.T < 0 or self.Delta < 1:
            raise PreconditionViolated("need N >= 1, T >= 0 and Delta >= 1")
        validate_phase(self.phi)
        if self.V is None:
            object.__setattr__(self, "V", default_weight(self.Delta))

    @property
    def p(self) -> int:
        return self.chi.p

    @property
    def gamma(self) -> int:
        return self.chi.gamma

    def f(self, n):
        return self.T * self.phi.phi(np.asarray(n, dtype=float) / self.N)

    def summand(self, n: np.ndarray) -> np.ndarray:
        """lambda(n) chi(n) e(f(n)) without the weight."""
        return self.form.lam[n] * self.chi(n) * e(self.f(n))

    def range_gate(self, delta: float | None = None) -> None:
        d = self.Delta if delta is None else delta
        lhs = (self.T + d) * self.p ** (self.gamma + 1)
        rhs = self.N**1.5
        if not lhs < rhs:
            raise RangeGateFailed(f"(T+Delta) p^(gamma+1) < N^(3/2) fails: {lhs:.6g} >= {rhs:.6g}")


# ---------------------------------------------------------------------------------------
# Exact finite sums


def _window(lo: float, hi: float) -> np.ndarray:
    return np.arange(max(1, math.ceil(lo)), math.floor(hi) + 1, dtype=np.int64)


def S_direct(spec: SumSpec) -> complex:
    """sum_n lambda(n) chi(n) e(f(n)) V(n/N) over the integers in N * supp V."""
    lo, hi = spec.V.support
    n = _window(lo * spec.N, hi * spec.N)
    if n.size == 0:
        return 0j
    spec.form.require(int(n[-1]))
    return complex(np.sum(spec.summand(n) * spec.V(n / spec.N)))


def S_sharp(spec: SumSpec, N_cut: float) -> complex:
    """sum_{n <= N_cut} lambda(n) chi(n) e(f(n))."""
    n = _window(1, N_cut)
    if n.size == 0:
        return 0j
    spec.form.require(int(n[-1]))
    return complex(np.sum(spec.summand(n)))


def sharp_block(spec: SumSpec) -> complex:
    """sum_{N <= n <= 2N} lambda(n) chi(n) e(f(n))."""
    n = _window(spec.N, 2 * spec.N)
    spec.form.require(int(n[-1]))
    return complex(np.sum(spec.summand(n)))


def smoothing_residual(spec: SumSpec, deltas=(4.0, 16.0, 64.0)) -> list[dict]:
    """|sharp block - smoothed sum| against N^(1+eps)/Delta for plateau weights."""
    block = sharp_block(spec)
    rows = []
    for d in deltas:
        smooth = S_direct(_replace(spec, Delta=float(d), V=plateau_weight(d)))
        bound = spec.N ** (1 + spec.epsilon) / d
        res = abs(block - smooth)
        rows.append({"Delta": float(d), "residual": res, "bound": bound, "ratio": res / bound})
    return rows


def _replace(spec: SumSpec, **kw) -> SumSpec:
    args = {k: getattr(spec, k) for k in ("form", "chi", "N", "T", "Delta", "phi", "V", "epsilon")}
    args.update(kw)
    return SumSpec(**args)


# ---------------------------------------------------------------------------------------
# Parameters


@dataclass(frozen=True)
class DerivedParams:
    beta: int
    S: float
    K: float
    Q: float
    H: float
    X: float
    Q_star: int
    Delta: float
    regime: str = "theorem"
    epsilon: float = EPSILON

    @property
    def primes(self) -> list[int]:
        return primes_in_interval(self.Q, 2 * self.Q)


def corollary_delta(T: float, p: int, gamma: int, N: float) -> tuple[str, float]:
    """Regime label and Delta from the sharp-cutoff case list, with m = floor(gamma/3).

    For gamma divisible by 3 the conditions are T^5 < p^gamma, N >= T^(4/9) p^(10 gamma/9),
    N >= T^(8/3) p^(2 gamma/3).
    """
    m = gamma // 3
    if T**5 < p ** (3 * m):
        if N >= T ** (4 / 9) * p ** (gamma + m / 3):
            return "small-T:1", T ** (4 / 9) * p ** (m / 3)
        if N >= T ** (8 / 3) * p ** (gamma - m):
            return "small-T:2", T ** (1 / 3) * N**0.25 / p ** ((gamma - m) / 4)
        return "small-T:3", T
    return "large-T", T


def choose_parameters(
    spec: SumSpec,
    K: float | None = None,
    Q: float | None = None,
    corollary: bool = False,
    off_diagonal: bool = False,
    L_part2: bool = False,
) -> DerivedParams:
    """beta, S, K, Q, H, X with every gate checked; RangeGateFailed names the failing inequality."""
    p, gamma, N, T, eps = spec.p, spec.gamma, spec.N, spec.T, spec.epsilon
    regime, delta = "theorem", spec.Delta
    if corollary:
        regime, delta = corollary_delta(T, p, gamma, N)
    spec.range_gate(delta)
    beta = 2 * (gamma // 3)
    K = T ** (2 / 3) if K is None else float(K)
    Q = N ** (1 + eps) / math.sqrt(T) if Q is None else float(Q)
    H = p**beta * Q
    X = H * H * K * K / N
    Ne = N**eps
    checks = [
        (Ne < K, f"N^eps < K fails: {Ne:.6g} >= {K:.6g}"),
        (K < T ** (1 - eps), f"K < T^(1-eps) fails: {K:.6g} >= {T ** (1 - eps):.6g}"),
        (H > N ** (1 + eps) / K, f"H > N^(1+eps)/K fails: {H:.6g} <= {N ** (1 + eps) / K:.6g}"),
    ]
    if off_diagonal:
        checks.append((Q > N ** (1 + eps) / K, f"Q > N^(1+eps)/K fails: {Q:.6g} <= {N ** (1 + eps) / K:.6g}"))
    if L_part2:
        checks.append((K > math.sqrt(T) * Ne, f"K > sqrt(T) N^eps fails: {K:.6g} <= {math.sqrt(T) * Ne:.6g}"))
    for ok, msg in checks:
        if not ok:
            raise RangeGateFailed(msg)
    S = T + delta * Ne
    Q_star = len(primes_in_interval(Q, 2 * Q))
    return DerivedParams(beta, S, K, Q, H, X, Q_star, delta, regime, eps)


# ---------------------------------------------------------------------------------------
# The delta-method decomposition


def eta_g(form: HeckeEigenvalueTable) -> complex:
    """Voronoi root-number constant: 1 at level one, otherwise read from the constants file."""
    if form.M == 1:
        return 1.0
    table = constants().get("frozen", {}).get("eta_g", {})
    if form.name not in table:
        raise ConfigError(f"no calibrated eta_g for form {form.name!r} of level {form.M}")
    re, im = table[form.name]
    return complex(re, im)


def _check_q(q: int, spec: SumSpec) -> None:
    M = spec.form.M
    if not is_prime(q) or q <= max(spec.p, M) or math.gcd(q, spec.p * M) != 1:
        raise ParamsViolated(f"q = {q} must be a prime > max(p, M) = {max(spec.p, M)} coprime to pM")


def _h(spec: SumSpec, params: DerivedParams, q: int) -> int:
    return spec.p**params.beta * q


def vk_for(spec: SumSpec, params: DerivedParams, q: int) -> VkInterpolant:
    """V_k on the range of sqrt(N X x)/h, x in [1, 2]."""
    h = _h(spec, params, q)
    s = math.sqrt(spec.N * params.X) / h
    return VkInterpolant(spec.form.k, s, math.sqrt(2) * s)


def vnat_factory(spec: SumSpec, params: DerivedParams, q: int, vk: VkInterpolant | None = None):
    """V_nat(x) = eta_g xi(-1) M^(-1/2) x^(1/4) V(x) V_k(sqrt(N X x)/h)."""
    f = spec.form
    h = _h(spec, params, q)
    vk = vk_for(spec, params, q) if vk is None else vk
    const = eta_g(f) * f.xi_value(-1) / math.sqrt(f.M)
    NX = spec.N * params.X

    def vnat(x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, 1.0, 2.0)
        return const * xc**0.25 * spec.V(x) * vk(np.sqrt(NX * xc) / h)

    return vnat


def _r_window(spec: SumSpec) -> np.ndarray:
    lo, hi = spec.V.support
    r = _window(lo * spec.N, hi * spec.N)
    return r[spec.V(r / spec.N) != 0]


def S_star(alpha: int, tau_flag: int, q: int, spec: SumSpec, params: DerivedParams, vk=None) -> complex:
    """The reversed-Voronoi form of the c = p^alpha q^tau term, h = p^beta q:

    xi(c) h^(1/2) N^(1/4)/(c X^(3/4)) sum_r chi(r) e(f(r)) V_nat(r/N)
        sum_n conj(lambda(n)) S(r, n; c) e(2 sqrt(n r)/(sqrt(M) c)) U(h^2 n/(M X c^2)).
    """
    _check_q(q, spec)
    if tau_flag not in (0, 1) or not 0 <= alpha <= params.beta:
        raise ParamsViolated(f"need tau in {{0, 1}} and 0 <= alpha <= beta = {params.beta}")
    f = spec.form
    M, N, X = f.M, spec.N, params.X
    h = _h(spec, params, q)
    DeltaParams(h, X, N, f.k, spec.epsilon)
    c = spec.p**alpha * q**tau_flag
    lo = M * X * c * c / (h * h)
    n = _window(math.floor(lo) + 1, math.ceil(2 * lo) - 1)
    if n.size == 0:
        return 0j
    f.require(int(n[-1]))
    r = _r_window(spec)
    if r.size == 0:
        return 0j
    vnat = vnat_factory(spec, params, q, vk)
    w = spec.chi(r) * e(spec.f(r)) * vnat(r / N)
    lamU = np.conj(f.lam[n]) * bump(h * h * n / (M * X * c * c))
    keep = lamU != 0
    n, lamU = n[keep], lamU[keep]
    nmod = n % c
    sq = np.sqrt(n.astype(float))
    theta = 2 * TWO_PI * np.sqrt(r.astype(float)) / (math.sqrt(M) * c)
    total = 0j
    B = max(1, BLOCK_ELEMENTS // max(1, n.size))
    for i in range(0, r.size, B):
        rb = slice(i, i + B)
        kl = kloosterman_rows(r[rb], c)[:, nmod]
        ph = np.exp(1j * np.outer(theta[rb], sq))
        total += complex(np.sum(w[rb] * ((kl * ph) @ lamU)))
    pref = f.xi_value(c) * math.sqrt(h) * N**0.25 / (c * X**0.75)
    return complex(pref * total)


def decomposition_terms(spec: SumSpec, params: DerivedParams, q: int) -> dict[tuple[int, int], complex]:
    """S_star for every alpha in [0, beta] and tau in {0, 1}."""
    vk = vk_for(spec, params, q)
    return {(a, t): S_star(a, t, q, spec, params, vk) for a in range(params.beta + 1) for t in (0, 1)}


def identity_side(spec: SumSpec, params: DerivedParams, q: int, d_cut: float = D_CUT, vk=None) -> complex:
    """sum_r chi(r) e(f(r)) V(r/N) sum_{n = r mod h} lambda(n) D(r, n), D the delta-identity expression.

    This is the decomposition before the Voronoi step, computed from Bessel integrals directly; the
    h | n - r terms with n != r are kept until the Bessel integral has decayed past d_cut units.
    """
    f = spec.form
    k, N, X = f.k, spec.N, params.X
    h = _h(spec, params, q)
    vk = vk_for(spec, params, q) if vk is None else vk
    r = _r_window(spec).astype(np.int64)
    rf = r.astype(float)
    coef = (
        spec.chi(r) * e(spec.f(r)) * spec.V(rf / N)
        * TWO_PI * rf**0.25 / (1j**k * math.sqrt(h) * X**0.75) * vk(np.sqrt(rf * X) / h)
    )
    sX = math.sqrt(X)
    r_hi = float(rf.max())
    n_top = (math.sqrt(r_hi) + d_cut * h / sX) ** 2
    j_max = max(0, int(math.ceil((n_top - rf.min()) / h)))
    f.require(int(r.max() + j_max * h))
    cycles = 2 * (math.sqrt(r_hi) + math.sqrt(n_top)) * math.sqrt(2 * X) / h
    u, wu = np.polynomial.legendre.leggauss(int(4 * cycles) + 200)
    u, wu = 1.5 + 0.5 * u, 0.5 * wu
    E = (wu * bump(u))[None, :] * np.exp(2j * TWO_PI * np.sqrt(np.outer(rf, u)) * sX / h)
    su = np.sqrt(u)
    total = 0j
    for j in range(j_max + 1):
        nj = r + j * h
        lam = f.lam[nj]
        jm = jv(k - 1, 2 * TWO_PI * np.outer(np.sqrt(nj.astype(float)) * sX / h, su))
        ik = X * np.sum(E * jm, axis=1)
        total += complex(np.sum(coef * lam * ik))
    return total


@dataclass
class DecompositionReport:
    q_list: list[int]
    direct: complex
    decomposed: complex
    diff: float
    tolerance: float
    passed: bool
    terms: dict = field(repr=False)
    identity: complex | None = None
    identity_diff: float | None = None
    leakage: complex | None = None
    mutation_dropped: int | None = None
    mutation_diff: float | None = None
    mutation_identity_diff: float | None = None
    mutation_breaks: bool | None = None


def decomposition_check(
    spec: SumSpec, params: DerivedParams, q_list: list[int] | None = None, with_identity: bool = True
) -> DecompositionReport:
    """S_direct against sum_alpha (S_star(p^alpha q) + S_star(p^alpha)), averaged over q_list.

    Tolerance 10/X. The identity side (the same sum before Voronoi, h | n - r leakage included)
    separates the identity's own error from the evaluation of the dual sums. The mutation drops
    the largest alpha-term and must break agreement.
    """
    q_list = list(q_list) if q_list else params.primes[:1]
    if not q_list:
        raise ParamsViolated(f"no primes in [Q, 2Q] = [{params.Q:.6g}, {2 * params.Q:.6g}]")
    for q in q_list:
        _check_q(q, spec)
        if not params.Q <= q <= 2 * params.Q:
            raise ParamsViolated(f"q = {q} outside [Q, 2Q]")
    direct = S_direct(spec)
    per_q = {q: decomposition_terms(spec, params, q) for q in q_list}
    terms = {key: sum(per_q[q][key] for q in q_list) / len(q_list) for key in per_q[q_list[0]]}
    decomposed = sum(terms.values())
    tol = 10.0 / params.X
    diff = abs(direct - decomposed)
    rep = DecompositionReport(q_list, direct, decomposed, diff, tol, diff <= tol, terms)
    if with_identity:
        ident = sum(identity_side(spec, params, q) for q in q_list) / len(q_list)
        rep.identity = ident
        rep.identity_diff = abs(ident - decomposed)
        rep.leakage = ident - direct
    by_alpha = {a: terms[(a, 0)] + terms[(a, 1)] for a in range(params.beta + 1)}
    drop = max(by_alpha, key=lambda a: abs(by_alpha[a]))
    mutated = decomposed - by_alpha[drop]
    rep.mutation_dropped = drop
    rep.mutation_diff = abs(direct - mutated)
    if rep.identity is not None:
        rep.mutation_identity_diff = abs(rep.identity - mutated)
    rep.mutation_breaks = rep.mutation_diff > tol
    return rep


def jcontext(spec: SumSpec, params: DerivedParams, q: int) -> JContext:
    """Parameters of the J integral for h = p^beta q."""
    f = spec.form
    return JContext(
        N=spec.N, T=spec.T, M=f.M, X=params.X,
        p_beta=spec.p**params.beta, p_gamma=spec.p**spec.gamma,
        vnat=vnat_factory(spec, params, q), phi=spec.phi.phi, dphi=spec.phi.d1,
        weight_scale=spec.V.scale,
    )


# ---------------------------------------------------------------------------------------
# Exponent scan


def bound_shape(T: float, p: int, gamma: int, N: float) -> float:
    m = gamma // 3
    return T ** (1 / 3) * p ** ((gamma - m) / 2) * math.sqrt(N) + N / (T ** (1 / 6) * p ** (m / 2))


def _scan_spec(form, T, p, gamma, N, Delta) -> SumSpec:
    chi = DirichletCharacter(PrimePowerModulus(p, gamma), 1)
    return SumSpec(form, chi, float(N), float(T), float(Delta))


def exponent_scan(form: HeckeEigenvalueTable, grid, Delta: float | None = None, synthetic: bool = False) -> list[dict]:
    """|S_direct| / bound(T, p, gamma, N) for each (T, p, gamma, N); Delta defaults to T.

    synthetic=True replaces the summand by 1 (no cancellation at all), the harness check.
    """
    rows = []
    for T, p, gamma, N in grid:
        spec = _scan_spec(form, T, p, gamma, N, T if Delta is None else Delta)
        lo, hi = spec.V.support
        n = _window(lo * N, hi * N)
        form.require(int(n[-1]))
        w = spec.V(n / N)
        if synthetic:
            val = complex(np.sum(w))
        else:
            val = complex(np.sum(spec.summand(n) * w))
        trivial = float(np.sum(np.abs(form.lam[n]) * w))
        b = bound_shape(T, p, gamma, N)
        rows.append({
            "T": T, "p": p, "gamma": gamma, "N": N, "value": val, "trivial": trivial,
            "bound": b, "ratio": abs(val) / b,
        })
    return rows


def log_slopes(rows: list[dict]) -> dict[tuple, float]:
    """Least-squares slope of log(ratio) against log(N) for each fixed (T, p, gamma)."""
    groups: dict[tuple, list] = {}
    for row in rows:
        groups.setdefault((row["T"], row["p"], row["gamma"]), []).append(row)
    out = {}
    for key, rs in groups.items():
        if len(rs) < 2:
            continue
        x = np.log([r_["N"] for r_ in rs])
        y = np.log([r_["ratio"] for r_ in rs])
        out[key] = float(np.polyfit(x, y, 1)[0])
    return out


# ---------------------------------------------------------------------------------------
# Central values through the approximate functional equation

AFE_V_STEP = 0.05
AFE_V_MAX = 60.0
AFE_B = 16.0


def root_number(form: HeckeEigenvalueTable, chi: DirichletCharacter) -> complex:
    """i^k xi(q) chi(M) tau(chi)^2 / q for the twist of a level-M form by primitive chi mod q, (q, M) = 1.

    Only level one is built in; other levels need the form's own root number, so the value must be
    supplied by the caller.
    """
    if not chi.primitive:
        raise PreconditionViolated("chi must be primitive")
    if form.M != 1:
        raise ConfigError("root number for level > 1 must be supplied explicitly")
    q = chi.q_val
    return complex(1j**form.k * chi.gauss**2 / q)


def analytic_conductor(form: HeckeEigenvalueTable, chi: DirichletCharacter, t: float) -> float:
    kappa = (form.k - 1) / 2
    s = complex(0.5, t)
    return chi.q_val**2 * form.M * (abs(s + kappa) + 3) * (abs(s + kappa + 1) + 3)


def afe_cutoff(s: complex, y, k: int) -> np.ndarray:
    """V_s(y) = (1/2 pi i) int_(c) G(u) gamma(s+u)/gamma(s) y^(-u) du/u with G(u) = exp(u^2/B),
    gamma(s) = Gamma_C(s + (k-1)/2).

    G keeps V_s bounded for large |Im s| (it absorbs the growth of the gamma ratio, at worst a factor
    exp(pi^2 B/16)) while V_s still decays fast past y ~ |s + (k-1)/2|. Trapezoid rule on a vertical
    line; for y < 1 the line sits left of 0 and the residue 1 is added.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    kappa = (k - 1) / 2
    v = np.arange(-AFE_V_MAX, AFE_V_MAX + AFE_V_STEP / 2, AFE_V_STEP)
    out = np.empty(y.size, dtype=complex)
    base = loggamma(s + kappa)
    for left, mask in ((True, y < 1), (False, y >= 1)):
        if not mask.any():
            continue
        c = -min(2.0, (kappa + s.real) / 2) if left else 2.0
        u = c + 1j * v
        g = np.exp(u * u / AFE_B + loggamma(s + kappa + u) - base - u * np.log(TWO_PI)) / u
        integrand = g[None, :] * np.exp(-np.outer(np.log(y[mask]), u))
        out[mask] = AFE_V_STEP * np.sum(integrand, axis=1) / TWO_PI + (1.0 if left else 0.0)
    return out


@dataclass
class AFEResult:
    value: complex
    first: complex
    second: complex
    root_number: complex
    length: int


def afe_L_value(
    form: HeckeEigenvalueTable,
    chi: DirichletCharacter,
    t: float,
    length_factor: float = 5.0,
    balance: float = 1.0,
    eps: complex | None = None,
) -> AFEResult:
    """L(1/2 + it, g x chi) = sum a(n) n^(-s) V_s(n/(Y sqrt q)) + eps(s) sum conj(a(n)) n^(s-1) V_(1-s)(nY/sqrt q).

    q is the conductor q_chi^2 M, Y = balance; both sums stop at length_factor * sqrt(analytic conductor).
    The value does not depend on Y when eps is the true root number.
    """
    s = complex(0.5, t)
    eps = root_number(form, chi) if eps is None else complex(eps)
    sq = chi.q_val * math.sqrt(form.M)
    L = int(math.ceil(length_factor * math.sqrt(analytic_conductor(form, chi, t)) * max(balance, 1 / balance)))
    form.require(L)
    n = np.arange(1, L + 1)
    a = form.lam[n] * chi(n)
    nf = n.astype(float)
    kappa = (form.k - 1) / 2
    gamma_ratio = np.exp(loggamma(1 - s + kappa) - loggamma(s + kappa) - (1 - 2 * s) * np.log(TWO_PI))
    eps_s = eps * sq ** (1 - 2 * s) * gamma_ratio
    first = complex(np.sum(a * nf ** (-s) * afe_cutoff(s, nf / (balance * sq), form.k)))
    second = complex(np.sum(np.conj(a) * nf ** (s - 1) * afe_cutoff(1 - s, nf * balance / sq, form.k)))
    return AFEResult(first + eps_s * second, first, second, eps, L)


def abel_L_value(form: HeckeEigenvalueTable, chi: DirichletCharacter, t: float = 0.0, X0: float = 1000.0) -> complex:
    """Abel means sum a(n) n^(-s) exp(-n/X) at X0, 2 X0, 4 X0, Richardson-extrapolated in 1/X."""
    s = complex(0.5, t)
    L = int(40 * 4 * X0)
    form.require(L)
    n = np.arange(1, L + 1)
    terms = form.lam[n] * chi(n) * n.astype(float) ** (-s)
    A = [complex(np.sum(terms * np.exp(-n / (X0 * m)))) for m in (1, 2, 4)]
    return (8 * A[2] - 6 * A[1] + A[0]) / 3
