"""One-time fits of the frozen constants used by the size checks, and the grids they run on.

Each fit reports {check_name, parameter_grid, max_ratio_observed, frozen_constant}. Constants
given a priori (the C = 10 size checks, the scan slope) are recorded with their observed ratio.
"""

from __future__ import annotations

import math

import numpy as np

from . import constants as const_mod
from .oscillatory import I_k, I_k_diagonal_main, U_tilde_34

WEIGHTS = (12, 16)
X_MIN_SCAN = (0.25, 20.0, 0.01)


def _round_up(x: float, digits: int = 2) -> float:
    if x <= 0:
        return 0.0
    e = math.floor(math.log10(x)) - digits + 1
    return round(math.ceil(round(x / 10**e, 9)) * 10**e, max(0, -e))


def report(name: str, grid, observed: float, frozen: float) -> dict:
    return {
        "check_name": name,
        "parameter_grid": grid,
        "max_ratio_observed": float(observed),
        "frozen_constant": float(frozen),
    }


def fit_x_min(k: int) -> dict:
    """Smallest x past which |I_k(x)| sqrt(x) stays within a factor 2 of U~(3/4)/sqrt 2; frozen with a 1.5 margin."""
    lo, hi, step = X_MIN_SCAN
    xs = np.arange(lo, hi, step)
    X = 1e6
    prof = 2 * np.pi / (1j**k * X) * np.asarray(I_k(xs / np.sqrt(X), xs / np.sqrt(X), X, k, 1e-12))
    rho = np.abs(prof) * np.sqrt(xs) * np.sqrt(2) / U_tilde_34()
    bad = np.flatnonzero((rho < 0.5) | (rho > 2))
    start = xs[bad[-1] + 1] if bad.size else xs[0]
    frozen = math.ceil(1.5 * start * 20) / 20
    return report(f"x_min[k={k}]", {"x": [lo, hi, step], "X_ref": X}, start, frozen)


def fit_diagonal_asymptotic(k: int) -> dict:
    """max |I_k(a,a;X) - main| / (X (a^2 X)^(-3/4)) over a^2 X in [1e2, 1e6]."""
    grid_ax = np.logspace(2, 6, 17)
    worst = 0.0
    for X in (1e3, 1e6):
        a = np.sqrt(grid_ax / X)
        vals = np.asarray(I_k(a, a, X, k, 1e-12))
        main = np.array([I_k_diagonal_main(ai, X, k) for ai in a])
        worst = max(worst, float(np.max(np.abs(vals - main) / (X * grid_ax**-0.75))))
    return report(f"I_k_diag[k={k}]", {"a2X": [1e2, 1e6, 17], "X": [1e3, 1e6]}, worst, _round_up(2 * worst))


def fit_profile(k: int) -> dict:
    """max x |I_k(x) sqrt x - U~(3/4)/(1+i)| over x in [1e2, 1e4]."""
    from .delta import I_k_profile

    xs = np.logspace(2, 4, 21)
    v = np.asarray(I_k_profile(xs, k, check=False)) * np.sqrt(xs)
    worst = float(np.max(xs * np.abs(v - U_tilde_34() / (1 + 1j))))
    return report(f"I_k_profile[k={k}]", {"x": [1e2, 1e4, 21]}, worst, _round_up(2 * worst))


def fit_inverse_profile(k: int) -> dict:
    """max over j in {0,1} of |x^j (1/I_k)^(j)| / sqrt x on x in [1e2, 1e4] (central differences)."""
    from .delta import I_k_profile

    xs = np.logspace(2, 4, 21)
    hstep = 1e-3 * xs
    f0 = 1 / np.asarray(I_k_profile(xs, k, check=False))
    fp = 1 / np.asarray(I_k_profile(xs + hstep, k, check=False))
    fm = 1 / np.asarray(I_k_profile(xs - hstep, k, check=False))
    d1 = (fp - fm) / (2 * hstep)
    worst = float(max(np.max(np.abs(f0) / np.sqrt(xs)), np.max(xs * np.abs(d1) / np.sqrt(xs))))
    return report(f"inv_I_k[k={k}]", {"x": [1e2, 1e4, 21], "j": [0, 1]}, worst, _round_up(1.25 * worst))


def calibrate(weights=WEIGHTS, extra: dict | None = None, path=None) -> dict:
    """Run every fit and write the constants file; returns its contents."""
    if path is not None:
        const_mod.set_constants_path(path)
    reports = []
    frozen: dict = {"x_min": {}, "I_k_diag": {}, "I_k_profile": {}, "inv_I_k": {}}
    for k in weights:
        for key, fn in (
            ("x_min", fit_x_min),
            ("I_k_diag", fit_diagonal_asymptotic),
            ("I_k_profile", fit_profile),
            ("inv_I_k", fit_inverse_profile),
        ):
            if key != "x_min" and str(k) not in frozen["x_min"]:
                continue
            rep = fn(k)
            reports.append(rep)
            frozen[key][str(k)] = rep["frozen_constant"]
            if key == "x_min":
                # later fits read x_min through the constants file
                _stage(frozen, path)
    frozen["U_tilde_3_4"] = U_tilde_34()
    if extra:
        for rep in extra.get("reports", []):
            reports.append(rep)
        frozen.update(extra.get("frozen", {}))
    data = {"schema": 1, "frozen": frozen, "reports": reports}
    const_mod.save(data, path)
    return data


def _stage(frozen: dict, path) -> None:
    const_mod.save({"schema": 1, "frozen": frozen, "reports": []}, path)


# ---------------------------------------------------------------------------------------
# Grids for the J and L size checks, the smoothing residual and the exponent scan

SIZE_C = 10.0
SCAN_SLOPE = 0.1

# p = 3, gamma = 3, N = 1e4, T = 1e3: K = 100, K^2/T = 10, all gates including K > sqrt(T) N^eps
INTEGRAL_INSTANCE = {"p": 3, "gamma": 3, "N": 1e4, "T": 1e3, "Delta": 16.0}
J_Y_FRACTIONS = (1.0, 1.25, 1.5, 1.75, 2.0)
J_R_STEP = 20
L_PAIRS = ((-20, -20, 0, 0), (-40, -20, 0, 1), (0, -20, 1, 0))
L_PAIRS_EQUAL_Q = ((-20, -20), (-40, 0), (-60, -20))
L_X_PART2 = (10.0, 20.0, 40.0, 80.0)

SMOOTHING_GRID = {"p": 3, "gamma": 3, "T": 10.0, "N": (1000.0, 4000.0, 16000.0), "Delta": (4.0, 16.0, 64.0)}

SCAN_GRID = (
    [(10.0, 5, 6, N) for N in (16000, 32000, 64000, 128000, 256000, 512000)]
    + [(30.0, 3, 6, N) for N in (4000, 8000, 16000, 32000, 64000, 128000)]
    + [(100.0, 3, 3, N) for N in (4000, 8000, 16000, 32000, 64000, 128000)]
)


def integral_setup(Delta: float | None = None):
    """(spec, params, [q1, q2], JContext for q1) of the integral-check instance."""
    from .characters import DirichletCharacter
    from .cuspforms import delta_coefficients
    from .modular import PrimePowerModulus
    from .pipeline import SumSpec, choose_parameters, jcontext

    inst = INTEGRAL_INSTANCE
    chi = DirichletCharacter(PrimePowerModulus(inst["p"], inst["gamma"]), 1)
    d = inst["Delta"] if Delta is None else Delta
    spec = SumSpec(delta_coefficients(10), chi, inst["N"], inst["T"], Delta=d)
    P = choose_parameters(spec, off_diagonal=True, L_part2=True)
    qs = P.primes[:2]
    return spec, P, qs, jcontext(spec, P, qs[0])


def _row(check, inputs, value, bound, C):
    ratio = abs(value) / bound
    return {
        "op": check, "inputs": inputs, "value_re": complex(value).real, "value_im": complex(value).imag,
        "bound": bound, "ratio": ratio, "tolerance": C, "pass": bool(ratio <= C),
    }


def J_checks(Delta_values=(16.0, 32.0)) -> list[dict]:
    """|J| <= N^-3 at |r| = 10 S p^gamma q/N (each Delta) and |J| <= 10/sqrt(T) over the r range."""
    from .oscillatory import J_integral

    rows = []
    for d in Delta_values:
        spec, P, qs, ctx = integral_setup(d)
        q = qs[0]
        R = P.S * spec.p**spec.gamma * q / spec.N
        ys = P.X * spec.form.M * np.array(J_Y_FRACTIONS)
        for r in (int(round(10 * R)), -int(round(10 * R))):
            v = J_integral(ys, r, q, ctx, rel_tol=1e-8, abs_tol=1e-17)
            i = int(np.argmax(np.abs(v)))
            rows.append(_row("J_truncation", {"Delta": d, "r": r, "y/MX": J_Y_FRACTIONS[i]}, v[i], spec.N**-3.0, 1.0))
        if d != Delta_values[0]:
            continue
        Rint = int(math.floor(R))
        for r in range(-Rint, Rint + 1, J_R_STEP):
            v = J_integral(ys, r, q, ctx, rel_tol=1e-8, abs_tol=1e-14)
            i = int(np.argmax(np.abs(v)))
            rows.append(_row("J_size", {"Delta": d, "r": r, "y/MX": J_Y_FRACTIONS[i]}, v[i], 1 / math.sqrt(spec.T), SIZE_C))
    return rows


def L_checks(pairs=L_PAIRS, x_part2=L_X_PART2, equal_q=L_PAIRS_EQUAL_Q) -> list[dict]:
    """The three regimes: |x| = 2K, K^2/T <= |x| < K, and x = 0 with q1 = q2."""
    from .oscillatory import L_integral

    spec, P, qs, ctx = integral_setup()
    T, K, N = spec.T, P.K, spec.N
    rows = []

    def L(x, r1, r2, q1, q2):
        return L_integral(x, r1, r2, q1, q2, ctx, rel_tol=1e-6, abs_tol=1e-16).value

    for r1, r2, i1, i2 in pairs:
        q1, q2 = qs[i1], qs[i2]
        inputs = {"r1": r1, "r2": r2, "q1": q1, "q2": q2}
        for x in (2 * K, -2 * K):
            rows.append(_row("L_part1", {"x": x, **inputs}, L(x, r1, r2, q1, q2), N**-3.0, 1.0))
        for x in x_part2:
            rows.append(_row("L_part2", {"x": x, **inputs}, L(x, r1, r2, q1, q2), 1 / (T * math.sqrt(x)), SIZE_C))
    for r1, r2 in equal_q:
        q = qs[0]
        rows.append(_row("L_part3", {"x": 0.0, "r1": r1, "r2": r2, "q1": q, "q2": q}, L(0.0, r1, r2, q, q), 1 / T, SIZE_C))
    return rows


def diagonal_checks(weights=WEIGHTS) -> list[dict]:
    """I_k(a,a;X) against its main term on a^2 X in [1e2, 1e6], X in {1e3, 1e6}, frozen C."""
    rows = []
    for k in weights:
        C = const_mod.frozen("I_k_diag", str(k))
        for X in (1e3, 1e6):
            ax = np.logspace(2, 6, 17)
            a = np.sqrt(ax / X)
            vals = np.asarray(I_k(a, a, X, k, 1e-12))
            for ai, axi, v in zip(a, ax, vals):
                dev = v - I_k_diagonal_main(ai, X, k)
                rows.append(_row("I_k_diag", {"k": k, "X": X, "a2X": float(axi)}, dev, X * axi**-0.75, C))
    return rows


def smoothing_rows() -> list[dict]:
    from .characters import DirichletCharacter
    from .cuspforms import delta_coefficients
    from .modular import PrimePowerModulus
    from .pipeline import SumSpec, smoothing_residual

    g = SMOOTHING_GRID
    chi = DirichletCharacter(PrimePowerModulus(g["p"], g["gamma"]), 1)
    form = delta_coefficients(int(2 * max(g["N"])) + 1)
    out = []
    for N in g["N"]:
        for row in smoothing_residual(SumSpec(form, chi, N, g["T"]), g["Delta"]):
            out.append({"N": N, **row})
    return out


def fit_smoothing() -> dict:
    rows = smoothing_rows()
    worst = max(r["ratio"] for r in rows)
    return report("smoothing", SMOOTHING_GRID, worst, _round_up(2 * worst))


def scan_report() -> dict:
    from .cuspforms import delta_coefficients
    from .pipeline import exponent_scan, log_slopes

    form = delta_coefficients(2 * max(N for *_, N in SCAN_GRID) + 1)
    slopes = log_slopes(exponent_scan(form, SCAN_GRID))
    return report("scan_slope", {"grid": [list(g) for g in SCAN_GRID]}, max(slopes.values()), SCAN_SLOPE)


def fit_eta(names=("delta", "w16")) -> dict:
    from .cuspforms import builtin_form
    from .voronoi import calibrate_eta

    out = {}
    for name in names:
        form = builtin_form(name, 400)
        eta = calibrate_eta(form)
        out[form.name] = [round(eta.real, 6), round(eta.imag, 6)]
    return out


def size_reports() -> list[dict]:
    """Observed worst ratios for the a-priori constants (10 for sizes, 1 against N^-3)."""
    reps = []
    rows = J_checks() + L_checks()
    for check in ("J_truncation", "J_size", "L_part1", "L_part2", "L_part3"):
        sel = [r for r in rows if r["op"] == check]
        reps.append(report(check, [r["inputs"] for r in sel], max(r["ratio"] for r in sel), sel[0]["tolerance"]))
    return reps


def calibrate_all(path=None) -> dict:
    """The full one-time run: analytic fits, smoothing constant, eta_g, a-priori constants with observed ratios."""
    sm = fit_smoothing()
    extra = {
        "frozen": {"smoothing": sm["frozen_constant"], "eta_g": fit_eta(), "size_C": SIZE_C, "scan_slope": SCAN_SLOPE},
        "reports": [sm, scan_report()],
    }
    data = calibrate(extra=extra, path=path)
    data["reports"].extend(size_reports())
    const_mod.save(data, path)
    return data
