"""Normalized Hecke eigenvalues of level-one newforms and imported coefficient tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .characters import DirichletCharacter
from .errors import CoefficientTableTooShort, ConfigError, MissingPrime, OutOfRange, TableValidationError
from .modular import PrimePowerModulus, prime_factors

DELIGNE_TOL = 1e-6


@dataclass(frozen=True)
class HeckeEigenvalueTable:
    """lam[n] holds lambda_g(n) for 1 <= n <= n_max; lam[0] is unused and set to 0."""

    k: int
    M: int
    lam: np.ndarray = field(repr=False)
    xi: DirichletCharacter | int | None = None
    name: str = "custom"

    @property
    def n_max(self) -> int:
        return self.lam.size - 1

    @property
    def self_dual(self) -> bool:
        return self.xi is None and not np.iscomplexobj(self.lam)

    def xi_value(self, n: int) -> complex:
        """Nebentypus value xi(n) (trivial character mod M when xi is None)."""
        if self.xi is None:
            return 1.0 if np.gcd(n, self.M) == 1 else 0.0
        if isinstance(self.xi, DirichletCharacter):
            return complex(self.xi.values(n))
        raise ConfigError("nebentypus given only by index; its values are unavailable for this level")

    def require(self, n_hi: int) -> None:
        if n_hi > self.n_max:
            raise CoefficientTableTooShort(f"need lambda(n) up to {n_hi}, table stops at {self.n_max}")

    def __getitem__(self, n):
        return self.lam[n]


def divisor_counts(n_max: int) -> np.ndarray:
    d = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, n_max + 1):
        d[k::k] += 1
    return d


def _smallest_prime_factor(n_max: int) -> np.ndarray:
    spf = np.zeros(n_max + 1, dtype=np.int64)
    for p in range(2, n_max + 1):
        if spf[p] == 0:
            spf[p::p] = np.where(spf[p::p] == 0, p, spf[p::p])
    return spf


def _eta_cubed(n_terms: int):
    """Jacobi: prod (1 - q^n)^3 = sum_k (-1)^k (2k+1) q^(k(k+1)/2)."""
    from flint import fmpz_poly

    coeffs = [0] * n_terms
    k = 0
    while k * (k + 1) // 2 < n_terms:
        coeffs[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    return fmpz_poly(coeffs)


def _tau_integers(n_max: int) -> list[int]:
    """Ramanujan tau(n) for n = 0..n_max from Delta = q prod (1 - q^n)^24."""
    series = _eta_cubed(n_max).pow_trunc(8, n_max)
    c = [int(x) for x in series.coeffs()]
    c += [0] * (n_max - len(c))
    return [0] + c[:n_max]


def delta_coefficients(n_max: int) -> HeckeEigenvalueTable:
    """lambda(n) = tau(n) / n^(11/2) for the discriminant form (k=12, M=1)."""
    if n_max < 1:
        raise OutOfRange("n_max must be at least 1")
    tau = _tau_integers(n_max)
    n = np.arange(n_max + 1, dtype=np.float64)
    lam = np.array([float(t) for t in tau])
    lam[1:] /= n[1:] ** 5.5
    return HeckeEigenvalueTable(12, 1, lam, None, "Delta")


def weight16_coefficients(n_max: int) -> HeckeEigenvalueTable:
    """The weight-16 level-one newform Delta * E_4, normalized by n^(15/2)."""
    from flint import fmpz_poly

    if n_max < 1:
        raise OutOfRange("n_max must be at least 1")
    sig = [0] * n_max
    for d in range(1, n_max):
        d3 = d**3
        for m in range(d, n_max, d):
            sig[m] += d3
    e4 = fmpz_poly([1] + [240 * s for s in sig[1:]])
    delta = fmpz_poly(_tau_integers(n_max))
    prod = (delta * e4).coeffs()[: n_max + 1]
    prod = [int(x) for x in prod] + [0] * (n_max + 1 - len(prod))
    lam = np.array([float(x) for x in prod])
    n = np.arange(n_max + 1, dtype=np.float64)
    lam[1:] /= n[1:] ** 7.5
    return HeckeEigenvalueTable(16, 1, lam, None, "Delta*E4")


def hecke_extend(table: HeckeEigenvalueTable, primes_given_up_to: int, n_max: int | None = None) -> HeckeEigenvalueTable:
    """Rebuild every lambda(n), n <= n_max, from the prime values lambda(p), p <= primes_given_up_to.

    Uses lambda(p^(j+1)) = lambda(p) lambda(p^j) - xi(p) lambda(p^(j-1)) for p not dividing M,
    lambda(p^j) = lambda(p)^j for p | M, and multiplicativity.
    """
    n_max = table.n_max if n_max is None else n_max
    spf = _smallest_prime_factor(n_max)
    src = table.lam
    dtype = complex if np.iscomplexobj(src) or table.xi is not None else float
    lam = np.zeros(n_max + 1, dtype=dtype)
    if n_max >= 1:
        lam[1] = 1.0
    for n in range(2, n_max + 1):
        p = int(spf[n])
        if p > primes_given_up_to or p > table.n_max or np.isnan(src[p]):
            raise MissingPrime(f"lambda({p}) not supplied")
        m, e = n, 0
        while m % p == 0:
            m //= p
            e += 1
        if m > 1:
            lam[n] = lam[n // m] * lam[m]
            continue
        # n = p^e
        if e == 1:
            lam[n] = src[p]
        elif table.M % p == 0:
            lam[n] = lam[n // p] * src[p]
        else:
            lam[n] = src[p] * lam[n // p] - table.xi_value(p) * lam[n // (p * p)]
    return HeckeEigenvalueTable(table.k, table.M, lam, table.xi, table.name + "+hecke")


def rankin_selberg_partial(table: HeckeEigenvalueTable, N: int) -> float:
    if N < 1 or N > table.n_max:
        raise OutOfRange(f"N={N} outside [1, {table.n_max}]")
    return float(np.sum(np.abs(table.lam[1 : N + 1]) ** 2))


def deligne_violations(table: HeckeEigenvalueTable, tol: float = 0.0) -> np.ndarray:
    """Indices n with |lambda(n)| > d(n) + tol."""
    d = divisor_counts(table.n_max)
    bad = np.abs(table.lam[1:]) > d[1:] + tol
    return np.flatnonzero(bad) + 1


def validate_table(table: HeckeEigenvalueTable, tol: float = DELIGNE_TOL) -> None:
    if table.n_max < 1 or abs(table.lam[1] - 1) > tol:
        raise TableValidationError("lambda(1) must equal 1")
    bad = deligne_violations(table, tol)
    if bad.size:
        raise TableValidationError(f"Deligne bound violated at n={int(bad[0])} ({bad.size} entries)")


def _parse_header(line: str) -> tuple[int, int, str]:
    fields = dict(tok.split("=", 1) for tok in line.lstrip("#").split())
    try:
        return int(fields["k"]), int(fields["M"]), fields.get("xi", "trivial")
    except (KeyError, ValueError) as exc:
        raise TableValidationError(f"bad header {line!r}") from exc


def _nebentypus(M: int, xi: str):
    if xi == "trivial":
        return None
    idx = int(xi)
    if M % 2 == 1 and M > 1 and len(prime_factors(M)) == 1:
        p = prime_factors(M)[0]
        e = 0
        while p ** (e + 1) <= M and M % p ** (e + 1) == 0:
            e += 1
        return DirichletCharacter(PrimePowerModulus(p, e), idx)
    return idx


def load_table(path: str | Path) -> HeckeEigenvalueTable:
    """Read "#k=.. M=.. xi=.." followed by "n<TAB>lambda_n" lines; validates on load."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise TableValidationError("missing '#k= M= xi=' header")
    k, M, xi = _parse_header(lines[0])
    entries: dict[int, complex] = {}
    for ln in lines[1:]:
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split("\t")
        if len(parts) != 2:
            raise TableValidationError(f"bad line {ln!r}")
        try:
            entries[int(parts[0])] = complex(parts[1].replace(" ", ""))
        except ValueError as exc:
            raise TableValidationError(f"bad line {ln!r}") from exc
    n_max = max(entries)
    is_complex = any(v.imag != 0 for v in entries.values())
    lam = np.full(n_max + 1, np.nan, dtype=complex if is_complex else float)
    lam[0] = 0
    for n, v in entries.items():
        lam[n] = v if is_complex else v.real
    if np.isnan(lam[1:]).any():
        raise TableValidationError("table must list every n from 1 to n_max")
    table = HeckeEigenvalueTable(k, M, lam, _nebentypus(M, xi), Path(path).stem)
    validate_table(table)
    return table


def save_table(table: HeckeEigenvalueTable, path: str | Path) -> None:
    if table.xi is None:
        xi = "trivial"
    elif isinstance(table.xi, DirichletCharacter):
        xi = str(table.xi.index)
    else:
        xi = str(table.xi)
    rows = [f"#k={table.k} M={table.M} xi={xi}"]
    for n in range(1, table.n_max + 1):
        v = table.lam[n]
        rows.append(f"{n}\t{complex(v)!r}" if np.iscomplexobj(table.lam) else f"{n}\t{float(v)!r}")
    Path(path).write_text("\n".join(rows) + "\n")


def builtin_form(name: str, n_max: int) -> HeckeEigenvalueTable:
    if name in ("delta", "Delta", "12"):
        return delta_coefficients(n_max)
    if name in ("w16", "16", "Delta*E4"):
        return weight16_coefficients(n_max)
    raise ConfigError(f"unknown built-in form {name!r}")
