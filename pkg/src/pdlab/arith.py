"""Multiplicative arithmetic functions and per-sequence density functions g.

Covers the Euler totient, Omega, the threefold divisor function, distinct
root counts h(d) of integer polynomials (Hensel lifting off the
discriminant, exhaustive residue scans at ramified primes), and the
Mertens-type diagnostics sum_{p<=x} g(p) log p - log x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from pdlab import factor
from pdlab.errors import ResourceBudgetError, ValidationError

# Largest modulus for exhaustive residue scans (ramified prime powers).
SCAN_BUDGET = 10**6
# Largest x for which mertens_deviation will scan roots of a cubic-or-higher
# polynomial prime by prime; quadratics use Euler's criterion beyond this.
ROOT_SCAN_X_BUDGET = 10**5

_table = None


def _small_table(need: int) -> factor.PrimeTable:
    global _table
    need = max(need, 10**6)
    if _table is None or _table.limit < need:
        _table = factor.build_prime_table(need)
    return _table


def _factorize(d: int) -> factor.Factorization:
    return factor.factorize(d, _small_table(math.isqrt(d) + 1))


def euler_phi(d: int) -> int:
    if d < 1:
        raise ValidationError(f"euler_phi requires d >= 1, got {d}")
    out = 1
    for p, e in _factorize(d).factors:
        out *= (p - 1) * p ** (e - 1)
    return out


def big_omega(d: int) -> int:
    """Number of prime factors counted with multiplicity; Omega(1) = 0."""
    if d < 1:
        raise ValidationError(f"big_omega requires d >= 1, got {d}")
    return sum(e for _, e in _factorize(d).factors)


def tau3(d: int) -> int:
    """Threefold divisor function: ordered triples d1*d2*d3 = d."""
    if d < 1:
        raise ValidationError(f"tau3 requires d >= 1, got {d}")
    out = 1
    for _, e in _factorize(d).factors:
        out *= (e + 1) * (e + 2) // 2
    return out


# ---------------------------------------------------------------------------
# integer polynomials, constant-first coefficient order


def poly_eval(coeffs, x: int) -> int:
    out = 0
    for c in reversed(coeffs):
        out = out * x + c
    return out


def poly_derivative(coeffs) -> tuple[int, ...]:
    return tuple(i * c for i, c in enumerate(coeffs) if i >= 1)


def poly_degree(coeffs) -> int:
    deg = -1
    for i, c in enumerate(coeffs):
        if c != 0:
            deg = i
    return deg


def _sylvester_det(f, g) -> int:
    """Resultant of f and g via Bareiss fraction-free elimination."""
    m, n = poly_degree(f), poly_degree(g)
    if m < 0 or n < 0:
        return 0
    size = m + n
    mat = [[0] * size for _ in range(size)]
    frev = list(reversed(f[: m + 1]))
    grev = list(reversed(g[: n + 1]))
    for i in range(n):
        mat[i][i : i + m + 1] = frev
    for i in range(m):
        mat[n + i][i : i + n + 1] = grev
    sign = 1
    prev = 1
    for k in range(size - 1):
        if mat[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if mat[i][k] != 0), None)
            if swap is None:
                return 0
            mat[k], mat[swap] = mat[swap], mat[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                mat[i][j] = (mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j]) // prev
            mat[i][k] = 0
        prev = mat[k][k]
    return sign * mat[size - 1][size - 1]


def discriminant(coeffs) -> int:
    """disc F = (-1)^(D(D-1)/2) Res(F, F') / lead, exactly in integers."""
    d = poly_degree(coeffs)
    if d < 1:
        raise ValidationError("discriminant needs degree >= 1")
    res = _sylvester_det(list(coeffs[: d + 1]), list(poly_derivative(coeffs)))
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * res // coeffs[d]


def roots_mod(coeffs, m: int) -> list[int]:
    """All r in [0, m) with F(r) = 0 mod m, by vectorized residue scan."""
    if m < 1:
        raise ValidationError(f"modulus must be >= 1, got {m}")
    if m > SCAN_BUDGET:
        raise ResourceBudgetError(f"residue scan modulus {m} exceeds {SCAN_BUDGET}")
    if m == 1:
        return [0]
    r = np.arange(m, dtype=np.int64)
    val = np.zeros(m, dtype=np.int64)
    for c in reversed(coeffs):
        val = (val * r + c % m) % m
    return np.flatnonzero(val == 0).tolist()


def poly_root_count_pk(coeffs, p: int, k: int) -> int:
    """h(p^k): distinct roots of F modulo p^k.

    Off the discriminant every root mod p is simple and lifts uniquely
    (Hensel), so the count is stable in k; at ramified primes the residue
    scan is exhaustive and subject to SCAN_BUDGET.
    """
    if k < 1:
        raise ValidationError(f"exponent k must be >= 1, got {k}")
    disc = discriminant(coeffs)
    pk = p**k
    if disc % p == 0:
        if pk > SCAN_BUDGET:
            raise ResourceBudgetError(
                f"p={p} divides disc F and p**k={pk} exceeds the scan budget"
            )
        return len(roots_mod(coeffs, pk))
    if pk <= SCAN_BUDGET:
        return len(roots_mod(coeffs, pk))
    # p does not divide disc: lift the simple roots mod p
    roots = roots_mod(coeffs, p) if p <= SCAN_BUDGET else _roots_mod_large_p(coeffs, p)
    deriv = poly_derivative(coeffs)
    lifted = list(roots)
    mod = p
    for _ in range(k - 1):
        nxt = []
        mod_next = mod * p
        for r in lifted:
            fp = poly_eval(deriv, r) % p
            assert fp != 0, (
                "ramified lift at p not dividing disc F; discriminant bug"
            )
            inv = pow(fp, -1, p)
            r2 = (r - poly_eval(coeffs, r) * inv) % mod_next
            assert poly_eval(coeffs, r2) % mod_next == 0
            nxt.append(r2)
        lifted = nxt
        mod = mod_next
    return len(lifted)


def _roots_mod_large_p(coeffs, p: int) -> list[int]:
    """Root count support for primes above the scan budget (quadratics only)."""
    d = poly_degree(coeffs)
    if d != 2:
        raise ResourceBudgetError(
            f"root finding mod p={p} beyond scan budget supported only for degree 2"
        )
    a, b, c = coeffs[2], coeffs[1], coeffs[0]
    if a % p == 0:
        # degenerates to a linear congruence
        if b % p == 0:
            return [0] if c % p == 0 else []
        return [(-c * pow(b, -1, p)) % p]
    disc = (b * b - 4 * a * c) % p
    if disc == 0:
        return [(-b * pow(2 * a, -1, p)) % p]
    if pow(disc, (p - 1) // 2, p) != 1:
        return []
    s = _sqrt_mod_p(disc, p)
    inv2a = pow(2 * a, -1, p)
    return sorted({((-b + s) * inv2a) % p, ((-b - s) * inv2a) % p})


def _sqrt_mod_p(a: int, p: int) -> int:
    """Tonelli-Shanks; a must be a quadratic residue mod odd prime p."""
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def poly_root_count(coeffs, d: int) -> int:
    """h(d) = prod over p^k || d of h(p^k), by CRT multiplicativity."""
    if d < 1:
        raise ValidationError(f"poly_root_count requires d >= 1, got {d}")
    out = 1
    for p, e in _factorize(d).factors:
        out *= poly_root_count_pk(coeffs, p, e)
        if out == 0:
            return 0
    return out


# ---------------------------------------------------------------------------
# the density functions g


@dataclass(frozen=True)
class GFunctionSpec:
    """Multiplicative density g: 1/d, 1/phi(d), or h(d)/d for a polynomial."""

    kind: str  # "reciprocal" | "reciprocal_totient" | "root_density"
    coeffs: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("reciprocal", "reciprocal_totient", "root_density"):
            raise ValidationError(f"unknown g-function kind {self.kind!r}")
        if self.kind == "root_density" and poly_degree(self.coeffs) < 1:
            raise ValidationError("root_density needs a polynomial of degree >= 1")


def g_eval(g: GFunctionSpec, d: int) -> Fraction:
    """Exact rational value of g(d), always in [0, 1]."""
    if d < 1:
        raise ValidationError(f"g_eval requires d >= 1, got {d}")
    if g.kind == "reciprocal":
        return Fraction(1, d)
    if g.kind == "reciprocal_totient":
        return Fraction(1, euler_phi(d))
    return Fraction(poly_root_count(g.coeffs, d), d)


def _prime_root_count(coeffs, p: int, disc: int) -> int:
    """h(p), preferring the direct quadratic formula over a residue scan.

    The scan is kept for small p (it covers p = 2 and any degree), for
    ramified primes, and for degrees where no direct formula is wired up.
    """
    if disc % p == 0 or p <= ROOT_SCAN_X_BUDGET or poly_degree(coeffs) != 2:
        return len(roots_mod(coeffs, p))
    return len(_roots_mod_large_p(coeffs, p))


def _g_at_primes(g: GFunctionSpec, primes: np.ndarray) -> np.ndarray:
    if g.kind == "reciprocal":
        return 1.0 / primes.astype(np.float64)
    if g.kind == "reciprocal_totient":
        return 1.0 / (primes.astype(np.float64) - 1.0)
    disc = discriminant(g.coeffs)
    h = np.empty(len(primes), dtype=np.float64)
    for i, p in enumerate(primes):
        h[i] = _prime_root_count(g.coeffs, int(p), disc)
    return h / primes.astype(np.float64)


def mertens_deviation(g: GFunctionSpec, x: int) -> float:
    """sum_{p<=x} g(p) log p - log x, a boundedness diagnostic."""
    if x < 2:
        raise ValidationError(f"mertens_deviation requires x >= 2, got {x}")
    primes = _small_table(x).primes
    primes = primes[primes <= x]
    gp = _g_at_primes(g, primes)
    return float(np.sum(gp * np.log(primes.astype(np.float64))) - math.log(x))


def _g_h_values(g: GFunctionSpec, x: int):
    """Vectors g(n), h(n) for 1 <= n <= x via an spf division pass.

    h(n) = n*g(n) is the multiplicative numerator; returned only for
    root_density, where it is the polynomial root count.
    """
    spf = factor.smallest_factor_sieve(max(x, 2))[: x + 1]
    gv = np.ones(x + 1, dtype=np.float64)
    rem = np.arange(x + 1, dtype=np.int64)
    rem[:2] = 1
    idx = np.flatnonzero(rem > 1)
    rem = rem[idx]
    ramified: dict[int, int] = {}
    if g.kind == "root_density":
        disc = discriminant(g.coeffs)
        hp_cache: dict[int, float] = {}
    last_p = np.zeros(x + 1, dtype=np.int64)
    while idx.size:
        p = spf[rem]
        # spf emits each value's primes in nondecreasing runs, so "first
        # power of this prime" is exactly "differs from the previous prime"
        fresh = p != last_p[idx]
        if g.kind == "reciprocal":
            fac = 1.0 / p
        elif g.kind == "reciprocal_totient":
            # phi(p^e) = (p-1) p^(e-1): 1/(p-1) on the first power, then 1/p
            fac = np.where(fresh, 1.0 / (p - 1.0), 1.0 / p.astype(np.float64))
        else:
            uniq, inv = np.unique(p, return_inverse=True)
            hp_u = np.empty(uniq.size, dtype=np.float64)
            for j, pr in enumerate(uniq.tolist()):
                if pr not in hp_cache:
                    hp_cache[pr] = float(_prime_root_count(g.coeffs, pr, disc))
                    if disc % pr == 0:
                        ramified[pr] = 1
                hp_u[j] = hp_cache[pr]
            hp = hp_u[inv]
            # h(p^e) = h(p) off the discriminant; ramified primes fixed below
            fac = np.where(fresh, hp / p, 1.0 / p.astype(np.float64))
        gv[idx] *= fac
        last_p[idx] = p
        rem //= p
        alive = rem > 1
        idx, rem = idx[alive], rem[alive]
    if g.kind == "root_density":
        for pr in ramified:
            hp1 = len(roots_mod(g.coeffs, pr))
            if hp1 == 0:
                continue  # the generic pass already zeroed every multiple of pr
            pk, k = pr, 1
            while pk * pr <= x:
                pk *= pr
                k += 1
                hpk = poly_root_count_pk(g.coeffs, pr, k)
                if hpk == 0:
                    # roots cannot reappear at higher powers
                    gv[pk::pk] = 0.0
                    break
                sel = np.arange(pk, x + 1, pk)
                if pk * pr <= x:
                    sel = sel[sel % (pk * pr) != 0]  # exact power p^k || n
                gv[sel] *= hpk / hp1
    gv[0] = 0.0
    return gv


def partial_sums_gh(g: GFunctionSpec, x: int):
    """(sum_{n<=x} g(n), sum_{n<=x} h(n) or None) for growth-trend checks."""
    if x < 1:
        raise ValidationError(f"partial_sums_gh requires x >= 1, got {x}")
    if x > 10**7:
        raise ResourceBudgetError(f"partial_sums_gh capped at x = 1e7, got {x}")
    gv = _g_h_values(g, x)
    gsum = float(np.sum(gv))
    if g.kind != "root_density":
        return gsum, None
    n = np.arange(x + 1, dtype=np.float64)
    return gsum, float(np.sum(gv * n))


def empirical_c_bound(g: GFunctionSpec, dmax: int) -> float:
    """Smallest C with g(d) <= C**Omega(d) / d over 2 <= d <= dmax.

    The constant in the growth condition is existential; this reports the
    measured value max_d (d*g(d))**(1/Omega(d)).
    """
    if dmax < 2:
        raise ValidationError(f"empirical_c_bound requires dmax >= 2, got {dmax}")
    gv = _g_h_values(g, dmax)
    spf = factor.smallest_factor_sieve(max(dmax, 2))[: dmax + 1]
    omega = np.zeros(dmax + 1, dtype=np.int64)
    rem = np.arange(dmax + 1, dtype=np.int64)
    rem[:2] = 1
    idx = np.flatnonzero(rem > 1)
    rem = rem[idx]
    while idx.size:
        omega[idx] += 1
        rem //= spf[rem]
        alive = rem > 1
        idx, rem = idx[alive], rem[alive]
    d = np.arange(dmax + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        c = (gv[2:] * d[2:]) ** (1.0 / omega[2:])
    return float(np.max(c))


@lru_cache(maxsize=None)
def _phi_sieve(limit: int) -> np.ndarray:
    """phi(d) for all d <= limit, via the standard multiplicative sieve."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:  # p prime
            phi[p::p] -= phi[p::p] // p
    return phi
