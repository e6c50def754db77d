"""The four arithmetic sequence families and their counting functions.

Each spec is an indicator sequence: uniform integers, shifted primes
p - a, values of an irreducible polynomial, and the Thue-Morse zero set
(even number of binary 1s).  Membership, ascending enumeration up to x,
and the counts N(x) and N_d(x) are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from pdlab import arith, factor
from pdlab.errors import ResourceBudgetError, ValidationError

# Largest x for which dense enumeration (uniform / Thue-Morse) is allowed.
MAX_DENSE_X = 200_000_000
# Primes used to certify irreducibility of degrees 4..6 by reduction mod p.
_CERT_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

KINDS = ("uniform", "shifted_primes", "poly", "thue_morse")


@dataclass(frozen=True)
class SequenceSpec:
    """An arithmetic sequence under study, with its known level of distribution.

    For kind "poly" the coefficients are constant-first, e.g. X**2 + 1 is
    (1, 0, 1); the polynomial must be irreducible over the rationals with
    positive leading coefficient, and degree is capped at 6 (the
    irreducibility certificate is a rational-root test up to degree 3 and
    reduction modulo small primes up to degree 6 -- polynomials such as
    X**4 + 1 that are reducible modulo every prime are conservatively
    rejected).
    """

    kind: str
    shift: int = 0
    coeffs: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "poly":
            object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
            _check_poly(self.coeffs)

    @property
    def degree(self) -> int:
        return arith.poly_degree(self.coeffs) if self.kind == "poly" else 0

    @property
    def theta(self) -> Fraction:
        """The sequence's level of distribution."""
        if self.kind == "shifted_primes":
            return Fraction(1, 2)
        if self.kind == "poly":
            return Fraction(1, self.degree)
        return Fraction(1)

    def g_function(self) -> arith.GFunctionSpec:
        """The density g(d) paired with the sequence.

        Thue-Morse defaults to g(d) = 1/d: equidistribution in residue
        classes makes the relative density of the zero set 1/d, but this
        pairing is an editorial default, not a quoted result.
        """
        if self.kind == "shifted_primes":
            return arith.GFunctionSpec(kind="reciprocal_totient")
        if self.kind == "poly":
            return arith.GFunctionSpec(kind="root_density", coeffs=self.coeffs)
        return arith.GFunctionSpec(kind="reciprocal")

    def to_dict(self) -> dict:
        if self.kind == "shifted_primes":
            return {"kind": self.kind, "shift": self.shift}
        if self.kind == "poly":
            return {"kind": self.kind, "coeffs": list(self.coeffs)}
        return {"kind": self.kind}

    @staticmethod
    def from_dict(d: dict) -> "SequenceSpec":
        kind = d.get("kind")
        if kind == "shifted_primes":
            if "shift" not in d:
                raise ValidationError("shifted_primes spec requires field 'shift'")
            return shifted_primes(int(d["shift"]))
        if kind == "poly":
            if "coeffs" not in d:
                raise ValidationError("poly spec requires field 'coeffs'")
            return polynomial_values(d["coeffs"])
        if kind == "uniform":
            return uniform_integers()
        if kind == "thue_morse":
            return thue_morse_zeros()
        raise ValidationError(f"unknown sequence kind {kind!r}")


@dataclass(frozen=True)
class CountPair:
    """N(x) together with N_d(x); always 0 <= N_d(x) <= N(x)."""

    n_total: int
    n_div: int
    x: int
    d: int

    def __post_init__(self):
        if not 0 <= self.n_div <= self.n_total:
            raise ValidationError("count invariant 0 <= N_d(x) <= N(x) violated")


def uniform_integers() -> SequenceSpec:
    return SequenceSpec(kind="uniform")


def shifted_primes(a: int) -> SequenceSpec:
    """Members are the positive values p - a over primes p; a may be negative."""
    return SequenceSpec(kind="shifted_primes", shift=int(a))


def polynomial_values(coeffs) -> SequenceSpec:
    return SequenceSpec(kind="poly", coeffs=tuple(int(c) for c in coeffs))


def thue_morse_zeros() -> SequenceSpec:
    return SequenceSpec(kind="thue_morse")


# ---------------------------------------------------------------------------
# irreducibility certification


def _check_poly(coeffs) -> None:
    deg = arith.poly_degree(coeffs)
    if deg < 1:
        raise ValidationError("polynomial degree must be >= 1")
    if deg > 6:
        raise ValidationError("polynomial degrees above 6 are not supported")
    if coeffs[deg] <= 0:
        raise ValidationError("polynomial must have positive leading coefficient")
    if len(coeffs) != deg + 1:
        raise ValidationError("trailing zero coefficients are not allowed")
    if deg == 1:
        return
    if coeffs[0] == 0:
        raise ValidationError("polynomial is reducible: X divides it")
    if deg <= 3:
        if _has_rational_root(coeffs):
            raise ValidationError("polynomial is reducible: it has a rational root")
        return
    for p in _CERT_PRIMES:
        if coeffs[deg] % p != 0 and _irreducible_mod_p(coeffs, p):
            return
    raise ValidationError(
        "could not certify irreducibility modulo small primes; "
        "polynomial rejected (this check is conservative)"
    )


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    for i in range(1, math.isqrt(n) + 1):
        if n % i == 0:
            out.extend((i, n // i))
    return sorted(set(out))


def _has_rational_root(coeffs) -> bool:
    deg = arith.poly_degree(coeffs)
    for q in _divisors(coeffs[deg]):
        for p in _divisors(coeffs[0]):
            for s in (p, -p):
                # root s/q iff sum c_i s^i q^(deg-i) = 0
                val = sum(
                    c * s**i * q ** (deg - i) for i, c in enumerate(coeffs)
                )
                if val == 0:
                    return True
    return False


def _poly_mod(a, p):
    a = [c % p for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a, b, m, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] = (out[i + j] + ca * cb) % p
    return _poly_rem(out, m, p)


def _poly_rem(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, cm in enumerate(m):
            a[shift + i] = (a[shift + i] - c * cm) % p
        while a and a[-1] == 0:
            a.pop()
    return a


def _irreducible_mod_p(coeffs, p: int) -> bool:
    """F irreducible over F_p, for deg F <= 6: no factor of degree <= deg/2.

    Checks gcd(F, X^(p^d) - X) = 1 for d = 1..deg//2 plus squarefreeness.
    """
    f = _poly_mod(list(coeffs), p)
    deg = len(f) - 1
    if deg != arith.poly_degree(coeffs):
        return False  # degree dropped mod p; certificate void
    df = _poly_mod(list(arith.poly_derivative(coeffs)), p)
    if not df or len(_gcd_mod(f, df, p)) > 1:
        return False
    xq = [0, 1]  # X
    for _ in range(deg // 2):
        xq = _poly_powmod(xq, p, f, p)
        diff = list(xq)
        while len(diff) < 2:
            diff.append(0)
        diff[1] = (diff[1] - 1) % p
        diff = _poly_mod(diff, p)
        if not diff or len(_gcd_mod(f, diff, p)) > 1:
            return False
    return True


def _gcd_mod(a, b, p):
    a, b = _poly_mod(a, p), _poly_mod(b, p)
    while b:
        r = _poly_rem(a, b, p)
        a, b = b, r
    return a


def _poly_powmod(base, e, m, p):
    result = [1]
    base = _poly_rem(list(base), m, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


# ---------------------------------------------------------------------------
# membership and enumeration


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3):
        if n % p == 0:
            return n == p
    i = 5
    while i * i <= n:
        if n % i == 0 or n % (i + 2) == 0:
            return False
        i += 6
    return True


def _popcount_parity_even(n: int) -> bool:
    return bin(n).count("1") % 2 == 0


def _parity_even_vec(arr: np.ndarray) -> np.ndarray:
    v = arr.astype(np.uint64)
    for s in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(s)
    return (v & np.uint64(1)) == 0


def _poly_bounds(spec: SequenceSpec):
    """(n0, exceptions): F is increasing and positive for n >= n0.

    The finitely many smaller arguments contribute the exception list of
    their positive values, mirroring the split at n0 used to analyse
    polynomial sequences.
    """
    coeffs = spec.coeffs
    deg = spec.degree
    lead = coeffs[deg]
    # Cauchy bounds on the real roots of F and F'
    bound_f = 1 + max(abs(c) for c in coeffs[:deg]) / lead if deg >= 1 else 1
    dcoeffs = arith.poly_derivative(coeffs)
    ddeg = arith.poly_degree(dcoeffs)
    if ddeg >= 1:
        bound_d = 1 + max(abs(c) for c in dcoeffs[:ddeg]) / dcoeffs[ddeg]
    else:
        bound_d = 1
    n0 = int(math.ceil(max(bound_f, bound_d))) + 1
    exceptions = {
        arith.poly_eval(coeffs, n)
        for n in range(1, n0)
        if arith.poly_eval(coeffs, n) >= 1
    }
    return n0, exceptions


def membership(spec: SequenceSpec, n: int) -> bool:
    """Whether a_n = 1, i.e. n is a member of the sequence."""
    if n < 1:
        raise ValidationError(f"membership requires n >= 1, got {n}")
    if spec.kind == "uniform":
        return True
    if spec.kind == "shifted_primes":
        return _is_prime(n + spec.shift)
    if spec.kind == "thue_morse":
        return _popcount_parity_even(n)
    n0, exceptions = _poly_bounds(spec)
    if n in exceptions:
        return True
    # F is strictly increasing on [n0, inf): invert by bisection
    lo, hi = n0, n0
    while arith.poly_eval(spec.coeffs, hi) < n:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if arith.poly_eval(spec.coeffs, mid) < n:
            lo = mid + 1
        else:
            hi = mid
    return arith.poly_eval(spec.coeffs, lo) == n


def members(spec: SequenceSpec, x: int) -> np.ndarray:
    """All members <= x, ascending, as an int64 array."""
    if x < 1:
        raise ValidationError(f"members requires x >= 1, got {x}")
    if spec.kind == "uniform":
        if x > MAX_DENSE_X:
            raise ResourceBudgetError(f"x={x} exceeds dense enumeration cap")
        return np.arange(1, x + 1, dtype=np.int64)
    if spec.kind == "thue_morse":
        if x > MAX_DENSE_X:
            raise ResourceBudgetError(f"x={x} exceeds dense enumeration cap")
        n = np.arange(1, x + 1, dtype=np.int64)
        return n[_parity_even_vec(n)]
    if spec.kind == "shifted_primes":
        top = x + spec.shift
        if top < 2:
            return np.empty(0, dtype=np.int64)
        primes = factor.build_prime_table(top).primes
        vals = primes - spec.shift
        return vals[vals >= 1]
    # polynomial values: generate directly
    n0, _ = _poly_bounds(spec)
    out = []
    n = 1
    while True:
        v = arith.poly_eval(spec.coeffs, n)
        if n >= n0 and v > x:
            break
        if 1 <= v <= x:
            out.append(v)
        n += 1
    return np.array(sorted(set(out)), dtype=np.int64)


def count(spec: SequenceSpec, x: int) -> int:
    """N(x) = number of members <= x."""
    return len(members(spec, x))


def count_in_class(spec: SequenceSpec, x: int, d: int) -> int:
    """N_d(x) = number of members <= x divisible by d."""
    if d < 1:
        raise ValidationError(f"count_in_class requires d >= 1, got {d}")
    if spec.kind == "uniform":
        return x // d
    if spec.kind == "thue_morse":
        if x > MAX_DENSE_X:
            raise ResourceBudgetError(f"x={x} exceeds dense enumeration cap")
        mult = np.arange(d, x + 1, d, dtype=np.int64)
        return int(np.count_nonzero(_parity_even_vec(mult)))
    m = members(spec, x)
    return int(np.count_nonzero(m % d == 0))


def count_pair(spec: SequenceSpec, x: int, d: int) -> CountPair:
    return CountPair(
        n_total=count(spec, x), n_div=count_in_class(spec, x, d), x=x, d=d
    )
