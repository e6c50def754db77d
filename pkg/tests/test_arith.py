"""Multiplicative functions, polynomial root counting, g-function diagnostics."""

import math
from fractions import Fraction
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdlab import arith
from pdlab.errors import ValidationError

X2_PLUS_1 = (1, 0, 1)  # constant-first: X**2 + 1
X3_MINUS_2 = (-2, 0, 0, 1)
FIBONACCI_POLY = (-1, -1, 1)  # X**2 - X - 1


def test_small_multiplicative_values():
    assert arith.euler_phi(12) == 4
    assert arith.big_omega(12) == 3
    assert arith.tau3(12) == 18
    assert (arith.euler_phi(1), arith.big_omega(1), arith.tau3(1)) == (1, 0, 1)
    assert arith.big_omega(8) == 3


def test_tau3_brute_force():
    for d in range(1, 200):
        brute = sum(
            1
            for a in range(1, d + 1)
            if d % a == 0
            for b in range(1, d + 1)
            if (d // a) % b == 0
        )
        assert arith.tau3(d) == brute


def test_discriminants():
    assert arith.discriminant(X2_PLUS_1) == -4
    assert arith.discriminant(X3_MINUS_2) == -108
    assert arith.discriminant(FIBONACCI_POLY) == 5


def test_root_count_pk_examples():
    assert arith.poly_root_count_pk(X2_PLUS_1, 5, 1) == 2
    assert arith.poly_root_count_pk(X2_PLUS_1, 3, 1) == 0
    assert arith.poly_root_count_pk(X2_PLUS_1, 2, 2) == 0
    assert sorted(arith.roots_mod(X2_PLUS_1, 5)) == [2, 3]


def test_root_count_examples():
    assert arith.poly_root_count(X2_PLUS_1, 65) == 4
    assert arith.poly_root_count(X2_PLUS_1, 1) == 1
    assert arith.poly_root_count(X2_PLUS_1, 12) == 0


@pytest.mark.parametrize("coeffs", [X2_PLUS_1, X3_MINUS_2, FIBONACCI_POLY])
def test_root_count_vs_exhaustive_scan(coeffs):
    for d in range(1, 500):
        scan = sum(1 for r in range(d) if arith.poly_eval(coeffs, r) % d == 0)
        assert arith.poly_root_count(coeffs, d) == scan, f"d={d}"


@pytest.mark.parametrize("coeffs", [X2_PLUS_1, X3_MINUS_2, FIBONACCI_POLY])
def test_hensel_bound(coeffs):
    # h(p**k) <= deg F whenever p does not divide disc F
    disc = arith.discriminant(coeffs)
    deg = arith.poly_degree(coeffs)
    for p in (2, 3, 5, 7, 11, 13, 97, 101):
        if disc % p == 0:
            continue
        for k in range(1, 6):
            h = arith.poly_root_count_pk(coeffs, p, k)
            assert 0 <= h <= deg
            # unramified: the count is stable in k
            assert h == arith.poly_root_count_pk(coeffs, p, 1)


def test_hensel_matches_scan_at_large_prime_powers():
    # beyond the scan budget the Hensel path must agree with direct checks
    p = 1009
    for k in (2, 3):
        h = arith.poly_root_count_pk(X2_PLUS_1, p, k)
        scan = sum(
            1
            for r in arith.roots_mod(X2_PLUS_1, p)
            for lift in range(p ** (k - 1))
            if arith.poly_eval(X2_PLUS_1, r + lift * p) % p**k == 0
        )
        assert h == scan


@settings(max_examples=200, deadline=None)
@given(
    st.integers(min_value=1, max_value=1000), st.integers(min_value=1, max_value=1000)
)
def test_h_multiplicative_on_coprime_pairs(m, n):
    if gcd(m, n) != 1:
        return
    h = lambda d: arith.poly_root_count(X2_PLUS_1, d)
    assert h(m * n) == h(m) * h(n)


def test_g_eval_examples():
    assert arith.g_eval(arith.GFunctionSpec(kind="reciprocal_totient"), 10) == Fraction(1, 4)
    assert arith.g_eval(arith.GFunctionSpec(kind="reciprocal"), 7) == Fraction(1, 7)
    g = arith.GFunctionSpec(kind="root_density", coeffs=X2_PLUS_1)
    assert arith.g_eval(g, 5) == Fraction(2, 5)


def test_g_in_unit_interval():
    for kind, coeffs in [
        ("reciprocal", ()),
        ("reciprocal_totient", ()),
        ("root_density", X2_PLUS_1),
        ("root_density", X3_MINUS_2),
    ]:
        g = arith.GFunctionSpec(kind=kind, coeffs=coeffs)
        for d in range(1, 2000):
            v = arith.g_eval(g, d)
            assert 0 <= v <= 1


def test_g_growth_bound():
    # g(d) <= C**Omega(d) / d with C = max(deg F, primes dividing disc F)
    g = arith.GFunctionSpec(kind="root_density", coeffs=X2_PLUS_1)
    c = max(2, 2)  # deg 2; disc -4 has prime divisor 2
    for d in range(1, 10**4):
        assert arith.g_eval(g, d) <= Fraction(c ** arith.big_omega(d), d)


def test_mertens_deviation_bounded():
    g = arith.GFunctionSpec(kind="reciprocal")
    for x in (10**2, 10**3, 10**4, 10**5, 10**6, 10**7):
        assert abs(arith.mertens_deviation(g, x)) <= 3.0
    gt = arith.GFunctionSpec(kind="reciprocal_totient")
    assert abs(arith.mertens_deviation(gt, 100)) <= 3.0
    gr = arith.GFunctionSpec(kind="root_density", coeffs=X2_PLUS_1)
    assert abs(arith.mertens_deviation(gr, 10**4)) <= 3.0


def test_partial_sums():
    sum_g, sum_h = arith.partial_sums_gh(arith.GFunctionSpec(kind="reciprocal"), 10)
    assert sum_g == pytest.approx(float(Fraction(7381, 2520)), abs=1e-12)
    assert sum_h is None
    g = arith.GFunctionSpec(kind="root_density", coeffs=X2_PLUS_1)
    sum_g, sum_h = arith.partial_sums_gh(g, 1000)
    brute_h = sum(arith.poly_root_count(X2_PLUS_1, d) for d in range(1, 1001))
    assert sum_h == brute_h
    assert sum_h <= 1000 * sum_g
    brute_g = sum(arith.poly_root_count(X2_PLUS_1, d) / d for d in range(1, 1001))
    assert sum_g == pytest.approx(brute_g, rel=1e-12)


def test_partial_sums_totient_polylog_growth():
    g = arith.GFunctionSpec(kind="reciprocal_totient")
    vals = [arith.partial_sums_gh(g, x)[0] for x in (10**2, 10**3, 10**4)]
    assert vals[0] < vals[1] < vals[2]
    # growth per decade is roughly constant (polylog), never decade-scale
    assert (vals[2] - vals[1]) < 2 * (vals[1] - vals[0]) + 1


def test_empirical_c_bound_reported():
    g = arith.GFunctionSpec(kind="root_density", coeffs=X2_PLUS_1)
    c = arith.empirical_c_bound(g, 10**4)
    assert 1.0 <= c <= 2.0 + 1e-9  # recipe constant max(D, p | disc) = 2


def test_invalid_g_kind():
    with pytest.raises(ValidationError):
        arith.GFunctionSpec(kind="nope")
