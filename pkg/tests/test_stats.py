"""Empirical estimators on arithmetic samples, cross-checked by brute force."""

import math

import numpy as np
import pytest
import sympy

from pdlab import dickman, sequences, stats
from pdlab.boxes import box
from pdlab.errors import ValidationError


@pytest.fixture(scope="module")
def uniform_small():
    return stats.build_sample_set(sequences.uniform_integers(), 3000)


@pytest.fixture(scope="module")
def brute_spectra():
    out = {}
    for u in range(1, 3001):
        if u == 1:
            out[u] = [1.0]
            continue
        lu = math.log(u)
        entries = []
        for p, e in sympy.factorint(u).items():
            entries += [math.log(p) / lu] * e
        entries.sort(reverse=True)
        out[u] = entries
    return out


def test_tail_frequency_matches_brute_force(uniform_small, brute_spectra):
    for eps in (0.1, 0.3, 0.5):
        want = sum(1 for e in brute_spectra.values() if e[0] >= 1 - eps) / 3000
        assert stats.tail_frequency(uniform_small, eps).value == pytest.approx(want)


def test_joint_cdf_matches_brute_force(uniform_small, brute_spectra):
    for c in ([0.5], [0.9, 0.5], [0.8, 0.5, 0.3]):
        want = (
            sum(
                1
                for e in brute_spectra.values()
                if all(
                    (e[j] if j < len(e) else 0.0) <= cj for j, cj in enumerate(c)
                )
            )
            / 3000
        )
        assert stats.empirical_joint_cdf(uniform_small, c).value == pytest.approx(want)


def test_corr_matches_brute_force(uniform_small, brute_spectra):
    eta = box((0.15, 0.25), (0.3, 0.4))
    want = (
        sum(
            sum(1 for v in e if 0.15 <= v <= 0.25) * sum(1 for v in e if 0.3 <= v <= 0.4)
            for e in brute_spectra.values()
        )
        / 3000
    )
    assert stats.empirical_corr(uniform_small, eta).value == pytest.approx(want)


def test_corr_k1_counts_large_factors(uniform_small, brute_spectra):
    # k = 1 with eta = 1[[alpha, 1]] is the mean number of prime factors
    # (with multiplicity) of size >= u**alpha
    alpha = 0.3
    want = sum(
        sum(1 for v in e if v >= alpha) for e in brute_spectra.values()
    ) / 3000
    got = stats.empirical_corr(uniform_small, box((alpha, 1.0))).value
    assert got == pytest.approx(want)


def test_tail_cdf_internal_consistency():
    # at eps = 0.1 no integer u <= 1e5 has leading entry exactly 0.9, so
    # the closed boundary conventions cannot double-count
    s = stats.build_sample_set(sequences.uniform_integers(), 10**5)
    assert not np.any(s.top[:, 0] == 0.9)
    tail = stats.tail_frequency(s, 0.1).value
    cdf = stats.empirical_joint_cdf(s, [0.9]).value
    assert tail == pytest.approx(1.0 - cdf, abs=1e-15)


def test_u_equals_one_counts_in_every_tail():
    s = stats.build_sample_set(sequences.uniform_integers(), 1)
    assert s.top[0, 0] == 1.0
    assert stats.tail_frequency(s, 0.05).value == 1.0


def test_floor_truncation_respected(uniform_small):
    s = stats.build_sample_set(sequences.uniform_integers(), 3000, floor=0.2)
    assert (s.entry_val >= 0.2).all()
    with pytest.raises(ValidationError):
        stats.empirical_corr(s, box((0.1, 0.3)))  # support dips below floor
    eta = box((0.25, 0.5))
    assert stats.empirical_corr(s, eta).value == pytest.approx(
        stats.empirical_corr(uniform_small, eta).value
    )


def test_sparse_trial_division_path():
    # polynomial values are sparse: forces the trial-division branch
    s = stats.build_sample_set(sequences.polynomial_values([1, 0, 1]), 10**6)
    assert s.n == 999  # n**2 + 1 <= 1e6 exactly for n <= 999
    for i, u in enumerate(s.u[:50]):
        lu = math.log(int(u))
        want = sorted(
            (math.log(p) / lu for p, e in sympy.factorint(int(u)).items() for _ in range(e)),
            reverse=True,
        )
        got = np.sort(s.entry_val[s.entry_idx == i])[::-1]
        assert np.allclose(got, want, atol=1e-12)


def test_subsampling_is_seeded():
    a = stats.build_sample_set(
        sequences.uniform_integers(), 10**5, max_members=1000, subsample_seed=4
    )
    b = stats.build_sample_set(
        sequences.uniform_integers(), 10**5, max_members=1000, subsample_seed=4
    )
    c = stats.build_sample_set(
        sequences.uniform_integers(), 10**5, max_members=1000, subsample_seed=5
    )
    assert np.array_equal(a.u, b.u)
    assert not np.array_equal(a.u, c.u)
    assert not a.exhaustive and a.subsample_seed == 4


def test_ks_distance_self_test():
    ref = stats.dickman_reference_cdf()
    # draw exactly from the reference by inverting rho(1/c) on a fine grid
    grid_c = np.linspace(0.02, 1.0, 20001)
    cdf_vals = ref(grid_c)
    probs = np.linspace(1e-4, 1 - 1e-4, 4000)
    sample = np.interp(probs, cdf_vals, grid_c)
    assert stats.ks_distance(sample, ref) <= 2e-3
    # a reversed reference is maximally wrong
    assert stats.ks_distance(sample, lambda c: 1.0 - ref(np.asarray(c))) > 0.4


def test_lod_uniform_closed_bound():
    for x in (10**4, 10**5):
        for c in (0.3, 0.5):
            err, max_r = stats.lod_error_sum(sequences.uniform_integers(), x, c)
            assert err <= x ** (c - 1.0)
            assert max_r < 1.0


def test_lod_brute_force_small():
    spec = sequences.shifted_primes(1)
    x, c = 2000, 0.4
    err, max_r = stats.lod_error_sum(spec, x, c)
    mem = sequences.members(spec, x)
    n = len(mem)
    total = 0.0
    worst = 0.0
    from pdlab import arith

    for d in range(1, int(x**c) + 1):
        nd = int(np.count_nonzero(mem % d == 0))
        r = nd - float(n) / arith.euler_phi(d)
        total += abs(r)
        worst = max(worst, abs(r))
    assert err == pytest.approx(total / n)
    assert max_r == pytest.approx(worst)


def test_repeated_factor_brute_force():
    s = stats.build_sample_set(sequences.uniform_integers(), 20000)
    alpha, c = 0.2, 0.45
    got = stats.repeated_factor_frequency(s, alpha, c).value
    lo, hi = 20000**alpha, 20000**c
    brute = 0
    for u in range(1, 20001):
        if any(
            lo <= p <= hi and e >= 2 for p, e in sympy.factorint(u).items()
        ):
            brute += 1
    assert got == pytest.approx(brute / 20000)


def test_repeated_factor_above_sqrt_is_zero():
    s = stats.build_sample_set(sequences.uniform_integers(), 10**4)
    assert stats.repeated_factor_frequency(s, 0.6, 0.9).value == 0.0


def test_repeated_factor_bounded_by_prime_square_sum():
    s = stats.build_sample_set(sequences.uniform_integers(), 10**6)
    alpha, c = 0.1, 0.4
    est = stats.repeated_factor_frequency(s, alpha, c)
    from pdlab import factor

    x = 10**6
    hi = int(x**c)
    table = factor.build_prime_table(hi + 1)
    window = table.primes[(table.primes >= x**alpha) & (table.primes <= hi)]
    bound = 2.0 * float(np.sum(1.0 / window.astype(np.float64) ** 2))
    assert est.value <= bound


def test_sieve_survivors_uniform():
    res = stats.sieve_survivor_experiment(
        sequences.uniform_integers(), 10**6, eps=0.05, delta0=0.2
    )
    assert abs(res.ratio - 1.0) <= 0.10  # within 10% of the Mertens product
    assert res.survivors <= res.n_total


def test_sieve_single_prime_window():
    # a window holding exactly one prime checks a single factor of V
    spec = sequences.uniform_integers()
    x = 10**4
    # window (10**1.04, 10**1.108) = (10.96, 12.83) holds only the prime 11
    res1 = stats.sieve_survivor_experiment(spec, x, eps=0.26, z0=2.0, delta0=0.277)
    assert res1.n_window_primes == 1
    direct = sum(1 for u in range(1, x + 1) if u % 11 != 0)
    assert res1.survivors == direct
    assert res1.v_product == pytest.approx(1.0 - 1.0 / 11.0)


def test_sieve_empty_window_raises():
    with pytest.raises(ValidationError, match="eps"):
        stats.sieve_survivor_experiment(
            sequences.uniform_integers(), 100, eps=0.45, delta0=0.46
        )


def test_sieve_shifted_primes_ratio_bounded():
    ratios = [
        stats.sieve_survivor_experiment(sequences.shifted_primes(1), x, eps=0.1).ratio
        for x in (10**5, 10**6)
    ]
    assert all(0.0 < r < 10.0 for r in ratios)


def test_empty_sequence_sample_raises():
    with pytest.raises(ValidationError):
        stats.build_sample_set(sequences.polynomial_values([7, 2]), 8)  # 2n+7 > 8 fails for n>=1? 9 > 8
