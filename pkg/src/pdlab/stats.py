"""Empirical estimators on arithmetic samples.

A SampleSet holds the normalized prime-factor spectra of every member of
a sequence up to x (or a seeded uniform subsample).  The estimators are
pure folds over those arrays: correlation sums over distinct index
tuples, joint CDFs of the leading entries, tail frequencies of the
largest prime factor, level-of-distribution error sums, repeated-factor
frequencies, sieve survivor counts, and a one-sample Kolmogorov-Smirnov
distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pdlab import arith, dickman, factor, sequences
from pdlab.boxes import BoxFunction, tuple_sum_per_item
from pdlab.errors import ValidationError
from pdlab.report import Estimate
from pdlab.sequences import SequenceSpec

# Values up to this bound are factored through an spf sieve when the
# member set is dense; sparse/large sets go through trial division.
SPF_PATH_LIMIT = factor.MAX_SPF_SIEVE_LIMIT
TOP_K = 3


@dataclass(frozen=True)
class SampleSet:
    """Spectra of the members of a sequence up to x.

    ``top`` holds the TOP_K largest spectrum entries per member (zero
    padded; the u = 1 member gets the single entry 1).  ``entry_idx`` /
    ``entry_val`` is the ragged list of all entries >= floor, unordered
    within a member.  floor = 0.0 keeps complete spectra.
    """

    spec: SequenceSpec
    x: int
    u: np.ndarray
    top: np.ndarray
    entry_idx: np.ndarray
    entry_val: np.ndarray
    floor: float
    exhaustive: bool
    subsample_seed: int | None = None
    subsample_rate: float | None = None

    @property
    def n(self) -> int:
        return len(self.u)


def build_sample_set(
    spec: SequenceSpec,
    x: int,
    floor: float = 0.0,
    max_members: int | None = None,
    subsample_seed: int = 0,
) -> SampleSet:
    """Enumerate, factor, and normalize every member of the sequence up to x."""
    if not 0.0 <= floor < 1.0:
        raise ValidationError(f"floor must be in [0, 1), got {floor}")
    mem = sequences.members(spec, x)
    if mem.size == 0:
        raise ValidationError(f"sequence has no members up to x={x}")
    exhaustive = True
    rate = None
    seed_used = None
    if max_members is not None and mem.size > max_members:
        rng = np.random.Generator(np.random.Philox(key=subsample_seed))
        sel = rng.choice(mem.size, size=max_members, replace=False)
        rate = max_members / mem.size
        mem = mem[np.sort(sel)]
        exhaustive = False
        seed_used = subsample_seed
    maxval = int(mem.max())
    dense = mem.size >= maxval // 64
    if dense and maxval <= SPF_PATH_LIMIT:
        spf = factor.smallest_factor_sieve(max(maxval, 2))
        entry_idx, entry_val, top = factor.bulk_spectra(mem, spf)
    else:
        table = factor.build_prime_table(max(math.isqrt(maxval) + 1, 3))
        entry_idx, entry_val, top = factor.bulk_spectra_trial(mem, table)
    if floor > 0.0:
        keep = entry_val >= floor
        entry_idx, entry_val = entry_idx[keep], entry_val[keep]
    return SampleSet(
        spec=spec,
        x=x,
        u=mem,
        top=top,
        entry_idx=entry_idx,
        entry_val=entry_val,
        floor=floor,
        exhaustive=exhaustive,
        subsample_seed=seed_used,
        subsample_rate=rate,
    )


def _mean_se(values: np.ndarray) -> Estimate:
    n = len(values)
    mean = float(np.mean(values))
    var = float(np.var(values))
    return Estimate(value=mean, std_error=math.sqrt(var / n), n=n)


def empirical_corr(s: SampleSet, eta: BoxFunction) -> Estimate:
    """Average over members of the distinct-index tuple sum of eta at the
    normalized log-prime coordinates (multiplicity via distinct indices)."""
    if eta.alpha < s.floor:
        raise ValidationError(
            f"eta support bound {eta.alpha} lies below the sample floor {s.floor}"
        )
    per = tuple_sum_per_item(s.entry_idx, s.entry_val, s.n, eta)
    return _mean_se(per)


def empirical_joint_cdf(s: SampleSet, c) -> Estimate:
    """Frequency of {entry_1 <= c_1, ..., entry_k <= c_k} over members."""
    c = [float(v) for v in c]
    if not c or any(not 0 < v <= 1 for v in c):
        raise ValidationError("thresholds must be a nonempty vector in (0, 1]")
    if len(c) > TOP_K:
        raise ValidationError(f"at most {TOP_K} joint thresholds supported")
    hit = np.all(s.top[:, : len(c)] <= np.asarray(c)[None, :], axis=1)
    p = float(np.mean(hit))
    return Estimate(value=p, std_error=math.sqrt(p * (1 - p) / s.n), n=s.n)


def tail_frequency(s: SampleSet, eps: float) -> Estimate:
    """Frequency of P+(u) >= u**(1-eps), i.e. leading entry >= 1 - eps.

    The u = 1 member has leading entry 1 by convention and therefore
    counts for every eps.
    """
    if not 0 < eps < 1:
        raise ValidationError(f"eps must be in (0, 1), got {eps}")
    hit = s.top[:, 0] >= 1.0 - eps
    p = float(np.mean(hit))
    return Estimate(value=p, std_error=math.sqrt(p * (1 - p) / s.n), n=s.n)


def ks_distance(values: np.ndarray, ref_cdf) -> float:
    """One-sample Kolmogorov-Smirnov distance against a callable CDF."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValidationError("ks_distance requires a nonempty sample")
    v = np.sort(values)
    ref = np.asarray(ref_cdf(v), dtype=np.float64)
    n = len(v)
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - ref), np.max(ref - (grid - 1.0 / n))))


def dickman_reference_cdf(table: dickman.RhoTable | None = None):
    """The limit CDF c -> rho(1/c) of the normalized largest prime factor."""
    tab = table or dickman.default_table()

    def cdf(c):
        c = np.asarray(c, dtype=np.float64)
        out = np.zeros_like(c)
        out[c >= 1.0] = 1.0
        # below 1/u_max the reference mass is under 1e-28: call it zero
        mid = (c > 1.0 / tab.u_max) & (c < 1.0)
        out[mid] = tab.rho_vec(1.0 / c[mid])
        return out

    return cdf


def lod_error_sum(spec: SequenceSpec, x: int, c: float):
    """(sum_{d <= x**c} |N_d(x) - g(d) N(x)| / N(x), max_d |r_d|)."""
    if not 0 < c < 1:
        raise ValidationError(f"c must be in (0, 1), got {c}")
    dmax = int(math.floor(x**c))
    if dmax < 1:
        raise ValidationError(f"x**c = {x**c:.3f} admits no moduli")
    g = spec.g_function()
    if spec.kind == "uniform":
        n_total = x
        d = np.arange(1, dmax + 1, dtype=np.int64)
        nd = x // d
        gn = x / d.astype(np.float64)
    else:
        mem = sequences.members(spec, x)
        n_total = len(mem)
        d = np.arange(1, dmax + 1, dtype=np.int64)
        nd = np.empty(dmax, dtype=np.int64)
        if spec.kind == "thue_morse":
            for i, dd in enumerate(d):
                mult = np.arange(dd, x + 1, dd, dtype=np.int64)
                nd[i] = np.count_nonzero(sequences._parity_even_vec(mult))
        else:
            for i, dd in enumerate(d):
                nd[i] = np.count_nonzero(mem % dd == 0)
        gn = _g_vector(g, dmax) * n_total
    r = nd.astype(np.float64) - gn
    return float(np.sum(np.abs(r)) / n_total), float(np.max(np.abs(r)))


def _g_vector(g: arith.GFunctionSpec, dmax: int) -> np.ndarray:
    d = np.arange(1, dmax + 1, dtype=np.float64)
    if g.kind == "reciprocal":
        return 1.0 / d
    if g.kind == "reciprocal_totient":
        phi = arith._phi_sieve(dmax)
        return 1.0 / phi[1:].astype(np.float64)
    h = np.array(
        [arith.poly_root_count(g.coeffs, int(dd)) for dd in range(1, dmax + 1)],
        dtype=np.float64,
    )
    return h / d


def repeated_factor_frequency(s: SampleSet, alpha: float, c: float) -> Estimate:
    """Frequency of members with a repeated prime factor in [x**alpha, x**c]."""
    if not 0 < alpha < c <= 1:
        raise ValidationError(f"need 0 < alpha < c <= 1, got alpha={alpha}, c={c}")
    lo = s.x**alpha
    hi = min(s.x**c, math.sqrt(s.x))  # a repeated factor above sqrt(x) is impossible
    if lo > hi:
        return Estimate(value=0.0, std_error=0.0, n=s.n)
    table = factor.build_prime_table(int(math.floor(hi)) + 1)
    window = table.primes[(table.primes >= lo) & (table.primes <= hi)]
    hit = np.zeros(s.n, dtype=bool)
    if s.spec.kind == "uniform":
        # members are 1..x: mark multiples of p**2 directly
        for p in window:
            p2 = int(p) * int(p)
            hit[p2 - 1 :: p2] = True
    else:
        for p in window:
            p2 = int(p) * int(p)
            hit |= s.u % p2 == 0
    p_hat = float(np.mean(hit))
    return Estimate(
        value=p_hat, std_error=math.sqrt(p_hat * (1 - p_hat) / s.n), n=s.n
    )


@dataclass(frozen=True)
class SurvivorResult:
    survivors: int
    n_total: int
    v_product: float
    ratio: float
    window: tuple[float, float]
    n_window_primes: int


def sieve_survivor_experiment(
    spec: SequenceSpec, x: int, eps: float, z0: float = 2.0, delta0: float | None = None
) -> SurvivorResult:
    """Count members coprime to every prime strictly inside (x**eps, x**delta0)
    with p > z0, and compare with V = prod (1 - g(p)) over the window.

    Returns the direct survivor count, V, and survivors / (V * N(x)).
    """
    if delta0 is None:
        delta0 = (1.0 - eps) / 2.0
    lo, hi = x**eps, x**delta0
    table = factor.build_prime_table(max(int(math.floor(hi)) + 1, 3))
    window = table.primes[
        (table.primes > lo) & (table.primes < hi) & (table.primes > z0)
    ]
    if window.size == 0:
        raise ValidationError(
            f"empty sieving window: x={x}, eps={eps}, z0={z0}, delta0={delta0}"
        )
    mem = sequences.members(spec, x)
    n_total = len(mem)
    alive = np.ones(n_total, dtype=bool)
    if spec.kind == "uniform":
        for p in window:
            alive[int(p) - 1 :: int(p)] = False
    else:
        for p in window:
            alive &= mem % int(p) != 0
    survivors = int(np.count_nonzero(alive))
    g = spec.g_function()
    v = 1.0
    for p in window:
        v *= 1.0 - float(arith.g_eval(g, int(p)))
    return SurvivorResult(
        survivors=survivors,
        n_total=n_total,
        v_product=v,
        ratio=survivors / (v * n_total),
        window=(lo, hi),
        n_window_primes=int(window.size),
    )
