"""Prime generation and bulk factorization.

Two factorization strategies are provided:

* a smallest-prime-factor sieve over [1, limit] for dense value sets
  (``smallest_factor_sieve`` + ``bulk_spectra``), and
* vectorized trial division against a prime table for sparse or large
  values (``bulk_spectra_trial``), valid for any u with u <= limit**2.

All value arithmetic is exact integer arithmetic; logarithms appear only
when normalized spectra are formed.
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from pdlab.errors import ResourceBudgetError, ValidationError

# Memory guards, in number of table entries.
MAX_PRIME_TABLE_LIMIT = 300_000_000
MAX_SPF_SIEVE_LIMIT = 200_000_000

_CACHE_MAGIC = b"PDLABPT1"


@dataclass(frozen=True)
class PrimeTable:
    """All primes <= limit, ascending, as an int64 array."""

    limit: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)


@dataclass(frozen=True)
class Factorization:
    """value = prod(p**e) with primes strictly ascending; value 1 has no factors."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        prev = 1
        for p, e in self.factors:
            if e < 1 or p <= prev:
                raise ValidationError("factors must be ascending primes with e >= 1")
            prev = p
            prod *= p**e
        if prod != self.value:
            raise ValidationError(
                f"factor product {prod} does not reconstruct value {self.value}"
            )


@dataclass(frozen=True)
class NormalizedSpectrum:
    """Descending entries log(p_j)/log(u), with multiplicity, summing to 1.

    For u = 1 the spectrum is the single entry 1 (the log 1/log 1 = 1
    convention); entries beyond the number of prime factors are treated
    as 0 when padding is needed.
    """

    u: int
    entries: tuple[float, ...]


def build_prime_table(limit: int) -> PrimeTable:
    """Sieve of Eratosthenes up to limit (inclusive)."""
    if limit < 2:
        raise ValidationError(f"prime table limit must be >= 2, got {limit}")
    if limit > MAX_PRIME_TABLE_LIMIT:
        raise ResourceBudgetError(
            f"prime table limit {limit} exceeds budget {MAX_PRIME_TABLE_LIMIT}"
        )
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return PrimeTable(limit=limit, primes=np.flatnonzero(is_prime).astype(np.int64))


def save_prime_table(table: PrimeTable, path) -> None:
    """Binary cache: magic, version-bearing header, delta-encoded primes, crc32.

    Layout: 8-byte magic ``PDLABPT1``, uint64 limit, uint64 count, then
    ``count`` uint32 deltas (first delta is from 0), then uint32 crc32 of
    the delta bytes.  Prime gaps below 2**32 cover any table this package
    can build.
    """
    deltas = np.diff(table.primes, prepend=0).astype(np.uint32)
    payload = deltas.tobytes()
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<QQ", table.limit, len(table.primes)))
        fh.write(payload)
        fh.write(struct.pack("<I", zlib.crc32(payload)))


def load_prime_table(path) -> PrimeTable:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _CACHE_MAGIC:
            raise ValidationError(f"bad prime table cache magic {magic!r}")
        limit, count = struct.unpack("<QQ", fh.read(16))
        payload = fh.read(4 * count)
        (crc,) = struct.unpack("<I", fh.read(4))
    if zlib.crc32(payload) != crc:
        raise ValidationError("prime table cache checksum mismatch")
    deltas = np.frombuffer(payload, dtype=np.uint32)
    return PrimeTable(limit=int(limit), primes=np.cumsum(deltas).astype(np.int64))


def factorize(u: int, table: PrimeTable) -> Factorization:
    """Trial division by table primes up to sqrt(u).

    Requires table.limit**2 >= u: after removing all table prime factors
    p <= sqrt(remaining), at most one cofactor larger than the table limit
    remains and it is prime.
    """
    if u < 1:
        raise ValidationError(f"factorize requires u >= 1, got {u}")
    if table.limit * table.limit < u:
        raise ValidationError(
            f"prime table limit {table.limit} too small for u={u} (need limit**2 >= u)"
        )
    rem = u
    factors = []
    if 1 < u < 1 << 62:
        # every prime divisor except at most one cofactor is <= sqrt(u);
        # one vectorized scan finds them all at once
        hi = np.searchsorted(table.primes, math.isqrt(u), side="right")
        cand = table.primes[:hi]
        for p in cand[u % cand == 0].tolist():
            e = 0
            while rem % p == 0:
                rem //= p
                e += 1
            factors.append((p, e))
    else:
        # exact python-int path for values beyond int64 (up to 2**127 - 1)
        for p in table.primes:
            p = int(p)
            if p * p > rem:
                break
            if rem % p == 0:
                e = 0
                while rem % p == 0:
                    rem //= p
                    e += 1
                factors.append((p, e))
    if rem > 1:
        factors.append((rem, 1))
    return Factorization(value=u, factors=tuple(factors))


def largest_prime(f: Factorization) -> int:
    """P+(u): the largest prime factor, with P+(1) = 1."""
    return f.factors[-1][0] if f.factors else 1


def spectrum(f: Factorization) -> NormalizedSpectrum:
    if f.value == 1:
        return NormalizedSpectrum(u=1, entries=(1.0,))
    logu = math.log(f.value)
    entries = []
    for p, e in f.factors:
        entries.extend([math.log(p) / logu] * e)
    entries.sort(reverse=True)
    return NormalizedSpectrum(u=f.value, entries=tuple(entries))


def smallest_factor_sieve(limit: int) -> np.ndarray:
    """spf[n] = smallest prime factor of n, for 0 <= n <= limit (spf[1] = 1)."""
    if limit < 2:
        raise ValidationError(f"sieve limit must be >= 2, got {limit}")
    if limit > MAX_SPF_SIEVE_LIMIT:
        raise ResourceBudgetError(
            f"spf sieve limit {limit} exceeds budget {MAX_SPF_SIEVE_LIMIT}"
        )
    spf = np.zeros(limit + 1, dtype=np.int64)
    spf[1] = 1
    spf[2::2] = 2
    for p in range(3, math.isqrt(limit) + 1, 2):
        if spf[p] == 0:
            spf[p] = p
            view = spf[p * p :: 2 * p]
            view[view == 0] = p
    unset = np.flatnonzero(spf == 0)
    spf[unset] = unset
    return spf


def _spectrum_arrays(values, emit_p):
    """Shared tail of the bulk spectrum routines.

    ``emit_p(rem, idx)`` must return the next prime factor (nondecreasing
    per value across calls) of each remaining cofactor.
    """
    values = np.asarray(values, dtype=np.int64)
    n = len(values)
    logs = np.log(np.maximum(values, 2).astype(np.float64))
    top = np.zeros((n, 3), dtype=np.float64)
    top[values == 1, 0] = 1.0  # log 1 / log 1 = 1 convention
    idx = np.flatnonzero(values > 1)
    rem = values[idx].copy()
    out_idx, out_val = [], []
    while idx.size:
        p = emit_p(rem, idx)
        entry = np.log(p.astype(np.float64)) / logs[idx]
        # primes are emitted in nondecreasing order per value, so the
        # running top-3 is maintained by a shift
        top[idx, 1:] = top[idx, :-1]
        top[idx, 0] = entry
        out_idx.append(idx.copy())
        out_val.append(entry)
        rem //= p
        alive = rem > 1
        idx = idx[alive]
        rem = rem[alive]
    entry_idx = np.concatenate(out_idx) if out_idx else np.empty(0, dtype=np.int64)
    entry_val = np.concatenate(out_val) if out_val else np.empty(0, dtype=np.float64)
    one = np.flatnonzero(values == 1)
    if one.size:
        entry_idx = np.concatenate([entry_idx, one])
        entry_val = np.concatenate([entry_val, np.ones(one.size)])
    return entry_idx, entry_val, top


def bulk_spectra(values, spf: np.ndarray):
    """Normalized spectra for a dense set of values covered by an spf sieve.

    Returns (entry_idx, entry_val, top3): a ragged pair list mapping each
    spectrum entry log(p)/log(u) to the index of its value (unordered
    within a value), plus the three largest entries per value, padded
    with zeros.
    """
    values = np.asarray(values, dtype=np.int64)
    if values.size and int(values.max()) >= len(spf):
        raise ValidationError("spf sieve too small for the given values")

    def emit(rem, idx):
        return spf[rem]

    return _spectrum_arrays(values, emit)


def bulk_spectra_trial(values, table: PrimeTable):
    """Normalized spectra by vectorized trial division (sparse/large values).

    Valid for values up to table.limit**2; each value's final cofactor
    beyond the table is prime by the trial-division contract.
    """
    values = np.asarray(values, dtype=np.int64)
    if values.size and int(values.max()) > table.limit * table.limit:
        raise ValidationError(
            f"prime table limit {table.limit} too small for max value {values.max()}"
        )
    n = len(values)
    logs = np.log(np.maximum(values, 2).astype(np.float64))
    top = np.zeros((n, 3), dtype=np.float64)
    top[values == 1, 0] = 1.0
    idx = np.flatnonzero(values > 1)
    rem = values[idx].copy()
    out_idx, out_val = [], []

    def push(i, p_arr):
        entry = np.log(p_arr.astype(np.float64)) / logs[i]
        top[i, 1:] = top[i, :-1]
        top[i, 0] = entry
        out_idx.append(i)
        out_val.append(entry)

    for p in table.primes:
        p = int(p)
        if idx.size == 0:
            break
        # cofactors below p*p are prime: retire them
        done = rem < p * p
        if done.any():
            push(idx[done], rem[done])
            keep = ~done
            idx, rem = idx[keep], rem[keep]
            if idx.size == 0:
                break
        div = rem % p == 0
        while div.any():
            sub = idx[div]
            push(sub, np.full(sub.size, p, dtype=np.int64))
            rem[div] //= p
            nxt = div.copy()
            nxt[div] = rem[div] % p == 0
            div = nxt
        alive = rem > 1
        idx, rem = idx[alive], rem[alive]
    if idx.size:
        # remaining cofactors exceed every table prime squared: prime by contract
        push(idx, rem)
    entry_idx = np.concatenate(out_idx) if out_idx else np.empty(0, dtype=np.int64)
    entry_val = np.concatenate(out_val) if out_val else np.empty(0, dtype=np.float64)
    one = np.flatnonzero(values == 1)
    if one.size:
        entry_idx = np.concatenate([entry_idx, one])
        entry_val = np.concatenate([entry_val, np.ones(one.size)])
    return entry_idx, entry_val, top
