"""Box test functions and distinct-index tuple sums.

A test function eta is a weighted union of axis-aligned boxes in
(0, inf)^k, each box a product of closed intervals [a_i, b_i].  The
k-point correlation statistic is the sum of eta over ordered tuples of
DISTINCT indices; for indicator boxes it reduces to products of per-item
interval counts, combined over set partitions (indices falling in a
shared block must land in the intersection interval, with the usual
(-1)^(|B|-1) (|B|-1)! Moebius weight).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from pdlab.errors import ValidationError


@dataclass(frozen=True)
class Box:
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    weight: float = 1.0

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValidationError("box needs matching nonempty lower/upper vectors")
        for a, b in zip(self.lower, self.upper):
            if not 0 < a < b:
                raise ValidationError(
                    f"box coordinates must satisfy 0 < a < b, got [{a}, {b}]"
                )

    @property
    def k(self) -> int:
        return len(self.lower)

    def intervals(self) -> list[tuple[float, float]]:
        return list(zip(self.lower, self.upper))


@dataclass(frozen=True)
class BoxFunction:
    """eta = sum of weight * indicator(box), all boxes of one dimension k."""

    boxes: tuple[Box, ...]

    def __post_init__(self):
        if not self.boxes:
            raise ValidationError("a BoxFunction needs at least one box")
        k = self.boxes[0].k
        if any(b.k != k for b in self.boxes):
            raise ValidationError("all boxes must share the same dimension")

    @property
    def k(self) -> int:
        return self.boxes[0].k

    @property
    def alpha(self) -> float:
        """Support lower bound: the smallest interval endpoint."""
        return min(min(b.lower) for b in self.boxes)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "boxes": [
                {"lower": list(b.lower), "upper": list(b.upper), "weight": b.weight}
                for b in self.boxes
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "BoxFunction":
        try:
            boxes = tuple(
                Box(
                    lower=tuple(float(v) for v in b["lower"]),
                    upper=tuple(float(v) for v in b["upper"]),
                    weight=float(b.get("weight", 1.0)),
                )
                for b in d["boxes"]
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed box function: {exc}") from exc
        return BoxFunction(boxes=boxes)


def box(*intervals, weight: float = 1.0) -> BoxFunction:
    """Convenience: a single indicator box from (a, b) interval pairs."""
    lower = tuple(float(a) for a, _ in intervals)
    upper = tuple(float(b) for _, b in intervals)
    return BoxFunction(boxes=(Box(lower=lower, upper=upper, weight=weight),))


def set_partitions(k: int):
    """All partitions of {0, .., k-1} as tuples of blocks (k <= 4 in practice)."""
    if k == 1:
        return [((0,),)]
    out = []
    for part in set_partitions(k - 1):
        out.append(part + ((k - 1,),))
        for i, blk in enumerate(part):
            out.append(part[:i] + (blk + (k - 1,),) + part[i + 1 :])
    return out


def _intersection(intervals):
    lo = max(a for a, _ in intervals)
    hi = min(b for _, b in intervals)
    return (lo, hi) if lo <= hi else None


def tuple_sum_per_item(
    item_idx: np.ndarray, values: np.ndarray, n_items: int, eta: BoxFunction
) -> np.ndarray:
    """Distinct-index tuple sum of eta for each item.

    ``values`` holds all point coordinates (spectrum entries or PD
    entries), ``item_idx`` maps each value to its item.  Every value of
    the item at or above eta's support lower bound must be present.
    """
    out = np.zeros(n_items, dtype=np.float64)
    count_cache: dict[tuple[float, float], np.ndarray] = {}

    def counts(interval):
        if interval not in count_cache:
            lo, hi = interval
            sel = (values >= lo) & (values <= hi)
            count_cache[interval] = np.bincount(
                item_idx[sel], minlength=n_items
            ).astype(np.float64)
        return count_cache[interval]

    for b in eta.boxes:
        ivals = b.intervals()
        acc = np.zeros(n_items, dtype=np.float64)
        for part in set_partitions(b.k):
            term = None
            sign = 1.0
            for blk in part:
                inter = _intersection([ivals[i] for i in blk])
                if inter is None:
                    term = None
                    break
                sign *= (-1.0) ** (len(blk) - 1) * math.factorial(len(blk) - 1)
                c = counts(inter)
                term = c if term is None else term * c
            if term is not None:
                acc += sign * term
        out += b.weight * acc
    return out


def box_correlation_exact(intervals) -> float:
    """Poisson-Dirichlet correlation mass of a product of disjoint intervals.

    Valid when the intervals are pairwise disjoint, contained in (0, 1],
    and the upper endpoints sum below 1; the value is then exactly
    prod log(b_i / a_i).
    """
    ivals = [(float(a), float(b)) for a, b in intervals]
    if not ivals:
        raise ValidationError("need at least one interval")
    for a, b in ivals:
        if not 0 < a <= b <= 1:
            raise ValidationError(f"interval [{a}, {b}] not contained in (0, 1]")
    for i in range(len(ivals)):
        for j in range(i + 1, len(ivals)):
            if _intersection([ivals[i], ivals[j]]) is not None:
                raise ValidationError(
                    f"intervals {ivals[i]} and {ivals[j]} are not disjoint"
                )
    if sum(b for _, b in ivals) >= 1:
        raise ValidationError("upper endpoints must sum below 1")
    return float(np.prod([math.log(b / a) for a, b in ivals]))


def box_correlation_quadrature(eta: BoxFunction, tol: float = 1e-9) -> float:
    """Deterministic quadrature of the PD correlation integral.

    Integrates 1[t_1 + .. + t_k <= 1] / (t_1 .. t_k) over eta, by nested
    adaptive 1-D quadrature with the simplex clip folded into the inner
    limits.  Independent of both the product formula and the Monte Carlo
    estimator.
    """

    def inner(ivals, budget):
        if not ivals:
            return 1.0
        (a, b), rest = ivals[0], ivals[1:]
        hi = min(b, budget - sum(r[0] for r in rest))
        if hi <= a:
            return 0.0
        if not rest:
            return math.log(hi / a)
        val, _ = quad(
            lambda t: inner(rest, budget - t) / t,
            a,
            hi,
            epsabs=tol,
            epsrel=tol,
            limit=200,
        )
        return val

    total = 0.0
    for b in eta.boxes:
        total += b.weight * inner(b.intervals(), 1.0)
    return total
