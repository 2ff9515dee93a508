"""Lefschetz numbers of model endomorphisms and fixed points of diagonal maps.

The diagonal map on X_k = {x_0^{K} + ... + x_n^{K} = 0} in P^n, K = k^n,
sends x_i to zeta^i x_i with zeta a primitive K-th root of unity; its m-th
iterate multiplies x_i by zeta^{i m}.  A point is fixed by the iterate iff
all its nonzero coordinates sit in one class of {i : i m = c mod K}.  A
class of size one gives a coordinate point, which is not on X_k; any class
of size >= 2 contains a solution of x_i^K = -x_j^K.  So a fixed point
exists iff K divides (j - i) m for some 0 <= i < j <= n.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .counter import count_pn
from .theorems import VerificationReport, _compare_half_power

FIXED_POINT_CRITERION = (
    "fixed points of a diagonal map lie on coordinate subspaces where the acting roots of unity "
    "coincide; a single-coordinate subspace misses X_k, any coincidence class of size >= 2 meets it"
)


@dataclass(frozen=True)
class DiagonalEndo:
    k: int
    n: int

    def __post_init__(self):
        if self.k < 2 or self.n < 1:
            raise ValueError("need k >= 2 and n >= 1")

    @property
    def order(self) -> int:
        return self.k**self.n


@dataclass
class LefschetzReport(VerificationReport):
    lambda_value: int = 0


def lambda_fnq(n: int, q: int) -> int:
    """Lefschetz number of [x_0 : ... : x_n] -> [x_0^q : ... : x_n^q] on P^n."""
    if n < 0 or q < 1:
        raise ValueError("need n >= 0, q >= 1")
    return count_pn(n, q)


def lambda_identity_curve(g: int) -> int:
    if g < 0:
        raise ValueError("genus must be >= 0")
    return 2 - 2 * g


def identity_curve_ratio(g: int) -> Fraction:
    """|Lambda(id) - 1 - q| / q^{1/2} at q = 1; equals 2g."""
    return Fraction(abs(lambda_identity_curve(g) - 2))


def check_theorem_c_bound(n: int, q: int, b_middle: int, lambda_observed: int, *,
                          complete_intersection: bool = True,
                          fingerprint: str = "") -> LefschetzReport:
    """|Lambda(f) - Lambda(f_{n,q})| <= (n + 1 + sum_{i<=n} h^i) q^{n/2}."""
    low = b_middle + (n + 1) // 2
    const = n + 1 + low
    diff = abs(lambda_observed - lambda_fnq(n, q))
    lhs, rhs, sq = _compare_half_power(diff, const, q, n)
    notes = []
    if q == 1:
        notes.append("illustrates q=1 failure: no periodic-point conclusion at q = 1")
    if not complete_intersection:
        notes.append("not a complete intersection: illustrative only, not a theorem instance")
    return LefschetzReport(
        "thm-c", fingerprint, lhs, rhs, "<=", sq,
        inputs={"n": n, "q": q, "b_middle": b_middle, "lower_betti_sum": low, "constant": const,
                "lambda": lambda_observed, "lambda_fnq": lambda_fnq(n, q), "deviation": diff},
        notes=notes, lambda_value=lambda_observed)


def has_fixed_point_diagonal(k: int, n: int, m: int) -> bool:
    K = DiagonalEndo(k, n).order
    if m < 1:
        raise ValueError("m must be >= 1")
    return any((t * m) % K == 0 for t in range(1, n + 1))


def _has_fixed_point_classes(k: int, n: int, m: int) -> bool:
    """Same question answered by building the coincidence classes directly."""
    K = k**n
    classes: dict[int, int] = {}
    for i in range(n + 1):
        c = (i * m) % K
        classes[c] = classes.get(c, 0) + 1
    return max(classes.values()) >= 2


def min_period_scan(k: int, n: int) -> int:
    """Linear scan over m using the coincidence-class construction."""
    K = k**n
    for m in range(1, K + 1):
        if _has_fixed_point_classes(k, n, m):
            return m
    raise AssertionError("m = k^n always has a fixed point")  # t = 1 works


def min_period_diagonal(k: int, n: int) -> int:
    """min over t in [1, n] of k^n / gcd(k^n, t)."""
    K = DiagonalEndo(k, n).order
    return min(K // gcd(K, t) for t in range(1, n + 1))


def check_min_period(k: int, n: int) -> list[VerificationReport]:
    closed = min_period_diagonal(k, n)
    scan = min_period_scan(k, n)
    inputs = {"k": k, "n": n, "order": k**n, "closed_form": closed, "scan": scan}
    return [
        VerificationReport("period-bound", "", Fraction(k**n, n), Fraction(closed), "<=",
                           inputs=inputs, notes=[FIXED_POINT_CRITERION]),
        VerificationReport("period-scan", "", Fraction(closed), Fraction(scan), "==",
                           inputs=inputs),
    ]
