"""Middle-cohomology Frobenius data recovered from point counts.

For a smooth complete intersection X of dimension n every cohomology group
except H^n is one-dimensional in even degree with Frobenius eigenvalue
q^{i/2}.  Writing alpha_1..alpha_b for the eigenvalues on H^n,

    N_d = T_d + (-1)^n * sum_j alpha_j^d,    T_d = sum_{even i != n, 0 <= i <= 2n} q^{(i/2) d}

and P_n(T) = prod_j (1 - alpha_j T) has integer coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, prod
from typing import Sequence

import mpmath

from .errors import ReconstructionError


@dataclass(frozen=True)
class MiddleData:
    n: int
    q: int
    S: tuple[int, ...]
    b_n: int | None = None


@dataclass(frozen=True)
class MiddlePolynomial:
    coeffs: tuple[int, ...]
    q: int
    n: int
    sign: int | None = None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c:+d}" + (f"*T^{k}" if k else ""))
        return " ".join(parts) or "0"


def euler_characteristic_ci(N: int, degrees: Sequence[int]) -> int:
    """chi = (prod d_i) * [h^n] (1+h)^{N+1} / prod_i (1 + d_i h), all in Z[[h]]."""
    r = len(degrees)
    if not 0 <= N - r:
        raise ValueError(f"need r <= N, got r={r}, N={N}")
    n = N - r
    series = [comb(N + 1, k) for k in range(n + 1)]
    for d in degrees:
        # divide by (1 + d h): b_k = a_k - d b_{k-1}
        for k in range(1, n + 1):
            series[k] -= d * series[k - 1]
    return prod(degrees) * series[n]


def middle_betti(N: int, degrees: Sequence[int]) -> int:
    n = N - len(degrees)
    chi = euler_characteristic_ci(N, degrees)
    b = (n + 1) - chi if n % 2 else chi - n
    if b < 0:
        raise ValueError(f"negative middle Betti number {b} for N={N}, degrees={tuple(degrees)}")
    return b


def betti_numbers(N: int, degrees: Sequence[int]) -> list[int]:
    """[b_0, ..., b_{2n}] for a smooth complete intersection."""
    n = N - len(degrees)
    bn = middle_betti(N, degrees)
    return [bn if i == n else (1 if i % 2 == 0 else 0) for i in range(2 * n + 1)]


def betti_sum(N: int, degrees: Sequence[int]) -> int:
    return sum(betti_numbers(N, degrees))


def lower_betti_sum(N: int, degrees: Sequence[int]) -> int:
    """sum_{i <= n} b_i = b_n + #{even i in [0, n)}."""
    n = N - len(degrees)
    return middle_betti(N, degrees) + (n + 1) // 2


def trivial_part(n: int, q: int, d: int) -> int:
    """T_d: contribution of the non-middle cohomology to N_d."""
    return sum(q ** ((i // 2) * d) for i in range(0, 2 * n + 1, 2) if i != n)


def middle_power_sums(counts: Sequence[int], n: int, q: int, b_n: int | None = None) -> MiddleData:
    """S_d = (-1)^n (N_d - T_d) for d = 1..len(counts); counts start at d = 1."""
    sgn = -1 if n % 2 else 1
    S = tuple(sgn * (int(N_d) - trivial_part(n, q, d)) for d, N_d in enumerate(counts, start=1))
    return MiddleData(n, q, S, b_n)


def elementary_from_power_sums(S: Sequence[int], k_max: int) -> list[Fraction]:
    """Newton's identities: k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} S_i."""
    e = [Fraction(1)]
    for k in range(1, k_max + 1):
        acc = sum(((-1) ** (i - 1)) * e[k - i] * S[i - 1] for i in range(1, k + 1))
        e.append(Fraction(acc) / k)
    return e


def _integral_coeffs(e: Sequence[Fraction]) -> list[int]:
    out = []
    for k, ek in enumerate(e):
        c = (-1) ** k * ek
        if c.denominator != 1:
            raise ReconstructionError(f"coefficient c_{k} = {c} is not an integer")
        out.append(int(c))
    return out


def newton_reconstruct(S: Sequence[int], b: int, q: int = 0, n: int = 0) -> MiddlePolynomial:
    """P_n(T) from the first b power sums."""
    if len(S) < b:
        raise ValueError(f"need {b} power sums, got {len(S)}")
    coeffs = _integral_coeffs(elementary_from_power_sums(S, b))
    return MiddlePolynomial(tuple(coeffs), q, n)


def power_sums_from_poly(coeffs: Sequence[int], d_max: int) -> list[int]:
    """sum_j alpha_j^d for d = 1..d_max, exact, via Newton's recurrence."""
    b = len(coeffs) - 1
    e = [(-1) ** k * c for k, c in enumerate(coeffs)]
    S: list[int] = []
    for d in range(1, d_max + 1):
        acc = sum((-1) ** (i - 1) * (e[i] if i <= b else 0) * S[d - i - 1] for i in range(1, d))
        acc += (-1) ** (d - 1) * d * (e[d] if d <= b else 0)
        S.append(acc)
    return S


def predict_count(P: MiddlePolynomial, n: int, q: int, d: int) -> int:
    S_d = power_sums_from_poly(P.coeffs, d)[-1]
    return trivial_part(n, q, d) + (-1) ** n * S_d


def _isqrt_exact(x: int) -> int | None:
    from math import isqrt

    if x < 0:
        return None
    s = isqrt(x)
    return s if s * s == x else None


def symmetry_sign(coeffs: Sequence[int], q: int, n: int) -> int | None:
    """The epsilon in {+1, -1} with c_{b-j} = eps * q^{n(b-2j)/2} c_j for all j, if any.

    When n(b-2j) is odd the pair is compared after squaring; the sign is then
    fixed by the pairs with integral exponent (or by c_b for b = 1).
    """
    b = len(coeffs) - 1
    if b == 0:
        return 1 if coeffs[0] == 1 else None
    for eps in (1, -1):
        ok = True
        for j in range(b + 1):
            lo, hi = coeffs[j], coeffs[b - j]
            expo = n * (b - 2 * j)
            if expo % 2 == 0:
                if expo >= 0:
                    good = hi == eps * q ** (expo // 2) * lo
                else:
                    good = lo == eps * q ** (-expo // 2) * hi
            else:
                # hi^2 = q^expo lo^2 and sign(hi) = eps * sign(lo)
                if expo >= 0:
                    good = hi * hi == q**expo * lo * lo
                else:
                    good = lo * lo == q ** (-expo) * hi * hi
                good = good and (hi == 0 and lo == 0 or (hi > 0) == ((lo > 0) == (eps > 0)))
            if not good:
                ok = False
                break
        if ok:
            return eps
    return None


def apply_functional_equation(S: Sequence[int], b: int, q: int, n: int,
                              check: tuple[int, int] | None = None) -> MiddlePolynomial:
    """Reconstruct P_n from ceil(b/2) power sums using reciprocal symmetry.

    ``check = (d, N_d)`` is an extra brute-force count used to pick the sign
    when both signs give integral coefficients (and always verified when
    given).
    """
    h = (b + 1) // 2
    if len(S) < h:
        raise ValueError(f"need {h} power sums, got {len(S)}")
    low = _integral_coeffs(elementary_from_power_sums(S, h))
    if b == 0:
        return MiddlePolynomial((1,), q, n, 1)
    if b == 1:
        c1 = low[1]
        if c1 * c1 != q**n:
            raise ReconstructionError(f"b = 1 requires c_1^2 = q^n, got c_1 = {c1}")
        return MiddlePolynomial((1, c1), q, n, 1 if c1 > 0 else -1)
    candidates = []
    for eps in (1, -1):
        coeffs = low + [0] * (b + 1 - len(low))
        ok = True
        for j in range(0, b - h + 1):
            expo = n * (b - 2 * j)
            if expo % 2:
                ok = False
                break
            val = eps * q ** (expo // 2) * coeffs[j]
            if b - j < len(low):
                # overlaps the Newton part (middle coefficient when b is even)
                if low[b - j] != val:
                    ok = False
                    break
            coeffs[b - j] = val
        if ok:
            candidates.append(MiddlePolynomial(tuple(coeffs), q, n, eps))
    if check is not None:
        d, N_d = check
        candidates = [P for P in candidates if predict_count(P, n, q, d) == N_d]
    if not candidates:
        raise ReconstructionError("no sign of the functional equation is consistent")
    if len(candidates) > 1:
        raise ReconstructionError("both signs consistent; supply a check count")
    return candidates[0]


@dataclass
class RHReport:
    q: int
    n: int
    degree: int
    sign: int | None
    symmetric: bool
    coeff_bound_ok: bool
    moduli_ok: bool
    max_rel_deviation: float
    tol: float
    moduli: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.symmetric and self.coeff_bound_ok and self.moduli_ok


def _coeff_bound_ok(coeffs: Sequence[int], q: int, n: int) -> bool:
    """|c_j| <= C(b, j) q^{nj/2}, compared squared."""
    b = len(coeffs) - 1
    return all(c * c <= comb(b, j) ** 2 * q ** (n * j) for j, c in enumerate(coeffs))


def eigenvalue_moduli(coeffs: Sequence[int], q: int, n: int, dps: int | None = None) -> list[mpmath.mpf]:
    """|alpha_j| / q^{n/2} for the reciprocal roots alpha_j of P."""
    b = len(coeffs) - 1
    if b == 0:
        return []
    dps = dps or max(40, 3 * b + 30)
    with mpmath.workdps(dps):
        s = mpmath.sqrt(q) ** n
        # prod (beta - alpha_j / s) = sum_k c_k s^{-k} beta^{b-k}
        poly = [mpmath.mpf(c) / s**k for k, c in enumerate(coeffs)]
        extra = 2 * dps
        for _ in range(4):
            try:
                roots = mpmath.polyroots(poly, maxsteps=400, extraprec=extra)
                break
            except mpmath.libmp.libhyper.NoConvergence:
                extra *= 2
        else:
            raise ReconstructionError("root finder did not converge")
        return [abs(z) for z in roots]


def verify_rh(P: MiddlePolynomial, q: int, n: int, tol: float = 1e-8) -> RHReport:
    coeffs = P.coeffs
    if not coeffs or coeffs[0] != 1:
        raise ValueError("P must have constant term 1")
    sign = symmetry_sign(coeffs, q, n)
    moduli = eigenvalue_moduli(coeffs, q, n)
    dev = max((abs(mu - 1) for mu in moduli), default=mpmath.mpf(0))
    return RHReport(
        q=q, n=n, degree=len(coeffs) - 1, sign=sign, symmetric=sign is not None,
        coeff_bound_ok=_coeff_bound_ok(coeffs, q, n), moduli_ok=bool(dev <= tol),
        max_rel_deviation=float(dev), tol=tol,
        moduli=[mpmath.nstr(mu, 20) for mu in moduli])


def reconstruct(counts: Sequence[int], N: int, degrees: Sequence[int], q: int,
                use_functional_equation: bool | None = None) -> MiddlePolynomial:
    """P_n from consecutive counts N_1, N_2, ... of a smooth complete intersection.

    Uses Newton on b_n counts when available, otherwise the functional
    equation on ceil(b_n/2) counts with the next count as check.
    """
    n = N - len(degrees)
    b = middle_betti(N, degrees)
    S = middle_power_sums(counts, n, q, b).S
    if use_functional_equation is None:
        use_functional_equation = len(S) < b
    if not use_functional_equation:
        P = newton_reconstruct(S, b, q, n)
        return MiddlePolynomial(P.coeffs, q, n, symmetry_sign(P.coeffs, q, n))
    h = (b + 1) // 2
    check = (h + 1, counts[h]) if len(counts) > h else None
    return apply_functional_equation(S[:h], b, q, n, check)


def infer_betti_from_counts(counts: Sequence[int], n: int, q: int) -> int | None:
    """Diagnostic: smallest b whose Newton polynomial is integral, symmetric and
    predicts every remaining count.  None if no b < len(counts) works."""
    S = middle_power_sums(counts, n, q).S
    for b in range(0, len(S)):
        try:
            P = newton_reconstruct(S, b, q, n)
        except ReconstructionError:
            continue
        if symmetry_sign(P.coeffs, q, n) is None:
            continue
        if all(predict_count(P, n, q, d) == counts[d - 1] for d in range(b + 1, len(counts) + 1)):
            return b
    return None
