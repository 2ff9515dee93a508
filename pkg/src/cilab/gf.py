"""Exact arithmetic in prime fields F_p and their extensions F_{p^m}.

Elements are coefficient vectors over F_p in the power basis of a root ``t``
of a monic irreducible modulus.  Every element also has an integer *code*
``sum(c_i * p**i)``; enumeration order is increasing code, so ``0`` and ``1``
come first.

Two arithmetic routes are provided.  :class:`FieldElement` does plain
polynomial arithmetic and is the reference.  :class:`FieldTables` holds
log/antilog/digit tables keyed by code and is what the counting kernel uses.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import isqrt
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, FieldError

DEFAULT_BUDGET = 10**9

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for n < 3.3e24)."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# --- dense polynomials over F_p, little-endian coefficient lists -------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    """Remainder of a modulo f; f need not be monic."""
    a = _trim([c % p for c in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return [c % p for c in out]


def _ppowmod(a: list[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Ben-Or test: f of degree m is irreducible iff gcd(x^(p^k) - x, f) = 1 for k <= m/2."""
    f = list(f)
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    h = [0, 1]
    for _ in range(m // 2):
        h = _ppowmod(h, p, f, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, diff, p)) > 1:
            return False
    return True


@dataclass(frozen=True)
class ExtensionField:
    """F_q with q = p**m, fixed by a monic irreducible ``modulus`` (little-endian)."""

    p: int
    m: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if len(self.modulus) != self.m + 1 or self.modulus[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {self.m}")
        if not is_irreducible(self.modulus, self.p):
            raise FieldError(f"modulus {self.modulus} is reducible over F_{self.p}")

    @property
    def q(self) -> int:
        return self.p**self.m

    def __call__(self, value: int | Sequence[int]) -> FieldElement:
        """Build an element from a code or from a coefficient vector."""
        if isinstance(value, (int, np.integer)):
            return self.from_code(int(value))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.m:
            coeffs = _pmod(coeffs, self.modulus, self.p)
        coeffs += [0] * (self.m - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    def scalar(self, c: int) -> FieldElement:
        """Prime-field scalar c mod p."""
        return FieldElement(self, (c % self.p,) + (0,) * (self.m - 1))

    def from_code(self, code: int) -> FieldElement:
        if not 0 <= code < self.q:
            raise FieldError(f"code {code} outside [0, {self.q})")
        coeffs = []
        for _ in range(self.m):
            code, c = divmod(code, self.p)
            coeffs.append(c)
        return FieldElement(self, tuple(coeffs))

    @property
    def zero(self) -> FieldElement:
        return self.scalar(0)

    @property
    def one(self) -> FieldElement:
        return self.scalar(1)

    @property
    def gen(self) -> FieldElement:
        """The modulus root t (equal to -modulus[0] when m = 1)."""
        return self([0, 1])

    def elements(self) -> Iterator[FieldElement]:
        for code in range(self.q):
            yield self.from_code(code)

    @cached_property
    def primitive_element(self) -> FieldElement:
        order = self.q - 1
        factors = prime_factors(order)
        for code in range(1, self.q):
            g = self.from_code(code)
            if all(g ** (order // ell) != self.one for ell in factors):
                return g
        raise FieldError("no primitive element found")  # unreachable for a field

    @cached_property
    def tables(self) -> FieldTables:
        return FieldTables.build(self)

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.m}, modulus={list(self.modulus)})"


def enumerate_field(F: ExtensionField) -> list[FieldElement]:
    return list(F.elements())


@lru_cache(maxsize=None)
def make_field(p: int, m: int = 1, seed: int = 0, budget: int = DEFAULT_BUDGET) -> ExtensionField:
    """Construct F_{p^m}.

    The modulus is the first irreducible polynomial met while scanning the
    p**m monic degree-m candidates cyclically, starting at an offset drawn
    from ``random.Random(seed)`` (offset 0 for seed 0, i.e. plain
    lexicographic order).
    """
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if m < 1:
        raise FieldError(f"extension degree must be >= 1, got {m}")
    if p**m > budget:
        raise BudgetExceeded(f"field of size {p}^{m} exceeds budget {budget}")
    total = p**m
    offset = 0 if seed == 0 else random.Random(seed).randrange(total)
    for k in range(total):
        code = (offset + k) % total
        low = []
        for _ in range(m):
            code, c = divmod(code, p)
            low.append(c)
        cand = tuple(low) + (1,)
        if is_irreducible(cand, p):
            return ExtensionField(p, m, cand)
    raise FieldError(f"no irreducible polynomial of degree {m} over F_{p}")  # unreachable


@dataclass(frozen=True, eq=False)
class FieldElement:
    field: ExtensionField
    coeffs: tuple[int, ...]

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("operands belong to different fields")
            return other
        if isinstance(other, (int, np.integer)):
            return self.field.scalar(int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        return FieldElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        F = self.field
        prod = _pmod(_pmul(self.coeffs, o.coeffs, F.p), F.modulus, F.p)
        return FieldElement(F, tuple(prod + [0] * (F.m - len(prod))))

    __rmul__ = __mul__

    def inv(self) -> FieldElement:
        if not self:
            raise ZeroDivisionError("inverse of zero in " + repr(self.field))
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __pow__(self, e: int) -> FieldElement:
        if e < 0:
            return self.inv() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, np.integer)):
            return self == self.field.scalar(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.modulus, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def code(self) -> int:
        out = 0
        for c in reversed(self.coeffs):
            out = out * self.field.p + c
        return out

    def __int__(self):
        return self.code()

    def __repr__(self):
        if self.field.m == 1:
            return f"{self.coeffs[0]}"
        terms = [f"{c}*t^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"


def mul_matrix(a: FieldElement) -> np.ndarray:
    """Matrix of x -> a*x on coefficient vectors (column j is a*t^j)."""
    F = a.field
    cols = []
    basis = F.one
    for _ in range(F.m):
        cols.append((a * basis).coeffs)
        basis = basis * F.gen if F.m > 1 else basis
    return np.array(cols, dtype=np.int64).T


@dataclass(frozen=True, eq=False)
class FieldTables:
    """Lookup tables keyed by element code.

    ``exp[k]`` is the code of g**k for a fixed primitive g, ``log[c]`` its
    inverse (``log[0]`` is 0, callers mask zeros), ``digits[c]`` the
    coefficient vector of code c, ``place`` the vector (1, p, p^2, ...).
    """

    p: int
    m: int
    q: int
    exp: np.ndarray
    log: np.ndarray
    digits: np.ndarray
    place: np.ndarray

    @classmethod
    def build(cls, F: ExtensionField) -> FieldTables:
        q, m, p = F.q, F.m, F.p
        order = q - 1
        place = p ** np.arange(m, dtype=np.int64)
        g = F.primitive_element
        block = max(1, isqrt(order) + 1)
        first = [F.one]
        for _ in range(block - 1):
            first.append(first[-1] * g)
        vecs = np.array([e.coeffs for e in first], dtype=np.int64)
        step = mul_matrix(g**block)
        chunks = []
        done = 0
        while done < order:
            chunks.append(vecs)
            done += len(vecs)
            vecs = (vecs @ step.T) % p
        exp = (np.concatenate(chunks)[:order] @ place).astype(np.int64)
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(order, dtype=np.int64)
        if len(np.unique(exp)) != order:
            raise FieldError("antilog table is not a bijection")
        codes = np.arange(q, dtype=np.int64)
        digits = (codes[:, None] // place[None, :]) % p
        return cls(p, m, q, exp, log, digits, place)

    # scalar helpers on codes
    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(self.log[a] + self.log[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp[(-self.log[a]) % (self.q - 1)])

    def add(self, a: int, b: int) -> int:
        return int(((self.digits[a] + self.digits[b]) % self.p) @ self.place)

    def sub(self, a: int, b: int) -> int:
        return int(((self.digits[a] - self.digits[b]) % self.p) @ self.place)

    def scale(self, c: int, a: int) -> int:
        """Prime-field scalar c times element a."""
        return int(((c * self.digits[a]) % self.p) @ self.place)
