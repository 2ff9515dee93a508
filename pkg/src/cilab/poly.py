"""Homogeneous polynomials over F_p and complete-intersection specs."""
from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence

from .errors import NotOnVariety, ParseError, SectionError
from .gf import ExtensionField, FieldElement, is_prime

Exponents = tuple[int, ...]


@dataclass(frozen=True)
class HomogeneousPoly:
    """Sparse homogeneous polynomial; terms are sorted by exponent vector.

    Coefficients are residues mod ``p`` (base field is prime in this version).
    Degree 0 is only produced by differentiating linear forms.
    """

    p: int
    nvars: int
    degree: int
    terms: tuple[tuple[int, Exponents], ...]

    @classmethod
    def from_terms(cls, p: int, nvars: int, degree: int,
                   terms: Iterable[tuple[int, Sequence[int]]]) -> HomogeneousPoly:
        seen: dict[Exponents, int] = {}
        for c, e in terms:
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ParseError(f"exponent vector {e} has {len(e)} entries, expected {nvars}")
            if any(x < 0 for x in e):
                raise ParseError(f"negative exponent in {e}")
            if sum(e) != degree:
                raise ParseError(f"term with exponents {e} has degree {sum(e)}, not {degree}")
            if e in seen:
                raise ParseError(f"duplicate exponent vector {e}")
            seen[e] = int(c) % p
        return cls(p, nvars, degree, tuple(sorted((c, e) for e, c in seen.items() if c)))

    @classmethod
    def from_string(cls, text: str, p: int, variables: Sequence[str]) -> HomogeneousPoly:
        """Parse e.g. ``"x^3 + y^3 - z^3"``; the degree is read off the terms."""
        import sympy

        gens = sympy.symbols(list(variables))
        expr = sympy.sympify(text.replace("^", "**"), locals=dict(zip(variables, gens)))
        terms = sympy.Poly(expr, *gens).terms()
        degrees = {sum(e) for e, _ in terms}
        if len(degrees) != 1:
            raise ParseError(f"not homogeneous: degrees {sorted(degrees)}")
        return cls.from_terms(p, len(gens), degrees.pop(), [(int(c), e) for e, c in terms])

    def is_zero(self) -> bool:
        return not self.terms

    def derivative(self, i: int) -> HomogeneousPoly:
        """Formal partial derivative in variable i, reduced mod p."""
        out = []
        for c, e in self.terms:
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out.append((c * e[i], e2))
        return HomogeneousPoly.from_terms(self.p, self.nvars, self.degree - 1, out)

    def to_dict(self) -> dict[str, Any]:
        return {"deg": self.degree, "terms": [{"c": [c], "e": list(e)} for c, e in self.terms]}

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for c, e in self.terms:
            mono = "*".join(f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(e) if k)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


@dataclass(frozen=True)
class CompleteIntersectionSpec:
    """X = V(f_1..f_r) in P^N over F_p; dimension n = N - r.

    ``smoothness_verified_up_to`` records the largest m such that the Jacobian
    had full rank at every point of X(F_{p^m}); it is not part of the
    fingerprint.
    """

    p: int
    N: int
    polys: tuple[HomogeneousPoly, ...]
    e: int = 1
    smoothness_verified_up_to: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.e != 1:
            raise ParseError("only prime base fields (e = 1) are supported")
        if not is_prime(self.p):
            raise ParseError(f"p={self.p} is not prime")
        if not 1 <= self.r <= self.N:
            raise ParseError(f"need 1 <= r <= N, got r={self.r}, N={self.N}")
        for f in self.polys:
            if f.nvars != self.N + 1 or f.p != self.p:
                raise ParseError("polynomial does not match ambient space or field")
            if f.is_zero():
                raise ParseError("zero polynomial in spec")

    @property
    def r(self) -> int:
        return len(self.polys)

    @property
    def n(self) -> int:
        return self.N - self.r

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(f.degree for f in self.polys)

    def to_dict(self) -> dict[str, Any]:
        return {"p": self.p, "e": self.e, "N": self.N, "polys": [f.to_dict() for f in self.polys]}

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()

    @cached_property
    def partials(self) -> tuple[tuple[HomogeneousPoly, ...], ...]:
        return tuple(tuple(f.derivative(i) for i in range(self.N + 1)) for f in self.polys)

    def with_smoothness(self, depth: int | None) -> CompleteIntersectionSpec:
        return CompleteIntersectionSpec(self.p, self.N, self.polys, self.e, depth)


def _spec_from_mapping(doc: dict) -> CompleteIntersectionSpec:
    try:
        p, e, N, polys = doc["p"], doc.get("e", 1), doc["N"], doc["polys"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing field: {exc}") from None
    for name, val in (("p", p), ("e", e), ("N", N)):
        if not isinstance(val, int) or isinstance(val, bool):
            raise ParseError(f"field {name!r} must be an integer")
    if e != 1:
        raise ParseError(f"e={e}: extension base fields are reserved, only e=1 is supported")
    if not is_prime(p):
        raise ParseError(f"p={p} is not prime")
    if not isinstance(polys, list) or not polys:
        raise ParseError("'polys' must be a non-empty list")
    if not 1 <= len(polys) <= N - 1:
        raise ParseError(f"need 1 <= r <= N-1 (positive dimension), got r={len(polys)}, N={N}")
    out = []
    for f in polys:
        try:
            deg, terms = f["deg"], f["terms"]
            parsed = []
            for t in terms:
                c = t["c"]
                if not isinstance(c, list) or len(c) != e:
                    raise ParseError(f"coefficient {c!r} must be a list of {e} residue(s)")
                parsed.append((int(c[0]), t["e"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed polynomial entry: {exc}") from None
        if not isinstance(deg, int) or deg < 1:
            raise ParseError(f"degree must be a positive integer, got {deg!r}")
        hp = HomogeneousPoly.from_terms(p, N + 1, deg, parsed)
        if hp.is_zero():
            raise ParseError("polynomial is zero mod p")
        out.append(hp)
    return CompleteIntersectionSpec(p, N, tuple(out), e)


def parse_spec(document: str | bytes | dict) -> CompleteIntersectionSpec:
    """Parse and validate a spec document (JSON text or already-decoded dict)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ParseError("spec document must be a JSON object")
    return _spec_from_mapping(document)


def spec_from_strings(p: int, N: int, polys: Sequence[str],
                      variables: Sequence[str] | None = None) -> CompleteIntersectionSpec:
    """Convenience constructor: ``spec_from_strings(7, 2, ["x^3+y^3-z^3"])``."""
    if variables is None:
        variables = "xyzw"[: N + 1] if N <= 3 else [f"x{i}" for i in range(N + 1)]
    return parse_spec({
        "p": p, "e": 1, "N": N,
        "polys": [HomogeneousPoly.from_string(s, p, variables).to_dict() for s in polys],
    })


def hyperplane_section(spec: CompleteIntersectionSpec, i: int) -> CompleteIntersectionSpec:
    """Restrict to {x_i = 0} and drop the coordinate, landing in P^{N-1}.

    The section of a curve is zero-dimensional, so the result may have n = 0.
    """
    if not 0 <= i <= spec.N:
        raise SectionError(f"hyperplane index {i} out of range [0, {spec.N}]")
    polys = []
    for f in spec.polys:
        terms = [(c, e[:i] + e[i + 1:]) for c, e in f.terms if e[i] == 0]
        g = HomogeneousPoly.from_terms(spec.p, spec.N, f.degree, terms)
        if g.is_zero():
            raise SectionError(f"a defining polynomial vanishes identically on x_{i} = 0")
        polys.append(g)
    return CompleteIntersectionSpec(spec.p, spec.N - 1, tuple(polys), spec.e)


def evaluate(f: HomogeneousPoly, point: Sequence[FieldElement]) -> FieldElement:
    """Exact value of f at ``point`` (coordinates in some F_{p^m})."""
    if len(point) != f.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {f.nvars} variables")
    F = point[0].field
    if F.p != f.p:
        raise ValueError("point lives over a field of different characteristic")
    # power table: powers[i][k] = point[i]**k
    powers = []
    for x in point:
        row = [F.one]
        for _ in range(f.degree):
            row.append(row[-1] * x)
        powers.append(row)
    total = F.zero
    for c, e in f.terms:
        mono = F.scalar(c)
        for i, k in enumerate(e):
            if k:
                mono = mono * powers[i][k]
        total = total + mono
    return total


def matrix_rank(rows: list[list[FieldElement]]) -> int:
    """Rank by Gaussian elimination over the field of the entries."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    rank = 0
    ncols = len(rows[0])
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col].inv()
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def jacobian_rank_at(spec: CompleteIntersectionSpec, point: Sequence[FieldElement]) -> int:
    """Rank of the r x (N+1) Jacobian at a point of X; r means X is smooth there."""
    if len(point) != spec.N + 1:
        raise ValueError(f"expected {spec.N + 1} coordinates")
    if not any(point):
        raise ValueError("the zero vector is not a projective point")
    for f in spec.polys:
        if evaluate(f, point):
            raise NotOnVariety(f"point {list(point)} is not on X")
    F = point[0].field
    rows = []
    for grads in spec.partials:
        rows.append([evaluate(g, point) if not g.is_zero() else F.zero for g in grads])
    return matrix_rank(rows)


def monomials(nvars: int, degree: int) -> list[Exponents]:
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(out)


def random_poly(rng: random.Random, p: int, nvars: int, degree: int) -> HomogeneousPoly:
    return HomogeneousPoly.from_terms(
        p, nvars, degree, [(rng.randrange(p), e) for e in monomials(nvars, degree)])


def random_ci(N: int, degrees: Sequence[int], p: int | ExtensionField, seed: int = 0,
              probe_depth: int = 1, *, max_attempts: int = 500, table=None,
              budget: int | None = None) -> CompleteIntersectionSpec:
    """Seeded rejection sampling of a complete intersection smooth at all
    points over F_{p^m}, m <= probe_depth.

    Counts made while probing are written to ``table`` when one is given.
    """
    from . import counter

    if isinstance(p, ExtensionField):
        if p.m != 1:
            raise ParseError("base field must be prime")
        p = p.p
    degrees = tuple(degrees)
    if not degrees:
        raise ParseError("r >= 1 required")
    if not 1 <= len(degrees) <= N - 1 or min(degrees) < 1:
        raise ParseError(f"invalid degrees {degrees} for P^{N}")
    budget = budget or counter.DEFAULT_BUDGET
    for m in range(1, probe_depth + 1):
        counter.check_budget(N, p**m, budget)
    rng = random.Random(seed)
    for _ in range(max_attempts):
        polys = tuple(random_poly(rng, p, N + 1, d) for d in degrees)
        if any(f.is_zero() for f in polys):
            continue
        spec = CompleteIntersectionSpec(p, N, polys)
        if probe_smoothness(spec, probe_depth, table=table, budget=budget):
            return spec.with_smoothness(probe_depth)
    raise RuntimeError(f"no smooth candidate within {max_attempts} attempts")


def probe_smoothness(spec: CompleteIntersectionSpec, depth: int, *, table=None,
                     budget: int | None = None) -> bool:
    """True when the Jacobian has rank r at every point of X(F_{p^m}), m <= depth."""
    from . import counter

    for m in range(1, depth + 1):
        rec = counter.count_projective(spec, m, smooth=True, table=table,
                                       budget=budget or counter.DEFAULT_BUDGET)
        if rec.anomalies:
            return False
    return True
