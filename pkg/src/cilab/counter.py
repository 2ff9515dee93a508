"""Exhaustive point counting on X over F_{p^m} with an append-only count cache.

Projective points are enumerated by leading-one charts: chart k has
x_0 = ... = x_{k-1} = 0, x_k = 1 and the remaining N - k coordinates free,
so it holds Q**(N-k) representatives (Q = p**m).  Free coordinates of a
chart are the base-Q digits of a representative index, x_N least
significant.  Each (chart, index range) task is independent; totals are
exact integer sums and do not depend on how ranges are split.
"""
from __future__ import annotations

import csv
import os
import re
import threading
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, IntegrityError, SectionError
from .gf import FieldTables, make_field
from .poly import CompleteIntersectionSpec, HomogeneousPoly, hyperplane_section

DEFAULT_BUDGET = 10**9
BATCH = 1 << 17
CACHE_FILE = "counts.csv"
_HEX64 = re.compile(r"^[0-9a-f]{64}$")


def count_pn(n: int, q: int) -> int:
    """|P^n(F_q)| = 1 + q + ... + q^n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return sum(q**i for i in range(n + 1))


def check_budget(N: int, Q: int, budget: int) -> int:
    total = count_pn(N, Q)
    if total > budget:
        raise BudgetExceeded(f"|P^{N}(F_{Q})| = {total} exceeds budget {budget}")
    return total


@dataclass
class CountRecord:
    fingerprint: str
    m: int
    count: int
    wall_time: float = 0.0
    anomalies: list[tuple[int, ...]] = field(default_factory=list)
    cached: bool = False


# --- vectorised evaluation ---------------------------------------------------

class _Column:
    """One coordinate over a batch: either a constant code or an array of codes."""

    __slots__ = ("const", "log", "zero")

    def __init__(self, tabs: FieldTables, values: int | np.ndarray):
        if isinstance(values, np.ndarray):
            self.const = None
            self.zero = values == 0
            self.log = tabs.log[values]
        else:
            self.const = int(values)
            self.zero = self.const == 0
            self.log = int(tabs.log[self.const]) if self.const else 0


def _eval_batch(f: HomogeneousPoly, cols: Sequence[_Column], tabs: FieldTables,
                size: int) -> np.ndarray:
    """Codes of f over a batch; cols[i] describes coordinate i."""
    order = tabs.q - 1
    binary = tabs.p == 2
    acc = np.zeros(size if binary else (size, tabs.m), dtype=np.int64)
    for c, e in f.terms:
        lg: int | np.ndarray = 0
        mask = None
        dead = False
        for i, k in enumerate(e):
            if not k:
                continue
            col = cols[i]
            if col.const is not None:
                if col.const == 0:
                    dead = True
                    break
                lg = lg + k * col.log
            else:
                lg = lg + k * col.log
                mask = col.zero if mask is None else (mask | col.zero)
        if dead:
            continue
        if isinstance(lg, np.ndarray):
            codes = tabs.exp[lg % order]
            if mask is not None:
                codes = np.where(mask, 0, codes)
        else:
            codes = np.full(size, tabs.exp[lg % order], dtype=np.int64)
        if binary:
            acc ^= codes
        else:
            acc += c * tabs.digits[codes]
    if binary:
        return acc
    return (acc % tabs.p) @ tabs.place


def _rank_codes(rows: list[list[int]], tabs: FieldTables) -> int:
    """Gaussian elimination on a small matrix of element codes."""
    rows = [list(r) for r in rows]
    rank = 0
    for col in range(len(rows[0]) if rows else 0):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = tabs.inv(rows[rank][col])
        rows[rank] = [tabs.mul(x, inv) for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                fac = rows[i][col]
                rows[i] = [tabs.sub(a, tabs.mul(fac, b)) for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def _singular_points(spec: CompleteIntersectionSpec, points: np.ndarray,
                     tabs: FieldTables) -> list[tuple[int, ...]]:
    """Rows of ``points`` (codes, shape (B, N+1)) where the Jacobian rank is < r."""
    if len(points) == 0:
        return []
    size = len(points)
    cols = [_Column(tabs, points[:, i]) for i in range(spec.N + 1)]
    grads = np.zeros((size, spec.r, spec.N + 1), dtype=np.int64)
    for a, row in enumerate(spec.partials):
        for b, g in enumerate(row):
            if not g.is_zero():
                grads[:, a, b] = _eval_batch(g, cols, tabs, size)
    if spec.r == 1:
        bad = ~grads[:, 0, :].any(axis=1)
        return [tuple(int(x) for x in points[i]) for i in np.nonzero(bad)[0]]
    out = []
    for i in range(size):
        if _rank_codes(grads[i].tolist(), tabs) < spec.r:
            out.append(tuple(int(x) for x in points[i]))
    return out


def _count_task(spec: CompleteIntersectionSpec, m: int, seed: int, chart: int,
                start: int, stop: int, smooth: bool) -> tuple[int, list[tuple[int, ...]]]:
    tabs = make_field(spec.p, m, seed).tables
    Q, N = tabs.q, spec.N
    free = N - chart
    count = 0
    anomalies: list[tuple[int, ...]] = []
    for lo in range(start, stop, BATCH):
        hi = min(stop, lo + BATCH)
        idx = np.arange(lo, hi, dtype=np.int64)
        size = hi - lo
        coords: list[int | np.ndarray] = [0] * chart + [1]
        for j in range(free):
            coords.append((idx // Q ** (free - 1 - j)) % Q)
        alive = np.arange(size)
        for f in spec.polys:
            cols = [_Column(tabs, c if isinstance(c, int) else c[alive]) for c in coords]
            vals = _eval_batch(f, cols, tabs, len(alive))
            alive = alive[vals == 0]
            if len(alive) == 0:
                break
        count += len(alive)
        if smooth and len(alive):
            pts = np.zeros((len(alive), N + 1), dtype=np.int64)
            for i, c in enumerate(coords):
                pts[:, i] = c if isinstance(c, int) else c[alive]
            anomalies.extend(_singular_points(spec, pts, tabs))
    return count, anomalies


def _tasks(N: int, Q: int, chunk: int) -> list[tuple[int, int, int]]:
    out = []
    for chart in range(N + 1):
        size = Q ** (N - chart)
        for lo in range(0, size, chunk):
            out.append((chart, lo, min(size, lo + chunk)))
    return out


def count_projective(spec: CompleteIntersectionSpec, m: int = 1, *, table: CountTable | None = None,
                     smooth: bool = False, workers: int = 1, executor: Executor | None = None,
                     budget: int = DEFAULT_BUDGET, seed: int = 0,
                     chunk: int | None = None) -> CountRecord:
    """|X(F_{p^m})| by enumeration of P^N(F_{p^m}).

    With ``smooth=True`` every zero is also tested with the Jacobian
    criterion and failures are listed in ``anomalies``; the cache is then
    only used to audit the fresh count.
    """
    if m < 1:
        raise ValueError("extension degree must be >= 1")
    Q = spec.q**m
    total = check_budget(spec.N, Q, budget)
    if table is not None and not smooth:
        hit = table.get(spec.fingerprint, m)
        if hit is not None:
            return CountRecord(spec.fingerprint, m, hit, cached=True)
    t0 = time.perf_counter()
    make_field(spec.p, m, seed).tables  # build once before forking
    nworkers = 1 if executor is None and workers <= 1 else max(workers, 1)
    if chunk is None:
        chunk = max(1, min(1 << 22, -(-total // (4 * nworkers))))
    tasks = _tasks(spec.N, Q, chunk)
    if executor is None and workers <= 1:
        results = [_count_task(spec, m, seed, *t, smooth) for t in tasks]
    elif executor is not None:
        results = list(executor.map(_count_task_star, [(spec, m, seed, *t, smooth) for t in tasks]))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_count_task_star, [(spec, m, seed, *t, smooth) for t in tasks]))
    count = sum(c for c, _ in results)
    anomalies = [a for _, an in results for a in an]
    rec = CountRecord(spec.fingerprint, m, count, time.perf_counter() - t0, anomalies)
    if table is not None:
        table.put(spec.fingerprint, m, count)
    return rec


def _count_task_star(args):
    return _count_task(*args)


def count_many(spec: CompleteIntersectionSpec, max_ext: int, **kw) -> list[int]:
    """[N_1, ..., N_max_ext]."""
    return [count_projective(spec, m, **kw).count for m in range(1, max_ext + 1)]


def count_affine_complement(spec: CompleteIntersectionSpec, hyperplane: int, m: int = 1,
                            **kw) -> int:
    """|X(F_{p^m})| - |(X ∩ {x_i = 0})(F_{p^m})|."""
    if not 0 <= hyperplane <= spec.N:
        raise SectionError(f"hyperplane index {hyperplane} out of range [0, {spec.N}]")
    section = hyperplane_section(spec, hyperplane)
    return count_projective(spec, m, **kw).count - count_projective(section, m, **kw).count


# --- cache -------------------------------------------------------------------

class CountTable:
    """Counts keyed by (fingerprint, m), optionally backed by ``DIR/counts.csv``.

    The file is append-only: ``fingerprint,m,count`` lines under a header.
    """

    HEADER = ["fingerprint", "m", "count"]

    def __init__(self, path: str | os.PathLike | None = None):
        self._data: dict[tuple[str, int], int] = {}
        self._lock = threading.Lock()
        self.path: Path | None = None
        if path is not None:
            path = Path(path)
            if path.suffix != ".csv":
                path = path / CACHE_FILE
            self.path = path
            if path.exists():
                self._load()

    def _load(self):
        with open(self.path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0] != self.HEADER:
            raise IntegrityError(f"{self.path}: missing or wrong header")
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            try:
                fp, m, count = row
                m, count = int(m), int(count)
            except ValueError:
                raise IntegrityError(f"{self.path}:{lineno}: malformed line {row!r}") from None
            if not _HEX64.match(fp) or m < 1 or count < 0:
                raise IntegrityError(f"{self.path}:{lineno}: invalid entry {row!r}")
            old = self._data.get((fp, m))
            if old is not None and old != count:
                raise IntegrityError(f"{self.path}:{lineno}: conflicting counts {old} / {count}")
            self._data[(fp, m)] = count

    def get(self, fingerprint: str, m: int) -> int | None:
        return self._data.get((fingerprint, m))

    def put(self, fingerprint: str, m: int, count: int) -> None:
        count = int(count)
        with self._lock:
            old = self._data.get((fingerprint, m))
            if old is not None:
                if old != count:
                    raise IntegrityError(
                        f"count for ({fingerprint[:12]}, m={m}) is {old}, refusing {count}")
                return
            self._data[(fingerprint, m)] = count
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                new = not self.path.exists()
                with open(self.path, "a", newline="") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    if new:
                        w.writerow(self.HEADER)
                    w.writerow([fingerprint, m, count])

    def __contains__(self, key):
        return key in self._data

    def __len__(self):
        return len(self._data)

    def audit(self, spec: CompleteIntersectionSpec, m: int, **kw) -> bool:
        """Recount a cached key from scratch; raises IntegrityError on mismatch."""
        stored = self.get(spec.fingerprint, m)
        fresh = count_projective(spec, m, **kw).count
        if stored is not None and stored != fresh:
            raise IntegrityError(f"cache says {stored}, recount gives {fresh}")
        return stored is not None


def cache_get(table: CountTable, key: tuple[str, int]) -> int | None:
    return table.get(*key)


def cache_put(table: CountTable, key: tuple[str, int], count: int) -> None:
    table.put(*key, count)
