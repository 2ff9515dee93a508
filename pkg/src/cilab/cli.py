"""Command-line entry point: ``cilab <command> [options]``.

Every flag can also be set through an environment variable ``CILAB_<FLAG>``
(upper case, dashes as underscores), e.g. ``CILAB_THREADS=4``; explicit
flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from . import dynamics, theorems, zeta
from .counter import DEFAULT_BUDGET, CountTable, count_projective
from .errors import CilabError, ParseError, ReconstructionError
from .poly import CompleteIntersectionSpec, parse_spec, random_ci

ENV_PREFIX = "CILAB_"

REPORT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["command", "reports", "passed"],
    "properties": {
        "command": {"type": "string"},
        "passed": {"type": "boolean"},
        "reports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "fingerprint", "lhs", "rhs", "pass", "inputs", "notes"],
                "properties": {
                    "name": {"type": "string"},
                    "fingerprint": {"type": "string"},
                    "lhs": {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
                    "rhs": {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
                    "relation": {"enum": ["<=", "<", "=="]},
                    "squared": {"type": "boolean"},
                    "pass": {"type": "boolean"},
                    "inputs": {"type": "object"},
                    "notes": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
        "counts": {"type": "array"},
        "empirical_constants": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "value", "betti_constant_min", "members"],
            },
        },
    },
}


@dataclass
class RunConfig:
    command: str
    specs: list[str]
    max_ext: int | None
    threads: int
    cache: str | None
    fmt: str
    seed: int
    tolerance: float
    budget: int

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ParseError("tolerance must be > 0")
        if self.threads < 1:
            raise ParseError("threads must be >= 1")
        if self.budget < 1:
            raise ParseError("budget must be >= 1")


def _env(name: str, default, cast=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise ParseError(f"bad value {raw!r} for {ENV_PREFIX}{name.upper()}") from None


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--spec", action="append", default=None,
                        help="spec file (JSON); repeatable")
    parser.add_argument("--max-ext", type=int, default=_env("max-ext", None, int))
    parser.add_argument("--threads", type=int, default=_env("threads", 1, int))
    parser.add_argument("--cache", default=_env("cache", None))
    parser.add_argument("--format", dest="fmt", choices=["json", "csv", "text"],
                        default=_env("format", "json"))
    parser.add_argument("--seed", type=int, default=_env("seed", 0, int))
    parser.add_argument("--tolerance", type=float, default=_env("tolerance", 1e-8, float))
    parser.add_argument("--budget", type=int, default=_env("budget", DEFAULT_BUDGET, int))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cilab", description="Point counts and cohomological bounds "
                 "for complete intersections over finite fields.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", help="populate the count table")
    _common(p)
    p.add_argument("--smooth", action="store_true", help="Jacobian-check every point found")

    p = sub.add_parser("zeta", help="reconstruct P_n and check the Riemann hypothesis")
    _common(p)

    p = sub.add_parser("verify", help="theorem harness")
    p.add_argument("check", choices=["thm-a", "thm-b", "katz", "genus", "genus2", "fermat"])
    _common(p)
    p.add_argument("--ext", type=int, default=1, help="count over F_{p^ext}")
    p.add_argument("--hyperplane", type=int, default=None)
    p.add_argument("--d-param", type=int, default=None)
    p.add_argument("--q", type=int, action="append", default=None)
    p.add_argument("--max-ambient", type=int, default=6)
    p.add_argument("--max-degree", type=int, default=6)

    p = sub.add_parser("dynamics", help="Lefschetz and period checks")
    _common(p)
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--q-max", type=int, default=10)
    p.add_argument("--k-max", type=int, default=6)
    p.add_argument("--period-n-max", type=int, default=4)
    p.add_argument("--genus-max", type=int, default=10)

    p = sub.add_parser("gen", help="generate random smooth specs")
    _common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--degrees", required=True, help="comma separated, e.g. 2,2")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--probe-depth", type=int, default=2)
    p.add_argument("--number", type=int, default=1)
    p.add_argument("--out", default=None, help="directory for spec files (default: stdout)")

    p = sub.add_parser("report", help="aggregate reports and empirical constants")
    _common(p)
    return ap


def _load_specs(paths: Sequence[str] | None) -> list[CompleteIntersectionSpec]:
    if not paths:
        raise ParseError("--spec is required")
    out = []
    for path in paths:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc}") from None
        out.append(parse_spec(text))
    return out


class _Ctx:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.table = CountTable(cfg.cache) if cfg.cache else CountTable()

    def count(self, spec: CompleteIntersectionSpec, m: int, smooth: bool = False):
        return count_projective(spec, m, table=self.table, smooth=smooth,
                                workers=self.cfg.threads, budget=self.cfg.budget,
                                seed=self.cfg.seed)

    def counts(self, spec: CompleteIntersectionSpec, upto: int) -> list[int]:
        return [self.count(spec, m).count for m in range(1, upto + 1)]

    def zeta_depth(self, spec: CompleteIntersectionSpec) -> int:
        """Counts needed: b_n + 1 when affordable, else ceil(b_n/2) + 1."""
        if self.cfg.max_ext is not None:
            return self.cfg.max_ext
        b = zeta.middle_betti(spec.N, spec.degrees)
        from .counter import count_pn

        if count_pn(spec.N, spec.q ** (b + 1)) <= self.cfg.budget:
            return b + 1
        return (b + 1) // 2 + 1


def _cmd_count(ctx: _Ctx, args) -> tuple[list, list]:
    rows = []
    upto = ctx.cfg.max_ext or 1
    for spec in _load_specs(args.spec):
        for m in range(1, upto + 1):
            rec = ctx.count(spec, m, smooth=args.smooth)
            rows.append({"fingerprint": spec.fingerprint, "m": m, "count": rec.count,
                         "anomalies": [list(a) for a in rec.anomalies]})
    reports = []
    if args.smooth:
        for spec in _load_specs(args.spec):
            bad = sum(len(r["anomalies"]) for r in rows if r["fingerprint"] == spec.fingerprint)
            reports.append(theorems.VerificationReport(
                "smoothness-probe", spec.fingerprint, bad, 0, "==",
                inputs={"max_ext": upto}).to_dict())
    return reports, rows


def _zeta_reports(ctx: _Ctx, spec: CompleteIntersectionSpec) -> list[theorems.VerificationReport]:
    depth = ctx.zeta_depth(spec)
    counts = ctx.counts(spec, depth)
    b = zeta.middle_betti(spec.N, spec.degrees)
    out = []
    try:
        P, rh, rep = theorems.check_rh(spec, counts, ctx.cfg.tolerance)
    except ReconstructionError as exc:
        return [theorems.VerificationReport("rh", spec.fingerprint, 0, 1, "==",
                                            inputs={"counts": counts}, notes=[str(exc)])]
    out.append(rep)
    if depth > 1:
        predicted = zeta.predict_count(P, spec.n, spec.q, depth)
        out.append(theorems.VerificationReport(
            "prediction", spec.fingerprint, predicted, counts[-1], "==",
            inputs={"d": depth, "b_n": b, "P": list(P.coeffs)}))
    return out


def _cmd_zeta(ctx: _Ctx, args):
    reports = []
    for spec in _load_specs(args.spec):
        reports += [r.to_dict() for r in _zeta_reports(ctx, spec)]
    return reports, None


def _cmd_verify(ctx: _Ctx, args):
    reports: list[theorems.VerificationReport] = []
    check = args.check
    if check == "genus2":
        reports.append(theorems.genus_two_absent(args.max_ambient, args.max_degree))
    elif check == "fermat":
        for q in args.q or [2, 3, 4]:
            reports += theorems.check_fermat_family(q, budget=ctx.cfg.budget, table=ctx.table)
    else:
        for spec in _load_specs(args.spec):
            if check == "thm-a":
                N_m = ctx.count(spec, args.ext).count
                reports.append(theorems.check_theorem_a(spec, N_m, args.ext))
            elif check == "thm-b":
                if args.hyperplane is None:
                    raise ParseError("thm-b needs --hyperplane")
                reports.append(theorems.check_theorem_b(
                    spec, args.hyperplane, d_param=args.d_param, m=args.ext,
                    budget=ctx.cfg.budget, seed=ctx.cfg.seed))
            elif check == "katz":
                reports += theorems.check_katz_spec(spec)
            elif check == "genus":
                b = zeta.middle_betti(spec.N, spec.degrees)
                counts = ctx.counts(spec, ctx.cfg.max_ext or (b + 1) // 2 + 1)
                reports.append(theorems.check_genus_vs_zeta(spec, counts))
    return [r.to_dict() for r in reports], None


def _cmd_dynamics(ctx: _Ctx, args):
    from fractions import Fraction

    reports = []
    for n in range(0, args.n_max + 1):
        for q in range(1, args.q_max + 1):
            closed = sum(q**i for i in range(n + 1))
            reports.append(theorems.VerificationReport(
                "lambda-fnq", "", dynamics.lambda_fnq(n, q), closed, "==",
                inputs={"n": n, "q": q}))
    for g in range(0, args.genus_max + 1):
        reports.append(theorems.VerificationReport(
            "lambda-id", "", dynamics.lambda_identity_curve(g), 2 - 2 * g, "==",
            inputs={"g": g}))
        reports.append(theorems.VerificationReport(
            "lambda-id-ratio", "", dynamics.identity_curve_ratio(g), Fraction(2 * g), "==",
            inputs={"g": g}))
    for k in range(2, args.k_max + 1):
        for n in range(1, args.period_n_max + 1):
            reports += dynamics.check_min_period(k, n)
    return [r.to_dict() for r in reports], None


def _cmd_gen(ctx: _Ctx, args):
    try:
        degrees = tuple(int(x) for x in args.degrees.split(","))
    except ValueError:
        raise ParseError(f"bad --degrees {args.degrees!r}") from None
    rows = []
    for i in range(args.number):
        spec = random_ci(args.N, degrees, args.p, seed=ctx.cfg.seed + i,
                         probe_depth=args.probe_depth, table=ctx.table, budget=ctx.cfg.budget)
        text = json.dumps(spec.to_dict(), sort_keys=True, indent=1)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{spec.fingerprint[:16]}.json").write_text(text + "\n")
        rows.append({"fingerprint": spec.fingerprint, "seed": ctx.cfg.seed + i,
                     "smoothness_verified_up_to": spec.smoothness_verified_up_to,
                     "spec": spec.to_dict()})
    return [], rows


def _cmd_report(ctx: _Ctx, args):
    reports: list[theorems.VerificationReport] = []
    thm_a: list[theorems.VerificationReport] = []
    for spec in _load_specs(args.spec):
        N1 = ctx.count(spec, 1).count
        rep = theorems.check_theorem_a(spec, N1)
        thm_a.append(rep)
        reports.append(rep)
        reports += theorems.check_katz_spec(spec)
        reports += _zeta_reports(ctx, spec)
    constants = []
    if thm_a:
        emp = theorems.empirical_constant(thm_a)
        for n in sorted(emp):
            members = [r for r in thm_a if r.inputs["n"] == n]
            const = min(r.inputs["constant"] for r in members)
            constants.append({
                "n": n, "value": str(emp[n]), "betti_constant_min": const,
                "members": len(members),
                "strictly_below": all(theorems.empirical_below_constant(r) for r in members),
                "positivity_threshold_q": theorems.positivity_threshold(
                    n, max(r.inputs["constant"] for r in members),
                    [r.inputs["q"] for r in members]),
            })
    return [r.to_dict() for r in reports], {"empirical_constants": constants}


COMMANDS = {
    "count": _cmd_count, "zeta": _cmd_zeta, "verify": _cmd_verify,
    "dynamics": _cmd_dynamics, "gen": _cmd_gen, "report": _cmd_report,
}


def _render(doc: dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "fingerprint", "lhs", "relation", "rhs", "squared", "pass"])
        for r in doc["reports"]:
            w.writerow([r["name"], r["fingerprint"], r["lhs"], r["relation"], r["rhs"],
                        r["squared"], r["pass"]])
        for row in doc.get("counts") or []:
            if "count" in row:
                w.writerow(["count", row["fingerprint"], row["count"], "m", row["m"], "", ""])
        for row in doc.get("empirical_constants") or []:
            w.writerow(["empirical-constant", f"n={row['n']}", row["value"], "<",
                        row["betti_constant_min"], "", row["strictly_below"]])
        return buf.getvalue()
    for r in doc["reports"]:
        flag = "PASS" if r["pass"] else "FAIL"
        sq = " (squared)" if r["squared"] else ""
        buf.write(f"{flag} {r['name']} {r['fingerprint'][:12]} {r['lhs']} {r['relation']} "
                  f"{r['rhs']}{sq}\n")
    for row in doc.get("counts") or []:
        if "count" in row:
            buf.write(f"count {row['fingerprint'][:12]} m={row['m']} N={row['count']}\n")
        else:
            buf.write(f"spec {row['fingerprint']}\n")
    for row in doc.get("empirical_constants") or []:
        buf.write(f"empirical n={row['n']} {row['value']} (betti constant {row['betti_constant_min']})\n")
    return buf.getvalue()


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig(args.command, args.spec or [], args.max_ext, args.threads, args.cache,
                        args.fmt, args.seed, args.tolerance, args.budget)
        ctx = _Ctx(cfg)
        reports, extra = COMMANDS[args.command](ctx, args)
    except CilabError as exc:
        print(f"cilab: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:  # argument validation inside the library
        print(f"cilab: error: {exc}", file=sys.stderr)
        return ParseError.exit_code
    doc: dict[str, Any] = {"command": args.command, "reports": reports,
                           "passed": all(r["pass"] for r in reports)}
    if isinstance(extra, list):
        doc["counts"] = extra
    elif isinstance(extra, dict):
        doc.update(extra)
    out.write(_render(doc, cfg.fmt))
    return 0 if doc["passed"] else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
