"""Command-line entry point: ``dlakit {basis,closure,structure,verify,reach3}``.

JSON is the contract; the text format renders the same report for people.
Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, TextIO

from . import closure as cl
from . import structure as st
from .errors import DlaError, SizeCapError
from .pauli import OperatorElement, PauliString

SCHEMA = "dlakit/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ORACLE_MAX_N = 6
RANDOM_PAIRS = 200


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    n: int
    format: str = "text"
    tol: float = st.DEFAULT_TOL
    oracle: bool = False
    grid: int = 10_000
    seed: int = 0

    def validate(self) -> None:
        if self.n < 3:
            raise UsageError("n must be ≥ 3")
        if self.oracle and self.n > ORACLE_MAX_N:
            raise UsageError(f"--oracle supports n ≤ {ORACLE_MAX_N}")
        if self.subcommand == "reach3" and self.n != 3:
            raise UsageError("reach3 is defined for n = 3 only")
        if self.grid < 1000:
            raise UsageError("--grid must be ≥ 1000")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")


@dataclass
class Report:
    data: dict
    text: list[str]
    passed: bool = True


def _check(name: str, ok: bool, detail: object = None) -> dict:
    out = {"check": name, "passed": bool(ok)}
    if detail is not None:
        out["detail"] = detail
    return out


def _fmt_element(a: OperatorElement) -> str:
    parts = []
    for s, c in a.items():
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        coef = "" if mag == 1 else f"{mag}*"
        parts.append(f"{sign} {coef}{s.label}")
    body = " ".join(parts)
    return body[2:] if body.startswith("+ ") else body


def _check_lines(checks: Sequence[dict]) -> list[str]:
    lines = []
    for c in checks:
        mark = "PASS" if c["passed"] else "FAIL"
        extra = ""
        if "residual" in c:
            extra = f"  residual={c['residual']:.3e} tol={c['tol']:.0e}"
        elif "detail" in c:
            extra = f"  ({c['detail']})"
        lines.append(f"  [{mark}] {c['check']}{extra}")
    return lines


# --------------------------------------------------------------------------
# subcommands


def cmd_basis(cfg: RunConfig) -> Report:
    basis = cl.named_basis(cfg.n)
    elements = [{"name": k, "terms": basis[k].to_records()} for k in basis.names]
    text = [f"named basis, n={cfg.n}: {len(basis)} elements (3n-1 = {3 * cfg.n - 1})"]
    text += [f"  {k:>5} = {_fmt_element(basis[k])}" for k in basis.names]
    return Report({"n": cfg.n, "dimension": len(basis), "elements": elements}, text)


def cmd_closure(cfg: RunConfig) -> Report:
    res = cl.compute_closure(cl.generators(cfg.n))
    named = cl.named_basis(cfg.n)
    same = cl.span_equal(res.elements, named.elements)
    checks = [
        _check("dimension = 3n-1", res.dimension == 3 * cfg.n - 1, f"{res.dimension} vs {3 * cfg.n - 1}"),
        _check("span equals named basis", same),
    ]
    passed = all(c["passed"] for c in checks)
    data = {
        "n": cfg.n,
        "dimension": res.dimension,
        "max_depth": res.trace.max_depth,
        "trace": res.trace.to_json(),
        "span_equal": same,
        "checks": checks,
        "passed": passed,
    }
    text = [f"closure, n={cfg.n}: dimension {res.dimension}, depth {res.trace.max_depth}"]
    for d in range(res.trace.max_depth + 1):
        names = []
        for e in res.trace.at_depth(d):
            names.append(e.name if e.left is None else f"{e.name}=[{e.left},{e.right}]")
        text.append(f"  depth {d}: {len(names)} new: {', '.join(names)}")
    text += _check_lines(checks)
    return Report(data, text, passed)


def cmd_structure(cfg: RunConfig) -> Report:
    rep = st.decompose(cfg.n, cfg.tol)
    text = [f"structure, n={cfg.n}: center dim 2 + {len(rep.ideals)} su(2) ideals = {rep.dimension}"]
    text.append("  roots: " + ", ".join(f"{v:.12g}" for v in rep.roots.values))
    text.append(f"  center C1 = {_fmt_element(rep.center.c1)}")
    text.append(f"  center C2 = {_fmt_element(rep.center.c2)}")
    for I, v in zip(rep.ideals, rep.ideal_verdicts):
        kind = "exact" if I.exact else "float"
        worst = max(c.residual for c in v.checks)
        text.append(f"  λ={I.lam:.12g} ({kind}): {'PASS' if v.passed else 'FAIL'}, worst residual {worst:.3e}")
        text += ["  " + line for line in _check_lines([c.to_json() for c in v.failures()])]
    text += _check_lines([c.to_json() for c in rep.verdicts])
    data = rep.to_json()
    data["passed"] = rep.all_passed
    return Report(data, text, rep.all_passed)


def _random_element(rng: random.Random, n: int) -> OperatorElement:
    terms = {}
    for _ in range(rng.randint(1, 4)):
        x, z = rng.getrandbits(n), rng.getrandbits(n)
        if x or z:
            terms[PauliString(n, x, z)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return OperatorElement(n, terms)


def cmd_verify(cfg: RunConfig) -> Report:
    n = cfg.n
    checks: list[dict] = []
    res = cl.compute_closure(cl.generators(n))
    named = cl.named_basis(n)
    checks.append(_check("symbolic dimension = 3n-1", res.dimension == 3 * n - 1, res.dimension))
    checks.append(_check("closure span equals named basis", cl.span_equal(res.elements, named.elements)))
    checks.append(_check("commutator table matches closed form", cl.commutator_table(n) == cl.table_closed_form(n)))
    cntr = st.center(n)
    solved = st.center_by_solving(n)
    checks.append(_check("center agrees with solved commutant", cl.span_equal(cntr.elements, solved.elements)))
    data: dict = {"n": n, "symbolic_dimension": res.dimension, "oracle": cfg.oracle}

    if cfg.oracle:
        from . import oracle as orc
        from .pauli import element_bracket

        gens = orc.dense_generators(n)
        dc = orc.dense_closure(gens)
        cm = orc.dense_commutant_dim(gens, closure=dc)
        fit = max(cm.fit_residual(orc.to_dense(c)) for c in cntr.elements)
        checks.append(_check("dense closure dimension equals symbolic", dc.dimension == res.dimension,
                             f"{dc.dimension} == {res.dimension}"))
        checks.append(_check("dense commutant dimension = 2", cm.dimension == 2, f"{cm.dimension} == 2"))
        checks.append({"check": "closed-form center in dense commutant", "residual": fit, "tol": 1e-9,
                       "passed": fit <= 1e-9})
        checks += [c.to_json() for c in orc.dense_recheck(n)]

        rng = random.Random(cfg.seed)
        worst = 0.0
        for _ in range(RANDOM_PAIRS):
            a, b = _random_element(rng, n), _random_element(rng, n)
            lhs = orc.to_dense(element_bracket(a, b)).matrix
            rhs = orc.commutator(orc.to_dense(a), orc.to_dense(b)).matrix
            worst = max(worst, float(abs(lhs - rhs).max()))
        checks.append({"check": f"bracket vs matrix commutator ({RANDOM_PAIRS} random pairs)",
                       "residual": worst, "tol": 1e-12, "passed": worst <= 1e-12})
        data.update({"dense_dimension": dc.dimension, "commutant_dimension": cm.dimension,
                     "singular_values": {"min_kept": dc.decision.min_kept, "max_dropped": dc.decision.max_dropped}, "seed": cfg.seed})

    passed = all(c["passed"] for c in checks)
    data.update({"checks": checks, "passed": passed})
    text = [f"verify, n={n}{' with dense oracle' if cfg.oracle else ''}"]
    if cfg.oracle:
        text.append(f"  closure dims {data['dense_dimension']} == {res.dimension}; "
                    f"commutant dim {data['commutant_dimension']} == 2")
    text += _check_lines(checks)
    return Report(data, text, passed)


def cmd_reach3(cfg: RunConfig) -> Report:
    from .reach3 import run_suite

    rep = run_suite(cfg.grid)
    ok = abs(rep.tau_star - 1) <= 1e-6 and rep.passed
    data = rep.to_json()
    data["passed"] = ok
    text = [
        f"reach3: a_2 = {rep.polynomial}, roots {rep.roots}",
        f"  θ* = {rep.theta_star:.12f}  τ* = {rep.tau_star:.12f}  (grid {rep.grid})",
    ]
    text += _check_lines([c.to_json() for c in rep.checks])
    return Report(data, text, ok)


COMMANDS: dict[str, Callable[[RunConfig], Report]] = {
    "basis": cmd_basis,
    "closure": cmd_closure,
    "structure": cmd_structure,
    "verify": cmd_verify,
    "reach3": cmd_reach3,
}


# --------------------------------------------------------------------------
# plumbing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dlakit", description="Dynamical Lie algebra of the periodic Ising chain.")
    sub = p.add_subparsers(dest="subcommand", required=True)
    helps = {
        "basis": "print the 3n-1 named basis elements",
        "closure": "run the closure algorithm and compare with the named basis",
        "structure": "center, roots and su(2) ideals with all identity checks",
        "verify": "symbolic cross-checks, optionally against the dense oracle",
        "reach3": "the n=3 reachability and tangle example",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text)
        s.add_argument("--n", type=int, required=name != "reach3", default=3 if name == "reach3" else None)
        s.add_argument("--format", choices=("text", "json"), default="text")
        s.add_argument("--tol", type=float, default=st.DEFAULT_TOL)
        s.add_argument("--oracle", action="store_true", help="cross-check with dense matrices (n ≤ 6)")
        s.add_argument("--grid", type=int, default=10_000, help="θ grid resolution for reach3")
        s.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    return p


def _emit(report: Report, cfg: RunConfig, out: TextIO) -> None:
    if cfg.format == "json":
        body = {"schema": SCHEMA, "command": cfg.subcommand, **report.data}
        out.write(json.dumps(body, indent=2, ensure_ascii=False, allow_nan=False) + "\n")
    else:
        out.write("\n".join(report.text) + "\n")


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors with code 2
        return int(e.code) if e.code is not None else EXIT_OK
    cfg = RunConfig(ns.subcommand, ns.n, ns.format, ns.tol, ns.oracle, ns.grid, ns.seed)
    try:
        cfg.validate()
        report = COMMANDS[cfg.subcommand](cfg)
    except UsageError as e:
        err.write(f"dlakit: error: {e}\n")
        return EXIT_USAGE
    except SizeCapError as e:
        err.write(f"dlakit: error: {e}\n")
        return EXIT_USAGE
    except DlaError as e:
        err.write(f"dlakit: verification failed: {e}\n")
        return EXIT_FAIL
    _emit(report, cfg, out)
    return EXIT_OK if report.passed else EXIT_FAIL


def main_entry() -> None:
    sys.exit(main())
