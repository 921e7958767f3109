"""Command-line front end: ``shifted-poisson <subcommand> ...``.

Exit codes: 0 verified, 1 identity violated, 2 invalid input,
3 internal consistency failure (specialized identities disagree with the
generic Maurer-Cartan residual).  Reports go to stdout and are deterministic;
warnings and errors go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import io
from .classify import (
    IDENTITY_TABLES,
    ConsistencyError,
    NonlinearSystemError,
    check_linfty_specialized,
    solve_linear_stratum,
    verify_specialized,
)
from .examples import CATALOG, builtin
from .linfty import check_linfty, weight_one_components
from .polyvector import (
    PolyvectorFamily,
    ResidualReport,
    THREADS_ENV,
    component_degree,
    default_caps,
    enumerate_components,
    mc_residual,
)

EXIT_OK, EXIT_VIOLATED, EXIT_INVALID, EXIT_INCONSISTENT = 0, 1, 2, 3
MAX_LISTED = 12


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers


def _load(args) -> io.Problem:
    if getattr(args, "builtin", None):
        if args.file:
            raise InputError("give either a FILE or --builtin, not both")
        try:
            alg = builtin(args.builtin)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        return io.Problem(alg, alg.name)
    if not args.file:
        raise InputError("a problem FILE (or --builtin NAME) is required")
    path = Path(args.file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        problem = io.parse(text)
    except io.DocumentError as exc:
        raise InputError(f"{path}: {exc}") from None
    for w in problem.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return problem


def _fmt(c) -> str:
    return io.format_rational(c)


def _entry(ins, outs, c) -> str:
    return f"[{', '.join(ins)}] -> [{', '.join(outs)}]: {_fmt(c)}"


def _print_rows(report: ResidualReport, out) -> None:
    for key in sorted(report.rows):
        R = report.rows[key]
        m, l = key
        if R.is_zero():
            print(f"row ({m},{l}): zero", file=out)
            continue
        entries = R.named_entries()
        print(f"row ({m},{l}): NONZERO, {len(entries)} entries", file=out)
        for ins, outs, c in entries[:MAX_LISTED]:
            print(f"    {_entry(ins, outs, c)}", file=out)
        if len(entries) > MAX_LISTED:
            print(f"    ... {len(entries) - MAX_LISTED} more", file=out)


def _header(cmd: str, problem: io.Problem, out, n: int | None = None) -> None:
    alg = problem.algebra
    dims = ", ".join(f"deg {d}: {k}" for d, k in sorted(alg.space.dims.items()))
    title = problem.name or "(unnamed)"
    print(f"{cmd}: {title}", file=out)
    shift = f", n={n}" if n is not None else ""
    print(f"N={alg.N}{shift}; basis {dims}", file=out)


# ---------------------------------------------------------------------------
# subcommands


def cmd_check_linfty(args, out) -> int:
    problem = _load(args)
    alg = problem.algebra
    _header("check-linfty", problem, out)
    report = check_linfty(alg)
    _print_rows(report, out)
    if alg.N in (1, 2):
        special = check_linfty_specialized(alg)
        if special != report.is_zero:
            print(
                f"internal consistency failure: hand-listed identities say {'zero' if special else 'nonzero'}, "
                f"generic residual says {report.verdict}",
                file=out,
            )
            return EXIT_INCONSISTENT
        print("hand-listed identities: agree", file=out)
    print(f"verdict: {'VERIFIED' if report.is_zero else 'VIOLATED'}", file=out)
    return EXIT_OK if report.is_zero else EXIT_VIOLATED


def cmd_enumerate(args, out) -> int:
    N, n = args.N, args.n
    if N < 1:
        raise InputError("--N must be at least 1")
    m_cap, l_cap = default_caps(N, n)
    m_max = args.m_max if args.m_max is not None else m_cap
    l_max = args.l_max if args.l_max is not None else l_cap
    rows = [r for r in enumerate_components(N, n, m_max, l_max) if r[0] >= 2]
    print(f"enumerate: N={N}, n={n}, m<={m_max}, l<={l_max}", file=out)
    print("window: m(1-N) <= (1-m)n + 2 - l <= l(N-1), weight m >= 2", file=out)
    if not rows:
        if n > 2 * N:
            print("no admissible components: n > 2N forces every shifted Poisson structure to vanish", file=out)
        else:
            print("no admissible components within the caps", file=out)
    else:
        print("  m   l   degree", file=out)
        for m, l, d in rows:
            print(f"{m:>3} {l:>3} {d:>8}", file=out)
    print(f"count: {len(rows)}", file=out)
    return EXIT_OK


def _family(problem: io.Problem, n: int) -> PolyvectorFamily:
    return PolyvectorFamily(n, {**weight_one_components(problem.algebra), **problem.components})


def _check_window(problem: io.Problem, n: int) -> None:
    N = problem.algebra.N
    for (m, l), M in problem.components.items():
        d = component_degree(m, l, n)
        if M.is_zero():
            continue
        if not (m * (1 - N) <= d <= l * (N - 1)):
            raise InputError(
                f"components[\"{m},{l}\"]: degree {d} lies outside the window "
                f"m(1-N) <= deg <= l(N-1) = [{m * (1 - N)}, {l * (N - 1)}] for N={N}; "
                "such a component vanishes identically"
            )


def cmd_check_poisson(args, out) -> int:
    problem = _load(args)
    n = args.n if args.n is not None else problem.shift
    if n is None:
        raise InputError("the shift n is required (document \"shift\" or --n)")
    if problem.shift is not None and args.n is not None and args.n != problem.shift:
        raise InputError(f"--n {args.n} contradicts the document shift {problem.shift}")
    _check_window(problem, n)
    N = problem.algebra.N
    cap = args.max_weight or problem.max_weight or 2 * N + 2
    family = _family(problem, n)
    heavy = [k for k, M in problem.components.items() if k[0] > cap and not M.is_zero()]
    if heavy:
        raise InputError(f"components {sorted(heavy)} exceed --max-weight {cap}")
    _header("check-poisson", problem, out, n)
    comps = ", ".join(f"({m},{l})" for (m, l), M in sorted(problem.components.items()) if not M.is_zero())
    print(f"components: {comps or 'none'}", file=out)
    print(f"max weight: {cap}", file=out)
    report = mc_residual(family, cap)
    _print_rows(report, out)
    status = EXIT_OK if report.is_zero else EXIT_VIOLATED
    if args.specialized:
        if (N, n) not in IDENTITY_TABLES:
            print(f"specialized: no hand-listed identities for N={N}, n={n}", file=out)
        else:
            try:
                verdict = verify_specialized(problem.algebra, PolyvectorFamily(n, problem.components))
            except ConsistencyError as exc:
                print(f"internal consistency failure: {exc}", file=out)
                return EXIT_INCONSISTENT
            except ValueError as exc:
                raise InputError(str(exc)) from None
            if cap >= 2 * N + 2 and verdict.valid != report.is_zero:
                print("internal consistency failure: specialized verdict disagrees with the residual", file=out)
                return EXIT_INCONSISTENT
            failed = ", ".join(verdict.failed) if verdict.failed else "none"
            print(f"specialized: {'valid' if verdict.valid else 'invalid'}; failed identities: {failed}", file=out)
    print(f"verdict: {'VERIFIED' if report.is_zero else 'VIOLATED'}", file=out)
    return status


def _parse_label(text: str) -> tuple[int, int]:
    try:
        m, l = (int(p) for p in text.split(","))
    except ValueError:
        raise InputError(f"unknown component {text!r} is not of the form m,l") from None
    return m, l


def cmd_solve(args, out) -> int:
    problem = _load(args)
    n = args.n if args.n is not None else problem.shift
    if n is None:
        raise InputError("the shift n is required (document \"shift\" or --n)")
    alg = problem.algebra
    N = alg.N
    cap = args.max_weight or problem.max_weight or 2 * N + 2
    unknowns = [_parse_label(u) for u in args.unknown] if args.unknown else list(problem.unknowns)
    if args.all or not unknowns:
        m_cap, l_cap = default_caps(N, n)
        unknowns = [(m, l) for m, l, _ in enumerate_components(N, n, min(m_cap, cap), l_cap) if m >= 2]
        unknowns = [k for k in unknowns if k not in problem.components]
    _check_window(problem, n)
    _header("solve", problem, out, n)
    print(f"unknowns: {', '.join(f'({m},{l})' for m, l in sorted(unknowns)) or 'none'}", file=out)
    try:
        sol = solve_linear_stratum(alg, n, problem.components, unknowns, cap, relax=args.relax)
    except NonlinearSystemError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=out)
        return EXIT_INCONSISTENT
    except ValueError as exc:
        raise InputError(str(exc)) from None
    print(f"coordinates: {len(sol.slots)}", file=out)
    if sol.relaxed:
        rows = ", ".join(f"({m},{l})" for m, l in sol.dropped_rows)
        print(f"relaxed: rows {rows} are quadratic in the unknowns and were dropped", file=out)
    if not sol.consistent:
        print("no solutions", file=out)
        return EXIT_VIOLATED
    print(f"dimension {sol.dimension}", file=out)
    if sol.affine_offset is not None:
        print("particular solution:", file=out)
        _print_vector(sol, sol.affine_offset, out)
    for k, vec in enumerate(sol.basis):
        print(f"basis vector {k + 1}:", file=out)
        _print_vector(sol, vec, out)
    if args.verify:
        start = sol.affine_offset or tuple(0 for _ in sol.slots)
        base = {**weight_one_components(alg), **problem.components}
        ok = True
        vectors = [start] if sol.relaxed and sol.basis else [start] + [
            tuple(a + b for a, b in zip(start, v)) for v in sol.basis
        ]
        for vec in vectors:
            comps = dict(base)
            for key, M in sol.components(vec).items():
                comps[key] = comps[key] + M if key in comps else M
            rows = mc_residual(PolyvectorFamily(n, comps), cap).rows
            ok &= all(R.is_zero() for key, R in rows.items() if key not in sol.dropped_rows)
        print(f"verify: {'all solutions re-checked, residual zero' if ok else 'FAILED'}", file=out)
        if not ok:
            return EXIT_INCONSISTENT
    return EXIT_OK


def _print_vector(sol, vec, out) -> None:
    for (m, l, ins, outs), c in zip(sol.slots, vec):
        if c:
            print(f"    ({m},{l}) [{', '.join(ins)}] -> [{', '.join(outs)}]: {_fmt(c)}", file=out)


def cmd_builtin(args, out) -> int:
    if args.list or not args.name:
        for name, desc in CATALOG.items():
            print(f"{name:<22} {desc.description}", file=out)
        return EXIT_OK
    try:
        alg = builtin(args.name)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out.write(io.serialize(io.Problem(alg, alg.name, args.n)))
    return EXIT_OK


def cmd_project(args, out) -> int:
    problem = _load(args)
    if args.n is not None and problem.shift is not None and args.n != problem.shift:
        raise InputError(f"--n {args.n} contradicts the document shift {problem.shift}")
    if problem.shift is None:
        problem.shift = args.n
    out.write(io.serialize(problem))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shifted-poisson",
        description="Exact checks for shifted Poisson structures on Lie N-algebras.",
        epilog=f"Set {THREADS_ENV}=k to cap internal parallelism (default 1). "
        "Exit codes: 0 verified, 1 violated, 2 invalid input, 3 internal inconsistency.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        p.add_argument("file", nargs="?", help="problem document (JSON, schema shifted-poisson/1)")
        p.add_argument("--builtin", metavar="NAME", help="use a catalog example instead of a file")

    p = sub.add_parser("check-linfty", help="check the homotopy Jacobi identities")
    source(p)
    p.set_defaults(func=cmd_check_linfty)

    p = sub.add_parser("check-poisson", help="evaluate the Maurer-Cartan residual of a candidate")
    source(p)
    p.add_argument("--n", type=int, help="shift (defaults to the document's)")
    p.add_argument("--specialized", action="store_true", help="also run the hand-listed identities and compare")
    p.add_argument(
        "--max-weight",
        type=int,
        metavar="K",
        help="cap on the residual weight m (default 2N+2; at n=1 the tower of components is unbounded)",
    )
    p.set_defaults(func=cmd_check_poisson)

    p = sub.add_parser("enumerate", help="list admissible components (m, l, degree)")
    p.add_argument("--N", type=int, required=True, help="Lie N-algebra amplitude (degrees 1-N..0)")
    p.add_argument("--n", type=int, required=True, help="shift")
    p.add_argument("--m-max", type=int, help="largest weight m listed (default from the degree window)")
    p.add_argument("--l-max", type=int, help="largest input arity l listed (default from the degree window)")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("solve", help="solve the Maurer-Cartan rows for unknown components")
    source(p)
    p.add_argument("--n", type=int, help="shift (defaults to the document's)")
    p.add_argument("--unknown", action="append", metavar="m,l", help="unknown component (repeatable)")
    p.add_argument("--all", action="store_true", help="all admissible components not fixed by the document")
    p.add_argument("--relax", action="store_true", help="drop rows quadratic in the unknowns instead of failing")
    p.add_argument("--verify", action="store_true", help="re-run the residual on every reported solution")
    p.add_argument("--max-weight", type=int, metavar="K", help="cap on the residual weight m (default 2N+2)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("builtin", help="list catalog examples or dump one as a document")
    p.add_argument("name", nargs="?", help="catalog name to dump")
    p.add_argument("--list", action="store_true", help="list catalog names with one-line descriptions")
    p.add_argument("--n", type=int, help="shift written into the dumped document")
    p.set_defaults(func=cmd_builtin)

    p = sub.add_parser("project", help="apply the symmetry projector and print the canonical document")
    source(p)
    p.add_argument("--n", type=int, help="shift used for the projection when the document has none")
    p.set_defaults(func=cmd_project)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
