"""Command line interface: ``cliffspin {apply,verify,kernel,symbol,classify,basis}``.

Exit codes: 0 success, 1 a verification found a nonzero residual, 2 usage or
input errors.  ``--json`` output is deterministic (sorted keys, no timings).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .expr import ExpressionError, parse_field
from .scalars import as_scalar, fmt_rational, parse_rational

__all__ = ["main", "run", "RunConfig", "build_parser"]


class UsageError(Exception):
    pass


def int_list(text):
    """``"3,4"`` or ``"3..6"`` (inclusive) or a mix: ``"3..5,8"``."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def rational_list(text):
    try:
        return [parse_rational(p) for p in str(text).split(",") if p.strip()]
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def rational(text):
    try:
        return parse_rational(str(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


@dataclass
class RunConfig:
    command: str
    m_list: list = field(default_factory=lambda: [3])
    n_list: list = field(default_factory=lambda: [1])
    parity: list = field(default_factory=lambda: ["even", "odd"])
    sweep_bound: int | None = None
    suites: list = field(default_factory=lambda: ["all"])
    output: str = "text"
    seed: int = 0
    perturb: object = 0

    def validate(self):
        if any(m < 3 for m in self.m_list):
            raise UsageError("dimensions must be >= 3")
        if any(n < 1 for n in self.n_list):
            raise UsageError("n must be >= 1")
        if any(p not in ("even", "odd") for p in self.parity):
            raise UsageError("parity must be even and/or odd")
        if self.sweep_bound is not None and self.sweep_bound < 0:
            raise UsageError("sweep bound must be >= 0")
        return self

    def to_json(self):
        d = asdict(self)
        d["perturb"] = fmt_rational(as_scalar(self.perturb))
        return d


def _load_config(path):
    p = Path(path)
    if not p.exists():
        raise UsageError(f"config file {path} not found")
    text = p.read_text()
    if p.suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python 3.10
            try:
                import tomli as tomllib
            except ModuleNotFoundError:
                raise UsageError("TOML configs need Python 3.11+ or the 'tomli' package") from None
        return tomllib.loads(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad JSON config: {exc}") from None


def _emit(obj, args, text=None):
    if args.json:
        print(json.dumps(obj, sort_keys=True, indent=2))
    elif text is not None:
        print(text)
    else:
        print(json.dumps(obj, sort_keys=True, indent=2))


# ---------------------------------------------------------------------------
# apply


def _operator_for(args, m):
    from .conformal import build_operator, inversion_J, maxwell_operator, sct_C
    from .fields import BUILTIN_KINDS, builtin
    from .sphere import rarita_schwinger

    op = args.op
    k = args.k
    if op in ("bosonic", "fermionic"):
        if args.n is None:
            raise UsageError(f"--op {op} needs --n")
        k = 2 * args.n if op == "bosonic" else 2 * args.n - 1
        return build_operator(m, k, args.perturb).op
    if op == "operator":
        if k is None:
            raise UsageError("--op operator needs --k")
        return build_operator(m, k, args.perturb).op
    if op == "inversion":
        if k is None:
            raise UsageError("--op inversion needs --k")
        return inversion_J(m, k)
    if op == "sct":
        if k is None or args.j is None:
            raise UsageError("--op sct needs --k and --j (direction)")
        return sct_C(m, k, args.j)
    if op == "maxwell":
        return maxwell_operator(m)
    if op == "rarita-schwinger":
        return rarita_schwinger(m, 1)
    if op in BUILTIN_KINDS:
        extra = [int(x) for x in args.index.split(",")] if args.index else []
        return builtin(op, m, *extra)
    raise UsageError(f"unknown operator {op!r}")


def cmd_apply(args):
    m = _single(args.m, "--m")
    if args.field is None:
        raise UsageError("apply needs --field")
    f = parse_field(args.field, m)
    out = _operator_for(args, m)(f)
    if args.json:
        _emit({"input": f.to_json(), "output": out.to_json()}, args)
    else:
        print(out.to_latex())
    return 0


# ---------------------------------------------------------------------------
# verify


def _run_group(job):
    from .report import Report  # noqa: F401  (imported for pickling in workers)
    from .suites import clear_caches, run_case

    cases, bound, perturb, seed = job
    out = []
    for case in cases:
        out.append([r.to_json() for r in run_case(case, bound=bound, perturb=perturb, seed=seed)])
    clear_caches()
    return out


def _threads():
    try:
        return max(1, int(os.environ.get("CLIFFSPIN_THREADS", "1")))
    except ValueError:
        raise UsageError("CLIFFSPIN_THREADS must be an integer") from None


def cmd_verify(args):
    from .suites import SUITES, case_group, plan_cases

    cfg = {}
    if args.config:
        cfg = _load_config(args.config)
    suites = args.suite if args.suite is not None else cfg.get("suite", cfg.get("suites", ["all"]))
    if isinstance(suites, str):
        suites = [s.strip() for s in suites.split(",")]
    if "all" in suites:
        suites = list(SUITES)
    rc = RunConfig(
        command="verify",
        m_list=args.m if args.m is not None else list(cfg.get("m_list", [3])),
        n_list=args.n_list if args.n_list is not None else list(cfg.get("n_list", [1])),
        parity=args.parity if args.parity is not None else _as_list(cfg.get("parity", ["even", "odd"])),
        sweep_bound=args.sweep_bound if args.sweep_bound is not None else cfg.get("sweep_bound"),
        suites=suites,
        output="json" if args.json else "text",
        seed=args.seed if args.seed is not None else int(cfg.get("seed", 0)),
        perturb=args.perturb if args.perturb else as_scalar(str(cfg.get("perturb", 0))),
    ).validate()
    try:
        cases = plan_cases(rc.suites, rc.m_list, rc.n_list, tuple(rc.parity))
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    groups = []
    for case in cases:
        if groups and case_group(groups[-1][0]) == case_group(case):
            groups[-1].append(case)
        else:
            groups.append([case])
    jobs = [(g, rc.sweep_bound, rc.perturb, rc.seed) for g in groups]
    threads = _threads()
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_run_group, jobs))
    else:
        results = []
        for job in jobs:
            results.append(_run_group(job))
            if not args.json and not args.quiet:
                for case, reps in zip(job[0], results[-1]):
                    _print_case(case, reps)

    entries = []
    n_reports = n_failed = 0
    for g, reps_per_case in zip(groups, results):
        for case, reps in zip(g, reps_per_case):
            name, kw = case
            entries.append({"suite": name, "case": kw, "reports": reps})
            n_reports += len(reps)
            n_failed += sum(1 for r in reps if r["residuals"])
    ok = n_failed == 0
    doc = {
        "command": "verify",
        "version": __version__,
        "config": rc.to_json(),
        "cases": entries,
        "summary": {"cases": len(entries), "reports": n_reports, "failed": n_failed, "ok": ok},
    }
    if args.json:
        _emit(doc, args)
    else:
        if threads > 1 and not args.quiet:
            for e in entries:
                _print_case((e["suite"], e["case"]), e["reports"])
        print(f"{len(entries)} cases, {n_reports} reports, {n_failed} failed: {'OK' if ok else 'FAIL'}")
    return 0 if ok else 1


def _print_case(case, reps):
    name, kw = case
    for r in reps:
        params = dict(kw, **{k: v for k, v in r["params"].items() if k in ("i", "j", "kernel", "pairing")})
        label = ", ".join(f"{k}={v}" for k, v in params.items())
        status = "ok" if not r["residuals"] else f"FAIL ({len(r['residuals'])} shown)"
        print(f"[{name} {label}] {r['identity']}: {r['fields_checked']} fields, {status}")


def _as_list(v):
    return [v] if isinstance(v, str) else list(v)


# ---------------------------------------------------------------------------
# kernel / symbol / classify / basis


def _single(values, flag):
    if values is None:
        raise UsageError(f"{flag} is required")
    if len(values) != 1:
        raise UsageError(f"{flag} takes a single value here")
    return values[0]


def cmd_kernel(args):
    from .fundamental import build_E, verify_annihilation, verify_homogeneity

    m = _single(args.m, "--m")
    if args.k is None:
        raise UsageError("kernel needs --k")
    E = build_E(m, args.k)
    ann = verify_annihilation(E)
    hom = verify_homogeneity(E)
    doc = {"kernel": E.to_json(), "latex": E.field.to_latex(), "annihilation": ann.to_json(), "homogeneity": hom.to_json()}
    if args.json:
        _emit(doc, args)
    else:
        print(f"E_(1,{args.k}) for m = {m} (scale {E.scale} set to 1):")
        print(E.field.to_latex())
        print(ann.summary())
        print(hom.summary())
    return 0 if ann.ok and hom.ok else 1


def cmd_symbol(args):
    from .symbol import bosonic_det_closed_form, bosonic_det_factor, paper_P_evaluate, principal_symbol

    m = _single(args.m, "--m")
    if args.k is None:
        raise UsageError("symbol needs --k")
    xi = args.xi if args.xi is not None else [0] * (m - 1) + [1]
    S = principal_symbol(m, args.k, xi, route=args.route)
    doc = S.to_json()
    if args.k % 2 == 0:
        n = args.k // 2
        doc["closed_form_factor"] = fmt_rational(bosonic_det_factor(m, n))
        doc["closed_form_det"] = fmt_rational(bosonic_det_closed_form(m, n, xi))
    else:
        n = (args.k + 1) // 2
        P = paper_P_evaluate(m, n, xi)
        doc["P"] = P.to_latex()
        doc["P_nonzero"] = not P.is_zero()
    if args.json:
        _emit(doc, args)
    else:
        for k in sorted(doc):
            print(f"{k}: {doc[k]}")
    return 0


def cmd_classify(args):
    from .weights import (
        chirality_swap,
        half_integer_instance,
        integer_spin_instance,
        intertwiner_from_weights,
        intertwiner_spec,
        soucek_table,
    )

    m = _single(args.m, "--m")
    if args.table:
        if args.a is None or args.b is None:
            raise UsageError("--table needs --a and --b (and --c, --d as the dimension requires)")
        rows = soucek_table(m, args.a, args.b, args.c if args.c is not None else 0, args.d or [])
        doc = {"m": m, "rows": [r.to_json() for r in rows]}
        _emit(doc, args, "\n".join(f"column {r.column}: order {fmt_rational(r.order)}, omega {fmt_rational(r.unprimed.omega)} -> "
                                     f"{fmt_rational(r.primed.omega)}, lambda = lambda': {r.lambda_equal}" for r in rows))
        return 0
    if m % 2:
        raise UsageError("the spin-j instantiation is for even m; use --table for odd m")
    if args.j is None:
        raise UsageError("classify needs --j (or --table)")
    n = m // 2
    j = args.j
    if args.k is not None:
        k = args.k
        if k % 2 == 0:
            b2 = k - 2 * n - 2 * j + 2
        else:
            b2 = k - 2 * j - 2 * n + 3
        b = b2 // 2
    elif args.b is not None:
        b = int(args.b)
    else:
        raise UsageError("classify needs --k or --b")
    odd = args.k % 2 == 1 if args.k is not None else args.half_integer
    inst = half_integer_instance(m, j, b) if odd else integer_spin_instance(m, j, b, check_domain=False)
    row = inst["row"]
    exp = inst["expected"]
    order = int(row.order)
    spec = intertwiner_spec(order) if order >= 1 else None
    got = intertwiner_from_weights(m, row.unprimed.omega, row.primed.omega, odd)
    doc = {
        "m": m,
        "j": j,
        "b": b,
        "spin": "half-integer" if odd else "integer",
        "in_table_domain": b >= 0,
        "row": row.to_json(),
        "order": fmt_rational(row.order),
        "omega": fmt_rational(row.unprimed.omega),
        "omega_prime": fmt_rational(row.primed.omega),
        "lambda": [fmt_rational(x) for x in row.unprimed.lam],
        "lambda_prime": [fmt_rational(x) for x in row.primed.lam],
        "lambda_equal": row.lambda_equal,
        "lambda_equal_up_to_chirality": row.primed.lam in (row.unprimed.lam, chirality_swap(row.unprimed.lam)),
        "formulas": {k: ([fmt_rational(x) for x in v] if isinstance(v, tuple) else fmt_rational(v)) for k, v in exp.items()},
        "formulas_match": {
            "order": row.order == exp["order"],
            "omega": row.unprimed.omega == exp["omega"],
            "omega_prime": row.primed.omega == exp["omega_prime"],
            "lambda": row.unprimed.lam == exp["lambda"],
        },
        "intertwiner": spec.to_json() if spec else None,
        "intertwiner_exponents_from_weights": [fmt_rational(x) for x in got],
        "intertwiner_matches": bool(spec) and tuple(got) == spec.exponents(m),
    }
    if args.k is not None and order != args.k:
        raise UsageError(f"no instance of order {args.k} for m = {m}, j = {j} (parity mismatch)")
    text = (f"m={m} j={j} b={b} ({doc['spin']} spin): order {doc['order']}, omega {doc['omega']} -> {doc['omega_prime']}, "
            f"lambda {doc['lambda']} -> {doc['lambda_prime']}")
    _emit(doc, args, text)
    return 0


def cmd_basis(args):
    from .sphere import basis_H, basis_M

    m = _single(args.m, "--m")
    j = args.j if args.j is not None else 1
    B = basis_H(m, j) if args.space == "H" else basis_M(m, j)
    if args.json:
        _emit(B.to_json(), args)
    else:
        print(f"{args.space}_{j} in dimension {m}: {B.dim} elements")
        for e in B.elements:
            print("  " + e.to_latex())
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="cliffspin", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cliffspin {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--m", type=int_list, help="dimension(s), e.g. 3,4 or 3..6")
        fmt = sp.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="machine readable output")
        fmt.add_argument("--latex", action="store_true", help="LaTeX output (default for fields)")
        sp.add_argument("--seed", type=int, default=None)

    a = sub.add_parser("apply", help="apply an operator to a field")
    common(a)
    a.add_argument("--op", required=True, help="bosonic, fermionic, operator, inversion, sct, maxwell, rarita-schwinger or a builtin kind")
    a.add_argument("--n", type=int)
    a.add_argument("--k", type=int)
    a.add_argument("--j", type=int, help="direction index for --op sct")
    a.add_argument("--index", help="extra integer arguments for builtin kinds, e.g. 1,2")
    a.add_argument("--field", help='expression such as "x1^2*u1"')
    a.add_argument("--perturb", type=rational, default=0)
    a.set_defaults(func=cmd_apply)

    v = sub.add_parser("verify", help="run verification suites")
    common(v)
    v.add_argument("--n", dest="n_list", type=int_list)
    v.add_argument("--parity", type=lambda s: [t.strip() for t in s.split(",")])
    v.add_argument("--suite", type=lambda s: [t.strip() for t in s.split(",")],
                   help="symmetry, inversion, lemmas, fundamental, fischer, spinor or all")
    v.add_argument("--sweep-bound", type=int, default=None)
    v.add_argument("--perturb", type=rational, default=0, help="shift one operator coefficient (mutation control)")
    v.add_argument("--config", help="JSON or TOML file with m_list, n_list, parity, sweep_bound, suite")
    v.add_argument("--quiet", action="store_true")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("kernel", help="fundamental solution and its checks")
    common(k)
    k.add_argument("--k", type=int)
    k.set_defaults(func=cmd_kernel)

    s = sub.add_parser("symbol", help="principal symbol matrix")
    common(s)
    s.add_argument("--k", type=int)
    s.add_argument("--xi", type=rational_list, help="frequency, e.g. 3,4,0")
    s.add_argument("--route", choices=["plane_wave", "formula"], default="plane_wave")
    s.set_defaults(func=cmd_symbol)

    c = sub.add_parser("classify", help="weights, orders and intertwiners")
    common(c)
    c.add_argument("--j", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--table", action="store_true", help="dump every column for parameters --a --b --c --d")
    c.add_argument("--a", type=rational)
    c.add_argument("--b", type=rational)
    c.add_argument("--c", type=rational)
    c.add_argument("--d", type=rational_list)
    c.add_argument("--half-integer", action="store_true", help="with --b: use the half-integer instance")
    c.set_defaults(func=cmd_classify)

    b = sub.add_parser("basis", help="bases of H_j or M_j")
    common(b)
    b.add_argument("--j", type=int)
    b.add_argument("--space", choices=["H", "M"], default="H")
    b.set_defaults(func=cmd_basis)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "seed", None) is None and args.command != "verify":
        args.seed = 0
    try:
        return args.func(args)
    except (UsageError, ExpressionError, ValueError, TypeError) as exc:
        print(f"cliffspin: error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(argv))
