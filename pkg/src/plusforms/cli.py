"""Command-line front end.

Exit status: 0 when every check passes, 1 on a failed check, 2 on usage
errors (bad flags or parameters outside a clause's hypotheses), 3 when a
standing hypothesis could not be established.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import (
    BadPrime,
    HypothesisUnverified,
    HypothesisViolated,
    InsufficientPrecision,
    NonexistentForm,
    NotWeaklyHolomorphicHypothesis,
    PlusFormsError,
    UnsupportedExponent,
)
from .hecke import apply_T_t2
from .reduced import FormCache, build_basis, certify_basis_integrality, checklist_precision, compute_m_epsilon
from .report import VerificationReport, format_rational
from .series import LaurentSeries
from .space import SpaceParams, certify_integrality
from .theorems import DEFAULT_WINDOW, Clause, Coefficients, IdentityCase, enumerate_cases, run_cases

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNVERIFIED = 0, 1, 2, 3
PREC_ENV = "PLUSFORMS_PREC"
DEFAULT_PREC = 100


class UsageError(Exception):
    pass


def _default_prec() -> int:
    raw = os.environ.get(PREC_ENV)
    if raw is None:
        return DEFAULT_PREC
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{PREC_ENV} must be an integer, got {raw!r}") from None


def _int_list(text: str) -> list[int]:
    """'1,3,5' or '3..7' (inclusive) or a mix: '1,4..6'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _params(args) -> SpaceParams:
    try:
        return SpaceParams.plus(args.N, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, payload, text: str) -> None:
    out = json.dumps(payload, indent=2) if args.output == "json" else text
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        sys.stdout.write(out + "\n")


def _series_text(label: str, f: LaurentSeries, terms: int | None) -> str:
    return f"{label} = {f.pretty(max_terms=terms)}"


def _display(f: LaurentSeries, upto: int | None) -> LaurentSeries:
    return f if upto is None else f.truncate(min(f.precision, upto + 1))


# -- commands ----------------------------------------------------------------------


def cmd_basis(args) -> int:
    params = _params(args)
    prec = args.prec
    pole = -params.level if args.pole_bound is None else args.pole_bound
    if pole > 0:
        raise UsageError("--pole-bound must be <= 0")
    basis = build_basis(params, pole, prec)
    entries = {}
    lines = [f"reduced forms for {params}, pivots >= {pole}, precision {prec}"]
    all_pass = True
    for m in sorted(basis.forms, reverse=True):
        form = basis.forms[m]
        try:
            rep = certify_integrality(form.series, params)
            status = "integral" if rep.passed else "not integral"
            all_pass &= rep.passed
        except (InsufficientPrecision, NotWeaklyHolomorphicHypothesis) as exc:
            status = f"uncertified: {exc}"
        shown = _display(form.series, args.show_through)
        entries[str(m)] = {"s": format_rational(form.s), "series": shown.to_json(), "certificate": status}
        lines.append(_series_text(f"F_{m}", shown, None) + f"   [s={_plain(format_rational(form.s))}; {status}]")
    payload = {
        "N": params.N,
        "k": params.k,
        "pole_bound": pole,
        "precision": prec,
        "forms": entries,
        "existence_gaps": sorted(basis.existence_gaps),
    }
    if basis.existence_gaps:
        lines.append(f"no reduced form at m in {sorted(basis.existence_gaps)}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if all_pass else EXIT_FAIL


def cmd_form(args) -> int:
    params = _params(args)
    form = FormCache(params).form(args.m, args.prec)
    series = form.series.truncate(args.prec)
    payload = {"N": params.N, "k": params.k, "m": args.m, "s": format_rational(form.s), "series": series.to_json()}
    _emit(args, payload, _series_text(f"F_{args.m}", series, None))
    return EXIT_OK


def cmd_hecke(args) -> int:
    params = _params(args)
    need = args.t * args.t * args.prec + 1
    form = FormCache(params).form(args.m, need)
    image = apply_T_t2(form.series.truncate(need), args.t, params).truncate(args.prec)
    payload = {"N": params.N, "k": params.k, "m": args.m, "t": args.t, "series": image.to_json()}
    _emit(args, payload, _series_text(f"F_{args.m} | T({args.t}^2)", image, None))
    return EXIT_OK


def cmd_coeff_table(args) -> int:
    params = _params(args)
    coeffs = Coefficients(params)
    ms = _int_list(args.m)
    ds = [d for d in range(args.d_max + 1) if params.supports(d)]
    for m in ms:
        coeffs.reserve(m, args.t * args.t * args.d_max)
    table = {str(m): {str(d): format_rational(coeffs.B(m, args.t, d)) for d in ds} for m in ms}
    width = max([len(v) for row in table.values() for v in row.values()] + [6])
    head = "m \\ d".rjust(8) + "".join(str(d).rjust(width + 1) for d in ds)
    rows = [head]
    for m in ms:
        rows.append(str(m).rjust(8) + "".join(_plain(table[str(m)][str(d)]).rjust(width + 1) for d in ds))
    _emit(args, {"N": params.N, "k": params.k, "t": args.t, "table": table}, "\n".join(rows))
    return EXIT_OK


def _plain(s: str) -> str:
    return s[:-2] if s.endswith("/1") else s


def cmd_certify(args) -> int:
    params = _params(args)
    m_eps = compute_m_epsilon(params)
    lower = min(-params.level - m_eps, -1)
    prec = max(args.prec or 0, checklist_precision(params, m_eps))
    basis = build_basis(params, lower, prec)
    rep = certify_basis_integrality(basis, m_eps)
    lines = [
        f"space {params}: m_epsilon = {m_eps}",
        f"checklist: {rep.details['checklist']}",
    ]
    for m, bound in rep.details["bounds"].items():
        lines.append(f"  F_{m}: integral through n <= {format_rational(bound)}")
    lines.append(rep.summary())
    if rep.passed:
        lines.append("certificate: " + rep.details["certificate"])
    _emit(args, rep.to_json(), "\n".join(lines))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _report_lines(reports: list[VerificationReport]) -> list[str]:
    lines = []
    for r in reports:
        case = r.details.get("case", {})
        tag = " ".join(f"{k}={case[k]}" for k in ("m", "t", "ell", "n", "d") if k in case)
        if "unverified" in r.details:
            lines.append(f"UNVERIFIED {r.check} {tag}: {r.details['unverified']}")
            continue
        extra = ""
        if "lhs" in r.details:
            extra = f" lhs={_plain(format_rational(r.details['lhs']))[:40]} rhs={_plain(format_rational(r.details['rhs']))[:40]}"
            if r.details.get("modulus"):
                extra += f" mod {r.details['modulus']}"
        lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.check} {tag}{extra}")
    return lines


def _status(reports: list[VerificationReport]) -> int:
    if any("unverified" in r.details for r in reports):
        return EXIT_UNVERIFIED
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_verify(args) -> int:
    which = Clause(args.which)
    if args.d is not None:
        cases = [IdentityCase(args.N, args.k, args.m, args.t, args.ell, args.n, args.d, which)]
        for c in cases:
            c.validate()
    else:
        cases = enumerate_cases(which, args.N, args.k, [args.m], [args.t], [args.ell], [args.n], args.d_window)
        if not cases:
            IdentityCase(args.N, args.k, args.m, args.t, args.ell, args.n, 0, which).validate()
            raise UsageError("no admissible d in the window")
    reports = run_cases(cases, window=args.d_window)
    _emit(args, [r.to_json() for r in reports], "\n".join(_report_lines(reports)))
    return _status(reports)


def cmd_sweep(args) -> int:
    clauses = [Clause(w) for w in args.which.split(",")]
    cases = []
    for clause in clauses:
        cases.extend(
            enumerate_cases(
                clause,
                args.N,
                args.k,
                _int_list(args.m),
                _int_list(args.t),
                _int_list(args.ell),
                _int_list(args.n),
                args.d_window,
            )
        )
    if not cases:
        raise UsageError("no admissible case in the requested ranges")
    reports = run_cases(cases, window=args.d_window)
    passed = sum(r.passed for r in reports)
    unverified = sum("unverified" in r.details for r in reports)
    summary = {
        "cases": len(reports),
        "passed": passed,
        "failed": len(reports) - passed - unverified,
        "unverified": unverified,
        "reports": [r.to_json() for r in reports],
    }
    lines = _report_lines(reports) if args.verbose else [l for l in _report_lines(reports) if not l.startswith("PASS")]
    lines.append(f"{passed}/{len(reports)} cases passed, {unverified} unverified")
    _emit(args, summary, "\n".join(lines))
    return _status(reports)


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plusforms", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, required=True, help="odd square-free level (the group is Gamma_0(4N))")
    common.add_argument("--k", type=int, required=True, help="odd weight numerator; the weight is k/2")
    common.add_argument("--output", choices=("json", "text"), default="text")
    common.add_argument("--out", help="write to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", parents=[common], help="reduced forms with principal exponent >= pole bound")
    p.add_argument("--pole-bound", type=int)
    p.add_argument("--prec", type=int, default=None)
    p.add_argument("--show-through", type=int, default=None, help="print coefficients through this exponent")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("form", parents=[common], help="one reduced form F_m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--prec", type=int, default=None)
    p.set_defaults(func=cmd_form)

    p = sub.add_parser("hecke", parents=[common], help="F_m | T(t^2)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--prec", type=int, default=None)
    p.set_defaults(func=cmd_hecke)

    p = sub.add_parser("coeff-table", parents=[common], help="table of B_t(m, d)")
    p.add_argument("--m", required=True, help="list such as -1,-4 or -8..-1")
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--d-max", type=int, default=20)
    p.set_defaults(func=cmd_coeff_table)

    p = sub.add_parser("certify", parents=[common], help="integrality certificate for all reduced forms")
    p.add_argument("--prec", type=int, default=None)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", parents=[common], help="check one identity or congruence")
    p.add_argument("--which", required=True, choices=[c.value for c in Clause])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=None, help="a single d (default: every admissible d in the window)")
    p.add_argument("--d-window", type=int, default=DEFAULT_WINDOW)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="verify every admissible case over parameter ranges")
    p.add_argument("--which", default="thm14i,thm14ii,thm14iii", help="comma-separated clauses")
    p.add_argument("--m", default="-1")
    p.add_argument("--t", default="1")
    p.add_argument("--ell", default="3,5")
    p.add_argument("--n", default="1,2")
    p.add_argument("--d-window", type=int, default=30)
    p.add_argument("--verbose", action="store_true", help="also list passing cases in text output")
    p.set_defaults(func=cmd_sweep)
    return parser


_LIST_FLAGS = ("--m", "--t", "--ell", "--n")


def _glue_negative_lists(argv: list[str]) -> list[str]:
    # argparse takes "-1,-4" for an option; glue such values onto their flag
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _LIST_FLAGS and i + 1 < len(argv) and argv[i + 1][:1] == "-" and argv[i + 1][1:2].isdigit():
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_negative_lists(list(sys.argv[1:] if argv is None else argv)))
    try:
        if getattr(args, "prec", "absent") is None:
            args.prec = _default_prec()
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HypothesisViolated, BadPrime, UnsupportedExponent, NonexistentForm) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisUnverified as exc:
        print(f"unverified: {exc}", file=sys.stderr)
        return EXIT_UNVERIFIED
    except PlusFormsError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
