"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 verification failure.  JSON goes to
stdout, diagnostics to stderr.  Exact numbers are ``"num/den"`` strings;
floating values are always wrapped as ``{"float": x}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction

from .config import Settings, load_settings
from .distribution import OrderKParams, cdf, pmf, pmf_poly_recurrence, pmf_poly_sum
from .harness import run_verification
from .moments import Method, MomentKind, moment
from .polynomial import LambdaPolynomial, format_rational, parse_rational

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2

log = logging.getLogger("poisson_k")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rate(text: str) -> Fraction:
    try:
        lam = parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if lam < 0:
        raise argparse.ArgumentTypeError(f"lambda must be >= 0, got {text}")
    return lam


def _nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _order(text: str) -> int:
    value = _nonneg(text)
    if value < 1:
        raise argparse.ArgumentTypeError("order k must be >= 1")
    return value


def boxed(x: float) -> dict:
    return {"float": float(x)}


def record(command: str, params: dict, payload) -> dict:
    return {"command": command, "params": params, "payload": payload}


def _params_json(k: int, lam: Fraction | None) -> dict:
    return {"k": k, "lambda": None if lam is None else format_rational(lam)}


def _add_kind(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    for kind in MomentKind:
        g.add_argument(f"--{kind.value}", dest="kind", action="store_const", const=kind)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="poisson-k", description="Poisson distribution of order k: exact PMF and moments.")
    parser.add_argument("--config", help="JSON settings file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pmf", help="probability mass at n")
    p.add_argument("-n", type=_nonneg, required=True)
    p.add_argument("-k", type=_order, required=True)
    p.add_argument("--lambda", dest="lam", type=_rate)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mode", action="store_const", const="exact")
    mode.add_argument("--float", dest="mode", action="store_const", const="float")
    p.add_argument("--method", choices=["recurrence", "sum"], default="recurrence")

    p = sub.add_parser("cdf", help="P(X <= n)")
    p.add_argument("-n", type=_nonneg, required=True)
    p.add_argument("-k", type=_order, required=True)
    p.add_argument("--lambda", dest="lam", type=_rate, required=True)

    p = sub.add_parser("moment", help="one moment polynomial or value")
    _add_kind(p)
    p.add_argument("-n", type=_nonneg, required=True)
    p.add_argument("-k", type=_order, required=True)
    p.add_argument("--lambda", dest="lam", type=_rate)
    p.add_argument("--method", choices=[m.value for m in Method] + ["all"], default="recurrence")

    p = sub.add_parser("table", help="moments 0..n-max")
    _add_kind(p)
    p.add_argument("-k", type=_order, required=True)
    p.add_argument("--n-max", type=_nonneg, required=True)
    p.add_argument("--format", choices=["json", "csv", "latex"], default="json")

    p = sub.add_parser("verify", help="run the cross-verification suite")
    p.add_argument("--k-max", type=_order, default=4)
    p.add_argument("--n-max", type=_nonneg, default=8)
    p.add_argument("--lambda", dest="lambdas", type=_rate, nargs="+", default=[Fraction(1)])
    p.add_argument("--mc-count", type=_nonneg, default=0)
    p.add_argument("--seed", type=_nonneg)
    return parser


# --- commands --------------------------------------------------------------


def cmd_pmf(args, settings: Settings) -> tuple[int, dict]:
    mode = args.mode or ("float" if args.lam is not None else "exact")
    params = _params_json(args.k, args.lam)
    if mode == "float":
        if args.lam is None:
            raise UsageError("--float needs --lambda")
        value = pmf(args.n, OrderKParams(args.k, args.lam))
        return EXIT_OK, record("pmf", params, {"probability": boxed(value)})
    fn = pmf_poly_recurrence if args.method == "recurrence" else pmf_poly_sum
    q = fn(args.n, args.k).q
    payload = {"coefficients": q.to_json(), "factor": f"exp(-{args.k}*lambda)"}
    if args.lam is not None:
        payload["q_value"] = format_rational(q(args.lam))
    return EXIT_OK, record("pmf", params, payload)


def cmd_cdf(args, settings: Settings) -> tuple[int, dict]:
    value = cdf(args.n, OrderKParams(args.k, args.lam))
    return EXIT_OK, record("cdf", _params_json(args.k, args.lam), {"probability": boxed(value)})


def _moment_payload(result, lam: Fraction | None) -> dict:
    out = result.to_json()
    if lam is not None:
        value = result.poly(lam)
        out["value"] = format_rational(value)
        out["value_float"] = boxed(float(value))
    return out


def cmd_moment(args, settings: Settings) -> tuple[int, dict]:
    params = _params_json(args.k, args.lam)
    if args.method != "all":
        result = moment(args.kind, args.n, args.k, Method(args.method))
        return EXIT_OK, record("moment", params, _moment_payload(result, args.lam))
    results = [moment(args.kind, args.n, args.k, m) for m in Method]
    agree = all(r.poly == results[0].poly for r in results)
    payload = {"results": [_moment_payload(r, args.lam) for r in results], "agreement": agree}
    if not agree:
        log.error("methods disagree for %s moment n=%d k=%d", args.kind.value, args.n, args.k)
    return (EXIT_OK if agree else EXIT_VERIFY), record("moment", params, payload)


_LATEX_NAMES = {
    MomentKind.RAW: "M_{{{n}}}",
    MomentKind.FACTORIAL: "M_{{({n})}}",
    MomentKind.CENTRAL: "\\tilde{{M}}_{{{n}}}",
}


def latex_poly(poly: LambdaPolynomial) -> str:
    """Highest power first, unit coefficients omitted: ``\\lambda^{4} + 6\\lambda^{3} + ...``."""
    if poly.is_zero():
        return "0"
    parts = []
    for i in range(poly.degree, -1, -1):
        c = poly.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if a.denominator == 1:
            num = str(a.numerator)
        else:
            num = f"\\tfrac{{{a.numerator}}}{{{a.denominator}}}"
        power = "" if i == 0 else ("\\lambda" if i == 1 else f"\\lambda^{{{i}}}")
        body = power if (a == 1 and power) else num + power
        parts.append((sign, body))
    first_sign, first = parts[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def render_table(kind: MomentKind, k: int, rows: list[LambdaPolynomial], fmt: str) -> str:
    if fmt == "csv":
        width = max(len(p.coeffs) for p in rows)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n"] + [f"c{i}" for i in range(width)])
        for n, p in enumerate(rows):
            w.writerow([n] + [format_rational(p.coeff(i)) for i in range(width)])
        return buf.getvalue()
    if fmt == "latex":
        name = _LATEX_NAMES[kind]
        if kind is MomentKind.CENTRAL and k == 1:
            name = "\\mu_{{{n}}}"
        lines = ["\\begin{align}"]
        for n, p in enumerate(rows):
            end = " \\\\" if n < len(rows) - 1 else ""
            lines.append(f"{name.format(n=n)} &= {latex_poly(p)}{end}")
        lines.append("\\end{align}")
        return "\n".join(lines) + "\n"
    raise UsageError(f"unknown format {fmt!r}")


def cmd_table(args, settings: Settings):
    if args.n_max > settings.table_cap:
        raise UsageError(f"--n-max {args.n_max} exceeds the table cap {settings.table_cap}")
    rows = [moment(args.kind, n, args.k).poly for n in range(args.n_max + 1)]
    if args.format == "json":
        payload = {
            "kind": args.kind.value,
            "rows": [{"n": n, "coefficients": p.to_json()} for n, p in enumerate(rows)],
        }
        return EXIT_OK, record("table", _params_json(args.k, None), payload)
    return EXIT_OK, render_table(args.kind, args.k, rows, args.format)


def cmd_verify(args, settings: Settings):
    seed = settings.seed if args.seed is None else args.seed
    reports = run_verification(args.k_max, args.n_max, args.lambdas, args.mc_count, seed, settings)
    failed = [r for r in reports if not r.passed]
    for r in failed:
        log.error("FAILED %s: exact=%r oracle=%r rel_error=%r", r.quantity, r.exact_value, r.oracle_value, r.rel_error)
    payload = {
        "passed": len(reports) - len(failed),
        "failed": len(failed),
        "monte_carlo": "skipped" if args.mc_count == 0 else {"count": args.mc_count, "seed": seed},
        "rng_algorithm": settings.rng_algorithm,
        "reports": [_json_report(r) for r in reports],
    }
    params = {"k_max": args.k_max, "n_max": args.n_max, "lambda": [format_rational(x) for x in args.lambdas]}
    return (EXIT_VERIFY if failed else EXIT_OK), record("verify", params, payload)


def _json_report(r) -> dict:
    out = r.to_json()
    for key in ("exact_value", "oracle_value", "abs_error", "rel_error", "tolerance"):
        v = out[key]
        out[key] = boxed(v) if v == v and v not in (float("inf"), float("-inf")) else {"float": str(v)}
    return out


COMMANDS = {
    "pmf": cmd_pmf,
    "cdf": cmd_cdf,
    "moment": cmd_moment,
    "table": cmd_table,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        settings = load_settings(args.config)
        code, out = COMMANDS[args.command](args, settings)
    except (UsageError, ValueError, OSError) as exc:
        print(f"poisson-k: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(out, str):
        sys.stdout.write(out)
    else:
        json.dump(out, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
