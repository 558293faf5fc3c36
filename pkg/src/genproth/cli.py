"""Command-line interface.

Exit status: 0 prime (or a valid certificate), 1 composite (or an invalid
certificate), 2 probable prime / inconclusive, 64 usage error, 69 resource
limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import bench, census
from .errors import FormError, ResourceError
from .forms import ProthForm, parse_form
from .oracle import build_sieve
from .primality import (
    DEFAULT_BASES,
    DEFAULT_MAX_TRIES,
    Certificate,
    Outcome,
    Verdict,
    certify,
    complete_strong,
    generalized_proth,
    p_miller_rabin,
    pocklington,
    proth_classic,
    verify_certificate,
)

EXIT_CODES = {
    Outcome.PRIME: 0,
    Outcome.COMPOSITE: 1,
    Outcome.PROBABLE_PRIME: 2,
    Outcome.INCONCLUSIVE: 2,
}
EXIT_USAGE = 64
EXIT_RESOURCE = 69
SEARCH_SIEVE_LIMIT = 10**7


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which would read as "probable prime"
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("list is empty")
    return values


def _form_from_args(args) -> ProthForm:
    explicit = (args.K, args.p, args.n)
    if args.form is not None:
        if any(v is not None for v in explicit):
            raise UsageError("give either FORM or --K/--p/--n, not both")
        return parse_form(args.form)
    if any(v is None for v in explicit):
        raise UsageError("a form is required: FORM or all of --K, --p, --n")
    return ProthForm(args.K, args.p, args.n)


def _add_form_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("form", nargs="?", help='form as "K*p^n+1"')
    p.add_argument("--K", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--n", type=int)


def _emit(record: dict, out) -> None:
    out.write(json.dumps(record) + "\n")


def cmd_test(args, out) -> int:
    form = _form_from_args(args)
    method = args.method or ("gproth" if form.generalized else "pmr")
    a = args.base
    if method == "proth":
        verdict = proth_classic(form, a)
    elif method == "gproth":
        verdict = generalized_proth(form, a)
    elif method == "pocklington":
        verdict = pocklington(form, a)
    elif method == "pmr":
        verdict = p_miller_rabin(form.N, form.p, a)
    else:
        verdict = complete_strong(form.N, a)
    _emit({"form": str(form), "method": method, **verdict.as_dict()}, out)
    return EXIT_CODES[verdict.outcome]


def cmd_certify(args, out) -> int:
    form = _form_from_args(args)
    if args.algorithm == 2 and not form.generalized:
        raise UsageError(f"algorithm 2 needs K < p^n; {form} does not satisfy it")
    if args.base is None:
        bases = DEFAULT_BASES
    else:
        bases = (args.base,) + tuple(b for b in DEFAULT_BASES if b != args.base)
    verdict = certify(form, bases, algorithm=args.algorithm, max_tries=args.max_tries)
    _emit({"form": str(form), **verdict.as_dict()}, out)
    if verdict.certificate is not None and args.out:
        with open(args.out, "w") as fh:
            fh.write(verdict.certificate.to_text())
    if verdict.outcome is Outcome.PROBABLE_PRIME:
        bases_text = ", ".join(map(str, verdict.tried))
        print(f"retry cap reached; bases tried: {bases_text}", file=sys.stderr)
    return EXIT_CODES[verdict.outcome]


def _read_certificate(text: str) -> Certificate:
    text = text.strip()
    if text.startswith("{"):
        record = json.loads(text.splitlines()[0])
        data = record.get("certificate", record)
        if data is None:
            raise UsageError("verdict record carries no certificate")
        return Certificate.from_mapping(data)
    return Certificate.from_text(text)


def cmd_verify(args, out) -> int:
    if args.path in (None, "-"):
        text = sys.stdin.read()
    else:
        with open(args.path) as fh:
            text = fh.read()
    try:
        cert = _read_certificate(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"unreadable certificate: {exc}")
    ok = verify_certificate(cert)
    _emit({"valid": ok, "N": str(cert.N), "method": cert.method}, out)
    return 0 if ok else 1


def cmd_census(args, out) -> int:
    kind = {"complete": census.COMPLETE_STRONG, "pstrong": census.P_STRONG}[args.kind]
    records = census.enumerate_pseudoprimes(kind, args.bases, args.limit,
                                            p=args.p if kind == census.P_STRONG else None,
                                            workers=args.workers)
    target = open(args.out, "w") if args.out else out
    try:
        for rec in records:
            target.write(rec.to_json() + "\n")
    finally:
        if args.out:
            target.close()
    return 0


def cmd_search(args, out) -> int:
    ProthForm(args.K, args.p, 1)  # reject gcd(K, p) != 1 and composite p up front
    n_hi = args.n_to
    limit = min(SEARCH_SIEVE_LIMIT, args.K * args.p**max(n_hi, 1) + 2)
    sieve = build_sieve(limit, check_samples=0) if n_hi >= args.n_from else None
    hits = census.search_family(args.K, args.p, args.n_from, n_hi, args.base, sieve=sieve)
    primes = []
    for hit in hits:
        _emit(hit.as_dict(), out)
        if hit.verdict is not None and hit.verdict.is_prime:
            primes.append(hit.n)
    _emit({"summary": {"K": args.K, "p": args.p, "n_from": args.n_from, "n_to": n_hi,
                       "tested": len(hits), "primes": len(primes), "prime_n": primes}}, out)
    return 0


def cmd_bench(args, out) -> int:
    modes = bench.MODES if args.mode == "both" else (args.mode,)
    reports = []
    for n in args.n_list:
        form = ProthForm(args.K, args.p, n)
        for mode in modes:
            reports.append(bench.count_certify(form, args.base, mode, args.inversion_cost,
                                               digit_cap=args.digit_cap))
    for r in reports:
        _emit(json.loads(r.to_json()), out)
    if args.table:
        print(bench.format_table(reports), file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="genproth", description="Primality tools for N = K*p^n + 1")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", help="run one primality test")
    _add_form_args(p)
    p.add_argument("--method", choices=("proth", "gproth", "pocklington", "pmr", "complete"))
    p.add_argument("--base", type=int, default=2)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("certify", help="certify primality, retrying bases")
    _add_form_args(p)
    p.add_argument("--base", type=int)
    p.add_argument("--algorithm", type=int, choices=(1, 2))
    p.add_argument("--max-tries", type=int, default=DEFAULT_MAX_TRIES)
    p.add_argument("--out", help="write the certificate here on success")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="re-check a certificate file or verdict record")
    p.add_argument("path", nargs="?", help="certificate file; stdin when omitted or '-'")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("census", help="enumerate pseudoprimes")
    p.add_argument("--kind", choices=("pstrong", "complete"), default="pstrong")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--bases", type=_int_list, default=[2])
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("search", help="certify K*p^n+1 over a range of n")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n-from", type=int, required=True)
    p.add_argument("--n-to", type=int, required=True)
    p.add_argument("--base", type=int, default=2)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bench", help="count modular operations of the certifier")
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--mode", choices=("binary", "scheduled", "both"), default="both")
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--inversion-cost", type=float, default=bench.DEFAULT_INVERSION_COST)
    p.add_argument("--digit-cap", type=int, default=bench.DEFAULT_DIGIT_CAP)
    p.add_argument("--table", action="store_true", help="also print an aligned table to stderr")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, FormError, ValueError) as exc:
        print(f"genproth: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"genproth: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
