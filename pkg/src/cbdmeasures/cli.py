"""Command-line interface: ``cbd measure|check|cyclic|random|verify``.

Exit codes: 0 success (``check``: contextual), 1 ``check`` found the system
noncontextual or ``verify`` failed, 2 usage or parse error, 3 system too
large, 4 NCNT2 requested for a contextual system.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import fileio
from . import measures as ms
from .cyclic import CyclicSpec, make_cyclic
from .errors import CbdError, ParseError, SystemIsContextual, SystemTooLarge
from .oracle import named_formats, named_systems, random_noncontextual_system, random_system, verify_suite

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_TOO_LARGE, EXIT_CONTEXTUAL = 0, 1, 2, 3, 4


def _load_system(ref, mode):
    builtin = named_systems()
    if ref in builtin and not os.path.exists(ref):
        system = builtin[ref]
        return system if mode == "rational" else system.to_float()
    return fileio.parse_system_file(ref, mode)


def _load_format(ref):
    formats = named_formats()
    if ref in formats and not os.path.exists(ref):
        return formats[ref]
    return fileio.parse_system_file(ref).format


def _numbers(text):
    return tuple(v for v in (t.strip() for t in text.split(",")) if v)


def _cmd_measure(args, out):
    system = _load_system(args.system, args.mode)
    names = _numbers(args.measures)
    unknown = [n for n in names if n not in ms.MEASURES]
    if unknown:
        raise ParseError(f"unknown measure(s): {', '.join(unknown)}", key="--measures")
    for name in names:
        report = ms.measure(system, name, args.mode)
        flag = "contextual" if report.contextual else "noncontextual"
        print(f"{name} {fileio.format_value(report.value)} {flag}", file=out)
    return EXIT_OK


def _cmd_check(args, out):
    system = _load_system(args.system, args.mode)
    contextual = ms.is_contextual(system, args.mode)
    print("contextual" if contextual else "noncontextual", file=out)
    return EXIT_OK if contextual else EXIT_FALSE


def _cmd_cyclic(args, out):
    spec = CyclicSpec(args.n, _numbers(args.correlations), _numbers(args.marginals))
    _emit(make_cyclic(spec), args.output, out)
    return EXIT_OK


def _cmd_random(args, out):
    fmt = _load_format(args.format)
    if args.noncontextual:
        system = random_noncontextual_system(fmt, args.seed)
    else:
        system = random_system(fmt, args.seed)
    _emit(system, args.output, out)
    return EXIT_OK


def _cmd_verify(args, out):
    log = (lambda line: print(line, file=out)) if args.verbose else None
    reports = verify_suite(args.suite, log=log)
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        extra = f" max_discrepancy={rep.max_discrepancy:.3g}" if rep.check == "crosscheck_modes" else ""
        print(f"{status} {rep.check} systems={rep.systems}{extra}", file=out)
        for label in rep.details.get("failures", ()):
            print(f"  failed: {label}", file=out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FALSE


def _emit(system, path, out):
    if path:
        fileio.write_system_file(system, path)
    else:
        out.write(fileio.emit_system(system))


def build_parser():
    parser = argparse.ArgumentParser(prog="cbd", description="Contextuality measures for "
                                     "systems of dichotomous random variables.")
    sub = parser.add_subparsers(dest="command", required=True)

    systems = ", ".join(sorted(named_systems()))
    p = sub.add_parser("measure", help="compute measures of a system")
    p.add_argument("--system", required=True, help=f"system file or built-in name ({systems})")
    p.add_argument("--measures", default=",".join(ms.MEASURES[:4]),
                   help="comma-separated subset of " + ",".join(ms.MEASURES))
    p.add_argument("--mode", choices=("rational", "float"), default="rational")
    p.set_defaults(run=_cmd_measure)

    p = sub.add_parser("check", help="decide contextuality")
    p.add_argument("--system", required=True, help=f"system file or built-in name ({systems})")
    p.add_argument("--mode", choices=("rational", "float"), default="rational")
    p.set_defaults(run=_cmd_check)

    p = sub.add_parser("cyclic", help="emit a cyclic system from +-1 expectations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--correlations", required=True, help="n comma-separated values")
    p.add_argument("--marginals", required=True,
                   help="one value for all, or 2n values: per content, own then preceding context")
    p.add_argument("--output")
    p.set_defaults(run=_cmd_cyclic)

    formats = ", ".join(named_formats())
    p = sub.add_parser("random", help="emit a seeded random system")
    p.add_argument("--format", required=True, help=f"system file or named format ({formats})")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--noncontextual", action="store_true",
                   help="draw from a noncontextual-by-construction family")
    p.add_argument("--output")
    p.set_defaults(run=_cmd_random)

    p = sub.add_parser("verify", help="run the oracle cross-checks")
    p.add_argument("--suite", choices=("small", "acceptance"), default="small")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(run=_cmd_verify)
    return parser


def run_cli(argv=None, out=None, err=None):
    """Run one command; returns the exit code instead of exiting."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.run(args, out)
    except SystemTooLarge as exc:
        print(f"error: {exc}", file=err)
        return EXIT_TOO_LARGE
    except SystemIsContextual as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONTEXTUAL
    except (CbdError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
