"""Command-line front end.

    hrunge <plan|approx|study|bidisk|selftest> --config FILE --out DIR
           [--pitch P] [--eps LIST] [--seed S] [--criterion N]

Writes report.csv, resolved.json and timings.json into DIR. Exit codes:
0 success, 1 invariant violation, 2 configuration error, 3 numerical fault.
Failures print one JSON object with the error category to stderr.
"""

import argparse
import json
import os
import sys
import time

from . import __version__
from .errors import ConfigError, HRungeError
from .runner import COMMANDS, _Clock, to_csv

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="hrunge", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=["plan", "approx", "study", "bidisk", "selftest"])
    p.add_argument("--config", help="scenario JSON (optional for selftest)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--pitch", help="override the quadrature pitch (decimal or fraction)")
    p.add_argument("--eps", help="override the tolerance list, comma separated")
    p.add_argument("--seed", type=int, help="override the random seed")
    p.add_argument("--criterion", type=int, action="append",
                   help="selftest: run this acceptance criterion (repeatable)")
    p.add_argument("--quiet", action="store_true", help="suppress progress output")
    p.add_argument("--version", action="version", version=f"hrunge {__version__}")
    return p


def _write(out, rows, resolved, timings):
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "report.csv"), "w", newline="") as fh:
        fh.write(to_csv(rows))
    with open(os.path.join(out, "resolved.json"), "w") as fh:
        json.dump(resolved, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out, "timings.json"), "w") as fh:
        json.dump(timings, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fail(exc, code):
    err = {"error": getattr(exc, "category", "internal"), "exit_code": code,
           "type": type(exc).__name__, "message": str(exc)}
    w = getattr(exc, "witness", None)
    if w is not None:
        err["witness"] = repr(w)
    print(json.dumps(err), file=sys.stderr)
    return code


def _selftest(args, say):
    from .acceptance import CRITERIA, QUICK
    from .selftest import run_suites
    if args.config:
        with open(args.config) as fh:
            try:
                json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from None
    seed = args.seed or 0
    chosen = args.criterion or []
    results = []
    if not chosen:
        for name, ok, detail in run_suites(seed):
            say(f"{'PASS' if ok else 'FAIL'} suite {name}: {detail}")
            results.append({"suite": name, "passed": ok, "detail": detail})
        chosen = list(QUICK)
    for n in chosen:
        if n not in CRITERIA:
            raise ConfigError(f"unknown criterion {n}")
        r = CRITERIA[n](seed=seed)
        say(r.line())
        results.append({"criterion": n, "title": r.title, "passed": r.passed,
                        "runtime": r.runtime, "checks": r.details["checks"]})
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "selftest.json"), "w") as fh:
            json.dump(results, fh, indent=2, default=float)
            fh.write("\n")
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_INVARIANT


def main(argv=None):
    args = _parser().parse_args(argv)
    say = (lambda *a: None) if args.quiet else (lambda *a: print(*a, flush=True))
    try:
        if args.command == "selftest":
            return _selftest(args, say)
        if not args.config or not args.out:
            raise ConfigError(f"'{args.command}' needs --config and --out")
        from .config import load_scenario
        eps = args.eps.split(",") if args.eps else None
        sc = load_scenario(args.config, pitch=args.pitch, eps=eps, seed=args.seed)
        clock = _Clock()
        t0 = time.perf_counter()
        rows = COMMANDS[args.command](sc, clock)
        clock.t["total"] = time.perf_counter() - t0
        _write(args.out, rows, sc.resolved, clock.t)
        say(f"{len(rows)} rows written to {os.path.join(args.out, 'report.csv')}")
        return EXIT_OK
    except HRungeError as exc:
        return _fail(exc, exc.exit_code)


if __name__ == "__main__":
    sys.exit(main())
