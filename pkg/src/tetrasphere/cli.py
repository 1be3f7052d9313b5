"""Command line entry point.

    tetrasphere list-suites
    tetrasphere verify all --seed 7 --trials 100 --json report.json
    tetrasphere export tetrahedron:7 --scene scene.json

``verify`` exits 0 iff every unflagged check passes.
"""

from __future__ import annotations

import argparse
import sys
import time

from .report import VerificationReport
from .rng import MAX_SEED
from .scene import SceneError, build_scene
from .suites import SUITES, run_suite


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("trials must be at least 1")
    return v


def _tol(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("tolerance must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tetrasphere", description="Verify sphere and cone theorems numerically.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suites", nargs="+", metavar="suite", help="suite names or 'all'")
    v.add_argument("--seed", type=_u64, default=0)
    v.add_argument("--trials", type=_positive, default=100)
    v.add_argument("--tol", type=_tol, default=None, help="override every check's tolerance")
    v.add_argument("--json", metavar="PATH", help="write the report here ('-' for stdout)")
    v.add_argument("--quiet", action="store_true")

    e = sub.add_parser("export", help="write a scene for an instance")
    e.add_argument("descriptor", help="e.g. tetrahedron:7, grace:7, bicentric:7:6, triangle:7")
    e.add_argument("--scene", metavar="PATH", help="output path (default stdout)")

    sub.add_parser("list-suites", help="print the available suites")
    return ap


def _verify(args, ap) -> int:
    names = list(SUITES) if "all" in args.suites else args.suites
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        ap.error(f"unknown suite(s): {', '.join(unknown)}")
    reports = []
    for name in names:
        t0 = time.perf_counter()
        rep = run_suite(name, args.seed, args.trials, args.tol)
        dt = time.perf_counter() - t0
        reports.append(rep)
        if not args.quiet:
            s = rep.summary()
            mx = "-" if s["max_residual"] is None else f"{s['max_residual']:.2e}"
            status = "ok" if not s["failed"] else "FAIL"
            print(
                f"{name:20s} {status:4s} records={s['records']:<5d} failed={s['failed']:<3d} "
                f"flagged={s['flagged']:<3d} max={mx:9s} {dt:6.2f}s",
                file=sys.stderr,
            )
            for r in rep.failures[:5]:
                print(f"    {r.check_id} seed={r.instance_seed} residual={r.residual} tol={r.tol}", file=sys.stderr)
    report = VerificationReport(args.seed, args.trials, reports)
    if args.json == "-":
        sys.stdout.write(report.to_json())
    elif args.json:
        with open(args.json, "w") as fh:
            fh.write(report.to_json())
    return 0 if report.ok else 1


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "list-suites":
        for s in SUITES.values():
            tag = "" if s.primary else " (extra)"
            print(f"{s.name:20s} {s.about}{tag}")
        return 0
    if args.command == "export":
        try:
            text = build_scene(args.descriptor).to_json()
        except SceneError as exc:
            ap.error(str(exc))
        if args.scene:
            with open(args.scene, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    return _verify(args, ap)


if __name__ == "__main__":
    sys.exit(main())
