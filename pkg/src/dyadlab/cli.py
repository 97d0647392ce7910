"""Command-line front end: construct artifacts, run verification suites, and
tabulate exact partial sums.

Exit codes: 0 all asserted claims pass, 1 at least one claim failed, 2 usage
error, 3 a guard or budget skip left the requested coverage incomplete.
All sampling is seeded and every sampled point is recorded in the report, so
identical configurations produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from typing import Sequence

from . import dense_divergence as dd
from . import interior_gap as ig
from . import universal as uv
from .exactnum import (
    Dyadic,
    DyInterval,
    GuardExceeded,
    IntervalUnion,
    NotExact,
    set_span_guard,
)
from .lattice import GapBlockSeq
from .report import WitnessReport, write_reports

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_SKIP = 3


def _fmt_count(n: int) -> str:
    s = str(n)
    if len(s) <= 40:
        return s
    return f"{s[0]}.{s[1:4]}e+{len(s) - 1} ({len(s)} digits)"


def _parse_limit(text: str) -> uv.IndexJK:
    try:
        j_s, k_s = text.split(",")
        return uv.IndexJK(int(j_s), int(k_s))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad index {text!r}: {exc}")


def _parse_x(text: str) -> Dyadic:
    try:
        return Dyadic.parse(text)
    except (ValueError, NotExact) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _load_G(path: str | None, default: IntervalUnion) -> IntervalUnion:
    if path is None:
        return default
    with open(path) as fh:
        return IntervalUnion.from_json(json.load(fh))


def _sample_in(rng: random.Random, lo: Dyadic, hi: Dyadic, bits: int = 48) -> Dyadic:
    return lo + (hi - lo) * Dyadic(rng.getrandbits(bits), -bits)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dyadlab", description=__doc__)
    p.add_argument("--span-guard", type=int, default=None, help="mantissa bit budget override")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build an artifact and write it as JSON")
    csub = c.add_subparsers(dest="construction", required=True)
    cu = csub.add_parser("universal")
    cu.add_argument("--limit", type=_parse_limit, required=True, metavar="j,k")
    cu.add_argument("--out", required=True)
    c31 = csub.add_parser("thm31")
    c31.add_argument("--jmax", type=int, required=True)
    c31.add_argument("--G", default=None, help="open-set JSON; records the selected tent indices")
    c31.add_argument("--out", required=True)
    c33 = csub.add_parser("thm33")
    c33.add_argument("--jmax", type=int, required=True)
    c33.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    vsub = v.add_subparsers(dest="construction", required=True)
    vu = vsub.add_parser("universal")
    vu.add_argument("--suite", required=True, choices=["lemma", "gaps", "integrality", "covering", "escape", "series"])
    vu.add_argument("--limit", type=_parse_limit, default=uv.IndexJK(2, 15), metavar="j,k")
    vu.add_argument("--samples", type=int, default=10)
    vu.add_argument("--seed", type=int, default=0)
    vu.add_argument("--seq", default=None, help="artifact JSON to verify instead of an in-process build")
    vu.add_argument("--G", default=None, help="open-set JSON for the series suite")
    vu.add_argument("--report", default=None)
    v31 = vsub.add_parser("thm31")
    v31.add_argument("--suite", required=True, choices=["lower", "outside", "cross", "density", "tail"])
    v31.add_argument("--jmax", type=int, default=12)
    v31.add_argument("--samples", type=int, default=10)
    v31.add_argument("--seed", type=int, default=0)
    v31.add_argument("--report", default=None)
    v33 = vsub.add_parser("thm33")
    v33.add_argument("--suite", required=True, choices=["gaps", "diverge", "converge", "probe"])
    v33.add_argument("--jmax", type=int, default=6)
    v33.add_argument("--samples", type=int, default=10)
    v33.add_argument("--seed", type=int, default=0)
    v33.add_argument("--seq", default=None)
    v33.add_argument("--report", default=None)

    e = sub.add_parser("eval", help="tabulate exact partial sums as CSV")
    esub = e.add_subparsers(dest="construction", required=True)
    eu = esub.add_parser("universal")
    eu.add_argument("--limits", type=_parse_limit, nargs="+", required=True, metavar="j,k")
    eu.add_argument("--xs", type=_parse_x, nargs="*", default=[])
    eu.add_argument("--G", default=None)
    eu.add_argument("--out", default="-")
    e31 = esub.add_parser("thm31")
    e31.add_argument("--jmaxes", type=int, nargs="+", required=True)
    e31.add_argument("--xs", type=_parse_x, nargs="*", default=[])
    e31.add_argument("--G", default=None)
    e31.add_argument("--out", default="-")
    e33 = esub.add_parser("thm33")
    e33.add_argument("--jmaxes", type=int, nargs="+", required=True)
    e33.add_argument("--xs", type=_parse_x, nargs="*", default=[])
    e33.add_argument("--out", default="-")
    return p


# ----------------------------- construct ---------------------------------


def _cmd_construct(args) -> int:
    if args.construction == "universal":
        seq = uv.build_universal(args.limit)
        with open(args.out, "w") as fh:
            json.dump(seq.to_json_dict(), fh, sort_keys=True, separators=(",", ":"))
        print(
            f"universal through {args.limit}: {len(seq.blocks)} blocks, "
            f"last value {seq.last_value}, total points {_fmt_count(seq.total_count)}"
        )
    elif args.construction == "thm31":
        cons = dd.build_thm31(args.jmax)
        data = cons.to_json_dict()
        if args.G:
            data["selected_js"] = dd.selected_js(cons, _load_G(args.G, IntervalUnion()))
        with open(args.out, "w") as fh:
            json.dump(data, fh, sort_keys=True, separators=(",", ":"))
        npoints = sum(int(w.count) for _, _, w in cons.lambda_windows())
        print(f"thm31 through j={args.jmax}: {len(cons.items)} tents, lattice points {_fmt_count(npoints)}")
    else:
        cons = ig.build_thm33(args.jmax)
        with open(args.out, "w") as fh:
            json.dump(
                {"jmax": cons.jmax, "seq": cons.seq.to_json_dict(), "f": cons.f.to_json()},
                fh,
                sort_keys=True,
                separators=(",", ":"),
            )
        print(
            f"thm33 through decade {args.jmax}: {len(cons.seq.blocks)} blocks, "
            f"last value {cons.seq.last_value}, total points {_fmt_count(cons.seq.total_count)}"
        )
    return EXIT_PASS


# ------------------------------ verify -----------------------------------


def _suite_universal(args) -> tuple[list[WitnessReport], bool]:
    reports: list[WitnessReport] = []
    skipped = False
    limit: uv.IndexJK = args.limit
    rng = random.Random(args.seed)

    if args.suite == "lemma":
        for i in uv.indices_through(limit):
            reports.append(uv.check_lemma_useful(i))
        return reports, skipped

    seq = uv.build_universal(limit)
    if args.seq:
        with open(args.seq) as fh:
            loaded = GapBlockSeq.from_json_dict(json.load(fh))
    else:
        loaded = seq

    if args.suite == "gaps":
        reports.append(loaded.check_monotone_gaps())
        same = loaded.origin == seq.origin and loaded.blocks == seq.blocks
        reports.append(
            WitnessReport(
                claim="artifact-matches-construction",
                params={"limit": str(limit), "blocks": len(loaded.blocks)},
                lhs=str(loaded.last_value),
                rhs=str(seq.last_value),
                passed=same,
            )
        )
    elif args.suite == "integrality":
        reports.append(uv.check_integrality(loaded, limit))
    elif args.suite == "covering":
        for i in uv.indices_through(limit):
            if i == limit:
                break  # the prefix only carries full steps strictly below the limit
            sc = uv.step_constants(i)
            ok = 0
            for s in range(args.samples):
                x = _sample_in(rng, sc.aI, sc.bI)
                try:
                    w = uv.covering_witness(x, i, loaded)
                    ok += 1
                except (uv.Violation, IndexError) as exc:
                    reports.append(
                        WitnessReport(
                            claim=f"covering/{i.j},{i.k}/sample{s}",
                            params={"x": str(x), "error": str(exc)},
                            passed=False,
                        )
                    )
            reports.append(
                WitnessReport(
                    claim=f"covering/{i.j},{i.k}",
                    params={"samples": args.samples, "seed": args.seed},
                    lhs=str(ok),
                    rhs=str(args.samples),
                    passed=ok == args.samples,
                )
            )
    elif args.suite == "escape":
        partial, tail = uv.borel_cantelli_partial(max(limit.j, 2))
        reports.append(
            WitnessReport(
                claim="borel-cantelli-partial",
                params={"jmax": max(limit.j, 2)},
                lhs=str(partial),
                rhs=str(partial + tail),
                passed=partial + tail < Dyadic(2),
            )
        )
        for i in uv.indices_through(limit):
            if i == limit:
                break
            try:
                _, rep = uv.escape_measure_bruteforce(i, loaded)
                reports.append(rep)
            except uv.BudgetExceeded as exc:
                skipped = True
                reports.append(
                    WitnessReport(
                        claim=f"escape-measure/{i.j},{i.k}",
                        params={"skipped": True, "reason": str(exc)},
                        passed=True,
                    )
                )
    elif args.suite == "series":
        G = _load_G(args.G, IntervalUnion([DyInterval.open(0, 2)]))
        uG = uv.build_uG(G, limit)
        prefixes = []
        i = uv.IndexJK(1, 1)
        while True:
            prefixes.append(uv.build_universal(i))
            if i == limit:
                break
            i = i.successor()
        for jk, _ in uG:
            sc = uv.step_constants(jk)
            for s in range(args.samples):
                x = _sample_in(rng, sc.aI, sc.bI)
                counts = [uv.fG_partial_sum(x, uG, p) for p in prefixes]
                nondecreasing = all(a <= b for a, b in zip(counts, counts[1:]))
                hit = counts[-1] >= 1
                reports.append(
                    WitnessReport(
                        claim=f"series/{jk.j},{jk.k}/sample{s}",
                        params={"x": str(x), "counts": [str(c) for c in counts]},
                        lhs=str(counts[-1]),
                        rhs=">=1, nondecreasing",
                        passed=nondecreasing and hit,
                    )
                )
    else:
        raise AssertionError(args.suite)
    return reports, skipped


def _suite_thm31(args) -> tuple[list[WitnessReport], bool]:
    cons = dd.build_thm31(args.jmax)
    rng = random.Random(args.seed)
    reports: list[WitnessReport] = []

    if args.suite == "lower":
        for it in cons.items:
            for _ in range(args.samples):
                x = _sample_in(rng, it.interval.lo, it.interval.hi)
                reports.append(dd.lower_bound_check(cons, it.j, x))
    elif args.suite == "outside":
        for it in cons.items:
            jd = Dyadic(it.j)
            if it.tripled.lo <= -jd and it.tripled.hi >= jd:
                reports.append(
                    WitnessReport(
                        claim=f"thm31-outside/{it.j}",
                        params={"j": it.j, "note": "domain empty: tripled interval covers [-j, j]"},
                        passed=True,
                    )
                )
                continue
            done = 0
            attempts = 0
            while done < args.samples and attempts < args.samples * 200:
                attempts += 1
                x = _sample_in(rng, -jd, jd)
                if it.tripled.contains(x):
                    continue
                reports.append(dd.outside_zero_check(cons, it.j, x))
                done += 1
    elif args.suite == "cross":
        for j0 in range(dd.LAMBDA2_MIN_J, cons.jmax + 1):
            for j in range(1, cons.jmax + 1):
                if j != j0:
                    reports.append(dd.cross_term_zero_check(cons, j0, j, Dyadic(0)))
        reports.append(dd.cross_term_zero_check(cons, 1, 2, Dyadic(0)))  # informational
    elif args.suite == "density":
        for j in range(dd.LAMBDA2_MIN_J, cons.jmax + 1):
            reports.append(dd.density_window_check(cons, j))
        reports.append(dd.find_gap_increase(cons))
        for j in range(dd.LAMBDA2_MIN_J, cons.jmax + 1):
            for _ in range(max(1, args.samples // 2)):
                x = _sample_in(rng, Dyadic(-j), Dyadic(j))
                reports.append(dd.lambda2_hit_count(cons, j, x))
    elif args.suite == "tail":
        for _ in range(args.samples):
            x = _sample_in(rng, Dyadic(-cons.jmax), Dyadic(cons.jmax))
            reports.append(dd.lambda2_total_check(cons, x))
    else:
        raise AssertionError(args.suite)
    return reports, False


def _suite_thm33(args) -> tuple[list[WitnessReport], bool]:
    cons = ig.build_thm33(args.jmax)
    rng = random.Random(args.seed)
    reports: list[WitnessReport] = []

    if args.suite == "gaps":
        seq = cons.seq
        if args.seq:
            with open(args.seq) as fh:
                data = json.load(fh)
            loaded = GapBlockSeq.from_json_dict(data["seq"] if "seq" in data else data)
        else:
            loaded = seq
        reports.append(loaded.check_monotone_gaps())
        same = loaded.origin == seq.origin and loaded.blocks == seq.blocks
        reports.append(
            WitnessReport(
                claim="artifact-matches-construction",
                params={"jmax": args.jmax, "blocks": len(loaded.blocks)},
                lhs=str(loaded.last_value),
                rhs=str(seq.last_value),
                passed=same,
            )
        )
    elif args.suite == "diverge":
        for xs in ("0", "1*2^-1", "1"):
            x = Dyadic.parse(xs)
            prev = None
            vals = []
            for m in range(1, cons.jmax + 1):
                s = ig.divergence_partial(cons, x, m)
                vals.append(str(s))
                ok = prev is None or s > prev
                prev = s
            reports.append(
                WitnessReport(
                    claim=f"thm33-diverge/x={xs}",
                    params={"partials": vals},
                    lhs=vals[0],
                    rhs=vals[-1],
                    passed=all(
                        Dyadic.parse(a) < Dyadic.parse(b) for a, b in zip(vals, vals[1:])
                    ),
                )
            )
        for s in range(args.samples):
            x = Dyadic(rng.getrandbits(40), -40)
            v1 = ig.divergence_partial(cons, x, cons.jmax - 1) if cons.jmax > 1 else None
            v2 = ig.divergence_partial(cons, x, cons.jmax)
            reports.append(
                WitnessReport(
                    claim=f"thm33-diverge/sample{s}",
                    params={"x": str(x)},
                    lhs=str(v1) if v1 is not None else "",
                    rhs=str(v2),
                    passed=v1 is None or v2 > v1,
                )
            )
    elif args.suite == "converge":
        for s in range(args.samples):
            x = Dyadic(4) + Dyadic(rng.getrandbits(40), -40)
            rep = ig.convergence_tail_check(cons, x)
            reports.append(
                WitnessReport(
                    claim=f"thm33-converge/sample{s}",
                    params=rep.params,
                    lhs=rep.lhs,
                    rhs=rep.rhs,
                    passed=rep.passed,
                )
            )
    elif args.suite == "probe":
        reports.append(ig.thm34_probe(cons, Dyadic.parse("4.5"), args.samples, args.seed))
    else:
        raise AssertionError(args.suite)
    return reports, False


def _cmd_verify(args) -> int:
    if args.construction == "universal":
        reports, skipped = _suite_universal(args)
    elif args.construction == "thm31":
        reports, skipped = _suite_thm31(args)
    else:
        reports, skipped = _suite_thm33(args)

    failures = [r for r in reports if not r.passed and not r.is_informational()]
    for r in sorted(reports, key=lambda r: r.claim):
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.claim} lhs={r.lhs} rhs={r.rhs}")
    print(f"{len(reports)} claims, {len(failures)} failures")
    if args.report:
        write_reports(args.report, reports)
    if failures:
        return EXIT_FAIL
    if skipped:
        return EXIT_SKIP
    return EXIT_PASS


# ------------------------------- eval ------------------------------------


def _csv_out(path: str):
    if path == "-":
        return sys.stdout
    return open(path, "w", newline="")


def _cmd_eval(args) -> int:
    rows = []
    if args.construction == "universal":
        G = _load_G(args.G, IntervalUnion([DyInterval.open(-1000, 1000)]))
        for limit in args.limits:
            uG = uv.build_uG(G, limit)
            seq = uv.build_universal(limit)
            for x in args.xs:
                try:
                    s = Dyadic(uv.fG_partial_sum(x, uG, seq))
                    rows.append((x, str(limit), s, ""))
                except (GuardExceeded, NotExact) as exc:
                    rows.append((x, str(limit), None, str(exc)))
    elif args.construction == "thm31":
        G = _load_G(args.G, IntervalUnion([DyInterval.open(-1000, 1000)]))
        for jmax in args.jmaxes:
            cons = dd.build_thm31(jmax)
            for x in args.xs:
                try:
                    s = dd.fG_sum_partial_31(cons, x, G, include_lambda1=True, include_lambda2=True)
                    rows.append((x, str(jmax), s, ""))
                except (GuardExceeded, NotExact) as exc:
                    rows.append((x, str(jmax), None, str(exc)))
    else:
        for jmax in args.jmaxes:
            cons = ig.build_thm33(jmax)
            for x in args.xs:
                try:
                    s = ig.divergence_partial(cons, x)
                    rows.append((x, str(jmax), s, ""))
                except (GuardExceeded, NotExact, uv.OutOfInterval) as exc:
                    rows.append((x, str(jmax), None, str(exc)))

    fh = _csv_out(args.out)
    try:
        w = csv.writer(fh)
        w.writerow(["x", "limit", "sum_dyadic", "sum_decimal", "error"])
        for x, limit, s, err in rows:
            if s is None:
                w.writerow([str(x), limit, "", "", err])
            else:
                w.writerow([str(x), limit, str(s), s.to_decimal() or "", ""])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_PASS


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    if args.span_guard is not None:
        set_span_guard(args.span_guard)
    try:
        if args.command == "construct":
            return _cmd_construct(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_eval(args)
    except (uv.Violation,) as exc:
        print(f"claim violation: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (GuardExceeded, uv.BudgetExceeded) as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_SKIP
    except (NotExact, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
