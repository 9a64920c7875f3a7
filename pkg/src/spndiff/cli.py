"""Command-line entry point wiring all modules.

Subcommands: ddt | scan | trails | verify | report. Machine output goes to
stdout, diagnostics to stderr. Exit codes: 0 success, 1 validation error,
2 usage error. Hex values are uppercase, 4 digits: 0x-prefixed in JSON,
plain in CSV.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .bundled import bundled_names, resolve_description
from .cipher import DescriptionError, zero_key
from .reports import build_report, hexw
from .sbox import compute_ddt, diff_uniformity_report
from .scan import scan_max, top_characteristics
from .trails import best_trail, min_active_sboxes, optimal_trails
from .verify import parse_difference, verify_exhaustive, verify_keyed


def _emit(text: str) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=2)


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


# ---------------------------------------------------------------------------
# ddt


def _cmd_ddt(args) -> int:
    _, desc = resolve_description(args.desc)
    if args.sbox == "all":
        rows = diff_uniformity_report(list(desc.sboxes))
        if args.out == "json":
            _emit(
                _json(
                    [
                        {
                            "sbox": r.id,
                            "uniformity": r.uniformity,
                            "maxEntries": r.max_entries,
                            "bijective": r.bijective,
                        }
                        for r in rows
                    ]
                )
            )
        elif args.out == "csv":
            lines = ["sbox,uniformity,max_entries,bijective"]
            lines += [
                f"{r.id},{r.uniformity},{r.max_entries},{str(r.bijective).lower()}"
                for r in rows
            ]
            _emit("\n".join(lines))
        else:
            _emit(f"{'id':<8}{'uniformity':>11}{'#max':>6}  bijective")
            for r in rows:
                _emit(
                    f"{r.id:<8}{r.uniformity:>11}{r.max_entries:>6}  "
                    f"{'yes' if r.bijective else 'no'}"
                )
        return 0

    try:
        sbox = desc.sbox(args.sbox)
    except KeyError:
        raise DescriptionError(f"s-box {args.sbox!r} is not declared")
    ddt = compute_ddt(sbox)
    if args.out == "json":
        _emit(
            _json(
                {
                    "sbox": sbox.id,
                    "counts": [list(row) for row in ddt.counts],
                    "uniformity": ddt.uniformity,
                }
            )
        )
    elif args.out == "csv":
        lines = ["a,b,count"]
        lines += [
            f"{a:X},{b:X},{ddt.counts[a][b]}" for a in range(16) for b in range(16)
        ]
        _emit("\n".join(lines))
    else:
        head = "    " + " ".join(f"{b:>3X}" for b in range(16))
        _emit(f"ddt of {sbox.id} (uniformity {ddt.uniformity})")
        _emit(head)
        for a in range(16):
            _emit(f"{a:>3X} " + " ".join(f"{c:>3}" for c in ddt.counts[a]))
    return 0


# ---------------------------------------------------------------------------
# scan


def _cmd_scan(args) -> int:
    name, desc = resolve_description(args.desc)
    key = zero_key(desc)
    rounds = args.rounds if args.rounds is not None else desc.rounds
    floor = args.floor if args.full_table else None
    if args.threshold is not None:
        chars = top_characteristics(
            desc, key, threshold=args.threshold, rounds_override=rounds, jobs=args.jobs
        )
        max_count = max((c.count for c in chars), default=0)
        full_table = None
    else:
        dist = scan_max(
            desc, key, rounds_override=rounds, jobs=args.jobs, full_table_floor=floor
        )
        chars = list(dist.argmax)
        max_count = dist.max_count
        full_table = dist.full_table

    if args.out == "json":
        payload = {
            "cipher": desc.name,
            "rounds": rounds,
            "maxCount": max_count,
            "probability": f"{max_count}/65536",
            "characteristics": [
                {"a_hex": hexw(c.input_diff), "b_hex": hexw(c.output_diff), "count": c.count}
                for c in chars
            ],
        }
        if full_table is not None:
            payload["fullTable"] = [
                {"a_hex": hexw(a), "b_hex": hexw(b), "count": n}
                for (a, b), n in sorted(full_table.items())
            ]
        _emit(_json(payload))
    elif args.out == "csv":
        lines = ["a_hex,b_hex,count"]
        lines += [
            f"{c.input_diff:04X},{c.output_diff:04X},{c.count}" for c in chars
        ]
        _emit("\n".join(lines))
    else:
        _emit(f"cipher {desc.name} ({name}), rounds {rounds}")
        _emit(f"max count {max_count} (probability {max_count}/65536)")
        _emit(f"{'a':>6} {'b':>6} {'count':>6}")
        for c in chars:
            _emit(f"{c.input_diff:>604X} {c.output_diff:>604X} {c.count:>6}")
    return 0


# ---------------------------------------------------------------------------
# trails


def _trail_payload(trail) -> dict:
    return {
        "diffs_hex": [hexw(d) for d in trail.round_diffs],
        "probability": _frac_str(trail.probability),
        "activeCount": trail.active_count,
    }


def _cmd_trails(args) -> int:
    _, desc = resolve_description(args.desc)
    rounds = args.rounds
    min_active = min_active_sboxes(desc, rounds)
    trail = best_trail(desc, rounds)
    bound = Fraction(1, 4) ** min_active
    payload = {
        "rounds": rounds,
        "minActive": min_active,
        "bestTrail": _trail_payload(trail),
        "bound": _frac_str(bound),
    }
    if args.enumerate_all_optimal:
        trails = optimal_trails(desc, rounds, objective=args.objective)
        payload["objective"] = args.objective
        payload["allOptimal"] = [_trail_payload(t) for t in trails]

    if args.out == "json":
        _emit(_json(payload))
    elif args.out == "csv":
        lines = ["rounds,min_active,best_prob,bound"]
        lines.append(
            f"{rounds},{min_active},{_frac_str(trail.probability)},{_frac_str(bound)}"
        )
        _emit("\n".join(lines))
    else:
        _emit(f"rounds {rounds}: min active s-boxes {min_active}")
        _emit(f"best trail probability {_frac_str(trail.probability)}")
        _emit("trail " + " -> ".join(f"{d:04X}" for d in trail.round_diffs))
        _emit(f"bound (1/4)^{min_active} = {_frac_str(bound)}")
        if args.enumerate_all_optimal:
            _emit(f"optimal trails ({args.objective}): {len(payload['allOptimal'])}")
            for t in payload["allOptimal"]:
                _emit("  " + " -> ".join(t["diffs_hex"]) + f"  p={t['probability']}")
    return 0


# ---------------------------------------------------------------------------
# verify


def _cmd_verify(args) -> int:
    _, desc = resolve_description(args.desc)
    a = parse_difference(args.a)
    b = parse_difference(args.b)
    if args.keys is not None:
        res = verify_keyed(desc, a, b, keys=args.keys, seed=args.seed)
    else:
        res = verify_exhaustive(desc, zero_key(desc), a, b)

    if args.out == "json":
        payload = {
            "a_hex": hexw(res.input_diff),
            "b_hex": hexw(res.output_diff),
            "mode": res.mode,
            "keysTested": res.keys_tested,
        }
        if res.count is not None:
            payload["count"] = res.count
            payload["probability"] = f"{res.count}/65536"
        else:
            payload["meanCount"] = res.mean
            payload["stderr"] = res.stderr
            payload["seed"] = res.seed
        _emit(_json(payload))
    elif args.out == "csv":
        if res.count is not None:
            _emit("a_hex,b_hex,mode,count\n"
                  f"{res.input_diff:04X},{res.output_diff:04X},{res.mode},{res.count}")
        else:
            _emit(
                "a_hex,b_hex,mode,mean,stderr,keys,seed\n"
                f"{res.input_diff:04X},{res.output_diff:04X},{res.mode},"
                f"{res.mean},{res.stderr},{res.keys_tested},{res.seed}"
            )
    else:
        _emit(f"a={res.input_diff:04X} b={res.output_diff:04X} mode={res.mode}")
        if res.count is not None:
            _emit(f"count {res.count} / 65536")
        else:
            _emit(
                f"mean count {res.mean:.4f} +- {res.stderr:.4f} "
                f"({res.keys_tested} keys, seed {res.seed})"
            )
    return 0


# ---------------------------------------------------------------------------
# report


def _cmd_report(args) -> int:
    _, desc = resolve_description(args.desc)
    bundle = build_report(desc, max_rounds=args.max_rounds, jobs=args.jobs)
    if args.out == "json":
        _emit(_json(bundle))
    elif args.out == "csv":
        lines = ["rounds,max_count,probability"]
        lines += [
            f"{r['rounds']},{r['maxCount']},{r['probability']}"
            for r in bundle["scan"]["rows"]
        ]
        _emit("\n".join(lines))
    else:
        _emit(f"spndiff {bundle['tool']['version']} report for {desc.name}")
        _emit("")
        _emit("s-boxes:")
        for row in bundle["sboxSummaries"]:
            _emit(
                f"  {row['id']}: uniformity {row['uniformity']} "
                f"(max probability {row['maxProbability']}), "
                f"{row['maxEntries']} maximal entries"
            )
        _emit("")
        _emit("differential scan (max count per round count):")
        for row, cmp_row in zip(
            bundle["scan"]["rows"], bundle["scan"]["publishedComparison"]["perRound"]
        ):
            pub = cmp_row["published"]
            verdict = "match" if cmp_row["match"] else "mismatch"
            _emit(
                f"  {row['rounds']}: {row['maxCount']:>6}"
                + (f"   published {pub} -> {verdict}" if pub is not None else "")
            )
        sat = bundle["scan"]["saturationRound"]
        _emit(f"  non-increasing: {bundle['scan']['nonIncreasing']}; "
              f"saturation round: {sat if sat is not None else 'none'}")
        _emit("")
        _emit("top characteristics vs published:")
        for p in bundle["characteristics"]["publishedComparison"]["pairs"]:
            mark = "found" if p["inMeasuredSet"] else "absent"
            _emit(
                f"  {p['a_hex']} -> {p['b_hex']}: {mark} "
                f"(measured count {p['measuredCount']})"
            )
        _emit("")
        _emit("trail bounds:")
        for row in bundle["trailBounds"]["rows"]:
            _emit(
                f"  {row['rounds']} rounds: min active {row['minActive']}, "
                f"best trail 2^{row['bestTrailProbability']['log2']:.2f}"
            )
        th = bundle["trailBounds"]["theorem"]
        for case in th["perUnitCases"]:
            _emit(
                f"  per-unit bound i={case['i']}: total {case['total']} "
                f"({' | '.join('+'.join(map(str, d)) for d in case['decompositions']) or 'no decompositions stated'})"
            )
        _emit(
            f"  full cipher ({th['fullCipher']['units']} units x "
            f"{th['fullCipher']['minActivePerUnit']} active): "
            f"2^{th['fullCipher']['bound']['log2']:.0f}"
        )
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spndiff",
        description="Differential cryptanalysis workbench for 16-bit SPN ciphers",
    )
    parser.add_argument("--version", action="version", version=f"spndiff {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, jobs=False):
        p.add_argument("--desc", required=True,
                       help=f"description file path or bundled name ({', '.join(bundled_names())})")
        p.add_argument("--out", choices=("json", "csv", "text"), default="text")
        if jobs:
            p.add_argument("--jobs", type=int, default=None,
                           help="worker count (default: SPNDIFF_JOBS or all cores)")

    p = sub.add_parser("ddt", help="difference distribution table of an s-box")
    add_common(p)
    p.add_argument("--sbox", required=True, help="s-box id, or 'all' for a summary")
    p.set_defaults(func=_cmd_ddt)

    p = sub.add_parser("scan", help="exhaustive block-level differential scan")
    add_common(p, jobs=True)
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--threshold", type=int, default=None,
                   help="report all pairs with count >= threshold (default: the maximum)")
    p.add_argument("--full-table", action="store_true",
                   help="also export the sparse count table")
    p.add_argument("--floor", type=int, default=8,
                   help="export floor for --full-table (default 8)")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("trails", help="branch-and-bound trail search")
    add_common(p)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--objective", choices=("min-active", "best-prob"),
                   default="best-prob")
    p.add_argument("--enumerate-all-optimal", action="store_true")
    p.set_defaults(func=_cmd_trails)

    p = sub.add_parser("verify", help="verify a characteristic by direct encryption")
    add_common(p)
    p.add_argument("--a", required=True,
                   help="input difference (hex or nibble notation '0000, 0100, ...')")
    p.add_argument("--b", required=True, help="output difference")
    p.add_argument("--keys", type=int, default=None,
                   help="average over this many random keys instead of zero key")
    p.add_argument("--seed", type=int, default=1, help="splitmix64 seed (default 1)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("report", help="full report with published-value comparison")
    add_common(p, jobs=True)
    p.add_argument("--max-rounds", type=int, default=4)
    p.set_defaults(func=_cmd_report)

    return parser


def run(argv=None) -> int:
    """Parse argv and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return args.func(args)
    except (DescriptionError, ValueError, FileNotFoundError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
