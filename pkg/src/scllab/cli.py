"""Command-line interface.

Subcommands: construct, simulate, equivalence, audit-proposition, cost,
validate-sorters.  Exit code 0 means success / all checks passed; any failed
audit or validation returns nonzero.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import costmodel, harness, polar, pruning


def _cmd_construct(args) -> int:
    code = polar.construct(args.n, args.k, args.z0)
    polar.write_code_file(code, args.out)
    print(f"wrote n={code.n} k={code.k} code ({len(code.frozen_set)} frozen indexes) to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    cfg = harness.load_config(args.config)
    out = Path(args.out if args.out is not None else cfg.output_path)
    result = harness.run_fer(cfg)
    harness.emit_csv(result, out)
    dat = out.with_suffix(".dat")
    svg = out.with_suffix(".svg")
    harness.emit_plot_data(result, dat, svg_path=svg)
    print(f"{'snr_db':>8} {'frames':>8} {'ferr':>6} {'fer':>12} {'ber':>12}")
    for p in result.points:
        print(f"{p.snr_db:>8g} {p.frames:>8} {p.frame_errors:>6} {p.fer:>12.6g} {p.ber:>12.6g}")
    print(f"wrote {out}, {dat}, {svg}")
    return 0


def _cmd_equivalence(args) -> int:
    cfg = harness.SimConfig(
        n=args.n,
        k=args.k,
        list_size=args.list,
        snr_points_db=(args.snr_db,),
        max_frames=args.frames,
        min_frame_errors=args.frames + 1,
        seed=args.seed,
    )
    report = harness.run_equivalence(cfg)
    print(report.to_text())
    return 0 if report.ok else 1


def _cmd_audit_proposition(args) -> int:
    l_values = [int(tok) for tok in args.list.split(",") if tok.strip()]
    for L in l_values:
        if L < 2 or L % 2:
            print(f"list sizes must be even and >= 2, got {L}", file=sys.stderr)
            return 2
    text, ok = harness.run_proposition_audit(l_values)
    print(text, end="")
    return 0 if ok else 1


def _cmd_cost(args) -> int:
    report = costmodel.cost_report(
        args.n, args.p, args.list, design=args.design, table2_path=args.table2
    )
    print(report.to_text())
    return 0


def _cmd_validate_sorters(args) -> int:
    ok = True

    def check(label: str, passed: bool) -> None:
        nonlocal ok
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {label}")

    width = 4
    while width <= args.max_width:
        net = pruning.build_bitonic(width)
        check(f"bitonic width {width}: exhaustive binary sort check", pruning.verify_zero_one(net))
        width *= 2
    width = 4
    while width <= args.max_width:
        net = pruning.build_mvf(width)
        check(
            f"selector width {width}: exhaustive binary smallest-half check",
            pruning.verify_zero_one(net, selector=True),
        )
        width *= 2

    rng = np.random.default_rng(7)
    for width in (32, 64):
        net = pruning.build_mvf(width)
        keys = rng.standard_normal((args.samples, width))
        out = pruning.apply_network(net, keys)
        low = np.sort(out[:, : width // 2], axis=1)
        oracle = np.sort(keys, axis=1)[:, : width // 2]
        check(
            f"selector width {width}: {args.samples} random inputs match smallest-half oracle",
            bool(np.array_equal(low, oracle)),
        )

    for L in (4, 8, 16):
        metrics = rng.standard_normal((args.samples, 2 * L))
        expected = pruning.ProposedPruner().select_batch(metrics)
        agree = True
        for design in (1, 2, 3):
            got = pruning.make_design_sorter(design, L).select_batch(metrics)
            agree &= bool(np.array_equal(got, expected))
        check(f"designs 1-3, L={L}: {args.samples} random candidate sets match index-ordered pruning", agree)

    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scllab",
        description="List-decoding lab: simulation, pruning audits, and cost models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code and write its code file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--z0", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("simulate", help="run the configured FER sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser(
        "equivalence", help="decode frames with both pruners and compare outputs"
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--list", type=int, required=True)
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_equivalence)

    p = sub.add_parser(
        "audit-proposition", help="brute-force the allowed-source bound per list size"
    )
    p.add_argument("--list", required=True, help="comma-separated even list sizes")
    p.set_defaults(func=_cmd_audit_proposition)

    p = sub.add_parser("cost", help="print the cost/latency report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--list", type=int, required=True)
    p.add_argument("--design", type=int, choices=(1, 2, 3), default=None)
    p.add_argument("--table2", default=None, help="override the bundled crossbar LUT table")
    p.set_defaults(func=_cmd_cost)

    p = sub.add_parser("validate-sorters", help="run the sorter-network checks")
    p.add_argument("--max-width", type=int, default=16)
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=_cmd_validate_sorters)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
