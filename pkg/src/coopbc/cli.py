"""Command-line entry point: ``coopbc <subcommand> ...``.

Exit status is 0 on success, 1 for invalid input (bad files, parameters or
schemes) and 2 for failures while computing.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .channel import aux_from_json, load_channel
from .equivalence import verify_corollary1
from .errors import CapacityBudgetError, CoopBCError, NumericalConsistencyError
from .optimize import SearchConfig, stderr_progress, trace_frontier
from .polyhedra import format_system, write_region_csv
from .regions import (
    RS_DROPPED,
    RegionKind,
    alpha_grid,
    compare_binary,
    evaluate_region,
    project_rate_splitting,
    rate_splitting_expected,
    rate_splitting_system,
)

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME = 0, 1, 2


def _out_dir(path) -> Path:
    d = Path(path)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _load(channel_path, aux_path=None):
    ch, aux = load_channel(channel_path)
    if aux_path is not None:
        with open(aux_path, encoding="utf-8") as fh:
            d = json.load(fh)
        aux = aux_from_json(d.get("aux", d))
    return ch, aux


def _cardinalities(items) -> dict[str, int]:
    out = {}
    for it in items or ():
        name, _, val = it.partition("=")
        if not val:
            raise argparse.ArgumentTypeError(f"expected NAME=SIZE, got {it!r}")
        out[name] = int(val)
    return out


def _row_text(coeffs, rhs) -> str:
    lhs = " + ".join(f"{'' if c == 1 else str(c) + ' '}{v}" for v, c in sorted(dict(coeffs).items())) or "0"
    return f"{lhs} <= {rhs}"


# -- subcommands ----------------------------------------------------------------

def cmd_region(args) -> int:
    ch, aux = _load(args.channel, args.aux)
    if aux is None:
        print("error: no auxiliary scheme in the channel file and no --aux given", file=sys.stderr)
        return EXIT_INPUT
    ev = evaluate_region(args.kind, ch, aux, args.c12)
    out = _out_dir(args.out)
    stem = f"{ev.kind.value}_c12_{args.c12:g}"
    write_region_csv(out / f"{stem}_ineq.csv", out / f"{stem}_vertices.csv", ev.kind.value, args.c12,
                     ev.region)
    print(f"region {ev.kind.value}, c12={args.c12:g}: {'feasible' if ev.feasible else 'infeasible'}")
    print(format_system(ev.system))
    for name, val in sorted(ev.terms.items()):
        print(f"  {name} = {val:.9f}")
    print(f"vertices: {len(ev.region.vertices)}")
    for v in ev.region.vertices:
        print(f"  ({v[0]:.9f}, {v[1]:.9f})")
    return EXIT_OK


def cmd_frontier(args) -> int:
    ch, _ = _load(args.channel)
    cfg = SearchConfig(aux_cardinalities=_cardinalities(args.card), grid_resolution=args.grid_resolution,
                       random_restarts=args.restarts, refine_iters=args.refine_iters, seed=args.seed,
                       directions=args.directions)
    res = trace_frontier(args.kind, ch, args.c12, cfg, stderr_progress if args.progress else None)
    out = _out_dir(args.out)
    kind = RegionKind.parse(args.kind).value
    write_region_csv(out / f"frontier_{kind}_ineq.csv", out / f"frontier_{kind}_vertices.csv", kind,
                     args.c12, res.region)
    with open(out / f"frontier_{kind}_schemes.json", "w", encoding="utf-8") as fh:
        json.dump([{"vertex": list(v), "aux": s.to_json()} for v, s in res.vertex_schemes.items()], fh,
                  indent=2)
    print(f"frontier {kind}, c12={args.c12:g}: {len(res.region.vertices)} vertices, "
          f"{res.evaluations} evaluations")
    for v in res.region.vertices:
        print(f"  ({v[0]:.6f}, {v[1]:.6f})")
    return EXIT_OK


def cmd_binary_example(args) -> int:
    alphas = alpha_grid(args.alpha_step)
    out = _out_dir(args.out)
    for c12 in args.c12:
        cmp = compare_binary(args.p1, args.p2, c12, alphas)
        stem = out / f"binary_c12_{c12:g}"
        write_region_csv(f"{stem}_ineq.csv", f"{stem}_vertices.csv", "binning", c12, cmp.binning)
        write_region_csv(f"{stem}_ineq.csv", f"{stem}_vertices.csv", "rate-splitting-bound", c12,
                         cmp.rate_splitting, append=True)
        print(cmp.verdict())
    return EXIT_OK


def cmd_fme_demo(args) -> int:
    start = rate_splitting_system()
    got = project_rate_splitting()
    want = rate_splitting_expected(include_dropped=True)
    print("system before elimination:")
    print(format_system(start))
    print("\nafter substituting R_Z1 = R_Z - R_Z2 and eliminating R_Z2:")
    print(format_system(got))
    print("\nexpected (three region rows plus the two implied rows):")
    print(format_system(want))
    g, w = got.canonical(), want.canonical()
    for tag, rows in (("missing", w - g), ("unexpected", g - w)):
        for coeffs, rhs in sorted(rows, key=str):
            print(f"{tag}: {_row_text(coeffs, rhs)}")
    dropped = "; ".join(_row_text(c, r) for c, r in RS_DROPPED)
    print(f"\nimplied rows dropped from the region: {dropped}")
    ok = g == w
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_RUNTIME


def cmd_corollary1(args) -> int:
    if args.channel:
        ch, _ = _load(args.channel)
    else:
        from .channel import BinarySymmetricBC, to_channel_spec
        ch = to_channel_spec(BinarySymmetricBC(args.p1, args.p2))
    rep = verify_corollary1(ch, args.c12, samples=args.samples, seed=args.seed, tol=args.tol,
                            u_size=args.u_size)
    print(rep.to_text())
    if args.out:
        rep.write_csv(args.out)
    return EXIT_OK if rep.passed else EXIT_RUNTIME


def cmd_simulate(args) -> int:
    from .sim import load_config, run_trials
    cfg = load_config(args.config)
    over = {k: v for k, v in (("n", args.n), ("trials", args.trials), ("seed", args.seed),
                              ("eps", args.eps), ("eps_prime", args.eps_prime)) if v is not None}
    if over:
        cfg = cfg.with_(**over)
    rep = run_trials(cfg)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        rep.write_csv(args.out)
    print(f"{cfg.scheme}, n={cfg.n}, trials={rep.trials}")
    for line in rep.summary_lines():
        print(line)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coopbc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    kinds = [k.value for k in RegionKind]

    p = sub.add_parser("region", help="evaluate one region for a channel and auxiliary scheme")
    p.add_argument("--channel", required=True, help="channel JSON (may carry an 'aux' block)")
    p.add_argument("--aux", help="auxiliary scheme JSON, overrides the channel file's block")
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--c12", type=float, default=0.0)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("frontier", help="search auxiliary distributions for the region frontier")
    p.add_argument("--channel", required=True)
    p.add_argument("--kind", default="thm1", choices=kinds)
    p.add_argument("--c12", type=float, default=0.0)
    p.add_argument("--card", action="append", metavar="NAME=SIZE", help="auxiliary alphabet size")
    p.add_argument("--grid-resolution", type=int, default=SearchConfig.grid_resolution)
    p.add_argument("--restarts", type=int, default=SearchConfig.random_restarts)
    p.add_argument("--refine-iters", type=int, default=SearchConfig.refine_iters)
    p.add_argument("--directions", type=int, default=SearchConfig.directions)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--progress", action="store_true", help="per-direction progress on stderr")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("binary-example", help="binning vs rate-splitting on the binary symmetric channel")
    p.add_argument("--p1", type=float, default=0.2)
    p.add_argument("--p2", type=float, default=0.3)
    p.add_argument("--c12", type=float, nargs="+", default=[0.03, 0.05, 0.1, 0.2, 0.3])
    p.add_argument("--alpha-step", type=float, default=1e-3)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_binary_example)

    p = sub.add_parser("fme-demo", help="symbolic projection of the rate-splitting system")
    p.set_defaults(func=cmd_fme_demo)

    p = sub.add_parser("corollary1", help="check the mixture construction on random schemes")
    p.add_argument("--channel", help="stateless channel JSON; default is the binary channel")
    p.add_argument("--p1", type=float, default=0.2)
    p.add_argument("--p2", type=float, default=0.3)
    p.add_argument("--c12", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--u-size", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV of per-sample slacks")
    p.set_defaults(func=cmd_corollary1)

    p = sub.add_parser("simulate", help="Monte Carlo run of a binning scheme")
    p.add_argument("config", help="simulation JSON")
    p.add_argument("--n", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--eps-prime", type=float)
    p.add_argument("--out", help="report CSV")
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors count as input errors; --help exits 0
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return args.func(args)
    except (CapacityBudgetError, NumericalConsistencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (CoopBCError, OSError, ValueError, KeyError, TypeError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
