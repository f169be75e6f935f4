"""Command-line front end: construction, trace replay, verification, timing.

Subcommands: family-info, build-spanner, ft-spanner, mst, bcp, ann, verify,
bench.  Text formats throughout; all randomness is seeded, and emitted edge
lists are sorted, so output is reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import random
import sys
import time

from .family import build_family, family_from_internal
from .fixedpoint import Point, dist_value, quantize
from .proximity import AnnState, BcpState, Color
from .spanner import approx_mst, static_spanner_edges
from .verify import SUITES, run_suites


def _fmt(dist: float) -> str:
    return f"{dist:.9g}"


def _parse_point_file(path: str, dim: int, frac_bits: int) -> list[Point]:
    # point id = line number - 1, so blank lines are errors, not skips
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            parts = line.split()
            if len(parts) != dim:
                raise ValueError(
                    f"{path}:{lineno + 1}: expected {dim} coordinates, got {len(parts)}"
                )
            values = [float(tok) for tok in parts]
            points.append(quantize(values, frac_bits, lineno))
    return points


def _gen_points(n: int, dim: int, frac_bits: int, seed: int) -> list[Point]:
    rng = random.Random(seed)
    return [
        quantize([rng.random() for _ in range(dim)], frac_bits, i) for i in range(n)
    ]


def _load_points(args) -> list[Point]:
    if args.points and args.gen:
        raise ValueError("--points and --gen are mutually exclusive")
    if args.points:
        pts = _parse_point_file(args.points, args.dim, args.w)
    elif args.gen:
        pts = _gen_points(args.gen, args.dim, args.w, args.seed)
    else:
        raise ValueError("provide --points FILE or --gen N")
    if args.dump_points:
        with open(args.dump_points, "w", encoding="utf-8") as fh:
            for p in pts:
                fh.write(" ".join(repr(r * 2.0 ** (-args.w)) for r in p.coords) + "\n")
    return pts


def _out_stream(args):
    if args.out:
        return open(args.out, "w", encoding="utf-8")
    return contextlib.nullcontext(sys.stdout)


def _family(args):
    if getattr(args, "eps_internal", None):
        level_bits = -math.frexp(args.eps_internal)[1] + 1
        if 2.0 ** (-level_bits) != args.eps_internal:
            raise ValueError("--eps-internal must be a power of two")
        return family_from_internal(args.dim, level_bits, args.w, eps_target=args.eps)
    if args.eps is None:
        raise ValueError("provide --eps (or --eps-internal)")
    return build_family(args.dim, args.eps, args.w)


def _cmd_family_info(args) -> int:
    fam = _family(args)
    info = {
        "dim": fam.dim,
        "eps_target": fam.eps_target,
        "eps_internal": fam.eps_internal,
        "level_bits": fam.level_bits,
        "shift_count": fam.shift_count,
        "frac_bits": fam.frac_bits,
        "num_orderings": fam.size,
        "rank_table_bytes": 0,  # ranks come from a closed form, no tables
    }
    with _out_stream(args) as out:
        if args.format == "jsonstats":
            json.dump(info, out)
            out.write("\n")
        else:
            for k, v in info.items():
                out.write(f"{k}={v}\n")
    return 0


def _emit_spanner(args, k: int) -> int:
    fam = _family(args)
    pts = _load_points(args)
    edge_map = static_spanner_edges(fam, pts, k=k)
    degree: dict[int, int] = {}
    for u, v in edge_map:
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1
    stats = {
        "n": len(pts),
        "k": k,
        "edge_count": len(edge_map),
        "max_degree": max(degree.values(), default=0),
        "num_orderings": fam.size,
    }
    with _out_stream(args) as out:
        if args.format == "jsonstats":
            json.dump(stats, out)
            out.write("\n")
        else:
            for (u, v) in sorted(edge_map):
                sq, _ = edge_map[(u, v)]
                out.write(f"{u} {v} {_fmt(dist_value(sq, args.w))}\n")
            print(
                f"edges={stats['edge_count']} max_degree={stats['max_degree']}",
                file=sys.stderr,
            )
    return 0


def _cmd_build_spanner(args) -> int:
    return _emit_spanner(args, k=0)


def _cmd_ft_spanner(args) -> int:
    return _emit_spanner(args, k=args.k)


def _cmd_mst(args) -> int:
    if args.eps is None:
        raise ValueError("provide --eps")
    pts = _load_points(args)
    tree, weight = approx_mst(pts, args.eps, args.w)
    with _out_stream(args) as out:
        if args.format == "jsonstats":
            json.dump({"n": len(pts), "edge_count": len(tree), "weight": weight}, out)
            out.write("\n")
        else:
            for u, v, d in sorted((min(u, v), max(u, v), d) for u, v, d in tree):
                out.write(f"{u} {v} {_fmt(d)}\n")
            out.write(f"total {_fmt(weight)}\n")
    return 0


def _replay(args, bichromatic: bool) -> int:
    if not args.trace:
        raise ValueError("provide --trace FILE")
    fam = _family(args)
    state = BcpState(fam) if bichromatic else AnnState(fam)
    next_id = 0
    with _out_stream(args) as out, open(args.trace, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            parts = line.split()
            if not parts:
                continue
            op = parts[0].upper()
            where = f"{args.trace}:{lineno + 1}"
            if op == "I":
                rest = parts[1:]
                color = None
                if rest and rest[0].upper() in ("R", "B"):
                    color = Color.RED if rest[0].upper() == "R" else Color.BLUE
                    rest = rest[1:]
                if len(rest) != args.dim:
                    raise ValueError(f"{where}: expected {args.dim} coordinates")
                point = quantize([float(t) for t in rest], args.w, next_id)
                next_id += 1
                if bichromatic:
                    if color is None:
                        raise ValueError(f"{where}: insert needs a color (R or B)")
                    state.insert(point, color)
                else:
                    state.insert(point)
            elif op == "D":
                if len(parts) != 2:
                    raise ValueError(f"{where}: D takes one id")
                state.delete(int(parts[1]))
            elif op == "P":
                if not bichromatic:
                    raise ValueError(f"{where}: P is only valid in bcp traces")
                cur = state.current()
                if cur is None:
                    out.write("none\n")
                else:
                    rid, bid, dist = cur
                    out.write(f"{rid} {bid} {_fmt(dist)}\n")
            elif op == "Q":
                if bichromatic:
                    raise ValueError(f"{where}: Q is only valid in ann traces")
                if len(parts) != args.dim + 1:
                    raise ValueError(f"{where}: expected {args.dim} coordinates")
                got = state.query(quantize([float(t) for t in parts[1:]], args.w))
                if got is None:
                    out.write("none\n")
                else:
                    out.write(f"{got[0]} {_fmt(got[1])}\n")
            else:
                raise ValueError(f"{where}: unknown op {parts[0]!r}")
    return 0


def _cmd_bcp(args) -> int:
    return _replay(args, bichromatic=True)


def _cmd_ann(args) -> int:
    return _replay(args, bichromatic=False)


def _cmd_verify(args) -> int:
    keys = args.suite or None
    points = None
    if args.points:
        points = _parse_point_file(args.points, args.dim_opt or 2, 32)
    results = run_suites(
        keys, seed=args.seed, dim=args.dim_opt, eps=args.eps, points=points
    )
    failed = False
    for res in results:
        print(res.line())
        for d in res.details:
            print(f"    {d}")
        failed |= not res.passed
    return 2 if failed else 0


def _cmd_bench(args) -> int:
    from .spanner import DynamicSpanner

    fam = _family(args)
    rng = random.Random(args.seed)
    n = args.gen or 256
    pts = _gen_points(n, args.dim, args.w, args.seed)
    print(f"family: dim={fam.dim} eps_internal={fam.eps_internal} orderings={fam.size}")

    def report(structure, name, dt, ops):
        print(f"{structure} {name}: {ops} ops in {dt:.3f}s ({ops / dt:.0f} ops/s)")

    state = AnnState(fam)
    t0 = time.perf_counter()
    for p in pts:
        state.insert(p)
    report("ann", "insert", time.perf_counter() - t0, n)
    t0 = time.perf_counter()
    for _ in range(n):
        state.query(quantize([rng.random() for _ in range(args.dim)], args.w))
    report("ann", "query", time.perf_counter() - t0, n)
    t0 = time.perf_counter()
    for p in pts:
        state.delete(p.id)
    report("ann", "delete", time.perf_counter() - t0, n)

    bcp = BcpState(fam)
    t0 = time.perf_counter()
    for i, p in enumerate(pts):
        bcp.insert(p, Color.RED if i % 2 else Color.BLUE)
        bcp.current()
    report("bcp", "insert+current", time.perf_counter() - t0, n)

    g = DynamicSpanner(fam, k=0, track_deltas=False)
    t0 = time.perf_counter()
    for p in pts:
        g.insert(p)
    report("spanner", "insert", time.perf_counter() - t0, n)
    t0 = time.perf_counter()
    for p in pts:
        g.delete(p.id)
    report("spanner", "delete", time.perf_counter() - t0, n)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lsorder",
        description="Locality-sensitive orderings: spanners, closest pair, ANN, MST",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, eps_required=False):
        p.add_argument("--dim", type=int, default=2, help="dimension d")
        p.add_argument("--eps", type=float, default=None, help="target epsilon")
        p.add_argument(
            "--eps-internal",
            type=float,
            default=None,
            help="force the internal power-of-two cell ratio instead of deriving it",
        )
        p.add_argument("--w", type=int, default=32, help="fractional bits (default 32)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument(
            "--format", choices=("edges", "jsonstats"), default="edges"
        )

    def point_io(p):
        p.add_argument("--points", default=None, help="point file: d floats per line")
        p.add_argument("--gen", type=int, default=None, help="generate N random points")
        p.add_argument("--dump-points", default=None, help="write the points used")

    p = sub.add_parser("family-info", help="print family parameters")
    common(p)
    p.set_defaults(fn=_cmd_family_info)

    p = sub.add_parser("build-spanner", help="static spanner edge list")
    common(p)
    point_io(p)
    p.set_defaults(fn=_cmd_build_spanner)

    p = sub.add_parser("ft-spanner", help="static fault-tolerant spanner edge list")
    common(p)
    point_io(p)
    p.add_argument("--k", type=int, default=1, help="vertex fault tolerance")
    p.set_defaults(fn=_cmd_ft_spanner)

    p = sub.add_parser("mst", help="approximate Euclidean MST")
    common(p)
    point_io(p)
    p.set_defaults(fn=_cmd_mst)

    p = sub.add_parser("bcp", help="replay a bichromatic closest-pair trace")
    common(p)
    p.add_argument("--trace", default=None, help="trace file (I/D/P lines)")
    p.set_defaults(fn=_cmd_bcp)

    p = sub.add_parser("ann", help="replay a nearest-neighbor trace")
    common(p)
    p.add_argument("--trace", default=None, help="trace file (I/D/Q lines)")
    p.set_defaults(fn=_cmd_ann)

    p = sub.add_parser("verify", help="run the oracle-backed verification suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES), default=None)
    p.add_argument("--dim", dest="dim_opt", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--points", default=None,
        help="run the point-set-driven suites on these points instead of generated ones",
    )
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("bench", help="informational timing report")
    common(p)
    p.add_argument("--gen", type=int, default=None, help="number of points")
    p.set_defaults(fn=_cmd_bench)

    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.fn(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
