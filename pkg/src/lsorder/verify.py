"""Oracle-backed verification suites.

Each suite checks one guarantee of the package against a brute-force
reference at its pinned tolerance and returns a VerifyResult.  The CLI
`verify` subcommand and the acceptance test module both drive these.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from . import oracle
from .family import (
    build_family,
    compare_with_ids,
    family_from_internal,
    family_size,
    walecki_paths,
)
from .fixedpoint import Point, make_shift_table, quantize, sq_dist
from .proximity import AnnState, BcpState, Color
from .spanner import DynamicSpanner, approx_mst, static_spanner_edges

FRAC_BITS = 32
# Pairs closer than 2^-26 are below the resolution slack and exempt from
# the distance-sensitive guarantees (raw squared distance floor).
MIN_SQ = 1 << (2 * (FRAC_BITS - 26))


@dataclass
class VerifyResult:
    key: str
    name: str
    passed: bool
    seconds: float
    details: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.key}: {self.name} ({self.seconds:.2f}s)"


def _points(rng: random.Random, n: int, dim: int) -> list[Point]:
    return [
        quantize([rng.random() for _ in range(dim)], FRAC_BITS, i) for i in range(n)
    ]


def _timed(fn):
    def wrapper(*args, **kwargs) -> VerifyResult:
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    return wrapper


@_timed
def verify_walecki(seed: int = 0, **_) -> VerifyResult:
    """Path decomposition: n/2 edge-disjoint Hamiltonian paths covering K_n."""
    details = []
    ok = True
    for n in (2, 4, 8, 16, 64):
        perms = walecki_paths(n)
        good = len(perms) == n // 2
        seen = set()
        for perm in perms:
            path = perm.path()
            good &= sorted(path) == list(range(n))
            good &= [perm.rank_of(c) for c in path] == list(range(n))
            for a, b in zip(path, path[1:]):
                e = (min(a, b), max(a, b))
                good &= e not in seen
                seen.add(e)
        good &= len(seen) == n * (n - 1) // 2
        ok &= good
        details.append(f"n={n}: paths={len(perms)} edges={len(seen)} {'ok' if good else 'FAIL'}")
    return VerifyResult("walecki", "Hamiltonian path cover of K_n", ok, 0.0, details)


@_timed
def verify_shift_residues(seed: int = 0, **_) -> VerifyResult:
    """Residues of {i/n} modulo powers of two equal the scaled set exactly."""
    ok = True
    details = []
    for n in range(3, 32, 2):
        for ell in range(0, 13):
            if not oracle.shift_residues_check(n, ell):
                ok = False
                details.append(f"n={n} ell={ell}: FAIL")
    details.append("odd n in 3..31, ell in 0..12: all equal" if ok else "failures above")
    return VerifyResult("residues", "shift residue set identity", ok, 0.0, details)


@_timed
def verify_shifting(seed: int = 0, pairs: int = 10_000, dims=(1, 2, 3), **_) -> VerifyResult:
    """Some diagonal shift places any separated pair in a small common cell."""
    rng = random.Random(seed)
    w = FRAC_BITS
    ok = True
    details = []
    for d in dims:
        table = make_shift_table(d, w)
        dplus = table.shift_count + 1
        bound_factor = 4 * dplus * dplus
        failures = 0
        for _ in range(pairs):
            while True:
                p = [rng.random() for _ in range(d)]
                q = [rng.random() for _ in range(d)]
                pr = quantize(p, w, 0)
                qr = quantize(q, w, 1)
                sq = sq_dist(pr, qr)
                if sq >= MIN_SQ:
                    break
            hit = False
            for s in table.shifts:
                top = -1
                for a, b in zip(pr.coords, qr.coords):
                    x = (a + s) ^ (b + s)
                    if x:
                        h = x.bit_length() - 1
                        if h > top:
                            top = h
                m = w - top
                # real cell side 2^(1-m) <= 2(D+1)*dist, squared and exact
                if 1 << (2 * (w + 1 - m)) <= bound_factor * sq:
                    hit = True
                    break
            if not hit:
                failures += 1
        ok &= failures == 0
        details.append(f"d={d}: {pairs} pairs, failures={failures}")
    return VerifyResult("shifting", "diagonal shift common-cell bound", ok, 0.0, details)


@_timed
def verify_comparator(
    seed: int = 0, sets: int = 20, n: int = 64, points=None, **_
) -> VerifyResult:
    """Bitwise comparator sorts exactly like the explicit tree traversal."""
    from functools import cmp_to_key

    rng = random.Random(seed)
    ok = True
    details = []
    dim = len(points[0].coords) if points else 2
    runs = 1 if points else sets
    for level_bits in (1, 2):
        fam = family_from_internal(dim, level_bits, FRAC_BITS)
        bad = 0
        for _ in range(runs):
            pts = points if points else _points(rng, n, dim)
            for o in fam.orderings:
                key = cmp_to_key(lambda u, v: compare_with_ids(o, fam, u, v))
                got = [p.id for p in sorted(pts, key=key)]
                want = oracle.reference_dfs_order(fam, pts, o.shift_i, o.tree_j, o.perm)
                if got != want:
                    bad += 1
        ok &= bad == 0
        details.append(
            f"eps_internal=1/{1 << level_bits}: {runs} set(s) x {fam.size} orderings, mismatches={bad}"
        )
    return VerifyResult("comparator", "comparator equals tree-order oracle", ok, 0.0, details)


@_timed
def verify_lso_property(
    seed: int = 0,
    dims=(1, 2),
    eps_values=(0.25, 0.5),
    sets: int = 10,
    n: int = 128,
    points=None,
    **_,
) -> VerifyResult:
    """Every separated pair is protected by some ordering in the family."""
    rng = random.Random(seed)
    ok = True
    details = []
    if points is not None:
        dims = (len(points[0].coords),)
    for d in dims:
        for eps in eps_values:
            fam = build_family(d, eps, FRAC_BITS)
            checked = 0
            bad = 0
            for _ in range(1 if points else sets):
                pts = points if points else _points(rng, n, d)
                c, failures = oracle.check_lso_all_pairs(fam, pts, eps, MIN_SQ)
                checked += c
                bad += len(failures)
            ok &= bad == 0
            details.append(f"d={d} eps={eps}: pairs={checked} failures={bad}")
    return VerifyResult("lso", "pair protection across the family", ok, 0.0, details)


@_timed
def verify_bcp(seed: int = 0, steps: int = 512, cap: int = 256, **_) -> VerifyResult:
    """Candidate-pair minimum stays within (1+eps) of the exact pair, per step."""
    rng = random.Random(seed)
    fam = build_family(2, 0.25, FRAC_BITS)
    state = BcpState(fam)
    live: dict[int, Color] = {}
    worst_num, worst_den = 0, 1  # track max sq-ratio as an exact fraction
    ok = True
    for _ in range(steps):
        if live and (len(live) >= cap or rng.random() < 0.25):
            pid = rng.choice(list(live))
            del live[pid]
            state.delete(pid)
        else:
            color = Color.RED if rng.random() < 0.5 else Color.BLUE
            pid = state.add([rng.random(), rng.random()], color)
            live[pid] = color
        reds = [state.points[i] for i, c in live.items() if c is Color.RED]
        blues = [state.points[i] for i, c in live.items() if c is Color.BLUE]
        want = oracle.exact_bcp(reds, blues)
        got = state.current_sq()
        if want is None:
            ok &= got is None
            continue
        if got is None:
            ok = False
            continue
        sq = got[2]
        # reported <= 1.25 * exact, squared: 16*sq <= 25*sq_exact, exact ints
        ok &= 16 * sq <= 25 * want[1]
        if want[1] and sq * worst_den > worst_num * want[1]:
            worst_num, worst_den = sq, want[1]
    ratio = (worst_num / worst_den) ** 0.5 if worst_den else 0.0
    details = [f"{steps} steps, cap n={cap}, worst ratio={ratio:.4f} (bound 1.25)"]
    return VerifyResult("bcp", "dynamic bichromatic closest pair", ok, 0.0, details)


@_timed
def verify_spanner(
    seed: int = 0, eps_values=(0.25, 0.5), sizes=(64, 256), churn: int = 256, **_
) -> VerifyResult:
    """Dilation, size, degree, locality and rebuild-equality of the spanner."""
    rng = random.Random(seed)
    ok = True
    details = []
    for eps in eps_values:
        fam = build_family(2, eps, FRAC_BITS)
        for n in sizes:
            g = DynamicSpanner(fam, k=0)
            live = set()
            for _ in range(n):
                live.add(g.add([rng.random(), rng.random()]))
            for _ in range(churn):
                if len(live) >= n or (len(live) > n // 2 and rng.random() < 0.5):
                    pid = rng.choice(sorted(live))
                    live.discard(pid)
                    g.delete(pid)
                else:
                    live.add(g.add([rng.random(), rng.random()]))
            m = len(live)
            delta_bound = 3 * fam.size  # k = 0
            deltas_ok = all(
                len(d.added) + len(d.removed) <= delta_bound for d in g.delta_log
            )
            count_ok = g.edge_count <= fam.size * (m - 1)
            degree_ok = g.max_degree <= 2 * fam.size
            rebuilt = static_spanner_edges(fam, g.points.values(), k=0)
            rebuild_ok = rebuilt.keys() == g._edges.keys() and all(
                rebuilt[p][1] == g._edges[p][1] for p in rebuilt
            )
            dil = oracle.dilation(g, list(g.points.values()), FRAC_BITS)
            dil_ok = dil <= 1.0 + eps
            good = deltas_ok and count_ok and degree_ok and rebuild_ok and dil_ok
            ok &= good
            details.append(
                f"eps={eps} n={m}: dilation={dil:.4f}<=1+{eps} edges={g.edge_count} "
                f"maxdeg={g.max_degree} deltas={'ok' if deltas_ok else 'FAIL'} "
                f"rebuild={'ok' if rebuild_ok else 'FAIL'}"
            )
    return VerifyResult("spanner", "dynamic spanner under churn", ok, 0.0, details)


@_timed
def verify_ft_spanner(
    seed: int = 0, ks=(1, 2, 3), n: int = 128, fault_sets: int = 50, **_
) -> VerifyResult:
    """Punctured fault-tolerant spanners keep the stretch bound."""
    rng = random.Random(seed)
    eps = 0.5
    fam = build_family(2, eps, FRAC_BITS)
    ok = True
    details = []
    for k in ks:
        g = DynamicSpanner(fam, k=k)
        pts = _points(rng, n, 2)
        for p in pts:
            g.insert(p)
        degree_ok = g.max_degree <= 2 * (k + 1) * fam.size
        dil0 = oracle.dilation(g, pts, FRAC_BITS)
        worst = dil0
        for _ in range(fault_sets):
            faults = frozenset(p.id for p in rng.sample(pts, k))
            worst = max(worst, oracle.dilation(g, pts, FRAC_BITS, exclude=faults))
        good = degree_ok and worst <= 1.0 + eps
        ok &= good
        details.append(
            f"k={k}: worst dilation={worst:.4f}<=1.5 maxdeg={g.max_degree}"
            f"<={2 * (k + 1) * fam.size}"
        )
    return VerifyResult("ft", "fault-tolerant spanner punctures", ok, 0.0, details)


@_timed
def verify_ann(
    seed: int = 0, dims=(1, 2), n: int = 128, queries: int = 128, **_
) -> VerifyResult:
    """Every query answer is within (1+eps) of the exact nearest neighbor."""
    rng = random.Random(seed)
    eps = 0.25
    ok = True
    details = []
    for d in dims:
        fam = build_family(d, eps, FRAC_BITS)
        state = AnnState(fam)
        for _ in range(n):
            state.add([rng.random() for _ in range(d)])
        worst_num, worst_den = 0, 1
        for t in range(queries):
            if t % 2 == 1 and len(state.points) > 2:
                state.delete(rng.choice(sorted(state.points)))
            probe = quantize([rng.random() for _ in range(d)], FRAC_BITS)
            pid, _ = state.query(probe)
            got_sq = sq_dist(state.points[pid], probe)
            _, want_sq = oracle.exact_nn(list(state.points.values()), probe)
            ok &= 16 * got_sq <= 25 * want_sq
            if want_sq and got_sq * worst_den > worst_num * want_sq:
                worst_num, worst_den = got_sq, want_sq
        ratio = (worst_num / worst_den) ** 0.5 if worst_den else 0.0
        details.append(f"d={d}: {queries} queries, worst ratio={ratio:.4f} (bound 1.25)")
    return VerifyResult("ann", "dynamic approximate nearest neighbor", ok, 0.0, details)


@_timed
def verify_mst(seed: int = 0, sets: int = 20, n: int = 64, points=None, **_) -> VerifyResult:
    """Spanner-based tree weight within (1+eps) of the exact Euclidean MST."""
    rng = random.Random(seed)
    eps = 0.25
    ok = True
    worst = 0.0
    if points is not None:
        sets = 1
    for _ in range(sets):
        pts = points if points else _points(rng, n, 2)
        tree, weight = approx_mst(pts, eps, FRAC_BITS)
        exact = oracle.exact_mst_weight(pts, FRAC_BITS)
        spans = len(tree) == len(pts) - 1
        ratio = weight / exact if exact else 1.0
        worst = max(worst, ratio)
        ok &= spans and weight <= (1.0 + eps) * exact
    details = [f"{sets} set(s): worst weight ratio={worst:.4f} (bound 1.25)"]
    return VerifyResult("mst", "approximate Euclidean MST", ok, 0.0, details)


@_timed
def verify_cardinality(seed: int = 0, **_) -> VerifyResult:
    """Family size matches the closed-form count for every constructible shape."""
    ok = True
    combos = 0
    for d in range(1, 9):
        for level_bits in range(1, 25):
            if level_bits * d > 24:
                break
            fam = family_from_internal(d, level_bits, FRAC_BITS)
            expected = (fam.shift_count + 1) * level_bits * (1 << (level_bits * d - 1))
            ok &= fam.size == expected == family_size(d, 2.0 ** (-level_bits))
            combos += 1
    # eps accounting bracket for target-driven construction
    for d, eps in ((1, 0.25), (2, 0.25), (2, 0.5), (3, 0.9)):
        fam = build_family(d, eps, FRAC_BITS)
        bound = eps / (2 * (fam.shift_count + 1) * d**0.5)
        ok &= fam.eps_internal <= bound < 2 * fam.eps_internal
    details = [f"{combos} (dim, level_bits) shapes match the closed form"]
    return VerifyResult("cardinality", "family size formula", ok, 0.0, details)


SUITES = {
    "walecki": verify_walecki,
    "residues": verify_shift_residues,
    "shifting": verify_shifting,
    "comparator": verify_comparator,
    "lso": verify_lso_property,
    "bcp": verify_bcp,
    "spanner": verify_spanner,
    "ft": verify_ft_spanner,
    "ann": verify_ann,
    "mst": verify_mst,
    "cardinality": verify_cardinality,
}


def run_suites(
    keys=None,
    seed: int = 0,
    dim: int | None = None,
    eps: float | None = None,
    points=None,
):
    """Run the selected suites (all by default), narrowed to one dimension
    and/or eps where a suite is parameterized over them; `points` substitutes
    a provided set for the generated ones in the point-set-driven suites."""
    results = []
    for key in keys or SUITES:
        fn = SUITES[key]
        kwargs = {}
        if dim is not None:
            kwargs["dims"] = (dim,)
        if eps is not None:
            kwargs["eps_values"] = (eps,)
        if points is not None:
            kwargs["points"] = points
        results.append(fn(seed=seed, **kwargs))
    return results
