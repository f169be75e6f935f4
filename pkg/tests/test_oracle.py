import math
import random

import pytest

from lsorder import oracle
from lsorder.family import family_from_internal
from lsorder.fixedpoint import dist_value, quantize, sq_dist


def _pts(rng, n, d, w=16, start=0):
    return [
        quantize([rng.random() for _ in range(d)], w, start + i) for i in range(n)
    ]


class TestExactBcp:
    def test_singletons(self):
        r = quantize([0.1, 0.1], 16, 0)
        b = quantize([0.9, 0.9], 16, 1)
        assert oracle.exact_bcp([r], [b]) == ((0, 1), sq_dist(r, b))

    def test_empty_side(self):
        assert oracle.exact_bcp([], [quantize([0.5], 16, 0)]) is None
        assert oracle.exact_bcp([quantize([0.5], 16, 0)], []) is None

    def test_against_second_implementation(self):
        rng = random.Random(1)
        reds = _pts(rng, 64, 2)
        blues = _pts(rng, 64, 2, start=64)
        got = oracle.exact_bcp(reds, blues)
        # independently coded double loop with different tie handling order
        best = None
        for b in blues:
            for r in reds:
                sq = sum((x - y) ** 2 for x, y in zip(r.coords, b.coords))
                key = (sq, r.id, b.id)
                if best is None or key < best:
                    best = key
        assert got == ((best[1], best[2]), best[0])


class TestExactNn:
    def test_single(self):
        p = quantize([0.4], 16, 3)
        assert oracle.exact_nn([p], quantize([0.9], 16)) == (3, sq_dist(p, quantize([0.9], 16)))

    def test_member_query_zero(self):
        pts = _pts(random.Random(2), 10, 2)
        assert oracle.exact_nn(pts, pts[4]) == (4, 0)

    def test_agrees_with_bcp_identity(self):
        rng = random.Random(3)
        pts = _pts(rng, 30, 2)
        q = quantize([rng.random(), rng.random()], 16, 999)
        nn = oracle.exact_nn(pts, q)
        bcp = oracle.exact_bcp([q], pts)
        assert nn[1] == bcp[1] and bcp[0][1] == nn[0]


class TestDilation:
    def test_complete_graph(self):
        rng = random.Random(4)
        pts = _pts(rng, 12, 2)

        class Complete:
            def edges(self):
                for i in range(len(pts)):
                    for j in range(i + 1, len(pts)):
                        yield pts[i].id, pts[j].id, dist_value(
                            sq_dist(pts[i], pts[j]), 16
                        )

        assert oracle.dilation(Complete(), pts, 16) == pytest.approx(1.0)

    def test_two_points(self):
        pts = [quantize([0.1], 16, 0), quantize([0.7], 16, 1)]

        class One:
            def edges(self):
                yield 0, 1, dist_value(sq_dist(pts[0], pts[1]), 16)

        assert oracle.dilation(One(), pts, 16) == pytest.approx(1.0)

    def test_collinear_through_middle(self):
        # outer edge missing; the path through the middle has equal length
        pts = [quantize([0.1], 16, 0), quantize([0.5], 16, 1), quantize([0.9], 16, 2)]

        class Chain:
            def edges(self):
                yield 0, 1, dist_value(sq_dist(pts[0], pts[1]), 16)
                yield 1, 2, dist_value(sq_dist(pts[1], pts[2]), 16)

        assert oracle.dilation(Chain(), pts, 16) == pytest.approx(1.0)

    def test_disconnected_is_infinite(self):
        pts = [quantize([0.1], 16, 0), quantize([0.9], 16, 1)]

        class Empty:
            def edges(self):
                return iter(())

        assert oracle.dilation(Empty(), pts, 16) == math.inf

    def test_exclude_vertices(self):
        pts = [quantize([0.1], 16, 0), quantize([0.5], 16, 1), quantize([0.9], 16, 2)]

        class Chain:
            def edges(self):
                yield 0, 1, dist_value(sq_dist(pts[0], pts[1]), 16)
                yield 1, 2, dist_value(sq_dist(pts[1], pts[2]), 16)

        assert oracle.dilation(Chain(), pts, 16, exclude={1}) == math.inf


class TestReferenceDfsOrder:
    def test_single_point(self):
        fam = family_from_internal(2, 1, 8)
        pts = [quantize([0.3, 0.3], 8, 5)]
        assert oracle.reference_dfs_order(fam, pts, 0, 0, fam.perm(0)) == [5]

    def test_1d_identity_perm_is_numeric(self):
        fam = family_from_internal(1, 1, 8)
        rng = random.Random(5)
        pts = _pts(rng, 20, 1, 8)
        got = oracle.reference_dfs_order(fam, pts, 0, 0, fam.perm(0))
        want = [p.id for p in sorted(pts, key=lambda p: (p.coords[0], p.id))]
        assert got == want

    def test_equal_points_by_id(self):
        fam = family_from_internal(1, 1, 8)
        pts = [quantize([0.5], 8, 9), quantize([0.5], 8, 2)]
        assert oracle.reference_dfs_order(fam, pts, 1, 0, fam.perm(0)) == [2, 9]


class TestShiftResidues:
    def test_identity_level(self):
        assert oracle.shift_residues_check(3, 0)
        assert oracle.shift_residues_check(31, 0)

    def test_examples(self):
        assert oracle.shift_residues_check(3, 1)
        assert oracle.shift_residues_check(5, 3)

    def test_full_grid(self):
        assert all(
            oracle.shift_residues_check(n, ell)
            for n in range(3, 32, 2)
            for ell in range(13)
        )

    def test_even_n_rejected(self):
        with pytest.raises(ValueError):
            oracle.shift_residues_check(4, 1)


class TestExactMst:
    def test_tiny(self):
        assert oracle.exact_mst_weight([], 16) == 0.0
        assert oracle.exact_mst_weight([quantize([0.5], 16, 0)], 16) == 0.0

    def test_two_points(self):
        pts = [quantize([0.25], 16, 0), quantize([0.75], 16, 1)]
        assert oracle.exact_mst_weight(pts, 16) == pytest.approx(0.5, rel=1e-6)

    def test_unit_square_corners(self):
        # 0.5-side square: three sides of 0.5 each
        vals = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]
        pts = [quantize(v, 16, i) for i, v in enumerate(vals)]
        assert oracle.exact_mst_weight(pts, 16) == pytest.approx(1.5, rel=1e-6)


class TestLsoPairProperty:
    def test_two_point_set_trivially_true(self):
        fam = family_from_internal(2, 1, 16)
        pts = [quantize([0.2, 0.2], 16, 0), quantize([0.8, 0.8], 16, 1)]
        assert oracle.check_lso_pair_property(fam, pts, pts[0], pts[1], 0.5)

    def test_rejects_identical_pair(self):
        fam = family_from_internal(1, 1, 16)
        pts = [quantize([0.5], 16, 0), quantize([0.5], 16, 1)]
        with pytest.raises(ValueError):
            oracle.check_lso_pair_property(fam, pts, pts[0], pts[1], 0.5)

    def test_fast_path_agrees_with_exhaustive(self):
        # coarse grids force boundary ties and deep shared prefixes
        rng = random.Random(7)
        for d, e, w, eps in ((1, 2, 12, 0.5), (2, 1, 12, 0.5), (1, 1, 8, 0.25), (2, 2, 8, 0.75)):
            fam = family_from_internal(d, e, w)
            pts = _pts(rng, 20, d, w)
            ctx = oracle._PairContext(fam, pts, eps)
            for a in range(10):
                for b in range(a + 1, 20):
                    sq = sq_dist(pts[a], pts[b])
                    if sq == 0:
                        continue
                    assert ctx.check(a, b) == ctx._exhaustive(a, b, sq)

    def test_fast_path_agrees_on_clustered_points(self):
        # tight clusters plus far outliers: between-points checks do real work
        rng = random.Random(11)
        fam = family_from_internal(2, 1, 10)
        pts = []
        for c in range(4):
            cx, cy = rng.random() * 0.9, rng.random() * 0.9
            for _ in range(5):
                pts.append(
                    quantize(
                        [min(cx + rng.random() * 0.02, 0.999),
                         min(cy + rng.random() * 0.02, 0.999)],
                        10,
                        len(pts),
                    )
                )
        ctx = oracle._PairContext(fam, pts, 0.25)
        for a in range(len(pts)):
            for b in range(a + 1, len(pts)):
                sq = sq_dist(pts[a], pts[b])
                if sq == 0:
                    continue
                assert ctx.check(a, b) == ctx._exhaustive(a, b, sq)

    def test_batch_matches_single(self):
        rng = random.Random(8)
        fam = family_from_internal(2, 2, 16)
        pts = _pts(rng, 16, 2)
        checked, failures = oracle.check_lso_all_pairs(fam, pts, 0.5)
        assert checked == 16 * 15 // 2
        failed = set(failures)
        for a in range(16):
            for b in range(a + 1, 16):
                single = oracle.check_lso_pair_property(fam, pts, pts[a], pts[b], 0.5)
                assert single == ((pts[a].id, pts[b].id) not in failed)
