import random
from functools import cmp_to_key

import pytest

from lsorder.family import compare_with_ids, family_from_internal
from lsorder.fixedpoint import quantize, sq_dist
from lsorder.store import (
    AdjacencyDelta,
    CandidatePairSet,
    OrderedStore,
    StoreEntry,
    pairs_apply,
)


def _family1d():
    return family_from_internal(1, 1, 8)


def _store(fam=None):
    fam = fam or _family1d()
    return OrderedStore(fam, fam.ordering_at(0, 0, 0)), fam


def _p(x, pid, w=8):
    return quantize([x], w, pid)


class TestInsertDelete:
    def test_insert_into_empty(self):
        store, _ = _store()
        delta = store.insert(StoreEntry(_p(0.5, 0)))
        assert delta == AdjacencyDelta(frozenset(), frozenset())

    def test_insert_between(self):
        store, _ = _store()
        store.insert(StoreEntry(_p(0.1, 0)))
        store.insert(StoreEntry(_p(0.9, 1)))
        delta = store.insert(StoreEntry(_p(0.5, 2)))
        assert delta.removed == frozenset({(0, 1)})
        assert delta.added == frozenset({(0, 2), (1, 2)})

    def test_insert_after_last(self):
        store, _ = _store()
        store.insert(StoreEntry(_p(0.1, 0)))
        delta = store.insert(StoreEntry(_p(0.9, 1)))
        assert delta.removed == frozenset()
        assert delta.added == frozenset({(0, 1)})

    def test_delete_only_element(self):
        store, _ = _store()
        store.insert(StoreEntry(_p(0.5, 0)))
        assert store.delete(0) == AdjacencyDelta(frozenset(), frozenset())
        assert len(store) == 0

    def test_delete_middle(self):
        store, _ = _store()
        for x, pid in ((0.1, 0), (0.5, 1), (0.9, 2)):
            store.insert(StoreEntry(_p(x, pid)))
        delta = store.delete(1)
        assert delta.removed == frozenset({(0, 1), (1, 2)})
        assert delta.added == frozenset({(0, 2)})

    def test_delete_endpoint(self):
        store, _ = _store()
        store.insert(StoreEntry(_p(0.1, 0)))
        store.insert(StoreEntry(_p(0.9, 1)))
        delta = store.delete(1)
        assert delta.removed == frozenset({(0, 1)})
        assert delta.added == frozenset()

    def test_delta_size_bounds(self):
        rng = random.Random(8)
        store, _ = _store()
        live = set()
        nid = 0
        for _ in range(200):
            if live and rng.random() < 0.4:
                pid = rng.choice(sorted(live))
                live.discard(pid)
                delta = store.delete(pid)
            else:
                delta = store.insert(StoreEntry(_p(rng.random(), nid)))
                live.add(nid)
                nid += 1
            assert len(delta.removed) <= 2
            assert len(delta.added) <= 2
            assert len(delta.removed) + len(delta.added) <= 3
            assert not (delta.removed & delta.added)

    def test_duplicate_and_missing(self):
        store, _ = _store()
        store.insert(StoreEntry(_p(0.5, 0)))
        with pytest.raises(ValueError):
            store.insert(StoreEntry(_p(0.25, 0)))
        with pytest.raises(KeyError):
            store.delete(42)


class TestOrderInvariant:
    def test_iteration_sorted_after_every_op(self):
        rng = random.Random(2)
        fam = family_from_internal(2, 2, 10)
        for idx in (0, 7, fam.size - 1):
            o = fam.orderings[idx]
            store = OrderedStore(fam, o)
            key = cmp_to_key(lambda u, v: compare_with_ids(o, fam, u, v))
            live = {}
            nid = 0
            for _ in range(120):
                if live and rng.random() < 0.4:
                    pid = rng.choice(list(live))
                    store.delete(pid)
                    del live[pid]
                else:
                    p = quantize([rng.random(), rng.random()], 10, nid)
                    nid += 1
                    live[p.id] = p
                    store.insert(StoreEntry(p))
                got = [e.point.id for e in store.entries()]
                want = [p.id for p in sorted(live.values(), key=key)]
                assert got == want


class TestPredecessorSuccessor:
    def test_empty(self):
        store, _ = _store()
        assert store.predecessor(_p(0.5, -1)) is None
        assert store.successor(_p(0.5, -1)) is None

    def test_basic_1d(self):
        store, _ = _store()
        store.insert(StoreEntry(_p(0.25, 0)))
        store.insert(StoreEntry(_p(0.5, 1)))
        probe = _p(0.3, -1)
        assert store.predecessor(probe).point.id == 0
        assert store.successor(probe).point.id == 1

    def test_equal_coordinate_tie_break(self):
        store, _ = _store()
        store.insert(StoreEntry(_p(0.5, 5)))
        # probe id below 5: the stored point is the successor
        lo = _p(0.5, 1)
        assert store.successor(lo).point.id == 5
        assert store.predecessor(lo) is None
        # probe id above 5: the stored point is the predecessor
        hi = _p(0.5, 9)
        assert store.predecessor(hi).point.id == 5
        assert store.successor(hi) is None

    def test_against_linear_scan(self):
        rng = random.Random(3)
        fam = family_from_internal(2, 1, 10)
        o = fam.orderings[4]
        store = OrderedStore(fam, o)
        key = cmp_to_key(lambda u, v: compare_with_ids(o, fam, u, v))
        pts = [quantize([rng.random(), rng.random()], 10, i) for i in range(60)]
        for p in pts:
            store.insert(StoreEntry(p))
        for _ in range(200):
            probe = quantize([rng.random(), rng.random()], 10, rng.randrange(100))
            ranked = sorted(pts + [probe], key=key)
            at = ranked.index(probe)
            want_pred = ranked[at - 1].id if at > 0 else None
            want_succ = ranked[at + 1].id if at + 1 < len(ranked) else None
            got_pred = store.predecessor(probe)
            got_succ = store.successor(probe)
            assert (got_pred.point.id if got_pred else None) == want_pred
            assert (got_succ.point.id if got_succ else None) == want_succ


class TestCandidatePairSet:
    def test_empty_delta_no_change(self):
        cps = CandidatePairSet()
        pairs_apply(cps, AdjacencyDelta(frozenset(), frozenset()), lambda u, v: True, {})
        assert len(cps) == 0 and cps.min_pair() is None

    def test_refcount_semantics(self):
        cps = CandidatePairSet()
        points = {0: _p(0.1, 0), 1: _p(0.2, 1)}
        add = AdjacencyDelta(frozenset(), frozenset({(0, 1)}))
        pairs_apply(cps, add, lambda u, v: True, points)
        pairs_apply(cps, add, lambda u, v: True, points)
        assert cps.multiplicity(0, 1) == 2
        rem = AdjacencyDelta(frozenset({(0, 1)}), frozenset())
        pairs_apply(cps, rem, lambda u, v: True, points)
        assert cps.multiplicity(0, 1) == 1
        assert cps.min_pair() == (0, 1, sq_dist(points[0], points[1]))

    def test_underflow_fails_fast(self):
        cps = CandidatePairSet()
        with pytest.raises(RuntimeError):
            cps.remove(0, 1)

    def test_filter_applies(self):
        cps = CandidatePairSet()
        points = {0: _p(0.1, 0), 1: _p(0.2, 1)}
        delta = AdjacencyDelta(frozenset(), frozenset({(0, 1)}))
        pairs_apply(cps, delta, lambda u, v: False, points)
        assert len(cps) == 0

    def test_min_against_bruteforce_random_sequences(self):
        # pair-set minimum equals a full re-sort recomputation per ordering,
        # over 10^3 random update sequences of length 256
        rng = random.Random(11)
        fam = family_from_internal(1, 2, 10)
        selected = [fam.orderings[i] for i in (0, 3, 8, 11)]
        keys = [
            cmp_to_key(lambda u, v, o=o: compare_with_ids(o, fam, u, v))
            for o in selected
        ]
        for _ in range(1000):
            stores = [OrderedStore(fam, o) for o in selected]
            cps = CandidatePairSet()
            live = {}
            nid = 0
            for step in range(256):
                if live and rng.random() < 0.45:
                    pid = rng.choice(list(live))
                    del live[pid]
                    for st in stores:
                        pairs_apply(cps, st.delete(pid), lambda u, v: True, live)
                else:
                    p = quantize([rng.random()], 10, nid)
                    nid += 1
                    live[p.id] = p
                    for st in stores:
                        pairs_apply(cps, st.insert(StoreEntry(p)), lambda u, v: True, live)
                if step % 64 == 0 or step == 255:
                    want = _bruteforce_min(live, keys)
                    got = cps.min_pair()
                    if want is None:
                        assert got is None
                    else:
                        assert got[2] == want


def _bruteforce_min(live, keys):
    best = None
    pts = list(live.values())
    if len(pts) < 2:
        return None
    for key in keys:
        ranked = sorted(pts, key=key)
        for a, b in zip(ranked, ranked[1:]):
            sq = sq_dist(a, b)
            if best is None or sq < best:
                best = sq
    return best
