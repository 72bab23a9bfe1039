from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from colourpack.classic import (
    BoundedBestFit, best_fit, bounded_best_fit, first_fit, first_fit_decreasing, next_fit,
)
from colourpack.core import Bin, Instance, Item, make_items, validate_packing
from conftest import instance_strategy, sizes_strategy


def contents(p):
    return [[str(it.size) for it in b.contents] for b in p.bins if b.contents]


def test_next_fit_trace():
    assert contents(next_fit(make_items(["0.6", "0.5", "0.4"]))) == [["3/5"], ["1/2", "2/5"]]
    assert next_fit(make_items(["1", "1"])).bin_count == 2
    assert next_fit([]).bin_count == 0


def test_first_fit_trace():
    assert contents(first_fit(make_items(["0.6", "0.5", "0.4"]))) == [["3/5", "2/5"], ["1/2"]]
    assert first_fit(make_items(["0.5"] * 4)).bin_count == 2


def test_first_fit_eligibility_hook():
    eps = F(1, 5)
    bins = [Bin(0, make_items(["0.7"], start=10)), Bin(1, make_items(["0.5"], start=11))]
    item = Item(0, F(1, 4))
    p = first_fit([item], eligible=lambda b: b.free > 2 * eps, bins=bins)
    assert [it.id for it in p.bins[1].contents] == [11, 0]
    # the input bins are left alone
    assert len(bins[1].contents) == 1


def test_first_fit_decreasing():
    assert contents(first_fit_decreasing(make_items(["0.4", "0.6", "0.5"]))) == \
        contents(first_fit(make_items(["0.6", "0.5", "0.4"])))
    assert first_fit_decreasing(make_items(["0.3"] * 10)).bin_count == 4
    assert first_fit_decreasing([]).bin_count == 0


def test_bbf_trace():
    p = bounded_best_fit(make_items(["0.5", "0.6", "0.5", "0.4"]), k=2)
    assert contents(p) == [["1/2", "1/2"], ["3/5", "2/5"]]


def test_bbf_closes_fullest_even_if_new_bin_is_emptier():
    # open: 0.7 and 0.6; 0.5 fits neither, so the 0.7 bin closes
    p = bounded_best_fit(make_items(["0.7", "0.6", "0.5", "0.3"]), k=2)
    assert contents(p) == [["7/10"], ["3/5", "3/10"], ["1/2"]]


def test_bbf_tie_goes_to_lowest_id():
    p = bounded_best_fit(make_items(["0.5", "0.6", "0.1"]), k=3)
    # two open bins of fills 1/2 and 3/5: the fuller one wins
    assert contents(p)[1] == ["3/5", "1/10"]
    q = bounded_best_fit(make_items(["0.6", "0.6", "0.1"]), k=3)
    assert contents(q)[0] == ["3/5", "1/10"]


def test_bbf_rejects_too_many_preopened():
    with pytest.raises(ValueError):
        BoundedBestFit(1, [Bin(0), Bin(1)])
    with pytest.raises(ValueError):
        BoundedBestFit(0)


@given(st.lists(sizes_strategy(10), max_size=14))
def test_k1_is_next_fit(sizes):
    items = make_items(sizes)
    assert contents(bounded_best_fit(items, k=1)) == contents(next_fit(items))


@given(st.lists(sizes_strategy(10), max_size=14), st.integers(1, 3))
def test_bbf_never_exceeds_k_open_and_never_reopens(sizes, k):
    state = BoundedBestFit(k)
    closed_snapshot = {}
    for it in make_items(sizes):
        state.pack(it)
        assert len(state.open_bins) <= k
        for b in state.closed_bins:
            ids = [x.id for x in b.contents]
            assert closed_snapshot.setdefault(b.id, ids) == ids


@settings(max_examples=200)
@given(instance_strategy(max_n=12, max_m=3, max_den=10), st.integers(0, 2), st.randoms(use_true_random=False))
def test_bbf_replay_bound(inst, pre, rnd):
    """Replaying any valid x-bin packing in bin order uses at most k + x bins."""
    base = first_fit(rnd.sample(list(inst.items), len(inst.items)))
    x = base.bin_count
    extra = [Bin(100 + t, [Item(1000 + t, F(rnd.randint(1, 9), 10))]) for t in range(pre)]
    out = bounded_best_fit(base.item_order(), k=2, initial_open=extra)
    assert out.bin_count <= 2 + x


@given(instance_strategy(max_n=12, max_m=3))
def test_outputs_are_valid_and_deterministic(inst):
    for alg in (next_fit, first_fit, first_fit_decreasing, best_fit,
                lambda xs: bounded_best_fit(xs, 2)):
        p = alg(inst.items)
        assert validate_packing(p, inst).ok
        assert contents(p) == contents(alg(inst.items))


def test_best_fit_is_unbounded():
    p = best_fit(make_items(["0.6", "0.7", "0.8", "0.4", "0.3", "0.2"]))
    assert contents(p) == [["3/5", "2/5"], ["7/10", "3/10"], ["4/5", "1/5"]]
