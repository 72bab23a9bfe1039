import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from colourpack.classic import bounded_best_fit
from colourpack.core import (
    Bin, Instance, Item, Packing, PreconditionError, bins_spanned, make_items, validate_packing,
)
from colourpack.instances import gen_random, gen_theorem1
from colourpack.offline import (
    BudgetExceeded, check_epsilon, colour_ordered_bbf, min_bins_by_configuration,
    offline_1plus_eps, offline_17_1plus_eps, pack_small_by_colour, round_up_groups,
    rounded_up_optimum, split_at, vl_pack,
)
from colourpack.oracle import exact_opt
from conftest import instance_strategy

SIZES = ["1/2", "3/5", "7/10", "1/3", "2/5", "3/4", "1/4", "1/5", "1/8", "1/10", "1/16"]


@pytest.mark.parametrize("eps", ["2/5", "3/8", "0", "3/4", "1"])
def test_epsilon_validation(eps):
    with pytest.raises(PreconditionError):
        check_epsilon(eps)


def test_split_boundary_is_large():
    large, small = split_at(make_items(["1/4", "1/5"]), F(1, 4))
    assert [it.size for it in large] == [F(1, 4)] and [it.size for it in small] == [F(1, 5)]


def test_round_up_groups():
    items = make_items(["0.3", "0.5", "0.4", "0.6", "0.35"])
    groups = round_up_groups(items, F(1, 2))
    # ceil(5/4) = 2 items per group, increasing order
    assert [[str(it.size) for it in g.original_items] for g in groups] == \
        [["3/10", "7/20"], ["2/5", "1/2"], ["3/5"]]
    assert [g.rounded_size for g in groups] == [F(7, 20), F(1, 2), F(3, 5)]
    assert all(g.direction == "up" for g in groups)


def test_configuration_solver():
    plan = min_bins_by_configuration([F(1, 2), F(1, 3)], [3, 3])
    assert len(plan) == 3
    assert [sum(col) for col in zip(*plan)] == [3, 3]
    assert all(a * F(1, 2) + b * F(1, 3) <= 1 for a, b in plan)
    with pytest.raises(BudgetExceeded):
        min_bins_by_configuration([F(1, 7), F(1, 5), F(1, 3)], [20, 20, 20], budget=3)


def test_vl_all_small_is_first_fit():
    eps = F(1, 4)
    items = make_items(["1/5", "1/6", "1/5", "1/8", "1/5", "1/6", "1/5"])
    p = vl_pack(items, eps)
    total = sum(it.size for it in items)
    assert p.bin_count <= math.ceil(total / (1 - eps)) + 1


def test_vl_single_unit_item():
    assert vl_pack(make_items(["1"]), F(1, 2)).bin_count == 1


def test_vl_three_large():
    assert vl_pack(make_items(["0.6"] * 3), F(1, 2)).bin_count == 3


@settings(max_examples=60, deadline=None)
@given(instance_strategy(max_n=10, max_m=1, max_den=10), st.sampled_from([F(1, 2), F(1, 4)]))
def test_vl_guarantee(inst, eps):
    p = vl_pack(inst.items, eps)
    assert validate_packing(p, inst).ok
    assert p.bin_count <= (1 + 2 * eps) * exact_opt(inst.items) + 1


def test_pack_small_no_items_is_identity():
    p = Packing([Bin(0, make_items(["0.7"]))])
    q = pack_small_by_colour(p, [], F(1, 8))
    assert [[it.id for it in b.contents] for b in q.bins] == [[0]]


def test_pack_small_opens_one_bin():
    eps = F(1, 8)
    full = [Bin(k, [Item(k, F(4, 5))]) for k in range(3)]
    small = [Item(10 + k, F(1, 10), 1) for k in range(5)]
    q = pack_small_by_colour(Packing(full), small, eps)
    assert len(q.bins) == 4
    assert [it.id for it in q.bins[3].contents] == [10, 11, 12, 13, 14]


def test_pack_small_two_colours_share_bin():
    eps = F(1, 16)
    host = Bin(0, [Item(0, F(1, 2), 1)])
    small = [Item(1 + k, eps, 1) for k in range(3)] + [Item(4 + k, eps, 2) for k in range(3)]
    small = [Item(it.id, F(1, 17), it.colour) for it in small]  # strictly below eps
    q = pack_small_by_colour(Packing([host]), small, eps)
    assert len(q.bins) == 1 and len(q.bins[0].contents) == 7


def test_pack_small_rejects_large():
    with pytest.raises(PreconditionError):
        pack_small_by_colour(Packing([]), [Item(0, F(1, 8))], F(1, 8))


def test_pack_small_skips_tight_bins():
    eps = F(1, 8)
    # 3/4 full leaves 1/4 = 2 eps free: not more than 2 eps, so not eligible
    host = Bin(0, [Item(0, F(3, 4))])
    q = pack_small_by_colour(Packing([host]), [Item(1, F(1, 10), 2)], eps)
    assert [len(b.contents) for b in q.bins] == [1, 1]


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["1/10", "1/12", "1/9", "1/20"]), st.integers(1, 3)),
                max_size=20),
       st.lists(st.sampled_from(["1/2", "3/5", "7/10", "4/5", "1/3"]), max_size=4))
def test_pack_small_colour_property(small, hosts):
    """Per colour, all but one receiving bin hold at least eps of it."""
    eps = F(1, 8)
    bins = [Bin(k, [Item(100 + k, F(s), 4)]) for k, s in enumerate(hosts)]
    items = [Item(k, F(s), c) for k, (s, c) in enumerate(small)]
    q = pack_small_by_colour(Packing(bins), items, eps)
    for c in {it.colour for it in items}:
        weights = [sum(it.size for it in b.contents if it.colour == c) for b in q.bins]
        light = [w for w in weights if 0 < w < eps]
        assert len(light) <= 1


def test_1plus_eps_monochrome():
    inst = Instance.from_sizes(["1/2", "3/5", "1/3", "1/5", "1/10", "2/5"])
    p = offline_1plus_eps(inst, F(1, 4))
    assert bins_spanned(p, 1) == p.bin_count


def test_1plus_eps_theorem1_family():
    eps = F(1, 8)
    inst = gen_theorem1(8, eps)
    p = offline_1plus_eps(inst, eps)
    assert validate_packing(p, inst).ok
    assert p.bin_count <= (1 + 2 * eps) * 8 + 2
    assert bins_spanned(p, 9) <= exact_opt(inst.of_colour(9)) / eps + 2


def test_1plus_eps_only_small_items():
    eps = F(1, 4)
    items = [Item(k, F(1, 5) if k % 2 else F(1, 30), k % 3 + 1) for k in range(6)]
    inst = Instance(tuple(items), 3)
    p = offline_1plus_eps(inst, eps)
    for c in (1, 2, 3):
        assert bins_spanned(p, c) <= 2


def test_off17_single_colour_replay_bound():
    inst = Instance.from_sizes(["1/2", "3/5", "1/3", "1/5", "1/10", "2/5", "7/10", "1/4"])
    eps = F(1, 4)
    assert offline_17_1plus_eps(inst, eps).bin_count <= vl_pack(inst.items, eps).bin_count + 2


def test_off17_merges_across_colours():
    inst = Instance.from_sizes(["2/5", "3/5"], [1, 2])
    p = offline_17_1plus_eps(inst, F(1, 4))
    assert p.bin_count == 1 < 2


@settings(max_examples=60, deadline=None)
@given(instance_strategy(max_n=10, max_m=3, max_den=10))
def test_off17_colour_bound(inst):
    eps = F(1, 4)
    p = offline_17_1plus_eps(inst, eps)
    assert validate_packing(p, inst).ok
    for c in inst.colours_present():
        assert bins_spanned(p, c) <= (1 + 2 * eps) * exact_opt(inst.of_colour(c)) + 3


@settings(max_examples=60, deadline=None)
@given(instance_strategy(max_n=10, max_m=3, max_den=10))
def test_colour_ordered_bbf(inst):
    p = colour_ordered_bbf(inst)
    assert validate_packing(p, inst).ok
    for c in inst.colours_present():
        assert bins_spanned(p, c) <= F(17, 10) * exact_opt(inst.of_colour(c)) + 3


@settings(max_examples=60, deadline=None)
@given(instance_strategy(max_n=10, max_m=2, max_den=10))
def test_replay_adds_at_most_k(inst):
    p = offline_1plus_eps(inst, F(1, 4))
    assert bounded_best_fit(p.item_order(), 2).bin_count <= p.bin_count + 2


@pytest.mark.parametrize("seed", range(40))
def test_rounded_up_domination(seed):
    inst = gen_random(12, 1, ("discrete", SIZES[:7]), seed)
    for eps in (F(1, 2), F(1, 4)):
        large, _ = split_at(inst.items, eps)
        if large:
            assert rounded_up_optimum(large, eps) <= (1 + eps) * exact_opt(large)
