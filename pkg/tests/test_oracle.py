import json
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from colourpack.classic import first_fit_decreasing
from colourpack.core import Instance, make_items, weight_lower_bound
from colourpack.instances import gen_sylvester, gen_theorem1
from colourpack.oracle import (
    DP_BITMASK, EXHAUSTIVE, OracleLimitError, OracleResult, cached_solve, enumerate_packings,
    exact_opt, exact_opt_beta, min_colour_span, solve,
)
from conftest import instance_strategy
from oracles import brute_opt, brute_opt_beta


def test_pairs():
    assert exact_opt(make_items(["1/2"] * 4)) == 2


def test_theorem1_opt():
    assert exact_opt(gen_theorem1(4, F(1, 8)).items) == 4


def test_two_colour_sylvester_opt():
    # colours with sizes 1/2 + 1/100 and 1/3 + 1/100, six items each
    inst = gen_sylvester(1, 6, F(1, 100))
    assert exact_opt(inst.items) == 6 == brute_opt(inst.items[:4] + inst.items[6:10]) + 2


def test_limit():
    with pytest.raises(OracleLimitError):
        exact_opt(make_items(["1/2"] * 5), limit_n=4)
    with pytest.raises(OracleLimitError):
        exact_opt_beta(Instance.from_sizes(["1/2"] * 5), 2, limit_n=4)


def test_beta_infinite_equals_opt():
    inst = gen_theorem1(2, F(1, 8))
    assert exact_opt_beta(inst, math.inf) == exact_opt(inst.items)


def test_beta_one_on_theorem1():
    inst = gen_theorem1(2, F(1, 8))
    assert exact_opt(inst.items) == 2
    assert exact_opt_beta(inst, 1) == 3


def test_beta_infeasible_is_none():
    # two colours of 1/2-items that must share bins to stay within one bin each
    inst = Instance.from_sizes(["1/2", "1/2", "1/2", "1/2"], [1, 1, 2, 2])
    assert exact_opt_beta(inst, F(1, 2)) is None


@settings(max_examples=60, deadline=None)
@given(instance_strategy(max_n=7, max_m=2, max_den=8))
def test_exact_opt_matches_partition_enumeration(inst):
    opt = exact_opt(inst.items)
    assert opt == brute_opt(inst.items)
    assert weight_lower_bound(inst.items) <= opt <= first_fit_decreasing(inst.items).bin_count


@settings(max_examples=40, deadline=None)
@given(instance_strategy(max_n=7, max_m=2, max_den=6), st.sampled_from([F(1), F(3, 2), F(2)]))
def test_exact_opt_beta_matches_partition_enumeration(inst, beta):
    assert exact_opt_beta(inst, beta) == brute_opt_beta(inst.items, beta)


@settings(max_examples=40, deadline=None)
@given(instance_strategy(max_n=8, max_m=2, max_den=6))
def test_opt_beta_monotone(inst):
    vals = [exact_opt_beta(inst, b) for b in (F(1), F(3, 2), F(2), F(3))]
    vals = [math.inf if v is None else v for v in vals]
    assert vals == sorted(vals, reverse=True)
    assert vals[-1] >= exact_opt(inst.items)


def test_monochrome_beta_is_opt():
    inst = Instance.from_sizes(["3/5", "2/5", "1/2", "1/3", "1/4"])
    for beta in (1, 2, 5):
        assert exact_opt_beta(inst, beta) == exact_opt(inst.items)


def test_enumerate_packings_counts():
    # three distinct items that pairwise fit: 5 set partitions
    items = make_items(["1/4", "1/3", "1/5"])
    assert len(list(enumerate_packings(items))) == 5
    # identical items: every partition of the 3-multiset shows up
    shapes = {tuple(sorted(len(b) for b in p)) for p in enumerate_packings(make_items(["1/4"] * 3))}
    assert shapes == {(3,), (1, 2), (1, 1, 1)}
    assert len(list(enumerate_packings(items, max_bins=1))) == 1


def test_min_colour_span():
    inst = gen_theorem1(2, F(1, 8))
    assert min_colour_span(inst.items, 3, 2) == 2
    assert min_colour_span(inst.items, 3, 3) == 1


def test_solve_and_json():
    inst = Instance.from_sizes(["1/2", "1/2", "1/3"], [1, 1, 2])
    res = solve(inst)
    assert res.method == DP_BITMASK and res.opt_beta is None
    assert res.per_colour_opt == {1: 1, 2: 1}
    res2 = solve(inst, beta="2")
    assert res2.method == EXHAUSTIVE and res2.opt_beta == (F(2), 2)
    assert OracleResult.from_json(json.loads(json.dumps(res2.to_json()))) == res2


def test_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("COLOURPACK_ORACLE_CACHE", str(tmp_path))
    inst = Instance.from_sizes(["1/2", "1/3"])
    first = cached_solve(inst, "3/2")
    files = list(tmp_path.iterdir())
    assert len(files) == 1 and inst.digest() in files[0].name
    assert cached_solve(inst, "3/2") == first
