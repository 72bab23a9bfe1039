"""Offline schemes: VL grouping with colour-aware small items, and VL + BBF replay."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .classic import bounded_best_fit, first_fit
from .core import (
    ONE, ZERO, Bin, BinFactory, BudgetExceeded, Instance, Item, Packing,
    PreconditionError, ceil_fraction, parse_rational,
)

DEFAULT_BUDGET = 1_000_000


@dataclass
class RoundedGroup:
    original_items: list[Item]
    rounded_size: Fraction
    direction: str  # "up" or "down"


def check_epsilon(eps) -> Fraction:
    eps = parse_rational(eps)
    if not (ZERO < eps <= Fraction(1, 2)) or (1 / eps).denominator != 1:
        raise PreconditionError(f"epsilon must be 1/x for an integer x >= 2, got {eps}")
    return eps


def round_up_groups(large: Sequence[Item], eps: Fraction) -> list[RoundedGroup]:
    """Linear grouping: K = 1/eps^2 groups of at most ceil(n eps^2) items each."""
    ordered = sorted(large, key=lambda it: (it.size, it.id))
    if not ordered:
        return []
    size = max(1, ceil_fraction(len(ordered) * eps * eps))
    groups = []
    for start in range(0, len(ordered), size):
        chunk = ordered[start:start + size]
        groups.append(RoundedGroup(chunk, max(it.size for it in chunk), "up"))
    return groups


# ---------------------------------------------------------------------------
# exact solve of a rounded instance


def min_bins_by_configuration(sizes: Sequence[Fraction], counts: Sequence[int],
                              budget: int = DEFAULT_BUDGET) -> list[tuple[int, ...]]:
    """Optimal packing of ``counts[k]`` copies of ``sizes[k]``.

    Depth-first over bin configurations. Every bin is built around the
    largest remaining size and is maximal (nothing remaining still fits),
    which loses no optimum. Results are memoised on the remaining counts.
    Returns one configuration (a count vector) per bin.
    """
    order = sorted(range(len(sizes)), key=lambda k: -sizes[k])
    sz = [sizes[k] for k in order]
    start = tuple(counts[k] for k in order)
    nodes = [0]
    memo: dict[tuple, tuple[int, tuple]] = {}

    def configs(rem, lead):
        cfg = [0] * len(sz)
        cfg[lead] = 1

        def rec(k, cap):
            if k == len(sz):
                # maximal: nothing left over still fits
                if all(rem[t] == cfg[t] or sz[t] > cap for t in range(len(sz))):
                    yield tuple(cfg)
                return
            most = min(rem[k] - cfg[k], int(cap // sz[k]))
            for take in range(most, -1, -1):
                cfg[k] += take
                yield from rec(k + 1, cap - take * sz[k])
                cfg[k] -= take

        yield from rec(0, ONE - sz[lead])

    def solve(rem):
        if not any(rem):
            return 0, ()
        if rem in memo:
            return memo[rem]
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded(f"rounded solve exceeded {budget} nodes")
        lower = ceil_fraction(sum((sz[k] * rem[k] for k in range(len(sz))), ZERO))
        lead = next(k for k in range(len(sz)) if rem[k])
        best = None
        for cfg in configs(rem, lead):
            sub = tuple(r - c for r, c in zip(rem, cfg))
            cnt, plan = solve(sub)
            if best is None or cnt + 1 < best[0]:
                best = (cnt + 1, (cfg,) + plan)
                if best[0] <= lower:
                    break
        memo[rem] = best
        return best

    _, plan = solve(start)
    inverse = [0] * len(sz)
    for pos, k in enumerate(order):
        inverse[k] = pos
    return [tuple(cfg[inverse[k]] for k in range(len(sizes))) for cfg in plan]


# ---------------------------------------------------------------------------
# VL


def _vl_large(large: Sequence[Item], eps: Fraction, new_bin, budget) -> list[Bin]:
    groups = round_up_groups(large, eps)
    classes = sorted({g.rounded_size for g in groups})
    index = {s: k for k, s in enumerate(classes)}
    pools: list[list[Item]] = [[] for _ in classes]
    for g in groups:
        pools[index[g.rounded_size]].extend(g.original_items)
    counts = [len(p) for p in pools]
    plan = min_bins_by_configuration(classes, counts, budget)
    bins = []
    for cfg in plan:
        b = new_bin()
        for k, take in enumerate(cfg):
            for _ in range(take):
                b.add(pools[k].pop())
        bins.append(b)
    return bins


def split_at(items: Iterable[Item], threshold) -> tuple[list[Item], list[Item]]:
    """(large, small) with large meaning size >= threshold."""
    large, small = [], []
    for it in items:
        (large if it.size >= threshold else small).append(it)
    return large, small


def vl_pack(items: Iterable[Item], eps, budget: int = DEFAULT_BUDGET) -> Packing:
    """Grouping-and-rounding scheme, colour-blind.

    Large items (>= eps) are rounded up per group and packed optimally;
    small items then go into the residual space by first fit.
    """
    eps = check_epsilon(eps)
    large, small = split_at(items, eps)
    new_bin = BinFactory()
    bins = _vl_large(large, eps, new_bin, budget)
    p = first_fit(small, bins=bins)
    p.algorithm, p.params = "vl", {"epsilon": eps}
    return p


def pack_small_by_colour(packing: Packing, small_items: Iterable[Item], eps) -> Packing:
    """Add small items colour by colour with first fit.

    For each colour the bins that may receive it are fixed when its pass
    starts: those with more than 2*eps free, plus any bins opened during the
    pass. Fixing the set keeps the at-least-eps-per-bin property that the
    colour-span bound relies on.
    """
    eps = parse_rational(eps)
    small = list(small_items)
    for it in small:
        if it.size >= eps:
            raise PreconditionError(f"item {it.id} of size {it.size} is not small (< {eps})")
    bins = [b.copy() for b in packing.bins]
    for c in sorted({it.colour for it in small}):
        allowed = {b.id for b in bins if b.free > 2 * eps}
        known = {b.id for b in bins}
        group = [it for it in small if it.colour == c]
        bins = first_fit(group, eligible=lambda b: b.id in allowed or b.id not in known,
                         bins=bins).bins
    return Packing(bins, packing.algorithm, dict(packing.params))


def offline_1plus_eps(instance: Instance, eps, budget: int = DEFAULT_BUDGET) -> Packing:
    """(1+eps, O(1/eps)) scheme: VL on all large items, small items by colour."""
    eps = check_epsilon(eps)
    large, small = split_at(instance.items, eps)
    bins = _vl_large(large, eps, BinFactory(), budget)
    p = pack_small_by_colour(Packing(bins), small, eps)
    p.algorithm, p.params = "vl1eps", {"epsilon": eps}
    return p


def offline_17_1plus_eps(instance: Instance, eps, budget: int = DEFAULT_BUDGET) -> Packing:
    """(1.7, 1+eps) scheme: VL per colour, then replay all bins through BBF, k=2."""
    eps = check_epsilon(eps)
    order: list[Item] = []
    for c in sorted(instance.colours_present()):
        per_colour = vl_pack(instance.of_colour(c), eps, budget)
        order.extend(per_colour.item_order())
    p = bounded_best_fit(order, k=2)
    p.algorithm, p.params = "off17", {"epsilon": eps}
    return p


def colour_ordered_bbf(instance: Instance, k: int = 2) -> Packing:
    """Bounded best fit over the items grouped by colour: a (1.7, 1.7) packing."""
    order = [it for c in sorted(instance.colours_present()) for it in instance.of_colour(c)]
    p = bounded_best_fit(order, k=k)
    p.algorithm = "bbf_by_colour"
    return p


def rounded_up_optimum(large: Sequence[Item], eps, budget: int = DEFAULT_BUDGET) -> int:
    """Optimal bin count of the rounded-up large items (for the domination check)."""
    eps = parse_rational(eps)
    groups = round_up_groups(large, eps)
    classes = sorted({g.rounded_size for g in groups})
    counts = [sum(len(g.original_items) for g in groups if g.rounded_size == s) for s in classes]
    return len(min_bins_by_configuration(classes, counts, budget))
