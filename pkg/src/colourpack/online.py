"""Online coloured packing under a minimum item size eps.

All algorithms share one interface: ``reset()``, ``pack(item)`` returning a
:class:`Placement`, and ``snapshot()`` returning the current packing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .classic import BoundedBestFit
from .core import (
    ISOLATED, LEVEL, ONE, PLAIN, ZERO, Bin, BinFactory, Item, Packing,
    PreconditionError, Region, parse_rational,
)

MNF, MFF = "MNF", "MFF"


@dataclass(frozen=True)
class Placement:
    item: int
    bin: int
    level: int | None = None
    region: int | None = None
    isolated: bool = False

    def to_json(self) -> str:
        return json.dumps({"item": self.item, "bin": self.bin, "level": self.level,
                           "region": self.region, "isolated": self.isolated})


def write_trace(events: Iterable[Placement], fh):
    for e in events:
        fh.write(e.to_json() + "\n")


def read_trace(fh) -> list[Placement]:
    return [Placement(**json.loads(line)) for line in fh if line.strip()]


class OnlineAlgorithm:
    name = "online"

    def __init__(self):
        self.reset()

    def reset(self):
        raise NotImplementedError

    def pack(self, item: Item) -> Placement:
        raise NotImplementedError

    def snapshot(self) -> Packing:
        raise NotImplementedError

    @property
    def params(self) -> dict:
        return {}


def run_online(algorithm: OnlineAlgorithm, items: Iterable[Item]) -> tuple[Packing, list[Placement]]:
    algorithm.reset()
    events = [algorithm.pack(it) for it in items]
    return algorithm.snapshot(), events


# ---------------------------------------------------------------------------
# classical algorithms behind the online interface


class OnlineNextFit(OnlineAlgorithm):
    name = "nf"

    def reset(self):
        self.new_bin = BinFactory()
        self.bins: list[Bin] = []

    def pack(self, item):
        cur = self.bins[-1] if self.bins else None
        if cur is None or not cur.fits(item.size):
            if cur is not None:
                cur.open = False
            cur = self.new_bin()
            self.bins.append(cur)
        cur.add(item)
        return Placement(item.id, cur.id)

    def snapshot(self):
        return Packing([b.copy() for b in self.bins], self.name)


class OnlineFirstFit(OnlineAlgorithm):
    name = "ff"

    def reset(self):
        self.new_bin = BinFactory()
        self.bins: list[Bin] = []

    def pack(self, item):
        target = _first_fit_into(self.bins, item, self.new_bin)
        return Placement(item.id, target.id)

    def snapshot(self):
        return Packing([b.copy() for b in self.bins], self.name)


class OnlineBoundedBestFit(OnlineAlgorithm):
    name = "bbf"

    def __init__(self, k=2):
        self.k = k
        super().__init__()

    @property
    def params(self):
        return {"k": self.k}

    def reset(self):
        self.state = BoundedBestFit(self.k)

    def pack(self, item):
        return Placement(item.id, self.state.pack(item).id)

    def snapshot(self):
        return Packing([b.copy() for b in self.state.bins()], self.name, self.params)


def _first_fit_into(bins: list[Bin], item: Item, new_bin, kind=PLAIN) -> Bin:
    for b in bins:
        if b.fits(item.size):
            b.add(item)
            return b
    b = new_bin(kind=kind)
    b.add(item)
    bins.append(b)
    return b


# ---------------------------------------------------------------------------
# level bins (MNF / MFF) and the (3, 1.7) scheme


def check_power_of_two_epsilon(eps) -> tuple[Fraction, int]:
    eps = parse_rational(eps)
    if eps.numerator != 1 or eps.denominator < 2 or eps.denominator & (eps.denominator - 1):
        raise PreconditionError(f"epsilon must be 1/2^j with j >= 1, got {eps}")
    return eps, eps.denominator.bit_length() - 1


class LevelState:
    """Level-indexed region bins plus per-colour isolated BBF pools.

    A level-i bin has 2^(j-i) regions of capacity 2^i * eps. Each colour
    holds at most one region per level; ``regions[c][i]`` is (bin, index).
    """

    def __init__(self, eps, isolate=True):
        self.eps, self.j = check_power_of_two_epsilon(eps)
        self.isolate = isolate
        self.new_bin = BinFactory()
        self.bins: list[Bin] = []
        self.level_bins: dict[int, list[Bin]] = {i: [] for i in range(1, self.j + 1)}
        self.regions: dict[int, dict[int, tuple[Bin, int]]] = {}
        self.isolated: dict[int, BoundedBestFit] = {}
        self.w: dict[int, Fraction] = {}

    def new_tracked_bin(self, **kw) -> Bin:
        b = self.new_bin(**kw)
        self.bins.append(b)
        return b

    def region_capacity(self, level) -> Fraction:
        return self.eps * 2 ** level

    def colour_level(self, c) -> int:
        """Highest level holding colour c (0 if none)."""
        return max(self.regions.get(c, {0: None}))

    def _claim_region(self, level, colour) -> tuple[Bin, int]:
        pool = self.level_bins[level]
        for b in pool:
            for k, r in enumerate(b.regions):
                if r.colour is None and not r.items:
                    r.colour = colour
                    return b, k
        cap = self.region_capacity(level)
        count = int(ONE / cap)
        b = self.new_tracked_bin(kind=LEVEL, level=level, regions=[Region(cap) for _ in range(count)])
        pool.append(b)
        b.regions[0].colour = colour
        return b, 0

    def _place(self, b: Bin, k: int, item: Item, level: int) -> Placement:
        r = b.regions[k]
        r.used += item.size
        r.items.append(item.id)
        b.add(item)
        self.regions.setdefault(item.colour, {})[level] = (b, k)
        if all(reg.items for reg in b.regions):
            b.open = False
        return Placement(item.id, b.id, level, k, False)

    def unused_region_bins(self) -> list[Bin]:
        return [b for b in self.bins if b.kind == LEVEL and any(not r.items for r in b.regions)]

    def snapshot(self, name="level", params=None) -> Packing:
        return Packing([b.copy() for b in sorted(self.bins, key=lambda b: b.id)], name,
                       dict(params or {}))


def _check_online_item(item: Item, eps: Fraction):
    if item.size < eps:
        raise PreconditionError(f"item {item.id} below epsilon: {item.size} < {eps}")
    if item.size > ONE:
        raise PreconditionError(f"item {item.id} larger than a bin")


def mnf_pack(state: LevelState, item: Item, mode: str = MNF) -> Placement:
    """Region placement for a non-isolated colour.

    MNF tries only the colour's highest-level region, MFF tries all of its
    regions from the lowest level up. Otherwise the item opens a region at
    the lowest level above the colour's highest one whose capacity holds it
    (any level from 1 for a colour's first item).
    """
    _check_online_item(item, state.eps)
    c = item.colour
    if c in state.isolated:
        raise PreconditionError(f"colour {c} is isolated")
    own = state.regions.get(c, {})
    if own:
        levels = [max(own)] if mode == MNF else sorted(own)
        for lvl in levels:
            b, k = own[lvl]
            if b.regions[k].fits(item.size):
                return state._place(b, k, item, lvl)
        lowest = max(own) + 1
    else:
        lowest = 1
    target = None
    for lvl in range(lowest, state.j + 1):
        if state.region_capacity(lvl) >= item.size:
            target = lvl
            break
    if target is None:
        # only reachable without isolation: the colour already sits at level j
        target = state.j
    b, k = state._claim_region(target, c)
    return state._place(b, k, item, target)


def level_online_pack(state: LevelState, item: Item, mode: str = MNF) -> Placement:
    """Region packing until a colour reaches level j, then per-colour BBF (k=2)."""
    _check_online_item(item, state.eps)
    c = item.colour
    if c in state.isolated:
        b = state.isolated[c].pack(item)
        return Placement(item.id, b.id, None, None, True)
    event = mnf_pack(state, item, mode)
    if state.isolate and state.colour_level(c) == state.j:
        b, _ = state.regions[c][state.j]
        state.level_bins[state.j].remove(b)
        b.kind, b.level, b.regions = ISOLATED, None, None
        state.isolated[c] = BoundedBestFit(2, [b], new_bin=state.new_tracked_bin, kind=ISOLATED)
        event = Placement(event.item, event.bin, event.level, event.region, True)
    return event


class LevelScheme(OnlineAlgorithm):
    """The (3, 1.7) online scheme; ``isolate=False`` gives plain region packing."""

    def __init__(self, eps, mode=MNF, isolate=True):
        self.eps = parse_rational(eps)
        self.mode = mode
        self.isolate = isolate
        check_power_of_two_epsilon(self.eps)
        super().__init__()

    @property
    def name(self):
        if self.isolate:
            return "level17" if self.mode == MNF else "level17_mff"
        return self.mode.lower()

    @property
    def params(self):
        return {"epsilon": self.eps, "mode": self.mode}

    def reset(self):
        self.state = LevelState(self.eps, self.isolate)

    def pack(self, item):
        if self.isolate:
            return level_online_pack(self.state, item, self.mode)
        return mnf_pack(self.state, item, self.mode)

    def snapshot(self):
        return self.state.snapshot(self.name, self.params)


def full_level_bins_average_fill(packing: Packing) -> Fraction | None:
    """Average fill of level bins whose regions are all in use (None if none)."""
    full = [b for b in packing.bins
            if b.kind == LEVEL and b.regions and all(r.items for r in b.regions)]
    if not full:
        return None
    return sum((b.fill for b in full), ZERO) / len(full)


# ---------------------------------------------------------------------------
# the (2+eps, 1.7) threshold scheme


@dataclass
class ThresholdState:
    eps: Fraction
    g: Fraction = ZERO
    new_bin: BinFactory = field(default_factory=BinFactory)
    shared: list[Bin] = field(default_factory=list)
    isolated: dict[int, list[Bin]] = field(default_factory=dict)
    w: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.eps = parse_rational(self.eps)
        if not ZERO < self.eps <= ONE:
            raise PreconditionError(f"epsilon must lie in (0, 1], got {self.eps}")
        self.g = 1 / self.eps

    def all_bins(self) -> list[Bin]:
        bins = list(self.shared)
        for pool in self.isolated.values():
            bins.extend(pool)
        return sorted(bins, key=lambda b: b.id)


def threshold_online_pack(state: ThresholdState, item: Item) -> Placement:
    """Shared first fit while w(c) <= 1/eps (checked before adding), then isolated."""
    _check_online_item(item, state.eps)
    c = item.colour
    w = state.w.get(c, ZERO)
    if w <= state.g:
        b = _first_fit_into(state.shared, item, state.new_bin)
        state.w[c] = w + item.size
        return Placement(item.id, b.id)
    pool = state.isolated.setdefault(c, [])
    b = _first_fit_into(pool, item, state.new_bin, ISOLATED)
    return Placement(item.id, b.id, isolated=True)


class ThresholdScheme(OnlineAlgorithm):
    name = "threshold"

    def __init__(self, eps):
        self.eps = parse_rational(eps)
        super().__init__()

    @property
    def params(self):
        return {"epsilon": self.eps}

    def reset(self):
        self.state = ThresholdState(self.eps)

    def pack(self, item):
        return threshold_online_pack(self.state, item)

    def snapshot(self):
        return Packing([b.copy() for b in self.state.all_bins()], self.name, self.params)
