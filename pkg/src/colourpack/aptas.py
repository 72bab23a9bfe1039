"""Asymptotic scheme for bin stretch under a colour-stretch cap beta.

Large items (>= eps^2) are grouped per colour and rounded down; packings of
the rounded items, with a set of small-item colours attached to every bin,
are enumerated by a budgeted depth-first search. Each surviving candidate is
realised with original sizes (every group fills the slots of the group
before it), small items are placed by a max-flow solution of the placement
LP, and leftovers plus the largest group of each colour go to new bins by
first fit.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    ONE, ZERO, Bin, BinFactory, BudgetExceeded, Instance, Item, Packing,
    PreconditionError, ceil_fraction, parse_rational,
)
from .offline import RoundedGroup, split_at
from .oracle import OracleLimitError, exact_opt

DEFAULT_MAX_CONFIGS = 200_000
DEFAULT_MAX_NODES = 1_000_000


class EmptyCandidates(PreconditionError):
    """No labelled packing passes the colour-stretch filter."""


@dataclass(frozen=True)
class SizeClass:
    colour: int
    size: Fraction


@dataclass(frozen=True)
class LabelledConfiguration:
    counts: tuple[int, ...]
    small_colours: frozenset
    slack: Fraction

    @property
    def is_empty(self) -> bool:
        return not any(self.counts)


@dataclass
class LpsProblem:
    bins: list[tuple[Fraction, frozenset]]
    supplies: dict[int, Fraction]


@dataclass
class Candidate:
    """A labelled packing of the rounded large items, one config per bin."""

    configs: list[LabelledConfiguration]
    classes: list[SizeClass]

    def spans(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for cfg in self.configs:
            for c in _config_colours(cfg, self.classes):
                out[c] = out.get(c, 0) + 1
        return out


def _config_colours(cfg: LabelledConfiguration, classes) -> set[int]:
    cols = {classes[k].colour for k, t in enumerate(cfg.counts) if t}
    return cols | set(cfg.small_colours)


# ---------------------------------------------------------------------------
# steps 2-4


def split_small_large(items, eps) -> tuple[list[Item], list[Item]]:
    eps = parse_rational(eps)
    if not ZERO < eps < ONE:
        raise PreconditionError(f"eps must lie in (0, 1), got {eps}")
    if isinstance(items, Instance):
        items = items.items
    return split_at(items, eps * eps)


def group_round_down(large: Iterable[Item], eps) -> tuple[dict[int, list[RoundedGroup]], list[Item]]:
    """Per colour: sort decreasing, cut into at most M = ceil(1/eps^3) groups,
    round each group down to its smallest size.

    Groups hold ceil(n_c / M) items (the last may hold fewer), which keeps the
    group count within M. Returns the groups and Q, the union of every
    colour's first (largest) group.
    """
    eps = parse_rational(eps)
    M = math.ceil(1 / eps ** 3)
    by_colour: dict[int, list[Item]] = {}
    for it in large:
        by_colour.setdefault(it.colour, []).append(it)
    groups: dict[int, list[RoundedGroup]] = {}
    q: list[Item] = []
    for c in sorted(by_colour):
        ordered = sorted(by_colour[c], key=lambda it: (-it.size, it.id))
        size = max(1, -(-len(ordered) // M))
        gs = []
        for start in range(0, len(ordered), size):
            chunk = ordered[start:start + size]
            gs.append(RoundedGroup(chunk, min(it.size for it in chunk), "down"))
        groups[c] = gs
        q.extend(gs[0].original_items)
    return groups, q


def enumerate_configurations(class_sizes: Sequence[Fraction], eps, m: int,
                             max_counts: Sequence[int] | None = None,
                             ceiling: int = DEFAULT_MAX_CONFIGS,
                             colours: Iterable[int] | None = None) -> list[LabelledConfiguration]:
    """All multisets of classes fitting in one bin, crossed with colour subsets.

    At most floor(1/eps^2) large items fit per bin. ``colours`` restricts the
    label subsets (default: 1..m).
    """
    eps = parse_rational(eps)
    per_bin = math.floor(1 / (eps * eps))
    sizes = list(class_sizes)
    caps = list(max_counts) if max_counts is not None else [per_bin] * len(sizes)
    colours = sorted(colours) if colours is not None else list(range(1, m + 1))
    labels = [frozenset(s) for r in range(len(colours) + 1)
              for s in itertools.combinations(colours, r)]
    multisets = []
    counts = [0] * len(sizes)

    def rec(k, room, left):
        if k == len(sizes):
            multisets.append((tuple(counts), room))
            if len(multisets) * len(labels) > ceiling:
                raise BudgetExceeded(f"more than {ceiling} labelled configurations")
            return
        most = min(caps[k], left, int(room // sizes[k]))
        for t in range(most + 1):
            counts[k] = t
            rec(k + 1, room - t * sizes[k], left - t)
        counts[k] = 0

    rec(0, ONE, per_bin)
    return [LabelledConfiguration(cnt, lab, room) for cnt, room in multisets for lab in labels]


# ---------------------------------------------------------------------------
# step 5: search


def search_packings(configs: Sequence[LabelledConfiguration], classes: Sequence[SizeClass],
                    counts: Sequence[int], beta, colour_opts: dict[int, int],
                    small_supply: dict[int, Fraction] | None = None,
                    max_nodes: int = DEFAULT_MAX_NODES, bound=None):
    """Yield every labelled packing of the rounded items with colour stretch <= beta.

    Bins are generated in a canonical order (nondecreasing leading class,
    then nondecreasing configuration index) so each multiset of
    configurations appears once. Bins with no large items (label only) are
    chosen last, at most ceil(supply) of them per label. ``bound()`` may
    return a bin count; branches using more bins are cut.
    """
    beta = parse_rational(beta) if not isinstance(beta, float) else beta
    small_supply = small_supply or {}
    colours = sorted(set(colour_opts) | {cl.colour for cl in classes} | set(small_supply))
    limit = {c: math.floor(beta * colour_opts.get(c, 1)) if not math.isinf(beta) else 10 ** 9
             for c in colours}
    small_cols = {c for c, s in small_supply.items() if s > 0}
    usable = [cfg for cfg in configs if cfg.small_colours <= small_cols]
    by_lead: dict[int, list[int]] = {}
    label_only: list[int] = []
    for idx, cfg in enumerate(usable):
        if cfg.is_empty:
            if cfg.small_colours:
                label_only.append(idx)
            continue
        lead = next(k for k, t in enumerate(cfg.counts) if t)
        by_lead.setdefault(lead, []).append(idx)
    for lead in by_lead:
        by_lead[lead].sort(key=lambda i: (usable[i].slack, -len(usable[i].small_colours)))
        # position inside the sorted list is the canonical index
    label_caps = {idx: ceil_fraction(sum((small_supply[c] for c in usable[idx].small_colours), ZERO))
                  for idx in label_only}

    span = {c: 0 for c in colours}
    chosen: list[int] = []
    nodes = [0]

    def over_bound(extra=0):
        if bound is None:
            return False
        b = bound()
        return b is not None and len(chosen) + extra > b

    def tick():
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise BudgetExceeded(f"search exceeded {max_nodes} nodes")

    def push(idx) -> bool:
        cols = _config_colours(usable[idx], classes)
        if any(span[c] + 1 > limit[c] for c in cols):
            return False
        for c in cols:
            span[c] += 1
        chosen.append(idx)
        return True

    def pop():
        idx = chosen.pop()
        for c in _config_colours(usable[idx], classes):
            span[c] -= 1

    def labels(pos):
        if over_bound():
            return
        if pos == len(label_only):
            yield Candidate([usable[i] for i in chosen], list(classes))
            return
        idx = label_only[pos]
        pushed = 0
        yield from labels(pos + 1)
        while pushed < label_caps[idx]:
            tick()
            if over_bound(1) or not push(idx):
                break
            pushed += 1
            yield from labels(pos + 1)
        for _ in range(pushed):
            pop()

    def rec(rem, prev_lead, prev_pos):
        tick()
        if not any(rem):
            yield from labels(0)
            return
        if over_bound(1):
            return
        lead = next(k for k, t in enumerate(rem) if t)
        order = by_lead.get(lead, [])
        start = prev_pos if lead == prev_lead else 0
        for pos in range(start, len(order)):
            idx = order[pos]
            cfg = usable[idx]
            if any(t > r for t, r in zip(cfg.counts, rem)):
                continue
            if not push(idx):
                continue
            sub = tuple(r - t for r, t in zip(rem, cfg.counts))
            yield from rec(sub, lead, pos)
            pop()

    yield from rec(tuple(counts), -1, 0)


# ---------------------------------------------------------------------------
# steps 7-8: small items


def max_flow(capacity: dict, source, sink) -> tuple[Fraction, dict]:
    """Edmonds-Karp over exact rationals. ``capacity`` maps (u, v) -> Fraction."""
    residual: dict = {}
    adj: dict = {}
    for (u, v), cap in capacity.items():
        residual[(u, v)] = residual.get((u, v), ZERO) + cap
        residual.setdefault((v, u), ZERO)
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    total = ZERO
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v in adj.get(u, ()):
                if v not in parent and residual[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            break
        path = []
        v = sink
        while parent[v] is not None:
            path.append((parent[v], v))
            v = parent[v]
        push = min(residual[e] for e in path)
        for u, v in path:
            residual[(u, v)] -= push
            residual[(v, u)] += push
        total += push
    flow = {e: cap - residual[e] for e, cap in capacity.items()}
    return total, flow


def solve_lps(problem: LpsProblem) -> tuple[Fraction, dict[tuple[int, int], Fraction]]:
    """Maximise the small-item mass placed; returns (optimum, x[(bin, colour)]).

    The LP is a transportation problem: source -> colour (supply), colour ->
    bin when the colour is in the bin's label, bin -> sink (free space).
    """
    cap = {}
    for c, supply in problem.supplies.items():
        if supply > 0:
            cap[("s", ("c", c))] = supply
    for i, (fill, label) in enumerate(problem.bins):
        room = ONE - fill
        if room <= 0:
            continue
        cap[(("b", i), "t")] = room
        for c in label:
            if problem.supplies.get(c, ZERO) > 0:
                cap[(("c", c), ("b", i))] = problem.supplies[c]
    value, flow = max_flow(cap, "s", "t")
    x = {}
    for (u, v), f in flow.items():
        if f > 0 and u != "s" and v != "t":
            x[(v[1], u[1])] = f
    return value, x


def place_small_items(bins: Sequence[Bin], x: dict, small_by_colour: dict[int, list[Item]]):
    """Fill each (bin, colour) quota greedily; returns (bins, overflow by colour)."""
    out = [b.copy() for b in bins]
    pools = {c: list(items) for c, items in small_by_colour.items()}
    for i, b in enumerate(out):
        for c in sorted(pools):
            quota = x.get((i, c), ZERO)
            if quota <= 0:
                continue
            placed = ZERO
            keep = []
            for it in pools[c]:
                if placed + it.size <= quota:
                    b.add(it)
                    placed += it.size
                else:
                    keep.append(it)
            pools[c] = keep
    return out, {c: items for c, items in pools.items() if items}


def pack_overflow_ff(groups, new_bin=None) -> Packing:
    """First fit into fresh bins, one colour after another (ascending colour)."""
    if isinstance(groups, dict):
        order = [it for c in sorted(groups) for it in groups[c]]
    else:
        order = sorted(groups, key=lambda it: it.colour)
    bins: list[Bin] = []
    new_bin = new_bin or BinFactory()
    for it in order:
        for b in bins:
            if b.fits(it.size):
                b.add(it)
                break
        else:
            b = new_bin()
            b.add(it)
            bins.append(b)
    return Packing(bins, "overflow_ff")


# ---------------------------------------------------------------------------
# the whole scheme


@dataclass
class AptasResult:
    packing: Packing
    candidates: int
    nodes_budget: int
    colour_opts: dict[int, int]
    opt_source: str
    trace: list[dict] = field(default_factory=list)


def _colour_opts(instance: Instance, oracle_limit: int) -> tuple[dict[int, int], str]:
    opts, source = {}, "exact_oracle"
    for c in instance.colours_present():
        items = instance.of_colour(c)
        try:
            opts[c] = exact_opt(items, oracle_limit)
        except OracleLimitError:
            opts[c] = ceil_fraction(sum((it.size for it in items), ZERO))
            source = "weight_lower_bound"
    return opts, source


def _realise(candidate: Candidate, pools: list[list[Item]], new_bin) -> list[Bin]:
    pools = [list(p) for p in pools]
    bins = []
    for cfg in candidate.configs:
        b = new_bin()
        for k, t in enumerate(cfg.counts):
            for _ in range(t):
                if pools[k]:
                    b.add(pools[k].pop(0))
        bins.append(b)
    return bins


def aptas_solve(instance: Instance, eps, beta, max_configs: int = DEFAULT_MAX_CONFIGS,
                max_nodes: int = DEFAULT_MAX_NODES, oracle_limit: int = 16,
                rescale: bool = False, keep_trace: bool = False) -> AptasResult:
    eps = parse_rational(eps)
    beta = parse_rational(beta)
    if rescale:
        eps = eps / instance.m
    large, small = split_small_large(instance.items, eps)
    groups, q = group_round_down(large, eps)

    # classes merge groups of one colour that share a rounded size; a class's
    # slots take the original items of the next group of each member group
    class_index: dict[tuple[int, Fraction], int] = {}
    classes: list[SizeClass] = []
    counts: list[int] = []
    pools: list[list[Item]] = []
    for c in sorted(groups):
        gs = groups[c]
        for j, g in enumerate(gs):
            key = (c, g.rounded_size)
            if key not in class_index:
                class_index[key] = len(classes)
                classes.append(SizeClass(c, g.rounded_size))
                counts.append(0)
                pools.append([])
            k = class_index[key]
            counts[k] += len(g.original_items)
            if j + 1 < len(gs):
                pools[k].extend(gs[j + 1].original_items)
    order = sorted(range(len(classes)), key=lambda k: (-classes[k].size, classes[k].colour))
    classes = [classes[k] for k in order]
    counts = [counts[k] for k in order]
    pools = [pools[k] for k in order]

    small_by_colour: dict[int, list[Item]] = {}
    for it in sorted(small, key=lambda it: (-it.size, it.id)):
        small_by_colour.setdefault(it.colour, []).append(it)
    supply = {c: sum((it.size for it in items), ZERO) for c, items in small_by_colour.items()}

    configs = enumerate_configurations([cl.size for cl in classes], eps, instance.m,
                                       max_counts=counts, ceiling=max_configs,
                                       colours=sorted(supply))
    colour_opts, source = _colour_opts(instance, oracle_limit)

    best: list = [None]  # (total, stretch, packing)

    def bound():
        return None if best[0] is None else best[0][0]

    seen = 0
    trace = []
    try:
        for cand in search_packings(configs, classes, counts, beta, colour_opts, supply,
                                    max_nodes=max_nodes, bound=bound):
            seen += 1
            packing = _finish(cand, pools, small_by_colour, supply, q)
            spans = packing.spans()
            stretch = max((Fraction(spans.get(c, 0), max(colour_opts[c], 1))
                           for c in colour_opts), default=ZERO)
            key = (packing.bin_count, stretch)
            if keep_trace:
                trace.append({"bins": key[0], "colour_stretch": str(stretch),
                              "configs": [list(cfg.counts) + [sorted(cfg.small_colours)]
                                          for cfg in cand.configs]})
            if best[0] is None or key < best[0][:2]:
                best[0] = (key[0], key[1], packing)
    except BudgetExceeded as exc:
        raise BudgetExceeded(str(exc), best=None if best[0] is None else best[0][2]) from None
    if best[0] is None:
        raise EmptyCandidates(f"no packing of the rounded items has colour stretch <= {beta}")
    packing = best[0][2]
    packing.algorithm = "aptas"
    packing.params = {"epsilon": eps, "beta": beta, "opt_source": source}
    return AptasResult(packing, seen, max_nodes, colour_opts, source, trace)


def _finish(cand: Candidate, pools, small_by_colour, supply, q) -> Packing:
    new_bin = BinFactory()
    bins = _realise(cand, pools, new_bin)
    problem = LpsProblem([(b.fill, cfg.small_colours) for b, cfg in zip(bins, cand.configs)],
                         dict(supply))
    _, x = solve_lps(problem)
    bins, overflow = place_small_items(bins, x, small_by_colour)
    extra = pack_overflow_ff(overflow, new_bin).bins
    very_large = pack_overflow_ff(q, new_bin).bins
    used = [b for b in bins + extra + very_large if b.contents]
    for b in used:
        b.open = False
    return Packing(used, "aptas")


def aptas(instance: Instance, eps, beta, **kw) -> Packing:
    return aptas_solve(instance, eps, beta, **kw).packing
