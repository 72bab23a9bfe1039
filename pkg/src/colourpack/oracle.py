"""Exact solvers for small instances.

These are ground truth for every stretch measurement, so they refuse to
run past their size limits instead of quietly approximating.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import Instance, Item, format_rational, parse_rational


class OracleLimitError(ValueError):
    """Instance too large for exact solving; use lower bounds instead."""


DP_BITMASK = "dp_bitmask"
EXHAUSTIVE = "exhaustive_partition"


@dataclass(frozen=True)
class OracleResult:
    opt_bins: int
    per_colour_opt: dict[int, int]
    opt_beta: tuple[Fraction, int | None] | None
    method: str
    instance_digest: str

    def to_json(self) -> dict:
        out = {
            "opt_bins": self.opt_bins,
            "per_colour_opt": {str(c): v for c, v in sorted(self.per_colour_opt.items())},
            "method": self.method,
            "instance_digest": self.instance_digest,
            "opt_beta": None,
        }
        if self.opt_beta is not None:
            out["opt_beta"] = {"beta": format_rational(self.opt_beta[0]), "bins": self.opt_beta[1]}
        return out

    @classmethod
    def from_json(cls, data) -> "OracleResult":
        beta = data.get("opt_beta")
        if beta is not None:
            beta = (parse_rational(beta["beta"]), beta["bins"])
        return cls(data["opt_bins"], {int(c): v for c, v in data["per_colour_opt"].items()},
                   beta, data["method"], data["instance_digest"])


def _scaled(sizes: Sequence[Fraction]) -> tuple[list[int], int]:
    """Integer sizes over a common denominator, and that denominator."""
    den = 1
    for s in sizes:
        den = math.lcm(den, s.denominator)
    return [int(s * den) for s in sizes], den


def exact_opt(items: Iterable[Item], limit_n: int = 16) -> int:
    """Minimum number of unit bins, by DP over item subsets.

    For each subset keep the lexicographically smallest (closed bins, fill of
    the open bin); adding items one at a time to that state is exact.
    """
    sizes = [it.size for it in items]
    n = len(sizes)
    if n > limit_n:
        raise OracleLimitError(f"{n} items exceed the exact limit {limit_n}")
    if n == 0:
        return 0
    w, cap = _scaled(sizes)
    full = (1 << n) - 1
    inf = (n + 1, 0)
    best = [inf] * (1 << n)
    best[0] = (0, 0)
    for mask in range(1 << n):
        k, r = best[mask]
        if k > n:
            continue
        for i in range(n):
            bit = 1 << i
            if mask & bit:
                continue
            if r + w[i] <= cap:
                cand = (k, r + w[i])
            else:
                cand = (k + 1, w[i])
            if cand < best[mask | bit]:
                best[mask | bit] = cand
    k, r = best[full]
    return k + (1 if r > 0 else 0)


def _search_order(items: Sequence[Item]) -> list[Item]:
    return sorted(items, key=lambda it: (-it.size, it.colour, it.id))


def enumerate_packings(items: Sequence[Item], max_bins: int | None = None):
    """Yield every feasible packing as lists of item lists.

    Bins are opened in item order, and an item identical in size and colour
    to its predecessor never goes to an earlier bin. This prunes most, not
    all, relabellings of the same packing.
    """
    order = _search_order(items)
    w, cap = _scaled([it.size for it in order])
    n = len(order)
    bins: list[list[int]] = []
    fills: list[int] = []
    where = [0] * n

    def rec(i):
        if i == n:
            yield [[order[k] for k in b] for b in bins]
            return
        lo = 0
        if i > 0 and order[i].size == order[i - 1].size and order[i].colour == order[i - 1].colour:
            lo = where[i - 1]
        for b in range(lo, len(bins)):
            if fills[b] + w[i] <= cap:
                bins[b].append(i)
                fills[b] += w[i]
                where[i] = b
                yield from rec(i + 1)
                fills[b] -= w[i]
                bins[b].pop()
        if max_bins is None or len(bins) < max_bins:
            bins.append([i])
            fills.append(w[i])
            where[i] = len(bins) - 1
            yield from rec(i + 1)
            bins.pop()
            fills.pop()

    yield from rec(0)


def _min_bins_with_spans(items: Sequence[Item], span_limit: dict[int, int],
                         max_bins: int | None = None) -> int | None:
    """Fewest bins over packings where colour c spans at most span_limit[c]."""
    order = _search_order(items)
    w, cap = _scaled([it.size for it in order])
    n = len(order)
    colours = sorted({it.colour for it in order})
    cidx = {c: k for k, c in enumerate(colours)}
    col = [cidx[it.colour] for it in order]
    limit = [span_limit[c] for c in colours]
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + w[i]

    fills: list[int] = []
    has: list[list[bool]] = []
    span = [0] * len(colours)
    where = [0] * n
    best = [max_bins + 1 if max_bins is not None else n + 1]

    def rec(i):
        if len(fills) >= best[0]:
            return
        if i == n:
            best[0] = len(fills)
            return
        free = sum(cap - f for f in fills)
        extra = max(0, suffix[i] - free)
        if len(fills) + -(-extra // cap) >= best[0]:
            return
        c = col[i]
        lo = 0
        if i > 0 and w[i] == w[i - 1] and col[i] == col[i - 1]:
            lo = where[i - 1]
        for b in range(lo, len(fills)):
            if fills[b] + w[i] > cap:
                continue
            new_span = not has[b][c]
            if new_span and span[c] >= limit[c]:
                continue
            fills[b] += w[i]
            if new_span:
                has[b][c] = True
                span[c] += 1
            where[i] = b
            rec(i + 1)
            if new_span:
                has[b][c] = False
                span[c] -= 1
            fills[b] -= w[i]
        if span[c] < limit[c] and len(fills) + 1 < best[0]:
            fills.append(w[i])
            row = [False] * len(colours)
            row[c] = True
            has.append(row)
            span[c] += 1
            where[i] = len(fills) - 1
            rec(i + 1)
            span[c] -= 1
            has.pop()
            fills.pop()

    rec(0)
    bound = max_bins + 1 if max_bins is not None else n + 1
    return best[0] if best[0] < bound else None


def exact_opt_beta(instance: Instance, beta, limit_n: int = 10,
                   per_colour_opt: dict[int, int] | None = None) -> int | None:
    """Fewest bins over packings whose colour stretch is at most ``beta``.

    The stretch check has no additive constant. Returns None when no packing
    satisfies it.
    """
    beta = parse_rational(beta) if not isinstance(beta, float) else beta
    n = len(instance)
    if n > limit_n:
        raise OracleLimitError(f"{n} items exceed the exhaustive limit {limit_n}")
    if per_colour_opt is None:
        per_colour_opt = {c: exact_opt(instance.of_colour(c)) for c in instance.colours_present()}
    limits = {}
    for c in instance.colours_present():
        bound = beta * per_colour_opt[c]
        limits[c] = n if math.isinf(bound) else math.floor(bound)
    return _min_bins_with_spans(instance.items, limits)


def min_colour_span(items: Sequence[Item], colour: int, max_bins: int) -> int | None:
    """Smallest span of ``colour`` over all packings with at most ``max_bins`` bins."""
    best = None
    for packing in enumerate_packings(items, max_bins):
        span = sum(1 for b in packing if any(it.colour == colour for it in b))
        if best is None or span < best:
            best = span
    return best


def solve(instance: Instance, beta=None, limit_n: int = 16, beta_limit_n: int = 10) -> OracleResult:
    per = {c: exact_opt(instance.of_colour(c), limit_n) for c in instance.colours_present()}
    opt = exact_opt(instance.items, limit_n)
    opt_beta = None
    method = DP_BITMASK
    if beta is not None:
        beta = parse_rational(beta)
        opt_beta = (beta, exact_opt_beta(instance, beta, beta_limit_n, per))
        method = EXHAUSTIVE
    return OracleResult(opt, per, opt_beta, method, instance.digest())


def cached_solve(instance: Instance, beta=None, cache_dir=None, **kw) -> OracleResult:
    """``solve`` with results stored on disk under the instance digest."""
    cache_dir = cache_dir or os.environ.get("COLOURPACK_ORACLE_CACHE")
    if not cache_dir:
        return solve(instance, beta, **kw)
    tag = "none" if beta is None else format_rational(parse_rational(beta)).replace("/", "_")
    path = os.path.join(cache_dir, f"{instance.digest()}-{tag}.json")
    if os.path.exists(path):
        with open(path) as fh:
            return OracleResult.from_json(json.load(fh))
    result = solve(instance, beta, **kw)
    os.makedirs(cache_dir, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(result.to_json(), fh)
    return result

