"""Instance families: the lower-bound constructions, random instances, and
the round-based online adversary."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import (
    ONE, ZERO, Instance, Item, PreconditionError, ceil_fraction, format_rational,
    parse_rational,
)

SYLVESTER_MAX_M = 5


def gen_theorem1(n: int, eps) -> Instance:
    """n items of size 1-2eps (colours 1..n) and n items of size 2eps (colour n+1).

    eps must be 1/x with eps < 1/4. OPT(I) = n and OPT(I_{n+1}) = ceil(2 eps n)
    are recorded in ``meta``.
    """
    eps = parse_rational(eps)
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if eps.numerator != 1 or not eps < Fraction(1, 4):
        raise PreconditionError(f"need eps = 1/x with eps < 1/4, got {eps}")
    delta = 2 * eps
    items = [Item(c - 1, ONE - delta, c) for c in range(1, n + 1)]
    items += [Item(n + k, delta, n + 1) for k in range(n)]
    per = {c: 1 for c in range(1, n + 1)}
    per[n + 1] = ceil_fraction(delta * n)
    meta = {"family": "theorem1", "n": n, "epsilon": format_rational(eps),
            "delta": format_rational(delta), "opt": n, "per_colour_opt": per}
    return Instance(tuple(items), n + 1, meta)


def sylvester_sequence(count: int) -> list[int]:
    seq = [1]
    while len(seq) < count:
        seq.append(seq[-1] * (seq[-1] + 1))
    return seq[:count]


def sylvester_bound(m: int) -> Fraction:
    """Sum of 1/l_i for i = 0..m."""
    return sum((Fraction(1, l) for l in sylvester_sequence(m + 1)), ZERO)


def gen_sylvester(m: int, n: int, eps) -> Instance:
    """m+1 colours with n items each; item index i has size 1/(l_i + 1) + eps.

    Sequence index i maps to colour i+1.
    """
    eps = parse_rational(eps)
    if not 0 <= m <= SYLVESTER_MAX_M:
        raise PreconditionError(f"m must lie in 0..{SYLVESTER_MAX_M}, got {m}")
    if n < 1 or eps <= 0:
        raise PreconditionError("need n >= 1 and eps > 0")
    ls = sylvester_sequence(m + 2)
    items, per = [], {}
    for i, l in enumerate(ls[:m + 1]):
        if n % l:
            raise PreconditionError(f"l_{i} = {l} does not divide n = {n}")
        size = Fraction(1, l + 1) + eps
        if l * size > ONE:
            raise PreconditionError(f"eps too large: {l} items of size {size} do not fit a bin")
        items += [Item(len(items), size, i + 1) for _ in range(n)]
        per[i + 1] = n // l
    meta = {"family": "sylvester", "m": m, "n": n, "epsilon": format_rational(eps),
            "l": ls[:m + 1], "per_colour_opt": per,
            "bound": format_rational(sylvester_bound(m))}
    # one item of every colour per bin needs sum 1/(l_i+1) + (m+1) eps <= 1
    if (m + 1) * eps <= Fraction(1, ls[m + 1]):
        meta["opt"] = n
    # renumber ids in arrival order
    items = [Item(k, it.size, it.colour) for k, it in enumerate(items)]
    return Instance(tuple(items), m + 1, meta)


def gen_tightness(j: int, gamma, pairs: int) -> Instance:
    """Colour pairs (c, c') that leave level bins about one third full.

    Colour c gets 2^-(j-i) then 2^-(j-i) + gamma for i = 0, 2, ..., j-2;
    colour c' then gets 2^-(j-i) + gamma then 2^-(j-i) for i = 1, 3, ..., j-3.
    Pair p uses colours 2p+1 and 2p+2.
    """
    gamma = parse_rational(gamma)
    if j < 2 or j % 2:
        raise PreconditionError(f"j must be a positive even integer >= 2, got {j}")
    if not ZERO < gamma <= Fraction(1, (j - 1) * 2 ** j):
        raise PreconditionError(f"gamma must lie in (0, 1/((j-1) 2^j)], got {gamma}")
    if pairs < 1:
        raise PreconditionError("pairs must be >= 1")
    items = []
    for p in range(pairs):
        c, c2 = 2 * p + 1, 2 * p + 2
        for i in range(0, j - 1, 2):
            base = Fraction(1, 2 ** (j - i))
            items.append(Item(len(items), base, c))
            items.append(Item(len(items), base + gamma, c))
        for i in range(1, j - 2, 2):
            base = Fraction(1, 2 ** (j - i))
            items.append(Item(len(items), base + gamma, c2))
            items.append(Item(len(items), base, c2))
    meta = {"family": "tightness", "j": j, "gamma": format_rational(gamma), "pairs": pairs,
            "epsilon": format_rational(Fraction(1, 2 ** j))}
    return Instance(tuple(items), 2 * pairs, meta)


def gen_random(n: int, m: int, size_law=("uniform", "1/100", "1"), seed: int = 0,
               max_denominator: int = 2 ** 20) -> Instance:
    """Seeded random instance with bounded-denominator rational sizes.

    ``size_law`` is ("uniform", lo, hi) or ("discrete", [sizes...]).
    """
    if n < 0 or m < 1:
        raise PreconditionError("need n >= 0 and m >= 1")
    rng = np.random.default_rng(seed)
    kind = size_law[0]
    if kind == "uniform":
        lo, hi = parse_rational(size_law[1]), parse_rational(size_law[2])
        if not (ZERO < lo <= hi <= ONE):
            raise PreconditionError(f"need 0 < lo <= hi <= 1, got {lo}, {hi}")
        raw = rng.uniform(float(lo), float(hi), size=n)
        sizes = []
        for x in raw:
            s = Fraction(float(x)).limit_denominator(max_denominator)
            sizes.append(min(max(s, lo), hi))
    elif kind == "discrete":
        values = [parse_rational(v) for v in size_law[1]]
        if not values or any(not ZERO < v <= ONE for v in values):
            raise PreconditionError("discrete sizes must lie in (0, 1]")
        sizes = [values[k] for k in rng.integers(0, len(values), size=n)]
    else:
        raise PreconditionError(f"unknown size law {kind!r}")
    colours = rng.integers(1, m + 1, size=n)
    items = tuple(Item(k, s, int(c)) for k, (s, c) in enumerate(zip(sizes, colours)))
    return Instance(items, m, {"family": "random", "seed": seed})


# ---------------------------------------------------------------------------
# online adversary


@dataclass(frozen=True)
class RoundRecord:
    round: int
    bins: int
    max_span: int
    opt_bins: int
    colour_opt: int
    bin_stretch_lb: Fraction
    colour_stretch_lb: Fraction


@dataclass
class Trajectory:
    algorithm: str
    n: int
    rows: list[RoundRecord] = field(default_factory=list)
    error: str | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round", "bins", "max_span", "bin_stretch_lb", "colour_stretch_lb"])
        for r in self.rows:
            w.writerow([r.round, r.bins, r.max_span, format_rational(r.bin_stretch_lb),
                        format_rational(r.colour_stretch_lb)])
        return buf.getvalue()

    def at(self, round_index) -> RoundRecord:
        return self.rows[round_index - 1]


def run_adversary(algorithm, n: int, rounds: int) -> Trajectory:
    """Feed ``rounds`` rounds of n items of size 1/n, one per colour 1..n.

    After round r the optimum uses r bins overall and ceil(r/n) bins per
    colour. A precondition failure ends the run with a partial trajectory.
    """
    if n < 2:
        raise PreconditionError("adversary needs n >= 2")
    algorithm.reset()
    traj = Trajectory(getattr(algorithm, "name", type(algorithm).__name__), n)
    size = Fraction(1, n)
    next_id = 0
    for r in range(1, rounds + 1):
        try:
            for c in range(1, n + 1):
                algorithm.pack(Item(next_id, size, c))
                next_id += 1
        except PreconditionError as exc:
            traj.error = f"round {r}: {exc}"
            break
        packing = algorithm.snapshot()
        spans = packing.spans()
        max_span = max(spans.values())
        colour_opt = math.ceil(r / n)
        traj.rows.append(RoundRecord(r, packing.bin_count, max_span, r, colour_opt,
                                     Fraction(packing.bin_count, r), Fraction(max_span, colour_opt)))
    return traj
