"""Independent reference solvers used only by the tests.

These deliberately share no code with the package: a textbook exact simplex
for small LPs and a plain set-partition enumeration for bin packing.
"""

from fractions import Fraction
from math import floor


def simplex_max(c, A, b):
    """max c.x subject to A x <= b, x >= 0, with b >= 0 (origin feasible).

    Dense tableau, Bland's rule, exact Fractions.
    """
    m, n = len(A), len(c)
    rows = [[Fraction(v) for v in A[i]] + [Fraction(int(i == k)) for k in range(m)] + [Fraction(b[i])]
            for i in range(m)]
    obj = [-Fraction(v) for v in c] + [Fraction(0)] * m + [Fraction(0)]
    basis = [n + i for i in range(m)]
    while True:
        enter = next((j for j in range(n + m) if obj[j] < 0), None)
        if enter is None:
            break
        best, leave = None, None
        for i in range(m):
            if rows[i][enter] > 0:
                ratio = rows[i][-1] / rows[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise ValueError("unbounded")
        piv = rows[leave][enter]
        rows[leave] = [v / piv for v in rows[leave]]
        for i in range(m):
            if i != leave and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [a - f * p for a, p in zip(rows[i], rows[leave])]
        f = obj[enter]
        obj = [a - f * p for a, p in zip(obj, rows[leave])]
        basis[leave] = enter
    return obj[-1]


def lps_optimum(bins, supplies):
    """Placement LP written out directly: one variable per (bin, colour in label)."""
    var = [(i, c) for i, (_, label) in enumerate(bins) for c in sorted(label)]
    if not var:
        return Fraction(0)
    A, b = [], []
    for i, (fill, _) in enumerate(bins):
        A.append([1 if v[0] == i else 0 for v in var])
        b.append(1 - fill)
    for c, s in supplies.items():
        A.append([1 if v[1] == c else 0 for v in var])
        b.append(s)
    return simplex_max([1] * len(var), A, b)


def partitions(n):
    """Every set partition of range(n) as a list of blocks (restricted growth strings)."""
    labels = [0] * n

    def rec(k, blocks):
        if k == n:
            out = [[] for _ in range(blocks)]
            for i, l in enumerate(labels):
                out[l].append(i)
            yield out
            return
        for l in range(blocks + 1):
            labels[k] = l
            yield from rec(k + 1, max(blocks, l + 1))

    if n == 0:
        yield []
        return
    yield from rec(0, 0)


def feasible_partitions(items):
    for blocks in partitions(len(items)):
        if all(sum(items[i].size for i in blk) <= 1 for blk in blocks):
            yield [[items[i] for i in blk] for blk in blocks]


def brute_opt(items):
    return min((len(p) for p in feasible_partitions(list(items))), default=0)


def brute_opt_beta(items, beta):
    items = list(items)
    colours = sorted({it.colour for it in items})
    per = {c: brute_opt([it for it in items if it.colour == c]) for c in colours}
    best = None
    for p in feasible_partitions(items):
        ok = all(sum(1 for blk in p if any(it.colour == c for it in blk)) <= floor(beta * per[c])
                 for c in colours)
        if ok and (best is None or len(p) < best):
            best = len(p)
    return best
