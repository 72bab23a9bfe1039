"""Classical bin packing heuristics: NF, FF, FFD, BF and bounded best fit."""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

from .core import ONE, BinFactory, Bin, Item, Packing, PreconditionError


def _check(item: Item):
    if item.size > ONE:
        raise PreconditionError(f"item {item.id} larger than a bin")


def next_fit(items: Iterable[Item]) -> Packing:
    new_bin = BinFactory()
    bins: list[Bin] = []
    current = None
    for it in items:
        _check(it)
        if current is None or not current.fits(it.size):
            if current is not None:
                current.open = False
            current = new_bin()
            bins.append(current)
        current.add(it)
    return Packing(bins, "nf")


def first_fit(items: Iterable[Item], eligible: Callable[[Bin], bool] | None = None,
              bins: Sequence[Bin] | None = None, algorithm="ff") -> Packing:
    """First fit, optionally continuing from existing ``bins``.

    ``eligible`` is asked about every bin before an item may enter it; new
    bins are subject to it too. Existing bins are copied, not mutated.
    """
    out = [b.copy() for b in bins] if bins else []
    new_bin = BinFactory(max((b.id for b in out), default=-1) + 1)
    for it in items:
        _check(it)
        for b in out:
            if b.fits(it.size) and (eligible is None or eligible(b)):
                b.add(it)
                break
        else:
            b = new_bin()
            b.add(it)
            out.append(b)
    return Packing(out, algorithm)


def first_fit_decreasing(items: Iterable[Item]) -> Packing:
    ordered = sorted(items, key=lambda it: it.size, reverse=True)
    p = first_fit(ordered)
    p.algorithm = "ffd"
    return p


class BoundedBestFit:
    """Best fit restricted to ``k`` open bins (``k=None``: unbounded).

    An item goes to the fullest open bin with room, lowest id on ties. If no
    open bin has room and ``k`` bins are open, the fullest is closed first.
    """

    def __init__(self, k: int | None = 2, initial_open: Sequence[Bin] = (),
                 new_bin: Callable[..., Bin] | None = None, kind="plain"):
        if k is not None and k < 1:
            raise ValueError("k must be >= 1")
        if k is not None and len(initial_open) > k:
            raise ValueError(f"{len(initial_open)} pre-opened bins exceed k={k}")
        self.k = k
        self.kind = kind
        self.open_bins: list[Bin] = list(initial_open)
        for b in self.open_bins:
            b.open = True
        self.closed_bins: list[Bin] = []
        if new_bin is None:
            new_bin = BinFactory(max((b.id for b in self.open_bins), default=-1) + 1)
        self.new_bin = new_bin

    def pack(self, item: Item) -> Bin:
        _check(item)
        best = None
        for b in self.open_bins:
            if b.fits(item.size) and (best is None or b.fill > best.fill
                                      or (b.fill == best.fill and b.id < best.id)):
                best = b
        if best is None:
            if self.k is not None and len(self.open_bins) >= self.k:
                fullest = max(self.open_bins, key=lambda b: (b.fill, -b.id))
                fullest.open = False
                self.open_bins.remove(fullest)
                self.closed_bins.append(fullest)
            best = self.new_bin(kind=self.kind)
            self.open_bins.append(best)
        best.add(item)
        return best

    def bins(self) -> list[Bin]:
        return sorted(self.closed_bins + self.open_bins, key=lambda b: b.id)


def bounded_best_fit(items: Iterable[Item], k: int | None = 2,
                     initial_open: Sequence[Bin] | None = None) -> Packing:
    """Run bounded best fit over ``items``; pre-opened bins count against ``k``."""
    pre = [b.copy() for b in initial_open] if initial_open else []
    state = BoundedBestFit(k, pre)
    for it in items:
        state.pack(it)
    name = "bf" if k is None else "bbf"
    return Packing(state.bins(), name, {} if k is None else {"k": k})


def best_fit(items: Iterable[Item]) -> Packing:
    return bounded_best_fit(items, None)
