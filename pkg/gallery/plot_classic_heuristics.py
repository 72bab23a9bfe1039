"""
Classical heuristics and bounded best fit
=========================================

Next fit, first fit and bounded best fit on the same stream, then a replay
of an existing packing through bounded best fit with two open bins.
"""

#%%
# A short stream makes the rules visible.

from fractions import Fraction

from colourpack.classic import bounded_best_fit, first_fit, first_fit_decreasing, next_fit
from colourpack.core import make_items

items = make_items(["0.5", "0.6", "0.5", "0.4", "0.3", "0.7"])


def show(p):
    return [[str(it.size) for it in b.contents] for b in p.bins]


for name, alg in [("nf", next_fit), ("ff", first_fit), ("ffd", first_fit_decreasing),
                  ("bbf k=2", lambda xs: bounded_best_fit(xs, 2))]:
    print(f"{name:8s}", show(alg(items)))

#%%
# Replaying a packing bin by bin costs at most two extra bins when two bins
# are kept open.

base = first_fit_decreasing(items)
replay = bounded_best_fit(base.item_order(), k=2)
print(base.bin_count, "->", replay.bin_count)
assert replay.bin_count <= base.bin_count + 2

#%%
# Sizes stay exact: three thirds fill a bin exactly.

third = make_items([Fraction(1, 3)] * 3)
print(first_fit(third).bin_count)
