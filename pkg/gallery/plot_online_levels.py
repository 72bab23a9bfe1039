"""
Online region packing with levels
=================================

Items of one colour climb through level bins whose regions double in size.
A colour that reaches the top level is isolated and continues with bounded
best fit in its own bins.
"""

#%%
from fractions import Fraction

from colourpack.core import make_items, weight_lower_bound
from colourpack.instances import gen_tightness
from colourpack.online import MNF, LevelScheme, full_level_bins_average_fill, run_online

alg = LevelScheme(Fraction(1, 8))
stream = make_items(["1/5", "3/20", "9/20", "1/8", "1/4"], [1, 1, 1, 2, 2])
packing, events = run_online(alg, stream)
for e in events:
    print(e.to_json())

#%%
# The pair construction fills about a third of the region area it is given,
# so the bin count approaches three times the weight bound.

for j in (4, 6, 8, 10):
    inst = gen_tightness(j, Fraction(1, (j - 1) * 2 ** j), 50)
    p, _ = run_online(LevelScheme(Fraction(1, 2 ** j), MNF, isolate=False), inst.items)
    print(j, p.bin_count, weight_lower_bound(inst.items), float(p.bin_count / weight_lower_bound(inst.items)))

#%%
# Average fill of the fully used level bins. Two colours of (1/5, 1/8, 9/20)
# leave a level-2 bin with all regions claimed but only a quarter full.

p, _ = run_online(LevelScheme(Fraction(1, 8)), make_items(["1/5", "1/8", "9/20"] * 2, [1, 1, 1, 2, 2, 2]))
print(full_level_bins_average_fill(p))
