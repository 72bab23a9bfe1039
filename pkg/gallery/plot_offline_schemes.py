"""
Offline schemes on a coloured instance
======================================

Two offline trade-offs: grouping with colour-aware small items keeps the bin
count near optimal, while per-colour grouping followed by a bounded best fit
replay keeps every colour near its own optimum.
"""

#%%
from fractions import Fraction

from colourpack.core import compute_stretch, validate_packing
from colourpack.instances import gen_random, gen_theorem1
from colourpack.offline import offline_1plus_eps, offline_17_1plus_eps
from colourpack.oracle import solve

eps = Fraction(1, 4)
inst = gen_random(12, 3, ("discrete", ["1/10", "1/5", "1/3", "1/2", "3/5", "3/4"]), seed=3)
oracle = solve(inst)

for alg in (offline_1plus_eps, offline_17_1plus_eps):
    p = alg(inst, eps)
    assert validate_packing(p, inst).ok
    rep = compute_stretch(p, inst, oracle)
    print(f"{p.algorithm:7s} bins={rep.total_bins} opt={rep.opt_bins} "
          f"bin stretch={rep.bin_stretch} colour stretch={rep.colour_stretch}")

#%%
# On the family where one colour of small items fills the gaps left by n
# big items of distinct colours, a bin-optimal packing must spread the small
# colour over many bins.

t1 = gen_theorem1(8, Fraction(1, 8))
p = offline_1plus_eps(t1, Fraction(1, 8))
print("bins", p.bin_count, "span of colour 9", p.spans()[9])
