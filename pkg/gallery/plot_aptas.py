"""
Bin count under a colour-stretch cap
====================================

The scheme rounds large items down per colour, searches labelled packings
that keep each colour within beta times its optimum, places small items by
max flow, and keeps the cheapest result.
"""

#%%
from fractions import Fraction

from colourpack.aptas import LpsProblem, aptas_solve, solve_lps
from colourpack.core import validate_packing
from colourpack.instances import gen_random
from colourpack.oracle import exact_opt, exact_opt_beta

inst = gen_random(7, 2, ("discrete", ["1/10", "1/5", "1/3", "1/2", "3/5"]), seed=5)
res = aptas_solve(inst, Fraction(1, 2), 2, keep_trace=True)
assert validate_packing(res.packing, inst).ok
print("candidates", res.candidates, "bins", res.packing.bin_count,
      "OPT", exact_opt(inst.items), "OPT_beta", exact_opt_beta(inst, 2))

#%%
# The small-item placement problem on its own: two bins, two colours.

value, x = solve_lps(LpsProblem([(Fraction(7, 10), frozenset({1})), (Fraction(1, 2), frozenset({1, 2}))],
                                {1: Fraction(2, 5), 2: Fraction(3, 10)}))
print(value, {k: str(v) for k, v in x.items()})
