"""
Round-based adversary
=====================

Each round brings one item of size 1/n in every colour. The optimum for the
bin count uses one bin per round, while each colour alone needs only
ceil(r/n) bins, so any online rule has to trade one against the other.
"""

#%%
from fractions import Fraction

from colourpack.instances import run_adversary
from colourpack.online import LevelScheme, OnlineFirstFit, ThresholdScheme

for alg in (OnlineFirstFit(), ThresholdScheme(Fraction(1, 6)), LevelScheme(Fraction(1, 8))):
    traj = run_adversary(alg, 6, 60)
    r10, r60 = traj.at(10), traj.at(60)
    print(f"{alg.name:10s} round 10: bins {r10.bins} colour stretch {r10.colour_stretch_lb}; "
          f"round 60: bins {r60.bins} colour stretch {r60.colour_stretch_lb}")

#%%
# The full trajectory is a CSV table.

print(run_adversary(OnlineFirstFit(), 4, 8).to_csv())
