"""How small can the smallest point be?

Every non-torsion point satisfies hhat >= log(d)/8 - C. This script
measures log eta_d - log(d)/8 over all congruent twists d <= X and compares
with the explicit family d = d1 (x1^3 - x1 d1^2) that comes close.
Usage: python3 02_eta_and_the_eighth_power.py [X]
"""

import math
import sys
from collections import Counter

import numpy as np

from twistpoints.curve import CurveParams
from twistpoints.search import FOUND, eta_scan, eta_slack_constant, minimal_family

X = int(sys.argv[1]) if len(sys.argv) > 1 else 3000
E = CurveParams(-1, 0)

results = eta_scan(E, X, cap_log=2.5)
print(Counter(r.status for r in results))
found = [r for r in results if r.status == FOUND]
excess = np.array([r.excess for r in found])
print(f"log eta_d - log(d)/8 over {len(found)} twists: min {excess.min():.3f}, "
      f"median {np.median(excess):.3f}, max {excess.max():.3f}")
print("a priori slack constant:", round(eta_slack_constant(E), 4))

# %% the family, split by how close x1 is to d1
by_d = {r.d: r for r in found}
print("\n   d   d1  x1  excess  x1/d1")
for m in minimal_family(E, 40, 40):
    if m.d <= X:
        print(f"{m.d:5d} {m.d1:4d} {m.x1:3d}  {by_d[m.d].excess:6.3f}  {m.x1 / m.d1:5.2f}")

# %% members with x1 = d1 + 1 drift upward like log(d)/24
drift = [(math.log(m.d), m.record.h_hat - math.log(m.d) / 8)
         for m in minimal_family(E, 60, 61) if m.x1 == m.d1 + 1]
if len(drift) > 2:
    slope = np.polyfit(*zip(*drift), 1)[0]
    print(f"\nx1 = d1 + 1 members: excess grows with slope {slope:.4f} in log d (1/24 = {1 / 24:.4f})")
