"""Growth of N*(X), the number of low points on twists d <= X.

Counts points with exp(hhat) <= d^(1/8 + alpha) and fits a log-log slope.
Logarithmic factors matter a lot at this range, so the slope is also shown
after dividing out log(X)^k.
Usage: python3 03_counting_exponents.py [Xmax] [alpha]
"""

import sys

import numpy as np

from twistpoints.curve import CurveParams
from twistpoints.search import SearchWindow, count_series, enumerate_low_points, fit_exponent

Xmax = int(sys.argv[1]) if len(sys.argv) > 1 else 16000
alpha = float(sys.argv[2]) if len(sys.argv) > 2 else 0.1
X_list = [Xmax >> k for k in range(6, -1, -1)]

for AB in [(-1, 0), (2, 3)]:
    recs = list(enumerate_low_points(CurveParams(*AB), SearchWindow(Xmax, alpha=alpha)))
    rows = count_series(recs, X_list)
    print(f"\n(A, B) = {AB}, alpha = {alpha}")
    for r in rows:
        print(f"  X={r.X:7d}  N={r.N:5d}  N*={r.N_star:6d}")
    fit = fit_exponent([(r.X, r.N_star) for r in rows])
    print(f"  slope of N*: {fit.slope:.3f} (rms residual {fit.residual:.3f})")
    lx = np.log(X_list)
    ns = np.array([r.N_star for r in rows], dtype=float)
    for k in (1, 2, 3):
        print(f"  slope of N*/log(X)^{k}: {np.polyfit(lx, np.log(ns / lx**k), 1)[0]:.3f}")
