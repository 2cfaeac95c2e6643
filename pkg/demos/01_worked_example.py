"""The congruent number 5 from end to end.

5 is the area of the right triangle with sides 3/2, 20/3, 41/6, so the
twist 5 y^2 = x^3 - x has a rational point of infinite order. This script
finds it by search, takes it apart with both descents, and measures its
height.
"""

import math

from twistpoints.curve import CurveParams, Twist, from_standard, mul, to_standard
from twistpoints.descent import compose_congruent, decompose_congruent, decompose_general
from twistpoints.heights import canonical_height, naive_height_x
from twistpoints.search import SearchWindow, enumerate_low_points, eta

E = CurveParams(-1, 0)
t = Twist(E, 5)

# %% every point on d <= 5 with exp(h_x) <= 30
for r in enumerate_low_points(E, SearchWindow(5, H=30)):
    print(r.d, r.point.as_tuple(), f"h_x={r.h_x:.4f}", f"hhat={r.h_hat:.6f}")

# %% the smallest one
res = eta(E, 5, cap_log=3.0)
P = res.witness.point
print("\nminimal point", P.as_tuple(), "log eta_5 =", round(res.eta_log, 6))

# %% general descent: x = d1 b1 x1, z = d1^2 b1^3, d = d0 d1
g = decompose_general(t, P)
print("general descent", g)
print("check d0 y^2 =", g.d0 * g.y**2, "=", g.x1**3 - g.x1 * (g.d1 * g.b1**2) ** 2)

# %% complete 2-descent on the congruent curve
c = decompose_congruent(t, P)
print("2-descent (nu, d1..d4, b1..b4) =", (c.nu, c.d1, c.d2, c.d3, c.d4, c.b1, c.b2, c.b3, c.b4))
print("round trip:", compose_congruent(c) == (t, P))

# %% heights of multiples grow like n^2
S = to_standard(t, P)
base = canonical_height(t, P).value
for n in range(1, 5):
    Q = from_standard(t, mul(t, n, S))
    h = canonical_height(t, Q).value
    print(f"{n}P  h_x={naive_height_x(Q).value:9.4f}  hhat={h:.6f}  hhat/n^2={h / n**2:.6f}")
print("log(5)/8 =", round(math.log(5) / 8, 6), "vs log eta_5 =", round(base, 6))
