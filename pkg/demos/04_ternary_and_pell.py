"""Two side computations: a ternary counting bound and real quadratic units.

First the count of primitive solutions of u1 v1^2 + u2 v2^2 - u3 v3^2 = 0
in growing boxes against (U1 U2 U3)^(2/3+eps) (V1 V2 V3)^(1/3). Then the
number field picture: class number times regulator summed over
fundamental discriminants grows like X^(3/2), and units are almost always
large.
"""

from twistpoints.pell import conjA_frequency, pell_table, siegel_average
from twistpoints.ternary import TernaryForm, exponent_scan, scale_list

rep = exponent_scan(TernaryForm(1, 1, -1), scale_list(2, 16))
print(rep.to_csv())
print("ratio trend (log-log slope):", round(rep.ratio_slope(), 3))

# %%
table = pell_table(20000)
for X in (2500, 5000, 10000, 20000):
    s = siegel_average(X, table=table)
    print(f"X={X:6d}  #D={s.count:5d}  sum h log eps = {s.total:12.1f}  / X^1.5 = {s.ratio:.4f}")

# %%
for eps in (0.5, 0.25, 0.1, 0.05):
    f = conjA_frequency(20000, eps, table=table)
    blocks = " ".join(f"{b.fraction:.2f}" for b in f.blocks if b.total)
    print(f"eps={eps:4}: share with log eps_D > D^(1/2-eps) = {f.fraction:.4f}   by block: {blocks}")
