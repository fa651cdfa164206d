"""Reading f(x) back out of the ground-energy density, and bracketing it."""
# %%
from fractions import Fraction

from tihsim import blocks, ged, robinson
from tihsim.precision import fx_to_decimal

inst = blocks.load_instance("toy-m2")
series = ged.GedSeries(inst, precision_bits=1024)
alpha = ged.alpha0(series)
print("alpha0 =", fx_to_decimal(alpha, 80))

# %% Each term sits at a scale of its own, so the timer values peel off one by one.
for x in (1, 2, 3):
    res = ged.extract_f(alpha, x, inst)
    print(f"x={x}: q={res.q_bits}, T values {res.T_values}, f={res.recovered_f}")

# %% A promise oracle pins lambda0 to 2^-r after r rounds whatever the in-gap answers.
res = ged.binary_search(ged.PromiseOracle(Fraction(5, 17), "reject"), 12)
for j, branch, l, u in res.rounds[:5]:
    print(j, branch, l, u)
print("final width", res.u - res.l)

# %% The Robinson hierarchy turns per-square energies into a density.
lams = {k: ged.lambda0_4k(series, k, 200) for k in range(1, 8)}
for m in range(2, 8):
    L = 4 ** m
    lo, hi = robinson.energy_interval(L, lams).density()
    print(L, float(lo), float(robinson.truncated_density(L, lams)), float(hi))
print(robinson.render_ascii(robinson.hierarchy(16)))
