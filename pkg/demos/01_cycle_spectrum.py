"""Penalized cycles: where the 1 - cos(pi/(L+1)) gaps come from."""
# %%
import numpy as np

from tihsim import spectral as sp
from tihsim.precision import fx_to_decimal

# %% A cycle of 8 nodes with two adjacent half-penalties.
m = sp.assemble(sp.cycle_with_adjacent_halves(8))
print(m)
print("lowest eigenvalue:", sp.smallest_eig(m))
print("closed form      :", fx_to_decimal(sp.cycle_two_halves_exact(8, 80), 18))

# %% The ground vector is a half-period sine, vanishing just outside the penalties.
L = 8
v = sp.cycle_eigvec(L)
print(np.round(v / np.linalg.norm(v), 4))

# %% The gap closes like pi^2 / (2 L^2).
for L in (10, 100, 1000):
    ev = sp.smallest_eig(sp.assemble(sp.cycle_with_adjacent_halves(L)))
    print(L, ev, ev * 2 * L ** 2 / np.pi ** 2)

# %% A +1 penalty every s sites keeps the gap open no matter how many periods r.
s = 6
for r in (1, 4, 16, 64):
    ev = sp.smallest_eig(sp.assemble(sp.periodic_penalty(r, s)))
    lb = float(sp.periodic_lower_bound(r, s).to_fraction())
    print(f"r={r:3d}  eig={ev:.6f}  bound={lb:.6f}")

# %% Why: in the Fourier basis the penalty only couples modes k = j mod r.
F = sp.fourier_block(3, 4)
print(np.round(F.real * 4, 3))
