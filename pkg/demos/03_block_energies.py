"""Block ground energies: correct oracle guesses give the lowest energy."""
# %%
from tihsim import blocks
from tihsim.precision import fx_to_decimal

inst = blocks.load_instance("toy-m1")
N = blocks.smallest_valid_N(inst)
x = blocks.x_of_N(N)
print(inst.note)
print("N =", N, " x =", x, " y~ =", blocks.y_tilde(inst, x))

# %% Every (T, w) block is S1..S4; only S4 with an accepted witness escapes the periodic floor.
for w in ("1" + "101" + "0" * (N - 8), "1" + "000" + "0" * (N - 8), "0" * (N - 4)):
    T = blocks.t_of_xy(inst, x, w[:1])
    be = blocks.block_ground_energy(inst, blocks.BlockSpec(N, T, w), precision_bits=128)
    print(w[:4], be.cls, be.kind, fx_to_decimal(be.value, 25))

# %% Global minimum over all blocks.
g = blocks.global_ground_energy(inst, N)
print("argmin y:", g.argmin_y, " T:", g.argmin.T)
print("energy  :", fx_to_decimal(g.energy, 30))
print("expected:", fx_to_decimal(g.expected, 30))
for y, be in sorted(g.per_y.items()):
    print(" y =", y, be.cls, fx_to_decimal(be.value, 25))

# %% Small N: the local-rule walk and the clock-only profile place the same penalties.
b = blocks.BlockSpec(8, 1, "0000")
mach = blocks.toy_machines()
a = blocks.penalty_profile(None, b, "semantic", mach)
w = blocks.penalty_profile(None, b, "track-walk", mach)
print("profiles equal:", a.hits == w.hits, " final pair:", w.final_pair())
print("numeric S2 energy at N=7:", blocks.numeric_block_energy(blocks.load_instance("toy-m0"),
                                                               blocks.BlockSpec(7, 2, "000")))
