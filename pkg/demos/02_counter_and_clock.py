"""The binary counter that picks x from N, and the clock that drives it."""
# %%
from collections import Counter

from tihsim import clock, tm

# %% The counter writes integers least-significant bit first.
m = tm.build_mbc()
c = tm.TapeConfig.blank("1" + "#" * 7, m.start)
for t in range(1, 60):
    c = tm.step(m, c)
    if c.state == m.final and c.head == 1:
        print(f"step {t:3d}: {c.work}")

# %% N(x): the chain length at which the counter has just written x.
for x in ("01", "0101", "1101", "0100001"):
    r = tm.n_of_x(x)
    print(f"x={x:8s} N={r.value:4d}  closed form {r.closed_form:4d}  (delta {r.delta})")

# %% Reversibility is a table property: unidirectional, injective, normal form.
for name, mm in [("M_BC", m), ("M_post", tm.build_mpost())]:
    print(name, tm.check_reversible(mm).as_dict())

# %% One clock period for N = 6, and which machine steps each move carries.
N = 6
print("p(N) =", clock.p_of(N), "segments", clock.segment_lengths(N))
acts = Counter(r.action for _, _, r, _ in clock.walk(N, 0))
print(dict(acts))

# %% Exhaustive structure check: one cycle of correct configurations, short dead-end paths.
g, rep = clock.build_graph(6, 2)
print({k: rep[k] for k in ("well_formed", "correct", "cycle_length",
                           "longest_incorrect_path", "max_in_degree", "ok")})
