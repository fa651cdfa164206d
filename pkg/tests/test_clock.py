import itertools
from collections import Counter

import pytest

from tihsim import clock
from tihsim.clock import ClockConfig


def test_p_small_values():
    assert [clock.p_of(N) for N in (4, 5, 6)] == [40, 84, 144]


@pytest.mark.parametrize("N", range(4, 12))
def test_segments_sum_to_p(N):
    assert sum(clock.segment_lengths(N)) == clock.p_of(N)


@pytest.mark.parametrize("N,T", [(4, 0), (4, 1), (5, 0), (5, 2)])
def test_well_formed_count_by_brute_force(N, T):
    n = N - 2
    base = clock.time0(N, T)
    t1_syms = ["=", "_"] + list(clock.POINTERS)
    c1 = sum(clock.is_well_formed(ClockConfig(t1, base.t2, base.t3))
             for t1 in itertools.product(t1_syms, repeat=n))
    c2 = sum(clock.is_well_formed(ClockConfig(base.t1, "".join(t2), base.t3))
             for t2 in itertools.product("=_<>", repeat=n))
    c3 = sum(clock.is_well_formed(ClockConfig(base.t1, base.t2, "".join(t3)))
             and "".join(t3).count("X") == n - 1 - T
             for t3 in itertools.product("=_<>X", repeat=n))
    assert c1 * c2 * c3 == clock.well_formed_count(N, T)
    assert len(list(clock.enumerate_well_formed(N, T))) == c1 * c2 * c3


def test_cycle_length_n5():
    _, rep = clock.build_graph(5, 0)
    assert rep["cycle_length"] == 84
    assert rep["ok"]


@pytest.mark.parametrize("N,T", [(4, 1), (6, 2), (7, 0)])
def test_walk_closes(N, T):
    steps = list(clock.walk(N, T))
    assert len(steps) == (2 * T + 1) * clock.p_of(N)
    last = steps[-1]
    assert clock.step_forward(last[1]) == clock.time0(N, T)


@pytest.mark.parametrize("N", [5, 6, 7, 8])
def test_each_machine_runs_N_minus_2_steps_per_period(N):
    # a sweep touches n-1 pairs and carries one machine step
    n = N - 2
    acts = Counter(r.action for _, _, r, _ in clock.walk(N, 0) if r.action)
    for a in ("BC", "check", "check_inv", "BC_inv"):
        assert acts[a] == (N - 2) * (n - 1)


def test_timer_never_changes():
    for N, T in [(6, 0), (6, 3)]:
        assert {c.timer for _, c, _, _ in clock.walk(N, T)} == {T}


def test_bad_timer_rejected():
    with pytest.raises(clock.ClockError):
        clock.time0(5, 3)


def test_enumeration_budget():
    with pytest.raises(clock.ClockError):
        clock.build_graph(10, 0)


def test_parse_round_trip():
    c = clock.time0(6, 2)
    assert ClockConfig.parse(str(c)) == c
