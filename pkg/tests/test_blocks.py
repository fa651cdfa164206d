import json
from fractions import Fraction

import mpmath
import pytest

from tihsim import blocks, clock, tm
from tihsim.blocks import BlockSpec


@pytest.fixture(scope="module")
def insts():
    return {n: blocks.load_instance(n) for n in blocks.TOY_INSTANCES}


def test_t_formula_by_hand():
    # m=1, f=1, y=1: 1 + 2 * (4^2 + 4^1)
    assert blocks.t_formula(1, 1, "1") == 41
    assert blocks.t_formula(0, 0, "") == 4
    with pytest.raises(ValueError):
        blocks.t_formula(1, 2, "0")


def test_y_tilde_follows_adaptive_queries(insts):
    m2 = insts["toy-m2"]
    assert blocks.y_tilde(m2, "3") == "10"        # qa is yes, then qc is no
    assert blocks.y_tilde(insts["toy-m1"], "2") == "0"
    assert blocks.in_y_rej(m2, "3", "11")
    assert not blocks.in_y_rej(m2, "3", "10")


def test_verifier(insts):
    m1 = insts["toy-m1"]
    assert blocks.verifier_accepts(m1, "1", "1101")
    assert not blocks.verifier_accepts(m1, "1", "1100")
    assert blocks.verifier_accepts(m1, "1", "0000")     # nothing to certify


def test_instance_json_round_trip(insts, tmp_path):
    m1 = insts["toy-m1"]
    p = tmp_path / "copy.json"
    p.write_text(json.dumps(m1.to_json()))
    assert blocks.load_instance(str(p)).digest() == m1.digest()
    data = m1.to_json()
    data["f"] = {"*|*": 1}
    assert blocks.OracleInstance.from_json(data).digest() != m1.digest()


def test_instance_validation():
    with pytest.raises(ValueError):
        blocks.OracleInstance.from_json({"name": "bad", "m": {"*": 1}, "queries": {"*|": "q"},
                                         "language": {"q": True}, "witnesses": {}, "wlen": 1,
                                         "f": {"*|*": 0}})


@pytest.mark.parametrize("N", [7, 45, 47, 325])
def test_valid_N_agrees_with_counter_simulation(N):
    assert blocks.is_valid_N(N)
    assert tm.n_of_x(blocks.x_of_N(N)).value == N


def test_smallest_valid_N(insts):
    got = {n: blocks.smallest_valid_N(i) for n, i in insts.items()}
    assert got == {"toy-m0": 7, "toy-m1": 45, "toy-m2": 325}
    for n, N in got.items():
        x = blocks.x_of_N(N)
        assert blocks.t_of_xy(insts[n], x, blocks.y_tilde(insts[n], x)) <= N - 3


def test_block_classes(insts):
    m0 = insts["toy-m0"]
    assert blocks.classify_block(m0, BlockSpec(7, 4, "000")) == "S4"
    assert blocks.classify_block(m0, BlockSpec(7, 3, "000")) == "S2"
    bad = tm.TapeConfig("0####", "00000", 1, "q0")
    assert blocks.classify_block(m0, BlockSpec(7, 4, "000", bad)) == "S1"
    m1 = insts["toy-m1"]
    N = 47                                   # x = 1101 asks a no-query
    x = blocks.x_of_N(N)
    T = blocks.t_of_xy(m1, x, "1")
    assert T <= N - 3
    assert blocks.classify_block(m1, BlockSpec(N, T, "1" + "0" * (N - 5))) == "S3"


@pytest.mark.parametrize("N", [6, 8])
@pytest.mark.parametrize("fill", ["0", "1"])
def test_semantic_and_walk_profiles_agree(N, fill):
    mach = blocks.toy_machines()
    for T in range(N - 2):
        b = BlockSpec(N, T, fill * (N - 4))
        a = blocks.penalty_profile(None, b, "semantic", mach)
        w = blocks.penalty_profile(None, b, "track-walk", mach)
        assert a.hits == w.hits


def test_final_pair_is_adjacent():
    prof = blocks.penalty_profile(None, BlockSpec(6, 1, "00"), "track-walk", blocks.toy_machines())
    pair = prof.final_pair()
    assert len(pair) == 2 and (pair[1] - pair[0]) % prof.length in (1, prof.length - 1)


def test_cycle_check_and_mutation():
    mach = blocks.toy_machines()
    assert blocks.track_walk_cycle_check(8, 2, "0000", mach)
    assert not blocks.track_walk_cycle_check(8, 2, "0000", blocks.mutate(mach))


def test_s4_numeric_matches_closed_form(insts):
    b = BlockSpec(7, 4, "000")
    num = blocks.numeric_block_energy(insts["toy-m0"], b)
    mpmath.mp.dps = 30
    want = 1 - mpmath.cos(mpmath.pi / ((2 * 4 + 1) * clock.p_of(7) + 1))
    assert num == pytest.approx(float(want), rel=1e-6)


def test_s2_numeric_above_bound(insts):
    bound = float(blocks.periodic_bound(7).to_fraction())
    for T in range(4):
        num = blocks.numeric_block_energy(insts["toy-m0"], BlockSpec(7, T, "000"))
        assert num >= bound - 1e-12


def test_global_minimum_toy_m0(insts):
    g = blocks.global_ground_energy(insts["toy-m0"], 7)
    assert g.argmin_y == "" and g.argmin.T == 4
    assert g.matches_closed_form


def test_global_minimum_toy_m1(insts):
    g = blocks.global_ground_energy(insts["toy-m1"], 45)
    assert g.argmin_y == "1"
    assert g.others_strictly_higher
    mpmath.mp.dps = 40
    T = blocks.t_of_xy(insts["toy-m1"], g.x, "1")
    want = 1 - mpmath.cos(mpmath.pi / ((2 * T + 1) * clock.p_of(45) + 1))
    assert abs(mpmath.mpf(g.energy.to_fraction().numerator) / g.energy.to_fraction().denominator
               - want) < mpmath.mpf(10) ** -25


def test_budget_guard(insts):
    with pytest.raises(blocks.BudgetExceeded):
        blocks.global_ground_energy(insts["toy-m2"], 325, budget=100)
