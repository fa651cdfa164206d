import json
import random

import pytest

from tihsim import tm


@pytest.fixture(scope="module")
def mbc():
    return tm.build_mbc()


def test_mbc_table_rows(mbc):
    assert mbc.rule("q0", "0") == ("qf", "1", "N")
    assert mbc.rule("q5", "0") == ("q5", "0", "L")
    assert len(mbc.states) == 7


def test_mbc_reversible(mbc):
    assert tm.check_reversible(mbc).ok


def test_single_increment(mbc):
    end, _ = tm.run(mbc, tm.TapeConfig.blank("1###", "q0"), 5)
    assert (end.state, end.work, end.head) == ("qf", "01##", 1)


def test_counter_counts_in_reversed_binary(mbc):
    # after each return to q_f at cell 1 the tape holds the next integer, LSB first
    c = tm.TapeConfig.blank("1" + "#" * 9, "q0")
    values = []
    for _ in range(2000):
        c = tm.step(mbc, c)
        if c.state == "qf" and c.head == 1:
            values.append(int(c.work.rstrip("#")[::-1], 2))
    assert values[:40] == list(range(2, 42))


def test_unidirectional_violation_detected():
    m = tm.TuringMachine("bad", (("p", "N"), ("q", "R")), ("0",),
                         {("p", "0", 0): ("q", "0", "L"), ("p", "0", 1): ("q", "0", "R")}, "p", "q")
    assert not tm.check_reversible(m).unidirectional


def test_injectivity_violation_detected():
    m = tm.TuringMachine("bad", (("p", "N"), ("q", "R")), ("0", "1"),
                         {("p", "0", 0): ("q", "0", "R"), ("p", "1", 0): ("q", "0", "R")}, "p", "q")
    assert not tm.check_reversible(m).reduced_injective


def test_mpost_turns_gamma_into_sigma():
    m = tm.build_mpost()
    assert tm.check_reversible(m).ok
    c = tm.TapeConfig.blank("axxx#", "s0")
    end, _ = tm.run_until(m, c, "sf")
    assert end.work == "AXXX#"


def test_dovetail_enters_second_machine(mbc):
    post = tm.build_mpost(("0", "1", "#"))
    both = tm.dovetail(mbc, post)
    assert len(both.states) == len(mbc.states) + len(post.states)
    c = tm.TapeConfig("1###", "0000", 1, "qf")
    assert tm.step(both, c).state == post.start
    assert tm.check_reversible(both).ok


def test_dovetail_with_renamed_copy_increments_twice(mbc):
    both = tm.dovetail(mbc, tm.rename_states(mbc, "'"))
    c = tm.TapeConfig.blank("1" + "#" * 6, "q0")
    c, _ = tm.run_until(both, c, "qf'")
    assert int(c.work.rstrip("#")[::-1], 2) == 3


def test_dovetail_rejects_state_clash(mbc):
    with pytest.raises(tm.TMError):
        tm.dovetail(mbc, mbc)


def test_add_symbol_keeps_old_behaviour(mbc):
    ext = tm.add_symbols(mbc, "Z")
    assert tm.check_reversible(ext).ok
    assert ext.rule("q3", "Z") == ("q3", "Z", "R")
    c = tm.TapeConfig.blank("11###", "q0")
    assert tm.run(ext, c, 12)[0] == tm.run(mbc, c, 12)[0]


def test_add_state_self_loop(mbc):
    m = tm.add_states(mbc, "z")
    assert m.rule("z", "0") == ("z", "0", "N")
    assert tm.check_reversible(m).ok


def test_timewaste_sweeps_right_without_writing(mbc):
    ext = tm.extend_alphabet(mbc, ("A", "R", "X"))
    t = tm.transform_timewaste(ext, ("A", "R"))
    rep = tm.check_reversible(t)
    assert rep.unidirectional and rep.reduced_injective
    c = tm.TapeConfig("A01#1X#", "0" * 7, 1, ext.final)
    tapes = []
    for _ in range(6):
        c = tm.step(t, c)
        tapes.append(c.work)
        assert c.state == "q*"
    assert set(tapes) == {"A01#1X#"}
    assert c.head == 7


def test_timewaste_needs_trigger_in_alphabet(mbc):
    with pytest.raises(tm.TMError):
        tm.transform_timewaste(mbc, ("A",))


def test_witness_never_changes(mbc):
    ext = tm.extend_alphabet(mbc, ("A", "R", "X"))
    c = tm.TapeConfig("1##A#X##", "10110010", 1, "q0")
    end, _ = tm.run(ext, c, 30)
    assert end.witness == c.witness


def test_forward_backward_identity(mbc):
    rng = random.Random(7)
    for _ in range(300):
        L = rng.randint(3, 9)
        c = tm.TapeConfig("".join(rng.choice("01#") for _ in range(L)),
                          "".join(rng.choice("01") for _ in range(L)),
                          rng.randint(1, L), rng.choice(mbc.state_names))
        t = rng.randint(1, 25)
        try:
            fwd, _ = tm.run(mbc, c, t)
        except tm.HeadOutOfBounds:
            continue
        assert tm.run_back(mbc, fwd, t) == c


def test_head_out_of_bounds_is_an_error(mbc):
    with pytest.raises(tm.HeadOutOfBounds):
        tm.run(mbc, tm.TapeConfig.blank("1#", "q0"), 10)


def test_nofx_closed_form_and_simulation_reported():
    r = tm.n_of_x("11")
    assert r.value >= 4
    assert r.head_min == 1 and r.head_max <= r.value - 4
    # closed form 5n - 2|x|_1 - 4(n mod 2) with n = 3
    assert r.closed_form == 5 * 3 - 4 - 4
    assert isinstance(r.delta, int)


def test_nofx_rejects_bad_input():
    with pytest.raises(ValueError):
        tm.n_of_x("10")


def test_json_round_trip(mbc):
    data = json.loads(json.dumps(tm.machine_to_json(mbc)))
    back = tm.machine_from_json(data)
    assert dict(back.delta) == dict(mbc.delta)
    assert back.states == mbc.states
