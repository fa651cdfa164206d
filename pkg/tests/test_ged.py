import random
from fractions import Fraction

import mpmath
import pytest

from tihsim import blocks, clock, ged


@pytest.fixture(scope="module", params=blocks.TOY_INSTANCES)
def inst(request):
    return blocks.load_instance(request.param)


def _mp(fr: Fraction):
    return mpmath.mpf(fr.numerator) / fr.denominator


def _mp_l(inst, s):
    T = ged.t_tilde(inst, s)
    L1 = (2 * T + 1) * clock.p_of(4 ** (s * s)) + 1
    return (1 - mpmath.cos(mpmath.pi / L1)) / mpmath.mpf(4) ** (2 * s * s + 1)


def test_alpha0_against_mpmath(inst):
    mpmath.mp.prec = 600
    a = ged.alpha0(ged.GedSeries(inst, precision_bits=256))
    want = sum(_mp_l(inst, s) for s in range(1, 5))
    assert abs(_mp(a.to_fraction()) - want) <= _mp(a.error_bound) + mpmath.mpf(2) ** -256


def test_q_definition(inst):
    mpmath.mp.prec = 800
    for x in (1, 2, 3):
        q = ged.q_of(inst, x)
        l = _mp_l(inst, x + 1)
        assert mpmath.mpf(2) ** -q <= l < mpmath.mpf(2) ** -(q - 1)


def test_extraction_round_trip(inst):
    a = ged.alpha0(ged.GedSeries(inst, precision_bits=1024)).to_fraction()
    for x in (1, 2, 3):
        want = inst.f_of(str(x), blocks.y_tilde(inst, str(x)))
        eps = Fraction(1, 2 ** (ged.q_of(inst, x) + 1))
        for d in (0, eps, -eps, eps / 3):
            assert ged.extract_f(a + d, x, inst).recovered_f == want


def test_extraction_reports_timer_values(inst):
    a = ged.alpha0(ged.GedSeries(inst, precision_bits=512)).to_fraction()
    res = ged.extract_f(a, 2, inst)
    assert [T for _, T in res.T_values] == [ged.t_tilde(inst, 1), ged.t_tilde(inst, 2)]


def test_insufficient_k():
    inst = blocks.load_instance("toy-m1")
    series = ged.GedSeries(inst, frozenset({1}), precision_bits=512)
    a = ged.alpha0(series).to_fraction()
    assert ged.extract_f(a, 1, inst, series.K).status == "insufficient-k"
    assert ged.extract_f(a, 2, inst, series.K).recovered_f == 0


def test_truncation_guard():
    inst = blocks.load_instance("toy-m0")
    with pytest.raises(ValueError, match="k_max"):
        ged.alpha0(ged.GedSeries(inst, precision_bits=256), k_max=2)


def test_tail_bound_exceeds_true_tail():
    # sum_{k > K} 4^-(2k+1) is 4^-(2K+1)/15
    for K in (1, 3, 8):
        assert ged.series_tail_bound(K) >= Fraction(1, 15 * 4 ** (2 * K + 1))


def test_binary_search_exact_width():
    rng = random.Random(5)
    for _ in range(20):
        lam0 = Fraction(rng.randint(0, 997), 997)
        for adv in ("accept", "reject", lambda lam, gap: random.Random(0).choice(["Accept", "Reject"])):
            r = ged.binary_search(ged.PromiseOracle(lam0, adv), 30)
            assert r.u - r.l == Fraction(1, 2 ** 30)
            assert r.l <= lam0 <= r.u


def test_binary_search_contract_violation():
    class Liar:
        def query(self, lam, gap):
            return "Accept" if lam < Fraction(1, 3) else "Reject"
    with pytest.raises(ged.ContractViolation):
        ged.binary_search(Liar(), 3)


def test_decay(inst):
    for row in ged.decay_checks(inst):
        assert row["T_ok"] and row["l_ok"]
