from fractions import Fraction

import mpmath
import pytest

from tihsim.precision import (BigFixed, fx, fx_arith, fx_compare, fx_to_decimal, log2_floor,
                              one_minus_cos_pi_over, pi_fixed, round_to)


def _contains(v: BigFixed, exact) -> bool:
    lo, hi = v.interval()
    return mpmath.mpf(lo.numerator) / lo.denominator <= exact <= mpmath.mpf(hi.numerator) / hi.denominator


@pytest.mark.parametrize("bits", [16, 64, 200, 1000])
def test_pi_enclosure(bits):
    mpmath.mp.prec = bits + 64
    v = pi_fixed(bits)
    assert v.error_bound <= Fraction(1, 2 ** bits)
    assert _contains(v, mpmath.pi)


@pytest.mark.parametrize("L1", [3, 9, 10, 201, 12_345, 10 ** 9 + 7, 4 ** 30])
@pytest.mark.parametrize("bits", [53, 128, 512])
def test_one_minus_cos_matches_mpmath(L1, bits):
    mpmath.mp.prec = bits + 2 * L1.bit_length() + 64
    exact = 1 - mpmath.cos(mpmath.pi / L1)
    v = one_minus_cos_pi_over(L1, bits)
    assert v.error_bound <= Fraction(1, 2 ** bits)
    assert _contains(v, exact)


def test_decimal_rendering_of_l8():
    assert fx_to_decimal(one_minus_cos_pi_over(9, 64), 12) == "0.060307379214"


def test_arith_is_exact_on_dyadics():
    a, b = fx(Fraction(3, 8)), fx(Fraction(5, 16))
    assert (a + b).to_fraction() == Fraction(11, 16)
    assert (a - b).to_fraction() == Fraction(1, 16)
    assert (a * b).to_fraction() == Fraction(15, 128)
    assert (a + b).exact


def test_division_error_is_bounded():
    q = fx_arith(fx(1), fx(3), "div", 80)
    lo, hi = q.interval()
    assert lo <= Fraction(1, 3) <= hi
    assert hi - lo <= Fraction(2, 2 ** 80)


def test_compare_undecided_when_intervals_overlap():
    a = fx(Fraction(1, 3), 10)
    b = fx(Fraction(1, 3) + Fraction(1, 2 ** 40), 10)
    assert fx_compare(a, b) is None
    assert fx_compare(fx(Fraction(1, 3), 60), fx(Fraction(1, 3) + Fraction(1, 2 ** 40), 60)) == -1


def test_round_to_keeps_enclosure():
    v = one_minus_cos_pi_over(1001, 300)
    r = round_to(v, 40)
    lo, hi = r.interval()
    assert lo <= v.to_fraction() <= hi
    assert r.error_bound <= Fraction(1, 2 ** 40)


def test_log2_floor():
    assert log2_floor(Fraction(1, 8)) == -3
    assert log2_floor(Fraction(9, 8)) == 0
    assert log2_floor(Fraction(1023)) == 9
