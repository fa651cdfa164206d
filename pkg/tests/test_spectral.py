import json
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from tihsim import spectral as sp


def _mp_omc(L1):
    mpmath.mp.dps = 40
    return float(1 - mpmath.cos(mpmath.pi / L1))


def test_l8_example():
    m = sp.assemble(sp.cycle_with_adjacent_halves(8))
    assert sp.smallest_eig(m) == pytest.approx(0.060307379214, abs=1e-12)


@pytest.mark.parametrize("L", [3, 4, 7, 30, 151])
def test_closed_form_against_mpmath_and_eigvalsh(L):
    m = sp.assemble(sp.cycle_with_adjacent_halves(L))
    ev = np.linalg.eigvalsh(m)[0]
    assert ev == pytest.approx(_mp_omc(L + 1), abs=1e-12)
    assert sp.smallest_eig(m) == pytest.approx(ev, abs=1e-12)


@pytest.mark.parametrize("L", [5, 12])
def test_ground_vector(L):
    m = sp.assemble(sp.cycle_with_adjacent_halves(L, l=L - 1))
    v = sp.cycle_eigvec(L)
    lam = float(sp.cycle_two_halves_exact(L).to_fraction())
    assert np.allclose(m @ v, lam * v, atol=1e-12)


@pytest.mark.parametrize("L", [1, 2, 5, 40])
def test_path_with_half_penalty(L):
    m = sp.assemble(sp.PenalizedMatrix("path", L, ((0, Fraction(1, 2)),)))
    assert sp.smallest_eig(m) == pytest.approx(_mp_omc(2 * L + 1), abs=1e-12)


def test_dense_route_for_non_tridiagonal():
    m = sp.assemble(sp.periodic_penalty(4, 5))
    assert sp.smallest_eig(m) == pytest.approx(np.linalg.eigvalsh(m)[0], abs=1e-12)


def test_asymmetric_rejected():
    with pytest.raises(ValueError):
        sp.smallest_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_budget():
    with pytest.raises(ValueError):
        sp.assemble(sp.cycle_with_adjacent_halves(50), budget=10)


def test_degenerate_cycles():
    assert sp.assemble(sp.periodic_penalty(1, 1)).tolist() == [[1.0]]
    assert sp.assemble(sp.PenalizedMatrix("cycle", 2)).tolist() == [[1.0, -1.0], [-1.0, 1.0]]


def test_periodic_example():
    m = sp.assemble(sp.periodic_penalty(3, 5))
    assert sp.smallest_eig(m) >= float(sp.periodic_lower_bound(3, 5).to_fraction())


def test_fourier_block():
    got = sp.fourier_block(3, 4)
    assert np.max(np.abs(got - sp.fourier_block_expected(3, 4))) < 1e-12


def test_cos_gap_bound():
    for x, x2, y in [(6, 7, 6), (10, 30, 7), (100, 101, 9)]:
        assert sp.cos_gap_actual(x, x2, y).to_fraction() >= sp.cos_gap(x, x2, y).to_fraction()
    with pytest.raises(ValueError):
        sp.cos_gap(5, 7, 9)


def test_taylor_fact_on_grid():
    for theta in np.linspace(0.01, 0.99, 25):
        for c in np.linspace(1.0, 50.0, 40):
            lhs, rhs = sp.taylor_fact(theta, c)
            assert lhs <= rhs * (1 + 1e-12)


def test_bound_compare_hypothesis():
    assert sp.bound_compare(4, 4).holds
    r = sp.bound_compare(4, 0)
    assert not r.in_hypothesis and not r.holds


def test_matrix_json():
    spec = sp.PenalizedMatrix.from_json(json.dumps(
        {"base": "cycle", "L": 6, "penalties": [{"index": 5, "weight": "1/2"}, {"index": 0, "weight": "0.5"}]}))
    assert sp.smallest_eig(sp.assemble(spec)) == pytest.approx(_mp_omc(7), abs=1e-12)
