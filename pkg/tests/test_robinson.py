from fractions import Fraction

import pytest

from tihsim import robinson as rb


def test_smallest_grid_has_one_square():
    h = rb.hierarchy(4)
    assert list(h.levels()) == [1]
    assert h.count(1) == 1
    assert list(h.segments(1)) == [(0, 0, 4)]


@pytest.mark.parametrize("m", range(2, 7))
def test_counts_in_interval_and_density(m):
    L = 4 ** m
    h = rb.hierarchy(L)
    for k in range(1, rb.k_top(L) + 1):
        lo, hi = rb.count_interval(L, k)
        assert lo <= h.count(k) <= hi
        assert h.density(k) == Fraction(1, 4 ** (2 * k + 1))


def test_squares_fit_inside_grid():
    L = 256
    h = rb.hierarchy(L)
    for k in h.levels():
        for r, c, n in h.segments(k):
            assert r + n <= L and c + n <= L


def test_nesting_and_disjointness():
    h = rb.hierarchy(256)
    assert rb.nesting_ok(h)
    assert all(rb.segments_disjoint(h, k) for k in h.levels())


def test_brute_force_placement_counts():
    # count lattice corners by scanning every cell
    L = 64
    h = rb.hierarchy(L)
    for k in h.levels():
        side, step = 4 ** k, 2 * 4 ** k
        n = sum(1 for r in range(L) for c in range(L)
                if r % step == 0 and c % step == 0 and r + side <= L and c + side <= L)
        assert n == h.count(k)


def test_energy_interval_brackets_density():
    lams = {1: Fraction(1, 10), 2: Fraction(1, 1000), 3: Fraction(1, 10 ** 5)}
    for L in (16, 64, 256):
        lo, hi = rb.energy_interval(L, lams).density()
        assert lo <= rb.truncated_density(L, lams) <= hi


def test_missing_lambda():
    with pytest.raises(KeyError):
        rb.energy_interval(64, {1: Fraction(1, 10)})


def test_render():
    art = rb.render_ascii(rb.hierarchy(16))
    rows = art.splitlines()
    assert len(rows) == 16 and rows[0] == "2" * 16
    with pytest.raises(ValueError):
        rb.render_ascii(rb.hierarchy(1024))
