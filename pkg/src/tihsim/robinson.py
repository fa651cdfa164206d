"""Square hierarchy of a Robinson tiling on an L x L grid, placed by
coordinate arithmetic, and the finite-grid ground-energy interval."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from .precision import BigFixed, fx


def pitch(k: int) -> int:
    return 2 ** (2 * k + 1)


def k_top(L: int) -> int:
    """floor(log4(L/2)): the largest k with 2 * 4^k <= L (0 if none)."""
    k = 0
    while 2 * 4 ** (k + 1) <= L:
        k += 1
    return k


@dataclass(frozen=True)
class SquareHierarchy:
    """Size-4^k squares with top-left corners on the pitch-2*4^k lattice.

    Only the per-axis corner ranges are stored; segment lists are generated
    on demand since level-1 counts grow like L^2/32.
    """
    L: int

    def __post_init__(self):
        if self.L < 4:
            raise ValueError("L must be >= 4")

    def levels(self) -> range:
        k = 1
        while 4 ** (k + 1) <= self.L:
            k += 1
        return range(1, k + 1)

    def axis(self, k: int) -> range:
        """Corner coordinates along one axis for squares fully inside the grid."""
        return range(0, self.L - 4 ** k + 1, pitch(k))

    def count(self, k: int) -> int:
        return len(self.axis(k)) ** 2

    def segments(self, k: int) -> Iterator[tuple[int, int, int]]:
        """(row, column start, length) of every top edge at level k."""
        side = 4 ** k
        for r in self.axis(k):
            for c in self.axis(k):
                yield r, c, side

    def density(self, k: int) -> Fraction:
        return Fraction(self.count(k), self.L ** 2)

    def to_json(self, max_level: int | None = None) -> dict:
        return {"L": self.L, "levels": {
            str(k): [list(s) for s in self.segments(k)]
            for k in self.levels() if max_level is None or k <= max_level}}


def hierarchy(L: int) -> SquareHierarchy:
    return SquareHierarchy(L)


def count_interval(L: int, k: int) -> tuple[int, int]:
    d = L // pitch(k)
    return d * (d - 1), d * (d + 1)


def segments_disjoint(h: SquareHierarchy, k: int) -> bool:
    by_row: dict[int, list[tuple[int, int]]] = {}
    for r, c, n in h.segments(k):
        by_row.setdefault(r, []).append((c, c + n))
    for spans in by_row.values():
        spans.sort()
        if any(a[1] > b[0] for a, b in zip(spans, spans[1:])):
            return False
    return True


def children(h: SquareHierarchy, k: int, r: int, c: int) -> list[tuple[int, int]]:
    """Level-(k-1) squares lying inside the level-k square at (r, c)."""
    side, sub = 4 ** k, 4 ** (k - 1)
    inside = [a for a in h.axis(k - 1) if r <= a and a + sub <= r + side]
    cols = [a for a in h.axis(k - 1) if c <= a and a + sub <= c + side]
    return [(a, b) for a in inside for b in cols]


def nesting_ok(h: SquareHierarchy) -> bool:
    """Every square above level 1 holds exactly four squares of the next size down."""
    for k in h.levels():
        if k == 1:
            continue
        for r, c, _ in h.segments(k):
            if len(children(h, k, r, c)) != 4:
                return False
    return True


def render_ascii(h: SquareHierarchy, max_side: int = 128) -> str:
    if h.L > max_side:
        raise ValueError(f"grid side {h.L} too large to render (max {max_side})")
    grid = [["." for _ in range(h.L)] for _ in range(h.L)]
    for k in h.levels():
        mark = str(k % 10)
        for r, c, n in h.segments(k):
            for j in range(n):
                for y, x in ((r, c + j), (r + n - 1, c + j), (r + j, c), (r + j, c + n - 1)):
                    grid[y][x] = mark
    return "\n".join("".join(row) for row in grid)


def _as_fx(v) -> BigFixed:
    return v if isinstance(v, BigFixed) else fx(Fraction(v))


@dataclass(frozen=True)
class EnergyInterval:
    L: int
    lo: BigFixed
    hi: BigFixed

    def density(self) -> tuple[Fraction, Fraction]:
        a = Fraction(1, self.L ** 2)
        return self.lo.to_fraction() * a, self.hi.to_fraction() * a


def energy_interval(L: int, lambdas: Mapping[int, object]) -> EnergyInterval:
    """Floor-product bounds on the ground energy of the L x L grid."""
    lo = hi = fx(0)
    for k in range(1, k_top(L) + 1):
        if k not in lambdas:
            raise KeyError(f"missing lambda for k={k}")
        lam = _as_fx(lambdas[k])
        d = L // pitch(k)
        lo = lo + lam * (d * (d - 1))
        hi = hi + lam * (d * (d + 1))
    return EnergyInterval(L, lo, hi)


def truncated_density(L: int, lambdas: Mapping[int, object]) -> Fraction:
    return sum((_as_fx(lambdas[k]).to_fraction() / 4 ** (2 * k + 1)
                for k in range(1, k_top(L) + 1)), Fraction(0))
