"""Penalized propagation matrices: half-Laplacians of cycles and paths plus
diagonal penalties, with exact closed forms and certified bounds."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import linalg

from .precision import BigFixed, fx, fx_arith, fx_compare, one_minus_cos_pi_over

DENSE_BUDGET = 5000


@dataclass(frozen=True)
class PenalizedMatrix:
    base: str                                   # "cycle" | "path"
    L: int
    penalties: tuple[tuple[int, Fraction], ...] = ()
    periodic: tuple[int, int, int] | None = None   # (r, s, l): +1 at l + k*s
    weight_periodic: Fraction = Fraction(1)

    def __post_init__(self):
        if self.base not in ("cycle", "path"):
            raise ValueError(f"unknown base {self.base!r}")
        if self.L < 1:
            raise ValueError("L must be >= 1")
        for i, _ in self.penalties:
            if not 0 <= i < self.L:
                raise ValueError(f"penalty index {i} outside 0..{self.L - 1}")
        if self.periodic is not None:
            r, s, l = self.periodic
            if r * s != self.L or not 0 <= l < s:
                raise ValueError("periodic penalty needs L = r*s and 0 <= l < s")

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.L)
        for i, w in self.penalties:
            d[i] += float(w)
        if self.periodic is not None:
            r, s, l = self.periodic
            d[l::s] += float(self.weight_periodic)
        return d

    @classmethod
    def from_json(cls, data) -> "PenalizedMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        pens = tuple((int(p["index"]), Fraction(str(p["weight"]))) for p in data.get("penalties", []))
        per = data.get("periodic")
        per = (int(per["r"]), int(per["s"]), int(per.get("l", 0))) if per else None
        return cls(data["base"], int(data["L"]), pens, per)


def cycle_with_adjacent_halves(L: int, l: int = 0) -> PenalizedMatrix:
    half = Fraction(1, 2)
    return PenalizedMatrix("cycle", L, ((l % L, half), ((l + 1) % L, half)))


def periodic_penalty(r: int, s: int, l: int = 0) -> PenalizedMatrix:
    return PenalizedMatrix("cycle", r * s, periodic=(r, s, l))


def assemble(spec: PenalizedMatrix, budget: int = DENSE_BUDGET) -> np.ndarray:
    L = spec.L
    if L > budget:
        raise ValueError(f"L={L} exceeds the dense budget {budget}")
    m = np.zeros((L, L))
    # cycles of length 1 and 2 are a self-loop and a doubled edge
    edges = [(i, i + 1) for i in range(L - 1)]
    if spec.base == "cycle":
        edges.append((L - 1, 0))
    for i, j in edges:
        m[i, i] += 0.5
        m[j, j] += 0.5
        m[i, j] -= 0.5
        m[j, i] -= 0.5
    return m + np.diag(spec.diagonal())


def _is_tridiagonal(m: np.ndarray) -> bool:
    return not np.any(np.triu(m, 2)) and not np.any(np.tril(m, -2))


def smallest_eig(m: np.ndarray, tol: float = 1e-12) -> float:
    """Smallest eigenvalue of a real symmetric matrix.

    Tridiagonal inputs go through LAPACK bisection (``stebz``) with the given
    absolute tolerance; anything else through a dense symmetric solver
    restricted to the lowest eigenvalue.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(m, m.T, atol=0, rtol=0):
        raise ValueError("matrix is not symmetric")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if m.shape[0] == 1:
        return float(m[0, 0])
    if _is_tridiagonal(m):
        w = linalg.eigh_tridiagonal(np.diag(m).copy(), np.diag(m, 1).copy(), eigvals_only=True,
                                    select="i", select_range=(0, 0), tol=tol)
        return float(w[0])
    w = linalg.eigh(m, eigvals_only=True, subset_by_index=[0, 0], driver="evr")
    return float(w[0])


def spectrum(m: np.ndarray) -> np.ndarray:
    return linalg.eigvalsh(m)


def cycle_two_halves_exact(L: int, precision_bits: int = 64) -> BigFixed:
    """Lowest eigenvalue of C_L + two adjacent 1/2 penalties: 1 - cos(pi/(L+1))."""
    if L < 3:
        raise ValueError("L must be >= 3")
    return one_minus_cos_pi_over(L + 1, precision_bits)


def cycle_eigvec(L: int) -> np.ndarray:
    """Ground eigenvector for penalties at L-1 and 0 (real form of w^(k+1) - w^-(k+1))."""
    k = np.arange(L)
    return np.sin((k + 1) * np.pi / (L + 1))


def path_half_exact(L: int, precision_bits: int = 64) -> BigFixed:
    """Lowest eigenvalue of P_L + (1/2) D_{1,L,0}: 1 - cos(pi/(2L+1))."""
    return one_minus_cos_pi_over(2 * L + 1, precision_bits)


def periodic_lower_bound(r: int, s: int, precision_bits: int = 64) -> BigFixed:
    if r < 1 or s < 1:
        raise ValueError("r, s must be >= 1")
    v = one_minus_cos_pi_over(2 * s + 1, precision_bits + 3)
    return fx_arith(v, fx(Fraction(1, 8)), "mul", precision_bits)


def fourier_block(r: int, s: int) -> np.ndarray:
    """<f_k| D_{r,s,0} |f_j> for all k, j (complex L x L)."""
    L = r * s
    idx = np.arange(L)
    F = np.exp(2j * np.pi * np.outer(idx, idx) / L) / np.sqrt(L)   # column j = f_j
    d = np.zeros(L)
    d[0::s] = 1.0
    return F.conj().T @ (d[:, None] * F)


def fourier_block_expected(r: int, s: int) -> np.ndarray:
    L = r * s
    idx = np.arange(L)
    return (idx[:, None] % r == idx[None, :] % r) / s


def cos_gap(x: int, x2: int, y: int, precision_bits: int = 64) -> BigFixed:
    """Lower bound 1/(y^2 x^4) on |cos(pi/(yx+1)) - cos(pi/(yx'+1))|."""
    if min(x, x2, y) <= 5:
        raise ValueError("x, x', y must all exceed 5")
    if x == x2:
        raise ValueError("x and x' must differ")
    return fx(Fraction(1, y * y * x ** 4), precision_bits)


def cos_gap_actual(x: int, x2: int, y: int, precision_bits: int = 128) -> BigFixed:
    a = one_minus_cos_pi_over(y * x + 1, precision_bits)
    b = one_minus_cos_pi_over(y * x2 + 1, precision_bits)
    d = a - b
    return d if d.num >= 0 else -d


def taylor_fact(theta: float, c: float) -> tuple[float, float]:
    """(1 - cos(theta/c), (2/c^2)(1 - cos theta)) evaluated stably."""
    lhs = 2 * np.sin(theta / (2 * c)) ** 2
    rhs = (2 / c ** 2) * 2 * np.sin(theta / 2) ** 2
    return float(lhs), float(rhs)


@dataclass(frozen=True)
class BoundComparison:
    holds: bool
    in_hypothesis: bool
    s4_value: BigFixed = field(repr=False)
    periodic_bound: BigFixed = field(repr=False)

    def __bool__(self) -> bool:
        return self.holds


def bound_compare(N: int, T: int, precision_bits: int = 128) -> BoundComparison:
    """Is 1 - cos(pi/((2T+1)p(N)+1)) strictly below (1/8)(1 - cos(pi/(2p(N)+1)))?"""
    from .clock import p_of

    p = p_of(N)
    bits = precision_bits
    while True:
        lhs = one_minus_cos_pi_over((2 * T + 1) * p + 1, bits)
        rhs = periodic_lower_bound(1, p, bits)
        c = fx_compare(lhs, rhs)
        if c is not None:
            return BoundComparison(c < 0, T >= 4, lhs, rhs)
        bits *= 2
