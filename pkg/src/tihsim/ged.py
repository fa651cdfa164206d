"""Ground-energy density series, recovery of f(x) from it, and the
two-query binary search against a promise oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import blocks
from .clock import p_of
from .precision import (BigFixed, fx, fx_compare, fx_to_decimal, frac_bits_needed,
                        one_minus_cos_pi_over, round_to)


# -- helpers -----------------------------------------------------------------

def _shift(v: BigFixed, k: int) -> BigFixed:
    """Exact division by 2**k."""
    return BigFixed(v.num, v.scale - k, v.err, None if v.cap is None else v.cap + k)


def _widen(v: BigFixed, extra: Fraction) -> BigFixed:
    """Same value, error bound enlarged by ``extra``."""
    if extra <= 0:
        return v
    half_ulp = Fraction(2) ** (v.scale - 1)
    add = math.ceil(extra / half_ulp)
    return BigFixed(v.num, v.scale, v.err + add, v.cap)


def n_k(k: int) -> int:
    return 4 ** (k * k)


def t_tilde(inst: blocks.OracleInstance, s: int) -> int:
    x = str(s)
    return blocks.t_of_xy(inst, x, blocks.y_tilde(inst, x))


def _lam_bits(L_plus_1: int, bits: int) -> BigFixed:
    return one_minus_cos_pi_over(L_plus_1, max(bits, 8))


def l_of(s: int, T: int, precision_bits: int) -> BigFixed:
    """(1 - cos(pi/((2T+1)p(N_s)+1))) / 4^(2 s^2 + 1), absolute error <= 2^-precision_bits."""
    sh = 2 * (2 * s * s + 1)
    lam = _lam_bits((2 * T + 1) * p_of(n_k(s)) + 1, precision_bits - sh + 2)
    return _shift(lam, sh)


def l_magnitude_bits(s: int, T: int) -> int:
    """Rough -log2 of l(s) (used only to size working precision)."""
    L = (2 * T + 1) * p_of(n_k(s)) + 1
    return 2 * L.bit_length() + 2 * (2 * s * s + 1)


# -- the series ----------------------------------------------------------------

@dataclass(frozen=True)
class GedSeries:
    instance: blocks.OracleInstance
    K: frozenset = frozenset()           # k values whose 4^k chains do not finish
    k_max: int | None = None
    precision_bits: int = 128

    def with_K(self, K) -> "GedSeries":
        return GedSeries(self.instance, frozenset(K), self.k_max, self.precision_bits)


def lambda0_4k(series: GedSeries, k: int, precision_bits: int | None = None) -> BigFixed:
    if k < 1:
        raise ValueError("k must be >= 1")
    bits = series.precision_bits if precision_bits is None else precision_bits
    s = math.isqrt(k)
    if k in series.K or s * s != k:
        return fx(0)
    T = t_tilde(series.instance, s)
    return one_minus_cos_pi_over((2 * T + 1) * p_of(4 ** k) + 1, bits)


def required_k_max(precision_bits: int) -> int:
    """Least K with 4^-(2K+2)/3 <= 2^-(precision_bits+1)."""
    K = 1
    while Fraction(1, 3 * 4 ** (2 * K + 2)) > Fraction(1, 2 ** (precision_bits + 1)):
        K += 1
    return K


def alpha0(series: GedSeries, precision_bits: int | None = None,
           k_max: int | None = None, lam_fn: Callable | None = None) -> BigFixed:
    """Truncated sum of lambda0(4^k)/4^(2k+1), certified to 2^-precision_bits.

    ``lam_fn(k, bits)`` may stand in for ``lambda0_4k`` (e.g. a cached lookup).
    """
    P = series.precision_bits if precision_bits is None else precision_bits
    need = required_k_max(P)
    K = k_max if k_max is not None else series.k_max if series.k_max is not None else need
    if K < need:
        raise ValueError(f"k_max={K} leaves a tail above 2^-{P}; need k_max >= {need}")
    terms = [s * s for s in range(1, math.isqrt(K) + 1)]
    wb = P + 2 + max(1, len(terms)).bit_length()
    total = fx(0)
    for k in terms:
        if k in series.K:
            continue
        bits = max(8, wb - 2 * (2 * k + 1) + 2)
        lam = lam_fn(k, bits) if lam_fn else lambda0_4k(series, k, bits)
        total = total + _shift(lam, 2 * (2 * k + 1))
    total = round_to(total, P + 1) if total.scale < -(P + 3) else total
    tail = Fraction(1, 3 * 4 ** (2 * K + 2))
    return _widen(total, tail)


def series_tail_bound(k_max: int) -> Fraction:
    return Fraction(1, 3 * 4 ** (2 * k_max + 2))


# -- extraction ------------------------------------------------------------------

def q_of(inst: blocks.OracleInstance, x: int) -> int:
    """Least q with 2^-q <= l(x+1), l evaluated at T(x+1, y~)."""
    s = x + 1
    T = t_tilde(inst, s)
    bits = l_magnitude_bits(s, T) + 16
    lo, _ = l_of(s, T, bits).interval()
    if lo <= 0:
        raise ArithmeticError("l(x+1) not resolved; raise precision")
    return frac_bits_needed(lo)


class ExtractionError(ArithmeticError):
    pass


@dataclass
class ExtractResult:
    x: int
    q_bits: int
    recovered_f: int | None
    status: str                          # "ok" | "insufficient-k"
    T_values: list = field(default_factory=list)   # [(s, T_s)]
    precision_highwater: int = 0

    def to_json(self) -> dict:
        return {"x": self.x, "q_bits": self.q_bits, "recovered_f": self.recovered_f,
                "status": self.status,
                "T_values": [{"s": s, "T": T} for s, T in self.T_values],
                "precision_highwater": self.precision_highwater}


def extract_f(alpha: BigFixed | Fraction, x: int, inst: blocks.OracleInstance,
              K=frozenset(), slack_bits: int | None = None) -> ExtractResult:
    """Recover f(x) from an approximation of alpha0 within 2^-q(x).

    The extractor uses only the shape of the series (p(.), the T formula, m
    per input, and K); the instance's f table is never read.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    q = q_of(inst, x)
    slack = slack_bits if slack_bits is not None else 8 + 2 * x.bit_length()
    P = q + slack
    a = alpha.to_fraction() if isinstance(alpha, BigFixed) else Fraction(alpha)
    err = Fraction(1, 2 ** q)            # the input contract
    res = ExtractResult(x, q, None, "ok", precision_highwater=P)
    for s in range(1, x + 1):
        if s * s in K:
            if s == x:
                res.status = "insufficient-k"
                return res
            continue
        m = inst.m_of(str(s))
        # everything after l(s) sums to at most 2 l(s+1), and l(s+1) is largest at T = 4
        rest = 2 * l_of(s + 1, 4, P).interval()[1]
        hits = []
        for T in range(4, 2 ** (3 * m + 3) + 1):
            lt = l_of(s, T, P)
            lo, hi = lt.interval()
            # need a - l_T in [-err, rest + err]
            if a - hi <= rest + err and a - lo >= -err:
                hits.append((T, lt))
        if len(hits) != 1:
            cands = [T for T, _ in hits]
            raise ExtractionError(
                f"s={s}: {len(hits)} timer values fit the residual window "
                f"[-{float(err):.3e}, {float(rest + err):.3e}] (candidates {cands[:8]})")
        T, lt = hits[0]
        res.T_values.append((s, T))
        a -= lt.to_fraction()
        err += lt.error_bound
        if s == x:
            res.recovered_f = T % (2 ** m)
    return res


# -- promise oracle and binary search ----------------------------------------------

class ContractViolation(RuntimeError):
    pass


@dataclass
class PromiseOracle:
    """Accept if lam0 <= lam, Reject if lam0 >= lam + gap, adversary in between."""
    lam0: Fraction
    adversary: str | Callable = "accept"
    log: list = field(default_factory=list)

    def query(self, lam: Fraction, gap: Fraction) -> str:
        if self.lam0 <= lam:
            ans = "Accept"
        elif self.lam0 >= lam + gap:
            ans = "Reject"
        elif callable(self.adversary):
            ans = self.adversary(lam, gap)
        else:
            ans = {"accept": "Accept", "reject": "Reject"}[self.adversary]
        self.log.append((lam, gap, ans))
        return ans


@dataclass
class SearchResult:
    l: Fraction
    u: Fraction
    rounds: list


def binary_search(oracle: PromiseOracle, r: int,
                  on_round: Callable | None = None) -> SearchResult:
    l, u = Fraction(0), Fraction(1)
    rounds = []
    for j in range(1, r + 1):
        gap = Fraction(1, 2 ** (j + 1))
        lam1, lam2 = l + gap, l + 2 * gap
        a1, a2 = oracle.query(lam1, gap), oracle.query(lam2, gap)
        if a1 == "Accept" and a2 == "Reject":
            raise ContractViolation(f"round {j}: Accept at {lam1} but Reject at {lam2}")
        if a1 == "Accept":
            branch = "accept"
            u = l + Fraction(1, 2 ** j)
        elif a2 == "Reject":
            branch = "reject-reject"
            l = l + Fraction(1, 2 ** j)
        else:
            branch = "reject-accept"
            u = l + 3 * gap
            l = l + gap
        rounds.append((j, branch, l, u))
        if on_round:
            on_round(j, branch, l, u)
    return SearchResult(l, u, rounds)


# -- decay claims ----------------------------------------------------------------

def decay_checks(inst: blocks.OracleInstance, ks=(1, 2, 3), precision_bits: int | None = None) -> list:
    rows = []
    for k in ks:
        Tk, Tk1 = t_tilde(inst, k), t_tilde(inst, k + 1)
        bound = n_k(k + 1) // n_k(k)
        bits = precision_bits or l_magnitude_bits(k + 1, Tk1) + 32
        lk, lk1 = l_of(k, Tk, bits), l_of(k + 1, Tk1, bits)
        c = fx_compare(2 * lk1, lk)
        ratio = lk.to_fraction() / lk1.to_fraction()
        rows.append({
            "k": k, "T_k": Tk, "N_ratio": bound, "T_ok": Tk <= bound,
            "T_margin": str(Fraction(bound, Tk)),
            "l_ratio_log2": round(math.log2(ratio), 3),
            "l_ok": c == -1,
            "l_k": fx_to_decimal(lk, 60),
        })
    return rows
