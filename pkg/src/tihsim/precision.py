"""Fixed-point numbers with an explicit, certified absolute error.

A value is ``num * 2**scale``.  Alongside it we carry an error bound
``err`` measured in half-ulps (units of ``2**(scale-1)``), so the true
quantity lies within ``err * 2**(scale-1)`` of the stored one.  An error
bound of zero means the value is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "BigFixed",
    "fx",
    "fx_arith",
    "fx_to_decimal",
    "one_minus_cos_pi_over",
    "pi_fixed",
]

DEFAULT_BITS = 64


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _round_shift(n: int, k: int) -> int:
    """Round n / 2**k to nearest (ties away from zero); k may be negative."""
    if k <= 0:
        return n << -k
    half = 1 << (k - 1)
    if n >= 0:
        return (n + half) >> k
    return -((-n + half) >> k)


def _bits_for(err: Fraction) -> int | None:
    # largest p with err <= 2**-p
    if err == 0:
        return None
    e = log2_floor(err)
    return -e if _pow2(e) == err else -(e + 1)


@dataclass(frozen=True)
class BigFixed:
    num: int
    scale: int
    err: int = 0            # half-ulps
    cap: int | None = None  # declared precision ceiling, if one was requested

    @property
    def sign(self) -> str:
        return "-" if self.num < 0 else "+"

    @property
    def mantissa(self) -> int:
        return abs(self.num)

    @property
    def exact(self) -> bool:
        return self.err == 0

    @property
    def error_bound(self) -> Fraction:
        return self.err * _pow2(self.scale - 1)

    @property
    def precision_bits(self) -> int | None:
        """Guaranteed absolute error is at most 2**-precision_bits (None when exact)."""
        p = _bits_for(self.error_bound)
        if p is None:
            return self.cap
        return p if self.cap is None else min(p, self.cap)

    def to_fraction(self) -> Fraction:
        return self.num * _pow2(self.scale)

    def __float__(self) -> float:
        return float(self.to_fraction())

    def __neg__(self) -> "BigFixed":
        return BigFixed(-self.num, self.scale, self.err, self.cap)

    def __add__(self, other):
        return fx_arith(self, _coerce(other), "add")

    __radd__ = __add__

    def __sub__(self, other):
        return fx_arith(self, _coerce(other), "sub")

    def __rsub__(self, other):
        return fx_arith(_coerce(other), self, "sub")

    def __mul__(self, other):
        return fx_arith(self, _coerce(other), "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        return fx_arith(self, _coerce(other), "div")

    def __rtruediv__(self, other):
        return fx_arith(_coerce(other), self, "div")

    def interval(self) -> tuple[Fraction, Fraction]:
        v, e = self.to_fraction(), self.error_bound
        return v - e, v + e

    def __repr__(self) -> str:
        p = self.precision_bits
        tag = "exact" if p is None else f"±2^-{p}"
        return f"BigFixed({fx_to_decimal(self, 20)} {tag})"


def _pow2(k: int) -> Fraction:
    return Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k)


def _coerce(v) -> BigFixed:
    if isinstance(v, BigFixed):
        return v
    if isinstance(v, int):
        return BigFixed(v, 0)
    raise TypeError(f"cannot combine BigFixed with {type(v).__name__}")


def fx(value, precision_bits: int | None = None) -> BigFixed:
    """Build a BigFixed from an int, Fraction or decimal string.

    Dyadic rationals are stored exactly; anything else is rounded to
    ``precision_bits`` (default 64) fractional bits.
    """
    if isinstance(value, BigFixed):
        return value
    fr = Fraction(value)
    d = fr.denominator
    if d & (d - 1) == 0:
        k = d.bit_length() - 1
        return BigFixed(fr.numerator, -k)
    bits = DEFAULT_BITS if precision_bits is None else precision_bits
    s = bits + 1
    num = _round_fraction(fr * (1 << s))
    return BigFixed(num, -s, 1, bits)


def _round_fraction(fr: Fraction) -> int:
    q, r = divmod(fr.numerator, fr.denominator)
    if 2 * r >= fr.denominator:
        q += 1
    return q


def _to_err_halfulps(bound: Fraction, scale: int) -> int:
    # ceil(bound / 2**(scale-1))
    v = bound / _pow2(scale - 1)
    return _ceil_div(v.numerator, v.denominator)


def fx_arith(a: BigFixed, b: BigFixed, op: str, precision_bits: int | None = None) -> BigFixed:
    """Combine two values; the result's error bound accounts for both inputs
    plus the final rounding (at most half an ulp)."""
    if op in ("add", "sub"):
        nb = b.num if op == "add" else -b.num
        s = min(a.scale, b.scale)
        num = (a.num << (a.scale - s)) + (nb << (b.scale - s))
        err = (a.err << (a.scale - s)) + (b.err << (b.scale - s))
        cap = _min_cap(a.cap, b.cap)
        out = BigFixed(num, s, err, cap)
        if precision_bits is not None:
            out = round_to(out, precision_bits)
        return out

    if op not in ("mul", "div"):
        raise ValueError(f"unknown op {op!r}")

    target = precision_bits
    if target is None:
        target = _min_cap(_min_cap(a.precision_bits, b.precision_bits), _min_cap(a.cap, b.cap))
        if target is None:
            target = DEFAULT_BITS
    s = -(target + 2)

    if op == "mul":
        if a.exact and b.exact and a.scale + b.scale >= s:
            return BigFixed(a.num * b.num, a.scale + b.scale, 0, _min_cap(a.cap, b.cap))
        exact_val = a.to_fraction() * b.to_fraction()
        prop = abs(a.to_fraction()) * b.error_bound + abs(b.to_fraction()) * a.error_bound \
            + a.error_bound * b.error_bound
    else:
        bv, be = b.to_fraction(), b.error_bound
        if abs(bv) <= be:
            raise ZeroDivisionError("divisor interval contains zero")
        exact_val = a.to_fraction() / bv
        prop = (a.error_bound + abs(exact_val) * be) / (abs(bv) - be)

    num = _round_fraction(exact_val * _pow2(-s)) if exact_val >= 0 else -_round_fraction(-exact_val * _pow2(-s))
    rounding = abs(Fraction(num) * _pow2(s) - exact_val)
    err = _to_err_halfulps(prop + rounding, s)
    return BigFixed(num, s, err, target)


def _min_cap(x: int | None, y: int | None) -> int | None:
    if x is None:
        return y
    if y is None:
        return x
    return min(x, y)


def round_to(a: BigFixed, bits: int) -> BigFixed:
    """Round to scale -(bits+2); the declared precision never exceeds ``bits``."""
    s = -(bits + 2)
    if a.scale >= s:
        return BigFixed(a.num, a.scale, a.err, _min_cap(a.cap, bits))
    num = _round_shift(a.num, s - a.scale)
    rounding = abs(Fraction(num) * _pow2(s) - a.to_fraction())
    err = _to_err_halfulps(a.error_bound + rounding, s)
    return BigFixed(num, s, err, _min_cap(a.cap, bits))


def fx_to_decimal(a: BigFixed, digits: int) -> str:
    """Correctly rounded (half-even) decimal rendering with ``digits`` fractional digits."""
    fr = a.to_fraction()
    neg = fr < 0
    scaled = abs(fr) * 10 ** digits
    q = round(scaled)  # Fraction.__round__ is half-even
    s = str(q).rjust(digits + 1, "0")
    body = s[:-digits] + "." + s[-digits:] if digits > 0 else s
    return ("-" if neg and q != 0 else "") + body


# -- transcendental pieces --------------------------------------------------

def _atan_inv(x: int, w: int) -> tuple[int, int]:
    """atan(1/x) * 2**w with a count of floor operations (each <= 1 ulp)."""
    one = 1 << w
    power = one // x
    x2 = x * x
    total, k, ops = 0, 0, 1
    while power:
        term = power // (2 * k + 1)
        total += -term if k & 1 else term
        power //= x2
        k += 1
        ops += 2
    return total, ops


@lru_cache(maxsize=32)
def _pi_raw(w: int) -> tuple[int, int]:
    a, oa = _atan_inv(5, w)
    b, ob = _atan_inv(239, w)
    # truncation of each alternating series is below one ulp; count it as an op
    # each term carries a little over two ulps of floor error; double the op count
    return 16 * a - 4 * b, 2 * (16 * (oa + 2) + 4 * (ob + 2))


def pi_fixed(bits: int) -> BigFixed:
    """pi with absolute error at most 2**-bits (Machin's formula)."""
    g = 16
    w = bits + g + 8
    v, err_ulps = _pi_raw(w)
    return round_to(BigFixed(v, -w, 2 * err_ulps), bits)


def one_minus_cos_pi_over(L_plus_1: int, precision_bits: int) -> BigFixed:
    """1 - cos(pi / L_plus_1) with absolute error at most 2**-precision_bits.

    Alternating Taylor series; the loop stops once the next term is below one
    working ulp, which bounds the truncation error by that term.
    """
    n = int(L_plus_1)
    if n < 2:
        raise ValueError("L_plus_1 must be >= 2")
    if precision_bits < 1:
        raise ValueError("precision_bits must be positive")
    guard = 24 + 2 * precision_bits.bit_length()
    w = precision_bits + guard
    pi_v, pi_err = _pi_raw(w)
    theta = pi_v // n                       # error <= pi_err/n + 1 ulps
    th_err = _ceil_div(pi_err, n) + 1
    t2 = (theta * theta) >> w               # theta^2, error <= 2*th_err*4 + 1 (theta < 2)
    term = t2 // 2
    total, k, ops = 0, 1, 2
    while term:
        total += term if k & 1 else -term
        k += 1
        term = term * t2 >> w
        term //= (2 * k - 1) * (2 * k)
        ops += 3
    # Lipschitz bound: |d/dtheta (1 - cos)| <= 1, so theta error passes through;
    # squared-theta error is amplified by at most 2*theta < 4 inside each term,
    # and the series of such amplified errors is dominated by a geometric sum.
    err_ulps = th_err + 8 * (th_err + 1) + 4 * ops + 1
    return round_to(BigFixed(total, -w, 2 * err_ulps), precision_bits)


def fx_compare(a: BigFixed, b: BigFixed) -> int | None:
    """-1/0/1 when the certified intervals decide the order, None otherwise."""
    alo, ahi = a.interval()
    blo, bhi = b.interval()
    if ahi < blo:
        return -1
    if bhi < alo:
        return 1
    if a.exact and b.exact:
        return 0
    return None


def log2_floor(fr: Fraction) -> int:
    """floor(log2(fr)) for positive fr."""
    if fr <= 0:
        raise ValueError("log of non-positive value")
    e = fr.numerator.bit_length() - fr.denominator.bit_length()
    while _pow2(e) > fr:
        e -= 1
    while _pow2(e + 1) <= fr:
        e += 1
    return e


def frac_bits_needed(tol: Fraction) -> int:
    """Smallest q with 2**-q <= tol."""
    return -log2_floor(Fraction(tol))
