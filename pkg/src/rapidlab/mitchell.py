"""Mitchell logarithmic multiplier (N x N -> 2N) and divider (2N / N -> N).

Each unit has two evaluation routes:

* the scalar route (``mitchell_mul`` / ``mitchell_div``) walks the datapath on
  ``Word`` and ``Frac`` values, one operation per hardware block;
* the array route (``MulUnit.fixed`` / ``DivUnit.fixed`` and friends) runs the
  same arithmetic on numpy lanes for characterization.

``fixed`` returns the antilog result before the final truncation to an integer
word, as ``(mantissa, exponent)`` with ``value = mantissa * 2**(exponent - F)``.
Characterization measures this value; the integer outputs are its floor.

Correction coefficients are added to the fraction sum of the multiplier and
subtracted from the fraction difference of the divider: Mitchell's multiplier
underestimates and its divider overestimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .logmap import antilog_array, antilog_shift, fraction_array, lod_array, log_approx
from .wordcore import ConfigurationError, Frac, Word, sub_with_borrow, ternary_add

MUL_WIDTHS = (8, 16, 32)
DIV_WIDTHS = (4, 8, 16)
FRAC_MSBS = 4


class QuotientOverflow(ArithmeticError):
    """Dividend is not below ``2**N * divisor``; the quotient needs more than N bits."""


class DivisionByZero(ZeroDivisionError):
    pass


def quantize_coefficient(c: Fraction, fw: int) -> int:
    """Round ``c`` to ``fw`` fraction bits (ties away from zero)."""
    return int(Fraction(c) * (1 << fw) + Fraction(1, 2))


class _Unit:
    kind: str
    width: int
    scheme: object

    def _setup(self, fw):
        if self.scheme is not None and self.scheme.kind != self.kind:
            raise ConfigurationError(f"{self.scheme.name} is a {self.scheme.kind} scheme")
        object.__setattr__(self, "frac_width", fw)
        if self.scheme is None:
            coeffs = np.zeros(1, dtype=np.uint64)
            grid = np.zeros((16, 16), dtype=np.int64)
        else:
            coeffs = np.array([quantize_coefficient(c, fw) for c in self.scheme.coefficients], dtype=np.uint64)
            grid = np.asarray(self.scheme.grid, dtype=np.int64)
        object.__setattr__(self, "coeff_bits", coeffs)
        object.__setattr__(self, "grid", grid)

    @property
    def name(self) -> str:
        base = "mitchell" if self.scheme is None else self.scheme.name
        return f"{base}@{self.label}"

    def coefficient(self, f1: Frac, f2: Frac) -> Frac:
        """Correction constant for the cell addressed by the fraction MSBs."""
        idx = self.grid[f1.msbs(FRAC_MSBS), f2.msbs(FRAC_MSBS)]
        return Frac(self.frac_width, int(self.coeff_bits[idx]))

    def coefficient_array(self, f1: np.ndarray, f2: np.ndarray) -> np.ndarray:
        shift = np.uint64(self.frac_width - FRAC_MSBS)
        u1 = (f1 >> shift).astype(np.int64)
        u2 = (f2 >> shift).astype(np.int64)
        return self.coeff_bits[self.grid[u1, u2]]

    def approx_real(self, a, b) -> np.ndarray:
        mant, exp = self.fixed(a, b)
        return np.ldexp(mant.astype(np.float64), exp - self.frac_width)


@dataclass(frozen=True)
class MulUnit(_Unit):
    width: int = 8
    scheme: object = None
    kind: str = field(default="mul", init=False)

    def __post_init__(self):
        if self.width not in MUL_WIDTHS:
            raise ConfigurationError(f"multiplier width must be one of {MUL_WIDTHS}")
        self._setup(self.width - 1)

    @property
    def out_width(self) -> int:
        return 2 * self.width

    @property
    def label(self) -> str:
        return f"{self.width}x{self.width}"

    def input_space(self) -> int:
        return 1 << (2 * self.width)

    def __call__(self, a: int, b: int) -> int:
        return mitchell_mul(self, Word(self.width, a), Word(self.width, b)).value

    def fixed(self, a, b):
        a = np.asarray(a, dtype=np.uint64)
        b = np.asarray(b, dtype=np.uint64)
        fw = self.frac_width
        k1 = lod_array(a, self.width)
        k2 = lod_array(b, self.width)
        f1 = fraction_array(a, k1, fw)
        f2 = fraction_array(b, k2, fw)
        total = f1 + f2 + self.coefficient_array(f1, f2)
        carry = (total >> np.uint64(fw)).astype(np.int64)
        mant = (np.uint64(1) << np.uint64(fw)) | (total & np.uint64((1 << fw) - 1))
        zero = (k1 < 0) | (k2 < 0)
        return np.where(zero, np.uint64(0), mant), np.where(zero, 0, k1 + k2 + carry)

    def evaluate(self, a, b) -> np.ndarray:
        mant, exp = self.fixed(a, b)
        out = antilog_array(exp, mant & np.uint64((1 << self.frac_width) - 1), self.frac_width)
        top = np.uint64((1 << self.out_width) - 1) if self.out_width < 64 else np.uint64(2**64 - 1)
        over = exp >= self.out_width
        return np.where(mant == 0, np.uint64(0), np.where(over, top, out))

    @staticmethod
    def exact(a, b) -> np.ndarray:
        return np.asarray(a, dtype=np.uint64) * np.asarray(b, dtype=np.uint64)


@dataclass(frozen=True)
class DivUnit(_Unit):
    """2N / N divider; ``width`` is the divisor (and quotient) width N."""

    width: int = 8
    scheme: object = None
    kind: str = field(default="div", init=False)

    def __post_init__(self):
        if self.width not in DIV_WIDTHS:
            raise ConfigurationError(f"divider width must be one of {DIV_WIDTHS}")
        self._setup(2 * self.width - 1)

    @property
    def dividend_width(self) -> int:
        return 2 * self.width

    @property
    def out_width(self) -> int:
        return self.width

    @property
    def label(self) -> str:
        return f"{2 * self.width}/{self.width}"

    def input_space(self) -> int:
        return 1 << (3 * self.width)

    def valid(self, dividend, divisor) -> np.ndarray:
        d = np.asarray(dividend, dtype=np.uint64)
        v = np.asarray(divisor, dtype=np.uint64)
        return (v > 0) & (d < (v << np.uint64(self.width)))

    def __call__(self, dividend: int, divisor: int) -> int:
        return mitchell_div(self, Word(2 * self.width, dividend), Word(self.width, divisor)).value

    def fixed(self, dividend, divisor):
        d = np.asarray(dividend, dtype=np.uint64)
        v = np.asarray(divisor, dtype=np.uint64)
        fw = self.frac_width
        k1 = lod_array(d, 2 * self.width)
        k2 = lod_array(v, self.width)
        f1 = fraction_array(d, k1, fw)
        f2 = fraction_array(v, k2, fw)
        c = self.coefficient_array(f1, f2)
        # two's-complement x1 - x2 - c, offset by 2**(fw+1) to stay unsigned
        total = f1 + (np.uint64(2) << np.uint64(fw)) - f2 - c
        borrow = 2 - (total >> np.uint64(fw)).astype(np.int64)
        mant = (np.uint64(1) << np.uint64(fw)) | (total & np.uint64((1 << fw) - 1))
        zero = (k1 < 0) | (k2 < 0)
        return np.where(zero, np.uint64(0), mant), np.where(zero, 0, k1 - k2 - borrow)

    def evaluate(self, dividend, divisor) -> np.ndarray:
        mant, exp = self.fixed(dividend, divisor)
        out = antilog_array(exp, mant & np.uint64((1 << self.frac_width) - 1), self.frac_width)
        top = np.uint64((1 << self.out_width) - 1)
        return np.where(mant == 0, np.uint64(0), np.minimum(out, top))

    @staticmethod
    def exact(dividend, divisor) -> np.ndarray:
        return np.asarray(dividend, dtype=np.uint64) // np.asarray(divisor, dtype=np.uint64)


def _check_word(w: Word, width: int, what: str):
    if w.width != width:
        raise ConfigurationError(f"{what} must be {width}-bit, got {w.width}-bit")


def mitchell_mul(u: MulUnit, a: Word, b: Word) -> Word:
    _check_word(a, u.width, "multiplicand")
    _check_word(b, u.width, "multiplier")
    if a.value == 0 or b.value == 0:
        return Word(u.out_width, 0)
    la, lb = log_approx(a), log_approx(b)
    s = ternary_add(la.frac, lb.frac, u.coefficient(la.frac, lb.frac))
    k = la.k + lb.k + s.carry
    if k >= u.out_width:
        return Word(u.out_width, (1 << u.out_width) - 1)
    return antilog_shift(k, s.frac, u.out_width)


def mitchell_div(u: DivUnit, dividend: Word, divisor: Word) -> Word:
    _check_word(dividend, 2 * u.width, "dividend")
    _check_word(divisor, u.width, "divisor")
    if divisor.value == 0:
        raise DivisionByZero("divisor is zero")
    if dividend.value >= divisor.value << u.width:
        raise QuotientOverflow(f"{dividend.value} / {divisor.value} does not fit in {u.width} bits")
    if dividend.value == 0:
        return Word(u.width, 0)
    l1, l2 = log_approx(dividend), log_approx(divisor)
    x2 = l2.frac.widen(u.frac_width)
    diff, b1 = sub_with_borrow(l1.frac, x2)
    diff, b2 = sub_with_borrow(diff, u.coefficient(l1.frac, x2))
    k = l1.k - l2.k - b1 - b2
    if k < 0:
        return Word(u.width, 0)
    full = antilog_shift(k, diff, 2 * u.width + 1).value
    return Word(u.width, min(full, (1 << u.width) - 1))


def exact_mul(a: Word, b: Word) -> Word:
    if a.width != b.width:
        raise ConfigurationError("operand widths differ")
    return Word(2 * a.width, a.value * b.value)


def exact_div(dividend: Word, divisor: Word) -> Word:
    n = divisor.width
    if divisor.value == 0:
        raise DivisionByZero("divisor is zero")
    q = dividend.value // divisor.value
    if q >= 1 << n:
        raise QuotientOverflow(f"{dividend.value} / {divisor.value} does not fit in {n} bits")
    return Word(n, q)


# --- real-valued error surfaces --------------------------------------------


def mul_estimate(x1, x2, c=0.0):
    """Mitchell product of (1+x1)(1+x2) with correction ``c`` on the fraction sum."""
    s = np.asarray(x1, dtype=float) + np.asarray(x2, dtype=float) + c
    carry = np.floor(s)
    return np.exp2(carry) * (1 + s - carry)


def div_estimate(x1, x2, c=0.0):
    """Mitchell quotient of (1+x1)/(1+x2) with ``c`` subtracted from the difference."""
    d = np.asarray(x1, dtype=float) - np.asarray(x2, dtype=float) - c
    fl = np.floor(d)
    return np.exp2(fl) * (1 + d - fl)


def error_surface_mul(x1, x2, c=0.0):
    """Relative error (exact - approx) / exact of the multiplier on fractions in [0, 1)."""
    exact = (1 + np.asarray(x1, dtype=float)) * (1 + np.asarray(x2, dtype=float))
    return (exact - mul_estimate(x1, x2, c)) / exact


def error_surface_div(x1, x2, c=0.0):
    """Relative error (exact - approx) / exact of the divider; nonpositive when c == 0."""
    exact = (1 + np.asarray(x1, dtype=float)) / (1 + np.asarray(x2, dtype=float))
    return (exact - div_estimate(x1, x2, c)) / exact


def error_surface(kind: str, x1, x2, c=0.0):
    if kind == "mul":
        return error_surface_mul(x1, x2, c)
    if kind == "div":
        return error_surface_div(x1, x2, c)
    raise ValueError(f"unknown unit kind {kind!r}")
