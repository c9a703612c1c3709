"""Fixed-width unsigned words and left-aligned fraction arithmetic.

A fraction of width ``w`` stores ``bits`` and denotes ``bits / 2**w``.  The
ternary add models a LUT/carry-chain adder that sums two operand fractions and
an error-reduction constant in one pass; its carry goes to the characteristic.
"""

from __future__ import annotations

from dataclasses import dataclass

WORD_WIDTHS = (4, 8, 16, 32)


class ConfigurationError(ValueError):
    """Operands or units configured with incompatible widths."""


@dataclass(frozen=True)
class Word:
    width: int
    value: int

    def __post_init__(self):
        if self.width <= 0:
            raise ConfigurationError(f"word width must be positive, got {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(f"{self.value} does not fit in an unsigned {self.width}-bit word")

    def __int__(self):
        return self.value


def frac_width(width: int) -> int:
    """Fraction bits kept for an operand of ``width`` bits."""
    return width - 1


@dataclass(frozen=True)
class Frac:
    width: int
    bits: int

    def __post_init__(self):
        if self.width < 0:
            raise ConfigurationError(f"fraction width must be >= 0, got {self.width}")
        if not 0 <= self.bits < (1 << self.width):
            raise ValueError(f"{self.bits} does not fit in a {self.width}-bit fraction")

    @classmethod
    def from_string(cls, digits: str) -> "Frac":
        """Build from binary digits after the point, e.g. ``"1101"`` -> 0.1101b."""
        return cls(len(digits), int(digits, 2) if digits else 0)

    @property
    def value(self) -> float:
        return self.bits / (1 << self.width)

    def widen(self, width: int) -> "Frac":
        """Left-align into ``width`` bits, zero-padding the LSB end."""
        if width < self.width:
            raise ConfigurationError(f"cannot widen a {self.width}-bit fraction to {width} bits")
        return Frac(width, self.bits << (width - self.width))

    def msbs(self, count: int) -> int:
        """Top ``count`` bits, zero-padded when the fraction is shorter."""
        if self.width >= count:
            return self.bits >> (self.width - count)
        return self.bits << (count - self.width)

    def __str__(self):
        return "0." + format(self.bits, f"0{self.width}b") if self.width else "0."


@dataclass(frozen=True)
class TernarySum:
    frac: Frac
    carry: int


def _check_widths(*fracs: Frac) -> int:
    widths = {f.width for f in fracs}
    if len(widths) != 1:
        raise ConfigurationError(f"fraction widths differ: {sorted(widths)}")
    return widths.pop()


def ternary_add(a: Frac, b: Frac, c: Frac) -> TernarySum:
    """Exact three-operand fraction sum split into fraction bits and carry (0..2)."""
    w = _check_widths(a, b, c)
    total = a.bits + b.bits + c.bits
    return TernarySum(Frac(w, total & ((1 << w) - 1)), total >> w)


def sub_with_borrow(a: Frac, b: Frac) -> tuple[Frac, int]:
    """Two's-complement ``a - b``; borrow is 1 exactly when ``a < b``."""
    w = _check_widths(a, b)
    diff = a.bits - b.bits
    return Frac(w, diff & ((1 << w) - 1)), int(diff < 0)
