import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rapidlab.wordcore import ConfigurationError, Frac, Word, frac_width, sub_with_borrow, ternary_add


def fracs(width):
    return st.integers(0, (1 << width) - 1).map(lambda b: Frac(width, b))


def test_word_range():
    assert int(Word(8, 255)) == 255
    with pytest.raises(ValueError):
        Word(8, 256)
    with pytest.raises(ValueError):
        Word(4, -1)


def test_frac_width_rule():
    assert [frac_width(n) for n in (4, 8, 16, 32)] == [3, 7, 15, 31]


def test_frac_helpers():
    f = Frac.from_string("1101")
    assert f.value == 13 / 16
    assert str(f) == "0.1101"
    assert f.widen(7) == Frac(7, 0b1101000)
    assert f.widen(7).msbs(4) == 13
    assert Frac(2, 0b11).msbs(4) == 0b1100
    with pytest.raises(ConfigurationError):
        f.widen(3)


@pytest.mark.parametrize("a, b, c, frac, carry", [
    ("1101", "0010", "0000", "1111", 0),
    ("1111", "1111", "1111", "1101", 2),
    ("1010", "0000", "0000", "1010", 0),
])
def test_ternary_add_examples(a, b, c, frac, carry):
    s = ternary_add(Frac.from_string(a), Frac.from_string(b), Frac.from_string(c))
    assert (str(s.frac), s.carry) == ("0." + frac, carry)


def test_ternary_add_exhaustive_4bit():
    for a, b, c in itertools.product(range(16), repeat=3):
        s = ternary_add(Frac(4, a), Frac(4, b), Frac(4, c))
        assert a + b + c == s.carry * 16 + s.frac.bits
        assert s.carry in (0, 1, 2)


@given(fracs(31), fracs(31), fracs(31))
def test_ternary_add_reconstruction_wide(a, b, c):
    s = ternary_add(a, b, c)
    assert a.bits + b.bits + c.bits == (s.carry << 31) + s.frac.bits


@given(fracs(15), fracs(15))
def test_ternary_add_with_zero_is_plain_add(a, b):
    s = ternary_add(a, b, Frac(15, 0))
    total = a.bits + b.bits
    assert (s.frac.bits, s.carry) == (total % (1 << 15), int(total >= 1 << 15))


def test_width_mismatch():
    with pytest.raises(ConfigurationError):
        ternary_add(Frac(4, 1), Frac(5, 1), Frac(4, 0))
    with pytest.raises(ConfigurationError):
        sub_with_borrow(Frac(4, 1), Frac(7, 1))


@pytest.mark.parametrize("a, b, diff, borrow", [
    ("1101", "0010", "1011", 0),
    ("0010", "1101", "0101", 1),
    ("0110", "0110", "0000", 0),
])
def test_sub_with_borrow_examples(a, b, diff, borrow):
    d, br = sub_with_borrow(Frac.from_string(a), Frac.from_string(b))
    assert (str(d), br) == ("0." + diff, borrow)


@given(st.integers(1, 31).flatmap(lambda w: st.tuples(fracs(w), fracs(w))))
def test_sub_with_borrow_identity(ab):
    a, b = ab
    d, br = sub_with_borrow(a, b)
    assert a.bits - b.bits == d.bits - (br << a.width)
