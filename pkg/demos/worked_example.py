"""Walk one multiplication and one division through the log-domain datapath.

    python3 demos/worked_example.py
"""

from rapidlab.mitchell import DivUnit, MulUnit, exact_div, exact_mul, mitchell_div, mitchell_mul
from rapidlab.rapidscheme import get_scheme
from rapidlab.wordcore import Word

a, b = 58, 18

mul = MulUnit(8)
print(f"8x8 Mitchell: {a} * {b} -> {float(mul.approx_real(a, b)):g} before truncation")
print(f"  truncated product {mitchell_mul(mul, Word(8, a), Word(8, b)).value}, "
      f"exact {exact_mul(Word(8, a), Word(8, b)).value}")

rapid = MulUnit(8, get_scheme("RAPID-10-mul"))
print(f"  with RAPID-10 correction: {rapid(a, b)}")

div = DivUnit(8)
print(f"16/8 Mitchell: {a} / {b} -> {mitchell_div(div, Word(16, a), Word(8, b)).value}, "
      f"exact {exact_div(Word(16, a), Word(8, b)).value}")

# a larger quotient shows the divider's tendency to overshoot
print(f"  1044 / 18 -> {div(1044, 18)} (exact {1044 // 18})")
print(f"  with RAPID-9 correction: {DivUnit(8, get_scheme('RAPID-9-div'))(1044, 18)}")
