"""Error statistics of the baseline and corrected units.

Exhaustive at 8 bits, Monte Carlo at 16 bits (1e6 samples by default; pass a
larger count as the first argument).
"""

import sys

from rapidlab.charlab import SamplingPlan, characterize, to_csv
from rapidlab.mitchell import DivUnit, MulUnit
from rapidlab.rapidscheme import SCHEME_NAMES, get_scheme

samples = int(sys.argv[1]) if len(sys.argv) > 1 else 10**6


def units(mul_width, div_width):
    yield MulUnit(mul_width)
    yield DivUnit(div_width)
    for name in SCHEME_NAMES:
        s = get_scheme(name)
        yield MulUnit(mul_width, s) if s.kind == "mul" else DivUnit(div_width, s)


print("# exhaustive, 8x8 and 8/4")
print(to_csv([characterize(u, SamplingPlan.exhaustive()) for u in units(8, 4)]), end="")
print(f"\n# Monte Carlo, 16x16 and 16/8, {samples} samples")
print(to_csv([characterize(u, SamplingPlan.monte_carlo(samples, 1)) for u in units(16, 8)]), end="")
