"""Clock a few operand pairs through a 3-stage multiplier and print the trace."""

import sys

from rapidlab.mitchell import MulUnit
from rapidlab.pipeline import check_equivalence, make_pipeline, stream, write_trace
from rapidlab.rapidscheme import get_scheme

unit = MulUnit(16, get_scheme("RAPID-5-mul"))
pu = make_pipeline(unit, 3, trace=True)
pairs = [(58, 18), (1000, 1000), (65535, 2), (0, 77), (12345, 321)]
for cycle, out in stream(pu, pairs):
    print(f"cycle {cycle}: {out}")
write_trace(pu.trace, sys.stdout)

import numpy as np  # noqa: E402

rng = np.random.default_rng(0)
a, b = rng.integers(0, 1 << 16, (2, 100_000), dtype=np.uint64)
print(check_equivalence(unit, 3, a, b, lanes=500))
