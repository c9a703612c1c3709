"""Rebuild a correction scheme from scratch and compare it to the packaged file.

    python3 demos/derive_partition.py RAPID-5-mul
"""

import sys

import numpy as np

from rapidlab.rapidscheme import derive_scheme, dumps_scheme, get_scheme, region_stats

name = sys.argv[1] if len(sys.argv) > 1 else "RAPID-5-mul"
scheme = derive_scheme(name)
grid = scheme.grid_array()
print(f"{name}: {len(scheme.coefficients)} regions on a {grid.shape[0]}-cell grid")
print(f"matches packaged file: {dumps_scheme(scheme) == dumps_scheme(get_scheme(name))}")

for row in grid:
    print(" ".join(format(int(g), "x") for g in row))

for i, c in enumerate(scheme.coefficients):
    cells = [tuple(int(v) for v in uv) for uv in np.argwhere(grid == i)]
    before = region_stats(scheme.kind, cells).mean_abs_error
    after = region_stats(scheme.kind, cells, c).mean_abs_error
    print(f"region {i}: {len(cells):3d} cells  c = {float(c):.5f}  mean |e| {100 * before:.2f}% -> {100 * after:.2f}%")
