"""RAPID error-reduction schemes: coefficient tables, partition grids, files.

A scheme maps the 4 fraction MSBs of both operands, ``(u1, u2)``, through a
16x16 grid to one of a handful of correction coefficients.  Published
coefficients are bit strings with a few leading zeros dropped; the grid is
reconstructed here by letting every cell pick the coefficient that minimizes
its mean absolute relative error.

Derivation works on a :class:`Population` of fraction pairs.  The default for
the built-in schemes is the exhaustive 8-bit operand enumeration, where the
relative error of the fixed-point datapath depends only on the two fractions,
so a weighted grid of fraction pairs reproduces exhaustive characterization
exactly.  Cells a population never reaches fall back to a dense lattice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .mitchell import FRAC_MSBS, error_surface, quantize_coefficient
from .wordcore import Frac

CELLS = 1 << FRAC_MSBS

TABLE_BITS = {
    "RAPID-3-mul": ["100000100111", "010011101100", "000100101001"],
    "RAPID-5-mul": ["1001111111111", "1000011011101", "0110010001010", "0011110010111", "0000111110000"],
    "RAPID-10-mul": [
        "1001111000110", "1000110110001", "0111111000100", "0111000110101", "0110010100011",
        "0101110011111", "0100101000011", "0100001011101", "0011110000011", "0010101111111",
    ],
    "RAPID-3-div": ["1000011111111", "0100010111111", "0001011111111"],
    "RAPID-5-div": ["1001111000100", "1000001000111", "0110110001101", "0101010100111", "0011011100100"],
    "RAPID-9-div": [
        "1001110001111", "1000110111100", "1000000010100", "0111001100010", "0110100001101",
        "0110010100101", "0101000101011", "0100111101000", "0100001101100",
    ],
}
SCHEME_NAMES = tuple(TABLE_BITS)
# leading zero bits dropped from the published strings
EXCLUDED_MSBS = {"mul": 3, "div": 4}
# derived coefficients use the table's 13-bit strings plus the excluded MSBs
TABLE_WIDTH = 13
COEFF_BITS = {kind: TABLE_WIDTH + z for kind, z in EXCLUDED_MSBS.items()}


class SchemeError(ValueError):
    """Malformed scheme or scheme file."""


def scheme_kind(name: str) -> str:
    if name not in TABLE_BITS:
        raise SchemeError(f"unknown scheme {name!r}; expected one of {', '.join(SCHEME_NAMES)}")
    return name.rsplit("-", 1)[1]


def coefficient_from_bits(bits: str, excluded_msbs: int) -> Fraction:
    if not bits or set(bits) - {"0", "1"}:
        raise SchemeError(f"coefficient bits must be a binary string, got {bits!r}")
    if excluded_msbs < 0:
        raise SchemeError("excluded_msbs must be >= 0")
    return Fraction(int(bits, 2), 1 << (len(bits) + excluded_msbs))


def coefficient_to_bits(c: Fraction, excluded_msbs: int, total_bits: int = TABLE_WIDTH + 4) -> dict:
    """Inverse of :func:`coefficient_from_bits` for a dyadic ``c`` in [0, 1)."""
    c = Fraction(c)
    denom_bits = c.denominator.bit_length() - 1
    if c.denominator != 1 << denom_bits or not 0 <= c < 1:
        raise SchemeError(f"{c} is not a dyadic fraction in [0, 1)")
    total = max(total_bits, denom_bits)
    n = c.numerator << (total - denom_bits)
    z = min(excluded_msbs, total - max(n.bit_length(), 1))
    return {"bits": format(n, f"0{total - z}b"), "excluded_msbs": z}


def load_table_coefficients(name: str, excluded_msbs: int | None = None) -> list[Fraction]:
    """Published coefficients of ``name`` as exact fractions."""
    kind = scheme_kind(name)
    z = EXCLUDED_MSBS[kind] if excluded_msbs is None else excluded_msbs
    return [coefficient_from_bits(s, z) for s in TABLE_BITS[name]]


@dataclass(frozen=True)
class Scheme:
    name: str
    kind: str
    coefficients: tuple
    grid: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(Fraction(c) for c in self.coefficients))
        object.__setattr__(self, "grid", tuple(tuple(int(v) for v in row) for row in self.grid))
        validate(self)

    def index(self, u1: int, u2: int) -> int:
        return self.grid[u1][u2]

    def grid_array(self) -> np.ndarray:
        return np.array(self.grid, dtype=np.int64)


def validate(s: Scheme):
    kind = scheme_kind(s.name)
    if s.kind != kind:
        raise SchemeError(f"{s.name} must have kind {kind!r}, got {s.kind!r}")
    expected = len(TABLE_BITS[s.name])
    if len(s.coefficients) != expected:
        raise SchemeError(f"{s.name} needs {expected} coefficients, got {len(s.coefficients)}")
    if any(not 0 <= c < 1 for c in s.coefficients):
        raise SchemeError("coefficients must lie in [0, 1)")
    if len(s.grid) != CELLS or any(len(row) != CELLS for row in s.grid):
        raise SchemeError(f"grid must be {CELLS}x{CELLS}")
    if any(not 0 <= v < expected for row in s.grid for v in row):
        raise SchemeError(f"grid indices must lie in [0, {expected})")


def select_coefficient(scheme: Scheme, frac1: Frac, frac2: Frac) -> Frac:
    """Coefficient for the cell addressed by the fraction MSBs, at ``frac1``'s width."""
    c = scheme.coefficients[scheme.index(frac1.msbs(FRAC_MSBS), frac2.msbs(FRAC_MSBS))]
    return Frac(frac1.width, quantize_coefficient(c, frac1.width))


# --- populations --------------------------------------------------------------


@dataclass(frozen=True)
class Population:
    """Weighted fraction pairs; ``frac_bits`` is the datapath width, if quantized."""

    x1: np.ndarray
    x2: np.ndarray
    weight: np.ndarray
    frac_bits: int | None = None

    @property
    def cell(self) -> np.ndarray:
        return (np.floor(self.x1 * CELLS) * CELLS + np.floor(self.x2 * CELLS)).astype(np.int64)

    def subset(self, mask) -> "Population":
        return Population(self.x1[mask], self.x2[mask], self.weight[mask], self.frac_bits)


@lru_cache(maxsize=None)
def lattice(per_cell: int = 8) -> Population:
    """Uniform midpoint lattice with ``per_cell**2`` points in each grid cell."""
    n = CELLS * per_cell
    t = (np.arange(n) + 0.5) / n
    x1, x2 = np.meshgrid(t, t, indexing="ij")
    return Population(x1.ravel(), x2.ravel(), np.ones(n * n))


def _fractions(values: np.ndarray, fw: int) -> np.ndarray:
    k = np.floor(np.log2(values)).astype(np.int64)
    return (values - (1 << k)) << (fw - k)


@lru_cache(maxsize=None)
def operand_population(kind: str, width: int = 8) -> Population:
    """Fraction pairs met when enumerating every nonzero operand pair exhaustively.

    ``width`` is the multiplier width, or the divider's divisor width N (the
    dividend is 2N bits; only pairs with ``divisor <= dividend < 2**N * divisor``
    count).
    """
    if kind == "mul":
        fw = width - 1
        f = _fractions(np.arange(1, 1 << width, dtype=np.int64), fw)
        w = np.bincount(f, minlength=1 << fw).astype(float)
        x = np.arange(1 << fw) / (1 << fw)
        x1, x2 = np.meshgrid(x, x, indexing="ij")
        return Population(x1.ravel(), x2.ravel(), np.outer(w, w).ravel(), fw)
    if kind == "div":
        fw = 2 * width - 1
        v = np.arange(1, 1 << width, dtype=np.int64)
        f2 = _fractions(v, fw)
        keys, counts = [], []
        for vi, f2i in zip(v, f2):
            d = np.arange(vi, min(vi << width, 1 << (2 * width)), dtype=np.int64)
            keys.append(_fractions(d, fw) * (1 << fw) + f2i)
        keys, counts = np.unique(np.concatenate(keys), return_counts=True)
        scale = 1 << fw
        return Population((keys // scale) / scale, (keys % scale) / scale, counts.astype(float), fw)
    raise ValueError(f"unknown unit kind {kind!r}")


def _quantized(c: float, pop: Population) -> float:
    if pop.frac_bits is None:
        return c
    return quantize_coefficient(Fraction(c), pop.frac_bits) / (1 << pop.frac_bits)


def _cell_costs(kind: str, coefficients, pop: Population) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell weighted sum of |error| for every coefficient, and cell weights."""
    cell = pop.cell
    costs = np.stack([
        np.bincount(cell, pop.weight * np.abs(error_surface(kind, pop.x1, pop.x2, _quantized(float(c), pop))),
                    minlength=CELLS * CELLS)
        for c in coefficients
    ])
    return costs, np.bincount(cell, pop.weight, minlength=CELLS * CELLS)


def derive_partition(kind: str, coefficients, population: Population | None = None) -> np.ndarray:
    """16x16 grid of coefficient indices, each cell taking its lowest-error coefficient.

    Ties go to the lowest index.  Cells without population weight use the
    dense lattice.
    """
    if len(coefficients) == 0:
        raise SchemeError("need at least one coefficient")
    fallback = lattice()
    costs, _ = _cell_costs(kind, coefficients, fallback)
    grid = np.argmin(costs, axis=0)
    if population is not None:
        pcosts, weight = _cell_costs(kind, coefficients, population)
        grid = np.where(weight > 0, np.argmin(pcosts, axis=0), grid)
    return grid.reshape(CELLS, CELLS)


def _region_mask(pop: Population, region) -> np.ndarray:
    cells = np.zeros(CELLS * CELLS, dtype=bool)
    for u1, u2 in region:
        cells[u1 * CELLS + u2] = True
    return cells[pop.cell]


def _scan(cost, lo: float, hi: float, step: float) -> list[float]:
    """Candidates in [lo, hi) on a ``step`` grid that share the lowest cost."""
    cand = np.arange(np.ceil(lo / step), np.ceil(hi / step)) * step
    vals = np.array([cost(c) for c in cand])
    return list(cand[vals == vals.min()])


def derive_coefficient_oracle(kind: str, region, population: Population | None = None,
                              objective: str = "abs", resolution: int | None = None,
                              offset: float = 0.0) -> Fraction:
    """Correction constant for a set of grid cells.

    ``objective="abs"`` minimizes the mean absolute relative error;
    ``objective="mean"`` drives the mean signed relative error to zero.  The
    scan runs coarse to fine over multiples of ``2**-resolution``.  With a
    quantized population the cost is evaluated with the coefficient rounded
    as the datapath rounds it, and ties inside that rounding bucket are broken
    on the dense lattice.  ``offset`` is a weighted signed error sum carried in
    from other regions of the same population; the ``"mean"`` objective then
    cancels it instead of zeroing this region alone.
    """
    resolution = COEFF_BITS[kind] if resolution is None else resolution
    region = list(region)
    if not region:
        raise SchemeError("region must contain at least one cell")
    lat = lattice().subset(_region_mask(lattice(), region))
    pop = lat if population is None else population.subset(_region_mask(population, region))
    if pop.weight.sum() == 0:
        pop = lat

    def cost_on(p: Population, quantize: bool):
        carried = offset if p is pop and population is not None else 0.0

        def cost(c):
            cq = _quantized(c, p) if quantize else c
            e = error_surface(kind, p.x1, p.x2, cq)
            if objective == "abs":
                return float(np.dot(p.weight, np.abs(e)))
            if objective == "mean":
                return abs(carried + float(np.dot(p.weight, e)))
            raise ValueError(f"unknown objective {objective!r}")
        return cost

    fine = 2.0 ** -resolution
    if pop.frac_bits is not None:
        # the quantized cost is flat over each rounding bucket: pick the best
        # bucket by its centre, then refine inside it on the lattice
        step = 2.0 ** -pop.frac_bits
        best = _scan(cost_on(pop, True), 0.0, 0.5, step)
        best = _scan(cost_on(lat, False), max(0.0, best[0] - step / 2), best[0] + step / 2, fine)
    else:
        coarse = 2.0 ** -9
        best = _scan(cost_on(pop, False), 0.0, 0.5, coarse)
        best = _scan(cost_on(pop, False), max(0.0, best[0] - 2 * coarse), best[0] + 2 * coarse, fine)
    return Fraction(round(best[0] / fine), 1 << resolution)


@dataclass(frozen=True)
class RegionStats:
    cells: tuple
    mean_abs_error: float
    error_mass: float


def region_stats(kind: str, region, c=0.0, per_cell: int = 8) -> RegionStats:
    """Mean |relative error| over the region and its integral over the unit square."""
    region = tuple(sorted(region))
    p = lattice(per_cell).subset(_region_mask(lattice(per_cell), region))
    e = np.abs(error_surface(kind, p.x1, p.x2, float(c)))
    return RegionStats(region, float(e.mean()), float(e.sum()) / (CELLS * per_cell) ** 2)


def population_are(kind: str, coefficients, grid, pop: Population) -> tuple[float, float]:
    """Weighted ARE and signed mean (both as fractions, not %) of a scheme on ``pop``."""
    coeffs = np.array([_quantized(float(c), pop) for c in coefficients])
    c = coeffs[np.asarray(grid).ravel()[pop.cell]]
    e = error_surface(kind, pop.x1, pop.x2, c)
    w = pop.weight / pop.weight.sum()
    return float(np.dot(w, np.abs(e))), float(np.dot(w, e))


def _signed_sum(kind, region, c, pop: Population) -> float:
    p = pop.subset(_region_mask(pop, region))
    return float(np.dot(p.weight, error_surface(kind, p.x1, p.x2, _quantized(float(c), p))))


def _fit(kind, coeffs, grid, population, objective):
    out, carried = [], 0.0
    for i, c in enumerate(coeffs):
        region = [(int(u1), int(u2)) for u1, u2 in np.argwhere(grid == i)]
        if region:
            c = derive_coefficient_oracle(kind, region, population, objective, offset=carried)
            if population is not None:
                carried += _signed_sum(kind, region, c, population)
        out.append(c)
    return out


def refine(kind: str, coefficients, population: Population | None = None,
           objective: str = "mean", max_iter: int = 40) -> tuple[list[Fraction], np.ndarray]:
    """Alternate cell assignment and per-group coefficient fits until stable.

    Groups left without cells keep their coefficient.  If the iteration
    cycles, the visited state with the lowest ARE on the population wins
    (ARE plus absolute bias under ``objective="mean"``).  The
    result always ends with a coefficient fit on the returned grid.  Under
    ``objective="mean"`` groups are fitted in index order, each cancelling the
    signed error left by the groups before it, so rounding residue does not
    pile up into a bias.
    """
    coeffs = [Fraction(c) for c in coefficients]
    pop = population if population is not None else lattice()
    seen = []
    for _ in range(max_iter):
        grid = derive_partition(kind, coeffs, population)
        if any(np.array_equal(grid, g) for g, _ in seen):
            break
        coeffs = _fit(kind, coeffs, grid, population, objective)
        seen.append((grid, coeffs))
    def score(g, c):
        are, bias = population_are(kind, c, g, pop)
        return are + abs(bias) if objective == "mean" else are

    _, k = min((score(g, c), k) for k, (g, c) in enumerate(seen))
    return seen[k][1], seen[k][0]


# --- building and files -----------------------------------------------------------


TARGET_ARE_8BIT = {
    # published 8-bit ARE (%) plus 0.3 pp slack
    "RAPID-3-mul": 1.32, "RAPID-5-mul": 1.21, "RAPID-10-mul": 0.94,
    "RAPID-3-div": 1.29, "RAPID-5-div": 1.09, "RAPID-9-div": 0.88,
}
MAX_BIAS_8BIT = 0.1


def derive_scheme(name: str, population: Population | None = None, objective: str = "mean") -> Scheme:
    """Build a scheme from its published coefficients.

    The published values are kept when their derived partition meets the
    8-bit ARE target and bias bound on ``population``; otherwise the coefficients are
    re-fitted, starting from the published ones.
    """
    kind = scheme_kind(name)
    pop = population if population is not None else operand_population(kind, 8 if kind == "mul" else 4)
    coeffs = load_table_coefficients(name)
    grid = derive_partition(kind, coeffs, pop)
    are, bias = population_are(kind, coeffs, grid, pop)
    if 100 * are > TARGET_ARE_8BIT[name] or 100 * abs(bias) > MAX_BIAS_8BIT:
        coeffs, grid = refine(kind, coeffs, pop, objective)
    return Scheme(name, kind, coeffs, grid)


def scheme_to_dict(s: Scheme) -> dict:
    z = EXCLUDED_MSBS[s.kind]
    return {
        "name": s.name,
        "kind": s.kind,
        "frac_msbs": FRAC_MSBS,
        "coefficients": [coefficient_to_bits(c, z, COEFF_BITS[s.kind]) for c in s.coefficients],
        "grid": [list(row) for row in s.grid],
    }


def scheme_from_dict(d: dict) -> Scheme:
    if not isinstance(d, dict):
        raise SchemeError("scheme file must hold a JSON object")
    missing = {"name", "kind", "frac_msbs", "coefficients", "grid"} - d.keys()
    if missing:
        raise SchemeError(f"scheme file lacks {sorted(missing)}")
    if d["frac_msbs"] != FRAC_MSBS:
        raise SchemeError(f"only frac_msbs={FRAC_MSBS} is supported")
    try:
        coeffs = [coefficient_from_bits(c["bits"], int(c["excluded_msbs"])) for c in d["coefficients"]]
        grid = [[int(v) for v in row] for row in d["grid"]]
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, SchemeError):
            raise
        raise SchemeError(f"malformed scheme file: {e}") from e
    return Scheme(d["name"], d["kind"], coeffs, grid)


def dumps_scheme(s: Scheme) -> str:
    d = scheme_to_dict(s)
    rows = ",\n    ".join(json.dumps(r) for r in d["grid"])
    coeffs = ",\n    ".join(json.dumps(c) for c in d["coefficients"])
    return (
        "{\n"
        f'  "name": {json.dumps(d["name"])},\n'
        f'  "kind": {json.dumps(d["kind"])},\n'
        f'  "frac_msbs": {d["frac_msbs"]},\n'
        f'  "coefficients": [\n    {coeffs}\n  ],\n'
        f'  "grid": [\n    {rows}\n  ]\n'
        "}\n"
    )


def save_scheme(s: Scheme, path) -> None:
    Path(path).write_text(dumps_scheme(s))


def load_scheme(path) -> Scheme:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise SchemeError(f"{path}: not valid JSON ({e})") from e
    return scheme_from_dict(d)


_BUILTIN = Path(__file__).with_name("schemes")


def builtin_path(name: str) -> Path:
    scheme_kind(name)
    return _BUILTIN / f"{name}.json"


@lru_cache(maxsize=None)
def get_scheme(name: str) -> Scheme:
    """Built-in scheme, read from the packaged file (derived if the file is missing)."""
    path = builtin_path(name)
    if path.exists():
        return load_scheme(path)
    return derive_scheme(name)


def resolve_scheme(spec: str | None) -> Scheme | None:
    """Scheme from a built-in name or a file path; ``None``/"none"/"mitchell" gives baseline."""
    if spec is None or spec.lower() in ("none", "mitchell"):
        return None
    if spec in TABLE_BITS:
        return get_scheme(spec)
    return load_scheme(spec)
