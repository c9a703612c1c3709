"""Error characterization of approximate units: ARE, PRE and bias.

Inputs are processed in fixed chunks.  Each chunk is reduced to a partial
(count, sum |e|, signed sum, max |e|, exclusions); partials are combined in
chunk order with ``math.fsum``, so reports do not depend on how many threads
evaluated the chunks.  Monte Carlo chunk ``i`` draws from the ``i``-th child of
``SeedSequence(seed)``, which makes the sample stream independent of
scheduling as well.

Relative error is ``(exact - approx) / exact`` on the fixed-point value the
datapath produces just before its final truncation to an integer word.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .mitchell import DivUnit, MulUnit

CHUNK = 1 << 20
MAX_EXHAUSTIVE = 1 << 32
FIELDS = ["unit", "width", "scheme", "mode", "samples", "seed", "are_pct", "pre_pct", "bias_pct",
          "excluded_zero", "excluded_invalid"]


class PlanError(ValueError):
    """Sampling plan not applicable to the unit."""


@dataclass(frozen=True)
class SamplingPlan:
    mode: str = "exhaustive"
    samples: int = 0
    seed: int | None = None

    def __post_init__(self):
        if self.mode not in ("exhaustive", "monte_carlo"):
            raise PlanError(f"unknown sampling mode {self.mode!r}")
        if self.mode == "monte_carlo":
            if self.samples <= 0:
                raise PlanError("Monte Carlo needs a positive sample count")
            if self.seed is None:
                raise PlanError("Monte Carlo needs a seed")
        elif self.seed is not None or self.samples:
            raise PlanError("exhaustive plans take neither a sample count nor a seed")

    @classmethod
    def exhaustive(cls) -> "SamplingPlan":
        return cls("exhaustive")

    @classmethod
    def monte_carlo(cls, samples: int, seed: int) -> "SamplingPlan":
        return cls("monte_carlo", samples, seed)


@dataclass(frozen=True)
class ErrorReport:
    unit: str
    width: int
    scheme: str
    mode: str
    samples: int
    seed: int | None
    are_pct: float
    pre_pct: float
    bias_pct: float
    excluded_zero: int
    excluded_invalid: int

    # short aliases
    @property
    def are(self) -> float:
        return self.are_pct

    @property
    def pre(self) -> float:
        return self.pre_pct

    @property
    def bias(self) -> float:
        return self.bias_pct


class ExactUnit:
    """Accurate reference unit with the same interface as the approximate ones."""

    def __init__(self, kind: str, width: int):
        self._shape = MulUnit(width) if kind == "mul" else DivUnit(width)
        self.kind, self.width, self.scheme = kind, width, None
        self.frac_width = 0

    def __getattr__(self, item):
        return getattr(self._shape, item)

    @property
    def name(self) -> str:
        return f"exact@{self._shape.label}"

    def approx_real(self, a, b):
        return _exact_real(self._shape, a, b)

    def evaluate(self, a, b):
        return self._shape.exact(a, b)


def unit_kind_name(unit) -> str:
    if isinstance(unit, ExactUnit):
        return f"exact-{unit.kind}"
    return f"{'mitchell' if unit.scheme is None else 'rapid'}-{unit.kind}"


def scheme_name(unit) -> str:
    return "none" if unit.scheme is None else unit.scheme.name


# --- operand sources ----------------------------------------------------------


def _grid_slice(unit, start: int):
    """One chunk of the full operand grid; the second operand is the low N bits of the index."""
    bw = unit.width
    idx = np.arange(start, min(start + CHUNK, unit.input_space()), dtype=np.uint64)
    return idx >> np.uint64(bw), idx & np.uint64((1 << bw) - 1)


def _exhaustive_chunks(unit):
    for start in range(0, unit.input_space(), CHUNK):
        yield lambda start=start: _grid_slice(unit, start)


def _div_divisor_weights(n: int) -> np.ndarray:
    """Number of valid dividends for every divisor 1 .. 2**n - 1."""
    v = np.arange(1, 1 << n, dtype=np.float64)
    return np.minimum(v * 2.0 ** n, 2.0 ** (2 * n)) - v


def sample_pairs(unit, rng: np.random.Generator, count: int):
    """``count`` operand pairs drawn uniformly from the unit's valid input space."""
    n = unit.width
    if unit.kind == "mul":
        a = rng.integers(0, 1 << n, count, dtype=np.uint64)
        b = rng.integers(0, 1 << n, count, dtype=np.uint64)
        return a, b
    # divisor drawn in proportion to its number of valid dividends, then a
    # dividend uniformly from [v, min(2**n * v, 2**2n)): uniform over valid pairs
    w = _div_divisor_weights(n)
    cdf = np.cumsum(w)
    v = (np.searchsorted(cdf, rng.random(count) * cdf[-1], side="right") + 1).astype(np.uint64)
    v = np.minimum(v, np.uint64((1 << n) - 1))
    hi = np.minimum(v << np.uint64(n), np.uint64(1 << (2 * n)))
    d = v + np.floor(rng.random(count) * (hi - v).astype(np.float64)).astype(np.uint64)
    return np.minimum(d, hi - np.uint64(1)), v


def _mc_chunks(unit, plan: SamplingPlan):
    sizes = [CHUNK] * (plan.samples // CHUNK)
    if plan.samples % CHUNK:
        sizes.append(plan.samples % CHUNK)
    children = np.random.SeedSequence(plan.seed).spawn(len(sizes))
    for size, child in zip(sizes, children):
        yield lambda size=size, child=child: sample_pairs(unit, np.random.default_rng(child), size)


# --- reduction --------------------------------------------------------------------


def _exact_real(unit, a, b) -> np.ndarray:
    if unit.kind == "mul":
        return unit.exact(a, b).astype(np.float64)
    return np.asarray(a, dtype=np.float64) / np.asarray(b, dtype=np.float64)


@dataclass
class _Partial:
    count: int = 0
    abs_sum: float = 0.0
    signed_sum: float = 0.0
    peak: float = 0.0
    excluded_zero: int = 0
    excluded_invalid: int = 0


def _reduce(unit, a, b) -> _Partial:
    p = _Partial()
    if unit.kind == "div":
        ok = unit.valid(a, b)
        p.excluded_invalid = int((~ok).sum())
        a, b = a[ok], b[ok]
    exact = _exact_real(unit, a, b)
    # zero results are excluded (relative error undefined); for the divider
    # this also drops dividends below the divisor, whose integer quotient is 0
    nz = exact >= 1 if unit.kind == "div" else exact > 0
    p.excluded_zero = int((~nz).sum())
    a, b, exact = a[nz], b[nz], exact[nz]
    if exact.size:
        e = (exact - unit.approx_real(a, b)) / exact
        ae = np.abs(e)
        p.count = int(e.size)
        # chunk contents are fixed, so numpy's pairwise sum is reproducible
        p.abs_sum = float(ae.sum())
        p.signed_sum = float(e.sum())
        p.peak = float(ae.max())
    return p


def _characterize_chunks(unit, tasks, threads: int) -> list[_Partial]:
    if threads <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: t(), tasks))


def characterize(unit, plan: SamplingPlan, threads: int = 1, progress=None) -> ErrorReport:
    """ARE / PRE / bias (in %) of ``unit`` over the plan's operand population."""
    if plan.mode == "exhaustive":
        if unit.input_space() > MAX_EXHAUSTIVE:
            raise PlanError(f"{unit.name}: exhaustive needs {unit.input_space()} pairs, limit is 2**32")
        draws = _exhaustive_chunks(unit)
    else:
        draws = _mc_chunks(unit, plan)
    tasks = [lambda draw=draw: _reduce(unit, *draw()) for draw in draws]
    if progress is not None:
        tasks = [_reporting(t, i, len(tasks), progress) for i, t in enumerate(tasks)]
    parts = _characterize_chunks(unit, tasks, threads)
    count = sum(p.count for p in parts)
    if count == 0:
        raise PlanError(f"{unit.name}: no operand pair with a nonzero result")
    are = math.fsum(p.abs_sum for p in parts) / count
    bias = abs(math.fsum(p.signed_sum for p in parts)) / count
    pre = max(p.peak for p in parts)
    return ErrorReport(
        unit=unit_kind_name(unit),
        width=unit.width,
        scheme=scheme_name(unit),
        mode=plan.mode,
        samples=count,
        seed=plan.seed,
        are_pct=100 * are,
        pre_pct=100 * pre,
        bias_pct=100 * bias,
        excluded_zero=sum(p.excluded_zero for p in parts),
        excluded_invalid=sum(p.excluded_invalid for p in parts),
    )


def _reporting(task, i, n, progress):
    def run():
        out = task()
        progress(i + 1, n)
        return out
    return run


def sweep(units, plan: SamplingPlan, threads: int = 1, progress=None) -> list[ErrorReport]:
    return [characterize(u, plan, threads, progress) for u in units]


# --- output -------------------------------------------------------------------


def _row(r: ErrorReport) -> dict:
    d = asdict(r)
    d["seed"] = "" if r.seed is None else r.seed
    for k in ("are_pct", "pre_pct", "bias_pct"):
        d[k] = f"{d[k]:.6f}"
    return d


def to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(_row(r))
    return buf.getvalue()


def to_json(reports) -> str:
    return json.dumps([asdict(r) for r in reports], indent=2) + "\n"


def from_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
