"""Cycle-accurate model of the pipelined multiplier and divider.

The datapath is split into four phases:

    probe     per-segment LOD flags and positions of both operands
    log       LOD priority stage, characteristic and left-aligned fraction
    adds      coefficient lookup, ternary fraction add/subtract, characteristic sum
    shift     antilog shift and output saturation

A :class:`PipelinePlan` assigns consecutive phases to stages.  Every stage ends
in a register bank, so an operand pair presented on cycle ``t`` leaves on cycle
``t + S`` and a new pair can enter every cycle.

A token travelling through the registers is a dict of numpy lanes.  Injecting
arrays instead of scalars runs that many independent streams in lockstep,
which is how the large equivalence checks stay fast.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .logmap import antilog_array, fraction_array, lod_priority, lod_segments
from .mitchell import DivisionByZero, QuotientOverflow

PHASES = ("probe", "log", "adds", "shift")

CANONICAL = {
    ("mul", 1): (0, 0, 0, 0),
    ("mul", 2): (0, 0, 0, 1),
    ("mul", 3): (0, 1, 1, 2),
    ("mul", 4): (0, 1, 2, 3),
    ("div", 1): (0, 0, 0, 0),
    ("div", 2): (0, 0, 0, 1),
    ("div", 3): (0, 0, 1, 2),
    ("div", 4): (0, 1, 2, 3),
}


class PlanError(ValueError):
    """Pipeline plan that does not respect the phase order."""


@dataclass(frozen=True)
class PipelinePlan:
    """``assignment[i]`` is the stage that evaluates phase ``PHASES[i]``."""

    assignment: tuple

    def __post_init__(self):
        a = tuple(int(s) for s in self.assignment)
        object.__setattr__(self, "assignment", a)
        if len(a) != len(PHASES):
            raise PlanError(f"plan must assign all {len(PHASES)} phases, got {len(a)}")
        if a[0] != 0 or any(y - x not in (0, 1) for x, y in zip(a, a[1:])):
            raise PlanError(f"stages must start at 0 and follow dataflow order, got {a}")

    @property
    def stages(self) -> int:
        return self.assignment[-1] + 1

    def phases_of(self, stage: int) -> tuple:
        return tuple(p for p, s in zip(PHASES, self.assignment) if s == stage)

    @classmethod
    def canonical(cls, kind: str, stages: int) -> "PipelinePlan":
        try:
            return cls(CANONICAL[(kind, stages)])
        except KeyError:
            raise PlanError(f"no {stages}-stage plan; choose 1 to 4") from None


# --- phases -------------------------------------------------------------------


def _probe(unit, t):
    wa = unit.width if unit.kind == "mul" else 2 * unit.width
    t["flags_a"], t["pos_a"] = lod_segments(t["a"], wa)
    t["flags_b"], t["pos_b"] = lod_segments(t["b"], unit.width)
    return t


def _log(unit, t):
    fw = unit.frac_width
    t["k1"] = lod_priority(t.pop("flags_a"), t.pop("pos_a"))
    t["k2"] = lod_priority(t.pop("flags_b"), t.pop("pos_b"))
    t["f1"] = fraction_array(t["a"], t["k1"], fw)
    t["f2"] = fraction_array(t["b"], t["k2"], fw)
    return t


def _adds(unit, t):
    fw = np.uint64(unit.frac_width)
    mask = np.uint64((1 << unit.frac_width) - 1)
    f1, f2 = t.pop("f1"), t.pop("f2")
    c = unit.coefficient_array(f1, f2)
    if unit.kind == "mul":
        total = f1 + f2 + c
        t["exp"] = t["k1"] + t["k2"] + (total >> fw).astype(np.int64)
    else:
        total = f1 + (np.uint64(2) << fw) - f2 - c
        t["exp"] = t["k1"] - t["k2"] - (2 - (total >> fw).astype(np.int64))
    t["frac"] = total & mask
    t["zero"] = (t.pop("k1") < 0) | (t.pop("k2") < 0)
    return t


def _shift(unit, t):
    out = antilog_array(t["exp"], t.pop("frac"), unit.frac_width)
    top = (1 << unit.out_width) - 1
    if unit.kind == "mul":
        out = np.where(t.pop("exp") >= unit.out_width, np.uint64(top), out)
    else:
        t.pop("exp")
        out = np.minimum(out, np.uint64(top))
    t["out"] = np.where(t.pop("zero"), np.uint64(0), out)
    return t


_PHASE_FN = {"probe": _probe, "log": _log, "adds": _adds, "shift": _shift}


# --- streaming ----------------------------------------------------------------


@dataclass(frozen=True)
class StreamCycle:
    cycle: int
    in_a: int | None
    in_b: int | None
    out: int | None
    valid: bool


class PipelinedUnit:
    def __init__(self, unit, plan: PipelinePlan, trace: bool = False):
        self.unit = unit
        self.plan = plan
        self._stages = [[_PHASE_FN[p] for p in plan.phases_of(s)] for s in range(plan.stages)]
        self.registers: list = [None] * plan.stages
        self.cycle = 0
        self.trace: list[StreamCycle] | None = [] if trace else None

    @property
    def stages(self) -> int:
        return self.plan.stages

    @property
    def empty(self) -> bool:
        return all(r is None for r in self.registers)

    def _check(self, a, b):
        u = self.unit
        a = np.asarray(a, dtype=np.uint64)
        b = np.asarray(b, dtype=np.uint64)
        if a.shape != b.shape:
            raise ValueError("operand lanes differ in shape")
        wa = u.width if u.kind == "mul" else 2 * u.width
        if np.any(a >> np.uint64(wa)) or np.any(b >> np.uint64(u.width)):
            raise ValueError(f"operand does not fit the {u.label} unit")
        if u.kind == "div":
            if np.any(b == 0):
                raise DivisionByZero("divisor is zero")
            if not np.all(u.valid(a, b)):
                raise QuotientOverflow(f"quotient does not fit in {u.width} bits")
        return a, b

    def _run(self, stage: int, token):
        if token is None:
            return None
        for fn in self._stages[stage]:
            token = fn(self.unit, token)
        return token

    def clock(self, pair=None):
        """Advance one cycle; returns the result leaving the pipeline, or None."""
        if pair is not None:
            a, b = self._check(*pair)
            token = {"a": a, "b": b, "scalar": a.ndim == 0}
        else:
            token = None
        leaving = self.registers[-1]
        for s in range(self.stages - 1, 0, -1):
            self.registers[s] = self._run(s, self.registers[s - 1])
        self.registers[0] = self._run(0, token)
        out = None
        if leaving is not None:
            out = int(leaving["out"]) if leaving["scalar"] else leaving["out"]
        if self.trace is not None:
            self.trace.append(StreamCycle(
                self.cycle,
                None if pair is None else _plain(pair[0]),
                None if pair is None else _plain(pair[1]),
                _plain(out),
                out is not None,
            ))
        self.cycle += 1
        return out

    def flush(self) -> list:
        """Drain everything in flight, in injection order."""
        out = []
        while not self.empty:
            r = self.clock()
            if r is not None:
                out.append(r)
        return out


def _plain(v):
    if v is None:
        return None
    v = np.asarray(v)
    return int(v) if v.ndim == 0 else v.tolist()


def make_pipeline(unit, plan: PipelinePlan | int, trace: bool = False) -> PipelinedUnit:
    if isinstance(plan, int):
        plan = PipelinePlan.canonical(unit.kind, plan)
    return PipelinedUnit(unit, plan, trace)


def stream(pu: PipelinedUnit, pairs) -> list[tuple[int, object]]:
    """Feed ``pairs`` back to back, then drain; returns ``(cycle, output)`` per result."""
    results = []
    for pair in pairs:
        cycle = pu.cycle
        r = pu.clock(pair)
        if r is not None:
            results.append((cycle, r))
    while not pu.empty:
        cycle = pu.cycle
        r = pu.clock()
        if r is not None:
            results.append((cycle, r))
    return results


@dataclass(frozen=True)
class EquivalenceResult:
    pairs: int
    mismatches: int
    latency_ok: bool

    @property
    def equivalent(self) -> bool:
        return self.mismatches == 0 and self.latency_ok


def check_equivalence(unit, plan: PipelinePlan | int, a, b, lanes: int = 1) -> EquivalenceResult:
    """Stream ``(a[i], b[i])`` through the pipeline and compare with ``unit.evaluate``.

    With ``lanes > 1`` the pairs are dealt into that many lockstep streams;
    each cycle injects one pair per lane.
    """
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    n = a.size
    pu = make_pipeline(unit, plan)
    expected = unit.evaluate(a, b)
    if lanes <= 1:
        tokens = list(zip(a.tolist(), b.tolist()))
    else:
        cuts = range(0, n, lanes)
        tokens = [(a[i:i + lanes], b[i:i + lanes]) for i in cuts]
    results = stream(pu, tokens)
    latency_ok = len(results) == len(tokens) and all(c == i + pu.stages for i, (c, _) in enumerate(results))
    got = np.concatenate([np.atleast_1d(np.asarray(r, dtype=np.uint64)) for _, r in results]) if results else \
        np.zeros(0, dtype=np.uint64)
    if got.size != n:
        return EquivalenceResult(n, n, latency_ok)
    return EquivalenceResult(n, int(np.count_nonzero(got != expected)), latency_ok)


TRACE_FIELDS = ["cycle", "in_a", "in_b", "out", "valid"]


def write_trace(trace, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_FIELDS)
    for c in trace:
        w.writerow([c.cycle, "" if c.in_a is None else c.in_a, "" if c.in_b is None else c.in_b,
                    "" if c.out is None else c.out, int(c.valid)])
