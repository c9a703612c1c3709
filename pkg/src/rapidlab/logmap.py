"""Leading-one detection and Mitchell's piecewise-linear log / antilog.

The LOD is built the way a LUT fabric does it: every 4-bit segment is probed
in parallel for a zero flag and a local leading-one position, then a priority
stage picks the most significant flagged segment.  ``lod_segments`` and
``lod_priority`` expose the two halves separately because pipeline registers
may sit between them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .wordcore import Frac, Word, frac_width

SEGMENT = 4
# leading-one position inside a 4-bit segment (entry 0 is unused)
_LOD4 = np.array([0, 0, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3], dtype=np.int64)


class NoLeadingOne(ValueError):
    """The operand is zero, so it has no characteristic."""


@dataclass(frozen=True)
class LodTrace:
    segment_flags: tuple[int, ...]
    segment_positions: tuple[int, ...]
    k: int


@dataclass(frozen=True)
class LogApprox:
    k: int
    frac: Frac

    @property
    def value(self) -> float:
        return self.k + self.frac.value


def _segments(width: int) -> int:
    return -(-width // SEGMENT)


def lod(a: Word, trace: bool = False):
    """Index of the most significant set bit of ``a``.

    With ``trace=True`` returns ``(k, LodTrace)``.
    """
    if a.value == 0:
        raise NoLeadingOne(f"{a.width}-bit zero has no leading one")
    flags, positions = [], []
    for i in range(_segments(a.width)):
        seg = (a.value >> (SEGMENT * i)) & 0xF
        flags.append(int(seg != 0))
        positions.append(int(_LOD4[seg]))
    top = max(i for i, f in enumerate(flags) if f)
    k = SEGMENT * top + positions[top]
    if trace:
        return k, LodTrace(tuple(flags), tuple(positions), k)
    return k


def log_approx(a: Word) -> LogApprox:
    """Characteristic and left-aligned fraction of ``a`` (width ``a.width - 1``)."""
    k = lod(a)
    fw = frac_width(a.width)
    below = a.value - (1 << k)
    return LogApprox(k, Frac(fw, below << (fw - k)))


def antilog_shift(k_total: int, frac: Frac, out_width: int) -> Word:
    """``floor(2**k_total * (1 + frac))`` as an ``out_width``-bit word."""
    if k_total < 0:
        raise ValueError(f"negative characteristic {k_total}")
    if k_total >= out_width:
        raise OverflowError(f"characteristic {k_total} overflows a {out_width}-bit result")
    mantissa = (1 << frac.width) | frac.bits
    if k_total >= frac.width:
        value = mantissa << (k_total - frac.width)
    else:
        value = mantissa >> (frac.width - k_total)
    return Word(out_width, value)


# --- array versions -------------------------------------------------------


def lod_segments(values: np.ndarray, width: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-segment zero flags and local positions, shape ``(segments, n)``."""
    v = np.asarray(values, dtype=np.uint64)
    segs = np.stack([(v >> np.uint64(SEGMENT * i)) & np.uint64(0xF) for i in range(_segments(width))])
    return segs != 0, _LOD4[segs.astype(np.int64)]


def lod_priority(flags: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Combine segment probes into k; lanes with no flag get -1."""
    k = np.full(flags.shape[1:], -1, dtype=np.int64)
    for i in range(flags.shape[0]):
        k = np.where(flags[i], SEGMENT * i + positions[i], k)
    return k


def lod_array(values: np.ndarray, width: int) -> np.ndarray:
    return lod_priority(*lod_segments(values, width))


def fraction_array(values: np.ndarray, k: np.ndarray, fw: int) -> np.ndarray:
    """Bits below the leading one, left-aligned into ``fw`` bits (k <= fw)."""
    v = np.asarray(values, dtype=np.uint64)
    kk = np.maximum(k, 0).astype(np.uint64)
    below = v - (np.uint64(1) << kk)
    return np.where(k >= 0, below << (np.uint64(fw) - kk), np.uint64(0))


def antilog_array(k: np.ndarray, frac: np.ndarray, fw: int) -> np.ndarray:
    """Truncating antilog for arrays; negative k yields 0."""
    mant = (np.uint64(1) << np.uint64(fw)) | np.asarray(frac, dtype=np.uint64)
    k = np.asarray(k, dtype=np.int64)
    up = np.clip(k - fw, 0, 63).astype(np.uint64)
    down = np.clip(fw - k, 0, 63).astype(np.uint64)
    out = np.where(k >= fw, mant << up, mant >> down)
    return np.where(k < 0, np.uint64(0), out)
