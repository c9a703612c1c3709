"""JPEG-style compression benchmark with pluggable multipliers and dividers.

The codec keeps the lossy stages of baseline JPEG (level shift, 8x8 DCT,
quantization and the inverse path) and drops entropy coding, which does not
change the reconstructed pixels.

Fixed-point conventions:

* samples and DCT coefficients are sign-magnitude values with 4 fraction
  bits; magnitudes stay below 2**16, so they fit the unsigned 16-bit
  multiplier port and the sign is reapplied afterwards;
* DCT constants ``cos(k*pi/16)/2`` are unsigned with 15 fraction bits;
* quantization divides a rounded integer magnitude by the table entry on the
  16/8 divider; dividends too large for an 8-bit quotient are shifted right
  first and the quotient is shifted back (range reduction);
* dequantization multiplies the level by the table entry on the multiplier.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .mitchell import DivUnit, MulUnit
from .rapidscheme import get_scheme

DATA_FRAC = 4
COS_FRAC = 15
PSNR_CAP = 99.0

_C = [round(math.cos(k * math.pi / 16) / 2 * (1 << COS_FRAC)) for k in range(8)]
C1, C2, C3, C4, C5, C6, C7 = _C[1:]

LUMINANCE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.int64)


class ImageError(ValueError):
    pass


# --- arithmetic profiles ----------------------------------------------------------


@dataclass(frozen=True)
class ArithProfile:
    """16-bit multiplier and 16/8 divider; ``None`` means accurate arithmetic."""

    name: str
    mul_unit: MulUnit | None = None
    div_unit: DivUnit | None = None

    def __post_init__(self):
        if self.mul_unit is not None and self.mul_unit.width != 16:
            raise ValueError("profile multiplier must be 16-bit")
        if self.div_unit is not None and self.div_unit.width != 8:
            raise ValueError("profile divider must be 16/8")

    def mul(self, a, b) -> np.ndarray:
        """Unsigned 16 x 16 product of magnitudes."""
        a = np.asarray(a, dtype=np.uint64)
        b = np.asarray(b, dtype=np.uint64)
        if self.mul_unit is None:
            return a * b
        a, b = np.broadcast_arrays(a, b)
        return self.mul_unit.evaluate(a, b)

    def div(self, dividend, divisor) -> np.ndarray:
        """Unsigned quotient; requires ``dividend < 2**16`` and ``1 <= divisor < 2**8``."""
        d = np.asarray(dividend, dtype=np.uint64)
        v = np.asarray(divisor, dtype=np.uint64)
        d, v = np.broadcast_arrays(d, v)
        if self.div_unit is None:
            return d // v
        # shift until the quotient fits the 8-bit port
        s = np.zeros(d.shape, dtype=np.uint64)
        while True:
            over = (d >> s) >= (v << np.uint64(8))
            if not over.any():
                break
            s = s + over.astype(np.uint64)
        return self.div_unit.evaluate(d >> s, v) << s


def exact_profile() -> ArithProfile:
    return ArithProfile("exact")


def mitchell_profile() -> ArithProfile:
    return ArithProfile("mitchell", MulUnit(16), DivUnit(8))


def rapid_profile(mul_scheme: str = "RAPID-10-mul", div_scheme: str = "RAPID-9-div") -> ArithProfile:
    return ArithProfile(f"{mul_scheme}+{div_scheme}",
                        MulUnit(16, get_scheme(mul_scheme)), DivUnit(8, get_scheme(div_scheme)))


PROFILES = {"exact": exact_profile, "mitchell": mitchell_profile, "rapid": rapid_profile}


def get_profile(name: str) -> ArithProfile:
    try:
        return PROFILES[name]()
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {', '.join(PROFILES)}") from None


def _smul(profile: ArithProfile, x: np.ndarray, const: int) -> np.ndarray:
    """Signed Q.4 value times an unsigned Q.15 constant, rounded back to Q.4."""
    # the multiplier port is 16 bits wide; saturate rather than wrap
    mag = profile.mul(np.minimum(np.abs(x), (1 << 16) - 1), const).astype(np.int64)
    mag = (mag + (1 << (COS_FRAC - 1))) >> COS_FRAC
    return np.where(x < 0, -mag, mag)


# --- DCT ----------------------------------------------------------------------


def _dct_1d(x, p: ArithProfile):
    """Butterfly 8-point DCT along the last axis of a Q.4 array."""
    s = [x[..., i] + x[..., 7 - i] for i in range(4)]
    d = [x[..., i] - x[..., 7 - i] for i in range(4)]
    m = lambda v, c: _smul(p, v, c)  # noqa: E731
    out = [None] * 8
    out[0] = m(s[0] + s[1] + s[2] + s[3], C4)
    out[4] = m(s[0] - s[1] - s[2] + s[3], C4)
    e0, e1 = s[0] - s[3], s[1] - s[2]
    out[2] = m(e0, C2) + m(e1, C6)
    out[6] = m(e0, C6) - m(e1, C2)
    out[1] = m(d[0], C1) + m(d[1], C3) + m(d[2], C5) + m(d[3], C7)
    out[3] = m(d[0], C3) - m(d[1], C7) - m(d[2], C1) - m(d[3], C5)
    out[5] = m(d[0], C5) - m(d[1], C1) + m(d[2], C7) + m(d[3], C3)
    out[7] = m(d[0], C7) - m(d[1], C5) + m(d[2], C3) - m(d[3], C1)
    return np.stack(out, axis=-1)


def _idct_1d(X, p: ArithProfile):
    m = lambda v, c: _smul(p, v, c)  # noqa: E731
    a = m(X[..., 0] + X[..., 4], C4)
    b = m(X[..., 0] - X[..., 4], C4)
    q1 = m(X[..., 2], C2) + m(X[..., 6], C6)
    q2 = m(X[..., 2], C6) - m(X[..., 6], C2)
    e = [a + q1, b + q2, b - q2, a - q1]
    X1, X3, X5, X7 = X[..., 1], X[..., 3], X[..., 5], X[..., 7]
    o = [
        m(X1, C1) + m(X3, C3) + m(X5, C5) + m(X7, C7),
        m(X1, C3) - m(X3, C7) - m(X5, C1) - m(X7, C5),
        m(X1, C5) - m(X3, C1) + m(X5, C7) + m(X7, C3),
        m(X1, C7) - m(X3, C5) + m(X5, C3) - m(X7, C1),
    ]
    out = [None] * 8
    for n in range(4):
        out[n] = e[n] + o[n]
        out[7 - n] = e[n] - o[n]
    return np.stack(out, axis=-1)


def dct_8x8(block, profile: ArithProfile) -> np.ndarray:
    """2-D DCT of level-shifted Q.4 blocks (shape ``(..., 8, 8)``), rows then columns."""
    x = np.asarray(block, dtype=np.int64)
    rows = _dct_1d(x, profile)
    return np.swapaxes(_dct_1d(np.swapaxes(rows, -1, -2), profile), -1, -2)


def idct_8x8(coeffs, profile: ArithProfile) -> np.ndarray:
    X = np.asarray(coeffs, dtype=np.int64)
    cols = np.swapaxes(_idct_1d(np.swapaxes(X, -1, -2), profile), -1, -2)
    return _idct_1d(cols, profile)


# --- quantization ---------------------------------------------------------------


def quality_table(quality: int = 50, base: np.ndarray = LUMINANCE) -> np.ndarray:
    """Standard luminance table scaled the usual libjpeg way."""
    if not 1 <= quality <= 100:
        raise ValueError("quality must be in 1..100")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    return np.clip((base * scale + 50) // 100, 1, 255)


def check_qmatrix(q) -> np.ndarray:
    q = np.asarray(q, dtype=np.int64)
    if q.shape != (8, 8) or q.min() < 1 or q.max() > 255:
        raise ValueError("quantization matrix must be 8x8 with entries in 1..255")
    return q


def quantize(coeffs, qmatrix, profile: ArithProfile, rounding: bool = True) -> np.ndarray:
    """Levels ``round(|c| / q)`` (or ``floor`` without rounding), sign restored.

    ``coeffs`` are Q.4 values; the magnitude is rounded to an integer before
    the division.
    """
    q = check_qmatrix(qmatrix)
    c = np.asarray(coeffs, dtype=np.int64)
    mag = (np.abs(c) + (1 << (DATA_FRAC - 1))) >> DATA_FRAC
    if rounding:
        mag = mag + q // 2
    mag = np.minimum(mag, (1 << 16) - 1)
    q = np.broadcast_to(q, c.shape)
    level = profile.div(mag, q).astype(np.int64)
    return np.where(c < 0, -level, level)


def dequantize(levels, qmatrix, profile: ArithProfile) -> np.ndarray:
    """Q.4 coefficients ``level * q``."""
    q = np.broadcast_to(check_qmatrix(qmatrix), np.shape(levels))
    lv = np.asarray(levels, dtype=np.int64)
    mag = profile.mul(np.minimum(np.abs(lv), (1 << 16) - 1), q).astype(np.int64) << DATA_FRAC
    return np.where(lv < 0, -mag, mag)


# --- codec ----------------------------------------------------------------------


@dataclass(frozen=True)
class PsnrReport:
    psnr: float
    mse: float
    baseline_psnr: float


def psnr(original, reconstructed) -> tuple[float, float]:
    """``(psnr_db, mse)``; identical images give the capped value."""
    a = np.asarray(original, dtype=np.float64)
    b = np.asarray(reconstructed, dtype=np.float64)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0:
        return PSNR_CAP, 0.0
    return min(PSNR_CAP, 10 * math.log10(255.0 ** 2 / mse)), mse


def to_blocks(image: np.ndarray) -> tuple[np.ndarray, tuple[int, int]]:
    """Edge-pad to multiples of 8 and split into ``(n, 8, 8)`` blocks."""
    h, w = image.shape
    H, W = -(-h // 8) * 8, -(-w // 8) * 8
    padded = np.pad(image, ((0, H - h), (0, W - w)), mode="edge")
    blocks = padded.reshape(H // 8, 8, W // 8, 8).swapaxes(1, 2).reshape(-1, 8, 8)
    return blocks, (H, W)


def from_blocks(blocks: np.ndarray, padded_shape, shape) -> np.ndarray:
    H, W = padded_shape
    img = blocks.reshape(H // 8, W // 8, 8, 8).swapaxes(1, 2).reshape(H, W)
    return img[: shape[0], : shape[1]]


def check_image(image) -> np.ndarray:
    img = np.asarray(image)
    if img.ndim != 2 or img.size == 0:
        raise ImageError("expected a nonempty 2-D grayscale image")
    if img.min() < 0 or img.max() > 255:
        raise ImageError("samples must lie in 0..255")
    return img.astype(np.int64)


def codec(image, qmatrix, profile: ArithProfile) -> np.ndarray:
    """Compress and reconstruct; returns the reconstructed 8-bit image."""
    img = check_image(image)
    q = check_qmatrix(qmatrix)
    blocks, padded = to_blocks(img)
    x = (blocks - 128) << DATA_FRAC
    levels = quantize(dct_8x8(x, profile), q, profile)
    y = idct_8x8(dequantize(levels, q, profile), profile)
    pixels = ((y + (1 << (DATA_FRAC - 1))) >> DATA_FRAC) + 128
    return np.clip(from_blocks(pixels, padded, img.shape), 0, 255).astype(np.uint8)


def run_codec(image, qmatrix, profile: ArithProfile, baseline_psnr: float | None = None):
    """``(reconstructed, PsnrReport)``; the baseline is an accurate-arithmetic run."""
    out = codec(image, qmatrix, profile)
    p, mse = psnr(image, out)
    if baseline_psnr is None:
        if profile.mul_unit is None and profile.div_unit is None:
            baseline_psnr = p
        else:
            baseline_psnr = psnr(image, codec(image, qmatrix, exact_profile()))[0]
    return out, PsnrReport(p, mse, baseline_psnr)


# --- I/O --------------------------------------------------------------------------


def read_pgm(path) -> np.ndarray:
    try:
        with Image.open(path) as im:
            if im.format != "PPM" or im.mode not in ("L", "I", "I;16", "I;16B"):
                raise ImageError(f"{path}: not a grayscale PGM")
            img = np.asarray(im)
    except (OSError, SyntaxError) as e:
        raise ImageError(f"{path}: {e}") from e
    if img.max(initial=0) > 255:
        raise ImageError(f"{path}: only 8-bit PGM is supported")
    return img.astype(np.uint8)


def write_pgm(path, image) -> None:
    img = check_image(image).astype(np.uint8)
    Image.fromarray(img, mode="L").save(path, format="PPM")


def report_json(image: str, profile: str, quality: int, report: PsnrReport) -> dict:
    return {
        "image": image,
        "profile": profile,
        "quality": quality,
        "psnr_db": round(report.psnr, 6),
        "baseline_psnr_db": round(report.baseline_psnr, 6),
        "mse": round(report.mse, 6),
    }


def bench(paths, profile: ArithProfile, quality: int = 50) -> list[dict]:
    q = quality_table(quality)
    rows = []
    for path in paths:
        img = read_pgm(path)
        _, rep = run_codec(img, q, profile)
        rows.append(report_json(Path(path).name, profile.name, quality, rep))
    return rows


def dumps_reports(rows) -> str:
    return json.dumps(rows, indent=2) + "\n"
