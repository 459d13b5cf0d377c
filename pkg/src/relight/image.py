"""Image representation and shared pixel-level primitives.

Planes are 2-D float64 numpy arrays in row-major (height, width) order with
samples nominally in [0, 1]. Conversion to and from 8-bit integers happens
only at the I/O boundary; all math runs in the real-valued domain.
Intermediate planes (reflection, gain) may exceed 1 and are clamped only
when encoded for display.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError


class ImageDecodeError(Exception):
    """Raised when a file cannot be decoded into a supported 8-bit image."""


@dataclass
class ColorImage:
    """Three aligned single-channel planes plus source bit depth."""

    r: np.ndarray
    g: np.ndarray
    b: np.ndarray
    source_depth: int = 8

    def __post_init__(self) -> None:
        if not (self.r.shape == self.g.shape == self.b.shape):
            raise ValueError(
                f"channel shapes differ: {self.r.shape}, {self.g.shape}, {self.b.shape}"
            )
        if self.r.ndim != 2:
            raise ValueError(f"planes must be 2-D, got {self.r.ndim}-D")

    @property
    def shape(self) -> tuple[int, int]:
        return self.r.shape

    def planes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.r, self.g, self.b

    def is_gray(self) -> bool:
        """True when all three channels are samplewise identical."""
        return bool(np.array_equal(self.r, self.g) and np.array_equal(self.g, self.b))


def from_planes(r: np.ndarray, g: np.ndarray, b: np.ndarray) -> ColorImage:
    return ColorImage(np.asarray(r, np.float64), np.asarray(g, np.float64), np.asarray(b, np.float64))


def from_gray(plane: np.ndarray) -> ColorImage:
    """Replicate a single plane into an exactly-gray ColorImage."""
    p = np.asarray(plane, np.float64)
    return ColorImage(p.copy(), p.copy(), p.copy())


def load_image(path: str | os.PathLike) -> ColorImage:
    """Decode an 8-bit PNG/JPEG/PPM/PGM file into real-valued [0, 1] planes.

    Gray files are replicated into three identical channels. Anything that
    is not 8-bit 1- or 3-channel data (16-bit, palette, alpha, ...) is
    rejected with an error naming the offending mode.
    """
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode == "L":
                data = np.asarray(im, dtype=np.float64) / 255.0
                return from_gray(data)
            if mode == "RGB":
                data = np.asarray(im, dtype=np.float64) / 255.0
                return ColorImage(
                    data[:, :, 0].copy(), data[:, :, 1].copy(), data[:, :, 2].copy()
                )
            raise ImageDecodeError(
                f"{path}: unsupported image mode {mode!r} (only 8-bit 1- or 3-channel input is supported)"
            )
    except FileNotFoundError:
        raise ImageDecodeError(f"{path}: file not found")
    except UnidentifiedImageError:
        raise ImageDecodeError(f"{path}: not a decodable image")
    except OSError as exc:
        raise ImageDecodeError(f"{path}: unreadable ({exc})")


def to_uint8(plane: np.ndarray) -> np.ndarray:
    """Quantize a [0, 1] plane to 8 bits, rounding half up."""
    clipped = np.clip(plane, 0.0, 1.0)
    return np.floor(clipped * 255.0 + 0.5).astype(np.uint8)


def save_image(img: ColorImage, path: str | os.PathLike) -> None:
    """Encode as an 8-bit RGB PNG. Byte-deterministic for identical input."""
    stacked = np.stack([to_uint8(img.r), to_uint8(img.g), to_uint8(img.b)], axis=-1)
    Image.fromarray(stacked, mode="RGB").save(path, format="PNG")


def rgb_to_intensity(img: ColorImage) -> np.ndarray:
    """Mean-value intensity (R + G + B) / 3."""
    return (img.r + img.g + img.b) / 3.0


def extract_hue(img: ColorImage) -> np.ndarray:
    """Hue plane in [0, 1] using the standard HSI angle.

    theta = arccos(((R-G) + (R-B)) / (2 sqrt((R-G)^2 + (R-B)(G-B)))), taken
    as 2*pi - theta when B > G, then normalized by 2*pi. Achromatic pixels
    (R == G == B) get hue 0. The formula is invariant under per-pixel
    positive scaling of the channels.
    """
    r, g, b = img.planes()
    rg = r - g
    rb = r - b
    gb = g - b
    num = 0.5 * (rg + rb)
    den = np.sqrt(rg * rg + rb * gb)
    achromatic = den == 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        cosang = np.where(achromatic, 1.0, num / np.where(achromatic, 1.0, den))
    theta = np.arccos(np.clip(cosang, -1.0, 1.0))
    hue = np.where(b > g, 2.0 * np.pi - theta, theta) / (2.0 * np.pi)
    return np.where(achromatic, 0.0, hue)


def percentile(plane: np.ndarray, p: float) -> float:
    """Lower-nearest-rank percentile: the smallest sample v with at least
    p*N samples <= v."""
    if plane.size == 0:
        raise ValueError("percentile of an empty plane")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"percentile fraction must be in [0, 1], got {p}")
    flat = np.sort(plane, axis=None)
    rank = int(np.ceil(p * flat.size)) - 1
    return float(flat[max(rank, 0)])
