"""Raster types and pixel-level kernels.

Grayscale conversion, nearest-neighbor resizing, fixed and Otsu
binarization, flattening to feature vectors, Sobel gradients and edge
maps. Everything here is a pure function; image values are never
mutated after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ImageTooSmall

# gradient along x (columns); the y kernel is this one transposed
SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)


def _check_dims(width: int, height: int) -> None:
    if width < 1 or height < 1:
        raise DimensionMismatch(f"image dims must be positive, got {width}x{height}")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale raster; `data` is row-major with shape (height, width)."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        _check_dims(self.width, self.height)
        arr = np.asarray(self.data)
        if arr.size != self.width * self.height:
            raise DimensionMismatch(
                f"expected {self.width * self.height} pixels, got {arr.size}"
            )
        arr = arr.reshape(self.height, self.width)
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("intensities must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "data", np.ascontiguousarray(arr))

    @classmethod
    def from_array(cls, arr) -> "GrayImage":
        arr = np.asarray(arr)
        h, w = arr.shape
        return cls(w, h, arr)

    def __eq__(self, other):
        return (
            isinstance(other, GrayImage)
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.data, other.data)
        )


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Bit raster; `data` is row-major with shape (height, width), values {0, 1}."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        _check_dims(self.width, self.height)
        arr = np.asarray(self.data)
        if arr.size != self.width * self.height:
            raise DimensionMismatch(
                f"expected {self.width * self.height} pixels, got {arr.size}"
            )
        arr = arr.reshape(self.height, self.width)
        uniq = np.unique(arr)
        if not np.isin(uniq, (0, 1)).all():
            raise ValueError("binary image values must be 0 or 1")
        object.__setattr__(self, "data", np.ascontiguousarray(arr.astype(np.uint8)))

    @classmethod
    def from_array(cls, arr) -> "BinaryImage":
        arr = np.asarray(arr)
        h, w = arr.shape
        return cls(w, h, arr)

    def __eq__(self, other):
        return (
            isinstance(other, BinaryImage)
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.data, other.data)
        )


@dataclass(frozen=True, eq=False)
class GradientImage:
    """Per-pixel Sobel responses; magnitude = hypot(gx, gy) within 1e-9."""

    width: int
    height: int
    gx: np.ndarray
    gy: np.ndarray
    magnitude: np.ndarray

    def __post_init__(self):
        _check_dims(self.width, self.height)
        shape = (self.height, self.width)
        for name in ("gx", "gy", "magnitude"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).reshape(shape)
            object.__setattr__(self, name, arr)
        if np.abs(self.magnitude - np.hypot(self.gx, self.gy)).max() > 1e-9:
            raise ValueError("magnitude inconsistent with gx, gy")

    @classmethod
    def from_gradients(cls, gx: np.ndarray, gy: np.ndarray) -> "GradientImage":
        gx = np.asarray(gx, dtype=np.float64)
        h, w = gx.shape
        return cls(w, h, gx, gy, np.hypot(gx, gy))


def to_grayscale(rgb, width: int, height: int) -> GrayImage:
    """Convert an interleaved 8-bit RGB raster to grayscale.

    Luma is round(0.299 R + 0.587 G + 0.114 B), clamped to [0, 255];
    halves round up.
    """
    if isinstance(rgb, (bytes, bytearray)):
        arr = np.frombuffer(rgb, dtype=np.uint8)
    else:
        arr = np.asarray(rgb)
    if arr.size != 3 * width * height:
        raise DimensionMismatch(
            f"expected {3 * width * height} RGB bytes, got {arr.size}"
        )
    rgbf = arr.reshape(height, width, 3).astype(np.float64)
    luma = np.floor(rgbf @ np.array([0.299, 0.587, 0.114]) + 0.5)
    np.clip(luma, 0, 255, out=luma)
    return GrayImage(width, height, luma.astype(np.uint8))


def resize(img: GrayImage, out_w: int, out_h: int) -> GrayImage:
    """Nearest-neighbor resize; source index = floor(dst * src / out)."""
    if out_w < 1 or out_h < 1:
        raise DimensionMismatch(f"target dims must be positive, got {out_w}x{out_h}")
    rows = (np.arange(out_h) * img.height) // out_h
    cols = (np.arange(out_w) * img.width) // out_w
    return GrayImage(out_w, out_h, img.data[np.ix_(rows, cols)])


def otsu_threshold(img: GrayImage) -> int:
    """Threshold maximizing between-class variance over the 256-bin histogram.

    Classes are pixels <= t and pixels > t; thresholds leaving a class
    empty are skipped; ties go to the smallest t. A constant image
    returns its own value.
    """
    hist = np.bincount(img.data.reshape(-1), minlength=256).astype(np.float64)
    total = hist.sum()
    weighted_total = float((hist * np.arange(256)).sum())

    best_t = -1
    best_var = -1.0
    w0 = 0.0
    sum0 = 0.0
    for t in range(256):
        w0 += hist[t]
        sum0 += t * hist[t]
        if w0 == 0.0:
            continue
        w1 = total - w0
        if w1 == 0.0:
            break
        mu0 = sum0 / w0
        mu1 = (weighted_total - sum0) / w1
        var = w0 * w1 * (mu0 - mu1) ** 2
        if var > best_var:
            best_var = var
            best_t = t
    if best_t < 0:  # single occupied bin
        return int(img.data.flat[0])
    return best_t


def binarize(img: GrayImage, t: float) -> BinaryImage:
    """Set bits where intensity is strictly greater than t."""
    if not 0 <= t <= 255:
        raise ValueError(f"threshold must lie in [0, 255], got {t}")
    return BinaryImage(img.width, img.height, (img.data > t).astype(np.uint8))


def flatten(img: BinaryImage) -> np.ndarray:
    """Row-major scan of the bits as a float vector of 0.0/1.0 values."""
    return img.data.reshape(-1).astype(np.float64)


def sobel(img: GrayImage) -> GradientImage:
    """3x3 Sobel gradients with replicate-edge padding.

    Output dims equal input dims; needs at least a 3x3 image.
    """
    if img.width < 3 or img.height < 3:
        raise ImageTooSmall(f"sobel needs at least 3x3, got {img.width}x{img.height}")
    p = np.pad(img.data.astype(np.float64), 1, mode="edge")
    gx = (
        (p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:])
        - (p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2])
    )
    gy = (
        (p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:])
        - (p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:])
    )
    return GradientImage.from_gradients(gx, gy)


def edge_map(grad: GradientImage, t: float) -> BinaryImage:
    """Set bits where gradient magnitude is strictly greater than t (t >= 0)."""
    if t < 0:
        raise ValueError(f"edge threshold must be >= 0, got {t}")
    return BinaryImage(grad.width, grad.height, (grad.magnitude > t).astype(np.uint8))
