"""Three-frame motion gating.

A gate watches a stream of grayscale frames, binarizes them, and keeps
the last three bit-planes A, B, C (A oldest). The motion parameter is
the popcount of (A XOR B) OR (A XOR C); when it falls strictly below
floor(M*N/100) for an M*N frame, A is deemed static and captured.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .imaging import BinaryImage, GrayImage, binarize, otsu_threshold


def motion_parameter(a: BinaryImage, b: BinaryImage, c: BinaryImage) -> int:
    """Count of pixels where (A XOR B) OR (A XOR C) is set."""
    if not (a.width == b.width == c.width and a.height == b.height == c.height):
        raise DimensionMismatch("motion frames must share dimensions")
    moved = np.logical_or(a.data ^ b.data, a.data ^ c.data)
    return int(moved.sum())


class MotionGate:
    """Sliding three-frame window over one capture session.

    Frames are binarized with `threshold` if given, otherwise with the
    Otsu threshold of the first frame pushed (fixed for the session).
    After a capture the window is cleared so one static scene fires once.
    """

    def __init__(self, width: int, height: int, threshold: int | None = None):
        if width < 1 or height < 1:
            raise DimensionMismatch(f"gate dims must be positive, got {width}x{height}")
        self.width = width
        self.height = height
        self.pixel_threshold = (width * height) // 100
        self._binarize_t = threshold
        self._window: list[tuple[GrayImage, BinaryImage]] = []

    def push_frame(self, frame: GrayImage) -> GrayImage | None:
        """Add a frame; return the captured static frame, if any."""
        if frame.width != self.width or frame.height != self.height:
            raise DimensionMismatch(
                f"frame is {frame.width}x{frame.height}, gate expects "
                f"{self.width}x{self.height}"
            )
        if self._binarize_t is None:
            self._binarize_t = otsu_threshold(frame)
        self._window.append((frame, binarize(frame, self._binarize_t)))
        if len(self._window) < 3:
            return None
        (oldest, a), (_, b), (_, c) = self._window
        if motion_parameter(a, b, c) < self.pixel_threshold:
            self._window.clear()
            return oldest
        self._window.pop(0)
        return None
