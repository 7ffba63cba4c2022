"""Contour extraction and direction tokens.

The hand outline is traced from an edge map with Moore-neighbor
boundary following, resampled to a fixed number of points at equal
arc-length spacing, and reduced to unit-direction tokens: the
(cos, sin) of each segment between consecutive resampled points,
closing segment included.

Coordinates are (x, y) with x = column, y = row, origin top-left.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePath, DegenerateSegment, NoContour
from .imaging import BinaryImage

DEFAULT_TOKEN_COUNT = 32

# Moore neighborhood in clockwise order, starting west (screen coords, y down)
_RING = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)]
_RING_INDEX = {off: i for i, off in enumerate(_RING)}

# an ordered closed boundary: list of (x, y) grid points, consecutive
# entries 8-adjacent, closure back to the first point implicit
ContourPath = list[tuple[int, int]]


@dataclass(frozen=True)
class Token:
    """Unit direction of one contour segment; cos^2 + sin^2 = 1."""

    cos: float
    sin: float

    def __post_init__(self):
        if abs(self.cos**2 + self.sin**2 - 1.0) > 1e-12:
            raise ValueError("token direction must be unit length")


@dataclass(frozen=True)
class TokenSequence:
    """Fixed-length run of tokens describing one closed shape."""

    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def as_vector(self) -> np.ndarray:
        """Interleaved (cos0, sin0, cos1, sin1, ...) feature vector."""
        out = np.empty(2 * len(self.tokens))
        for i, t in enumerate(self.tokens):
            out[2 * i] = t.cos
            out[2 * i + 1] = t.sin
        return out


def _trace_from(bits: np.ndarray, start: tuple[int, int]) -> ContourPath:
    h, w = bits.shape

    def is_set(pt):
        x, y = pt
        return 0 <= x < w and 0 <= y < h and bits[y, x]

    path: ContourPath = [start]
    curr = start
    back_idx = 0  # backtrack is the (clear) west neighbor of the start pixel
    first_move = None
    limit = 4 * int(bits.sum()) + 8
    for _ in range(limit):
        nxt = None
        for step in range(1, 9):
            i = (back_idx + step) % 8
            cand = (curr[0] + _RING[i][0], curr[1] + _RING[i][1])
            if is_set(cand):
                nxt = cand
                prev_idx = (back_idx + step - 1) % 8
                break
        if nxt is None:
            return path  # isolated pixel
        move = (curr, nxt)
        if first_move is None:
            first_move = move
        elif move == first_move:
            break
        path.append(nxt)
        prev_cell = (curr[0] + _RING[prev_idx][0], curr[1] + _RING[prev_idx][1])
        back_idx = _RING_INDEX[(prev_cell[0] - nxt[0], prev_cell[1] - nxt[1])]
        curr = nxt
    else:
        raise RuntimeError("contour trace failed to close")
    if len(path) > 1 and path[-1] == path[0]:
        path.pop()
    return path


def trace_contour(edges: BinaryImage) -> ContourPath:
    """Trace the longest closed boundary in an edge map.

    Each 8-connected component is traced from its topmost-then-leftmost
    pixel; the longest boundary wins, ties going to the component found
    earliest in scan order.
    """
    bits = edges.data
    if not bits.any():
        raise NoContour("no set pixels to trace")
    h, w = bits.shape
    seen = np.zeros_like(bits, dtype=bool)
    best: ContourPath | None = None
    for y in range(h):
        for x in range(w):
            if not bits[y, x] or seen[y, x]:
                continue
            # flood-fill this component so later starts are skipped
            stack = [(x, y)]
            seen[y, x] = True
            while stack:
                cx, cy = stack.pop()
                for dx, dy in _RING:
                    nx, ny = cx + dx, cy + dy
                    if 0 <= nx < w and 0 <= ny < h and bits[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        stack.append((nx, ny))
            path = _trace_from(bits, (x, y))
            if best is None or len(path) > len(best):
                best = path
    return best


def resample(path: ContourPath, count: int) -> np.ndarray:
    """Sample `count` points at equal arc length along the closed polyline.

    Starts at the path's first point; positions between grid points are
    linearly interpolated. Returns a (count, 2) float array.
    """
    if len(path) < 2:
        raise ValueError(f"need at least 2 contour points, got {len(path)}")
    if count < 2:
        raise ValueError(f"need at least 2 samples, got {count}")
    pts = np.asarray(path, dtype=np.float64)
    nxt = np.roll(pts, -1, axis=0)
    seg = np.hypot(*(nxt - pts).T)
    perimeter = float(seg.sum())
    if perimeter == 0.0:
        raise DegeneratePath("contour has zero arc length")
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    out = np.empty((count, 2))
    for k in range(count):
        target = k * perimeter / count
        i = int(np.searchsorted(cum, target, side="right")) - 1
        i = min(i, len(path) - 1)
        local = (target - cum[i]) / seg[i] if seg[i] > 0 else 0.0
        out[k] = pts[i] + local * (nxt[i] - pts[i])
    return out


def tokens(points) -> TokenSequence:
    """Unit directions of consecutive point pairs, closing pair included."""
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) < 2:
        raise ValueError(f"need at least 2 points, got {len(pts)}")
    delta = np.roll(pts, -1, axis=0) - pts
    hyp = np.hypot(delta[:, 0], delta[:, 1])
    if np.any(hyp == 0.0):
        idx = int(np.argmin(hyp))
        raise DegenerateSegment(f"points {idx} and {idx + 1} coincide")
    return TokenSequence(
        tuple(Token(float(dx / h), float(dy / h)) for (dx, dy), h in zip(delta, hyp))
    )
