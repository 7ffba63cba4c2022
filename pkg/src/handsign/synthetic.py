"""Synthetic gesture imagery.

Ten parametric filled shapes stand in for hand signs when no camera or
gesture database is available: they drive the synthetic frame sources,
the capture/watch demos and the evaluation corpus. Shapes are drawn as
polygons in a unit box, scaled into the frame with a margin that keeps
them inside after jitter, and rasterized with an even-odd scanline
fill.
"""

from __future__ import annotations

import math

import numpy as np

from .imaging import GrayImage

FOREGROUND = 200
MARGIN = 6

# default labels mirror a ten-sign alphabet database
CORPUS_LABELS = ["A", "C", "E", "G", "H", "I", "R", "S", "T", "X"]


def _star(points=5, outer=0.48, inner=0.19):
    verts = []
    for i in range(2 * points):
        r = outer if i % 2 == 0 else inner
        ang = -math.pi / 2 + i * math.pi / points
        verts.append((0.5 + r * math.cos(ang), 0.5 + r * math.sin(ang)))
    return verts


def _ellipse(segments=24, rx=0.45, ry=0.45):
    return [
        (0.5 + rx * math.cos(2 * math.pi * i / segments),
         0.5 + ry * math.sin(2 * math.pi * i / segments))
        for i in range(segments)
    ]


SHAPES: list[list[tuple[float, float]]] = [
    _ellipse(),
    [(0.12, 0.2), (0.88, 0.2), (0.88, 0.8), (0.12, 0.8)],  # rectangle
    [(0.5, 0.08), (0.92, 0.9), (0.08, 0.9)],  # triangle
    [(0.5, 0.05), (0.95, 0.5), (0.5, 0.95), (0.05, 0.5)],  # diamond
    [  # plus
        (0.35, 0.05), (0.65, 0.05), (0.65, 0.35), (0.95, 0.35),
        (0.95, 0.65), (0.65, 0.65), (0.65, 0.95), (0.35, 0.95),
        (0.35, 0.65), (0.05, 0.65), (0.05, 0.35), (0.35, 0.35),
    ],
    [  # tee
        (0.05, 0.05), (0.95, 0.05), (0.95, 0.3), (0.65, 0.3),
        (0.65, 0.95), (0.35, 0.95), (0.35, 0.3), (0.05, 0.3),
    ],
    [  # ell
        (0.15, 0.05), (0.45, 0.05), (0.45, 0.7), (0.9, 0.7),
        (0.9, 0.95), (0.15, 0.95),
    ],
    [  # aitch
        (0.1, 0.05), (0.35, 0.05), (0.35, 0.38), (0.65, 0.38),
        (0.65, 0.05), (0.9, 0.05), (0.9, 0.95), (0.65, 0.95),
        (0.65, 0.62), (0.35, 0.62), (0.35, 0.95), (0.1, 0.95),
    ],
    _star(),
    [  # yu
        (0.1, 0.05), (0.35, 0.05), (0.35, 0.7), (0.65, 0.7),
        (0.65, 0.05), (0.9, 0.05), (0.9, 0.95), (0.1, 0.95),
    ],
]


def polygon_mask(width: int, height: int, vertices) -> np.ndarray:
    """Even-odd scanline rasterization of a polygon over pixel centers."""
    mask = np.zeros((height, width), dtype=bool)
    n = len(vertices)
    for row in range(height):
        yc = row + 0.5
        crossings = []
        for i in range(n):
            x1, y1 = vertices[i]
            x2, y2 = vertices[(i + 1) % n]
            if (y1 <= yc < y2) or (y2 <= yc < y1):
                t = (yc - y1) / (y2 - y1)
                crossings.append(x1 + t * (x2 - x1))
        crossings.sort()
        for j in range(0, len(crossings) - 1, 2):
            lo = max(int(math.ceil(crossings[j] - 0.5)), 0)
            hi = min(int(math.ceil(crossings[j + 1] - 0.5)) - 1, width - 1)
            if hi >= lo:
                mask[row, lo : hi + 1] = True
    return mask


def gesture_image(
    shape_index: int,
    width: int,
    height: int,
    dx: int = 0,
    dy: int = 0,
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
) -> GrayImage:
    """Render one shape on a black background, optionally jittered and noisy."""
    verts = [
        (MARGIN + nx * (width - 1 - 2 * MARGIN) + dx,
         MARGIN + ny * (height - 1 - 2 * MARGIN) + dy)
        for nx, ny in SHAPES[shape_index % len(SHAPES)]
    ]
    data = np.zeros((height, width), dtype=np.uint8)
    data[polygon_mask(width, height, verts)] = FOREGROUND
    if noise > 0.0:
        if rng is None:
            rng = np.random.default_rng(0)
        count = int(round(noise * width * height))
        picks = rng.choice(width * height, size=count, replace=False)
        values = rng.integers(0, 2, size=count) * 255
        data.reshape(-1)[picks] = values
    return GrayImage(width, height, data)


def synthetic_frames(
    mode: str, width: int, height: int, count: int, seed: int = 0
) -> list[GrayImage]:
    """Frame lists for synthetic sources.

    "static" repeats one scene; "moving" shifts the shape a few pixels
    every frame so no three-frame window ever settles.
    """
    if mode == "static":
        frame = gesture_image(0, width, height)
        return [frame] * count
    if mode == "moving":
        offsets = [-4, -1, 2, 5]
        return [
            gesture_image(0, width, height, dx=offsets[i % 4]) for i in range(count)
        ]
    raise ValueError(f"unknown synthetic mode: {mode!r}")


def corpus_images(
    labels: list[str] | None = None,
    samples_per_label: int = 10,
    width: int = 60,
    height: int = 80,
    jitter: int = 5,
    noise: float = 0.01,
    seed: int = 2024,
) -> list[tuple[str, GrayImage]]:
    """Deterministic labelled corpus: one shape per label, jittered samples."""
    labels = labels if labels is not None else list(CORPUS_LABELS)
    rng = np.random.default_rng(seed)
    out = []
    for shape_index, label in enumerate(labels):
        for _ in range(samples_per_label):
            dx, dy = rng.integers(-jitter, jitter + 1, size=2)
            img = gesture_image(
                shape_index, width, height, int(dx), int(dy), noise=noise, rng=rng
            )
            out.append((label, img))
    return out
