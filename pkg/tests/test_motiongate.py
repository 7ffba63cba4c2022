import numpy as np
import pytest

from handsign.errors import DimensionMismatch
from handsign.imaging import BinaryImage, GrayImage
from handsign.motiongate import MotionGate, motion_parameter


def bits(arr) -> BinaryImage:
    return BinaryImage.from_array(np.asarray(arr, dtype=np.uint8))


def random_bits(rng, w, h) -> BinaryImage:
    return BinaryImage(w, h, rng.integers(0, 2, size=(h, w)))


def gate_oracle(frames, threshold_bits, pixel_threshold):
    """Independent re-simulation of the gate over binarized frames."""
    captures = []
    window = []
    for idx, planes in enumerate(frames):
        window.append((idx, planes))
        if len(window) < 3:
            continue
        moved = 0
        (ia, a), (_, b), (_, c) = window
        for pa, pb, pc in zip(a.reshape(-1), b.reshape(-1), c.reshape(-1)):
            if (pa ^ pb) or (pa ^ pc):
                moved += 1
        if moved < pixel_threshold:
            captures.append(ia)
            window = []
        else:
            window.pop(0)
    return captures


def test_identical_frames_have_zero_motion():
    rng = np.random.default_rng(0)
    a = random_bits(rng, 10, 10)
    assert motion_parameter(a, a, a) == 0


def test_same_seven_pixels_toggled_in_b_and_c():
    rng = np.random.default_rng(1)
    a = random_bits(rng, 12, 9)
    toggled = a.data.copy()
    flat = toggled.reshape(-1)
    picks = rng.choice(flat.size, size=7, replace=False)
    flat[picks] ^= 1
    b = BinaryImage(12, 9, toggled)
    c = BinaryImage(12, 9, toggled.copy())
    assert motion_parameter(a, b, c) == 7


def test_full_flip_saturates():
    a = bits(np.zeros((10, 10)))
    b = bits(np.ones((10, 10)))
    c = bits(np.zeros((10, 10)))
    assert motion_parameter(a, b, c) == 100


def test_motion_parameter_symmetric_in_b_and_c():
    rng = np.random.default_rng(2)
    for _ in range(25):
        a = random_bits(rng, 8, 8)
        b = random_bits(rng, 8, 8)
        c = random_bits(rng, 8, 8)
        assert motion_parameter(a, b, c) == motion_parameter(a, c, b)


def test_motion_parameter_bounds():
    rng = np.random.default_rng(3)
    for _ in range(25):
        a = random_bits(rng, 6, 7)
        b = random_bits(rng, 6, 7)
        c = random_bits(rng, 6, 7)
        assert 0 <= motion_parameter(a, b, c) <= 42


def test_dimension_mismatch():
    a = bits(np.zeros((3, 3)))
    b = bits(np.zeros((3, 4)))
    with pytest.raises(DimensionMismatch):
        motion_parameter(a, b, b)


def test_three_identical_frames_capture_the_first():
    rng = np.random.default_rng(4)
    frame = GrayImage(10, 10, rng.integers(0, 256, size=(10, 10)))
    gate = MotionGate(10, 10)
    assert gate.push_frame(frame) is None
    assert gate.push_frame(frame) is None
    captured = gate.push_frame(frame)
    assert captured is frame


def test_boundary_motion_is_not_static():
    # 100x100 frames: threshold floor(10000/100) = 100; exactly 100
    # differing pixels must NOT capture (strict less-than).
    base = np.zeros((100, 100), dtype=np.uint8)
    moved = base.copy()
    moved.reshape(-1)[:100] = 255
    gate = MotionGate(100, 100, threshold=128)
    assert gate.push_frame(GrayImage.from_array(base)) is None
    assert gate.push_frame(GrayImage.from_array(moved)) is None
    assert gate.push_frame(GrayImage.from_array(base)) is None


def test_one_fewer_differing_pixel_is_static():
    base = np.zeros((100, 100), dtype=np.uint8)
    moved = base.copy()
    moved.reshape(-1)[:99] = 255
    gate = MotionGate(100, 100, threshold=128)
    gate.push_frame(GrayImage.from_array(base))
    gate.push_frame(GrayImage.from_array(moved))
    assert gate.push_frame(GrayImage.from_array(base)) is not None


def test_fewer_than_three_frames_yield_nothing():
    gate = MotionGate(5, 5)
    img = GrayImage(5, 5, np.zeros(25))
    assert gate.push_frame(img) is None
    assert gate.push_frame(img) is None


def test_gate_frame_dims_must_match():
    gate = MotionGate(5, 5)
    with pytest.raises(DimensionMismatch):
        gate.push_frame(GrayImage(4, 5, np.zeros(20)))


def test_gate_matches_brute_force_on_random_sequences():
    rng = np.random.default_rng(5)
    w = h = 20
    for _ in range(5):
        frames = []
        for _ in range(50):
            # mix of near-static and noisy frames
            if rng.random() < 0.5 and frames:
                data = frames[-1].data.copy()
                flips = rng.integers(0, 8)
                idx = rng.choice(w * h, size=flips, replace=False)
                data.reshape(-1)[idx] = 255 - data.reshape(-1)[idx]
            else:
                data = (rng.integers(0, 2, size=(h, w)) * 255).astype(np.uint8)
            frames.append(GrayImage.from_array(data))

        gate = MotionGate(w, h, threshold=128)
        captured = []
        for i, f in enumerate(frames):
            if gate.push_frame(f) is not None:
                captured.append(i)

        planes = [(f.data > 128).astype(np.uint8) for f in frames]
        expected = gate_oracle(planes, 128, (w * h) // 100)
        # a capture at push i returns frame A, pushed two frames earlier
        assert [i - 2 for i in captured] == expected
