"""On-disk gesture database and model persistence.

Images are stored as binary PGM (P5, maxval 255), read and written
bit-exactly; JPEG is accepted on ingest only. Trained models persist
in a little-endian binary container:

    magic "HSRM" | version u32 = 1 | backend u8 (1 = PCA, 2 = NN)
    | profile width u32 | height u32 | backend payload | CRC-32 u32

The payload stores strings as u32-length-prefixed UTF-8, vectors as a
u32 length plus float64 values, and matrices as u32 rows, u32 cols
plus row-major float64 values. The trailing CRC-32 covers every
preceding byte.
"""

from __future__ import annotations

import io
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadHeader,
    BadMagic,
    ChecksumMismatch,
    EmptyDatabase,
    TruncatedData,
    UnknownBackend,
    UnknownVersion,
    UnreadableImage,
    UnsupportedMaxval,
)
from .imaging import BinaryImage, GrayImage, binarize, otsu_threshold, resize, to_grayscale
from .network import NnModel
from .pca import PcaModel

MAGIC = b"HSRM"
VERSION = 1
BACKEND_PCA = 1
BACKEND_NN = 2

IMAGE_SUFFIXES = {".pgm", ".jpg", ".jpeg"}


@dataclass(frozen=True)
class Profile:
    """Canonical image geometry fixing the feature-vector length."""

    name: str
    width: int
    height: int

    @property
    def dims(self) -> tuple[int, int]:
        return (self.width, self.height)


WEBCAM = Profile("webcam", 60, 80)
ANDROID = Profile("android", 100, 100)


def parse_profile(text: str) -> Profile:
    """Accept "webcam", "android" or an explicit "WxH"."""
    if text == "webcam":
        return WEBCAM
    if text == "android":
        return ANDROID
    try:
        w, h = text.lower().split("x")
        return Profile("custom", int(w), int(h))
    except ValueError:
        raise BadHeader(f"unrecognised profile: {text!r}") from None


@dataclass
class GestureDB:
    """Loaded database: labels are directory names (conventionally one
    uppercase letter each), every image resized and binarized to the
    profile geometry."""

    root: Path
    profile: Profile
    entries: list[tuple[str, BinaryImage]]

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.entries]


# ------------------------------------------------------------------- PGM

_WHITESPACE = b" \t\n\r\x0b\x0c"


def read_pgm(data: bytes) -> GrayImage:
    """Parse a binary PGM (P5, maxval 255); comments are skipped."""
    if data[:2] != b"P5":
        raise BadMagic("not a P5 PGM")
    pos = 2

    def next_token(pos: int) -> tuple[bytes, int]:
        while pos < len(data):
            ch = data[pos : pos + 1]
            if ch == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            elif ch in _WHITESPACE:
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and data[pos : pos + 1] not in _WHITESPACE:
            pos += 1
        if start == pos:
            raise BadHeader("header ended prematurely")
        return data[start:pos], pos

    try:
        w_tok, pos = next_token(pos)
        h_tok, pos = next_token(pos)
        max_tok, pos = next_token(pos)
        width, height, maxval = int(w_tok), int(h_tok), int(max_tok)
    except ValueError:
        raise BadHeader("non-numeric header field") from None
    if width < 1 or height < 1:
        raise BadHeader(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxval(f"only maxval 255 is supported, got {maxval}")
    pos += 1  # single whitespace byte separates header from raster
    raster = data[pos : pos + width * height]
    if len(raster) < width * height:
        raise TruncatedData(
            f"raster holds {len(raster)} bytes, need {width * height}"
        )
    return GrayImage(width, height, np.frombuffer(raster, dtype=np.uint8))


def write_pgm(img: GrayImage) -> bytes:
    """Emit a canonical P5 header followed by the raw raster."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.data.tobytes()


def read_image_file(path) -> GrayImage:
    """Load a PGM or JPEG file as grayscale."""
    path = Path(path)
    data = path.read_bytes()
    if path.suffix.lower() == ".pgm":
        return read_pgm(data)
    from PIL import Image

    with Image.open(io.BytesIO(data)) as im:
        rgb = im.convert("RGB")
        return to_grayscale(rgb.tobytes(), rgb.width, rgb.height)


# -------------------------------------------------------------- database

def load_db(root, profile: Profile) -> GestureDB:
    """Load <root>/<LABEL>/*.pgm|jpg, resized and Otsu-binarized.

    Entries come back sorted by (label, filename) so two loads of the
    same tree are identical.
    """
    rootp = Path(root)
    entries: list[tuple[str, BinaryImage]] = []
    if rootp.is_dir():
        for label_dir in sorted(p for p in rootp.iterdir() if p.is_dir()):
            for path in sorted(label_dir.iterdir()):
                if path.suffix.lower() not in IMAGE_SUFFIXES:
                    continue
                try:
                    img = read_image_file(path)
                except Exception as exc:
                    raise UnreadableImage(f"{path}: {exc}") from exc
                img = resize(img, profile.width, profile.height)
                entries.append((label_dir.name, binarize(img, otsu_threshold(img))))
    if not entries:
        raise EmptyDatabase(f"no gesture images under {rootp}")
    return GestureDB(root=rootp, profile=profile, entries=entries)


# ---------------------------------------------------------------- models

def _pack_str(out: bytearray, text: str) -> None:
    raw = text.encode("utf-8")
    out += struct.pack("<I", len(raw))
    out += raw


def _pack_vec(out: bytearray, vec: np.ndarray) -> None:
    vec = np.asarray(vec, dtype="<f8").reshape(-1)
    out += struct.pack("<I", vec.size)
    out += vec.tobytes()


def _pack_mat(out: bytearray, mat: np.ndarray) -> None:
    mat = np.ascontiguousarray(mat, dtype="<f8")
    out += struct.pack("<II", mat.shape[0], mat.shape[1])
    out += mat.tobytes()


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedData("model payload ended prematurely")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def string(self) -> str:
        return self.take(self.u32()).decode("utf-8")

    def vec(self) -> np.ndarray:
        n = self.u32()
        return np.frombuffer(self.take(8 * n), dtype="<f8").copy()

    def mat(self) -> np.ndarray:
        rows, cols = self.u32(), self.u32()
        flat = np.frombuffer(self.take(8 * rows * cols), dtype="<f8")
        return flat.reshape(rows, cols).copy()


@dataclass(frozen=True)
class ModelRecord:
    """A model as loaded from disk, with its profile geometry."""

    backend: str  # "pca" | "nn"
    dims: tuple[int, int]
    model: PcaModel | NnModel


def save_model(model: PcaModel | NnModel, path, dims: tuple[int, int] | None = None) -> None:
    """Serialize a trained model; `dims` defaults to PcaModel.dims."""
    if isinstance(model, PcaModel):
        backend = BACKEND_PCA
        dims = dims or model.dims
        payload = bytearray()
        payload += struct.pack("<I", len(model.labels))
        for label in model.labels:
            _pack_str(payload, label)
        _pack_vec(payload, model.mean)
        _pack_vec(payload, model.eigenvalues)
        _pack_mat(payload, model.basis)
        _pack_mat(payload, model.projections)
    elif isinstance(model, NnModel):
        backend = BACKEND_NN
        if dims is None:
            raise ValueError("dims is required when saving an NnModel")
        payload = bytearray()
        payload += struct.pack("<I", len(model.label_order))
        for label in model.label_order:
            _pack_str(payload, label)
        _pack_mat(payload, model.w1)
        _pack_vec(payload, model.b1)
        _pack_mat(payload, model.w2)
        _pack_vec(payload, model.b2)
    else:
        raise UnknownBackend(f"cannot persist {type(model).__name__}")

    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<I", VERSION)
    blob += struct.pack("<B", backend)
    blob += struct.pack("<II", dims[0], dims[1])
    blob += payload
    blob += struct.pack("<I", zlib.crc32(bytes(blob)))
    Path(path).write_bytes(bytes(blob))


def load_model(path) -> ModelRecord:
    """Read a model file back; validates magic, CRC, version and backend."""
    data = Path(path).read_bytes()
    if len(data) < 17:
        raise TruncatedData(f"model file is only {len(data)} bytes")
    if data[:4] != MAGIC:
        raise BadMagic("not a handsign model file")
    stored_crc = struct.unpack("<I", data[-4:])[0]
    if zlib.crc32(data[:-4]) != stored_crc:
        raise ChecksumMismatch("model file CRC does not validate")
    r = _Reader(data[: -4])
    r.take(4)  # magic
    version = r.u32()
    if version != VERSION:
        raise UnknownVersion(f"unsupported model version {version}")
    backend = r.take(1)[0]
    width, height = r.u32(), r.u32()

    if backend == BACKEND_PCA:
        labels = [r.string() for _ in range(r.u32())]
        mean = r.vec()
        eigenvalues = r.vec()
        basis = r.mat()
        projections = r.mat()
        model = PcaModel(
            mean=mean,
            basis=basis,
            eigenvalues=eigenvalues,
            projections=projections,
            labels=labels,
            dims=(width, height),
        )
        return ModelRecord("pca", (width, height), model)
    if backend == BACKEND_NN:
        labels = [r.string() for _ in range(r.u32())]
        w1 = r.mat()
        b1 = r.vec()
        w2 = r.mat()
        b2 = r.vec()
        return ModelRecord("nn", (width, height), NnModel(w1, b1, w2, b2, labels))
    raise UnknownBackend(f"unknown backend tag {backend}")
