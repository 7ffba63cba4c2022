"""Frame sources behind one next-frame contract.

Three kinds of source feed the pipeline: an HTTP client for IP-camera
endpoints (single-shot polling of <endpoint>/shot.jpg by default, or
the <endpoint>/video MJPEG stream), a directory of PGM/JPEG files read
in lexicographic order, and synthetic feeds for tests and demos.
Every source enforces its cadence (seconds per frame) by blocking in
next_frame; a cadence of zero disables throttling.
"""

from __future__ import annotations

import io
import socket
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlparse

from .errors import (
    BadEndpoint,
    ConnectFailed,
    DecodeError,
    EndOfStream,
    HeaderTooLarge,
    MalformedStream,
    Timeout,
)
from .imaging import GrayImage, to_grayscale
from .store import read_pgm
from .synthetic import synthetic_frames

DEFAULT_CADENCE = 1.0 / 3.0
MAX_PART_HEADER = 8 * 1024
SOURCE_KINDS = ("ip-camera", "directory", "synthetic")


@dataclass(frozen=True)
class FrameSource:
    """Declarative description of where frames come from."""

    kind: str
    endpoint: str
    cadence: float = DEFAULT_CADENCE

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise BadEndpoint(f"unknown source kind: {self.kind!r}")
        if self.cadence <= 0:
            raise BadEndpoint(f"cadence must be positive, got {self.cadence}")


@dataclass(frozen=True)
class Frame:
    image: GrayImage
    sequence_no: int
    timestamp: float  # seconds since the source was opened


class FrameStream:
    """Base class: throttling, sequence numbers and iteration."""

    def __init__(self, cadence: float = 0.0):
        self.cadence = cadence
        self._start = time.monotonic()
        self._seq = 0
        self._last_ts: float | None = None

    def _produce(self) -> GrayImage:
        raise NotImplementedError

    def next_frame(self) -> Frame:
        if self.cadence > 0 and self._last_ts is not None:
            wait = (self._start + self._last_ts + self.cadence) - time.monotonic()
            if wait > 0:
                time.sleep(wait)
        image = self._produce()
        ts = time.monotonic() - self._start
        frame = Frame(image, self._seq, ts)
        self._seq += 1
        self._last_ts = ts
        return frame

    def close(self) -> None:
        pass

    def __iter__(self):
        while True:
            try:
                yield self.next_frame()
            except EndOfStream:
                return

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def decode_jpeg(payload: bytes) -> GrayImage:
    """Decode a JPEG payload to grayscale via Pillow."""
    from PIL import Image

    try:
        with Image.open(io.BytesIO(payload)) as im:
            rgb = im.convert("RGB")
            return to_grayscale(rgb.tobytes(), rgb.width, rgb.height)
    except Exception as exc:
        raise DecodeError(f"jpeg decode failed: {exc}") from exc


class DirectoryStream(FrameStream):
    """Finite source over the PGM/JPEG files of one directory."""

    def __init__(self, path, cadence: float = 0.0):
        super().__init__(cadence)
        self.paths = sorted(
            p
            for p in Path(path).iterdir()
            if p.suffix.lower() in (".pgm", ".jpg", ".jpeg")
        )
        self._index = 0

    def _produce(self) -> GrayImage:
        if self._index >= len(self.paths):
            raise EndOfStream("directory source exhausted")
        path = self.paths[self._index]
        self._index += 1
        try:
            data = path.read_bytes()
            if path.suffix.lower() == ".pgm":
                return read_pgm(data)
            return decode_jpeg(data)
        except DecodeError:
            raise
        except Exception as exc:
            raise DecodeError(f"{path}: {exc}") from exc


class SyntheticStream(FrameStream):
    """Finite source over a prepared list of images."""

    def __init__(self, frames, cadence: float = 0.0):
        super().__init__(cadence)
        self.frames = list(frames)
        self._index = 0

    def _produce(self) -> GrayImage:
        if self._index >= len(self.frames):
            raise EndOfStream("synthetic source exhausted")
        img = self.frames[self._index]
        self._index += 1
        return img


class SnapshotStream(FrameStream):
    """Polls <endpoint>/shot.jpg once per cadence interval."""

    def __init__(self, base_url: str, cadence: float = DEFAULT_CADENCE):
        super().__init__(cadence)
        self.url = base_url.rstrip("/") + "/shot.jpg"
        self.timeout = 5 * cadence if cadence > 0 else 5 * DEFAULT_CADENCE
        self._pending = self._fetch()  # initial connection attempt

    def _fetch(self) -> GrayImage:
        try:
            with urllib.request.urlopen(self.url, timeout=self.timeout) as resp:
                payload = resp.read()
        except (socket.timeout, TimeoutError) as exc:
            raise Timeout(f"no data from {self.url} within {self.timeout:.2f}s") from exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, (socket.timeout, TimeoutError)):
                raise Timeout(f"no data from {self.url}") from exc
            raise ConnectFailed(f"{self.url}: {exc.reason}") from exc
        return decode_jpeg(payload)

    def _produce(self) -> GrayImage:
        if self._pending is not None:
            img = self._pending
            self._pending = None
            return img
        return self._fetch()


class MjpegStream(FrameStream):
    """Reads <endpoint>/video as multipart/x-mixed-replace."""

    def __init__(self, base_url: str, cadence: float = DEFAULT_CADENCE):
        super().__init__(cadence)
        self.url = base_url.rstrip("/") + "/video"
        self.timeout = 5 * cadence if cadence > 0 else 5 * DEFAULT_CADENCE
        try:
            self._resp = urllib.request.urlopen(self.url, timeout=self.timeout)
        except (socket.timeout, TimeoutError) as exc:
            raise Timeout(f"no data from {self.url}") from exc
        except urllib.error.URLError as exc:
            raise ConnectFailed(f"{self.url}: {exc.reason}") from exc
        ctype = self._resp.headers.get("Content-Type", "")
        boundary = None
        for chunk in ctype.split(";"):
            chunk = chunk.strip()
            if chunk.startswith("boundary="):
                boundary = chunk[len("boundary=") :].strip('"')
        if not boundary:
            raise MalformedStream(f"no multipart boundary in {ctype!r}")
        self._delim = b"--" + boundary.encode("ascii")
        self._buffer = b""

    def _produce(self) -> GrayImage:
        deadline = time.monotonic() + self.timeout
        while True:
            part, self._buffer = _take_part(self._buffer, self._delim)
            if part is not None:
                return decode_jpeg(part)
            if time.monotonic() > deadline:
                raise Timeout(f"no complete frame within {self.timeout:.2f}s")
            try:
                chunk = self._resp.read(4096)
            except (socket.timeout, TimeoutError) as exc:
                raise Timeout("mjpeg read timed out") from exc
            if not chunk:
                raise EndOfStream("mjpeg stream closed")
            self._buffer += chunk
            if len(self._buffer) > MAX_PART_HEADER and self._delim not in self._buffer:
                raise MalformedStream("no boundary in the first 8 KiB of stream")

    def close(self) -> None:
        self._resp.close()


def _part_body(segment: bytes) -> bytes:
    """Strip the delimiter-line remainder and headers from one part."""
    for sep in (b"\r\n\r\n", b"\n\n"):
        end = segment.find(sep)
        if end != -1:
            if end > MAX_PART_HEADER:
                raise HeaderTooLarge(f"part header is {end} bytes")
            body = segment[end + len(sep) :]
            if body.endswith(b"\r\n"):
                return body[:-2]
            if body.endswith(b"\n"):
                return body[:-1]
            return body
    if len(segment) > MAX_PART_HEADER:
        raise HeaderTooLarge(f"part header exceeds {MAX_PART_HEADER} bytes")
    raise MalformedStream("part has no blank-line header terminator")


def _take_part(buffer: bytes, delim: bytes):
    """Extract the first complete part from a buffer, if any.

    Returns (body | None, remaining buffer). A part is complete only
    once the next delimiter has arrived.
    """
    start = buffer.find(delim)
    if start == -1:
        return None, buffer
    seg_start = start + len(delim)
    nxt = buffer.find(delim, seg_start)
    if nxt == -1:
        return None, buffer[start:]
    segment = buffer[seg_start:nxt]
    if segment.startswith(b"--"):
        return None, buffer[nxt:]
    return _part_body(segment), buffer[nxt:]


def parse_mjpeg(stream: bytes, boundary) -> list[bytes]:
    """Split a complete multipart/x-mixed-replace body into payloads.

    Parts are cut at boundary markers and their bodies start after the
    blank-line header terminator; a trailing part with no closing
    boundary is withheld. An empty stream yields no parts; a non-empty
    stream without any boundary is malformed.
    """
    delim = b"--" + (boundary.encode("ascii") if isinstance(boundary, str) else bytes(boundary))
    if not stream:
        return []
    pos = stream.find(delim)
    if pos == -1:
        raise MalformedStream("boundary never found")
    parts = []
    while True:
        seg_start = pos + len(delim)
        nxt = stream.find(delim, seg_start)
        segment = stream[seg_start : nxt if nxt != -1 else len(stream)]
        if segment.startswith(b"--"):
            break  # closing terminator
        if nxt == -1:
            break  # incomplete trailing part withheld
        parts.append(_part_body(segment))
        pos = nxt
    return parts


def parse_source(text: str, cadence: float = DEFAULT_CADENCE) -> FrameSource:
    """Classify a CLI source string as ip-camera, synthetic or directory."""
    if text.startswith(("http://", "https://")):
        return FrameSource("ip-camera", text, cadence)
    if text.startswith("synthetic:"):
        return FrameSource("synthetic", text, cadence)
    return FrameSource("directory", text, cadence)


def _build_synthetic(endpoint: str) -> list[GrayImage]:
    # grammar: synthetic:<static|moving>:<W>x<H>:<count>
    try:
        _, mode, dims, count = endpoint.split(":")
        w, h = dims.lower().split("x")
        return synthetic_frames(mode, int(w), int(h), int(count))
    except (ValueError, KeyError) as exc:
        raise BadEndpoint(f"bad synthetic endpoint {endpoint!r}: {exc}") from exc


def open_source(
    spec: FrameSource, mode: str = "snapshot", throttle: bool = True
) -> FrameStream:
    """Open a stream for a source spec.

    `mode` selects snapshot polling or the MJPEG stream for ip-camera
    sources. `throttle=False` ignores the cadence (tests and batch
    replays of directories).
    """
    cadence = spec.cadence if throttle else 0.0
    if spec.kind == "directory":
        path = Path(spec.endpoint)
        if not path.is_dir():
            raise BadEndpoint(f"not a directory: {spec.endpoint}")
        return DirectoryStream(path, cadence)
    if spec.kind == "synthetic":
        return SyntheticStream(_build_synthetic(spec.endpoint), cadence)
    # ip-camera
    parsed = urlparse(spec.endpoint)
    if parsed.scheme not in ("http", "https") or not parsed.netloc:
        raise BadEndpoint(f"malformed camera URL: {spec.endpoint}")
    if mode == "mjpeg":
        return MjpegStream(spec.endpoint, cadence)
    if mode != "snapshot":
        raise BadEndpoint(f"unknown camera mode: {mode!r}")
    return SnapshotStream(spec.endpoint, cadence)
