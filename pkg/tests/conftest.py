"""Shared fixtures: tiny JPEG payloads and a local IP-camera stand-in."""

import io
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest
from PIL import Image


def make_jpeg(seed: int = 0, size: tuple[int, int] = (32, 24)) -> bytes:
    rng = np.random.default_rng(seed)
    arr = rng.integers(0, 256, size=(size[1], size[0]), dtype=np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="L").save(buf, format="JPEG")
    return buf.getvalue()


def build_multipart(payloads, boundary: bytes, closing: bool = True) -> bytes:
    out = b""
    for p in payloads:
        out += b"--" + boundary + b"\r\n"
        out += b"Content-Type: image/jpeg\r\n"
        out += b"Content-Length: " + str(len(p)).encode() + b"\r\n\r\n"
        out += p + b"\r\n"
    if closing:
        out += b"--" + boundary + b"--\r\n"
    return out


class _CameraHandler(BaseHTTPRequestHandler):
    jpeg = make_jpeg(99)
    boundary = b"handsignframe"
    video_frames = 3

    def log_message(self, *args):
        pass

    def do_GET(self):
        if self.path == "/shot.jpg":
            self.send_response(200)
            self.send_header("Content-Type", "image/jpeg")
            self.send_header("Content-Length", str(len(self.jpeg)))
            self.end_headers()
            self.wfile.write(self.jpeg)
        elif self.path == "/video":
            body = build_multipart([self.jpeg] * self.video_frames, self.boundary)
            self.send_response(200)
            self.send_header(
                "Content-Type",
                f"multipart/x-mixed-replace; boundary={self.boundary.decode()}",
            )
            self.end_headers()
            self.wfile.write(body)
        else:
            self.send_response(404)
            self.end_headers()


@pytest.fixture(scope="session")
def camera_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _CameraHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}"
    finally:
        server.shutdown()
