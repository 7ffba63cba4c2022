"""Command-line interface.

Subcommands: capture (motion-gated sampling into a gesture database),
train (either classifier backend), recognize (single image), watch
(live source) and evaluate (accuracy table over a test database).

Exit codes: 0 success, 2 input or I/O error, 3 output write failure,
4 convergence failure.
"""

from __future__ import annotations

import argparse
import queue
import sys
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acquisition, network, pca, store
from .errors import (
    BadEndpoint,
    BadHeader,
    BadMagic,
    ChecksumMismatch,
    ConnectFailed,
    DecodeError,
    DimensionMismatch,
    EmptyDatabase,
    EmptyDataset,
    EndOfStream,
    HandsignError,
    NoContour,
    NoConvergence,
    NonFiniteLoss,
    Timeout,
    TruncatedData,
    UnknownBackend,
    UnknownVersion,
    UnreadableImage,
    UnsupportedMaxval,
)
from .imaging import BinaryImage, GrayImage, binarize, edge_map, flatten, otsu_threshold, resize, sobel
from .motiongate import MotionGate
from .ranking import RankedMatches
from .tokenizer import DEFAULT_TOKEN_COUNT, TokenSequence, resample, tokens, trace_contour

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_OUTPUT = 3
EXIT_CONVERGENCE = 4

_INPUT_ERRORS = (
    BadEndpoint,
    BadHeader,
    BadMagic,
    ChecksumMismatch,
    ConnectFailed,
    DecodeError,
    DimensionMismatch,
    EmptyDatabase,
    EmptyDataset,
    NoContour,
    Timeout,
    TruncatedData,
    UnknownBackend,
    UnknownVersion,
    UnreadableImage,
    UnsupportedMaxval,
    FileNotFoundError,
)


@dataclass
class PipelineConfig:
    """Resolved settings for one command run; echoable for reproducibility."""

    profile: store.Profile
    backend: str
    token_count: int
    pca_k: int | None
    nn_params: network.TrainParams
    hidden_width: int
    source: str | None
    cadence: float
    mjpeg: bool

    def describe(self) -> str:
        lines = [
            f"profile={self.profile.name} {self.profile.width}x{self.profile.height}",
            f"backend={self.backend} tokens={self.token_count} pca_k={self.pca_k or 'auto'}",
            f"nn rate={self.nn_params.learning_rate} epochs={self.nn_params.max_epochs} "
            f"target_mse={self.nn_params.target_mse} seed={self.nn_params.seed} "
            f"hidden={self.hidden_width}",
            f"source={self.source or '-'} cadence={self.cadence:.4f} "
            f"mode={'mjpeg' if self.mjpeg else 'snapshot'}",
        ]
        return "\n".join(lines)


# ----------------------------------------------------- per-backend pipeline

def pca_vector(img: GrayImage, dims: tuple[int, int]) -> np.ndarray:
    """PCA preprocessing: resize, Otsu binarize, flatten."""
    small = resize(img, dims[0], dims[1])
    return flatten(binarize(small, otsu_threshold(small)))


def magnitude_threshold(grad) -> float:
    """Otsu over the gradient magnitudes, mapped through 256 bins."""
    top = float(grad.magnitude.max())
    if top <= 0:
        return 0.0
    scaled = GrayImage(
        grad.width,
        grad.height,
        np.clip(np.round(grad.magnitude * (255.0 / top)), 0, 255).astype(np.uint8),
    )
    return otsu_threshold(scaled) * top / 255.0


def tokens_from_binary(bits: BinaryImage, count: int) -> TokenSequence:
    """Token preprocessing: Sobel on the bit-plane, edge map, trace, resample."""
    as_gray = GrayImage(bits.width, bits.height, bits.data * np.uint8(255))
    grad = sobel(as_gray)
    edges = edge_map(grad, magnitude_threshold(grad))
    return tokens(resample(trace_contour(edges), count))


def nn_tokens(img: GrayImage, dims: tuple[int, int], count: int) -> TokenSequence:
    """NN preprocessing for a raw frame: resize, binarize, tokenize."""
    small = resize(img, dims[0], dims[1])
    return tokens_from_binary(binarize(small, otsu_threshold(small)), count)


def classify_record(record: store.ModelRecord, img: GrayImage) -> RankedMatches:
    if record.backend == "pca":
        return pca.classify_pca(record.model, pca_vector(img, record.dims))
    count = record.model.input_width // 2
    return network.classify_nn(record.model, nn_tokens(img, record.dims, count))


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="handsign",
        description="Hand-sign recognition: capture, train, recognize, watch, evaluate.",
    )
    parser.add_argument("--profile", default=None, help="webcam | android | WxH")
    parser.add_argument("--backend", choices=("pca", "nn"), default="pca")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--tokens", type=int, default=DEFAULT_TOKEN_COUNT)
    parser.add_argument("--csv", action="store_true", help="machine-readable evaluate output")
    parser.add_argument("--bell", action="store_true", help="terminal bell on recognition")
    parser.add_argument("--no-timestamps", action="store_true")
    parser.add_argument("--source", default=None, help="camera URL, directory or synthetic:<spec>")
    parser.add_argument("--cadence", type=float, default=acquisition.DEFAULT_CADENCE)
    parser.add_argument("--mjpeg", action="store_true", help="stream instead of snapshot polling")
    parser.add_argument("--pca-k", type=int, default=None)
    parser.add_argument("--hidden", type=int, default=network.DEFAULT_HIDDEN_WIDTH)
    parser.add_argument("--rate", type=float, default=0.3)
    parser.add_argument("--epochs", type=int, default=2000)
    parser.add_argument("--target-mse", type=float, default=0.01)
    parser.add_argument("--show-config", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capture", help="write motion-gated static frames to a database")
    p.add_argument("--label", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=5)

    p = sub.add_parser("train", help="train a classifier from a gesture database")
    p.add_argument("--db", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("recognize", help="classify one image file")
    p.add_argument("--model", required=True)
    p.add_argument("image")

    p = sub.add_parser("watch", help="classify static frames from a live source")
    p.add_argument("--model", required=True)

    p = sub.add_parser("evaluate", help="accuracy table over a test database")
    p.add_argument("--model", required=True)
    p.add_argument("--test-db", required=True)
    return parser


def build_config(args) -> PipelineConfig:
    profile = store.parse_profile(args.profile) if args.profile else store.WEBCAM
    return PipelineConfig(
        profile=profile,
        backend=args.backend,
        token_count=args.tokens,
        pca_k=args.pca_k,
        nn_params=network.TrainParams(
            learning_rate=args.rate,
            max_epochs=args.epochs,
            target_mse=args.target_mse,
            seed=args.seed,
        ),
        hidden_width=args.hidden,
        source=args.source,
        cadence=args.cadence,
        mjpeg=args.mjpeg,
    )


def _open_stream(cfg: PipelineConfig) -> acquisition.FrameStream:
    if not cfg.source:
        raise BadEndpoint("no --source given")
    spec = acquisition.parse_source(cfg.source, cfg.cadence)
    return acquisition.open_source(spec, mode="mjpeg" if cfg.mjpeg else "snapshot")


def fmt_pct(value: float) -> str:
    if float(value).is_integer():
        return f"{int(value)}%"
    return f"{value:.1f}%"


# ---------------------------------------------------------------- commands

def cmd_capture(args, cfg: PipelineConfig) -> int:
    stream = _open_stream(cfg)
    out_dir = Path(args.out) / args.label
    gate: MotionGate | None = None
    written = 0
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for frame in stream:
            if gate is None:
                gate = MotionGate(frame.image.width, frame.image.height)
            static = gate.push_frame(frame.image)
            if static is None:
                continue
            small = resize(static, cfg.profile.width, cfg.profile.height)
            bits = binarize(small, otsu_threshold(small))
            as_gray = GrayImage(bits.width, bits.height, bits.data * np.uint8(255))
            path = out_dir / f"{written:04d}.pgm"
            path.write_bytes(store.write_pgm(as_gray))
            print(f"captured {path}")
            written += 1
            if written >= args.count:
                break
    except OSError as exc:
        print(f"write failed: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    finally:
        stream.close()
    if written == 0:
        print("no static frame captured before the stream ended (gate timeout)")
    return EXIT_OK


def _train_model(cfg: PipelineConfig, db: store.GestureDB):
    """Returns (model, dims, summary line)."""
    if cfg.backend == "pca":
        vectors = np.stack([flatten(img) for _, img in db.entries])
        ts = pca.TrainingSet(vectors, db.labels)
        model = pca.train_pca(ts, cfg.pca_k)
        model.dims = cfg.profile.dims
        summary = (
            f"pca: samples={vectors.shape[0]} features={vectors.shape[1]} "
            f"components={model.component_count}"
        )
        return model, cfg.profile.dims, summary
    samples = [
        (tokens_from_binary(img, cfg.token_count), label) for label, img in db.entries
    ]
    report = network.train_nn(samples, cfg.nn_params, cfg.hidden_width)
    summary = (
        f"nn: epochs={report.epochs} mse={report.mse:.6f} "
        f"labels={report.net.output_width}"
    )
    return report.net, cfg.profile.dims, summary


def cmd_train(args, cfg: PipelineConfig) -> int:
    db = store.load_db(args.db, cfg.profile)
    model, dims, summary = _train_model(cfg, db)
    try:
        store.save_model(model, args.out, dims=dims)
    except OSError as exc:
        print(f"write failed: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    print(summary)
    print(f"model written to {args.out}")
    return EXIT_OK


def cmd_recognize(args, cfg: PipelineConfig) -> int:
    record = store.load_model(args.model)
    img = store.read_image_file(args.image)
    matches = classify_record(record, img)
    for entry in matches:
        print(f"{entry.label} {entry.percentage:.10g}%")
    if args.bell:
        sys.stdout.write("\a")
    print(matches.best.label)
    return EXIT_OK


def _watch_frames(stream: acquisition.FrameStream, kind: str):
    """Yield frames (or recoverable errors) until the stream ends.

    Live camera sources run one producer thread with a bounded hand-off
    of at most three in-flight frames; frames are dropped only when the
    consumer is slower than the cadence. Finite sources stay
    synchronous so replays are deterministic.
    """
    if kind != "ip-camera":
        while True:
            try:
                yield stream.next_frame()
            except EndOfStream:
                return
            except (DecodeError, Timeout) as exc:
                yield exc

    else:
        handoff: queue.Queue = queue.Queue(maxsize=3)
        done = object()

        def producer():
            while True:
                try:
                    item = stream.next_frame()
                except EndOfStream:
                    handoff.put(done)
                    return
                except (DecodeError, Timeout) as exc:
                    item = exc
                except HandsignError as exc:
                    handoff.put(exc)
                    handoff.put(done)
                    return
                try:
                    handoff.put_nowait(item)
                except queue.Full:
                    pass  # consumer lagging: drop the frame

        threading.Thread(target=producer, daemon=True).start()
        while True:
            item = handoff.get()
            if item is done:
                return
            yield item


def cmd_watch(args, cfg: PipelineConfig) -> int:
    record = store.load_model(args.model)
    spec = acquisition.parse_source(cfg.source, cfg.cadence) if cfg.source else None
    if spec is None:
        raise BadEndpoint("no --source given")
    stream = acquisition.open_source(spec, mode="mjpeg" if cfg.mjpeg else "snapshot")
    gate: MotionGate | None = None
    try:
        for item in _watch_frames(stream, spec.kind):
            if isinstance(item, HandsignError):
                print(f"frame error: {item}", file=sys.stderr)
                continue
            frame = item
            if gate is None:
                gate = MotionGate(frame.image.width, frame.image.height)
            static = gate.push_frame(frame.image)
            if static is None:
                continue
            try:
                matches = classify_record(record, static)
            except HandsignError as exc:
                print(f"classification error: {exc}", file=sys.stderr)
                continue
            prefix = "" if args.no_timestamps else f"[t={frame.timestamp:.2f}s] "
            print(f"{prefix}{matches.best.label} {matches.best.percentage:.1f}%")
            if args.bell:
                sys.stdout.write("\a")
    except KeyboardInterrupt:
        pass
    finally:
        stream.close()
    return EXIT_OK


def cmd_evaluate(args, cfg: PipelineConfig) -> int:
    record = store.load_model(args.model)
    if args.profile is not None and store.parse_profile(args.profile).dims != record.dims:
        print(
            f"profile mismatch: model is {record.dims[0]}x{record.dims[1]}, "
            f"requested {args.profile}",
            file=sys.stderr,
        )
        return EXIT_INPUT
    profile = store.Profile("model", record.dims[0], record.dims[1])
    db = store.load_db(args.test_db, profile)

    trials: dict[str, int] = {}
    hits: dict[str, int] = {}
    for label, img in db.entries:
        trials[label] = trials.get(label, 0) + 1
        try:
            if record.backend == "pca":
                matches = pca.classify_pca(record.model, flatten(img))
            else:
                count = record.model.input_width // 2
                matches = network.classify_nn(
                    record.model, tokens_from_binary(img, count)
                )
            if matches.best.label == label:
                hits[label] = hits.get(label, 0) + 1
        except HandsignError:
            pass  # unclassifiable image counts as a miss

    labels = sorted(trials)
    total = sum(trials.values())
    correct = sum(hits.get(label, 0) for label in labels)
    if args.csv:
        print("label,trials,hits,percent")
        for label in labels:
            pct = 100.0 * hits.get(label, 0) / trials[label]
            print(f"{label},{trials[label]},{hits.get(label, 0)},{pct:.10g}")
        print(f"overall,{total},{correct},{100.0 * correct / total:.10g}")
    else:
        for label in labels:
            n, k = trials[label], hits.get(label, 0)
            print(f"{label} {k}/{n} {fmt_pct(100.0 * k / n)}")
        print(f"overall {correct}/{total} {fmt_pct(100.0 * correct / total)}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = build_config(args)
    if args.show_config:
        print(cfg.describe())
    handlers = {
        "capture": cmd_capture,
        "train": cmd_train,
        "recognize": cmd_recognize,
        "watch": cmd_watch,
        "evaluate": cmd_evaluate,
    }
    try:
        return handlers[args.command](args, cfg)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NoConvergence, NonFiniteLoss) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    raise SystemExit(main())
