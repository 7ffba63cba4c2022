"""Hand-sign recognition toolkit.

Networked frame acquisition, motion-gated static-frame selection,
Sobel edge extraction, contour tokenization and two interchangeable
classifiers (eigen-image PCA and a one-hidden-layer backprop network),
plus a CLI for capture, training, recognition, live watching and
evaluation.
"""

from .acquisition import Frame, FrameSource, open_source, parse_mjpeg, parse_source
from .imaging import (
    BinaryImage,
    GradientImage,
    GrayImage,
    binarize,
    edge_map,
    flatten,
    otsu_threshold,
    resize,
    sobel,
    to_grayscale,
)
from .motiongate import MotionGate, motion_parameter
from .network import NnModel, TrainParams, classify_nn, forward, train_nn
from .pca import PcaModel, TrainingSet, classify_pca, eigen_sym, project, train_pca
from .ranking import MatchEntry, RankedMatches
from .store import (
    ANDROID,
    WEBCAM,
    GestureDB,
    Profile,
    load_db,
    load_model,
    read_pgm,
    save_model,
    write_pgm,
)
from .tokenizer import Token, TokenSequence, resample, tokens, trace_contour

__version__ = "0.1.0"

__all__ = [
    "ANDROID",
    "BinaryImage",
    "Frame",
    "FrameSource",
    "GestureDB",
    "GradientImage",
    "GrayImage",
    "MatchEntry",
    "MotionGate",
    "NnModel",
    "PcaModel",
    "Profile",
    "RankedMatches",
    "Token",
    "TokenSequence",
    "TrainParams",
    "TrainingSet",
    "WEBCAM",
    "binarize",
    "classify_nn",
    "classify_pca",
    "edge_map",
    "eigen_sym",
    "flatten",
    "forward",
    "load_db",
    "load_model",
    "motion_parameter",
    "open_source",
    "otsu_threshold",
    "parse_mjpeg",
    "parse_source",
    "project",
    "read_pgm",
    "resample",
    "resize",
    "save_model",
    "sobel",
    "to_grayscale",
    "tokens",
    "trace_contour",
    "train_nn",
    "train_pca",
    "write_pgm",
]
