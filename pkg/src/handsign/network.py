"""Feed-forward classifier over token features.

One input, one hidden and one output layer, logistic sigmoid
throughout, trained by per-sample stochastic gradient descent on mean
squared error against one-hot targets. The input width is twice the
token count: each token contributes its (cos, sin) pair, interleaved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyDataset, NonFiniteLoss
from .ranking import MatchEntry, RankedMatches
from .tokenizer import TokenSequence

DEFAULT_HIDDEN_WIDTH = 32


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


@dataclass
class TrainParams:
    learning_rate: float = 0.3
    max_epochs: int = 2000
    target_mse: float = 0.01
    seed: int = 42

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be > 0, got {self.learning_rate}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")


@dataclass
class NnModel:
    """Weights and biases; label_order fixes the meaning of each output."""

    w1: np.ndarray  # (hidden, input)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (output, hidden)
    b2: np.ndarray  # (output,)
    label_order: list[str]

    def __post_init__(self):
        for arr in (self.w1, self.b1, self.w2, self.b2):
            if not np.isfinite(arr).all():
                raise ValueError("network weights must be finite")
        if len(self.label_order) != self.w2.shape[0]:
            raise DimensionMismatch("label_order length must match output width")

    @property
    def input_width(self) -> int:
        return self.w1.shape[1]

    @property
    def hidden_width(self) -> int:
        return self.w1.shape[0]

    @property
    def output_width(self) -> int:
        return self.w2.shape[0]


@dataclass
class TrainReport:
    net: NnModel
    mse: float
    epochs: int


def forward(net: NnModel, x) -> np.ndarray:
    """sigma(W2 sigma(W1 x + b1) + b2); outputs lie in (0, 1)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.input_width,):
        raise DimensionMismatch(
            f"input length {x.shape} does not match network width {net.input_width}"
        )
    hidden = sigmoid(net.w1 @ x + net.b1)
    return sigmoid(net.w2 @ hidden + net.b2)


def _loss(net: NnModel, x, target) -> float:
    y = forward(net, x)
    return float(np.mean((y - target) ** 2))


def _gradients(net: NnModel, x, target):
    """Analytic gradients of the per-sample MSE w.r.t. every parameter."""
    x = np.asarray(x, dtype=np.float64)
    hidden = sigmoid(net.w1 @ x + net.b1)
    y = sigmoid(net.w2 @ hidden + net.b2)
    m = y.shape[0]
    delta_out = (2.0 / m) * (y - target) * y * (1.0 - y)
    delta_hidden = (net.w2.T @ delta_out) * hidden * (1.0 - hidden)
    return (
        np.outer(delta_hidden, x),
        delta_hidden,
        np.outer(delta_out, hidden),
        delta_out,
    )


def train_on_vectors(
    vectors,
    labels,
    params: TrainParams | None = None,
    hidden_width: int = DEFAULT_HIDDEN_WIDTH,
) -> TrainReport:
    """Core training loop over raw feature vectors.

    Weights initialize uniformly in [-0.5, 0.5] from the seeded
    generator; samples are visited in the given order every epoch;
    training stops when the epoch MSE drops below target_mse.
    """
    if params is None:
        params = TrainParams()
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    if not vectors:
        raise EmptyDataset("no training samples")
    if len(vectors) != len(labels):
        raise DimensionMismatch(f"{len(vectors)} vectors but {len(labels)} labels")
    width = vectors[0].shape[0]
    for v in vectors:
        if v.shape != (width,):
            raise DimensionMismatch("training vectors must share length")

    label_order = sorted(set(labels))
    index = {label: i for i, label in enumerate(label_order)}
    targets = np.zeros((len(vectors), len(label_order)))
    for row, label in enumerate(labels):
        targets[row, index[label]] = 1.0

    rng = np.random.default_rng(params.seed)
    w1 = rng.uniform(-0.5, 0.5, size=(hidden_width, width))
    b1 = rng.uniform(-0.5, 0.5, size=hidden_width)
    w2 = rng.uniform(-0.5, 0.5, size=(len(label_order), hidden_width))
    b2 = rng.uniform(-0.5, 0.5, size=len(label_order))
    net = NnModel(w1, b1, w2, b2, label_order)

    rate = params.learning_rate
    mse = float("inf")
    epochs = 0
    for epoch in range(params.max_epochs):
        epochs = epoch + 1
        total = 0.0
        for x, t in zip(vectors, targets):
            total += _loss(net, x, t)
            gw1, gb1, gw2, gb2 = _gradients(net, x, t)
            net.w1 -= rate * gw1
            net.b1 -= rate * gb1
            net.w2 -= rate * gw2
            net.b2 -= rate * gb2
        mse = total / len(vectors)
        if not np.isfinite(mse):
            raise NonFiniteLoss(f"training diverged at epoch {epochs}")
        if mse < params.target_mse:
            break
    return TrainReport(net=net, mse=mse, epochs=epochs)


def train_nn(
    samples: list[tuple[TokenSequence, str]],
    params: TrainParams | None = None,
    hidden_width: int = DEFAULT_HIDDEN_WIDTH,
) -> TrainReport:
    """Train from (token sequence, label) pairs."""
    if not samples:
        raise EmptyDataset("no training samples")
    lengths = {len(seq) for seq, _ in samples}
    if len(lengths) != 1:
        raise DimensionMismatch(f"token sequences differ in length: {sorted(lengths)}")
    vectors = [seq.as_vector() for seq, _ in samples]
    labels = [label for _, label in samples]
    return train_on_vectors(vectors, labels, params, hidden_width)


def classify_vector(net: NnModel, x) -> RankedMatches:
    """Forward pass ranked by output activation.

    percentage = 100 y / sum(y); the distance slot carries 1 - y. Ties
    keep label_order.
    """
    y = forward(net, x)
    total = float(y.sum())
    entries = [
        MatchEntry(label, 100.0 * float(y[i]) / total, 1.0 - float(y[i]))
        for i, label in enumerate(net.label_order)
    ]
    entries.sort(key=lambda e: -e.percentage)
    return RankedMatches(tuple(entries))


def classify_nn(net: NnModel, tokens: TokenSequence) -> RankedMatches:
    """Rank labels for one token sequence."""
    return classify_vector(net, tokens.as_vector())
