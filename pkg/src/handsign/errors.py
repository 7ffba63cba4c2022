"""Exception hierarchy shared across the toolkit."""


class HandsignError(Exception):
    """Base class for every error raised by this package."""


# raster / geometry

class DimensionMismatch(HandsignError):
    """Array sizes disagree with the declared image or vector geometry."""


class ImageTooSmall(HandsignError):
    """Operation needs a larger raster (Sobel requires at least 3x3)."""


# frame sources

class BadEndpoint(HandsignError):
    """Malformed URL or path for the requested source kind."""


class ConnectFailed(HandsignError):
    """Endpoint unreachable during the initial connection attempt."""


class EndOfStream(HandsignError):
    """Finite source exhausted."""


class DecodeError(HandsignError):
    """Frame payload could not be decoded to an image."""


class Timeout(HandsignError):
    """No data arrived within the allowed window (5x cadence)."""


class MalformedStream(HandsignError):
    """Multipart body carries no usable boundary structure."""


class HeaderTooLarge(HandsignError):
    """Multipart part header exceeds the 8 KiB cap."""


# contour / tokens

class NoContour(HandsignError):
    """Edge map has no set pixels to trace."""


class DegeneratePath(HandsignError):
    """Contour has zero total arc length."""


class DegenerateSegment(HandsignError):
    """Two consecutive points coincide; no direction exists."""


# linear algebra / classifiers

class NotSymmetric(HandsignError):
    """Eigensolver input is not symmetric within tolerance."""


class NoConvergence(HandsignError):
    """Iteration cap reached before the convergence criterion."""


class TooFewSamples(HandsignError):
    """Training requires at least two samples."""


class RankDeficient(HandsignError):
    """All eigenvalues vanish; the dataset is constant."""


class EmptyDataset(HandsignError):
    """No training samples supplied."""


class NonFiniteLoss(HandsignError):
    """Training diverged to NaN or infinity."""


# storage

class BadMagic(HandsignError):
    """File does not start with the expected magic bytes."""


class BadHeader(HandsignError):
    """Header fields are missing or unparseable."""


class TruncatedData(HandsignError):
    """Payload shorter than the header promises."""


class UnsupportedMaxval(HandsignError):
    """PGM maxval other than 255."""


class EmptyDatabase(HandsignError):
    """Gesture database directory holds no readable images."""


class UnreadableImage(HandsignError):
    """A database image failed to load; message carries the path."""


class ChecksumMismatch(HandsignError):
    """Model file CRC does not validate."""


class UnknownVersion(HandsignError):
    """Model file version is not supported."""


class UnknownBackend(HandsignError):
    """Model file backend tag is not recognised."""
