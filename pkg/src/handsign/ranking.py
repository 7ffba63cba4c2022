"""Classifier output contract shared by both recognizer backends."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MatchEntry:
    label: str
    percentage: float
    distance: float


@dataclass(frozen=True)
class RankedMatches:
    """All candidate labels, best first.

    Percentages are non-negative and sum to 100 within 1e-6; the order
    is descending in percentage, which both backends arrange to agree
    with ascending distance.
    """

    entries: tuple[MatchEntry, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("ranked matches cannot be empty")
        total = sum(e.percentage for e in self.entries)
        if abs(total - 100.0) > 1e-6:
            raise ValueError(f"percentages sum to {total}, expected 100")
        for e in self.entries:
            if e.percentage < 0 or e.distance < 0:
                raise ValueError("percentages and distances must be non-negative")
        for a, b in zip(self.entries, self.entries[1:]):
            if a.percentage < b.percentage - 1e-12:
                raise ValueError("entries must be sorted by descending percentage")

    @property
    def best(self) -> MatchEntry:
        return self.entries[0]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)
