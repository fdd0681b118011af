"""Explicit user feedback: star-rating histogram and label distributions.

Comments arrive pre-labeled; no text classification happens here.  Polarity
is derived from the star rating: 1-2 stars negative, 4-5 positive, 3-star
comments belong to neither distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .events import EventKind, RawEvent

POSITIVE = "positive"
NEGATIVE = "negative"

_POLARITY_STARS = {NEGATIVE: (1, 2), POSITIVE: (4, 5)}


@dataclass(frozen=True)
class LabelDistribution:
    counts: dict[str, int]
    shares: dict[str, float]
    labeled: int
    unlabeled: int


@dataclass(frozen=True)
class FeedbackSummary:
    total: int
    star_histogram: dict[int, int]
    satisfied_share: float
    neutral_share: float
    dissatisfied_share: float
    positive_labels: LabelDistribution = field(
        default_factory=lambda: LabelDistribution({}, {}, 0, 0)
    )
    negative_labels: LabelDistribution = field(
        default_factory=lambda: LabelDistribution({}, {}, 0, 0)
    )


def _feedback_events(events: Iterable[RawEvent]) -> list[RawEvent]:
    return [e for e in events if e.kind is EventKind.FEEDBACK]


def summarize_stars(events: Iterable[RawEvent]) -> FeedbackSummary:
    """Histogram over 1..5 stars plus the satisfied/neutral/dissatisfied split."""
    feedback = _feedback_events(events)
    histogram = {stars: 0 for stars in range(1, 6)}
    for event in feedback:
        histogram[event.payload.stars] += 1
    total = len(feedback)
    if total == 0:
        return FeedbackSummary(0, histogram, 0.0, 0.0, 0.0)
    return FeedbackSummary(
        total=total,
        star_histogram=histogram,
        satisfied_share=(histogram[4] + histogram[5]) / total,
        neutral_share=histogram[3] / total,
        dissatisfied_share=(histogram[1] + histogram[2]) / total,
    )


def label_distribution(events: Iterable[RawEvent], polarity: str) -> LabelDistribution:
    """Share per label over the labeled comments of one polarity.

    Comments without a label are counted separately, never silently dropped.
    """
    try:
        star_values = _POLARITY_STARS[polarity]
    except KeyError:
        raise ValueError(f"polarity must be 'positive' or 'negative', got {polarity!r}")
    counts: dict[str, int] = {}
    unlabeled = 0
    for event in _feedback_events(events):
        if event.payload.stars not in star_values:
            continue
        label = event.payload.sentiment_label
        if label is None:
            unlabeled += 1
        else:
            counts[label] = counts.get(label, 0) + 1
    labeled = sum(counts.values())
    shares = {
        label: counts[label] / labeled for label in sorted(counts)
    } if labeled else {}
    return LabelDistribution(
        counts={label: counts[label] for label in sorted(counts)},
        shares=shares,
        labeled=labeled,
        unlabeled=unlabeled,
    )


def summarize_feedback(events: Iterable[RawEvent]) -> FeedbackSummary:
    """Full feedback summary: stars plus both polarity label distributions."""
    feedback = _feedback_events(events)
    stars = summarize_stars(feedback)
    return FeedbackSummary(
        total=stars.total,
        star_histogram=stars.star_histogram,
        satisfied_share=stars.satisfied_share,
        neutral_share=stars.neutral_share,
        dissatisfied_share=stars.dissatisfied_share,
        positive_labels=label_distribution(feedback, POSITIVE),
        negative_labels=label_distribution(feedback, NEGATIVE),
    )
