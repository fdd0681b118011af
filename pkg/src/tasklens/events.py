"""Telemetry event model: JSONL parsing, validation, dedup, per-user timelines.

One JSON object per line.  Required fields: ``event_id``, ``user_id``, ``ts``
(RFC 3339 with an explicit UTC offset) and ``type``; the remaining fields
depend on the event type.  Unknown extra fields are ignored.  Malformed lines
are never fatal: ingestion skips them and keeps a count for the report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

DEDUP_WINDOW_SECONDS = 10.0


class EventKind(Enum):
    COMPLETION = "completion"
    SUGGESTION = "suggestion"
    ACTION = "action"
    CONTENT = "content"
    FEEDBACK = "feedback"


class UserAction(Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    IGNORED = "ignored"


class EventParseError(ValueError):
    """Base for all single-line parse failures; carries enough to skip-and-count."""


class MalformedJson(EventParseError):
    pass


class MissingField(EventParseError):
    def __init__(self, name: str):
        super().__init__(f"missing required field: {name}")
        self.name = name


class BadTimestamp(EventParseError):
    pass


class UnknownKind(EventParseError):
    pass


class BadFieldValue(EventParseError):
    """Present but out-of-range or wrongly typed field (e.g. stars outside 1..5)."""


@dataclass(frozen=True, slots=True)
class CompletionPayload:
    suggestion_id: str
    prompt: str
    context: str

    def content_key(self):
        return (self.suggestion_id, self.prompt, self.context)


@dataclass(frozen=True, slots=True)
class SuggestionPayload:
    suggestion_id: str
    suggestion_text: str
    line_count: int
    token_count: int

    def content_key(self):
        return (self.suggestion_id, self.suggestion_text, self.line_count, self.token_count)


@dataclass(frozen=True, slots=True)
class ActionPayload:
    suggestion_id: str
    action: UserAction

    def content_key(self):
        return (self.suggestion_id, self.action.value)


@dataclass(frozen=True, slots=True)
class ContentPayload:
    document_text: str
    suggestion_id: str | None = None

    def content_key(self):
        return (self.suggestion_id, self.document_text)


@dataclass(frozen=True, slots=True)
class FeedbackPayload:
    stars: int
    comment: str
    sentiment_label: str | None = None

    def content_key(self):
        return (self.stars, self.comment, self.sentiment_label)


Payload = (
    CompletionPayload | SuggestionPayload | ActionPayload | ContentPayload | FeedbackPayload
)


@dataclass(frozen=True, slots=True)
class RawEvent:
    event_id: str
    user_id: str
    kind: EventKind
    timestamp: datetime
    payload: Payload

    def local_date(self) -> date:
        return local_date(self)


def local_date(e: RawEvent) -> date:
    """Calendar date in the event's own UTC offset (user-local wall clock)."""
    return e.timestamp.date()


_MISSING = object()


def _require_str(obj: dict, name: str) -> str:
    value = obj.get(name, _MISSING)
    if value is _MISSING:
        raise MissingField(name)
    if type(value) is not str or not value:
        raise BadFieldValue(f"field {name!r} must be a non-empty string")
    return value


def _require_text(obj: dict, name: str) -> str:
    value = obj.get(name, _MISSING)
    if value is _MISSING:
        raise MissingField(name)
    if type(value) is not str:
        raise BadFieldValue(f"field {name!r} must be a string")
    return value


def _require_int(obj: dict, name: str, minimum: int, maximum: int | None = None) -> int:
    value = obj.get(name, _MISSING)
    if value is _MISSING:
        raise MissingField(name)
    if type(value) is not int:
        raise BadFieldValue(f"field {name!r} must be an integer")
    if value < minimum or (maximum is not None and value > maximum):
        raise BadFieldValue(f"field {name!r} out of range: {value}")
    return value


def _parse_timestamp(obj: dict) -> datetime:
    raw = obj.get("ts", _MISSING)
    if raw is _MISSING:
        raise MissingField("ts")
    if type(raw) is not str:
        raise BadTimestamp(f"ts must be a string, got {type(raw).__name__}")
    text = raw[:-1] + "+00:00" if raw.endswith(("Z", "z")) else raw
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        raise BadTimestamp(f"unparseable timestamp: {raw!r}") from None
    if ts.tzinfo is None:
        raise BadTimestamp(f"timestamp lacks a UTC offset: {raw!r}")
    return ts


_KIND_BY_NAME = {kind.value: kind for kind in EventKind}
_ACTION_BY_NAME = {action.value: action for action in UserAction}


def parse_event_line(line: str) -> RawEvent:
    """Parse and validate one JSONL event line."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise MalformedJson("event line is not a JSON object")

    event_id = _require_str(obj, "event_id")
    user_id = _require_str(obj, "user_id")
    ts = _parse_timestamp(obj)
    try:
        type_name = obj["type"]
    except KeyError:
        raise MissingField("type") from None
    kind = _KIND_BY_NAME.get(type_name)
    if kind is None:
        raise UnknownKind(f"unknown event type: {type_name!r}")

    payload: Payload
    if kind is EventKind.COMPLETION:
        payload = CompletionPayload(
            _require_str(obj, "suggestion_id"),
            _require_text(obj, "prompt"),
            _require_text(obj, "context"),
        )
    elif kind is EventKind.SUGGESTION:
        text = _require_text(obj, "text")
        lines = _require_int(obj, "lines", minimum=1)
        tokens = _require_int(obj, "tokens", minimum=1)
        if lines != len(text.splitlines()):
            raise BadFieldValue(
                f"field 'lines' is {lines} but text has {len(text.splitlines())} lines"
            )
        payload = SuggestionPayload(_require_str(obj, "suggestion_id"), text, lines, tokens)
    elif kind is EventKind.ACTION:
        action_name = _require_str(obj, "action")
        action = _ACTION_BY_NAME.get(action_name)
        if action is None:
            raise BadFieldValue(f"unknown action: {action_name!r}")
        payload = ActionPayload(_require_str(obj, "suggestion_id"), action)
    elif kind is EventKind.CONTENT:
        sid = obj.get("suggestion_id")
        if sid is not None and (type(sid) is not str or not sid):
            raise BadFieldValue("field 'suggestion_id' must be a non-empty string when present")
        payload = ContentPayload(_require_text(obj, "document"), sid)
    else:
        label = obj.get("label")
        if label is not None and type(label) is not str:
            raise BadFieldValue("field 'label' must be a string when present")
        payload = FeedbackPayload(
            _require_int(obj, "stars", minimum=1, maximum=5),
            _require_text(obj, "comment"),
            label,
        )

    return RawEvent(event_id, user_id, kind, ts, payload)


@dataclass
class IngestResult:
    events: list[RawEvent]
    malformed_lines: int


def read_events(paths: Iterable[str | Path]) -> IngestResult:
    """Read JSONL logs; malformed lines are skipped and counted, never fatal."""
    events: list[RawEvent] = []
    malformed = 0
    for path in paths:
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                if not line or line.isspace():
                    continue
                try:
                    events.append(parse_event_line(line))
                except EventParseError:
                    malformed += 1
    return IngestResult(events=events, malformed_lines=malformed)


def read_event_lines(lines: Iterable[str]) -> IngestResult:
    events: list[RawEvent] = []
    malformed = 0
    for line in lines:
        if not line.strip():
            continue
        try:
            events.append(parse_event_line(line))
        except EventParseError:
            malformed += 1
    return IngestResult(events=events, malformed_lines=malformed)


def _sort_key(event: RawEvent) -> tuple[str, float, str]:
    # epoch-float instants order identically to aware datetimes and compare faster
    return (event.user_id, event.timestamp.timestamp(), event.event_id)


def deduplicate(
    events: Iterable[RawEvent], window_seconds: float = DEDUP_WINDOW_SECONDS
) -> list[RawEvent]:
    """Drop repeats of the same (user, kind, payload) within the retry window.

    An event is a duplicate when an already-kept event with the same user,
    kind and payload content lies at most ``window_seconds`` before it; the
    earliest of each burst survives.  Output is sorted by
    (user_id, timestamp, event_id).
    """
    kept: list[RawEvent] = []
    last_kept_at: dict[tuple, float] = {}
    for event in sorted(events, key=_sort_key):
        instant = event.timestamp.timestamp()
        key = (event.user_id, event.kind, event.payload.content_key())
        previous = last_kept_at.get(key)
        if previous is not None and instant - previous <= window_seconds:
            continue
        last_kept_at[key] = instant
        kept.append(event)
    return kept


@dataclass
class UserTimeline:
    """All of one user's events, time-ordered, plus their active calendar days."""

    user_id: str
    events: list[RawEvent]
    active_days: set[date] = field(init=False)
    first_day: date = field(init=False)

    def __post_init__(self):
        if not self.events:
            raise ValueError("a timeline requires at least one event")
        self.active_days = {local_date(e) for e in self.events}
        self.first_day = min(self.active_days)


def active_days(timeline: UserTimeline) -> set[date]:
    return set(timeline.active_days)


def build_timelines(events: Iterable[RawEvent]) -> list[UserTimeline]:
    """Partition deduplicated events into one timeline per user, user_id order."""
    per_user: dict[str, list[RawEvent]] = {}
    for event in events:
        per_user.setdefault(event.user_id, []).append(event)
    timelines = []
    for user_id in sorted(per_user):
        user_events = sorted(per_user[user_id], key=lambda e: (e.timestamp, e.event_id))
        timelines.append(UserTimeline(user_id=user_id, events=user_events))
    return timelines


def iter_kind(events: Iterable[RawEvent], kind: EventKind) -> Iterator[RawEvent]:
    return (e for e in events if e.kind is kind)
