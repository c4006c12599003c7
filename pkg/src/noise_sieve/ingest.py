"""Call-log ingestion: parse raw records, derive behavior labels, segment time.

Raw logs are CSV with the exact header
``date,time,call_type,duration,location,relationship,call_id``. Behavior is
derived from call type and duration (an incoming call with positive duration
was accepted, with zero duration rejected). Timestamps are discretized into
``Day[Segment]`` tokens by a static, configurable segmentation of the day;
all times are naive local time.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, TextIO

from .data import (
    Attribute,
    AttributeSchema,
    DataError,
    Dataset,
    LabeledInstance,
    validate_dataset,
)

CallType = Literal["incoming", "missed", "outgoing"]
CALL_TYPES = ("incoming", "missed", "outgoing")

BEHAVIOR_LABELS = ("Accept", "Reject", "Missed", "Outgoing")

DAY_NAMES = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")

RAW_HEADER = ("date", "time", "call_type", "duration", "location", "relationship", "call_id")

_SECONDS_PER_DAY = 24 * 3600


@dataclass(frozen=True)
class CallRecord:
    date: dt.date
    time: dt.time
    call_type: CallType
    duration: int
    location: str
    relationship: str
    call_id: str

    def __post_init__(self) -> None:
        if self.call_type not in CALL_TYPES:
            raise DataError(f"unknown call_type {self.call_type!r}")
        if self.duration < 0:
            raise DataError(f"negative duration {self.duration}")
        if self.call_type == "missed" and self.duration != 0:
            raise DataError("missed calls must have duration 0")
        for name in ("location", "relationship", "call_id"):
            if not getattr(self, name):
                raise DataError(f"empty {name} field")


@dataclass(frozen=True)
class Segment:
    """Half-open interval of the day in seconds: [start, end)."""

    name: str
    start: int
    end: int


@dataclass(frozen=True)
class SegmentationConfig:
    """Named segments covering 00:00-24:00 with no gaps or overlaps."""

    segments: tuple[Segment, ...]
    day_names: tuple[str, ...] = DAY_NAMES

    def __post_init__(self) -> None:
        if len(self.day_names) != 7:
            raise DataError("day_names must list exactly 7 tokens")
        names = [s.name for s in self.segments]
        if len(set(names)) != len(names):
            raise DataError(f"duplicate segment names: {names}")
        ordered = sorted(self.segments, key=lambda s: s.start)
        cursor = 0
        for seg in ordered:
            if seg.start != cursor:
                gap_or_overlap = "overlap" if seg.start < cursor else "gap"
                raise DataError(f"segment {seg.name!r} creates a {gap_or_overlap} at {cursor}s")
            if seg.end <= seg.start:
                raise DataError(f"segment {seg.name!r} is empty or reversed")
            cursor = seg.end
        if cursor != _SECONDS_PER_DAY:
            raise DataError(f"segments cover only {cursor}s of the day")

    def segment_of(self, time: dt.time) -> str:
        second = time.hour * 3600 + time.minute * 60 + time.second
        for seg in self.segments:
            if seg.start <= second < seg.end:
                return seg.name
        raise AssertionError("validated segments cover the whole day")


def _hms(text: str) -> int:
    parts = text.split(":")
    if len(parts) == 2:
        parts.append("0")
    if len(parts) != 3:
        raise DataError(f"bad time of day {text!r}")
    h, m, s = (int(p) for p in parts)
    if not (0 <= h <= 24 and 0 <= m < 60 and 0 <= s < 60) or (h == 24 and (m or s)):
        raise DataError(f"bad time of day {text!r}")
    return h * 3600 + m * 60 + s


DEFAULT_SEGMENTATION = SegmentationConfig(
    segments=(
        Segment("S3", 0, 8 * 3600),
        Segment("S1", 8 * 3600, 16 * 3600),
        Segment("S2", 16 * 3600, _SECONDS_PER_DAY),
    )
)


def segmentation_from_json(source: str | Path | dict) -> SegmentationConfig:
    """Load {"segments": [{"name", "start", "end"}, ...]} with HH:MM[:SS] bounds.

    An "end" of "24:00" closes the day. Optional "day_names" overrides the
    default Mon..Sun tokens.
    """
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        data = source
    try:
        segments = tuple(
            Segment(s["name"], _hms(s["start"]), _hms(s["end"])) for s in data["segments"]
        )
    except (KeyError, TypeError) as exc:
        raise DataError(f"bad segmentation config: {exc}") from exc
    day_names = tuple(data.get("day_names", DAY_NAMES))
    return SegmentationConfig(segments=segments, day_names=day_names)


def derive_behavior(record: CallRecord) -> str:
    """Behavior class from call type and duration."""
    if record.call_type == "incoming":
        return "Accept" if record.duration > 0 else "Reject"
    if record.call_type == "missed":
        return "Missed"
    return "Outgoing"


def segment_time(
    date: dt.date, time: dt.time, config: SegmentationConfig = DEFAULT_SEGMENTATION
) -> str:
    """Token ``Day[Segment]`` for a timestamp, e.g. ``Fri[S1]``."""
    day = config.day_names[date.weekday()]
    return f"{day}[{config.segment_of(time)}]"


def parse_log(source: TextIO | str | Path) -> list[CallRecord]:
    """Parse a raw call-log CSV into records, reporting errors by line number."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as handle:
            return parse_log(handle)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty file: missing header") from None
    if tuple(h.strip() for h in header) != RAW_HEADER:
        raise DataError(f"line 1: expected header {','.join(RAW_HEADER)}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(RAW_HEADER):
            raise DataError(f"line {lineno}: expected {len(RAW_HEADER)} fields, got {len(row)}")
        date_s, time_s, call_type, duration_s, location, relationship, call_id = (
            field.strip() for field in row
        )
        try:
            date = dt.date.fromisoformat(date_s)
            time = dt.time.fromisoformat(time_s)
        except ValueError as exc:
            raise DataError(f"line {lineno}: {exc}") from exc
        try:
            duration = int(duration_s)
        except ValueError:
            raise DataError(f"line {lineno}: duration {duration_s!r} is not an integer") from None
        try:
            records.append(
                CallRecord(date, time, call_type, duration, location, relationship, call_id)  # type: ignore[arg-type]
            )
        except DataError as exc:
            raise DataError(f"line {lineno}: {exc}") from exc
    return records


def to_dataset(
    records: Sequence[CallRecord], config: SegmentationConfig = DEFAULT_SEGMENTATION
) -> Dataset:
    """Discretize records into the categorical DayTime/Location/Relationship form.

    Class labels are the observed subset of the behavior set, kept in its
    fixed order; ids follow record order.
    """
    if not records:
        raise DataError("no call records to convert")
    rows = []
    seen_labels = set()
    for record in records:
        label = derive_behavior(record)
        seen_labels.add(label)
        instance = (
            segment_time(record.date, record.time, config),
            record.location,
            record.relationship,
        )
        rows.append(LabeledInstance(None, instance, label))
    schema = AttributeSchema(
        attributes=(Attribute("DayTime"), Attribute("Location"), Attribute("Relationship")),
        class_attribute="Behavior",
        class_labels=tuple(l for l in BEHAVIOR_LABELS if l in seen_labels),
    )
    return validate_dataset(schema, rows)


def read_dataset_csv(source: TextIO | str | Path) -> Dataset:
    """Load a pre-segmented dataset CSV: last column is the class label.

    Rows get ids equal to their 1-based data-row number (the header is not
    counted), so reported noise ids can be matched to file lines directly.
    Class labels are ordered by first appearance.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as handle:
            return read_dataset_csv(handle)
    reader = csv.reader(source)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("empty file: missing header") from None
    if len(header) < 2:
        raise DataError("dataset CSV needs at least one attribute column and a class column")
    attr_names, class_attr = header[:-1], header[-1]
    rows: list[LabeledInstance] = []
    labels: dict[str, None] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        values = tuple(v.strip() for v in row[:-1])
        label = row[-1].strip()
        labels.setdefault(label, None)
        rows.append(LabeledInstance(lineno - 1, values, label))
    if not rows:
        raise DataError("dataset CSV contains no data rows")
    schema = AttributeSchema(
        attributes=tuple(Attribute(n) for n in attr_names),
        class_attribute=class_attr,
        class_labels=tuple(labels),
    )
    return validate_dataset(schema, rows)


def write_dataset_csv(dataset: Dataset, target: TextIO | str | Path) -> None:
    """Write the dataset in the loadable CSV form (class column last)."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="") as handle:
            write_dataset_csv(dataset, handle)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(list(dataset.schema.attribute_names) + [dataset.schema.class_attribute])
    for row in dataset.rows:
        writer.writerow(list(row.instance) + [row.label])


def dataset_csv_string(dataset: Dataset) -> str:
    buffer = io.StringIO()
    write_dataset_csv(dataset, buffer)
    return buffer.getvalue()
