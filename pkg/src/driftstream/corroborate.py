"""Corroborative events and retroactive spatio-temporal labeling.

Trusted feeds (agency reports, news) arrive late but carry annotations; any
stream point inside an event's space-time extent inherits the event's
polarity as its label.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .core import DataPoint, InputError

EARTH_RADIUS_KM = 6371.0088
DEFAULT_PAD_SECONDS = 86400.0
DEFAULT_RADIUS_KM = 50.0
MAX_RADIUS_KM = 1000.0

POLARITY_RELEVANT = "relevant"
POLARITY_IRRELEVANT = "irrelevant"


@dataclass(frozen=True)
class CorroborativeEvent:
    """A trusted event with a spatio-temporal extent and a polarity."""

    id: str
    ts_start: int
    ts_end: int
    lat: float
    lon: float
    radius_km: float
    polarity: str
    source: str = ""

    def __post_init__(self):
        if self.ts_start > self.ts_end:
            raise InputError(f"event {self.id}: ts_start after ts_end")
        if not (0.0 < self.radius_km <= MAX_RADIUS_KM):
            raise InputError(f"event {self.id}: radius {self.radius_km} out of range")
        if self.polarity not in (POLARITY_RELEVANT, POLARITY_IRRELEVANT):
            raise InputError(f"event {self.id}: unknown polarity {self.polarity!r}")

    @property
    def label(self) -> int:
        return 1 if self.polarity == POLARITY_RELEVANT else 0


@dataclass(frozen=True)
class LabelAssignment:
    point_id: str
    event_id: str
    label: int
    distance_km: float
    dt_seconds: float


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in kilometers between (lat, lon) pairs in degrees."""
    lat1, lon1, lat2, lon2 = map(math.radians, (a[0], a[1], b[0], b[1]))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def _time_offset(ts: int, event: CorroborativeEvent) -> float:
    """Signed seconds outside the event span; 0 when inside it."""
    if ts < event.ts_start:
        return float(ts - event.ts_start)
    if ts > event.ts_end:
        return float(ts - event.ts_end)
    return 0.0


def assign_labels(
    points: Sequence[DataPoint],
    events: Sequence[CorroborativeEvent],
    pad_seconds: float = DEFAULT_PAD_SECONDS,
) -> list[LabelAssignment]:
    """Match points to events by location and padded time span.

    A point matches when it has coordinates, lies within the event radius, and
    its timestamp falls inside [ts_start - pad, ts_end + pad]. Among multiple
    matches the nearest event wins, with ties going to the smallest event id.
    Geo-less and unmatched points stay unlabeled.
    """
    out: list[LabelAssignment] = []
    for p in points:
        if p.geo is None:
            continue
        best: tuple[float, str, CorroborativeEvent] | None = None
        for e in events:
            if not (e.ts_start - pad_seconds <= p.ts <= e.ts_end + pad_seconds):
                continue
            dist = haversine_km(p.geo, (e.lat, e.lon))
            if dist > e.radius_km:
                continue
            key = (dist, e.id)
            if best is None or key < (best[0], best[1]):
                best = (dist, e.id, e)
        if best is not None:
            dist, _, e = best
            out.append(
                LabelAssignment(
                    point_id=p.id, event_id=e.id, label=e.label,
                    distance_km=dist, dt_seconds=_time_offset(p.ts, e),
                )
            )
    return out


def label_fraction(points: Sequence, assignments: Sequence[LabelAssignment]) -> float:
    """Fraction of all points that received a corroborative label."""
    if not points:
        raise InputError("need at least one point")
    return len(assignments) / len(points)


def corroborative_ratio(unlabeled_count: int, corroborative_count: int) -> float:
    """Labeled-to-unlabeled ratio, the alternative bookkeeping convention."""
    if unlabeled_count == 0:
        return math.inf if corroborative_count else 0.0
    return corroborative_count / unlabeled_count


def load_events(path: str | Path) -> list[CorroborativeEvent]:
    """Read a corroborative feed: one JSON event per line."""
    events = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            d = json.loads(line)
            events.append(
                CorroborativeEvent(
                    id=d["id"], ts_start=d["ts_start"], ts_end=d["ts_end"],
                    lat=d["lat"], lon=d["lon"],
                    radius_km=d.get("radius_km") or DEFAULT_RADIUS_KM,
                    polarity=d["polarity"], source=d.get("source", ""),
                )
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"{path}:{lineno}: bad event line: {exc}") from exc
    return events


def save_events(events: Iterable[CorroborativeEvent], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in events:
            fh.write(json.dumps({
                "id": e.id, "ts_start": e.ts_start, "ts_end": e.ts_end,
                "lat": e.lat, "lon": e.lon, "radius_km": e.radius_km,
                "polarity": e.polarity, "source": e.source,
            }, separators=(",", ":")) + "\n")
