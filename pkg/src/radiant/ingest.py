"""Parsing and filtering of person metadata, movement records, and city tables.

Wire formats (CSV with mandatory header, or JSON arrays of objects):

    persons.csv:   person_id,name,birth_date,death_date,lat,lon,work_area,discipline
    footsteps.csv: person_id,date,place,lat,lon,predicate,resource,place_frame,resource_frame
    cities.csv:    city_id,name,lat,lon,population

Every input record either yields a domain object or a structured rejection
carrying the record number and a machine-readable reason code; nothing is
dropped silently, and accepted + rejected always equals the input count.
"""

import csv
import io
import json
from calendar import monthrange
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geo

# Discipline labels of the person table; extendable at parse time.
DEFAULT_DISCIPLINES = frozenset({
    "Arts",
    "Science and Technology",
    "Humanities",
    "Institutions",
    "Public Figure",
    "Sports",
    "Business and Law",
    "Exploration",
})

BIRTH_RESOURCES = {"dbpedia", "pantheon"}


class IngestError(Exception):
    """A whole input stream is unusable (not a per-record rejection)."""


@dataclass(frozen=True)
class PartialDate:
    """8-digit YYYYMMDD date where month and/or day may be 0 (unknown).

    Unknown components resolve to midpoints for ordering only: month 0 sorts
    as July 1, day 0 as the 15th. The stored fields keep the raw zeros so
    serialization round-trips.
    """
    year: int
    month: int = 0
    day: int = 0

    @classmethod
    def parse(cls, raw, allow_bare_year=False):
        s = str(raw).strip()
        if allow_bare_year and len(s) == 4 and s.isdigit():
            s += "0000"
        if len(s) != 8 or not s.isdigit():
            raise ValueError(f"date not 8 digits: {raw!r}")
        y, m, d = int(s[:4]), int(s[4:6]), int(s[6:8])
        if not (1 <= y <= 2100):
            raise ValueError(f"year out of range: {y}")
        if m > 12:
            raise ValueError(f"month out of range: {m}")
        if m == 0 and d != 0:
            raise ValueError(f"day given without month: {raw!r}")
        if m > 0 and d > monthrange(y, m)[1]:
            raise ValueError(f"invalid day of month: {raw!r}")
        return cls(y, m, d)

    def sort_key(self):
        m = self.month if self.month else 7
        d = self.day if self.day else (1 if self.month == 0 else 15)
        return (self.year, m, d)

    def as_int(self):
        return self.year * 10000 + self.month * 100 + self.day

    def __str__(self):
        return f"{self.year:04d}{self.month:02d}{self.day:02d}"


@dataclass(frozen=True)
class Person:
    person_id: str
    name: str
    birth_date: PartialDate
    death_date: Optional[PartialDate]
    birth_point: tuple  # (lat, lon) degrees
    work_area: str
    discipline: str


@dataclass(frozen=True)
class Footstep:
    date: PartialDate
    place_name: str
    point: tuple  # (lat, lon) degrees
    kind: str     # "Birth" | "InLife" | "Death"
    predicate: Optional[str]
    resource: str


@dataclass
class Trajectory:
    """Date-ordered footsteps of one person.

    origin_point is set by filter_active: the person's birth coordinates,
    kept even when the Birth footstep itself falls outside the time window.
    """
    person_id: str
    footsteps: list
    origin_point: Optional[tuple] = None

    def __len__(self):
        return len(self.footsteps)


@dataclass(frozen=True)
class City:
    city_id: str
    name: str
    point: tuple
    population: float


class CityTable:
    """Reference settlements: Voronoi seeds and network nodes."""

    def __init__(self, cities):
        cities = list(cities)
        ids = [c.city_id for c in cities]
        if len(set(ids)) != len(ids):
            raise IngestError("duplicate city_id in city table")
        coords = {(c.point[0], c.point[1]) for c in cities}
        if len(coords) != len(cities):
            raise IngestError("two cities share identical coordinates")
        for c in cities:
            if not c.population > 0:
                raise IngestError(f"nonpositive population for {c.city_id}")
        self.cities = cities
        self.by_id = {c.city_id: c for c in cities}

    @property
    def ids(self):
        return [c.city_id for c in self.cities]

    @property
    def lats(self):
        return np.array([c.point[0] for c in self.cities])

    @property
    def lons(self):
        return np.array([c.point[1] for c in self.cities])

    @property
    def populations(self):
        return np.array([c.population for c in self.cities])

    def __len__(self):
        return len(self.cities)

    def assigner(self):
        return geo.CityAssigner(self.ids, self.lats, self.lons)


@dataclass(frozen=True)
class Rejection:
    line: int         # line number (CSV) or 1-based element index (JSON)
    code: str         # machine-readable reason
    detail: str


@dataclass
class ParseResult:
    records: list
    rejections: list = field(default_factory=list)

    @property
    def n_input(self):
        return len(self.records) + len(self.rejections)

    def summary(self):
        """Machine-readable counts for the JSON run summary."""
        by_code = {}
        for r in self.rejections:
            by_code[r.code] = by_code.get(r.code, 0) + 1
        return {
            "input": self.n_input,
            "accepted": len(self.records),
            "rejected": len(self.rejections),
            "rejections_by_code": dict(sorted(by_code.items())),
        }


def _rows(stream, fmt, fields):
    """Yield (line_number, dict) rows from a CSV or JSON stream."""
    if fmt == "csv":
        reader = csv.DictReader(stream)
        if reader.fieldnames is None:
            return
        missing = [f for f in fields if f not in reader.fieldnames]
        if missing:
            raise IngestError(f"missing CSV columns: {missing}")
        for row in reader:
            yield reader.line_num, row
    elif fmt == "json":
        data = json.load(stream)
        if not isinstance(data, list):
            raise IngestError("JSON stream must be an array of objects")
        for i, row in enumerate(data, start=1):
            yield i, {k: (None if v is None else str(v)) for k, v in row.items()}
    else:
        raise IngestError(f"unknown format: {fmt!r}")


class _CoordError(Exception):
    def __init__(self, code, detail=""):
        self.code = code
        self.detail = detail


def _parse_coords(row, lat_field="lat", lon_field="lon"):
    lat_raw = (row.get(lat_field) or "").strip()
    lon_raw = (row.get(lon_field) or "").strip()
    if not lat_raw or not lon_raw or lat_raw.lower() in ("n/a", "null", "none") \
            or lon_raw.lower() in ("n/a", "null", "none"):
        raise _CoordError("MissingCoordinates")
    try:
        lat, lon = float(lat_raw), float(lon_raw)
    except ValueError:
        raise _CoordError("MalformedCoordinate", f"{lat_raw!r},{lon_raw!r}")
    try:
        return geo.validate_point(lat, lon)
    except ValueError as e:
        raise _CoordError("CoordinateOutOfRange", str(e))


PERSON_FIELDS = ["person_id", "name", "birth_date", "death_date",
                 "lat", "lon", "work_area", "discipline"]


def parse_persons(stream, fmt="csv", disciplines=DEFAULT_DISCIPLINES):
    """Parse person records; unknown disciplines and bad geocodes are rejected.

    A person whose birth coordinates fail validation is rejected entirely:
    every trajectory needs an origin.
    """
    result = ParseResult(records=[])
    for i, row in _rows(stream, fmt, PERSON_FIELDS):
        try:
            pid = (row.get("person_id") or "").strip()
            name = (row.get("name") or "").strip()
            if not pid:
                raise KeyError("missing person_id")
            try:
                point = _parse_coords(row)
            except _CoordError as e:
                result.rejections.append(Rejection(i, e.code, f"{pid} {e.detail}".strip()))
                continue
            discipline = (row.get("discipline") or "").strip()
            if discipline not in disciplines:
                result.rejections.append(Rejection(i, "UnknownDiscipline", f"{pid}: {discipline!r}"))
                continue
            birth = PartialDate.parse(row.get("birth_date") or "", allow_bare_year=True)
            death_raw = (row.get("death_date") or "").strip()
            death = PartialDate.parse(death_raw, allow_bare_year=True) if death_raw else None
            if death is not None and death.sort_key() < birth.sort_key():
                result.rejections.append(Rejection(i, "DeathBeforeBirth", pid))
                continue
            result.records.append(Person(
                person_id=pid, name=name, birth_date=birth, death_date=death,
                birth_point=point, work_area=(row.get("work_area") or "").strip(),
                discipline=discipline))
        except ValueError as e:
            result.rejections.append(Rejection(i, "BadDate", str(e)))
        except KeyError as e:
            result.rejections.append(Rejection(i, "MissingField", str(e)))
    return result


FOOTSTEP_FIELDS = ["person_id", "date", "place", "lat", "lon",
                   "predicate", "resource", "place_frame", "resource_frame"]


def parse_footsteps(stream, fmt="csv"):
    """Parse movement records into (person_id, Footstep) pairs.

    The footstep kind comes from the resource-frame column: "Birth" and
    "Death" map to those kinds, anything else is an in-life movement.
    Records lacking coordinates are discarded (rejected), as are malformed
    dates.
    """
    result = ParseResult(records=[])
    for i, row in _rows(stream, fmt, FOOTSTEP_FIELDS):
        try:
            pid = (row.get("person_id") or "").strip()
            if not pid:
                raise KeyError("missing person_id")
            try:
                point = _parse_coords(row)
            except _CoordError as e:
                result.rejections.append(Rejection(i, e.code, f"{pid} {e.detail}".strip()))
                continue
            date = PartialDate.parse(row.get("date") or "")
            frame = (row.get("resource_frame") or "").strip()
            kind = frame if frame in ("Birth", "Death") else "InLife"
            predicate = (row.get("predicate") or "").strip() or None
            if predicate and predicate.lower() == "null":
                predicate = None
            resource = (row.get("resource") or "").strip()
            if kind == "Birth" and resource not in BIRTH_RESOURCES:
                result.rejections.append(Rejection(i, "InvalidBirthResource", f"{pid}: {resource!r}"))
                continue
            if kind == "InLife" and predicate is None:
                result.rejections.append(Rejection(i, "MissingPredicate", pid))
                continue
            result.records.append((pid, Footstep(
                date=date, place_name=(row.get("place") or "").strip(),
                point=point, kind=kind, predicate=predicate, resource=resource)))
        except ValueError as e:
            result.rejections.append(Rejection(i, "BadDate", str(e)))
        except KeyError as e:
            result.rejections.append(Rejection(i, "MissingField", str(e)))
    return result


CITY_FIELDS = ["city_id", "name", "lat", "lon", "population"]


def parse_cities(stream, fmt="csv"):
    """Parse the reference city table. Returns (CityTable, ParseResult).

    Later rows that collide with an accepted one (same city_id or identical
    coordinates) are rejected, keeping the CityTable invariants intact.
    """
    result = ParseResult(records=[])
    seen_ids, seen_coords = set(), set()
    for i, row in _rows(stream, fmt, CITY_FIELDS):
        try:
            cid = (row.get("city_id") or "").strip()
            if not cid:
                raise KeyError("missing city_id")
            try:
                point = _parse_coords(row)
            except _CoordError as e:
                result.rejections.append(Rejection(i, e.code, f"{cid} {e.detail}".strip()))
                continue
            if cid in seen_ids:
                result.rejections.append(Rejection(i, "DuplicateCityId", cid))
                continue
            if point in seen_coords:
                result.rejections.append(Rejection(i, "DuplicateCoordinates", cid))
                continue
            pop = float((row.get("population") or "").strip())
            if not pop > 0:
                result.rejections.append(Rejection(i, "NonpositivePopulation", cid))
                continue
            seen_ids.add(cid)
            seen_coords.add(point)
            result.records.append(City(cid, (row.get("name") or "").strip(), point, pop))
        except (ValueError, KeyError) as e:
            result.rejections.append(Rejection(i, "BadRecord", str(e)))
    return CityTable(result.records), result


def build_trajectories(persons, footstep_pairs):
    """Group footsteps by person into date-ordered trajectories.

    Footsteps of unknown persons are dropped (counted in the returned
    anomaly list), as are whole trajectories violating the one-Birth /
    one-Death ordering invariants. Date ties keep input order (stable sort).
    """
    known = {p.person_id for p in persons}
    grouped = {p.person_id: [] for p in persons}
    anomalies = []
    for pid, fs in footstep_pairs:
        if pid not in known:
            anomalies.append(("UnknownPerson", pid))
            continue
        grouped[pid].append(fs)
    trajectories = []
    for p in persons:
        steps = sorted(grouped[p.person_id], key=lambda f: f.date.sort_key())
        births = [k for k, f in enumerate(steps) if f.kind == "Birth"]
        deaths = [k for k, f in enumerate(steps) if f.kind == "Death"]
        if len(births) > 1 or len(deaths) > 1:
            anomalies.append(("DuplicateBirthDeath", p.person_id))
            continue
        if births and births[0] != 0:
            anomalies.append(("BirthNotFirst", p.person_id))
            continue
        if deaths and deaths[0] != len(steps) - 1:
            anomalies.append(("DeathNotLast", p.person_id))
            continue
        trajectories.append(Trajectory(person_id=p.person_id, footsteps=steps))
    return trajectories, anomalies


def filter_active(persons, trajectories, window, min_age_at_end=20):
    """Keep persons active within [year_start, year_end] and their in-window
    footsteps.

    Active: born at least min_age_at_end years before the window end, and
    alive at some point inside the window. The movement set keeps only
    footsteps whose year falls in the window; Birth/Death footsteps outside
    it are dropped, with the birth coordinates preserved as the trajectory's
    origin metadata. Idempotent, never fails.
    """
    y0, y1 = int(window[0]), int(window[1])
    if y0 > y1:
        raise ValueError(f"window not ordered: {window}")
    if min_age_at_end < 0:
        raise ValueError("min_age_at_end must be >= 0")
    by_pid = {t.person_id: t for t in trajectories}
    persons_out, trajs_out = [], []
    for p in persons:
        if p.birth_date.year > y1 - min_age_at_end:
            continue
        if p.death_date is not None and p.death_date.year < y0:
            continue
        persons_out.append(p)
        t = by_pid.get(p.person_id)
        steps = [f for f in (t.footsteps if t else []) if y0 <= f.date.year <= y1]
        trajs_out.append(Trajectory(person_id=p.person_id, footsteps=steps,
                                    origin_point=p.birth_point))
    return persons_out, trajs_out


def serialize_persons(persons, stream):
    w = csv.writer(stream)
    w.writerow(PERSON_FIELDS)
    for p in persons:
        w.writerow([p.person_id, p.name, str(p.birth_date),
                    str(p.death_date) if p.death_date else "",
                    repr(p.birth_point[0]), repr(p.birth_point[1]),
                    p.work_area, p.discipline])


def serialize_footsteps(pairs, stream):
    w = csv.writer(stream)
    w.writerow(FOOTSTEP_FIELDS)
    for pid, f in pairs:
        w.writerow([pid, str(f.date), f.place_name,
                    repr(f.point[0]), repr(f.point[1]),
                    f.predicate or "null", f.resource, "", f.kind if f.kind != "InLife" else "Motion"])


def read_text(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return io.StringIO(fh.read())
