import io
import json

import pytest

from radiant import ingest

PERSONS_CSV = """person_id,name,birth_date,death_date,lat,lon,work_area,discipline
P1,Les P.,19150000,20091231,43.0117,-88.2317,Music,Arts
P2,Anna Q.,1890,1960,48.2,16.4,Math,Science and Technology
P3,Bad Lat,19000000,,91.0,0.0,Music,Arts
P4,No Disc,19000000,,40.0,0.0,Alchemy,Alchemy
P5,Time Err,19000000,18990000,40.0,0.0,Music,Arts
"""

FOOTSTEPS_CSV = """person_id,date,place,lat,lon,predicate,resource,place_frame,resource_frame
P1,19150000,Waukesha,43.0117,-88.2317,null,pantheon,null,Birth
P1,19340000,Chicago,41.8369,-87.6847,moved,FrameNet,@Goal,Motion
P1,20091231,White Plains,41.0400,-73.7786,null,dbpedia,null,Death
P2,19230000,nowhere,n/a,-74.0,moved,FrameNet,@Goal,Motion
P2,1921000,short,41.0,-74.0,moved,FrameNet,@Goal,Motion
P2,19250000,quiet,41.0,-74.0,null,FrameNet,@Goal,Motion
"""


def parse_persons(text=PERSONS_CSV, fmt="csv"):
    return ingest.parse_persons(io.StringIO(text), fmt)


def parse_footsteps(text=FOOTSTEPS_CSV, fmt="csv"):
    return ingest.parse_footsteps(io.StringIO(text), fmt)


class TestPartialDate:
    def test_unknown_month_sorts_midyear(self):
        d = ingest.PartialDate.parse("19340000")
        assert (d.year, d.month, d.day) == (1934, 0, 0)
        assert d.sort_key() == (1934, 7, 1)

    def test_unknown_day_sorts_midmonth(self):
        assert ingest.PartialDate.parse("19340500").sort_key() == (1934, 5, 15)

    def test_full_date(self):
        d = ingest.PartialDate.parse("20091231")
        assert d.sort_key() == (2009, 12, 31)
        assert str(d) == "20091231"

    @pytest.mark.parametrize("raw", ["1921000", "193400000", "abcd0101",
                                     "00000000", "21010101", "19341301",
                                     "19340231", "19340015"])
    def test_rejects_malformed(self, raw):
        with pytest.raises(ValueError):
            ingest.PartialDate.parse(raw)

    def test_bare_year_only_when_allowed(self):
        assert ingest.PartialDate.parse("1890", allow_bare_year=True).year == 1890
        with pytest.raises(ValueError):
            ingest.PartialDate.parse("1890")


class TestParsePersons:
    def test_accepts_and_rejects(self):
        res = parse_persons()
        assert [p.person_id for p in res.records] == ["P1", "P2"]
        codes = {r.code for r in res.rejections}
        assert codes == {"CoordinateOutOfRange", "UnknownDiscipline", "DeathBeforeBirth"}

    def test_table_person_fields(self):
        p = parse_persons().records[0]
        assert p.birth_point == (43.0117, -88.2317)
        assert p.birth_date.year == 1915
        assert p.death_date.year == 2009
        assert p.discipline == "Arts"

    def test_count_conservation(self):
        res = parse_persons()
        assert len(res.records) + len(res.rejections) == 5
        assert res.summary()["input"] == 5

    def test_empty_stream(self):
        res = parse_persons("person_id,name,birth_date,death_date,lat,lon,work_area,discipline\n")
        assert res.records == [] and res.rejections == []

    def test_json_format(self):
        data = [{"person_id": "P9", "name": "J", "birth_date": "1900",
                 "death_date": None, "lat": 10.0, "lon": 20.0,
                 "work_area": "Music", "discipline": "Arts"}]
        res = parse_persons(json.dumps(data), fmt="json")
        assert res.records[0].person_id == "P9"
        assert res.records[0].death_date is None

    def test_extension_disciplines(self):
        extra = ingest.DEFAULT_DISCIPLINES | {"Alchemy"}
        res = ingest.parse_persons(io.StringIO(PERSONS_CSV), "csv", disciplines=extra)
        assert "P4" in [p.person_id for p in res.records]

    def test_missing_column_fails_stream(self):
        with pytest.raises(ingest.IngestError):
            parse_persons("person_id,name\nP1,x\n")


class TestParseFootsteps:
    def test_kinds_from_resource_frame(self):
        res = parse_footsteps()
        kinds = [(pid, f.kind) for pid, f in res.records]
        assert ("P1", "Birth") in kinds
        assert ("P1", "InLife") in kinds
        assert ("P1", "Death") in kinds

    def test_table_rows(self):
        res = parse_footsteps()
        inlife = [f for pid, f in res.records if pid == "P1" and f.kind == "InLife"][0]
        assert inlife.date.year == 1934
        assert inlife.place_name == "Chicago"
        assert inlife.predicate == "moved"
        death = [f for pid, f in res.records if f.kind == "Death"][0]
        assert death.date.as_int() == 20091231
        assert death.predicate is None
        assert death.resource == "dbpedia"

    def test_rejections(self):
        res = parse_footsteps()
        codes = sorted(r.code for r in res.rejections)
        assert codes == ["BadDate", "MissingCoordinates", "MissingPredicate"]
        assert len(res.records) + len(res.rejections) == 6

    def test_rejection_carries_line(self):
        res = parse_footsteps()
        missing = [r for r in res.rejections if r.code == "MissingCoordinates"][0]
        assert missing.line == 5   # header is line 1

    def test_birth_resource_rule(self):
        bad = ("person_id,date,place,lat,lon,predicate,resource,place_frame,resource_frame\n"
               "P1,19000000,x,1.0,1.0,null,FrameNet,null,Birth\n")
        res = parse_footsteps(bad)
        assert res.rejections[0].code == "InvalidBirthResource"


class TestTrajectories:
    def test_build_orders_by_date(self):
        persons = parse_persons().records
        pairs = parse_footsteps().records
        trajs, anomalies = ingest.build_trajectories(persons, pairs)
        p1 = [t for t in trajs if t.person_id == "P1"][0]
        assert [f.kind for f in p1.footsteps] == ["Birth", "InLife", "Death"]
        assert anomalies == []

    def test_duplicate_birth_rejected(self):
        persons = parse_persons().records
        fs = ingest.Footstep(ingest.PartialDate.parse("19200000"), "x", (1.0, 1.0),
                             "Birth", None, "pantheon")
        trajs, anomalies = ingest.build_trajectories(persons, [("P1", fs), ("P1", fs)])
        assert ("DuplicateBirthDeath", "P1") in anomalies
        assert all(t.person_id != "P1" for t in trajs)

    def test_nondecreasing_dates(self):
        persons = parse_persons().records
        pairs = parse_footsteps().records
        trajs, _ = ingest.build_trajectories(persons, pairs)
        for t in trajs:
            keys = [f.date.sort_key() for f in t.footsteps]
            assert keys == sorted(keys)


class TestFilterActive:
    def make(self, birth, death, steps):
        person = ingest.Person("X", "X", ingest.PartialDate(birth),
                               ingest.PartialDate(death) if death else None,
                               (40.0, -74.0), "Music", "Arts")
        fs = [ingest.Footstep(ingest.PartialDate(y), "p", (40.0, -74.0), k, "m" if k == "InLife" else None,
                              "FrameNet" if k == "InLife" else "dbpedia")
              for y, k in steps]
        traj = ingest.Trajectory("X", fs)
        return [person], [traj]

    def test_too_young_excluded(self):
        persons, trajs = self.make(1935, 2001, [(1935, "Birth")])
        out_p, out_t = ingest.filter_active(persons, trajs, (1900, 1950), 20)
        assert out_p == [] and out_t == []

    def test_table_person_included_death_dropped(self):
        persons, trajs = self.make(1915, 2009, [(1915, "Birth"), (1934, "InLife"), (2009, "Death")])
        out_p, out_t = ingest.filter_active(persons, trajs, (1900, 1950), 20)
        assert len(out_p) == 1
        kinds = [f.kind for f in out_t[0].footsteps]
        assert kinds == ["Birth", "InLife"]
        assert out_t[0].origin_point == (40.0, -74.0)

    def test_dead_before_window_excluded(self):
        persons, trajs = self.make(1820, 1895, [(1820, "Birth")])
        out_p, _ = ingest.filter_active(persons, trajs, (1900, 1950), 20)
        assert out_p == []

    def test_alive_into_window_kept(self):
        persons, trajs = self.make(1880, 1905, [(1880, "Birth"), (1902, "InLife")])
        out_p, out_t = ingest.filter_active(persons, trajs, (1900, 1950), 20)
        assert len(out_p) == 1
        assert [f.date.year for f in out_t[0].footsteps] == [1902]

    def test_idempotent(self):
        persons = parse_persons().records
        pairs = parse_footsteps().records
        trajs, _ = ingest.build_trajectories(persons, pairs)
        once = ingest.filter_active(persons, trajs, (1900, 1950), 20)
        twice = ingest.filter_active(once[0], once[1], (1900, 1950), 20)
        assert once[0] == twice[0]
        assert [t.footsteps for t in once[1]] == [t.footsteps for t in twice[1]]

    def test_bad_window(self):
        with pytest.raises(ValueError):
            ingest.filter_active([], [], (1950, 1900), 20)


class TestRoundTrip:
    def test_persons(self):
        res = parse_persons()
        buf = io.StringIO()
        ingest.serialize_persons(res.records, buf)
        buf.seek(0)
        again = ingest.parse_persons(buf, "csv")
        assert again.records == res.records
        assert again.rejections == []

    def test_footsteps(self):
        res = parse_footsteps()
        buf = io.StringIO()
        ingest.serialize_footsteps(res.records, buf)
        buf.seek(0)
        again = ingest.parse_footsteps(buf, "csv")
        assert again.records == res.records


class TestParseCities:
    CSV = """city_id,name,lat,lon,population
C1,Alpha,40.0,-74.0,1000000
C2,Beta,41.0,-87.0,500000
C1,AlphaDup,42.0,-90.0,100
C3,SamePlace,40.0,-74.0,200
C4,Empty,43.0,-75.0,0
"""

    def test_collisions_rejected(self):
        table, res = ingest.parse_cities(io.StringIO(self.CSV))
        assert table.ids == ["C1", "C2"]
        codes = sorted(r.code for r in res.rejections)
        assert codes == ["DuplicateCityId", "DuplicateCoordinates", "NonpositivePopulation"]
        assert res.n_input == 5

    def test_table_accessors(self):
        table, _ = ingest.parse_cities(io.StringIO(self.CSV))
        assert list(table.populations) == [1000000.0, 500000.0]
        assert table.by_id["C2"].point == (41.0, -87.0)
