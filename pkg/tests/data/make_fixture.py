"""Deterministically regenerate the bundled synthetic dataset.

Run from the repository root:

    python tests/data/make_fixture.py

The world has two continental clusters plus an isolated southern city, so
jump lengths are bimodal (intra-cluster vs overseas). The person table
includes records that exercise the filter rules (too young, dead before the
window) and the rejection paths (unknown discipline, out-of-range latitude);
the footstep table includes month-unknown dates, pre-window and post-window
events, and two malformed rows (missing coordinate, 7-digit date).
"""

import csv
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))

CITIES = [
    # city_id, name, lat, lon, population (two clusters + one remote)
    ("C01", "Westport",    40.9, -74.2, 4_500_000),
    ("C02", "Lakeshore",   42.1, -87.9, 2_800_000),
    ("C03", "Milltown",    41.4, -81.6,   900_000),
    ("C04", "Harborfield", 39.2, -76.7, 1_200_000),
    ("C05", "Northgate",   44.9, -93.2,   500_000),
    ("C06", "Pinebluff",   36.2, -86.8,   300_000),
    ("C07", "Altaview",    51.5,  -0.2, 5_200_000),
    ("C08", "Riverstadt",  52.5,  13.4, 3_900_000),
    ("C09", "Seebruck",    48.2,  16.4, 1_900_000),
    ("C10", "Collina",     45.5,   9.2, 1_100_000),
    ("C11", "Puertomar",   40.4,  -3.7, 1_000_000),
    ("C12", "Fjordby",     59.9,  10.8,   400_000),
    ("C13", "Steinfeld",   50.1,   8.7,   600_000),
    ("C14", "Valleray",    48.9,   2.3, 4_100_000),
    ("C15", "Sulport",    -33.9,  18.4,   700_000),
]

DISCIPLINES = ["Arts", "Science and Technology", "Humanities", "Institutions"]
WORK_AREAS = {
    "Arts": "Music",
    "Science and Technology": "Natural Sciences",
    "Humanities": "Language",
    "Institutions": "Government",
}

WEST = ["C01", "C02", "C03", "C04", "C05", "C06"]
EAST = ["C07", "C08", "C09", "C10", "C11", "C12", "C13", "C14"]


def jitter(rng, lat, lon, scale=0.35):
    return round(lat + rng.normal(0, scale), 4), round(lon + rng.normal(0, scale), 4)


def main():
    rng = np.random.default_rng(20240711)
    coords = {cid: (lat, lon) for cid, _n, lat, lon, _p in CITIES}

    persons, footsteps = [], []

    def add_person(pid, name, birth_year, death_year, home, discipline,
                   n_moves, overseas=False):
        lat, lon = jitter(rng, *coords[home])
        persons.append([pid, name, f"{birth_year}0000",
                        f"{death_year}0000" if death_year else "",
                        lat, lon, WORK_AREAS[discipline], discipline])
        footsteps.append([pid, f"{birth_year}0000", f"{home} area", lat, lon,
                          "null", "pantheon", "null", "Birth"])
        last_year = max(birth_year + 18, 1896)
        cluster = WEST if home in WEST else EAST
        other = EAST if cluster is WEST else WEST
        end = min(death_year, 1954) if death_year else 1954
        cur = home
        for m in range(n_moves):
            span = max(end - last_year - 1, 2)
            last_year = last_year + 1 + int(rng.integers(0, min(span, 9)))
            if last_year > 1960:
                break
            hop_overseas = overseas and m == n_moves // 2
            pool = other if hop_overseas else cluster
            dest = pool[int(rng.integers(0, len(pool)))]
            if dest == cur:
                dest = pool[(pool.index(dest) + 1) % len(pool)]
            dlat, dlon = jitter(rng, *coords[dest])
            month = int(rng.integers(0, 13))
            date = f"{last_year}{month:02d}15" if month else f"{last_year}0000"
            verb = "emigrated" if hop_overseas else "moved"
            footsteps.append([pid, date, f"{dest} area", dlat, dlon,
                              verb, "FrameNet", "@Goal", "Motion"])
            if hop_overseas:
                cluster, other = other, cluster
            cur = dest
        if death_year:
            dlat, dlon = jitter(rng, *coords[cur], scale=0.15)
            footsteps.append([pid, f"{death_year}1103", f"{cur} area", dlat, dlon,
                              "null", "dbpedia", "null", "Death"])

    names = ["Adler", "Barros", "Cervenka", "Duval", "Eriksen", "Fontaine",
             "Grieg", "Hartmann", "Ibarra", "Jelinek", "Kovacs", "Lindgren",
             "Moreau", "Novak", "Olsen", "Petrova", "Quist", "Rossi",
             "Salgado", "Tanaka", "Ueda", "Vogel", "Weiss", "Ximenez",
             "Ypsilanti", "Zander", "Arnesen", "Bellini", "Castell", "Dvorak",
             "Egede", "Falk", "Gruber", "Holst", "Ivanov", "Jansen",
             "Keller", "Larsen", "Meyer", "Nielsen", "Oberg", "Paulsen",
             "Quintana", "Ruiz", "Sandberg", "Thorne"]

    homes = WEST + EAST
    k = 0
    for i, name in enumerate(names):
        pid = f"P{i + 1:03d}"
        birth = 1862 + int(rng.integers(0, 64))      # 1862..1925
        lifespan = 45 + int(rng.integers(0, 45))
        death = birth + lifespan if rng.random() < 0.85 else None
        home = homes[k % len(homes)]
        k += 1
        disc = DISCIPLINES[i % len(DISCIPLINES)]
        n_moves = 1 + int(rng.integers(0, 6))
        overseas = rng.random() < 0.45
        add_person(pid, f"{name} {chr(65 + i % 26)}.", birth, death, home,
                   disc, n_moves, overseas=overseas)

    # filter fodder: too young at window end, dead before the window
    add_person("P901", "Young T.", 1935, 2001, "C02", "Arts", 3)
    add_person("P902", "Elder V.", 1820, 1895, "C09", "Humanities", 2)
    # rejection fodder
    persons.append(["P903", "Lost W.", "18900000", "", 91.0, 10.0,
                    "Music", "Arts"])                       # latitude out of range
    persons.append(["P904", "Stray X.", "18880000", "", 44.0, 11.0,
                    "Alchemy", "Alchemy"])                  # unknown discipline
    footsteps.append(["P001", "1921000", "bad date", 41.0, -74.0,
                      "moved", "FrameNet", "@Goal", "Motion"])   # 7-digit date
    footsteps.append(["P002", "19230000", "nowhere", "n/a", "-74.0",
                      "moved", "FrameNet", "@Goal", "Motion"])   # missing coords

    with open(os.path.join(HERE, "cities.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["city_id", "name", "lat", "lon", "population"])
        w.writerows(CITIES)
    with open(os.path.join(HERE, "persons.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["person_id", "name", "birth_date", "death_date",
                    "lat", "lon", "work_area", "discipline"])
        w.writerows(persons)
    with open(os.path.join(HERE, "footsteps.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["person_id", "date", "place", "lat", "lon",
                    "predicate", "resource", "place_frame", "resource_frame"])
        w.writerows(footsteps)
    print(f"{len(CITIES)} cities, {len(persons)} person rows, "
          f"{len(footsteps)} footstep rows")


if __name__ == "__main__":
    main()
