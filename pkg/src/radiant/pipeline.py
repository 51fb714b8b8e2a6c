"""End-to-end orchestration: inputs -> filtered trajectories -> city
assignment -> model kernels -> simulated ensembles -> comparison reports.

All artifacts are plain CSV/JSON/binary files whose bytes depend only on
(inputs, config, seed): floats are rendered with repr (shortest round-trip)
and JSON keys are sorted, so identical runs are byte-identical at any
thread count.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import geo, ingest, netbuild, radiation, sim, stats

MODEL_NAMES = (
    "uniform-single", "uniform-multi",
    "pop-single", "pop-multi",
    "notable-single", "notable-multi",
    "pop-notable-single", "pop-notable-multi",
)

BENCHMARK_MODELS = ("uniform-single", "notable-single", "notable-multi",
                 "pop-multi", "pop-notable-multi")

STATISTICS = ("radius_of_gyration", "different_destinations", "jump_length")


class InputError(Exception):
    """Unusable input files (missing, empty, or unparseable)."""


def _fmt(path):
    return "json" if str(path).lower().endswith(".json") else "csv"


def load_inputs(persons_path, footsteps_path, cities_path,
                disciplines=ingest.DEFAULT_DISCIPLINES):
    """Parse the three input tables; raises InputError when a stream is
    empty or structurally broken."""
    for p in (persons_path, footsteps_path, cities_path):
        if not os.path.exists(p):
            raise InputError(f"input file not found: {p}")
    try:
        persons_res = ingest.parse_persons(ingest.read_text(persons_path),
                                           _fmt(persons_path), disciplines=disciplines)
        footsteps_res = ingest.parse_footsteps(ingest.read_text(footsteps_path),
                                               _fmt(footsteps_path))
        cities, cities_res = ingest.parse_cities(ingest.read_text(cities_path),
                                                 _fmt(cities_path))
    except ingest.IngestError as e:
        raise InputError(str(e))
    if footsteps_res.n_input == 0:
        raise InputError(f"EmptyInput: no footstep records in {footsteps_path}")
    if persons_res.n_input == 0:
        raise InputError(f"EmptyInput: no person records in {persons_path}")
    if len(cities) == 0:
        raise InputError(f"EmptyInput: no usable cities in {cities_path}")
    return persons_res, footsteps_res, cities, cities_res


@dataclass
class PreparedData:
    """Everything the models need, derived once from the filtered data."""
    persons: list
    trajectories: list             # filtered ingest.Trajectory
    cities: ingest.CityTable
    distances: geo.DistanceMatrix
    city_trajectories: list        # netbuild.CityTrajectory (in-window, assigned)
    sequences: list                # per person: list of city ids (movement set)
    visits_total: dict             # city_id -> in-window visit count
    visits_by_discipline: dict     # discipline -> {city_id -> count}
    ns_shares: dict                # discipline -> share of persons (level set only)
    far_assignments: int
    summary: dict = field(default_factory=dict)


def prepare(persons_res, footsteps_res, cities, window, min_age=20):
    persons = persons_res.records
    trajectories, anomalies = ingest.build_trajectories(persons, footsteps_res.records)
    persons_f, trajs_f = ingest.filter_active(persons, trajectories, window, min_age)
    if not persons_f:
        raise InputError("no persons remain after the activity filter")

    assigner = cities.assigner()
    discipline_of = {p.person_id: p.discipline for p in persons_f}
    city_trajs, sequences = [], []
    visits_total, visits_by_disc = {}, {}
    far = 0
    for p, t in zip(persons_f, trajs_f):
        steps, seq = [], []
        for f in t.footsteps:
            cid, dist = assigner.assign(f.point[0], f.point[1])
            if dist > geo.FAR_ASSIGNMENT_KM:
                far += 1
            steps.append(netbuild.CityStep(year=f.date.year, city_id=cid, kind=f.kind,
                                           sort_key=f.date.sort_key()))
            seq.append(cid)
            visits_total[cid] = visits_total.get(cid, 0) + 1
            disc_counts = visits_by_disc.setdefault(p.discipline, {})
            disc_counts[cid] = disc_counts.get(cid, 0) + 1
        origin_city = assigner.assign(t.origin_point[0], t.origin_point[1])[0] \
            if t.origin_point else None
        city_trajs.append(netbuild.CityTrajectory(
            person_id=p.person_id, discipline=discipline_of[p.person_id],
            steps=steps, origin_city=origin_city))
        sequences.append(seq)

    # notable shares over the disciplines that actually form levels
    # (at least one assigned in-window visit)
    person_counts = {}
    for p in persons_f:
        person_counts[p.discipline] = person_counts.get(p.discipline, 0) + 1
    level_disciplines = sorted(d for d in person_counts if visits_by_disc.get(d))
    total_level_persons = sum(person_counts[d] for d in level_disciplines)
    ns_shares = {d: person_counts[d] / total_level_persons for d in level_disciplines} \
        if total_level_persons else {}

    distances = geo.DistanceMatrix.build(cities.ids, cities.lats, cities.lons)
    n_movements = sum(len(s) for s in sequences)
    summary = {
        "persons": persons_res.summary(),
        "footsteps": footsteps_res.summary(),
        "trajectory_anomalies": sorted(f"{code}:{pid}" for code, pid in anomalies),
        "window": [int(window[0]), int(window[1])],
        "min_age_at_end": int(min_age),
        "active_persons": len(persons_f),
        "in_window_movements": n_movements,
        "distinct_assigned_cities": len(visits_total),
        "far_assignments_over_500km": far,
    }
    return PreparedData(
        persons=persons_f, trajectories=trajs_f, cities=cities,
        distances=distances, city_trajectories=city_trajs, sequences=sequences,
        visits_total=visits_total, visits_by_discipline=visits_by_disc,
        ns_shares=ns_shares, far_assignments=far, summary=summary)


def _attractiveness(mode, prepared, city_ids, discipline=None):
    pops = np.array([prepared.cities.by_id[c].population for c in city_ids])
    if discipline is None:
        visit_map = prepared.visits_total
    else:
        visit_map = prepared.visits_by_discipline.get(discipline, {})
    notables = np.array([visit_map.get(c, 0) for c in city_ids], dtype=float)
    if mode == "uniform":
        return radiation.Attractiveness.uniform(len(city_ids)), pops
    if mode == "pop":
        return radiation.Attractiveness.from_population(pops), pops
    if mode == "notable":
        return radiation.Attractiveness.from_notables(notables), pops
    if mode == "pop-notable":
        return radiation.Attractiveness.combined(pops, notables), pops
    raise ValueError(f"unknown attractiveness mode: {mode!r}")


def build_model(name, prepared):
    """Instantiate one of the eight named model configurations."""
    if name not in MODEL_NAMES:
        raise ValueError(f"unknown model {name!r}; expected one of {MODEL_NAMES}")
    mode, structure = name.rsplit("-", 1)
    if structure == "single":
        city_ids = sorted(prepared.visits_total)
        attr, pops = _attractiveness(mode, prepared, city_ids)
        level = radiation.Level(label="all", city_ids=city_ids, ns_share=1.0,
                                attractiveness=attr, populations=pops)
        level.build_kernel(prepared.distances)
        return radiation.MultilevelKernel(levels=[level])
    levels = []
    for disc in sorted(prepared.ns_shares):
        city_ids = sorted(prepared.visits_by_discipline[disc])
        attr, pops = _attractiveness(mode, prepared, city_ids, discipline=disc)
        level = radiation.Level(label=disc, city_ids=city_ids,
                                ns_share=prepared.ns_shares[disc],
                                attractiveness=attr, populations=pops)
        level.build_kernel(prepared.distances)
        levels.append(level)
    return radiation.MultilevelKernel(levels=levels)


def _coords(prepared):
    return {c.city_id: c.point for c in prepared.cities.cities}


def empirical_distributions(prepared, km_bins=stats.DEFAULT_KM_BINS,
                            km_max=stats.DEFAULT_KM_MAX, dest_max=None):
    seqs = [s for s in prepared.sequences if s]
    if not seqs:
        raise InputError("no in-window movements to compare against")
    return stats.distributions(seqs, _coords(prepared), km_bins=km_bins,
                               km_max=km_max, dest_max=dest_max)


def run_model(name, prepared, config, km_bins=stats.DEFAULT_KM_BINS,
              km_max=stats.DEFAULT_KM_MAX, threads=1, collect_trajectories=False):
    """Simulate one model and compare each replicate against the data.

    Returns (reports by statistic, replicate-mean model distributions,
    data distributions, optional trajectory rows). Distinct-destination
    bins are fixed by the empirical maximum; model counts beyond it clip
    into the top bin.
    """
    data_rg, data_dest, data_jump = empirical_distributions(
        prepared, km_bins=km_bins, km_max=km_max)
    dest_max = data_dest.edges.size - 1
    model = build_model(name, prepared)
    coords = _coords(prepared)

    rep_dists = {s: [] for s in STATISTICS}
    traj_rows = [] if collect_trajectories else None
    for r, replicate in enumerate(sim.iter_replicates(config, model, threads=threads)):
        seqs = [t.cities for t in replicate]
        rg, dest, jump = stats.distributions(seqs, coords, km_bins=km_bins,
                                             km_max=km_max, dest_max=dest_max)
        rep_dists["radius_of_gyration"].append(rg)
        rep_dists["different_destinations"].append(dest)
        rep_dists["jump_length"].append(jump)
        if collect_trajectories:
            for t in replicate:
                for step, cid in enumerate(t.cities):
                    traj_rows.append((r, t.walker, t.discipline, step, cid))

    data_by_stat = {"radius_of_gyration": data_rg,
                    "different_destinations": data_dest,
                    "jump_length": data_jump}
    reports, mean_dists = {}, {}
    for s in STATISTICS:
        reports[s] = stats.compare_replicates(s, name, data_by_stat[s], rep_dists[s])
        mean_density = np.mean([d.density for d in rep_dists[s]], axis=0)
        mean_dists[s] = stats.BinnedDistribution(
            edges=rep_dists[s][0].edges, density=mean_density,
            n_samples=sum(d.n_samples for d in rep_dists[s]))
    return reports, mean_dists, data_by_stat, model, traj_rows


def _f(x):
    return repr(float(x))


def write_distribution_csv(dist, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("bin_left,bin_right,density\n")
        for left, right, dens in zip(dist.edges[:-1], dist.edges[1:], dist.density):
            fh.write(f"{_f(left)},{_f(right)},{_f(dens)}\n")


def write_network_csv(net, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("src_city,dst_city,weight,discipline,window\n")
        win = f"{net.window[0]}:{net.window[1]}"
        disc = net.discipline or ""
        for s, d, w in net.edge_rows():
            fh.write(f"{s},{d},{w},{disc},{win}\n")


def write_pagerank_csv(scores, window, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("city,score,rank,window\n")
        win = f"{window[0]}:{window[1]}"
        for city, score, rank in netbuild.pagerank_rows(scores):
            fh.write(f"{city},{_f(score)},{rank},{win}\n")


def write_json(obj, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_pipeline(run_config):
    """Execute the full pipeline per a RunConfig-style dict; returns the
    summary rows written. See cli.py for the config schema."""
    rc = run_config
    outdir = rc["outdir"]
    os.makedirs(outdir, exist_ok=True)

    persons_res, footsteps_res, cities, cities_res = load_inputs(
        rc["persons"], rc["footsteps"], rc["cities"])
    prepared = prepare(persons_res, footsteps_res, cities,
                       rc["window"], rc.get("min_age", 20))
    prepared.summary["cities"] = cities_res.summary()
    write_json(prepared.summary, os.path.join(outdir, "ingest_summary.json"))

    config = sim.SimConfig(walkers=rc.get("walkers", 2000),
                           replicates=rc.get("replicates", 500),
                           trip_p=rc.get("trip_p", 0.5),
                           seed=rc.get("seed", 0))
    km_bins = rc.get("km_bins", stats.DEFAULT_KM_BINS)
    km_max = rc.get("km_max", stats.DEFAULT_KM_MAX)
    threads = rc.get("threads", 1)
    dump_traj = rc.get("dump_trajectories", False)

    summary_rows = []
    wrote_data_csvs = False
    for name in rc["models"]:
        reports, mean_dists, data_dists, model, traj_rows = run_model(
            name, prepared, config, km_bins=km_bins, km_max=km_max,
            threads=threads, collect_trajectories=dump_traj)
        if not wrote_data_csvs:
            for s in STATISTICS:
                write_distribution_csv(data_dists[s],
                                       os.path.join(outdir, f"data.{s}.csv"))
            wrote_data_csvs = True
        for level in model.levels:
            label = level.label.replace(" ", "_").replace("/", "_")
            radiation.dump_kernel(level.kernel,
                                  os.path.join(outdir, f"{name}.{label}.kernel.bin"))
        for s in STATISTICS:
            write_distribution_csv(mean_dists[s],
                                   os.path.join(outdir, f"{name}.{s}.csv"))
        write_json([reports[s].as_dict() for s in STATISTICS],
                   os.path.join(outdir, f"{name}.report.json"))
        if dump_traj:
            with open(os.path.join(outdir, f"{name}.trajectories.csv"),
                      "w", encoding="utf-8", newline="") as fh:
                fh.write("replicate,walker,discipline,step,city_id\n")
                for row in traj_rows:
                    fh.write(",".join(str(x) for x in row) + "\n")
        for s in STATISTICS:
            summary_rows.append(reports[s].as_dict())

    with open(os.path.join(outdir, "summary.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("model,statistic,adj_r2,adj_r2_se,pearson,p_value,kl,kl_se,"
                 "wasserstein,wasserstein_se\n")
        for row in summary_rows:
            fh.write(",".join([
                row["model"], row["statistic"],
                _f(row["adj_r2"]), _f(row["adj_r2_se"]),
                _f(row["pearson"]), _f(row["p_value"]),
                _f(row["kl"]), _f(row["kl_se"]),
                _f(row["wasserstein"]), _f(row["wasserstein_se"]),
            ]) + "\n")
    return summary_rows
