"""Command-line entry points.

    radiant pipeline --config run.toml [overrides]
    radiant network  --persons P --footsteps F --cities C --window 1900:1950
    radiant pagerank --persons P --footsteps F --cities C --window 1900:1925
    radiant heaps    --persons P --footsteps F --cities C --kind inlife

Exit codes: 0 success, 2 config error, 3 input error, 4 numerical error.
All randomness flows from the single config seed; flags override config
keys. RADIANT_THREADS is the fallback for --threads.
"""

import argparse
import json
import os
import sys

from . import ingest, netbuild, pipeline, sim, stats

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_NUMERICAL = 4


class ConfigError(Exception):
    pass


def _parse_window(text):
    try:
        y0, y1 = text.split(":")
        y0, y1 = int(y0), int(y1)
    except ValueError:
        raise ConfigError(f"window must be Y0:Y1, got {text!r}")
    if y0 > y1:
        raise ConfigError(f"window not ordered: {text!r}")
    return (y0, y1)


def _load_config_file(path):
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "rb") as fh:
        raw = fh.read()
    if path.lower().endswith(".json"):
        try:
            return json.loads(raw.decode("utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"bad JSON config: {e}")
    try:
        import tomllib as toml
    except ImportError:
        import tomli as toml
    try:
        return toml.loads(raw.decode("utf-8"))
    except toml.TOMLDecodeError as e:
        raise ConfigError(f"bad TOML config: {e}")


def _default_threads():
    env = os.environ.get("RADIANT_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise ConfigError(f"RADIANT_THREADS is not an integer: {env!r}")


def _build_run_config(args):
    rc = {}
    if args.config:
        rc.update(_load_config_file(args.config))
    overrides = {
        "persons": args.persons, "footsteps": args.footsteps, "cities": args.cities,
        "outdir": args.outdir, "walkers": args.walkers, "replicates": args.replicates,
        "trip_p": args.trip_p, "seed": args.seed, "min_age": args.min_age,
        "km_bins": args.km_bins, "km_max": args.km_max, "threads": args.threads,
    }
    for key, val in overrides.items():
        if val is not None:
            rc[key] = val
    if args.window:
        rc["window"] = list(_parse_window(args.window))
    if args.models:
        rc["models"] = [m.strip() for m in args.models.split(",") if m.strip()]
    if args.dump_trajectories:
        rc["dump_trajectories"] = True

    for key in ("persons", "footsteps", "cities", "window", "outdir"):
        if key not in rc:
            raise ConfigError(f"missing config key: {key}")
    if not isinstance(rc["window"], (list, tuple)) or len(rc["window"]) != 2 \
            or int(rc["window"][0]) > int(rc["window"][1]):
        raise ConfigError(f"bad window: {rc['window']!r}")
    rc.setdefault("models", list(pipeline.BENCHMARK_MODELS))
    if not rc["models"]:
        raise ConfigError("empty model selection")
    unknown = [m for m in rc["models"] if m not in pipeline.MODEL_NAMES]
    if unknown:
        raise ConfigError(f"unknown models {unknown}; valid: {list(pipeline.MODEL_NAMES)}")
    for path_key in ("persons", "footsteps", "cities"):
        if not os.path.exists(rc[path_key]):
            raise pipeline.InputError(f"input file not found: {rc[path_key]}")
    if "threads" not in rc:
        rc["threads"] = _default_threads()
    return rc


def _prepare_from_args(args):
    window = _parse_window(args.window)
    persons_res, footsteps_res, cities, _ = pipeline.load_inputs(
        args.persons, args.footsteps, args.cities)
    prepared = pipeline.prepare(persons_res, footsteps_res, cities,
                                window, args.min_age)
    return prepared, window


def cmd_pipeline(args):
    rc = _build_run_config(args)
    rows = pipeline.run_pipeline(rc)
    print(f"wrote {len(rows)} summary rows for {len(rc['models'])} models "
          f"to {rc['outdir']}")
    return EXIT_OK


def cmd_network(args):
    prepared, window = _prepare_from_args(args)
    net = netbuild.build_network(prepared.city_trajectories, window,
                                 discipline=args.discipline)
    out = args.output or "network.csv"
    pipeline.write_network_csv(net, out)
    print(f"{len(net.edges)} edges, total weight {net.total_weight} -> {out}")
    return EXIT_OK


def cmd_pagerank(args):
    prepared, window = _prepare_from_args(args)
    net = netbuild.build_network(prepared.city_trajectories, window,
                                 discipline=args.discipline)
    scores = netbuild.pagerank(net, damping=args.damping, tol=args.tol)
    out = args.output or "pagerank.csv"
    pipeline.write_pagerank_csv(scores, window, out)
    print(f"{len(scores)} cities ranked -> {out}")
    return EXIT_OK


KIND_BY_FLAG = {"birth": "Birth", "death": "Death", "inlife": "InLife"}


def cmd_heaps(args):
    prepared, _window = _prepare_from_args(args)
    kind = KIND_BY_FLAG[args.kind]
    events = netbuild.event_stream(prepared.city_trajectories, kind)
    fit = netbuild.heaps_fit(events, kind=kind)
    out = args.output or "heaps.json"
    pipeline.write_json({
        "kind": fit.kind, "alpha": fit.alpha, "stderr": fit.stderr,
        "events": int(fit.n_events.size),
        "distinct_cities": int(fit.s_values[-1]),
        "curve_n": [int(v) for v in fit.n_events],
        "curve_s": [int(v) for v in fit.s_values],
    }, out)
    print(f"{args.kind}: alpha = {fit.alpha:.4f} +/- {fit.stderr:.4f} -> {out}")
    return EXIT_OK


def _add_input_flags(p, require=True):
    p.add_argument("--persons", required=require, help="persons CSV/JSON path")
    p.add_argument("--footsteps", required=require, help="footsteps CSV/JSON path")
    p.add_argument("--cities", required=require, help="city table CSV/JSON path")
    p.add_argument("--window", required=require, help="time window as Y0:Y1")
    p.add_argument("--min-age", dest="min_age", type=int, default=20,
                   help="minimum age at window end to count as active")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="radiant",
        description="Migration networks of notable people and radiation-model "
                    "simulations of their mobility.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pipeline", help="run the full model-comparison pipeline")
    p.add_argument("--config", help="TOML or JSON run configuration")
    _add_input_flags(p, require=False)
    p.set_defaults(min_age=None)
    p.add_argument("--outdir", help="artifact output directory")
    p.add_argument("--models", help="comma-separated model names "
                                    f"(default: {','.join(pipeline.BENCHMARK_MODELS)})")
    p.add_argument("--walkers", type=int, help="walkers per replicate")
    p.add_argument("--replicates", type=int, help="number of replicates")
    p.add_argument("--trip-p", dest="trip_p", type=float,
                   help="geometric trip-count parameter")
    p.add_argument("--seed", type=int, help="master RNG seed")
    p.add_argument("--km-bins", dest="km_bins", type=int, help="kilometer bins")
    p.add_argument("--km-max", dest="km_max", type=float, help="kilometer bin range")
    p.add_argument("--threads", type=int,
                   help="replicate parallelism (env RADIANT_THREADS)")
    p.add_argument("--dump-trajectories", action="store_true",
                   help="also write per-walker trajectory CSVs")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("network", help="export the migration edge list")
    _add_input_flags(p)
    p.add_argument("--discipline", help="restrict to one discipline")
    p.add_argument("-o", "--output", help="output CSV path")
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("pagerank", help="rank cities by PageRank centrality")
    _add_input_flags(p)
    p.add_argument("--discipline", help="restrict to one discipline")
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("-o", "--output", help="output CSV path")
    p.set_defaults(func=cmd_pagerank)

    p = sub.add_parser("heaps", help="fit the exploration (Heaps) exponent")
    _add_input_flags(p)
    p.add_argument("--kind", choices=sorted(KIND_BY_FLAG), default="inlife")
    p.add_argument("-o", "--output", help="output JSON path")
    p.set_defaults(func=cmd_heaps)
    return parser


def _report(category, e):
    # module + exception class give the machine-readable error code
    module = type(e).__module__.rsplit(".", 1)[-1]
    print(f"{category} error [{module}.{type(e).__name__}]: {e}", file=sys.stderr)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as e:
        _report("config", e)
        return EXIT_CONFIG
    except (pipeline.InputError, ingest.IngestError, sim.EmptyLevelSupportError) as e:
        _report("input", e)
        return EXIT_INPUT
    except (netbuild.ConvergenceError, netbuild.DegenerateHeapsError,
            stats.MismatchedBinsError, stats.DegenerateDistributionError,
            FloatingPointError) as e:
        _report("numerical", e)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
