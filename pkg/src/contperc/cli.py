"""Command-line front end.

Every record written embeds the full run configuration, and identical
configurations produce identical bytes whatever ``--workers`` is set to.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from typing import Any, Sequence

import numpy as np

from contperc import bounds, cluster, exploration, percolation, rgg
from contperc.components import connected_components
from contperc.geometry import TorusBox
from contperc.seeding import SEED_ENV, check_seed, stream

METHOD_NAMES = {m.replace("_", "-"): m for m in cluster.METHODS}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    seed: int
    format: str = "json"
    output: str | None = None
    d: int | None = None
    t: int | None = None
    method: str | None = None
    measure: str | None = None
    radius: float | None = None
    L: float | None = None
    grid: tuple[float, ...] | None = None
    density: float | None = None
    trials: int | None = None
    theta: float | None = None
    mu: float | None = None
    n_list: tuple[int, ...] | None = None
    start: int | None = None
    selection: str | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("grid", "n_list"):
            if out[key] is not None:
                out[key] = list(out[key])
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        for key in ("grid", "n_list"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        return cls(**data)


def fmt_float(x: Any) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return "" if x is None else str(x)


def parse_grid(text: str) -> tuple[float, ...]:
    """``start:step:stop`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3:
            raise ValueError(f"grid must be start:step:stop, got {text!r}")
        start, step, stop = parts
        if not step > 0 or stop < start:
            raise ValueError(f"invalid grid {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 12) for i in range(count))
    return tuple(float(p) for p in text.split(",") if p.strip())


def parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(float(p)) for p in text.split(",") if p.strip())


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` (or ``key: value``) file; ``#`` starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":" if ":" in line else None
            if sep is None:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = line.split(sep, 1)
            values[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return values


# subcommand -> option -> (converter, default)
_OPTIONS: dict[str, dict[str, tuple[Any, Any]]] = {
    "coeff": {
        "d": (int, 2), "t": (int, 3), "method": (str, "closed-form"),
        "measure": (str, "sequential"), "trials": (int, 10**6),
    },
    "bound": {
        "d": (int, 2), "t": (int, 3), "method": (str, "closed-form"),
        "measure": (str, "sequential"), "trials": (int, 10**6),
    },
    "percolate": {
        "d": (int, 2), "L": (float, 32.0), "grid": (parse_grid, None), "trials": (int, 50),
        "radius": (float, 1.0), "theta": (float, 0.5),
    },
    "growth": {
        "d": (int, 2), "mu": (float, 2.0), "n_list": (parse_int_list, (1000, 10000, 100000)), "trials": (int, 20),
    },
    "explore": {
        "d": (int, 2), "density": (float, 1.0), "L": (float, 16.0), "radius": (float, 1.0),
        "start": (int, None), "selection": (str, "fifo"),
    },
    "degree": {
        "d": (int, 2), "density": (float, 1.0), "L": (float, 32.0), "radius": (float, 1.0),
    },
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contperc", description="Continuum percolation toolkit.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help=f"64-bit seed (falls back to ${SEED_ENV}, then 0)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
        p.add_argument("--workers", type=int, default=1, help="worker processes; never changes results")
        p.add_argument("--config", default=None, help="flat key = value file; flags override it")

    p = sub.add_parser("coeff", help="cluster coefficient C_t")
    p.add_argument("--d", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--method", choices=sorted(METHOD_NAMES))
    p.add_argument("--measure", choices=("sequential", "joint"))
    p.add_argument("--trials", type=int)
    common(p)

    p = sub.add_parser("bound", help="lower bounds on critical mean degree and density")
    p.add_argument("--d", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--method", choices=sorted(METHOD_NAMES))
    p.add_argument("--measure", choices=("sequential", "joint"))
    p.add_argument("--trials", type=int)
    common(p)

    p = sub.add_parser("percolate", help="largest-component and wrapping curves over a density grid")
    p.add_argument("--d", type=int)
    p.add_argument("--L", type=float)
    p.add_argument("--grid", type=parse_grid, help="start:step:stop or comma list")
    p.add_argument("--trials", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--theta", type=float)
    common(p)

    p = sub.add_parser("growth", help="largest component versus n below the t=3 bound")
    p.add_argument("--d", type=int)
    p.add_argument("--mu", type=float)
    p.add_argument("--n-list", dest="n_list", type=parse_int_list)
    p.add_argument("--trials", type=int)
    common(p)

    p = sub.add_parser("explore", help="active-saturated exploration trace")
    p.add_argument("--d", type=int)
    p.add_argument("--density", type=float)
    p.add_argument("--L", type=float)
    p.add_argument("--radius", type=float)
    p.add_argument("--start", type=int)
    p.add_argument("--selection", choices=("fifo", "random"))
    p.add_argument("--dump-graph", default=None, help="also write the sampled graph as an edge list")
    common(p)

    p = sub.add_parser("degree", help="degree distribution of a sampled graph")
    p.add_argument("--d", type=int)
    p.add_argument("--density", type=float)
    p.add_argument("--L", type=float)
    p.add_argument("--radius", type=float)
    p.add_argument("--dump-graph", default=None, help="also write the sampled graph as an edge list")
    common(p)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cmd = args.subcommand
    file_values = read_config_file(args.config) if args.config else {}
    known = set(_OPTIONS[cmd]) | {"seed", "format", "output", "workers"}
    unknown = set(file_values) - known
    if unknown:
        raise ValueError(f"unknown keys in config file: {', '.join(sorted(unknown))}")

    values: dict[str, Any] = {}
    for name, (conv, default) in _OPTIONS[cmd].items():
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
        elif name in file_values:
            values[name] = conv(file_values[name])
        else:
            values[name] = default
    if "method" in values:
        if values["method"] not in METHOD_NAMES:
            raise ValueError(f"unknown method {values['method']!r}")
        values["method"] = METHOD_NAMES[values["method"]]

    if args.seed is not None:
        seed = args.seed
    elif "seed" in file_values:
        seed = int(file_values["seed"])
    elif os.environ.get(SEED_ENV):
        seed = int(os.environ[SEED_ENV])
    else:
        seed = 0
    fmt = args.format or file_values.get("format", "json")
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    output = args.output if args.output is not None else file_values.get("output")
    if "workers" in file_values and args.workers == 1:
        args.workers = int(file_values["workers"])
    return RunConfig(subcommand=cmd, seed=check_seed(seed), format=fmt, output=output, **values)


def _csv_text(config: RunConfig, header: Sequence[str], rows: Sequence[Sequence[Any]], notes=()) -> str:
    buf = io.StringIO()
    buf.write("# config " + json.dumps(config.to_dict(), sort_keys=True) + "\n")
    for note in notes:
        buf.write("# " + note + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_float(v) for v in row])
    return buf.getvalue()


def _json_text(config: RunConfig, payload: dict) -> str:
    return json.dumps({"config": config.to_dict(), **payload}, sort_keys=True) + "\n"


def _run_coeff(cfg: RunConfig, workers: int) -> str:
    est = cluster.coefficient(cfg.d, cfg.t, cfg.method, trials=cfg.trials, seed=cfg.seed, measure=cfg.measure, workers=workers)
    lo, hi = est.interval
    if cfg.format == "json":
        return _json_text(cfg, {"result": {**asdict(est), "ci_low": lo, "ci_high": hi, "seed": cfg.seed}})
    header = ["method", "value", "half_width_95", "ci_low", "ci_high", "trials", "seed", "d", "t"]
    return _csv_text(cfg, header, [[est.method, est.value, est.half_width_95, lo, hi, est.trials, cfg.seed, est.d, est.t]])


def _run_bound(cfg: RunConfig, workers: int) -> str:
    res = bounds.bound_report(cfg.d, cfg.t, cfg.method, trials=cfg.trials, seed=cfg.seed, measure=cfg.measure, workers=workers)
    if cfg.format == "json":
        return _json_text(cfg, {"result": res.to_dict()})
    mu_iv = res.mu_interval or (None, None)
    lam_iv = res.lambda_interval or (None, None)
    header = ["d", "t", "coefficient_method", "coefficient", "coefficient_half_width", "mu_lower",
              "mu_low", "mu_high", "lambda_lower", "lambda_low", "lambda_high", "seed"]
    row = [res.d, res.t, res.coefficient_method, res.coefficient, res.coefficient_half_width, res.mu_lower,
           mu_iv[0], mu_iv[1], res.lambda_lower, lam_iv[0], lam_iv[1], cfg.seed]
    return _csv_text(cfg, header, [row])


def _thresholds(curve, theta) -> dict:
    out = {}
    for param in ("wrapping", "largest_fraction"):
        try:
            est = percolation.estimate_threshold(curve, theta, param)
            out[param] = asdict(est)
        except percolation.NoCrossingError:
            out[param] = None
    return out


def _run_percolate(cfg: RunConfig, workers: int) -> str:
    if cfg.grid is None:
        raise ValueError("percolate needs --grid")
    curve = percolation.percolation_sweep(cfg.d, cfg.grid, cfg.L, cfg.trials, cfg.seed, radius=cfg.radius, workers=workers)
    thresholds = _thresholds(curve, cfg.theta)
    if cfg.format == "json":
        return _json_text(cfg, {"curve": curve.to_dict(), "threshold": thresholds})
    header = ["lambda", "trials", "mean_fraction", "stderr", "mean_origin_size", "wrap_probability", "wrap_stderr"]
    rows = [[r.density, r.trials, r.mean_fraction, r.stderr, r.mean_origin_size, r.wrap_probability, r.wrap_stderr]
            for r in curve.rows]
    notes = [f"threshold {k} " + ("none" if v is None else fmt_float(v["lambda_hat"])) for k, v in thresholds.items()]
    return _csv_text(cfg, header, rows, notes)


def _run_growth(cfg: RunConfig, workers: int) -> str:
    rep = percolation.subcritical_growth(cfg.d, cfg.mu, cfg.n_list, cfg.trials, cfg.seed, workers=workers)
    if cfg.format == "json":
        return _json_text(cfg, {"growth": rep.to_dict()})
    header = ["n", "mean_largest", "max_largest", "mean_ratio", "max_ratio", "mean_fraction", "fraction_stderr"]
    rows = [[r.n, r.mean_largest, r.max_largest, r.mean_ratio, r.max_ratio, r.mean_fraction, r.fraction_stderr]
            for r in rep.rows]
    return _csv_text(cfg, header, rows)


def _sample_graph(cfg: RunConfig, dump_path: str | None):
    rng = stream(cfg.seed, 0)
    box = TorusBox(cfg.d, cfg.L)
    graph = rgg.build_graph(rgg.sample_poisson_points(cfg.density, box, rng), cfg.radius)
    if dump_path:
        with open(dump_path, "w", encoding="utf-8") as fh:
            rgg.write_edge_list(graph, fh)
    return graph, rng


def _run_explore(cfg: RunConfig, workers: int, dump_path=None) -> str:
    graph, rng = _sample_graph(cfg, dump_path)
    if graph.node_count == 0:
        raise ValueError("the sampled graph has no nodes; raise --density or --L")
    if cfg.start is None:
        # default start: the node of the largest component with the smallest index
        lab = connected_components(graph)
        best = max(lab.sizes, key=lab.sizes.get)
        start = int(np.flatnonzero(lab.label == best)[0])
    else:
        start = cfg.start
    trace = exploration.active_saturated_run(graph, start, cfg.selection, rng=stream(cfg.seed, 1))
    steps = [{"step": i + 1, "node": s.node, "y": s.y, "active_size": s.active_size, "saturated_size": s.saturated_size}
             for i, s in enumerate(trace.steps)]
    if cfg.format == "json":
        lines = [json.dumps({"config": cfg.to_dict(), "start_node": start, "node_count": graph.node_count,
                             "steps": len(steps), "terminated": trace.terminated}, sort_keys=True)]
        lines += [json.dumps(s, sort_keys=True) for s in steps]
        return "\n".join(lines) + "\n"
    header = ["step", "node", "y", "active_size", "saturated_size"]
    return _csv_text(cfg, header, [[s[h] for h in header] for s in steps], [f"start_node {start}"])


def _run_degree(cfg: RunConfig, workers: int, dump_path=None) -> str:
    graph, _ = _sample_graph(cfg, dump_path)
    summary = rgg.degree_summary(graph, cfg.density)
    if cfg.format == "json":
        payload = {"result": {"node_count": graph.node_count, "mean_degree": summary.mean_degree,
                              "tv_distance_to_poisson": summary.tv_distance_to_poisson,
                              "empirical_pmf": {str(k): v for k, v in summary.empirical_pmf.items()}}}
        return _json_text(cfg, payload)
    rows = [[k, v] for k, v in summary.empirical_pmf.items()]
    notes = [f"mean_degree {fmt_float(summary.mean_degree)}",
             f"tv_distance_to_poisson {fmt_float(summary.tv_distance_to_poisson)}"]
    return _csv_text(cfg, ["degree", "frequency"], rows, notes)


_RUNNERS = {
    "coeff": _run_coeff,
    "bound": _run_bound,
    "percolate": _run_percolate,
    "growth": _run_growth,
    "explore": _run_explore,
    "degree": _run_degree,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 with usage on bad flags
    try:
        cfg = resolve_config(args)
        runner = _RUNNERS[cfg.subcommand]
        if cfg.subcommand in ("explore", "degree"):
            text = runner(cfg, args.workers, dump_path=args.dump_graph)
        else:
            text = runner(cfg, args.workers)
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        msg = " ".join(str(exc).split())
        print(f"contperc: error: {msg}", file=sys.stderr)
        return 1
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


parse_and_dispatch = main


if __name__ == "__main__":
    raise SystemExit(main())
