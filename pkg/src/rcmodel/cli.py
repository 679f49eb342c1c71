"""Command-line front end.

Every subcommand reads a plain ``key = value`` config (``--config`` and/or
``--set key=value``), requires a seed, and writes self-describing output
files into ``--out-dir`` (default ``$RCMODEL_OUT_DIR`` or the current
directory). The exit status is 0 iff every requested check passed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CapExceeded
from .estimators import SamplerSpec, config_hash, critical_scan
from .exact import DEFAULT_CAP, RCParams, connection_event, event_probability, partition_enumerate
from .graph import (BoundarySpec, Graph, build_box_lattice, build_complete_graph, build_regular_tree, cycle_graph,
                    graph_hash, path_graph, read_edge_list)
from .rng import generator

OUT_DIR_ENV = "RCMODEL_OUT_DIR"

# key -> (type, default); a default of REQUIRED must be supplied
REQUIRED = object()
SCHEMAS = {
    "exact": {"graph": (str, REQUIRED), "p_grid": ("floats", REQUIRED), "q_grid": ("floats", REQUIRED),
              "quantity": (str, "partition"), "method": (str, "enumerate")},
    "sample": {"graph": (str, REQUIRED), "p": (float, REQUIRED), "q": (float, REQUIRED),
               "sampler": (str, "cftp"), "samples": (int, 1000), "burn_in": (int, 100), "thin": (int, 1),
               "start": (str, "ordered")},
    "scan": {"q": (float, REQUIRED), "p_grid": ("floats", REQUIRED), "sides": ("ints", REQUIRED),
             "samples": (int, 1000), "sampler": (str, "sw"), "burn_in": (int, 100), "thin": (int, 1),
             "start": (str, "ordered"), "boundary": (str, "free"), "d": (int, 2)},
    "meanfield": {"q": (float, REQUIRED), "lambdas": ("floats", REQUIRED), "n": (int, REQUIRED),
                  "samples": (int, 20), "burn_in": (int, 50), "dynamics": (str, "sw"), "start": (str, "ordered")},
    "dual": {"graph": (str, REQUIRED), "p": (float, REQUIRED), "q": (float, REQUIRED)},
    "check": {"checks": ("strs", "all")},
}


class ConfigError(ValueError):
    pass


def parse_config_text(text: str) -> dict[str, str]:
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ConfigError(f"line {n}: expected key = value")
        k, v = s.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _convert(kind, raw: str):
    if kind == "floats":
        return [float(x) for x in raw.split(",") if x.strip()]
    if kind == "ints":
        return [int(x) for x in raw.split(",") if x.strip()]
    if kind == "strs":
        return [x.strip() for x in raw.split(",") if x.strip()]
    return kind(raw)


def validate_config(command: str, raw: dict[str, str]) -> dict:
    schema = SCHEMAS[command]
    unknown = set(raw) - set(schema) - {"seed"}
    if unknown:
        raise ConfigError(f"unknown keys for {command}: {', '.join(sorted(unknown))}")
    cfg = {}
    for key, (kind, default) in schema.items():
        if key in raw:
            try:
                cfg[key] = _convert(kind, raw[key])
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw[key]!r}") from exc
        elif default is REQUIRED:
            raise ConfigError(f"missing required key {key!r}")
        else:
            cfg[key] = _convert(kind, default) if isinstance(default, str) and kind in ("floats", "ints", "strs") \
                else default
    return cfg


def parse_graph(spec: str) -> Graph:
    """triangle | cycle:N | path:N | complete:N | tree:B:D | box:AxB[:free|wired|periodic] | ball:N[:wired] | file:PATH"""
    parts = spec.split(":")
    kind = parts[0]
    if kind == "triangle":
        return cycle_graph(3)
    if kind == "cycle":
        return cycle_graph(int(parts[1]))
    if kind == "path":
        return path_graph(int(parts[1]))
    if kind == "complete":
        return build_complete_graph(int(parts[1]))
    if kind == "tree":
        return build_regular_tree(int(parts[1]), int(parts[2]))
    if kind == "box":
        sides = [int(x) for x in parts[1].split("x")]
        return build_box_lattice(len(sides), sides, BoundarySpec(parts[2] if len(parts) > 2 else "free"))
    if kind == "ball":
        n = int(parts[1])
        return build_box_lattice(2, [2 * n + 1] * 2, BoundarySpec(parts[2] if len(parts) > 2 else "free"))
    if kind == "file":
        return read_edge_list(Path(spec[5:]).read_text())
    raise ConfigError(f"unknown graph spec {spec!r}")


def _header(seed: int, cfg: dict, command: str) -> list[str]:
    return [f"tool=rcmodel {__version__}", f"command={command}", f"seed={seed}",
            f"config_hash={config_hash({'command': command, **cfg})}"]


def _write(out_dir: Path, name: str, body: str, header: list[str] | None = None, comment: str = "# ") -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    lines = [comment + h for h in header] if header else []
    path.write_text("\n".join(lines + [body.rstrip("\n")]) + "\n" if lines else body)
    return path


# --------------------------------------------------------------------------
# subcommands


def cmd_exact(cfg, seed, out_dir, cap, workers) -> bool:
    g = parse_graph(cfg["graph"])
    quantity, method = cfg["quantity"], cfg["method"]
    gh = graph_hash(g)
    records, rows = [], ["p,q,value"]
    for p in cfg["p_grid"]:
        for q in cfg["q_grid"]:
            params = RCParams(p, q)
            if quantity == "partition":
                if method == "rank":
                    from .tutte import partition_via_rank
                    value = partition_via_rank(g, params)
                else:
                    value = partition_enumerate(g, params, cap)
            elif quantity.startswith("connection"):
                x, y = map(int, quantity.split(":")[1].split(","))
                value = event_probability(g, params, connection_event(g, x, y, cap), cap)
            else:
                raise ConfigError(f"unknown quantity {quantity!r}")
            records.append({"graph_hash": gh, "p": p, "q": q, "quantity": quantity, "value": value, "method": method})
            rows.append(f"{p!r},{q!r},{value!r}")
    hdr = _header(seed, cfg, "exact")
    _write(out_dir, "exact.csv", "\n".join(rows), hdr)
    meta = {"header": hdr, "records": records}
    _write(out_dir, "exact.json", json.dumps(meta, indent=1, sort_keys=True) + "\n")
    return True


def cmd_sample(cfg, seed, out_dir, cap, workers) -> bool:
    from .estimators import sample_configs
    from .samplers import config_to_hex, spins_given_bonds

    g = parse_graph(cfg["graph"])
    params = RCParams(cfg["p"], cfg["q"])
    kind = cfg["sampler"]
    if kind in ("cftp", "es") and params.q < 1:
        raise ConfigError("refusing to run coupling from the past with q < 1: the heat bath is not monotone there")
    if kind in ("sw", "es") and (not float(params.q).is_integer() or params.q < 2):
        raise ConfigError(f"sampler {kind} needs an integer q >= 2, got q = {params.q}")
    spec = SamplerSpec("cftp" if kind == "es" else kind, cfg["burn_in"], cfg["thin"], cfg["start"])
    S = sample_configs(g, params, spec, cfg["samples"], seed)
    if kind == "es":
        rng = generator(seed, stream=99)
        lines = [config_to_hex(w) + " " + "".join(f"{s}," for s in spins_given_bonds(g, w, int(params.q), rng).spins)
                 .rstrip(",") for w in S]
    else:
        lines = [config_to_hex(w) for w in S]
    _write(out_dir, "samples.txt", "\n".join(lines), _header(seed, cfg, "sample") + [f"graph_hash={graph_hash(g)}"])
    return True


def cmd_scan(cfg, seed, out_dir, cap, workers) -> bool:
    spec = SamplerSpec(cfg["sampler"], cfg["burn_in"], cfg["thin"], cfg["start"])
    if spec.kind == "sw" and not float(cfg["q"]).is_integer():
        raise ConfigError("sampler sw needs an integer q")
    text = critical_scan(cfg["q"], cfg["p_grid"], cfg["sides"], cfg["samples"], seed, spec, cfg["boundary"],
                         cfg["d"], workers)
    _write(out_dir, "scan.csv", text)
    return True


def _meanfield_one(args):
    from .meanfield import MeanFieldParams, simulate_Kn

    n, lam, q, dynamics, burn_in, samples, seed, start = args
    return simulate_Kn(MeanFieldParams(n, lam, q), dynamics, burn_in, samples, seed, start)


def cmd_meanfield(cfg, seed, out_dir, cap, workers) -> bool:
    from .meanfield import results_to_csv

    jobs = [(cfg["n"], lam, cfg["q"], cfg["dynamics"], cfg["burn_in"], cfg["samples"], seed + i, cfg["start"])
            for i, lam in enumerate(cfg["lambdas"])]
    if cfg["dynamics"] == "sw" and cfg["q"] != 1 and not float(cfg["q"]).is_integer():
        raise ConfigError("dynamics sw needs an integer q")
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_meanfield_one, jobs))
    else:
        results = [_meanfield_one(j) for j in jobs]
    hdr = _header(seed, cfg, "meanfield") + [f"approximate={any(r.approximate for r in results)}",
                                             "replica_seeds=seed+index_of_lambda"]
    _write(out_dir, "meanfield.csv", results_to_csv(results, hdr))
    return True


def cmd_dual(cfg, seed, out_dir, cap, workers) -> bool:
    from .duality import dual_parameter, duality_identity_error, planar_dual, self_dual_point, write_dual_pair

    g = parse_graph(cfg["graph"])
    pair = planar_dual(g)
    p, q = cfg["p"], cfg["q"]
    pd = dual_parameter(p, q)
    err = duality_identity_error(pair, p, q, cap)
    verdicts = {"duality_identity": err < 1e-12, "duality_identity_error": err,
                "involution_error": abs(dual_parameter(pd, q) - p), "involution": abs(dual_parameter(pd, q) - p) < 1e-14,
                "p": p, "q": q, "p_dual": pd, "self_dual_point": self_dual_point(q)}
    hdr = _header(seed, cfg, "dual")
    _write(out_dir, "dual_pair.txt", write_dual_pair(pair), hdr)
    grid = np.linspace(0.0, 1.0, 21)
    _write(out_dir, "dual_parameters.csv", "p,q,p_dual\n" + "\n".join(f"{x!r},{q!r},{dual_parameter(x, q)!r}" for x in grid), hdr)
    _write(out_dir, "dual_verdicts.json", json.dumps({"header": hdr, **verdicts}, indent=1, sort_keys=True) + "\n")
    print(json.dumps({k: verdicts[k] for k in ("duality_identity", "involution")}))
    return verdicts["duality_identity"] and verdicts["involution"]


def cmd_check(cfg, seed, out_dir, cap, workers) -> bool:
    from .checks import run_checks

    results = run_checks(cfg["checks"], seed)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    hdr = _header(seed, cfg, "check")
    summary = {"header": hdr, "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in results],
               "all_passed": all(ok for _, ok, _ in results)}
    _write(out_dir, "check_summary.json", json.dumps(summary, indent=1, sort_keys=True) + "\n")
    return summary["all_passed"]


COMMANDS = {"exact": cmd_exact, "sample": cmd_sample, "scan": cmd_scan, "meanfield": cmd_meanfield,
            "dual": cmd_dual, "check": cmd_check}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rcmodel", description="Random-cluster measures: exact oracles and samplers.")
    ap.add_argument("--version", action="version", version=f"rcmodel {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="key = value config file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
        sp.add_argument("--seed", type=int, help="64-bit seed (required here or in the config)")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out-dir", type=Path, default=None)
        sp.add_argument("--cap-edges", type=int, default=DEFAULT_CAP)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        raw = parse_config_text(args.config.read_text()) if args.config else {}
        for item in args.set:
            raw.update(parse_config_text(item))
        seed = args.seed if args.seed is not None else (int(raw["seed"]) if "seed" in raw else None)
        if seed is None:
            raise ConfigError("a seed is required (--seed or seed = ... in the config)")
        if seed < 0 or seed >= 1 << 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        cfg = validate_config(args.command, raw)
        out_dir = args.out_dir or Path(os.environ.get(OUT_DIR_ENV, "."))
        ok = COMMANDS[args.command](cfg, seed, out_dir, args.cap_edges, max(1, args.workers))
    except (ConfigError, CapExceeded, ValueError) as exc:
        print(f"rcmodel {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
