"""Command-line front end.

Subcommands:

``resistance``  estimate R from a point start and compare with the oracle
``find``        search for a marked vertex
``verify``      run the invariant suite, or a scaling sweep with ``--family``

Exit codes: 0 success, 1 accuracy miss / search failure / failed check,
2 bad input. Output is deterministic for a fixed seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import statistics
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import experiments, verify
from .augment import augment
from .electric import ElectricError, effective_resistance
from .families import Instance
from .graph import GraphError, InvalidDistribution, load_instance, undouble
from .search import DEFAULT_CONFIG, SearchConfig, SearchError, estimate_resistance, find_eta
from .walk import build_walk_operator, dump_operator

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

RESISTANCE_HEADER = ("instance", "seed", "R", "R_hat", "relative_error", "eps", "ledger_total")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    graph: Path | None = None
    sidecar: Path | None = None
    wbound: float | None = None
    eps: float = 0.1
    seed: int | None = None
    trials: int = 1
    jobs: int = 1
    fmt: str = "json"
    out: Path | None = None
    exact_amplitude: bool = False
    circuit_oracle: bool = False
    unknown_w: bool = False
    family: str | None = None
    sizes: tuple = ()
    dump_operator: Path | None = None
    inject_fault: str | None = None

    def search_config(self) -> SearchConfig:
        cfg = DEFAULT_CONFIG
        if self.exact_amplitude:
            cfg = replace(cfg, ae_mode="exact")
        if self.circuit_oracle:
            cfg = replace(cfg, pe_backend="circuit")
        return cfg


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", type=Path, help="edge list: one 'u v w' per line")
    common.add_argument("--sidecar", type=Path, help='JSON {"marked": [...], "sigma": {...}}')
    common.add_argument("--wbound", type=float, help="upper bound on total weight (default: exact W)")
    common.add_argument("--eps", type=float, default=0.1, help="relative accuracy for resistance")
    common.add_argument("--seed", type=int, help="PRNG seed; run i uses seed + i")
    common.add_argument("--trials", type=int, default=1, help="independent runs")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument("--exact-amplitude", action="store_true", help="skip amplitude-estimation noise")
    common.add_argument("--circuit-oracle", action="store_true", help="simulate the explicit phase-estimation circuit")
    common.add_argument("--unknown-w", action="store_true", help="search without a weight bound")
    common.add_argument("--family", help=f"scaling sweep over one of {sorted(experiments.FAMILIES)}")
    common.add_argument("--sizes", default="8..128", help="A..B (doubling) or a,b,c")
    common.add_argument("--dump-operator", type=Path, help="write the walk operator as re,im text")
    common.add_argument("--inject-fault", choices=verify.FAULTS, help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="flowsearch", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("resistance", parents=[common], help="estimate effective resistance")
    sub.add_parser("find", parents=[common], help="find a marked vertex")
    sub.add_parser("verify", parents=[common], help="run the invariant suite or a scaling sweep")
    return parser


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    cmd = ns.command
    needs_graph = cmd in ("resistance", "find")
    if needs_graph and (ns.graph is None or ns.sidecar is None):
        raise ConfigError(f"{cmd} needs --graph and --sidecar")
    if (ns.graph is None) != (ns.sidecar is None):
        raise ConfigError("--graph and --sidecar go together")
    for path in (ns.graph, ns.sidecar):
        if path is not None and not path.is_file():
            raise ConfigError(f"no such file: {path}")
    if needs_graph and ns.seed is None:
        raise ConfigError(f"{cmd} is randomized and needs --seed")
    if not (ns.eps > 0 and ns.eps < 0.5):
        raise ConfigError(f"--eps must lie in (0, 0.5), got {ns.eps}")
    if ns.wbound is not None and not (ns.wbound > 0 and math.isfinite(ns.wbound)):
        raise ConfigError(f"--wbound must be positive, got {ns.wbound}")
    if ns.trials < 1 or ns.jobs < 1:
        raise ConfigError("--trials and --jobs must be at least 1")
    sizes = ()
    if ns.family is not None:
        if cmd != "verify":
            raise ConfigError("--family is a verify option")
        if ns.family not in experiments.FAMILIES:
            raise ConfigError(f"unknown family {ns.family!r}")
        try:
            sizes = tuple(experiments.parse_sizes(ns.sizes))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    fmt = ns.fmt or ("csv" if ns.family else "json")
    return ExperimentConfig(
        command=cmd,
        graph=ns.graph,
        sidecar=ns.sidecar,
        wbound=ns.wbound,
        eps=ns.eps,
        seed=ns.seed,
        trials=ns.trials,
        jobs=ns.jobs,
        fmt=fmt,
        out=ns.out,
        exact_amplitude=ns.exact_amplitude,
        circuit_oracle=ns.circuit_oracle,
        unknown_w=ns.unknown_w,
        family=ns.family,
        sizes=sizes,
        dump_operator=ns.dump_operator,
        inject_fault=ns.inject_fault,
    )


# -- output ---------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, (set, frozenset)):
        return sorted(map(str, obj))
    if isinstance(obj, Path):
        return str(obj)
    return str(obj)


def to_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def emit(cfg: ExperimentConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text)


def _load(cfg: ExperimentConfig) -> tuple[Instance, bool]:
    g, sigma, doubled = load_instance(cfg.graph, cfg.sidecar)
    if not g.marked:
        raise ConfigError("sidecar lists no marked vertices")
    return Instance(cfg.graph.stem, g, sigma), doubled


def _show(v, doubled: bool) -> str:
    return "" if v is None else str(undouble(v) if doubled else v)


def _dump(cfg: ExperimentConfig, inst: Instance, eta: float) -> None:
    aug = augment(inst.graph, inst.sigma, eta, 0.0)
    dump_operator(build_walk_operator(aug).u, cfg.dump_operator)


# -- commands -------------------------------------------------------------


def cmd_resistance(cfg: ExperimentConfig) -> int:
    inst, doubled = _load(cfg)
    start = inst.start
    if start is None:
        raise ConfigError("resistance needs a point-mass sigma")
    g = inst.graph
    R = effective_resistance(g, inst.sigma)
    w_bound = g.total_weight if cfg.wbound is None else cfg.wbound
    search_cfg = cfg.search_config()
    runs = []
    for i in range(cfg.trials):
        seed = cfg.seed + i
        R_hat, ledger = estimate_resistance(
            g, start, None, w_bound, cfg.eps, np.random.default_rng(seed), search_cfg
        )
        rel = abs(R_hat - R) / R
        runs.append(
            {
                "instance": inst.name,
                "seed": seed,
                "R": R,
                "R_hat": R_hat,
                "relative_error": rel,
                "within_eps": rel <= cfg.eps,
                "eps": cfg.eps,
                "ledger": ledger.as_dict(),
                "ledger_total": ledger.total,
            }
        )
    median = statistics.median(r["R_hat"] for r in runs)
    ok = abs(median - R) / R <= cfg.eps
    if cfg.dump_operator is not None:
        _dump(cfg, inst, runs[0]["R_hat"])
    if cfg.fmt == "csv":
        emit(cfg, to_csv(RESISTANCE_HEADER, runs))
    else:
        report = {
            "command": "resistance",
            "instance": inst.name,
            "doubled": doubled,
            "R": R,
            "R_hat_median": median,
            "eps": cfg.eps,
            "within_eps": ok,
            "runs": runs,
        }
        emit(cfg, to_json(report))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_find(cfg: ExperimentConfig) -> int:
    inst, doubled = _load(cfg)
    g = inst.graph
    specs = [
        experiments.RunSpec(inst, cfg.seed + i, cfg.search_config(), cfg.wbound, cfg.unknown_w)
        for i in range(cfg.trials)
    ]
    rows = experiments.run_many(specs, cfg.jobs)
    ok = True
    for row in rows:
        v = row.pop("vertex")
        row["found"] = _show(v, doubled)
        row["in_marked"] = v in g.marked
        ok &= row["in_marked"]
        if row["error"]:
            print(f"error (seed {row['seed']}): {row['error']}", file=sys.stderr)
    if cfg.dump_operator is not None:
        w_bound = g.total_weight if cfg.wbound is None else cfg.wbound
        try:
            eta, _ = find_eta(g, inst.sigma, None, w_bound, np.random.default_rng(cfg.seed), cfg.search_config())
            _dump(cfg, inst, eta)
        except SearchError as exc:
            print(f"error: no operator to dump: {exc}", file=sys.stderr)
    if cfg.fmt == "csv":
        emit(cfg, to_csv(experiments.SCALING_HEADER, rows))
    else:
        report = {
            "command": "find",
            "instance": inst.name,
            "doubled": doubled,
            "marked": sorted({_show(v, doubled) for v in g.marked}),
            "unknown_w": cfg.unknown_w,
            "all_found": ok,
            "runs": rows,
        }
        emit(cfg, to_json(report))
    return EXIT_OK if ok else EXIT_FAIL


def _sweep(cfg: ExperimentConfig) -> int:
    seed = 0 if cfg.seed is None else cfg.seed
    seeds = range(seed, seed + cfg.trials)
    specs = experiments.scaling_specs(cfg.family, cfg.sizes, seeds, cfg.search_config())
    rows = experiments.run_many(specs, cfg.jobs)
    for row in rows:
        row.pop("vertex")
    ok = all(r["found"] for r in rows)
    if cfg.fmt == "csv":
        emit(cfg, to_csv(experiments.SCALING_HEADER, rows))
    else:
        totals = [
            statistics.median(r["ledger_total"] for r in rows if r["n"] == n) for n in sorted({r["n"] for r in rows})
        ]
        ns = sorted({r["n"] for r in rows})
        slope = experiments.loglog_slope(ns, totals) if len(ns) > 1 else None
        emit(cfg, to_json({"command": "verify", "family": cfg.family, "rows": rows, "loglog_slope": slope}))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(cfg: ExperimentConfig) -> int:
    if cfg.family is not None:
        return _sweep(cfg)
    extra = [_load(cfg)[0]] if cfg.graph is not None else []
    checks = verify.run_all(cfg.inject_fault, extra)
    failed = [c for c in checks if not c.passed]
    for c in failed:
        print(f"FAIL {c.name}: {c.witness}", file=sys.stderr)
    if cfg.fmt == "csv":
        rows = [{"check": c.name, "passed": c.passed, "instances": c.instances, "witness": c.witness or ""} for c in checks]
        emit(cfg, to_csv(("check", "passed", "instances", "witness"), rows))
    else:
        report = {
            "command": "verify",
            "passed": not failed,
            "failed": [c.name for c in failed],
            "checks": [c.as_dict() for c in checks],
        }
        emit(cfg, to_json(report))
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {"resistance": cmd_resistance, "find": cmd_find, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, GraphError, InvalidDistribution, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ElectricError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
