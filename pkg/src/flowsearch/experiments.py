"""Seeded experiment runs: scaling sweeps, star growth and unknown-W overhead.

Each run depends only on (instance, seed, config). Sweeps can therefore go
to a process pool; results are collected in submission order, so the rows
do not depend on scheduling.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import families
from .electric import ElectricError, effective_resistance
from .families import Instance
from .ledger import BudgetExhausted, CostLedger
from .search import DEFAULT_CONFIG, SearchConfig, SearchError, find_marked, find_marked_unknown_w

SCALING_HEADER = ("instance", "n", "m", "R", "W", "eta", "a", "b", "ledger_total", "found", "trials", "seed")

FAMILIES = {
    "path": families.path,
    "cycle": families.cycle,
    "star": families.star,
    "grid": lambda k: families.grid(k, k),
    "ladder": families.ladder,
}


def parse_sizes(text: str) -> list[int]:
    """``A..B`` doubles from A up to B; ``a,b,c`` is an explicit list."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split("..", 1))
            if lo < 1 or hi < lo:
                raise ValueError
            out = []
            while lo <= hi:
                out.append(lo)
                lo *= 2
            return out
        sizes = [int(p) for p in text.split(",")]
    except ValueError:
        raise ValueError(f"bad size range {text!r}; use A..B or a,b,c") from None
    if any(s < 1 for s in sizes):
        raise ValueError(f"sizes must be positive: {text!r}")
    return sizes


def family_instance(name: str, size: int) -> Instance:
    try:
        build = FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    return build(size)


@dataclass(frozen=True)
class RunSpec:
    instance: Instance
    seed: int
    config: SearchConfig = DEFAULT_CONFIG
    w_bound: float | None = None
    unknown_w: bool = False


def _oracle_resistance(inst: Instance):
    try:
        return effective_resistance(inst.graph, inst.sigma)
    except ElectricError:
        return math.inf


def run_find(spec: RunSpec) -> dict:
    """One seeded search; a failed search gives ``found == ""`` and an ``error``.

    ``vertex`` holds the found vertex itself, ``found`` its string form.
    """
    inst = spec.instance
    g = inst.graph
    W = g.total_weight
    rng = np.random.default_rng(spec.seed)
    ledger = CostLedger()
    row = {
        "instance": inst.name,
        "n": len(g.vertices),
        "m": len(g.marked),
        "R": _oracle_resistance(inst),
        "W": W,
        "eta": "",
        "a": "",
        "b": "",
        "found": "",
        "vertex": None,
        "trials": 0,
        "seed": spec.seed,
        "error": "",
    }
    try:
        if spec.unknown_w:
            out = find_marked_unknown_w(g, inst.sigma, None, rng, config=spec.config)
        else:
            w_bound = W if spec.w_bound is None else spec.w_bound
            out = find_marked(g, inst.sigma, None, w_bound, rng, spec.config, ledger)
    except (SearchError, BudgetExhausted) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        row["ledger"] = ledger.as_dict()
        row["ledger_total"] = ledger.total
        return row
    row.update(
        eta=out.eta,
        a=out.a,
        b=out.b,
        found=str(out.found_vertex),
        vertex=out.found_vertex,
        trials=out.trials,
        ledger=out.ledger.as_dict(),
        ledger_total=out.ledger.total,
    )
    return row


def run_many(specs: list[RunSpec], jobs: int = 1) -> list[dict]:
    """Run specs, in a process pool when ``jobs > 1``; rows come back in spec order."""
    if jobs <= 1 or len(specs) <= 1:
        return [run_find(s) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_find, specs))


def scaling_specs(family: str, sizes, seeds, config: SearchConfig = DEFAULT_CONFIG) -> list[RunSpec]:
    return [RunSpec(family_instance(family, n), s, config) for n in sizes for s in seeds]


def loglog_slope(xs, ys) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)
    return float(slope)


def path_scaling(sizes=(8, 16, 32, 64, 128), seeds=range(3), config=DEFAULT_CONFIG, jobs=1):
    """Median ledger per path length and the log-log slope against n."""
    rows = run_many(scaling_specs("path", sizes, seeds, config), jobs)
    med = [statistics.median(r["ledger_total"] for r in rows if r["instance"] == f"path{n}") for n in sizes]
    return {"sizes": list(sizes), "median_ledger": med, "slope": loglog_slope(sizes, med)}


def star_growth(ms=(2, 4, 8, 16), seeds=range(5), config=DEFAULT_CONFIG, jobs=1):
    """Ledger of K_{1,m} with all leaves marked, relative to m = 2.

    ``c`` is the smallest constant with ``L(m)/L(2) <= c log2(m)^3``.
    """
    specs = [RunSpec(families.star(m), s, config) for m in ms for s in seeds]
    rows = run_many(specs, jobs)
    med = {m: statistics.median(r["ledger_total"] for r in rows if r["instance"] == f"star{m}") for m in ms}
    base = med[ms[0]]
    c = max(med[m] / base / max(1.0, math.log2(m)) ** 3 for m in ms)
    return {"ms": list(ms), "median_ledger": [med[m] for m in ms], "c": c}


def unknown_w_overhead(inst: Instance, seeds=range(5), config=DEFAULT_CONFIG, jobs=1):
    """Median unknown-W ledger over median known-W ledger on one instance."""
    known = run_many([RunSpec(inst, s, config) for s in seeds], jobs)
    unknown = run_many([RunSpec(inst, s, config, unknown_w=True) for s in seeds], jobs)
    k = statistics.median(r["ledger_total"] for r in known)
    u = statistics.median(r["ledger_total"] for r in unknown)
    return {
        "instance": inst.name,
        "known": k,
        "unknown": u,
        "ratio": u / k,
        "unknown_found": all(r["found"] for r in unknown),
    }


def exact_config(config: SearchConfig = DEFAULT_CONFIG) -> SearchConfig:
    return replace(config, ae_mode="exact")
