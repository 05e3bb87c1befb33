"""Experiment protocols: heuristic optimality on small elections, and scaling.

``small``    ``elections`` random elections (default 5 candidates, 5 voters).
             For every rule, the preferred candidate is drawn at random and
             the election is discarded if that candidate already wins.
             Otherwise every heuristic is run and the exact optimum found by
             the brute-force oracle; the table reports how often each
             heuristic used exactly the optimal number of manipulators.
``scaling``  ``elections`` random elections at each size m in ``sizes`` with
             n = m voters; the table reports the mean number of manipulators
             each heuristic needs.

Election ``i`` uses seed ``seed + i``, so the result does not depend on how
the work is scheduled across processes.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .generators import GeneratorSpec, generate
from .manipulation import HEURISTICS, IterationCapError, ManipulationInstance, evaluate, minimize_manipulators
from .oracles import OracleTimeout, brute_force_optimal_unweighted
from .profile import Profile, serialize_profile
from .rules import BALDWIN, BORDA, NANSON

__all__ = [
    "ExperimentConfig", "choose_preferred", "run_small_optimal", "run_scaling",
    "run_experiment", "emit_outputs", "LABELS", "wilson",
]

LABELS = {"rev": "Rev", "lafit": "LaFit", "avfit": "AvFit", "elim": "Elim", "revelim": "RevElim"}
PAPER_RULE_ORDER = (BALDWIN, NANSON, BORDA)


@dataclass(frozen=True)
class ExperimentConfig:
    protocol: str = "small"
    rules: tuple[str, ...] = PAPER_RULE_ORDER
    heuristics: tuple[str, ...] = HEURISTICS
    elections: int = 3000
    m: int = 5
    n: int = 5
    sizes: tuple[int, ...] = (4, 8, 16, 32, 64, 128)
    model: str = "uniform"
    seed: int = 0
    urn_a: int | None = None
    preferred: str | int = "random"
    oracle_timeout: float = 60.0
    workers: int = 1

    def __post_init__(self):
        if self.protocol == "small-optimal":
            object.__setattr__(self, "protocol", "small")
        if self.protocol not in ("small", "scaling"):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        bad = set(self.heuristics) - set(HEURISTICS)
        if bad:
            raise ValueError(f"unknown heuristics {sorted(bad)}")
        bad = set(self.rules) - set(PAPER_RULE_ORDER)
        if bad:
            raise ValueError(f"unknown rules {sorted(bad)}")
        if self.elections < 0:
            raise ValueError("elections must be non-negative")
        # keep the paper's column order whatever order they were given in
        object.__setattr__(self, "heuristics", tuple(h for h in HEURISTICS if h in self.heuristics))
        object.__setattr__(self, "rules", tuple(r for r in PAPER_RULE_ORDER if r in self.rules))
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["rules"], d["heuristics"], d["sizes"] = list(self.rules), list(self.heuristics), list(self.sizes)
        return d


def choose_preferred(profile: Profile, rng, policy: str | int = "random") -> int:
    """The candidate the coalition wants elected: uniform at random or a fixed index."""
    if policy == "random":
        return int(np.random.default_rng(rng).integers(profile.m))
    return profile.index(int(policy))


def _digest(profile: Profile) -> str:
    return hashlib.sha1(serialize_profile(profile).encode()).hexdigest()[:16]


def _instance_record(config, profile, preferred, rule, with_optimum):
    inst = ManipulationInstance(rule, profile, preferred)
    rec = {"discarded": False, "counts": {}, "optimal": None, "flag": None}
    if evaluate(inst, []):
        rec["discarded"] = True
        return rec
    for h in config.heuristics:
        try:
            rec["counts"][h] = minimize_manipulators(inst, h).manipulators_used
        except IterationCapError:
            rec["counts"][h] = None
            rec["flag"] = f"iteration cap: {h}"
    if with_optimum and rec["flag"] is None:
        best = min(rec["counts"].values()) if rec["counts"] else None
        try:
            if best is None:
                raise ValueError("no heuristic to bound the search")
            found = brute_force_optimal_unweighted(inst, best - 1, timeout=config.oracle_timeout)
            rec["optimal"] = best if found is None else found.manipulators_used
        except (OracleTimeout, ValueError) as exc:
            rec["flag"] = f"oracle: {exc}"
    return rec


def _election(config: ExperimentConfig, m: int, n: int, i: int, with_optimum: bool) -> dict:
    seed = config.seed + i
    rng = np.random.default_rng(seed)
    profile = generate(GeneratorSpec(config.model, m, n, seed, config.urn_a), rng)
    preferred = choose_preferred(profile, rng, config.preferred)
    return {
        "seed": seed,
        "m": m,
        "n": n,
        "digest": _digest(profile),
        "preferred": profile.candidates[preferred],
        "results": {r: _instance_record(config, profile, preferred, r, with_optimum) for r in config.rules},
    }


def _map(config: ExperimentConfig, fn, items):
    if config.workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (8 * config.workers))))


def wilson(hits: int, total: int, alpha: float = 0.05) -> tuple[float, float]:
    if total == 0:
        return (math.nan, math.nan)
    from statsmodels.stats.proportion import proportion_confint
    lo, hi = proportion_confint(hits, total, alpha=alpha, method="wilson")
    return float(lo), float(hi)


def _summarize_small(config, records) -> dict:
    rows = []
    for rule in config.rules:
        recs = [r["results"][rule] for r in records]
        used = [r for r in recs if not r["discarded"] and r["flag"] is None]
        row = {
            "rule": rule,
            "elections": len(recs),
            "discarded": sum(r["discarded"] for r in recs),
            "flagged": sum(r["flag"] is not None for r in recs),
            "used": len(used),
            "cells": {},
        }
        for h in config.heuristics:
            hits = sum(r["counts"][h] == r["optimal"] for r in used)
            lo, hi = wilson(hits, len(used))
            pct = 100.0 * hits / len(used) if used else math.nan
            row["cells"][h] = {"hits": hits, "percent": pct, "lo": 100 * lo, "hi": 100 * hi}
        rows.append(row)
    return {"protocol": "small", "rows": rows}


def _summarize_scaling(config, records) -> dict:
    rows = []
    for rule in config.rules:
        for m in config.sizes:
            recs = [r["results"][rule] for r in records if r["m"] == m]
            used = [r for r in recs if not r["discarded"] and r["flag"] is None]
            row = {
                "rule": rule,
                "m": m,
                "elections": len(recs),
                "discarded": sum(r["discarded"] for r in recs),
                "flagged": sum(r["flag"] is not None for r in recs),
                "used": len(used),
                "cells": {},
            }
            for h in config.heuristics:
                vals = np.array([r["counts"][h] for r in used], dtype=float)
                mean = float(vals.mean()) if len(vals) else math.nan
                se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else math.nan
                row["cells"][h] = {"mean": mean, "se": se}
            rows.append(row)
    return {"protocol": "scaling", "rows": rows}


def run_small_optimal(config: ExperimentConfig) -> tuple[list[dict], dict]:
    fn = partial(_small_item, config)
    records = _map(config, fn, list(range(config.elections)))
    return records, _summarize_small(config, records)


def _small_item(config, i):
    return _election(config, config.m, config.n, i, True)


def _scaling_item(config, item):
    m, i = item
    return _election(config, m, m, i, False)


def run_scaling(config: ExperimentConfig) -> tuple[list[dict], dict]:
    items = [(m, i) for m in config.sizes for i in range(config.elections)]
    records = _map(config, partial(_scaling_item, config), items)
    return records, _summarize_scaling(config, records)


def run_experiment(config: ExperimentConfig):
    if config.protocol == "small":
        return run_small_optimal(config)
    return run_scaling(config)


# --- output --------------------------------------------------------------------

def _fmt(x: float, digits: int = 2) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.{digits}f}"


def summary_csv(summary: dict, heuristics) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    labels = [LABELS[h] for h in heuristics]
    if summary["protocol"] == "small":
        w.writerow(["rule", "elections", "discarded", "flagged", "used", *labels,
                    *(f"{l}_{s}" for l in labels for s in ("lo", "hi"))])
        for row in summary["rows"]:
            cells = [row["cells"][h] for h in heuristics]
            w.writerow([row["rule"], row["elections"], row["discarded"], row["flagged"], row["used"],
                        *(_fmt(c["percent"], 1) for c in cells),
                        *(_fmt(c[s], 1) for c in cells for s in ("lo", "hi"))])
    else:
        w.writerow(["rule", "m", "elections", "discarded", "flagged", "used", *labels,
                    *(f"{l}_se" for l in labels)])
        for row in summary["rows"]:
            cells = [row["cells"][h] for h in heuristics]
            w.writerow([row["rule"], row["m"], row["elections"], row["discarded"], row["flagged"],
                        row["used"], *(_fmt(c["mean"]) for c in cells), *(_fmt(c["se"], 3) for c in cells)])
    return buf.getvalue()


def summary_text(summary: dict, heuristics) -> str:
    labels = [LABELS[h] for h in heuristics]
    lines = []
    if summary["protocol"] == "small":
        head = ["rule", "used", *labels]
        body = [[r["rule"], str(r["used"]),
                 *(f"{_fmt(r['cells'][h]['percent'], 1)}% [{_fmt(r['cells'][h]['lo'], 1)},"
                   f"{_fmt(r['cells'][h]['hi'], 1)}]" for h in heuristics)]
                for r in summary["rows"]]
    else:
        head = ["rule", "m", "used", *labels]
        body = [[r["rule"], str(r["m"]), str(r["used"]),
                 *(f"{_fmt(r['cells'][h]['mean'])} ±{_fmt(r['cells'][h]['se'], 2)}" for h in heuristics)]
                for r in summary["rows"]]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    for row in [head, *body]:
        lines.append("  ".join(x.rjust(wd) for x, wd in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def emit_outputs(records: list[dict], summary: dict, config: ExperimentConfig, out: str | os.PathLike):
    """Write ``summary.csv``, ``summary.txt``, ``records.jsonl`` and ``config.json`` into ``out``."""
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "summary.csv"), "w", newline="") as fh:
        fh.write(summary_csv(summary, config.heuristics))
    with open(os.path.join(out, "summary.txt"), "w") as fh:
        fh.write(summary_text(summary, config.heuristics))
    with open(os.path.join(out, "records.jsonl"), "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    with open(os.path.join(out, "config.json"), "w") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
