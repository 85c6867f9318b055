"""Random-network benchmark suites comparing reachability methods.

Each suite instance ``i`` draws a network and an input box from seed
``base_seed + i``, runs every requested method and records the 2-norm width
of the output box and the wall time normalised by the number of neurons.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

from .activations import builtin
from .errors import MissingPairs
from .network import PRNG_ID, RandomNetConfig, random_input_box, random_network
from .reach import METHODS, reach

__all__ = [
    "RandomNetConfig",
    "BenchRecord",
    "ComparisonSummary",
    "run_suite",
    "summarize",
    "write_csv",
    "read_csv",
    "write_summary",
]

REL_TOL = 1e-9


@dataclass
class BenchRecord:
    network_id: int
    seed: int
    dims: str
    n_neurons: int
    method: str
    elapsed: float
    elapsed_per_neuron: float
    width: float
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


CSV_FIELDS = [f.name for f in fields(BenchRecord)]


def _run_instance(cfg: RandomNetConfig, i: int, methods) -> list[BenchRecord]:
    seed = cfg.base_seed + i
    net = random_network(cfg, seed)
    box = random_input_box(net, seed, cfg.eps)
    dims = "-".join(map(str, net.dims))
    out = []
    for m in methods:
        start = time.perf_counter()
        try:
            width = reach(net, box, m).width
            error = ""
        except Exception as e:  # engine failures become rows, not aborts
            width, error = math.nan, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - start
        out.append(
            BenchRecord(i, seed, dims, net.n_neurons, m, elapsed, elapsed / net.n_neurons, width, error)
        )
    return out


def run_suite(cfg: RandomNetConfig, methods=("mm", "ibp"), workers: int | None = None) -> list[BenchRecord]:
    methods = list(dict.fromkeys(methods))
    if not methods:
        raise ValueError("at least one method is required")
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown methods {unknown}")
    builtin(cfg.activation)  # fail before generating anything

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda i: _run_instance(cfg, i, methods), range(cfg.count)))
    else:
        chunks = [_run_instance(cfg, i, methods) for i in range(cfg.count)]
    return [r for chunk in chunks for r in chunk]


@dataclass
class PairStats:
    method: str
    baseline: str
    n: int
    tighter_or_equal: float
    strictly_tighter: float


@dataclass
class ComparisonSummary:
    pairs: list[PairStats]
    mean_time_per_neuron: dict[str, float]
    failures: dict[str, int]

    def get(self, method: str, baseline: str) -> PairStats:
        for p in self.pairs:
            if p.method == method and p.baseline == baseline:
                return p
        raise KeyError((method, baseline))

    def to_dict(self) -> dict:
        return {
            "pairs": [asdict(p) for p in self.pairs],
            "mean_time_per_neuron": self.mean_time_per_neuron,
            "failures": self.failures,
        }

    def table(self) -> str:
        lines = [f"{'method':>8} {'vs':>8} {'n':>6} {'tighter/equal':>14} {'strictly':>9}"]
        for p in self.pairs:
            lines.append(
                f"{p.method:>8} {p.baseline:>8} {p.n:>6} {p.tighter_or_equal:>14.1%} {p.strictly_tighter:>9.1%}"
            )
        for m, t in self.mean_time_per_neuron.items():
            lines.append(f"mean time per neuron [{m}]: {t * 1e6:.1f} us")
        return "\n".join(lines)


def summarize(records) -> ComparisonSummary:
    """Pairwise tightness fractions over instances where both methods succeeded."""
    by_method: dict[str, dict[int, BenchRecord]] = {}
    for r in records:
        by_method.setdefault(r.method, {})[r.network_id] = r
    methods = list(by_method)
    if len(methods) < 2:
        raise MissingPairs(f"need at least two methods to compare, got {methods}")

    pairs = []
    for a in methods:
        for b in methods:
            if a == b:
                continue
            ids = [
                i for i, ra in by_method[a].items()
                if ra.ok and i in by_method[b] and by_method[b][i].ok
            ]
            if not ids:
                raise MissingPairs(f"no instance where both {a} and {b} succeeded")
            ge = strict = 0
            for i in ids:
                wa, wb = by_method[a][i].width, by_method[b][i].width
                equal = math.isclose(wa, wb, rel_tol=REL_TOL)
                ge += equal or wa < wb
                strict += (not equal) and wa < wb
            pairs.append(PairStats(a, b, len(ids), ge / len(ids), strict / len(ids)))

    times = {}
    for m, recs in by_method.items():
        ok = [r.elapsed_per_neuron for r in recs.values() if r.ok]
        times[m] = sum(ok) / len(ok) if ok else math.nan
    failures = {m: sum(not r.ok for r in recs.values()) for m, recs in by_method.items()}
    return ComparisonSummary(pairs, times, failures)


def write_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        w.writeheader()
        for r in records:
            row = asdict(r)
            row["width"] = repr(r.width)
            w.writerow(row)


def read_csv(path) -> list[BenchRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                BenchRecord(
                    network_id=int(row["network_id"]),
                    seed=int(row["seed"]),
                    dims=row["dims"],
                    n_neurons=int(row["n_neurons"]),
                    method=row["method"],
                    elapsed=float(row["elapsed"]),
                    elapsed_per_neuron=float(row["elapsed_per_neuron"]),
                    width=float(row["width"]),
                    error=row["error"],
                )
            )
    return out


def suite_metadata(cfg: RandomNetConfig, methods) -> dict:
    return {
        "config": cfg.to_dict(),
        "methods": list(methods),
        "seeds": [cfg.base_seed, cfg.base_seed + cfg.count - 1] if cfg.count else [],
        "prng": PRNG_ID,
    }


def write_summary(summary: ComparisonSummary, path, metadata: dict | None = None):
    doc = {"metadata": metadata or {}, **summary.to_dict()}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
