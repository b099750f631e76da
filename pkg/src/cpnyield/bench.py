"""Timing harness: mean solve time per instance and algorithm, as CSV.

Config (JSON)::

    {
      "seed": 0,
      "repetitions": 10,
      "epsilon": "1/1000",
      "cap": 400,
      "mode": "limit",
      "algorithms": ["binsearch", "milp"],
      "instances": [
        {"lattice": [5, 5], "resource_fractions": ["1/10"]},
        {"file": "nets/ecoli.json", "goal": "p17", "resource_fractions": ["1/2", "9/10"]}
      ]
    }

Each trial draws fresh resources (and a goal unless one is fixed) from a
seed derived from the master seed and the trial's position, so every
algorithm sees the same trials and reruns are reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

from .generators import lattice_net, random_resources
from .milp import DEFAULT_CAP, milp_max
from .net import Cpn, Marking
from .netfile import FormatError, fmt_rational, load_net, parse_rational
from .reach import ReachMode
from .yields import DEFAULT_EPSILON, max_yield_binsearch

log = logging.getLogger(__name__)

ALGORITHMS = ("binsearch", "milp")
COLUMNS = (
    "instance",
    "algorithm",
    "rows",
    "cols",
    "resource_fraction",
    "repetitions",
    "mean_seconds",
    "mean_alr_call_seconds",
    "cuts_mean",
)


@dataclass
class Instance:
    label: str
    net: Cpn
    rows: Optional[int] = None
    cols: Optional[int] = None
    goal: Optional[str] = None
    fractions: tuple[Fraction, ...] = (Fraction(1, 10),)

    @property
    def size(self) -> int:
        return len(self.net.places) + len(self.net.transitions)


@dataclass
class BenchConfig:
    instances: list[Instance]
    algorithms: tuple[str, ...] = ALGORITHMS
    repetitions: int = 10
    epsilon: Fraction = DEFAULT_EPSILON
    cap: int = DEFAULT_CAP
    seed: int = 0
    mode: ReachMode = ReachMode.LIMIT
    workers: int = 1


@dataclass
class BenchRow:
    instance: str
    algorithm: str
    rows: Optional[int]
    cols: Optional[int]
    resource_fraction: Fraction
    repetitions: int
    mean_seconds: float
    mean_alr_call_seconds: Optional[float]
    cuts_mean: Optional[float]
    size: int = 0
    values: list = field(default_factory=list)
    statuses: list[str] = field(default_factory=list)

    def csv_fields(self) -> list[str]:
        def num(x):
            return "" if x is None else f"{x:.5f}"

        return [
            self.instance,
            self.algorithm,
            "" if self.rows is None else str(self.rows),
            "" if self.cols is None else str(self.cols),
            fmt_rational(self.resource_fraction),
            str(self.repetitions),
            num(self.mean_seconds),
            num(self.mean_alr_call_seconds),
            num(self.cuts_mean),
        ]


def _fractions(spec: Any, where: str) -> tuple[Fraction, ...]:
    if spec is None:
        return (Fraction(1, 10),)
    if not isinstance(spec, list) or not spec:
        raise FormatError(where, "expected a nonempty list of fractions")
    out = tuple(parse_rational(x, f"{where}[{i}]") for i, x in enumerate(spec))
    if any(not 0 < f <= 1 for f in out):
        raise FormatError(where, "resource fractions must lie in (0, 1]")
    return out


def load_config(text: str, base: Path = Path(".")) -> BenchConfig:
    """Parse a JSON config; instance file paths are relative to ``base``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{exc.lineno}:{exc.colno}", exc.msg) from None
    if not isinstance(doc, dict):
        raise FormatError("$", "expected an object")
    instances = []
    for i, item in enumerate(doc.get("instances") or []):
        where = f"$.instances[{i}]"
        if not isinstance(item, dict):
            raise FormatError(where, "expected an object")
        fractions = _fractions(item.get("resource_fractions"), where + ".resource_fractions")
        if "lattice" in item:
            dims = item["lattice"]
            if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(d, int) and d >= 1 for d in dims)):
                raise FormatError(where + ".lattice", "expected [rows, cols] with positive integers")
            r, c = dims
            instances.append(Instance(item.get("label", f"{r}x{c}"), lattice_net(r, c), r, c, None, fractions))
        elif "file" in item:
            path = base / item["file"]
            try:
                text_net = path.read_text()
            except OSError as exc:
                raise FormatError(where + ".file", f"cannot read {path}: {exc.strerror}") from None
            nf = load_net(text_net)
            goal = item.get("goal")
            if goal is not None and goal not in nf.net.place_index:
                raise FormatError(where + ".goal", f"unknown place {goal!r}")
            instances.append(Instance(item.get("label", nf.name or path.stem), nf.net, None, None, goal, fractions))
        else:
            raise FormatError(where, "instance needs 'lattice' or 'file'")
    if not instances:
        raise FormatError("$.instances", "no instances")
    algorithms = tuple(doc.get("algorithms", ALGORITHMS))
    for a in algorithms:
        if a not in ALGORITHMS:
            raise FormatError("$.algorithms", f"unknown algorithm {a!r}")
    reps = doc.get("repetitions", 10)
    if not isinstance(reps, int) or reps < 1:
        raise FormatError("$.repetitions", "must be a positive integer")
    cap = doc.get("cap", DEFAULT_CAP)
    if not isinstance(cap, int) or cap < 1:
        raise FormatError("$.cap", "must be a positive integer")
    epsilon = parse_rational(doc.get("epsilon", "1/1000"), "$.epsilon")
    if epsilon <= 0:
        raise FormatError("$.epsilon", "must be positive")
    try:
        mode = ReachMode(doc.get("mode", "limit"))
    except ValueError:
        raise FormatError("$.mode", "must be 'finite' or 'limit'") from None
    seed = doc.get("seed", 0)
    workers = doc.get("workers", 1)
    if not isinstance(seed, int) or seed < 0:
        raise FormatError("$.seed", "must be a nonnegative integer")
    if not isinstance(workers, int) or workers < 1:
        raise FormatError("$.workers", "must be a positive integer")
    return BenchConfig(instances, algorithms, reps, epsilon, cap, seed, mode, workers)


def trials(inst: Instance, fraction: Fraction, seed: int, key: tuple[int, int], repetitions: int) -> list[tuple[Marking, str]]:
    """Per-trial (m0, goal) draws for one row; independent of the algorithm."""
    out = []
    for r in range(repetitions):
        ss = np.random.SeedSequence(seed, spawn_key=(*key, r))
        m0, goal = random_resources(inst.net, fraction, np.random.Generator(np.random.PCG64(ss)))
        out.append((m0, inst.goal or goal))
    return out


def _solve(cfg: BenchConfig, algorithm: str, net: Cpn, m0: Marking, goal: str):
    if algorithm == "binsearch":
        return max_yield_binsearch(net, m0, goal, cfg.epsilon, cfg.mode)
    return milp_max(net, m0, goal, cap=cfg.cap, strict_finite=cfg.mode is ReachMode.FINITE)


def _rows_for(cfg: BenchConfig, i: int, inst: Instance) -> list[BenchRow]:
    rows = []
    for k, fraction in enumerate(inst.fractions):
        draws = trials(inst, fraction, cfg.seed, (i, k), cfg.repetitions)
        for algorithm in cfg.algorithms:
            elapsed = 0.0
            alr_time = 0.0
            alr_calls = 0
            cuts = 0
            values, statuses = [], []
            for m0, goal in draws:
                t0 = time.perf_counter()
                res = _solve(cfg, algorithm, inst.net, m0, goal)
                elapsed += time.perf_counter() - t0
                alr_time += res.alr_seconds
                alr_calls += res.queries if algorithm == "binsearch" else 0
                cuts += res.cuts
                values.append(res.value)
                statuses.append(res.status)
            n = cfg.repetitions
            rows.append(
                BenchRow(
                    inst.label,
                    algorithm,
                    inst.rows,
                    inst.cols,
                    fraction,
                    n,
                    elapsed / n,
                    (alr_time / alr_calls if alr_calls else None) if algorithm == "binsearch" else None,
                    cuts / n if algorithm == "milp" else None,
                    inst.size,
                    values,
                    statuses,
                )
            )
            log.info("%s %s %s: %.5f s", inst.label, algorithm, fmt_rational(fraction), elapsed / n)
    return rows


def run_bench(cfg: BenchConfig) -> list[BenchRow]:
    """One row per instance x resource fraction x algorithm, in config order."""
    jobs = list(enumerate(cfg.instances))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(lambda job: _rows_for(cfg, *job), jobs))
    else:
        parts = [_rows_for(cfg, i, inst) for i, inst in jobs]
    return [row for part in parts for row in part]


def to_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow(row.csv_fields())
    return buf.getvalue()
