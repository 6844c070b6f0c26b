"""Scenarios, experiment orchestration, result persistence and comparison reports.

Result directory layout (append-only, one file per run)::

    <out>/<scenario>/<solver>/seed_<seed>.json   one RunRecord each
    <out>/results.csv                            one row per (run, task)
    <out>/timings.csv                            wall-clock seconds per run

The JSON record deliberately leaves out wall-clock time so that re-running a
seed reproduces the file byte for byte; timings live in ``timings.csv``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import coevolution, mfea
from .encoding import format_permutation, parse_permutation
from .evaluation import EvaluationBudget, RunResult
from .stats import SampleSummary, WilcoxonResult, summarize, wilcoxon_rank_sum
from .tsplib import TspInstance, known_optima, load_instance

__all__ = [
    "INSTANCE_NAMES",
    "Scenario",
    "builtin_scenarios",
    "get_scenario",
    "SOLVERS",
    "make_config",
    "read_config_file",
    "RunRecord",
    "CSV_HEADER",
    "run_single",
    "run_experiment",
    "load_records",
    "InstanceComparison",
    "ComparisonReport",
    "compare",
    "report_all",
    "evaluation_budget_account",
    "parse_seeds",
]

log = logging.getLogger(__name__)

INSTANCE_NAMES = ("pr76", "pr107", "pr124", "pr136", "pr144", "pr152", "pr226", "pr264")

_MEMBERSHIP = {
    "Test_Case_4_1": "11110000",
    "Test_Case_4_2": "00001111",
    "Test_Case_4_3": "11000011",
    "Test_Case_4_4": "00111100",
    "Test_Case_4_5": "10110010",
    "Test_Case_4_6": "01001101",
    "Test_Case_4_7": "11010100",
    "Test_Case_4_8": "00101011",
    "Test_Case_4_9": "10011010",
    "Test_Case_4_10": "01100101",
    "Test_Case_6_1": "11111100",
    "Test_Case_6_2": "00111111",
    "Test_Case_6_3": "11001111",
    "Test_Case_6_4": "11011011",
    "Test_Case_8": "11111111",
}


@dataclass(frozen=True)
class Scenario:
    name: str
    instance_names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.instance_names) < 2:
            raise ValueError(f"scenario {self.name} needs at least two tasks")

    @property
    def n_tasks(self) -> int:
        return len(self.instance_names)

    def instances(self) -> list[TspInstance]:
        return [load_instance(name) for name in self.instance_names]


def builtin_scenarios() -> list[Scenario]:
    """The fifteen multitask test cases over the eight pr* instances."""
    return [Scenario(name, tuple(inst for inst, bit in zip(INSTANCE_NAMES, mask)
                                 if bit == "1"))
            for name, mask in _MEMBERSHIP.items()]


def get_scenario(name: str) -> Scenario:
    for scenario in builtin_scenarios():
        if scenario.name == name:
            return scenario
    raise KeyError(f"unknown scenario {name!r}")


SOLVERS = {
    "coeba": (coevolution.CoebaConfig, coevolution.run),
    "mfea": (mfea.MfeaConfig, mfea.run),
}


def _solver(solver: str):
    try:
        return SOLVERS[solver.lower()]
    except KeyError:
        raise KeyError(f"unknown solver {solver!r}; choose from {sorted(SOLVERS)}") from None


def _coerce(value, template):
    if not isinstance(value, str):
        return value
    if isinstance(template, bool):
        return value.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(template, int):
        return int(value)
    if isinstance(template, float):
        return float(value)
    if isinstance(template, tuple):
        return tuple(float(v) for v in value.replace("[", "").replace("]", "").split(","))
    return value


def make_config(solver: str, seed: int, budget: int, overrides: dict | None = None):
    """Solver config with defaults, then ``overrides``, then seed and budget.

    Override keys may carry a ``coeba.`` / ``mfea.`` prefix; keys prefixed
    for the other solver are ignored, unknown keys raise ``KeyError``.
    """
    cls, _ = _solver(solver)
    cfg = cls()
    fields = {f.name for f in dataclasses.fields(cls)}
    changes = {}
    for key, value in (overrides or {}).items():
        prefix, dot, bare = key.partition(".")
        if dot:
            if prefix.lower() != solver.lower():
                if prefix.lower() in SOLVERS:
                    continue
                raise KeyError(f"unknown config key {key!r}")
            key = bare
        if key not in fields:
            raise KeyError(f"unknown config key {key!r} for solver {solver}")
        if key in ("seed", "budget"):
            continue
        changes[key] = _coerce(value, getattr(cfg, key))
    return dataclasses.replace(cfg, **changes, seed=int(seed), budget=int(budget))


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    result = {}
    path = Path(path)
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":"
        key, found, value = line.partition(sep)
        if not found or not key.strip():
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        result[key.strip()] = value.strip()
    return result


CSV_HEADER = ("scenario", "solver", "seed", "budget", "evaluations_used",
              "task", "instance", "best_fitness", "best_tour")


@dataclass
class RunRecord:
    scenario: str
    solver: str
    seed: int
    budget: int
    instances: list[str]
    best_fitness: list[int]
    best_tours: list[np.ndarray]
    evaluations_used: int
    trace: list[tuple[int, int, int]] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    wall_clock_seconds: float = 0.0

    def __post_init__(self) -> None:
        if self.evaluations_used > self.budget:
            raise ValueError(
                f"run used {self.evaluations_used} evaluations, budget {self.budget}")
        optima = known_optima()
        for name, fit in zip(self.instances, self.best_fitness):
            if name in optima and fit < optima[name]:
                raise ValueError(
                    f"{name}: fitness {fit} below the known optimum {optima[name]}")

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "solver": self.solver,
            "seed": self.seed,
            "budget": self.budget,
            "evaluations_used": self.evaluations_used,
            "instances": list(self.instances),
            "best_fitness": [int(f) for f in self.best_fitness],
            "best_tours": [format_permutation(t) for t in self.best_tours],
            "config": _jsonable(self.config),
            "trace": [list(map(int, p)) for p in self.trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(
            scenario=data["scenario"],
            solver=data["solver"],
            seed=int(data["seed"]),
            budget=int(data["budget"]),
            instances=list(data["instances"]),
            best_fitness=[int(f) for f in data["best_fitness"]],
            best_tours=[parse_permutation(t) for t in data["best_tours"]],
            evaluations_used=int(data["evaluations_used"]),
            trace=[tuple(p) for p in data.get("trace", [])],
            config=dict(data.get("config", {})),
        )

    def csv_rows(self) -> list[dict]:
        return [{
            "scenario": self.scenario,
            "solver": self.solver,
            "seed": self.seed,
            "budget": self.budget,
            "evaluations_used": self.evaluations_used,
            "task": k,
            "instance": name,
            "best_fitness": int(fit),
            "best_tour": format_permutation(tour),
        } for k, (name, fit, tour) in enumerate(
            zip(self.instances, self.best_fitness, self.best_tours))]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def run_single(scenario: Scenario, solver: str, seed: int, budget: int,
               overrides: dict | None = None) -> RunRecord:
    cfg = make_config(solver, seed, budget, overrides)
    _, solve = _solver(solver)
    start = time.perf_counter()
    result: RunResult = solve(scenario.instances(), cfg)
    elapsed = time.perf_counter() - start
    return RunRecord(
        scenario=scenario.name,
        solver=solver.lower(),
        seed=int(seed),
        budget=int(budget),
        instances=list(result.instance_names),
        best_fitness=list(result.best_fitness),
        best_tours=list(result.best_tours),
        evaluations_used=result.evaluations_used,
        trace=[tuple(p) for p in result.trace],
        config=dataclasses.asdict(cfg),
        wall_clock_seconds=elapsed,
    )


def _run_single_args(args):
    return run_single(*args)


def _append_csv(path: Path, header: Sequence[str], rows: Iterable[dict]) -> None:
    new = not path.exists()
    with path.open("a", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(header))
        if new:
            writer.writeheader()
        writer.writerows(rows)


def record_path(out_dir: Path, scenario: str, solver: str, seed: int) -> Path:
    return Path(out_dir) / scenario / solver / f"seed_{seed:03d}.json"


def save_record(record: RunRecord, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    path = record_path(out_dir, record.scenario, record.solver, record.seed)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(record.to_json(), encoding="utf-8")
        _append_csv(out_dir / "results.csv", CSV_HEADER, record.csv_rows())
        _append_csv(out_dir / "timings.csv", ("scenario", "solver", "seed", "seconds"),
                    [{"scenario": record.scenario, "solver": record.solver,
                      "seed": record.seed,
                      "seconds": f"{record.wall_clock_seconds:.3f}"}])
    except OSError as exc:
        raise OSError(f"cannot write results for {record.scenario}/{record.solver}/"
                      f"seed {record.seed} under {out_dir}: {exc}") from exc
    return path


def run_experiment(scenario: Scenario | str, solver: str, seeds: Sequence[int],
                   budget: int, overrides: dict | None = None,
                   out_dir: str | Path | None = None, workers: int = 1) -> list[RunRecord]:
    """One run per seed; records are saved under ``out_dir`` when given."""
    if isinstance(scenario, str):
        scenario = get_scenario(scenario)
    cls, _ = _solver(solver)
    seeds = [int(s) for s in seeds]
    if len(set(seeds)) != len(seeds):
        raise ValueError(f"seeds must be distinct, got {seeds}")
    # validates budget against the initial evaluation cost before any work
    make_config(solver, 0, budget, overrides).validate(scenario.n_tasks)
    jobs = [(scenario, solver, seed, budget, overrides) for seed in seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_single_args, jobs))
    else:
        records = [run_single(*job) for job in jobs]
    for record in records:
        log.info("%s %s seed %d: %s", record.scenario, record.solver, record.seed,
                 record.best_fitness)
        if out_dir is not None:
            save_record(record, out_dir)
    return records


def load_records(in_dir: str | Path, scenario: str | None = None,
                 solver: str | None = None) -> list[RunRecord]:
    in_dir = Path(in_dir)
    pattern = f"{scenario or '*'}/{solver or '*'}/seed_*.json"
    records = []
    for path in sorted(in_dir.glob(pattern)):
        try:
            records.append(RunRecord.from_dict(json.loads(path.read_text(encoding="utf-8"))))
        except (OSError, ValueError, KeyError) as exc:
            raise ValueError(f"{path}: unreadable run record: {exc}") from exc
    return records


@dataclass(frozen=True)
class InstanceComparison:
    instance: str
    first: SampleSummary
    second: SampleSummary
    verdict: str
    wilcoxon: WilcoxonResult
    optimum: int | None = None


@dataclass
class ComparisonReport:
    """Per-instance comparison of two solvers, seen from ``solvers[0]``.

    Verdicts are ``WIN`` when the first solver has the lower mean, ``LOSS``
    when it has the higher one and ``TIE`` otherwise.
    """

    scenario: str
    solvers: tuple[str, str]
    rows: list[InstanceComparison]

    @property
    def verdicts(self) -> list[str]:
        return [row.verdict for row in self.rows]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "solvers": list(self.solvers),
            "verdicts": self.verdicts,
            "instances": [{
                "instance": r.instance,
                "optimum": r.optimum,
                "verdict": r.verdict,
                self.solvers[0]: dataclasses.asdict(r.first),
                self.solvers[1]: dataclasses.asdict(r.second),
                "wilcoxon": {**dataclasses.asdict(r.wilcoxon),
                             "significant_at_95": r.wilcoxon.significant_at_95},
            } for r in self.rows],
        }

    def csv_rows(self) -> list[dict]:
        a, b = self.solvers
        return [{
            "scenario": self.scenario,
            "instance": r.instance,
            "optimum": r.optimum if r.optimum is not None else "",
            f"{a}_mean": r.first.mean, f"{a}_best": r.first.best, f"{a}_std": r.first.std,
            f"{b}_mean": r.second.mean, f"{b}_best": r.second.best, f"{b}_std": r.second.std,
            "verdict": r.verdict,
            "rank_sum": r.wilcoxon.rank_sum_statistic,
            "z": r.wilcoxon.z_value,
            "p": r.wilcoxon.p_two_sided,
            "significant_at_95": r.wilcoxon.significant_at_95,
        } for r in self.rows]

    def to_text(self) -> str:
        a, b = self.solvers
        width = max(10, *(len(r.instance) + 2 for r in self.rows))
        head = f"{'':<14}" + "".join(f"{r.instance:>{width}}" for r in self.rows)
        lines = [f"{self.scenario}: {a.upper()} vs {b.upper()}", head]

        def row(label, values, fmt):
            lines.append(f"{label:<14}" + "".join(f"{fmt(v):>{width}}" for v in values))

        for name, key in ((a, "first"), (b, "second")):
            sums = [getattr(r, key) for r in self.rows]
            row(f"{name.upper()} avg", [s.mean for s in sums], lambda v: f"{v:.1f}")
            row(f"{name.upper()} best", [s.best for s in sums], lambda v: f"{v:.1f}")
            row(f"{name.upper()} std", [s.std for s in sums], lambda v: f"{v:.2f}")
        row("Optima", [r.optimum for r in self.rows],
            lambda v: "-" if v is None else f"{v:.1f}")
        row("Verdict", self.verdicts, str)
        row("Wilcoxon z", [r.wilcoxon.z_value for r in self.rows], lambda v: f"{v:.2f}")
        row("Wilcoxon p", [r.wilcoxon.p_two_sided for r in self.rows], lambda v: f"{v:.4g}")
        row("Signif. 95%", [r.wilcoxon.significant_at_95 for r in self.rows],
            lambda v: "yes" if v else "no")
        return "\n".join(lines) + "\n"


def compare(first: Sequence[RunRecord], second: Sequence[RunRecord]) -> ComparisonReport:
    """Compare two solvers on one scenario (``first`` is the reference, e.g. COEBA)."""
    groups = []
    for records in (first, second):
        if len(records) < 2:
            raise ValueError("each solver needs at least two runs to compare")
        scenarios = {r.scenario for r in records}
        solvers = {r.solver for r in records}
        if len(scenarios) != 1 or len(solvers) != 1:
            raise ValueError(f"records mix scenarios {scenarios} or solvers {solvers}")
        groups.append((scenarios.pop(), solvers.pop()))
    (sc_a, solver_a), (sc_b, solver_b) = groups
    if sc_a != sc_b:
        raise ValueError(f"mismatched scenarios: {sc_a} vs {sc_b}")
    instances = first[0].instances
    if any(r.instances != instances for r in [*first, *second]):
        raise ValueError("records disagree on the instance list")
    optima = known_optima()
    rows = []
    for k, name in enumerate(instances):
        xa = [r.best_fitness[k] for r in first]
        xb = [r.best_fitness[k] for r in second]
        sa, sb = summarize(xa), summarize(xb)
        verdict = "WIN" if sa.mean < sb.mean else "LOSS" if sa.mean > sb.mean else "TIE"
        rows.append(InstanceComparison(name, sa, sb, verdict, wilcoxon_rank_sum(xa, xb),
                                       optima.get(name)))
    return ComparisonReport(sc_a, (solver_a, solver_b), rows)


def report_all(in_dir: str | Path, out_dir: str | Path | None = None,
               first: str = "coeba", second: str = "mfea") -> list[ComparisonReport]:
    """Compare the two solvers on every scenario found under ``in_dir``.

    Writes ``report.txt``, ``report.json`` and ``report.csv`` to ``out_dir``
    (default ``in_dir``): a verdict line per scenario followed by the full
    per-instance table of each scenario.
    """
    in_dir = Path(in_dir)
    out_dir = Path(out_dir) if out_dir is not None else in_dir
    order = {s.name: i for i, s in enumerate(builtin_scenarios())}
    names = sorted({p.name for p in in_dir.iterdir() if p.is_dir()},
                   key=lambda n: (order.get(n, len(order)), n))
    reports = []
    for name in names:
        a = load_records(in_dir, name, first)
        b = load_records(in_dir, name, second)
        if len(a) >= 2 and len(b) >= 2:
            reports.append(compare(a, b))
    summary = [f"{'Scenario':<18}{first.upper()} vs {second.upper()}"]
    summary += [f"{r.scenario:<18}{'-'.join(r.verdicts)}" for r in reports]
    text = "\n".join(summary) + "\n\n" + "\n".join(r.to_text() for r in reports)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.txt").write_text(text, encoding="utf-8")
    (out_dir / "report.json").write_text(
        json.dumps([r.to_dict() for r in reports], indent=1) + "\n", encoding="utf-8")
    rows = [row for r in reports for row in r.csv_rows()]
    if rows:
        with (out_dir / "report.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    return reports


def evaluation_budget_account(limit: int) -> EvaluationBudget:
    """Fresh per-run evaluation counter.

    Every objective call of a run (initialisation, movement candidates,
    neighbour samples, migrants, offspring) is charged to one such counter;
    a run stops at the first evaluation that would exceed ``limit``.
    """
    return EvaluationBudget(limit)


def parse_seeds(text: str) -> list[int]:
    """``"1-20"``, ``"1,4,7"`` or a mix like ``"1-3,10"``."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    return seeds
