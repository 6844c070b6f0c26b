"""Coevolutionary bat algorithm (COEBA) for discrete multitasking.

One deme of bats per task. Each deme evolves with a discrete bat algorithm:
the Hamming distance to the deme best sets a velocity, the velocity picks
2-opt (short) or insertion (long) moves, the pulse rate gates a sampled
2-opt neighbourhood search around an elite, and loudness gates acceptance.
Every ``migration_period`` ticks each deme sends two copies of its bats to a
random other deme, adapted to that deme's dimension by projection or
inflation.

Random streams are derived from the run seed so that the result only
depends on ``(seed, config, scenario)``: one stream for initialisation, one
per deme and one per migration tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .encoding import inflate, project, random_permutation
from .evaluation import (BudgetExhausted, EvaluationBudget, Objective,
                         RunResult, Tracer)
from .operators import MoveKind, apply_move, best_sampled_neighbor, hamming
from .tsplib import TspInstance

__all__ = [
    "CoebaConfig",
    "Bat",
    "Deme",
    "deme_sizes",
    "new_bat",
    "initialize",
    "bat_iteration",
    "migrate",
    "adapt_dimension",
    "run",
]

_INIT, _DEME, _MIGRATION, _REBUILD = range(4)


def _stream(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(key)))


@dataclass
class CoebaConfig:
    population_size: int = 200
    migration_period: int = 100
    alpha: float = 0.98
    gamma: float = 0.98
    loudness_init_range: tuple[float, float] = (0.8, 1.0)
    pulse_init_range: tuple[float, float] = (0.0, 0.4)
    neighbor_samples: int = 10
    elite_pool_size: int = 10
    budget: int = 500_000
    seed: int = 0
    # rebuild demes from the pooled population every n ticks; 0 = never
    rebuild_period: int = 0
    trace_every: int = 10_000

    def validate(self, n_tasks: int) -> None:
        x, k = self.population_size, n_tasks
        if k < 2:
            raise ValueError(f"COEBA needs at least two tasks, got {k}")
        if x < 2 * k:
            raise ValueError(f"population_size {x} < 2 * {k} tasks")
        if self.migration_period < 1:
            raise ValueError("migration_period must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.neighbor_samples < 1 or self.elite_pool_size < 1:
            raise ValueError("neighbor_samples and elite_pool_size must be >= 1")
        lo, hi = self.pulse_init_range
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError(f"bad pulse_init_range {self.pulse_init_range}")
        lo, hi = self.loudness_init_range
        if not 0.0 <= lo <= hi:
            raise ValueError(f"bad loudness_init_range {self.loudness_init_range}")
        if self.budget < x * k:
            raise ValueError(
                f"budget {self.budget} cannot cover the {x * k} initial evaluations")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if min(deme_sizes(x, k)) < self.elite_pool_size + 2:
            raise ValueError(
                f"demes of {x // k} bats cannot protect {self.elite_pool_size} "
                "elites and still receive two migrants")


@dataclass(eq=False)
class Bat:
    position: np.ndarray
    fitness: int
    pulse_rate: float
    loudness: float
    initial_pulse_rate: float
    initial_loudness: float
    age: int = 0


@dataclass(eq=False)
class Deme:
    """Bats bound to one task (``task`` is a 0-based index)."""

    task: int
    bats: list[Bat]
    best_position: np.ndarray
    best_fitness: int
    dimension: int = field(init=False)

    def __post_init__(self) -> None:
        self.dimension = int(self.best_position.size)

    def ranking(self) -> list[int]:
        """Bat indices by ascending fitness; ties keep list order."""
        fit = [b.fitness for b in self.bats]
        return sorted(range(len(fit)), key=fit.__getitem__)

    def offer(self, position: np.ndarray, fitness: int) -> None:
        if fitness < self.best_fitness:
            self.best_fitness = fitness
            self.best_position = position.copy()


def deme_sizes(population_size: int, n_tasks: int) -> list[int]:
    """``floor(X/K)`` each, remainder handed out to the first demes."""
    base, rest = divmod(population_size, n_tasks)
    return [base + (k < rest) for k in range(n_tasks)]


def new_bat(position: np.ndarray, fitness: int, cfg: CoebaConfig,
            rng: np.random.Generator) -> Bat:
    r0 = float(rng.uniform(*cfg.pulse_init_range))
    a0 = float(rng.uniform(*cfg.loudness_init_range))
    # pulse schedule r0 * (1 - exp(-gamma * t)) evaluated at t = 0
    return Bat(position=position, fitness=int(fitness), pulse_rate=0.0,
               loudness=a0, initial_pulse_rate=r0, initial_loudness=a0)


def adapt_dimension(position: np.ndarray, replaced: np.ndarray) -> np.ndarray:
    """Fit ``position`` into the search space of ``replaced``."""
    if position.size > replaced.size:
        return project(position, replaced.size)
    if position.size < replaced.size:
        return inflate(position, replaced)
    return position.copy()


def _build_demes(pool: Sequence[np.ndarray], scores: np.ndarray, cfg: CoebaConfig,
                 rng: np.random.Generator, dims: Sequence[int]) -> list[Deme]:
    # scores[i, k]: fitness of pool[i] adapted to task k
    demes = []
    for k, size in enumerate(deme_sizes(len(pool), len(dims))):
        chosen = np.argsort(scores[:, k], kind="stable")[:size]
        bats = [new_bat(project(pool[i], dims[k]), scores[i, k], cfg, rng)
                for i in chosen]
        best = bats[0]
        demes.append(Deme(task=k, bats=bats, best_position=best.position.copy(),
                          best_fitness=best.fitness))
    return demes


def initialize(objectives: Sequence[Objective], cfg: CoebaConfig,
               rng: np.random.Generator):
    """Random unified population, evaluated on every task, split into demes.

    Returns ``(population, demes)``. Deme ``k`` receives the best
    ``deme_sizes(X, K)[k]`` individuals on task ``k``, projected to ``D_k``;
    one individual may end up in several demes.
    """
    k_tasks = len(objectives)
    if k_tasks < 2:
        raise ValueError(f"COEBA needs at least two tasks, got {k_tasks}")
    x = cfg.population_size
    needed = x * k_tasks
    budget = objectives[0].budget
    if budget.remaining < needed:
        raise ValueError(
            f"budget of {budget.remaining} cannot cover {needed} initial evaluations")
    dims = [obj.dimension for obj in objectives]
    d_max = max(dims)
    population = [random_permutation(d_max, rng) for _ in range(x)]
    scores = np.array([[obj(project(p, obj.dimension)) for obj in objectives]
                       for p in population], dtype=np.int64)
    return population, _build_demes(population, scores, cfg, rng, dims)


def bat_iteration(deme: Deme, cfg: CoebaConfig, objective: Objective,
                  rng: np.random.Generator) -> Deme:
    """One pass of the discrete bat update over every bat of ``deme``.

    Raises :class:`BudgetExhausted` mid-pass when the budget runs out; the
    deme is consistent at that point.
    """
    dim = deme.dimension
    budget = objective.budget
    elite_k = min(cfg.elite_pool_size, len(deme.bats))
    for bat in deme.bats:
        bat.age += 1
        if rng.random() > bat.pulse_rate:
            # local search around one of the best bats
            ranking = deme.ranking()
            elite = deme.bats[ranking[int(rng.integers(elite_k))]]
            n = min(cfg.neighbor_samples, budget.remaining)
            if n < 1:
                raise BudgetExhausted("no evaluations left")
            candidate, fit = best_sampled_neighbor(
                elite.position, n, objective, rng, fitness=elite.fitness)
        else:
            distance = hamming(bat.position, deme.best_position)
            v = int(rng.integers(1, max(1, distance) + 1))
            kind = MoveKind.TWO_OPT if v < dim / 2 else MoveKind.INSERTION
            candidate = apply_move(bat.position, kind, v, rng)
            fit = objective(candidate)
        if rng.random() < bat.loudness and fit < deme.best_fitness:
            bat.position = candidate
            bat.fitness = int(fit)
            bat.pulse_rate = bat.initial_pulse_rate * (
                1.0 - math.exp(-cfg.gamma * bat.age))
            bat.loudness *= cfg.alpha
            deme.offer(candidate, bat.fitness)
    return deme


def migrate(demes: list[Deme], cfg: CoebaConfig, rng: np.random.Generator,
            objectives: Sequence[Objective]) -> list[Deme]:
    """Send two adapted copies from every deme to a random other deme.

    Migrant one is drawn from the sender's elite pool, migrant two from the
    whole deme. They overwrite two random non-elite bats of the receiver and
    get fresh pulse/loudness draws. Migrants are evaluated on the receiving
    task.
    """
    k_tasks = len(demes)
    for k, source in enumerate(demes):
        others = [t for t in range(k_tasks) if t != k]
        target = demes[others[int(rng.integers(len(others)))]]
        ranking = source.ranking()
        elite_k = min(cfg.elite_pool_size, len(ranking))
        migrants = [source.bats[ranking[int(rng.integers(elite_k))]].position,
                    source.bats[int(rng.integers(len(source.bats)))].position]
        unprotected = target.ranking()[cfg.elite_pool_size:]
        if len(unprotected) < 2:
            raise ValueError(
                f"deme {target.task} has {len(target.bats)} bats, too few to "
                f"protect {cfg.elite_pool_size} elites")
        slots = rng.choice(unprotected, size=2, replace=False)
        for position, slot in zip(migrants, slots):
            slot = int(slot)
            arrived = adapt_dimension(position, target.bats[slot].position)
            fit = objectives[target.task](arrived)
            target.bats[slot] = new_bat(arrived, fit, cfg, rng)
            target.offer(arrived, fit)
    return demes


def _rebuild(demes: list[Deme], cfg: CoebaConfig, rng: np.random.Generator,
             objectives: Sequence[Objective]) -> list[Deme]:
    dims = [obj.dimension for obj in objectives]
    pool = [bat.position for deme in demes for bat in deme.bats]
    needed = len(pool) * len(objectives)
    if objectives[0].budget.remaining < needed:
        raise BudgetExhausted("not enough budget to rebuild demes")
    scores = np.empty((len(pool), len(dims)), dtype=np.int64)
    lifted = []
    for p in pool:
        if p.size < max(dims):
            p = inflate(p, random_permutation(max(dims), rng))
        lifted.append(p)
    for i, p in enumerate(lifted):
        for k, obj in enumerate(objectives):
            scores[i, k] = obj(project(p, dims[k]))
    fresh = _build_demes(lifted, scores, cfg, rng, dims)
    for old, new in zip(demes, fresh):
        new.offer(old.best_position, old.best_fitness)
    return fresh


def run(scenario: Sequence[TspInstance], cfg: CoebaConfig) -> RunResult:
    """Optimise all instances of ``scenario`` jointly until the budget is spent."""
    cfg.validate(len(scenario))
    budget = EvaluationBudget(cfg.budget)
    objectives = [Objective(inst, budget) for inst in scenario]
    tracer = Tracer(cfg.trace_every)
    _, demes = initialize(objectives, cfg, _stream(cfg.seed, _INIT))
    deme_rngs = [_stream(cfg.seed, _DEME, k) for k in range(len(demes))]
    tracer.checkpoint(budget.used, [d.best_fitness for d in demes])
    tick = 0
    try:
        while not budget.exhausted:
            tick += 1
            for deme, rng in zip(demes, deme_rngs):
                bat_iteration(deme, cfg, objectives[deme.task], rng)
            if tick % cfg.migration_period == 0:
                migrate(demes, cfg, _stream(cfg.seed, _MIGRATION, tick), objectives)
            if cfg.rebuild_period and tick % cfg.rebuild_period == 0:
                demes = _rebuild(demes, cfg, _stream(cfg.seed, _REBUILD, tick),
                                 objectives)
            tracer.checkpoint(budget.used, [d.best_fitness for d in demes])
    except BudgetExhausted:
        pass
    tracer.checkpoint(budget.used, [d.best_fitness for d in demes], force=True)
    return RunResult(
        instance_names=[inst.name for inst in scenario],
        best_tours=[d.best_position.copy() for d in demes],
        best_fitness=[int(d.best_fitness) for d in demes],
        evaluations_used=budget.used,
        trace=tracer.points,
    )
