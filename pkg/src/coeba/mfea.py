"""Multifactorial evolutionary algorithm (MFEA) on the unified permutation space.

Genomes are permutations of ``D_max``; task ``k`` decodes a genome by
projecting it onto ``1..D_k``. Individuals are compared through factorial
ranks, scalar fitness ``1 / min_k rank_k`` and the skill factor
``argmin_k rank_k``. Offspring are only evaluated on the skill factor they
inherit (selective evaluation) and survival is elitist over parents plus
offspring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .encoding import project, random_permutation
from .evaluation import (BudgetExhausted, EvaluationBudget, Objective,
                         RunResult, Tracer)
from .operators import order_crossover, two_opt_step
from .tsplib import TspInstance

__all__ = [
    "UNEVALUATED",
    "MfeaConfig",
    "MfeaIndividual",
    "Mating",
    "rank_population",
    "assortative_mating",
    "run",
]

UNEVALUATED = math.inf


@dataclass
class MfeaConfig:
    population_size: int = 200
    crossover_prob: float = 0.9
    mutation_prob: float = 0.1
    budget: int = 500_000
    seed: int = 0
    trace_every: int = 10_000

    def validate(self, n_tasks: int) -> None:
        n = self.population_size
        if n_tasks < 1:
            raise ValueError("MFEA needs at least one task")
        if n < 2 or n % 2:
            raise ValueError(f"population_size must be even and >= 2, got {n}")
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.budget < n * n_tasks:
            raise ValueError(
                f"budget {self.budget} cannot cover the {n * n_tasks} initial evaluations")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(eq=False)
class MfeaIndividual:
    genome: np.ndarray
    factorial_costs: np.ndarray
    factorial_ranks: np.ndarray = field(default=None)
    scalar_fitness: float = 0.0
    skill_factor: int = 0

    @classmethod
    def unevaluated(cls, genome: np.ndarray, n_tasks: int) -> "MfeaIndividual":
        return cls(genome=genome, factorial_costs=np.full(n_tasks, UNEVALUATED))


class Mating(NamedTuple):
    genomes: tuple[np.ndarray, np.ndarray]
    skill_factors: tuple[int, int]
    crossed: bool


def rank_population(pop: list[MfeaIndividual]) -> list[MfeaIndividual]:
    """Recompute factorial ranks, scalar fitness and skill factor in place.

    Ranks per task follow ascending cost with ties in list order;
    unevaluated entries get rank ``len(pop) + 1``.
    """
    if not pop:
        raise ValueError("cannot rank an empty population")
    costs = np.array([ind.factorial_costs for ind in pop], dtype=float)
    n, k = costs.shape
    ranks = np.empty((n, k), dtype=np.int64)
    for task in range(k):
        order = np.argsort(costs[:, task], kind="stable")
        ranks[order, task] = np.arange(1, n + 1)
    ranks[~np.isfinite(costs)] = n + 1
    best = ranks.min(axis=1)
    skills = ranks.argmin(axis=1)
    for i, ind in enumerate(pop):
        ind.factorial_ranks = ranks[i]
        ind.scalar_fitness = 1.0 / best[i]
        ind.skill_factor = int(skills[i])
    return pop


def assortative_mating(parent_a: MfeaIndividual, parent_b: MfeaIndividual,
                       cfg: MfeaConfig, rng: np.random.Generator) -> Mating:
    """Produce two offspring genomes and the skill factors they imitate."""
    sa, sb = parent_a.skill_factor, parent_b.skill_factor
    if sa == sb or rng.random() < cfg.crossover_prob:
        g1, g2 = order_crossover(parent_a.genome, parent_b.genome, rng)
        skills = (sa if rng.random() < 0.5 else sb,
                  sa if rng.random() < 0.5 else sb)
        crossed = True
    else:
        g1 = two_opt_step(parent_a.genome, rng)
        g2 = two_opt_step(parent_b.genome, rng)
        skills = (sa, sb)
        crossed = False
    if rng.random() < cfg.mutation_prob:
        g1 = two_opt_step(g1, rng)
    if rng.random() < cfg.mutation_prob:
        g2 = two_opt_step(g2, rng)
    return Mating((g1, g2), skills, crossed)


class _BestSoFar:
    def __init__(self, dims: Sequence[int]):
        self.fitness = [math.inf] * len(dims)
        self.tours: list[np.ndarray | None] = [None] * len(dims)

    def offer(self, task: int, tour: np.ndarray, cost: int) -> None:
        if cost < self.fitness[task]:
            self.fitness[task] = cost
            self.tours[task] = tour


def run(scenario: Sequence[TspInstance], cfg: MfeaConfig) -> RunResult:
    """Generational MFEA until the evaluation budget is spent."""
    k_tasks = len(scenario)
    cfg.validate(k_tasks)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed]))
    budget = EvaluationBudget(cfg.budget)
    objectives = [Objective(inst, budget) for inst in scenario]
    dims = [inst.dimension for inst in scenario]
    d_max = max(dims)
    best = _BestSoFar(dims)
    tracer = Tracer(cfg.trace_every)
    n = cfg.population_size

    pop = []
    for _ in range(n):
        ind = MfeaIndividual.unevaluated(random_permutation(d_max, rng), k_tasks)
        for k, obj in enumerate(objectives):
            tour = project(ind.genome, dims[k])
            ind.factorial_costs[k] = cost = obj(tour)
            best.offer(k, tour, cost)
        pop.append(ind)
    rank_population(pop)
    tracer.checkpoint(budget.used, best.fitness)

    while not budget.exhausted:
        order = rng.permutation(n)
        offspring = []
        try:
            for a, b in zip(order[0::2], order[1::2]):
                mating = assortative_mating(pop[a], pop[b], cfg, rng)
                for genome, skill in zip(mating.genomes, mating.skill_factors):
                    child = MfeaIndividual.unevaluated(genome, k_tasks)
                    tour = project(genome, dims[skill])
                    child.factorial_costs[skill] = cost = objectives[skill](tour)
                    best.offer(skill, tour, cost)
                    offspring.append(child)
        except BudgetExhausted:
            pass
        merged = rank_population(pop + offspring)
        keep = np.argsort([-ind.scalar_fitness for ind in merged], kind="stable")[:n]
        pop = rank_population([merged[i] for i in keep])
        tracer.checkpoint(budget.used, best.fitness)

    tracer.checkpoint(budget.used, best.fitness, force=True)
    return RunResult(
        instance_names=[inst.name for inst in scenario],
        best_tours=[t.copy() for t in best.tours],
        best_fitness=[int(f) for f in best.fitness],
        evaluations_used=budget.used,
        trace=tracer.points,
    )
