"""
The MFEA baseline on the same scenario
======================================

Same four instances and budget as the COEBA demo. MFEA keeps one unified
population and evaluates each child only on the task it imitates.
"""

from dataclasses import replace

import numpy as np

from coeba import mfea
from coeba.harness import get_scenario

instances = get_scenario("Test_Case_4_1").instances()
cfg = mfea.MfeaConfig(budget=50_000, seed=1, trace_every=5_000)
result = mfea.run(instances, cfg)

print("evaluations used:", result.evaluations_used)
for name, fit in zip(result.instance_names, result.best_fitness):
    print(f"{name:>6} {fit:>8}")

# factorial ranks on a toy population of three individuals and two tasks
pop = [mfea.MfeaIndividual(np.arange(1, 5), np.array(c, float))
       for c in ([10, 300], [12, 200], [30, 100])]
for ind in mfea.rank_population(pop):
    print("ranks", ind.factorial_ranks, "scalar fitness", ind.scalar_fitness,
          "skill", ind.skill_factor)

# with the crossover gate shut, parents of different skills only mutate
shut = replace(cfg, crossover_prob=0.0)
pop[0].skill_factor, pop[2].skill_factor = 0, 1
m = mfea.assortative_mating(pop[0], pop[2], shut, np.random.default_rng(0))
print("crossed:", m.crossed, "skills:", m.skill_factors)
