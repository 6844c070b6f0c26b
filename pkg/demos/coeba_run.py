"""
One COEBA run on a four-task scenario
=====================================

Four pr* instances are optimised at once, one deme of bats per instance.
The budget here is a tenth of the full experiment so the script finishes
in a few seconds.
"""

from coeba import coevolution
from coeba.harness import get_scenario
from coeba.tsplib import known_optima

scenario = get_scenario("Test_Case_4_1")
instances = scenario.instances()

cfg = coevolution.CoebaConfig(budget=50_000, seed=1, trace_every=10_000)
result = coevolution.run(instances, cfg)

print("evaluations used:", result.evaluations_used)
optima = known_optima()
for name, fit in zip(result.instance_names, result.best_fitness):
    print(f"{name:>6} {fit:>8} gap {100 * (fit - optima[name]) / optima[name]:5.1f}%")

# the trace holds the best length per task every 10k evaluations
print("\npr76 progress:")
for point in result.trace:
    if point.task == 0:
        print(f"  {point.evaluations_used:>6} {point.best_fitness}")
