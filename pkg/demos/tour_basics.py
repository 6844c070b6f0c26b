"""
Tours, distances and the unified permutation space
==================================================

Load a vendored instance, score a few tours, and move a tour between
search spaces of different size.
"""

import numpy as np

from coeba.encoding import inflate, project, random_permutation
from coeba.operators import hamming, order_crossover, two_opt_step
from coeba.tsplib import distance, known_optima, load_instance, tour_length

rng = np.random.default_rng(0)

pr76 = load_instance("pr76")
print(pr76.name, pr76.dimension, "cities, optimum", known_optima()["pr76"])
print("d(1, 2) =", distance(pr76, 1, 2))

# a random tour is several times longer than the optimum
tour = random_permutation(pr76.dimension, rng)
print("random tour:", tour_length(pr76, tour))

# one 2-opt step reverses a segment; hamming counts the positions that moved
step = two_opt_step(tour, rng)
print("after one 2-opt step:", tour_length(pr76, step), "hamming", hamming(tour, step))

# a genome of the larger pr264 space decodes to pr76 by dropping ids > 76
big = random_permutation(264, rng)
small = project(big, 76)
print("projected length:", small.size, "first ids", small[:8])

# and a pr76 tour can be written back into that genome, leaving 77..264 in place
back = inflate(small, big)
print("roundtrip equal:", np.array_equal(back, big))

a, b = random_permutation(8, rng), random_permutation(8, rng)
child, _ = order_crossover(a, b, rng, cuts=(2, 5))
print("OX parents", a, b, "-> child", child)
