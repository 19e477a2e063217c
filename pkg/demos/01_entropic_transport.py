"""Entropic optimal transport on a toy cost matrix.

Builds a small cost matrix, solves it with the fixed-iteration scaling
solver, and shows the two things every downstream stage relies on: row
marginals are exact, and cheap cells soak up the probability mass.
"""

import numpy as np

from kgalign import sinkhorn, uniform_marginals, wd_objective

cost = np.array([
    [0.1, 0.9, 0.8],
    [0.9, 0.2, 0.7],
    [0.8, 0.9, 0.1],
])
marg = uniform_marginals(3, 3)

pi = sinkhorn(cost, marg, eta=0.1, iters=10)

np.set_printoptions(precision=4, suppress=True)
print("cost matrix:\n", cost)
print("\ncoupling after 10 scaling rounds:\n", pi)
print("\nrow sums   :", pi.sum(axis=1), " (target", marg.mu, ")")
print("column sums:", pi.sum(axis=0), " (target", marg.nu, ")")
print("\ntransport objective <C, pi> =", round(wd_objective(cost, pi), 6))

independent = np.outer(marg.mu, marg.nu)
print("objective at independent coupling =", round(wd_objective(cost, independent), 6))
print("\nthe solver routes mass onto the cheap diagonal, far below the")
print("independent baseline, while keeping every row mass exactly 1/3.")

# sharper regularization concentrates further
pi_sharp = sinkhorn(cost, marg, eta=0.02, iters=10)
print("\nwith eta = 0.02 the coupling is almost a permutation:\n", pi_sharp)
