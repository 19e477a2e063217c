"""Matching two graphs by structure alone.

Takes a small random graph and a shuffled copy, then recovers the hidden
permutation with the proximal-gradient refinement loop, starting from a
coupling whose best guesses are partly wrong.  No entity names, no
embeddings: only adjacency overlap drives this.
"""

import numpy as np

from kgalign import (GwContext, SynthSpec, bpg_refine, generate, gwd_objective,
                     sinkhorn, uniform_marginals)

n = 40
graph, graph2, _, _, gold = generate(SynthSpec(n_entities=n, edge_density=0.12, seed=21))
perm = np.zeros(n, dtype=int)
for i, j in gold.pairs:
    perm[i] = j

marg = uniform_marginals(n, n)
ctx = GwContext(graph.adjacency, graph2.adjacency, marg)

# perfect matching scores zero structural discrepancy
pi_true = np.zeros((n, n))
pi_true[np.arange(n), perm] = 1.0 / n
print("structural objective at the true permutation:", gwd_objective(ctx, pi_true))

# corrupt the permutation, then renormalize into a feasible warm start
rng = np.random.default_rng(0)
raw = pi_true + 0.035 * rng.random((n, n))
pi0 = sinkhorn(-np.log(raw), marg, eta=1.0, iters=30)
start_errors = int(sum(pi0[i].argmax() != perm[i] for i in range(n)))
print(f"warm start: {start_errors} of {n} rows point at the wrong node")
print("structural objective at the warm start:", round(gwd_objective(ctx, pi0), 5))

refined, trace = bpg_refine(ctx, np.zeros((n, n)), alpha=0.01, pi_init=pi0,
                            beta=100.0, max_iter=500, eval_every=10, rel_tol=1e-9)
end_errors = int(sum(refined[i].argmax() != perm[i] for i in range(n)))

print(f"\nafter refinement: {end_errors} wrong rows")
print("objective trace (iteration, structural term):")
for rec in trace[:6]:
    print(f"  {rec.iteration:4d}  {rec.f_gwd:.6f}")
print(f"  ... {len(trace)} evaluations total, best {min(r.f_gwd for r in trace):.2e}")
