"""Shared fixtures and independent oracles.

The oracles here deliberately use naive formulations (quadruple loops,
central finite differences, brute-force scans) so they share no code path
with the implementations they check.
"""

import numpy as np
import pytest
import scipy.sparse as sp

from kgalign import KnowledgeGraph, uniform_marginals


def graph_from_name_triples(triples, attrs=()):
    """Build a KnowledgeGraph from (head, rel, tail) name triples,
    assigning ids in first-appearance order like the TSV loader."""
    entities, relations = [], []
    e_id, r_id = {}, {}
    rows = []
    for h, r, t in triples:
        for name in (h, t):
            if name not in e_id:
                e_id[name] = len(entities)
                entities.append(name)
        if r not in r_id:
            r_id[r] = len(relations)
            relations.append(r)
        rows.append((e_id[h], r_id[r], e_id[t]))
    attr_rows = [(e_id[e], a, l) for e, a, l in attrs]
    return KnowledgeGraph(entities, relations, np.array(rows, dtype=np.int64).reshape(-1, 3),
                          attr_rows)


def gwd_quadruple_sum(adj, adj2, pi):
    """Naive O(m^2 n^2) structural objective."""
    a = adj.toarray() if sp.issparse(adj) else np.asarray(adj)
    b = adj2.toarray() if sp.issparse(adj2) else np.asarray(adj2)
    m, n = pi.shape
    total = 0.0
    for i in range(m):
        for j in range(m):
            for k in range(n):
                for l in range(n):
                    total += (a[i, j] - b[k, l]) ** 2 * pi[i, k] * pi[j, l]
    return total


def fd_gradient(adj, adj2, pi, step=1e-6):
    """Central finite differences of the quadruple-sum objective."""
    grad = np.zeros_like(pi)
    for p in range(pi.shape[0]):
        for q in range(pi.shape[1]):
            up = pi.copy()
            up[p, q] += step
            down = pi.copy()
            down[p, q] -= step
            grad[p, q] = (gwd_quadruple_sum(adj, adj2, up)
                          - gwd_quadruple_sum(adj, adj2, down)) / (2 * step)
    return grad


def random_adjacency(rng, n, p=0.5):
    """Random symmetric binary adjacency with empty diagonal, >= 1 edge."""
    while True:
        upper = rng.random((n, n)) < p
        a = np.triu(upper, k=1)
        a = (a | a.T).astype(np.int8)
        if a.sum() > 0:
            return sp.csr_matrix(a)


def random_feasible_coupling(rng, m, n, moves=30):
    """Exactly feasible random coupling: independence plus marginal-preserving
    cycle perturbations, so row/column sums hold to machine precision."""
    marg = uniform_marginals(m, n)
    pi = np.outer(marg.mu, marg.nu)
    for _ in range(moves):
        i, i2 = rng.choice(m, size=2, replace=False) if m > 1 else (0, 0)
        j, j2 = rng.choice(n, size=2, replace=False) if n > 1 else (0, 0)
        if i == i2 or j == j2:
            continue
        t = rng.random() * min(pi[i, j2], pi[i2, j])
        pi[i, j] += t
        pi[i2, j2] += t
        pi[i, j2] -= t
        pi[i2, j] -= t
    return pi


def mutual_argmax_oracle(pi):
    """Brute-force mutual-argmax pairs with first-index tie breaking."""
    pairs = set()
    m, n = pi.shape
    for i in range(m):
        j = max(range(n), key=lambda jj: (pi[i, jj], -jj))
        i2 = max(range(m), key=lambda ii: (pi[ii, j], -ii))
        if i2 == i:
            pairs.add((i, j))
    return pairs


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
