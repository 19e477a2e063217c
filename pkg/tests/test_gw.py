import numpy as np
import pytest
import scipy.sparse as sp

import kgalign.gw as gw_mod
from kgalign import (GwContext, SynthSpec, bpg_refine, fgw_objective, generate,
                     gwd_gradient, gwd_objective, sinkhorn, uniform_marginals,
                     wd_objective)
from conftest import (fd_gradient, gwd_quadruple_sum, random_adjacency,
                      random_feasible_coupling)


def make_ctx(adj, adj2):
    return GwContext(sp.csr_matrix(adj), sp.csr_matrix(adj2),
                     uniform_marginals(adj.shape[0], adj2.shape[0]))


def perm_coupling(perm):
    n = len(perm)
    pi = np.zeros((n, n))
    pi[np.arange(n), perm] = 1.0 / n
    return pi


class TestGwdObjective:
    def test_identical_graphs_perfect_matching_zero(self):
        a = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
        ctx = make_ctx(a, a)
        assert gwd_objective(ctx, perm_coupling([0, 1, 2])) == pytest.approx(0.0, abs=1e-15)

    def test_edge_vs_isolated_hand_value(self):
        a = np.array([[0, 1], [1, 0]])
        b = np.zeros((2, 2), dtype=int)
        ctx = make_ctx(a, b)
        pi = np.full((2, 2), 0.25)
        assert gwd_objective(ctx, pi) == pytest.approx(0.5)
        assert gwd_quadruple_sum(sp.csr_matrix(a), sp.csr_matrix(b), pi) == pytest.approx(0.5)

    def test_matches_quadruple_sum_at_independence(self, rng):
        for _ in range(10):
            m, n = rng.integers(2, 6, size=2)
            a, b = random_adjacency(rng, m), random_adjacency(rng, n)
            ctx = make_ctx(a, b)
            marg = ctx.marg
            pi = np.outer(marg.mu, marg.nu)
            ref = gwd_quadruple_sum(a, b, pi)
            assert gwd_objective(ctx, pi) == pytest.approx(ref, rel=1e-12, abs=1e-15)

    def test_matches_quadruple_sum_on_random_feasible(self, rng):
        for _ in range(25):
            m, n = rng.integers(2, 6, size=2)
            a, b = random_adjacency(rng, m), random_adjacency(rng, n)
            ctx = make_ctx(a, b)
            pi = random_feasible_coupling(rng, m, n)
            ref = gwd_quadruple_sum(a, b, pi)
            assert gwd_objective(ctx, pi) == pytest.approx(ref, rel=1e-12, abs=1e-15)

    def test_nonnegative(self, rng):
        a, b = random_adjacency(rng, 5), random_adjacency(rng, 4)
        ctx = make_ctx(a, b)
        pi = random_feasible_coupling(rng, 5, 4)
        assert gwd_objective(ctx, pi) >= -1e-12


class TestGwdGradient:
    def test_empty_graphs_zero_gradient(self):
        z = np.zeros((3, 3), dtype=int)
        ctx = make_ctx(z, z)
        grad = gwd_gradient(ctx, np.full((3, 3), 1 / 9))
        assert np.all(grad == 0)

    def test_finite_difference_agreement(self, rng):
        for _ in range(20):
            m, n = rng.integers(4, 7, size=2)
            a, b = random_adjacency(rng, m), random_adjacency(rng, n)
            ctx = make_ctx(a, b)
            pi = random_feasible_coupling(rng, m, n)
            numeric = fd_gradient(a, b, pi)
            analytic = gwd_gradient(ctx, pi)
            assert np.abs(analytic - numeric).max() <= 1e-4

    def test_matched_support_attains_row_minimum(self, rng):
        n = 8
        a = random_adjacency(rng, n, p=0.4)
        perm = rng.permutation(n)
        p_mat = np.zeros((n, n))
        p_mat[np.arange(n), perm] = 1.0
        b = sp.csr_matrix(p_mat.T @ a.toarray() @ p_mat)
        ctx = make_ctx(a, b)
        grad = gwd_gradient(ctx, perm_coupling(perm))
        for i in range(n):
            assert grad[i, perm[i]] == pytest.approx(grad[i].min(), abs=1e-12)


class TestFgwObjective:
    def test_alpha_one_is_wd(self, rng):
        a, b = random_adjacency(rng, 4), random_adjacency(rng, 4)
        ctx = make_ctx(a, b)
        c = rng.random((4, 4))
        pi = random_feasible_coupling(rng, 4, 4)
        assert fgw_objective(ctx, c, 1.0, pi) == pytest.approx(wd_objective(c, pi))

    def test_alpha_zero_is_gwd(self, rng):
        a, b = random_adjacency(rng, 4), random_adjacency(rng, 4)
        ctx = make_ctx(a, b)
        pi = random_feasible_coupling(rng, 4, 4)
        assert fgw_objective(ctx, np.zeros((4, 4)), 0.0, pi) == pytest.approx(gwd_objective(ctx, pi))

    def test_midpoint_hand_value(self):
        a = np.array([[0, 1], [1, 0]])
        ctx = make_ctx(a, np.zeros((2, 2), dtype=int))
        pi = np.full((2, 2), 0.25)
        assert fgw_objective(ctx, np.zeros((2, 2)), 0.5, pi) == pytest.approx(0.25)

    def test_alpha_range_checked(self):
        ctx = make_ctx(np.zeros((2, 2), dtype=int), np.zeros((2, 2), dtype=int))
        with pytest.raises(ValueError):
            fgw_objective(ctx, np.zeros((2, 2)), 1.5, np.full((2, 2), 0.25))


class TestBpgRefine:
    def test_permutation_fixed_point(self, rng):
        n = 6
        a = random_adjacency(rng, n, p=0.4)
        perm = rng.permutation(n)
        p_mat = np.zeros((n, n))
        p_mat[np.arange(n), perm] = 1.0
        b = sp.csr_matrix(p_mat.T @ a.toarray() @ p_mat)
        ctx = make_ctx(a, b)
        pi0 = perm_coupling(perm)
        out, trace = bpg_refine(ctx, np.zeros((n, n)), 0.5, pi0, beta=100.0,
                                max_iter=50, eval_every=10)
        assert gwd_objective(ctx, out) <= 1e-9
        assert np.all((out > 0) == (pi0 > 0))

    def test_max_iter_zero_returns_init(self, rng):
        a, b = random_adjacency(rng, 4), random_adjacency(rng, 4)
        ctx = make_ctx(a, b)
        pi0 = random_feasible_coupling(rng, 4, 4)
        out, trace = bpg_refine(ctx, np.zeros((4, 4)), 0.5, pi0, max_iter=0)
        assert np.array_equal(out, pi0)
        assert len(trace) == 1

    def test_recovers_permutation_from_noised_start(self):
        g, g2, _, _, gold = generate(SynthSpec(n_entities=50, edge_density=0.12, seed=3))
        perm = np.zeros(50, dtype=int)
        for i, j in gold.pairs:
            perm[i] = j
        marg = uniform_marginals(50, 50)
        ctx = GwContext(g.adjacency, g2.adjacency, marg)
        rng = np.random.default_rng(0)
        # corrupt the permutation coupling enough to break some argmaxes
        noise = rng.random((50, 50))
        raw = perm_coupling(perm) + 0.03 * noise
        pi0 = sinkhorn(-np.log(raw), marg, eta=1.0, iters=30)
        start_errors = sum(pi0[i].argmax() != perm[i] for i in range(50))
        assert start_errors > 0
        out, _ = bpg_refine(ctx, np.zeros((50, 50)), 0.01, pi0, beta=100.0,
                            max_iter=500, eval_every=10, rel_tol=1e-9)
        assert all(out[i].argmax() == perm[i] for i in range(50))

    def test_selection_rule_returns_trace_minimum(self, rng):
        a, b = random_adjacency(rng, 6), random_adjacency(rng, 5)
        ctx = make_ctx(a, b)
        c = rng.random((6, 5))
        pi0 = sinkhorn(c, ctx.marg, 0.1, 10)
        out, trace = bpg_refine(ctx, c, 0.3, pi0, beta=50.0, max_iter=100, eval_every=10)
        best = min(rec.f_fgw for rec in trace)
        assert fgw_objective(ctx, c, 0.3, out) == pytest.approx(best, rel=1e-12)

    def test_includes_warm_start_in_selection(self, rng):
        a = random_adjacency(rng, 5)
        ctx = make_ctx(a, a)
        pi0 = perm_coupling(np.arange(5))
        out, trace = bpg_refine(ctx, np.zeros((5, 5)), 0.5, pi0, max_iter=30, eval_every=10)
        assert trace[0].iteration == 0
        assert fgw_objective(ctx, np.zeros((5, 5)), 0.5, out) <= trace[0].f_fgw + 1e-15

    def test_feasibility_every_iterate(self, rng):
        # beta scaled to the toy gradient magnitude, as the step size would
        # be at production scale where gradient entries are O(deg/m)
        a, b = random_adjacency(rng, 5), random_adjacency(rng, 5)
        ctx = make_ctx(a, b)
        pi0 = sinkhorn(rng.random((5, 5)), ctx.marg, 0.1, 10)
        seen = []
        bpg_refine(ctx, np.zeros((5, 5)), 0.5, pi0, beta=5.0, max_iter=40,
                   eval_every=10, on_eval=lambda k, pi, rec: seen.append(pi.copy()))
        for pi in seen:
            assert np.abs(pi.sum(axis=1) - ctx.marg.mu).max() < 1e-12
            assert np.abs(pi.sum(axis=0) - ctx.marg.nu).max() < 5e-2

    def test_beta_halving_fallback(self, rng, monkeypatch):
        a, b = random_adjacency(rng, 4), random_adjacency(rng, 4)
        ctx = make_ctx(a, b)
        pi0 = random_feasible_coupling(rng, 4, 4)
        betas = []

        def exploding_prox(grad, pi_ref, beta, marg, iters=10):
            betas.append(beta)
            return np.full_like(pi_ref, np.nan)

        monkeypatch.setattr(gw_mod, "sinkhorn_prox", exploding_prox)
        out, trace = bpg_refine(ctx, np.zeros((4, 4)), 0.5, pi0, beta=100.0, max_iter=10)
        assert np.array_equal(out, pi0)
        assert betas == [100.0, 50.0, 25.0, 12.5]
        assert len(trace) == 1 and np.isfinite(trace[0].f_fgw)

    def test_permutation_equivariance(self, rng):
        m, n = 5, 5
        a, b = random_adjacency(rng, m), random_adjacency(rng, n)
        perm = rng.permutation(n)
        p_mat = np.zeros((n, n))
        p_mat[np.arange(n), perm] = 1.0
        b_rel = sp.csr_matrix(p_mat.T @ b.toarray() @ p_mat)  # relabeled copy of b

        c = rng.random((m, n))
        pi0 = sinkhorn(c, uniform_marginals(m, n), 0.1, 10)
        out1, _ = bpg_refine(make_ctx(a, b), c, 0.4, pi0, beta=50.0, max_iter=30)
        out2, _ = bpg_refine(make_ctx(a, b_rel), c @ p_mat, 0.4, pi0 @ p_mat,
                             beta=50.0, max_iter=30)
        assert np.allclose(out1 @ p_mat, out2, atol=1e-12)


class TestTraceCsv:
    def test_write_format(self, tmp_path):
        from kgalign import BpgRecord, write_trace_csv
        recs = [BpgRecord(0, 0.5, 0.25, 0.375), BpgRecord(10, 0.4, 0.2, 0.3)]
        path = tmp_path / "trace.csv"
        write_trace_csv(recs, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "iter,f_wd,f_gwd,f_fgw"
        assert lines[1].startswith("0,0.5,0.25,0.375")
        assert len(lines) == 3
