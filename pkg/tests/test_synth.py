import numpy as np
import pytest

from kgalign import (GwContext, SynthSpec, dump, generate, gwd_objective,
                     load_alignment, load_embeddings, load_graph,
                     uniform_marginals)


class TestSpecValidation:
    def test_bad_density(self):
        with pytest.raises(ValueError):
            SynthSpec(n_entities=10, edge_density=0.0)

    def test_bad_rewire(self):
        with pytest.raises(ValueError):
            SynthSpec(n_entities=10, rewire_frac=1.5)

    def test_too_small(self):
        with pytest.raises(ValueError):
            SynthSpec(n_entities=1)


class TestGenerate:
    def test_deterministic(self):
        a = generate(SynthSpec(n_entities=40, seed=123))
        b = generate(SynthSpec(n_entities=40, seed=123))
        assert a[0].entities == b[0].entities
        assert np.array_equal(a[0].relation_triples, b[0].relation_triples)
        assert np.array_equal(a[2].data, b[2].data)
        assert a[4].pairs == b[4].pairs

    def test_seed_changes_output(self):
        a = generate(SynthSpec(n_entities=40, seed=1))
        b = generate(SynthSpec(n_entities=40, seed=2))
        assert a[0].entities != b[0].entities

    def test_gold_is_total_permutation(self):
        g, g2, _, _, gold = generate(SynthSpec(n_entities=30, seed=0))
        assert len(gold) == 30
        assert {i for i, _ in gold.pairs} == set(range(30))
        assert {j for _, j in gold.pairs} == set(range(30))

    def test_isomorphic_when_unrewired(self):
        g, g2, _, _, gold = generate(SynthSpec(n_entities=30, edge_density=0.1, seed=5))
        pi = np.zeros((30, 30))
        for i, j in gold.pairs:
            pi[i, j] = 1.0 / 30
        ctx = GwContext(g.adjacency, g2.adjacency, uniform_marginals(30, 30))
        assert gwd_objective(ctx, pi) == pytest.approx(0.0, abs=1e-12)

    def test_rewiring_breaks_isomorphism(self):
        g, g2, _, _, gold = generate(
            SynthSpec(n_entities=30, edge_density=0.1, rewire_frac=0.5, seed=5))
        pi = np.zeros((30, 30))
        for i, j in gold.pairs:
            pi[i, j] = 1.0 / 30
        ctx = GwContext(g.adjacency, g2.adjacency, uniform_marginals(30, 30))
        assert gwd_objective(ctx, pi) > 1e-3

    def test_every_entity_in_some_triple(self):
        for rewire in (0.0, 0.3):
            g, g2, _, _, _ = generate(
                SynthSpec(n_entities=50, edge_density=0.03, rewire_frac=rewire, seed=2))
            for graph in (g, g2):
                used = set(graph.relation_triples[:, 0]) | set(graph.relation_triples[:, 2])
                assert used == set(range(50))

    def test_embeddings_unit_norm_and_noise(self):
        _, _, e_clean, _, _ = generate(SynthSpec(n_entities=20, emb_noise=0.0, seed=4))
        _, _, e_noisy, _, _ = generate(SynthSpec(n_entities=20, emb_noise=0.5, seed=4))
        assert np.allclose(np.linalg.norm(e_noisy.data, axis=1), 1.0)
        assert not np.allclose(e_clean.data, e_noisy.data)


class TestDump:
    def test_roundtrip_preserves_alignment_structure(self, tmp_path):
        spec = SynthSpec(n_entities=25, edge_density=0.1, seed=6)
        dump(spec, tmp_path)
        g = load_graph(tmp_path / "rel_triples_1")
        g2 = load_graph(tmp_path / "rel_triples_2")
        assert g.num_entities == g2.num_entities == 25
        emb = load_embeddings(tmp_path / "emb_1.bin", g)
        emb2 = load_embeddings(tmp_path / "emb_2.bin", g2)
        assert emb.rows == 25 and emb2.rows == 25
        gold = load_alignment(tmp_path / "ent_links", g, g2)
        assert len(gold) == 25
        # the permutation aligned by names must also align structure
        pi = np.zeros((25, 25))
        for i, j in gold.pairs:
            pi[i, j] = 1.0 / 25
        ctx = GwContext(g.adjacency, g2.adjacency, uniform_marginals(25, 25))
        assert gwd_objective(ctx, pi) == pytest.approx(0.0, abs=1e-12)

    def test_byte_identical_reruns(self, tmp_path):
        spec = SynthSpec(n_entities=20, seed=9)
        dump(spec, tmp_path / "a")
        dump(spec, tmp_path / "b")
        for name in ("rel_triples_1", "rel_triples_2", "emb_1.bin", "emb_1.idx",
                     "emb_2.bin", "emb_2.idx", "ent_links"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
