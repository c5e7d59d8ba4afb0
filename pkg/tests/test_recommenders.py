from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import mf_fd_gradient, mf_objective, mf_step_gradient
from ratelab.errors import ConfigError, ExhaustionError
from ratelab.recommenders import (
    LatentFactorHyperparams,
    LatentFactorRecommender,
    RandomRecommender,
    TopPopRecommender,
    init_recommender,
    load_checkpoint,
    save_checkpoint,
)


# ---------------------------------------------------------------- factory

def test_factory_kinds():
    assert isinstance(init_recommender("random", 3, 4), RandomRecommender)
    assert isinstance(init_recommender("toppop", 3, 4), TopPopRecommender)
    assert isinstance(init_recommender("latent_factor", 3, 4), LatentFactorRecommender)
    with pytest.raises(ConfigError):
        init_recommender("svdpp", 3, 4)
    with pytest.raises(ConfigError):
        init_recommender("random", 0, 4)


def test_hyperparam_validation():
    with pytest.raises(ConfigError):
        LatentFactorHyperparams(learning_rate=0.0)
    with pytest.raises(ConfigError):
        LatentFactorHyperparams(num_factors=0)
    with pytest.raises(ConfigError):
        LatentFactorHyperparams(l2=-0.1)
    with pytest.raises(ConfigError):
        LatentFactorHyperparams(epochs=0)
    with pytest.raises(ConfigError):
        LatentFactorHyperparams(refit_mode="warm")
    hp = LatentFactorHyperparams()
    assert (hp.num_factors, hp.learning_rate, hp.l2, hp.epochs, hp.init_scale) == \
        (8, 0.01, 0.05, 10, 0.1)


# ---------------------------------------------------------------- random

def test_random_forced_choice():
    rec = RandomRecommender(2, 5, seed=0)
    excl = np.ones(5, dtype=bool)
    excl[3] = False
    assert rec.recommend(0, excl) == 3


def test_random_exhaustion():
    rec = RandomRecommender(2, 4, seed=0)
    with pytest.raises(ExhaustionError):
        rec.recommend(1, np.ones(4, dtype=bool))


def test_random_deterministic_per_seed():
    picks_a = [RandomRecommender(1, 100, seed=7).recommend(0, []) for _ in range(1)]
    picks_b = [RandomRecommender(1, 100, seed=7).recommend(0, []) for _ in range(1)]
    assert picks_a == picks_b
    seq1 = RandomRecommender(1, 1000, seed=3)
    seq2 = RandomRecommender(1, 1000, seed=3)
    assert [seq1.recommend(0, []) for _ in range(20)] == \
        [seq2.recommend(0, []) for _ in range(20)]


def test_random_accepts_index_iterables():
    rec = RandomRecommender(1, 6, seed=1)
    for _ in range(30):
        assert rec.recommend(0, [0, 1, 2, 4, 5]) == 3


# ---------------------------------------------------------------- toppop

def test_toppop_average_hand_case():
    rec = TopPopRecommender(3, 4)
    #        item0: [2]  item1: [1, 1, 1]  item2: unrated  item3: [0]
    rec.update([0, 0, 1, 2, 1], [0, 1, 1, 1, 3], [2, 1, 1, 1, 0])
    scores = rec.item_scores()
    assert scores[0] == pytest.approx(2.0)
    assert scores[1] == pytest.approx(1.0)
    assert scores[2] == -np.inf
    assert scores[3] == pytest.approx(0.0)
    assert rec.recommend(0, []) == 0


def test_toppop_update_order_invariant():
    items = [3, 1, 1, 0, 2, 2, 2]
    ratings = [2, 0, 1, 1, 2, 2, 0]
    a = TopPopRecommender(2, 5)
    a.update([0] * len(items), items, ratings)
    b = TopPopRecommender(2, 5)
    order = np.random.default_rng(0).permutation(len(items))
    for j in order:  # one record at a time, shuffled
        b.update([0], [items[j]], [ratings[j]])
    assert np.allclose(a.item_scores(), b.item_scores())


def test_toppop_cold_items_rank_below_rated():
    rec = TopPopRecommender(2, 3)
    rec.update([0], [1], [0])           # item1 averages 0.0, still beats cold items
    assert rec.recommend(0, []) == 1
    # once item1 is excluded only cold items remain: lowest index wins
    assert rec.recommend(0, [1]) == 0


def test_toppop_tie_breaks_to_lowest_index():
    rec = TopPopRecommender(2, 4)
    rec.update([0, 0], [2, 3], [1, 1])
    assert rec.recommend(0, []) == 2


def test_toppop_exhaustion():
    rec = TopPopRecommender(1, 2)
    with pytest.raises(ExhaustionError):
        rec.recommend(0, [0, 1])


# ---------------------------------------------------------------- latent factor

def test_latent_zero_init_recommends_lowest_index():
    hp = LatentFactorHyperparams(init_scale=0.0)
    rec = LatentFactorRecommender(2, 6, seed=0, hyperparams=hp)
    assert rec.recommend(0, []) == 0
    assert rec.recommend(0, [0, 1]) == 2


def test_single_sgd_step_matches_finite_difference_oracle():
    rng = np.random.default_rng(12)
    hp = LatentFactorHyperparams(num_factors=4, learning_rate=0.01, l2=0.07)
    rec = LatentFactorRecommender(5, 6, seed=3, hyperparams=hp)
    rec.user_bias[:] = rng.normal(0, 0.5, 5)
    rec.item_bias[:] = rng.normal(0, 0.5, 6)
    rec.global_bias = 0.8
    g_step = mf_step_gradient(rec, 2, 4, 2.0)
    g_fd = mf_fd_gradient(rec, 2, 4, 2.0)
    assert np.linalg.norm(g_step - g_fd) / np.linalg.norm(g_fd) < 1e-6


def test_single_sgd_step_matches_analytic_gradient_exactly():
    hp = LatentFactorHyperparams(num_factors=3, learning_rate=0.02, l2=0.05)
    rec = LatentFactorRecommender(4, 4, seed=9, hyperparams=hp)
    rec.global_bias = 0.3
    rec.user_bias[1] = -0.2
    rec.item_bias[2] = 0.4
    u, i, r = 1, 2, 1.0
    pu = rec.user_vecs[u].copy()
    qi = rec.item_vecs[i].copy()
    pred = rec.global_bias + rec.user_bias[u] + rec.item_bias[i] + pu @ qi
    err = r - pred
    want = np.concatenate([
        [-2 * err],
        [-2 * err + 2 * hp.l2 * rec.user_bias[u]],
        [-2 * err + 2 * hp.l2 * rec.item_bias[i]],
        -2 * err * qi + 2 * hp.l2 * pu,
        -2 * err * pu + 2 * hp.l2 * qi,
    ])
    got = mf_step_gradient(rec, u, i, r)
    assert np.max(np.abs(got - want)) < 1e-10


def test_sgd_step_touches_only_involved_rows():
    rec = LatentFactorRecommender(5, 5, seed=1)
    others_u = rec.user_vecs[[0, 1, 3, 4]].copy()
    others_i = rec.item_vecs[[0, 2, 3, 4]].copy()
    rec.sgd_step(2, 1, 2.0)
    assert np.array_equal(rec.user_vecs[[0, 1, 3, 4]], others_u)
    assert np.array_equal(rec.item_vecs[[0, 2, 3, 4]], others_i)


def test_rank_one_table_recovered():
    # ratings exactly factorizable: model should fit them to RMSE well under 0.05
    rng = np.random.default_rng(0)
    n_users, n_items = 15, 12
    row = rng.uniform(0.5, 1.5, n_users)
    col = rng.uniform(0.5, 1.5, n_items)
    users, items = np.meshgrid(np.arange(n_users), np.arange(n_items), indexing="ij")
    users, items = users.ravel(), items.ravel()
    ratings = np.outer(row, col).ravel()
    hp = LatentFactorHyperparams(num_factors=3, learning_rate=0.02, l2=0.001,
                                 epochs=100, init_scale=0.1)
    rec = LatentFactorRecommender(n_users, n_items, seed=1, hyperparams=hp)
    rec.update(users, items, ratings)
    preds = np.concatenate([rec.predict(u, items[users == u]) for u in range(n_users)])
    targets = np.concatenate([ratings[users == u] for u in range(n_users)])
    rmse = float(np.sqrt(np.mean((preds - targets) ** 2)))
    assert rmse < 0.05


def test_batch_objective_non_increasing_at_small_lr():
    rng = np.random.default_rng(4)
    users = rng.integers(0, 6, 40)
    items = rng.integers(0, 8, 40)
    ratings = rng.integers(0, 3, 40).astype(float)
    hp = LatentFactorHyperparams(num_factors=4, learning_rate=1e-4, l2=0.05, epochs=1)
    rec = LatentFactorRecommender(6, 8, seed=5, hyperparams=hp)

    def batchmf_objective():
        total = 0.0
        for u, i, r in zip(users, items, ratings):
            total += mf_objective(rec.global_bias, rec.user_bias[u], rec.item_bias[i],
                                rec.user_vecs[u], rec.item_vecs[i], r, hp.l2)
        return total

    prev = batchmf_objective()
    for _ in range(10):
        rec._train(users, items, ratings, epochs=1, shuffle=False)
        cur = batchmf_objective()
        assert cur <= prev + 1e-9
        prev = cur


def test_large_l2_collapses_to_global_bias():
    hp = LatentFactorHyperparams(num_factors=4, learning_rate=0.005, l2=50.0,
                                 epochs=40, init_scale=0.1)
    rec = LatentFactorRecommender(8, 10, seed=2, hyperparams=hp)
    users = np.repeat(np.arange(8), 10)
    items = np.tile(np.arange(10), 8)
    ratings = np.random.default_rng(3).integers(0, 3, 80).astype(float)
    rec.update(users, items, ratings)
    preds = np.concatenate([rec.predict(u) for u in range(8)])
    assert np.max(np.abs(preds - rec.global_bias)) < 0.05
    assert ratings.min() <= rec.global_bias <= ratings.max()


def test_incremental_mode_trains_on_new_batch_only():
    hp_full = LatentFactorHyperparams(epochs=2, refit_mode="full")
    hp_inc = LatentFactorHyperparams(epochs=2, refit_mode="incremental")
    a = LatentFactorRecommender(4, 5, seed=6, hyperparams=hp_full)
    b = LatentFactorRecommender(4, 5, seed=6, hyperparams=hp_inc)
    batch1 = ([0, 1], [2, 3], [2.0, 0.0])
    batch2 = ([2], [4], [1.0])
    for m in (a, b):
        m.update(*batch1)
        m.update(*batch2)
    # full mode revisits batch1 during the second update, incremental does not
    assert not np.allclose(a.user_vecs[0], b.user_vecs[0])


def test_latent_deterministic_per_seed():
    def build():
        rec = LatentFactorRecommender(5, 7, seed=11)
        rec.update([0, 1, 2], [1, 2, 3], [2.0, 1.0, 0.0])
        return rec

    a, b = build(), build()
    assert a.global_bias == b.global_bias
    assert np.array_equal(a.user_vecs, b.user_vecs)
    assert np.array_equal(a.item_vecs, b.item_vecs)


@given(st.integers(min_value=0, max_value=2**31 - 1),
       st.sets(st.integers(min_value=0, max_value=11), max_size=11))
@settings(max_examples=60, deadline=None)
def test_never_recommends_excluded(seed, excluded):
    excl = sorted(excluded)
    for kind in ("random", "toppop", "latent_factor"):
        rec = init_recommender(kind, 3, 12, seed=seed)
        rec.update([0, 1], [2, 7], [2.0, 1.0])
        assert rec.recommend(1, excl) not in excluded


def test_checkpoint_round_trip(tmp_path):
    rec = LatentFactorRecommender(6, 9, seed=8)
    rec.update([0, 2, 5], [1, 4, 8], [2.0, 0.0, 1.0])
    path = tmp_path / "model.ckpt"
    save_checkpoint(rec, path)
    loaded = load_checkpoint(path)
    assert loaded.num_users == 6 and loaded.num_items == 9
    for u in range(6):
        assert np.array_equal(rec.predict(u), loaded.predict(u))


def test_checkpoint_rejects_garbage(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_bytes(b"something else entirely\n123")
    with pytest.raises(ConfigError):
        load_checkpoint(path)