"""Recommendation policies: random, top-popularity, and a latent-factor model.

All three share one duck-typed interface:

    update(users, items, ratings)   feed observed ratings
    recommend(user, excluded) -> item index

`excluded` is a boolean mask over items (True = do not recommend) or an
iterable of item indices.  Ties in score-based policies break toward the
lowest item index, and a policy never returns an excluded item.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ._rng import substream
from .errors import ConfigError, ExhaustionError

KINDS = ("random", "toppop", "latent_factor")


def _exclusion_mask(excluded, num_items: int) -> np.ndarray:
    if isinstance(excluded, np.ndarray) and excluded.dtype == bool:
        if excluded.shape != (num_items,):
            raise ConfigError("exclusion mask has wrong length")
        return excluded
    mask = np.zeros(num_items, dtype=bool)
    idx = np.asarray(list(excluded), dtype=np.int64)
    if idx.size:
        if idx.min() < 0 or idx.max() >= num_items:
            raise IndexError("excluded item index out of range")
        mask[idx] = True
    return mask


class RandomRecommender:
    """Uniform choice over the not-yet-excluded items."""

    def __init__(self, num_users: int, num_items: int, seed: int = 0):
        self.num_users = num_users
        self.num_items = num_items
        self.rng = substream(seed, "recommender", "random")

    def update(self, users, items, ratings) -> None:
        pass  # ratings carry no information for this policy

    def recommend(self, user: int, excluded) -> int:
        mask = _exclusion_mask(excluded, self.num_items)
        candidates = np.flatnonzero(~mask)
        if candidates.size == 0:
            raise ExhaustionError(f"no candidate items left for user {user}")
        return int(self.rng.choice(candidates))


class TopPopRecommender:
    """Recommend the item with the highest average observed rating.

    Items nobody has rated rank strictly below every rated item; among
    equal scores the lowest index wins.
    """

    def __init__(self, num_users: int, num_items: int, seed: int = 0):
        self.num_users = num_users
        self.num_items = num_items
        self.rating_sums = np.zeros(num_items)
        self.rating_counts = np.zeros(num_items, dtype=np.int64)

    def update(self, users, items, ratings) -> None:
        items = np.asarray(items, dtype=np.int64)
        ratings = np.asarray(ratings, dtype=float)
        np.add.at(self.rating_sums, items, ratings)
        np.add.at(self.rating_counts, items, 1)

    def item_scores(self) -> np.ndarray:
        scores = np.full(self.num_items, -np.inf)
        seen = self.rating_counts > 0
        scores[seen] = self.rating_sums[seen] / self.rating_counts[seen]
        return scores

    def recommend(self, user: int, excluded) -> int:
        mask = _exclusion_mask(excluded, self.num_items)
        candidates = np.flatnonzero(~mask)
        if candidates.size == 0:
            raise ExhaustionError(f"no candidate items left for user {user}")
        scores = self.item_scores()[candidates]
        return int(candidates[np.argmax(scores)])  # argmax takes the first max


@dataclass
class LatentFactorHyperparams:
    num_factors: int = 8        # latent dimensionality of the fit, not of the world
    learning_rate: float = 0.01
    l2: float = 0.05            # weight of the squared-norm penalty
    epochs: int = 10            # SGD passes per update call
    init_scale: float = 0.1     # std dev of the factor initialization
    refit_mode: str = "full"    # "full": retrain on all data each update; "incremental": new batch only

    def __post_init__(self):
        if self.num_factors < 1:
            raise ConfigError("num_factors must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be > 0")
        if self.l2 < 0:
            raise ConfigError("l2 must be >= 0")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.init_scale < 0:
            raise ConfigError("init_scale must be >= 0")
        if self.refit_mode not in ("full", "incremental"):
            raise ConfigError("refit_mode must be 'full' or 'incremental'")


@njit(cache=True)
def _sgd_pass(mu_box, user_bias, item_bias, user_vecs, item_vecs,
              users, items, ratings, lr, l2):
    """One in-order SGD pass; every parameter steps by -lr times its gradient.

    Per-sample objective: (r - pred)^2 + l2 * (bu^2 + bi^2 + |pu|^2 + |qi|^2)
    with pred = mu + bu + bi + pu.qi.  The global bias mu is not penalized.
    All gradients are evaluated at the pre-step parameter values.
    """
    d = user_vecs.shape[1]
    for s in range(users.shape[0]):
        u = users[s]
        i = items[s]
        pred = mu_box[0] + user_bias[u] + item_bias[i]
        for f in range(d):
            pred += user_vecs[u, f] * item_vecs[i, f]
        err = ratings[s] - pred
        mu_box[0] += lr * 2.0 * err
        bu_old = user_bias[u]
        bi_old = item_bias[i]
        user_bias[u] += lr * (2.0 * err - 2.0 * l2 * bu_old)
        item_bias[i] += lr * (2.0 * err - 2.0 * l2 * bi_old)
        for f in range(d):
            pu_old = user_vecs[u, f]
            qi_old = item_vecs[i, f]
            user_vecs[u, f] += lr * (2.0 * err * qi_old - 2.0 * l2 * pu_old)
            item_vecs[i, f] += lr * (2.0 * err * pu_old - 2.0 * l2 * qi_old)


class LatentFactorRecommender:
    """Biased matrix factorization trained by SGD on observed ratings.

    Prediction is global_bias + user_bias + item_bias + user_vec . item_vec.
    Each update call runs `epochs` shuffled SGD passes over either the full
    accumulated rating history (refit_mode "full", the default) or just the
    newly supplied batch ("incremental").
    """

    def __init__(self, num_users: int, num_items: int, seed: int = 0,
                 hyperparams: LatentFactorHyperparams | None = None):
        hp = hyperparams if hyperparams is not None else LatentFactorHyperparams()
        self.num_users = num_users
        self.num_items = num_items
        self.hp = hp
        self.rng = substream(seed, "recommender", "latent_factor")
        self.global_bias = 0.0
        self.user_bias = np.zeros(num_users)
        self.item_bias = np.zeros(num_items)
        self.user_vecs = self.rng.normal(0.0, hp.init_scale, size=(num_users, hp.num_factors))
        self.item_vecs = self.rng.normal(0.0, hp.init_scale, size=(num_items, hp.num_factors))
        self._hist_users: list = []
        self._hist_items: list = []
        self._hist_ratings: list = []

    # ------------------------------------------------------------- training

    def update(self, users, items, ratings) -> None:
        users = np.ascontiguousarray(users, dtype=np.int64)
        items = np.ascontiguousarray(items, dtype=np.int64)
        ratings = np.ascontiguousarray(ratings, dtype=np.float64)
        if not (users.shape == items.shape == ratings.shape):
            raise ConfigError("users, items and ratings must have equal length")
        self._hist_users.append(users)
        self._hist_items.append(items)
        self._hist_ratings.append(ratings)
        if self.hp.refit_mode == "full":
            tr_u = np.concatenate(self._hist_users)
            tr_i = np.concatenate(self._hist_items)
            tr_r = np.concatenate(self._hist_ratings)
        else:
            tr_u, tr_i, tr_r = users, items, ratings
        if tr_u.size == 0:
            return
        self._train(tr_u, tr_i, tr_r, self.hp.epochs, shuffle=True)

    def _train(self, users, items, ratings, epochs: int, shuffle: bool) -> None:
        mu_box = np.array([self.global_bias])
        for _ in range(epochs):
            if shuffle:
                order = self.rng.permutation(users.size)
                u, i, r = users[order], items[order], ratings[order]
            else:
                u, i, r = users, items, ratings
            _sgd_pass(mu_box, self.user_bias, self.item_bias,
                      self.user_vecs, self.item_vecs, u, i, r,
                      self.hp.learning_rate, self.hp.l2)
        self.global_bias = float(mu_box[0])

    def sgd_step(self, user: int, item: int, rating: float) -> None:
        """A single un-shuffled SGD step on one record (no history bookkeeping)."""
        self._train(np.array([user], dtype=np.int64), np.array([item], dtype=np.int64),
                    np.array([float(rating)]), epochs=1, shuffle=False)

    # ------------------------------------------------------------- inference

    def predict(self, user: int, items=None) -> np.ndarray:
        if items is None:
            items = np.arange(self.num_items)
        items = np.asarray(items, dtype=np.int64)
        return (self.global_bias + self.user_bias[user] + self.item_bias[items]
                + self.item_vecs[items] @ self.user_vecs[user])

    def recommend(self, user: int, excluded) -> int:
        mask = _exclusion_mask(excluded, self.num_items)
        candidates = np.flatnonzero(~mask)
        if candidates.size == 0:
            raise ExhaustionError(f"no candidate items left for user {user}")
        scores = self.predict(user, candidates)
        return int(candidates[np.argmax(scores)])


# ---------------------------------------------------------------- factory

def init_recommender(kind: str, num_users: int, num_items: int, seed: int = 0,
                     hyperparams: LatentFactorHyperparams | None = None):
    """Construct a recommender by kind name ("random", "toppop", "latent_factor")."""
    if num_users < 1 or num_items < 1:
        raise ConfigError("num_users and num_items must be >= 1")
    if kind == "random":
        return RandomRecommender(num_users, num_items, seed=seed)
    if kind == "toppop":
        return TopPopRecommender(num_users, num_items, seed=seed)
    if kind == "latent_factor":
        return LatentFactorRecommender(num_users, num_items, seed=seed,
                                       hyperparams=hyperparams)
    raise ConfigError(f"unknown recommender kind {kind!r}; expected one of {KINDS}")


# ---------------------------------------------------------------- checkpoints

_CHECKPOINT_MAGIC = "ratelab-mf-v1"


def save_checkpoint(model: LatentFactorRecommender, path) -> None:
    """Write model parameters: ascii header with shapes, then row-major float64 dumps.

    Layout after the header line: global bias, user biases, item biases,
    user factor rows, item factor rows.  Training history is not persisted.
    """
    with open(path, "wb") as fh:
        header = f"{_CHECKPOINT_MAGIC} {model.num_users} {model.num_items} {model.hp.num_factors}\n"
        fh.write(header.encode("ascii"))
        fh.write(np.float64(model.global_bias).tobytes())
        fh.write(np.ascontiguousarray(model.user_bias, dtype=np.float64).tobytes())
        fh.write(np.ascontiguousarray(model.item_bias, dtype=np.float64).tobytes())
        fh.write(np.ascontiguousarray(model.user_vecs, dtype=np.float64).tobytes())
        fh.write(np.ascontiguousarray(model.item_vecs, dtype=np.float64).tobytes())


def load_checkpoint(path, hyperparams: LatentFactorHyperparams | None = None) -> LatentFactorRecommender:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) != 4 or header[0] != _CHECKPOINT_MAGIC:
            raise ConfigError(f"not a recognized checkpoint file: {path}")
        num_users, num_items, d = (int(v) for v in header[1:])
        blob = np.frombuffer(fh.read(), dtype=np.float64)
    expected = 1 + num_users + num_items + (num_users + num_items) * d
    if blob.size != expected:
        raise ConfigError(f"checkpoint payload has {blob.size} floats, expected {expected}")
    hp = hyperparams if hyperparams is not None else LatentFactorHyperparams(num_factors=d)
    if hp.num_factors != d:
        raise ConfigError("hyperparams.num_factors does not match checkpoint")
    model = LatentFactorRecommender(num_users, num_items, hyperparams=hp)
    pos = 0
    model.global_bias = float(blob[pos]); pos += 1
    model.user_bias = blob[pos:pos + num_users].copy(); pos += num_users
    model.item_bias = blob[pos:pos + num_items].copy(); pos += num_items
    model.user_vecs = blob[pos:pos + num_users * d].reshape(num_users, d).copy(); pos += num_users * d
    model.item_vecs = blob[pos:pos + num_items * d].reshape(num_items, d).copy()
    return model
