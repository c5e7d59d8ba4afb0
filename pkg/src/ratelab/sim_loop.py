"""Feedback-loop simulation: recommend, rate, retrain, repeat.

A run first seeds the world with uniformly chosen initial ratings, then
iterates: draw a subset of users, hand each one recommendation, observe a
noisy ordinal rating of it, and update the recommender with the new batch.
No (user, item) pair is ever rated twice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import substream
from .env_model import (
    Cutoffs,
    EnvConfig,
    Environment,
    ThresholdSpec,
    generate_environment,
    observe_rating,
    observe_ratings,
    resolve_cutoffs,
)
from .errors import ConfigError, ExhaustionError, InsufficientDataError
from .recommenders import LatentFactorHyperparams, init_recommender

INIT_ITERATION = -1   # iteration column value for init-phase records


@dataclass
class SimConfig:
    env: EnvConfig = field(default_factory=EnvConfig)
    thresholds: ThresholdSpec = field(default_factory=ThresholdSpec)
    recommender: str = "random"
    hyperparams: LatentFactorHyperparams | None = None
    n_iter: int = 1000              # number of feedback-loop iterations
    rating_frequency: float = 0.1   # fraction of users drawn per iteration
    ratio_init_ratings: float = 0.01  # fraction of all user x item pairs rated up front
    mc_samples: int = 200_000       # Monte Carlo size for quantile cutoff resolution

    def __post_init__(self):
        if self.n_iter < 0:
            raise ConfigError("n_iter must be >= 0")
        if not 0.0 < self.rating_frequency <= 1.0:
            raise ConfigError("rating_frequency must be in (0, 1]")
        if not 0.0 <= self.ratio_init_ratings <= 1.0:
            raise ConfigError("ratio_init_ratings must be in [0, 1]")

    @property
    def seed(self) -> int:
        return self.env.seed


@dataclass
class SimulationTrace:
    """Flat record-per-rating arrays; init-phase rows carry iteration == -1."""

    iterations: np.ndarray   # int; INIT_ITERATION for the init phase
    users: np.ndarray        # int user indices
    items: np.ndarray        # int item indices
    true_prefs: np.ndarray   # float ground-truth preference of the rated item
    ratings: np.ndarray      # ordinal ratings: 0 dislike, 1 like, 2 superlike
    phases: np.ndarray       # "init" or "loop"

    def __len__(self) -> int:
        return len(self.users)

    def phase_mask(self, phase: str | None) -> np.ndarray:
        if phase is None:
            return np.ones(len(self), dtype=bool)
        if phase not in ("init", "loop"):
            raise ConfigError("phase must be 'init', 'loop', or None")
        return self.phases == phase


@dataclass
class SimulationResult:
    trace: SimulationTrace
    env: Environment
    cutoffs: Cutoffs
    config: SimConfig
    recommender: object = None   # the trained policy, for checkpointing/inspection


def weighted_ratings(ratings, weights) -> np.ndarray:
    """Map ordinal ratings through the configured option weights."""
    return np.asarray(weights, dtype=float)[np.asarray(ratings, dtype=np.int64)]


def run_simulation(config: SimConfig, recommender=None) -> SimulationResult:
    """Run one seeded simulation.

    All randomness derives from named substreams of config.env.seed, so two
    runs of the same config are identical array-for-array.  `recommender`
    optionally overrides the configured policy with a ready-made object, or
    a callable env -> object (used for instrumented evaluations); it must
    expose update(users, items, ratings) and recommend(user, excluded).
    """
    env = generate_environment(config.env)
    cutoffs = resolve_cutoffs(config.thresholds, env, config.env.noise_sigma,
                              mc_samples=config.mc_samples)
    if recommender is None:
        rec = init_recommender(config.recommender, env.num_users, env.num_items,
                               seed=config.seed, hyperparams=config.hyperparams)
    else:
        rec = recommender(env) if callable(recommender) else recommender

    noise_rng = substream(config.seed, "rating-noise")
    rated = np.zeros((env.num_users, env.num_items), dtype=bool)
    weights = config.env.rating_weights

    col_iter: list = []
    col_user: list = []
    col_item: list = []
    col_pref: list = []
    col_rating: list = []
    n_init_rows = 0

    # ---- init phase: a uniform sample of all user x item pairs
    n_pairs = env.num_users * env.num_items
    n_init = int(round(config.ratio_init_ratings * n_pairs))
    if n_init > 0:
        init_rng = substream(config.seed, "init-ratings")
        flat = init_rng.choice(n_pairs, size=n_init, replace=False)
        users0 = flat // env.num_items
        items0 = flat % env.num_items
        prefs0 = np.einsum("ij,ij->i", env.user_factors[users0], env.item_factors[items0])
        ratings0 = observe_ratings(prefs0, config.env.noise_sigma, cutoffs, noise_rng)
        rated[users0, items0] = True
        rec.update(users0, items0, weighted_ratings(ratings0, weights))
        col_iter.append(np.full(n_init, INIT_ITERATION, dtype=np.int64))
        col_user.append(users0.astype(np.int64))
        col_item.append(items0.astype(np.int64))
        col_pref.append(prefs0)
        col_rating.append(np.asarray(ratings0, dtype=np.int64))
        n_init_rows = n_init

    # ---- feedback loop
    select_rng = substream(config.seed, "user-selection")
    n_select = math.ceil(config.rating_frequency * env.num_users)
    for t in range(config.n_iter):
        chosen = select_rng.choice(env.num_users, size=n_select, replace=False)
        items_t = np.empty(n_select, dtype=np.int64)
        prefs_t = np.empty(n_select)
        ratings_t = np.empty(n_select, dtype=np.int64)
        for j, u in enumerate(chosen):
            try:
                item = rec.recommend(int(u), rated[u])
            except ExhaustionError as err:
                raise ExhaustionError(f"iteration {t}: {err}") from err
            pref = float(env.user_factors[u] @ env.item_factors[item])
            rating = observe_rating(pref, config.env.noise_sigma, cutoffs, noise_rng)
            rated[u, item] = True
            items_t[j] = item
            prefs_t[j] = pref
            ratings_t[j] = rating
        rec.update(chosen.astype(np.int64), items_t, weighted_ratings(ratings_t, weights))
        col_iter.append(np.full(n_select, t, dtype=np.int64))
        col_user.append(chosen.astype(np.int64))
        col_item.append(items_t)
        col_pref.append(prefs_t)
        col_rating.append(ratings_t)

    if col_iter:
        iterations = np.concatenate(col_iter)
        users = np.concatenate(col_user)
        items = np.concatenate(col_item)
        prefs = np.concatenate(col_pref)
        ratings = np.concatenate(col_rating)
    else:
        iterations = np.empty(0, dtype=np.int64)
        users = np.empty(0, dtype=np.int64)
        items = np.empty(0, dtype=np.int64)
        prefs = np.empty(0)
        ratings = np.empty(0, dtype=np.int64)
    phases = np.where(iterations == INIT_ITERATION, "init", "loop")
    trace = SimulationTrace(iterations=iterations, users=users, items=items,
                            true_prefs=prefs, ratings=ratings, phases=phases)
    return SimulationResult(trace=trace, env=env, cutoffs=cutoffs, config=config,
                            recommender=rec)


# ---------------------------------------------------------------- metrics

def ratings_distribution(trace: SimulationTrace, phase: str | None = None):
    """Fractions of (dislike, like, superlike), averaged the fair way.

    Each user's option fractions are computed over that user's own ratings
    first; the result is the unweighted mean of those per-user fractions
    across all users with at least one rating in the selected phase.
    """
    mask = trace.phase_mask(phase)
    if not mask.any():
        raise InsufficientDataError("no ratings in the selected phase")
    users = trace.users[mask]
    ratings = trace.ratings[mask]
    uniq, inverse = np.unique(users, return_inverse=True)
    counts = np.bincount(inverse, minlength=len(uniq)).astype(float)
    fracs = np.empty(3)
    for option in (0, 1, 2):
        per_user = np.bincount(inverse, weights=(ratings == option).astype(float),
                               minlength=len(uniq))
        fracs[option] = float(np.mean(per_user / counts))
    return tuple(fracs)


def utility_over_time(trace: SimulationTrace, window: int = 1) -> np.ndarray:
    """Per-iteration mean true preference of recommended items, smoothed.

    Returns one value per loop iteration: the trailing mean over the last
    `window` iterations (window=1 reproduces the raw series).
    """
    if window < 1:
        raise ConfigError("window must be >= 1")
    mask = trace.phases == "loop"
    if not mask.any():
        raise InsufficientDataError("trace has no loop-phase records")
    iters = trace.iterations[mask]
    prefs = trace.true_prefs[mask]
    n_iter = int(iters.max()) + 1
    sums = np.bincount(iters, weights=prefs, minlength=n_iter)
    counts = np.bincount(iters, minlength=n_iter)
    if np.any(counts == 0):
        raise InsufficientDataError("loop iterations are not contiguous from 0")
    raw = sums / counts
    if window == 1:
        return raw
    smoothed = np.empty_like(raw)
    csum = np.concatenate([[0.0], np.cumsum(raw)])
    for t in range(len(raw)):
        lo = max(0, t - window + 1)
        smoothed[t] = (csum[t + 1] - csum[lo]) / (t + 1 - lo)
    return smoothed
