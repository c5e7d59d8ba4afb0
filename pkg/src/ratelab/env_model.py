"""Synthetic rating environment: latent factors, noisy preferences, ordinal cutoffs.

An environment holds fixed user and item factor matrices.  A user's true
preference for an item is the dot product of their factor rows.  Observed
ratings add Gaussian noise to the true preference and threshold the result
into the ordinal options dislike (0), like (1), superlike (2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rng import substream
from .errors import ConfigError, DegenerateThresholdError

RATING_OPTIONS = ("dislike", "like", "superlike")

# Gamma parameters for item factor entries; user factors are uniform on [0, 1).
_ITEM_FACTOR_SHAPE = 2.0
_ITEM_FACTOR_SCALE = 1.0


@dataclass
class EnvConfig:
    num_users: int = 100
    num_items: int = 5000
    latent_dim: int = 8            # width of the user/item factor rows
    noise_sigma: float = 0.5       # std dev of rating noise added to true preference
    rating_weights: tuple = (0, 1, 2)  # ordinal weights: dislike, like, superlike
    seed: int = 0

    def __post_init__(self):
        if self.num_users < 1 or self.num_items < 1:
            raise ConfigError("num_users and num_items must be >= 1")
        if self.latent_dim < 1:
            raise ConfigError("latent_dim must be >= 1")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        w = tuple(self.rating_weights)
        if len(w) != 3 or not (w[0] < w[1] < w[2]):
            raise ConfigError("rating_weights must be a strictly increasing triple")
        self.rating_weights = w


@dataclass(frozen=True)
class Environment:
    """Fixed ground truth for one simulated world."""

    user_factors: np.ndarray   # (num_users, latent_dim), entries ~ U[0, 1)
    item_factors: np.ndarray   # (num_items, latent_dim), entries ~ Gamma(2, 1)
    seed: int

    @property
    def num_users(self) -> int:
        return self.user_factors.shape[0]

    @property
    def num_items(self) -> int:
        return self.item_factors.shape[0]


def generate_environment(config: EnvConfig) -> Environment:
    """Sample an environment from its own named substream of ``config.seed``.

    The draw order is fixed (user factors first, then item factors) so a
    given (seed, shape) pair always yields the same world, regardless of any
    other randomness consumed elsewhere in a run.
    """
    rng = substream(config.seed, "environment")
    users = rng.random((config.num_users, config.latent_dim))
    items = rng.gamma(_ITEM_FACTOR_SHAPE, _ITEM_FACTOR_SCALE,
                      size=(config.num_items, config.latent_dim))
    return Environment(user_factors=users, item_factors=items, seed=config.seed)


def true_preference(env: Environment, user: int, item: int) -> float:
    """Ground-truth preference of ``user`` for ``item`` (factor dot product)."""
    if not (0 <= user < env.num_users):
        raise IndexError(f"user index {user} out of range [0, {env.num_users})")
    if not (0 <= item < env.num_items):
        raise IndexError(f"item index {item} out of range [0, {env.num_items})")
    return float(env.user_factors[user] @ env.item_factors[item])


def preference_matrix(env: Environment) -> np.ndarray:
    """Full (num_users, num_items) matrix of true preferences."""
    return env.user_factors @ env.item_factors.T


@dataclass(frozen=True)
class ThresholdSpec:
    """How to turn noisy preferences into ordinal ratings.

    mode "quantile": t1 < t2 are population quantile levels in [0, 1]; the
    raw cutoffs are resolved by Monte Carlo against a given environment.
    mode "raw": t1 < t2 are used directly as cutoffs on the noisy preference.
    """

    mode: str = "quantile"
    t1: float = 0.5
    t2: float = 0.8

    def __post_init__(self):
        if self.mode not in ("quantile", "raw"):
            raise ConfigError(f"threshold mode must be 'quantile' or 'raw', got {self.mode!r}")
        if not self.t1 < self.t2:
            raise ConfigError("threshold t1 must be strictly less than t2")
        if self.mode == "quantile" and not (0.0 <= self.t1 and self.t2 <= 1.0):
            raise ConfigError("quantile levels must lie in [0, 1]")


@dataclass(frozen=True)
class Cutoffs:
    c1: float
    c2: float


def resolve_cutoffs(spec: ThresholdSpec, env: Environment, noise_sigma: float,
                    mc_samples: int = 200_000, seed: int | None = None) -> Cutoffs:
    """Resolve a ThresholdSpec to raw cutoffs against ``env``.

    Raw mode passes (t1, t2) through unchanged.  Quantile mode samples
    ``mc_samples`` random (user, item) pairs with fresh Gaussian noise from
    the "cutoffs" substream (draw order: users, items, noise) and takes the
    empirical t1/t2 quantiles of the noisy preference.

    Args:
        spec: threshold specification.
        env: environment whose preference distribution is being calibrated.
        noise_sigma: rating-noise std dev to bake into the sample.
        mc_samples: Monte Carlo sample size; must be >= 10_000 in quantile mode.
        seed: root seed for the substream; defaults to ``env.seed``.

    Raises:
        DegenerateThresholdError: if the resolved cutoffs collapse (c1 >= c2).
    """
    if spec.mode == "raw":
        return Cutoffs(c1=float(spec.t1), c2=float(spec.t2))
    if mc_samples < 10_000:
        raise ConfigError("quantile-mode cutoff resolution needs mc_samples >= 10000")
    rng = substream(env.seed if seed is None else seed, "cutoffs")
    users = rng.integers(0, env.num_users, size=mc_samples)
    items = rng.integers(0, env.num_items, size=mc_samples)
    noise = rng.normal(0.0, noise_sigma, size=mc_samples)
    sample = np.einsum("ij,ij->i", env.user_factors[users], env.item_factors[items]) + noise
    c1 = float(np.quantile(sample, spec.t1))
    c2 = float(np.quantile(sample, spec.t2))
    if not c1 < c2:
        raise DegenerateThresholdError(
            f"cutoffs collapsed: c1={c1!r} >= c2={c2!r} (t1={spec.t1}, t2={spec.t2})")
    return Cutoffs(c1=c1, c2=c2)


def classify(values, cutoffs: Cutoffs):
    """Threshold noisy preference values into ordinal ratings.

    Boundaries are left-closed: 0 for x < c1, 1 for c1 <= x < c2, 2 for x >= c2.
    Accepts a scalar or array; returns the same shape with int ratings.
    """
    cuts = np.asarray([cutoffs.c1, cutoffs.c2])
    out = np.searchsorted(cuts, np.asarray(values), side="right")
    if np.isscalar(values) or np.ndim(values) == 0:
        return int(out)
    return out.astype(np.int64)


def observe_rating(preference: float, noise_sigma: float, cutoffs: Cutoffs,
                   rng: np.random.Generator) -> int:
    """One noisy ordinal rating of a single true preference."""
    return int(classify(preference + rng.normal(0.0, noise_sigma), cutoffs))


def observe_ratings(preferences, noise_sigma: float, cutoffs: Cutoffs,
                    rng: np.random.Generator) -> np.ndarray:
    """Vectorized counterpart of observe_rating for a batch of preferences."""
    prefs = np.asarray(preferences, dtype=float)
    noisy = prefs + rng.normal(0.0, noise_sigma, size=prefs.shape)
    return classify(noisy, cutoffs)
