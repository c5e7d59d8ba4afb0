"""Config tree: built-in defaults, YAML overlay, and the named threshold suites.

One plain dict drives everything.  ``load_config`` deep-merges a YAML file
over :func:`default_config`; unknown keys anywhere in the tree are rejected
so typos fail loudly instead of silently running defaults.  CLI flags are
applied on top by the caller, giving the documented precedence
flag > config file > built-in default.
"""
from __future__ import annotations

import copy
import hashlib
import json

import yaml

from .env_model import EnvConfig, ThresholdSpec
from .errors import ConfigError
from .recommenders import LatentFactorHyperparams
from .sim_loop import SimConfig

# Quantile threshold pairs (t1, t2) per suite and treatment arm.
SUITES = {
    "sim_exp": {"a": (0.4028, 0.8845), "b": (0.4276, 0.8508), "c": (0.4240, 0.8270)},
    "sim_ctld": {"a": (0.33, 0.66), "b": (0.25, 0.50), "c": (0.50, 0.75)},
}
TREATMENTS = ("a", "b", "c")
RECOMMENDER_KINDS = ("random", "toppop", "latent_factor")


def default_config() -> dict:
    return {
        "seed": 0,
        "environment": {
            "num_users": 100,
            "num_items": 5000,
            "latent_dim": 8,
            "noise_sigma": 0.5,
            "rating_weights": [0, 1, 2],
        },
        "simulation": {
            "n_iter": 1000,
            "rating_frequency": 0.1,
            "ratio_init_ratings": 0.01,
            "mc_samples": 200_000,
            "utility_window": 20,
        },
        "thresholds": {
            "mode": "quantile",
        },
        "recommender": {
            "num_factors": 8,
            "learning_rate": 0.01,
            "l2": 0.05,
            "epochs": 10,
            "init_scale": 0.1,
            "refit_mode": "full",
        },
        "analysis": {
            "cap": None,
            "min_ratings": None,
            "ci_level": 0.95,
            "bootstrap_resamples": 2000,
            "histogram_bins": 20,
            "min_class_ratings": 10,
        },
        "ingest": {
            "columns": {
                "user_id": "user_id",
                "item_id": "item_id",
                "rating": "rating",
                "timestamp": "timestamp",
                "treatment": "treatment",
                "period": "period",
                "recommender_class": "recommender_class",
            },
            "rating_values": {"0": 0, "1": 1, "2": 2},
            "timestamp_format": "epoch",
        },
    }


def _merge(base: dict, overlay: dict, path: str = "") -> dict:
    out = dict(base)
    for key, value in overlay.items():
        where = f"{path}.{key}" if path else str(key)
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where!r} must be a mapping")
            out[key] = _merge(base[key], value, where)
        else:
            out[key] = value
    return out


def load_config(path: str | None = None) -> dict:
    """Built-in defaults, overlaid with the YAML file at ``path`` if given."""
    cfg = copy.deepcopy(default_config())
    if path is None:
        return cfg
    try:
        with open(path) as fh:
            loaded = yaml.safe_load(fh)
    except yaml.YAMLError as err:
        raise ConfigError(f"cannot parse config file {path}: {err}") from err
    if loaded is None:
        return cfg
    if not isinstance(loaded, dict):
        raise ConfigError(f"config file {path} must contain a mapping at top level")
    return _merge(cfg, loaded)


def config_hash(cfg: dict) -> str:
    """Short stable digest of a config tree, for manifests."""
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def threshold_spec(suite: str, treatment: str, mode: str = "quantile") -> ThresholdSpec:
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; expected one of {sorted(SUITES)}")
    if treatment not in SUITES[suite]:
        raise ConfigError(f"unknown treatment {treatment!r}; expected one of {TREATMENTS}")
    t1, t2 = SUITES[suite][treatment]
    return ThresholdSpec(mode=mode, t1=t1, t2=t2)


def env_config_from(cfg: dict, seed: int) -> EnvConfig:
    e = cfg["environment"]
    return EnvConfig(
        num_users=e["num_users"],
        num_items=e["num_items"],
        latent_dim=e["latent_dim"],
        noise_sigma=e["noise_sigma"],
        rating_weights=tuple(e["rating_weights"]),
        seed=seed,
    )


def sim_config_from(cfg: dict, suite: str, treatment: str,
                    recommender: str, seed: int) -> SimConfig:
    if recommender not in RECOMMENDER_KINDS:
        raise ConfigError(f"unknown recommender {recommender!r}; "
                          f"expected one of {RECOMMENDER_KINDS}")
    s = cfg["simulation"]
    r = cfg["recommender"]
    hyper = LatentFactorHyperparams(
        num_factors=r["num_factors"],
        learning_rate=r["learning_rate"],
        l2=r["l2"],
        epochs=r["epochs"],
        init_scale=r["init_scale"],
        refit_mode=r["refit_mode"],
    ) if recommender == "latent_factor" else None
    return SimConfig(
        env=env_config_from(cfg, seed),
        thresholds=threshold_spec(suite, treatment, cfg["thresholds"]["mode"]),
        recommender=recommender,
        hyperparams=hyper,
        n_iter=s["n_iter"],
        rating_frequency=s["rating_frequency"],
        ratio_init_ratings=s["ratio_init_ratings"],
        mc_samples=s["mc_samples"],
    )
