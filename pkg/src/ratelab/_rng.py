"""Named, independent random substreams derived from one root seed."""
from __future__ import annotations

import hashlib

import numpy as np


def substream(seed: int, *names: str) -> np.random.Generator:
    """Return a Generator for the substream identified by ``names``.

    Every consumer of randomness asks for its own named stream, so adding a
    new consumer (or reordering calls) never perturbs the draws seen by the
    others.  The spawn key is derived from a stable hash of the joined names,
    making the mapping independent of Python's per-process hash seed.
    """
    tag = "/".join(names).encode()
    digest = hashlib.sha256(tag).digest()
    words = tuple(int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4))
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=words))
