"""Reproducible random substreams.

Every source of randomness in the package is derived from a 64-bit master
seed through ``SeedSequence(seed, spawn_key=(domain, *path))`` feeding a
counter-based Philox generator.  Substreams are therefore independent of
each other and of execution order, which is what makes parallel evaluation
bit-identical to sequential evaluation.
"""

from __future__ import annotations

import numpy as np

# Domain tags keep unrelated substreams from colliding on their path indices.
DOMAIN_TIEBREAK = 0    # (feature,) sort tie-break keys
DOMAIN_PERM_ROUND = 1  # (round,) row permutations for the threshold rounds
DOMAIN_ROUND_SCORE = 2  # (round,) scoring seed inside a threshold round
DOMAIN_BASE_SCORE = 3  # scoring seed for the unpermuted data
DOMAIN_MODEL = 4       # (s,) model draws in the harness
DOMAIN_DATASET = 5     # (replication,) dataset draws
DOMAIN_METHOD = 6      # (replication,) method-internal seed per replication
DOMAIN_FOLDS = 7       # cross-validation fold assignment

_U64 = 1 << 64


def check_seed(seed: int) -> int:
    """Validate that ``seed`` fits in 64 unsigned bits and return it as int."""
    seed = int(seed)
    if not 0 <= seed < _U64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def substream(seed: int, domain: int, *path: int) -> np.random.Generator:
    """Philox generator for the substream at (seed, domain, *path)."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(domain, *path))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, domain: int, *path: int) -> int:
    """Collapse a substream address into a fresh 64-bit scalar seed."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(domain, *path))
    return int(ss.generate_state(1, np.uint64)[0])


def tie_break_keys(seed: int, feature: int, n: int) -> np.ndarray:
    """The n 64-bit tie-break keys for one feature column.

    Key ``i`` belongs to row ``i``; the whole vector is a deterministic
    function of (seed, feature), so any evaluation order yields the same keys.
    """
    gen = substream(seed, DOMAIN_TIEBREAK, feature)
    return gen.integers(0, _U64, size=n, dtype=np.uint64, endpoint=False)
