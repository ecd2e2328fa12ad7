"""Splittable random streams keyed by (root seed, index path)."""
import numpy as np

SEED_MASK = (1 << 64) - 1


def seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    """Seed sequence for the stream at `key` under root `seed`.

    The same (seed, key) always yields the same stream, and distinct keys give
    statistically independent streams, so work can be farmed out in any order.
    """
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(seed & SEED_MASK, spawn_key=tuple(int(k) for k in key))


def stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream at `key` under root `seed`."""
    return np.random.default_rng(seed_sequence(seed, *key))


def derive_seed(seed: int, *key: int) -> int:
    """A 64-bit integer seed derived from (seed, key), for handing to callees."""
    state = seed_sequence(seed, *key).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])
