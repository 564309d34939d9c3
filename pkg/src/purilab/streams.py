"""Deterministic random-stream derivation.

Every random draw in the package comes from a generator derived from a master
seed plus a tuple of integer keys, so a parallel schedule reproduces a serial
one exactly.
"""
import numpy as np

# Stream namespaces. Keep these stable: changing one changes every output file.
HAAR = 1
DIRECTIONS = 2
OPTIMIZER = 3
ORACLE = 4


def stream(seed, *key):
    """Return a ``numpy.random.Generator`` for ``(seed, *key)``."""
    seq = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(seq)
