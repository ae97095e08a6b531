"""Counter-based random streams.

Every randomized operation in the package derives its randomness from a
64-bit master seed plus an integer path (experiment label, replicate index,
edge key, ...).  Distinct paths give independent streams regardless of
scheduling, so parallel runs reproduce serial ones bit for bit.

Two mechanisms are provided:

* ``stream(seed, *path)`` -- a numpy Generator backed by Philox (itself a
  counter-based generator), for bulk draws such as edge configurations.
* ``keyed_uniform(rkey, ekey)`` -- a single uniform attached to an integer
  key pair, used for lazy cluster growth.  Because the uniform is a pure
  function of (replicate key, edge key) and not of the order in which edges
  are revealed, growth runs at different parameters share one uniform per
  edge.  That is exactly the common-random-number coupling that makes
  cluster sizes pointwise monotone in the open probability.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 finalizer; a bijection on 64-bit integers."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_key(seed: int, *path: int) -> int:
    """Fold (seed, *path) into one 64-bit key; distinct paths, distinct keys."""
    acc = mix64((seed & _MASK64) ^ _GOLDEN)
    for part in path:
        acc = mix64(acc ^ mix64((part * _GOLDEN) & _MASK64))
    return acc


def stream(seed: int, *path: int) -> np.random.Generator:
    """Independent numpy Generator for (seed, *path)."""
    k0 = derive_key(seed, *path)
    k1 = mix64(k0 ^ _GOLDEN)
    return np.random.Generator(np.random.Philox(key=(k1 << 64) | k0))


def keyed_uniform(rkey: int, ekey: int) -> float:
    """Uniform in [0,1) determined by (rkey, ekey), independent of call order."""
    z = mix64(rkey ^ ((ekey * _GOLDEN) & _MASK64))
    z = mix64(z)
    return (z >> 11) * _INV53
