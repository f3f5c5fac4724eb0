"""Deterministic 64-bit seed derivation.

Every stochastic component draws from a numpy Generator seeded through
``derive_seed``, so results never depend on iteration order or thread
scheduling: the seed of each unit of work is a pure function of the
experiment base seed and the unit's indices.
"""

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    # splitmix64 finalizer: cheap, full-avalanche 64-bit mixing.
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(base: int, *parts: int) -> int:
    """Mix ``base`` with integer ``parts`` into a new 64-bit seed.

    Injective in each part for a fixed arity, so distinct index tuples
    never collide by construction of the xor/mix chain.
    """
    h = base & _MASK
    for p in parts:
        h = _splitmix64(h ^ (int(p) & _MASK))
    return h
