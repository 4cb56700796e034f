"""Counter-based, splittable random number generation.

An ``Rng`` is a Philox-4x64 counter-based generator keyed by the pair
(seed, stream): the 128-bit key is ``seed + 2**64 * stream``. Two Rngs with
the same (seed, stream) produce the same sequence, and distinct streams are
independent. Normal draws use the Box-Muller transform of two uniform
draws ``u1, u2``: ``sqrt(-2 log(1 - u1)) * cos(2 pi u2)``.

Bitwise reproducibility is only promised for a given numpy version.
"""

import numpy as np

MAX_UINT64 = 2 ** 64


class Rng:
    """Deterministic random stream identified by (seed, stream).

    Parameters
    ----------

    seed
      Integer in [0, 2**64).

    stream
      Integer in [0, 2**64), use ``spawn`` to derive sibling streams.
    """

    def __init__(self, seed=0, stream=0):
        for name, value in [("seed", seed), ("stream", stream)]:
            if not (0 <= int(value) < MAX_UINT64):
                raise ValueError("The %s must be in [0, 2**64), got %s"
                                 % (name, value))
        self.seed = int(seed)
        self.stream = int(stream)
        self.counter = 0
        key = self.seed + MAX_UINT64 * self.stream
        self._generator = np.random.Generator(np.random.Philox(key=key))

    def spawn(self, stream):
        """Return a fresh Rng with the same seed on another stream."""
        return Rng(seed=self.seed, stream=stream)

    def child(self, index):
        """Return an Rng on a sub-stream derived from (stream, index).

        The sub-stream id is drawn from numpy's SeedSequence so children of
        different streams do not collide.
        """
        sequence = np.random.SeedSequence(entropy=self.stream, spawn_key=(index,))
        return Rng(seed=self.seed, stream=int(sequence.generate_state(1, np.uint64)[0]))

    def uniform(self, size=None):
        """Draw from uniform[0, 1)."""
        values = self._generator.random(size)
        self.counter += int(np.prod(size)) if size is not None else 1
        return values

    def normal(self, size=None):
        """Draw from the standard normal (Box-Muller on uniform draws)."""
        n = int(np.prod(size)) if size is not None else 1
        u1 = self.uniform(n)
        u2 = self.uniform(n)
        values = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2 * np.pi * u2)
        if size is None:
            return float(values[0])
        return values.reshape(size)

    def permutation(self, n):
        """Return a random bijection of range(n), as an int array."""
        self.counter += n
        return self._generator.permutation(n)

    def integers(self, low, high, size=None):
        """Draw integers in [low, high)."""
        self.counter += int(np.prod(size)) if size is not None else 1
        return self._generator.integers(low, high, size=size)

    def draw(self, distribution, size=None):
        """Draw from "normal", "uniform" or ("permutation", n)."""
        if distribution == "normal":
            return self.normal(size)
        elif distribution == "uniform":
            return self.uniform(size)
        elif isinstance(distribution, tuple) and distribution[0] == "permutation":
            return self.permutation(distribution[1])
        raise ValueError("Unknown distribution %s" % (distribution,))

    def __repr__(self):
        return "Rng(seed=%d, stream=%d, counter=%d)" % (
            self.seed, self.stream, self.counter)


def rng_draw(rng, distribution, size=None):
    """Draw values from ``rng`` (see ``Rng.draw``)."""
    return rng.draw(distribution, size=size)
