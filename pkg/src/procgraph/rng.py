"""Counter-based splittable random streams.

A stream is identified by ``(seed, path, counter)``; the n-th raw draw is
``splitmix64(key(seed, path) + (n + 1) * golden)``. There is no hidden
generator state: two streams with equal identity produce equal draws, and
``split`` derives children without touching the parent's counter.

Raw-draw cost per call: ``uniform``/``randint``/``choice`` consume exactly one
raw draw, ``normal`` consumes two.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

from .errors import EmptyWeights, InvalidRange, NonPositiveWeight

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_INV53 = 1.0 / 9007199254740992.0


def mix64(x: int) -> int:
    x &= MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def _mix64_array(x):
    x = np.asarray(x, dtype=np.uint64)
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(0xBF58476D1CE4E5B9)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def label_hash(label: str) -> int:
    return int.from_bytes(hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest(), "little")


class RandomStream:
    __slots__ = ("seed", "path", "counter", "_key")

    def __init__(self, seed: int, path=(), counter: int = 0):
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or not 0 <= int(seed) <= MASK64:
            raise InvalidRange(f"seed must be an integer in [0, 2**64), got {seed!r}")
        self.seed = int(seed)
        self.path = tuple(path)
        self.counter = int(counter)
        key = mix64(self.seed ^ 0x5DEECE66D)
        for label in self.path:
            key = mix64(key ^ label_hash(label))
        self._key = key

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, path={self.path!r}, counter={self.counter})"

    def __eq__(self, other):
        if not isinstance(other, RandomStream):
            return NotImplemented
        return (self.seed, self.path, self.counter) == (other.seed, other.path, other.counter)

    def __hash__(self):
        return hash((self.seed, self.path, self.counter))

    def copy(self) -> "RandomStream":
        return RandomStream(self.seed, self.path, self.counter)

    def split(self, label: str) -> "RandomStream":
        return RandomStream(self.seed, self.path + (str(label),), 0)

    # raw draws

    def raw(self) -> int:
        self.counter += 1
        return mix64(self._key + ((self.counter * GOLDEN) & MASK64))

    def raw_array(self, n: int) -> np.ndarray:
        counters = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        return _mix64_array(np.uint64(self._key) + counters * np.uint64(GOLDEN))

    def random(self) -> float:
        """One raw draw mapped to [0, 1)."""
        return (self.raw() >> 11) * _INV53

    def random_array(self, n: int) -> np.ndarray:
        return (self.raw_array(n) >> np.uint64(11)).astype(np.float64) * _INV53

    # distributions

    def uniform(self, lo: float, hi: float) -> float:
        lo, hi = float(lo), float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
            raise InvalidRange(f"uniform range [{lo}, {hi}) is invalid")
        u = self.random()
        if lo == hi:
            return lo
        x = lo + (hi - lo) * u
        return x if x < hi else math.nextafter(hi, lo)

    def uniform_array(self, lo, hi, n: int) -> np.ndarray:
        lo, hi = float(lo), float(hi)
        if lo > hi:
            raise InvalidRange(f"uniform range [{lo}, {hi}) is invalid")
        x = lo + (hi - lo) * self.random_array(n)
        if hi > lo:
            x = np.minimum(x, np.nextafter(hi, lo))
        return x

    def normal(self, mu: float, sigma: float) -> float:
        if not sigma >= 0 or not math.isfinite(sigma):
            raise InvalidRange(f"normal sigma must be >= 0, got {sigma}")
        u1 = ((self.raw() >> 11) + 1) * _INV53  # (0, 1]
        u2 = (self.raw() >> 11) * _INV53
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return mu + sigma * z

    def randint(self, n: int) -> int:
        if n < 1:
            raise InvalidRange(f"randint needs n >= 1, got {n}")
        return ((self.raw() >> 11) * int(n)) >> 53

    def choice(self, weights) -> int:
        weights = [float(w) for w in weights]
        if not weights:
            raise EmptyWeights("choice needs at least one weight")
        if any(not (w > 0) or not math.isfinite(w) for w in weights):
            raise NonPositiveWeight(f"weights must be positive and finite: {weights}")
        target = self.random() * math.fsum(weights)
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if target < acc:
                return i
        return len(weights) - 1


def uniform(s: RandomStream, lo: float, hi: float) -> float:
    return s.uniform(lo, hi)


def normal(s: RandomStream, mu: float, sigma: float) -> float:
    return s.normal(mu, sigma)


def randint(s: RandomStream, n: int) -> int:
    return s.randint(n)


def choice(s: RandomStream, weights) -> int:
    return s.choice(weights)


def split(s: RandomStream, label: str) -> RandomStream:
    return s.split(label)
