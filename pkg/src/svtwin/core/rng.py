"""Deterministic random substreams.

Every stochastic decision in the simulator draws from a stream derived from
``(master_seed, domain_tag, entity_ids)``. Streams are counter based: draw ``i``
is a pure function of the stream key and ``i``, so sampling order across
entities never changes a result.

Do not use Python's ``hash()`` anywhere in this path; it is salted per process.
"""

from __future__ import annotations

import hashlib
import math
from typing import Sequence, TypeVar

T = TypeVar("T")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0


def stable_hash64(*parts: object) -> int:
    """Stable 64-bit hash of the string forms of ``parts``."""
    text = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class RngStream:
    """Counter-based SplitMix64 stream.

    ``cursor`` counts draws taken so far. Two streams with equal key and
    cursor produce identical futures.
    """

    __slots__ = ("master_seed", "domain_tag", "entity_ids", "key", "cursor", "_spare")

    def __init__(self, master_seed: int, domain_tag: str, entity_ids: Sequence[int] = ()) -> None:
        if not domain_tag:
            raise ValueError("domain_tag must be non-empty")
        self.master_seed = int(master_seed)
        self.domain_tag = domain_tag
        self.entity_ids = tuple(int(e) for e in entity_ids)
        self.key = stable_hash64(self.master_seed & _MASK64, domain_tag, *self.entity_ids)
        self.cursor = 0
        self._spare: float | None = None

    def __repr__(self) -> str:
        return (
            f"RngStream(seed={self.master_seed}, tag={self.domain_tag!r}, "
            f"ids={self.entity_ids}, cursor={self.cursor})"
        )

    def next_u64(self) -> int:
        self.cursor += 1
        return _mix64((self.key + self.cursor * _GOLDEN) & _MASK64)

    def random(self) -> float:
        """Uniform draw in [0, 1)."""
        return (self.next_u64() >> 11) * _INV_2_53

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange requires n > 0")
        return int(self.random() * n)

    def gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        # Box-Muller, caching the second variate.
        if self._spare is not None:
            z, self._spare = self._spare, None
            return mu + sigma * z
        u1 = 1.0 - self.random()
        u2 = self.random()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return mu + sigma * r * math.cos(2.0 * math.pi * u2)

    def lognormal_factor(self, sigma: float) -> float:
        """Mean-one log-normal multiplier exp(sigma*Z - sigma^2/2)."""
        return math.exp(sigma * self.gauss() - 0.5 * sigma * sigma)

    def choice(self, items: Sequence[T]) -> T:
        if not items:
            raise IndexError("choice from empty sequence")
        return items[self.randrange(len(items))]

    def weighted_choice(self, items: Sequence[T], weights: Sequence[float]) -> T:
        total = math.fsum(weights)
        if total <= 0:
            raise ValueError("weights must have positive total")
        target = self.random() * total
        acc = 0.0
        for item, w in zip(items, weights):
            acc += w
            if target < acc:
                return item
        return items[-1]

    def sample(self, items: Sequence[T], k: int) -> list[T]:
        """k distinct items, partial Fisher-Yates."""
        pool = list(items)
        k = min(k, len(pool))
        for i in range(k):
            j = i + self.randrange(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


def derive_stream(master_seed: int, domain_tag: str, entity_ids: Sequence[int] = ()) -> RngStream:
    """Return the substream for ``(master_seed, domain_tag, entity_ids)``."""
    return RngStream(master_seed, domain_tag, entity_ids)
