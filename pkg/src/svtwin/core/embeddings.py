"""Seeded synthetic embeddings standing in for real multimodal encoders."""

from __future__ import annotations

import hashlib

import numpy as np

from svtwin.core.errors import ConfigError

SUPPORTED_DIMS = frozenset({50, 128, 512, 768})


def _seed_from_string(seed_string: str) -> int:
    return int.from_bytes(hashlib.blake2b(seed_string.encode("utf-8"), digest_size=16).digest(), "little")


def seeded_gaussian_embedding(seed_string: str, dims: int) -> np.ndarray:
    """Standard-normal vector that is a pure function of ``seed_string`` and ``dims``.

    >>> a = seeded_gaussian_embedding("visual:neon,studio|creator:4", 512)
    >>> b = seeded_gaussian_embedding("visual:neon,studio|creator:4", 512)
    >>> bool((a == b).all())
    True
    """
    if dims not in SUPPORTED_DIMS:
        raise ConfigError(f"unsupported embedding dims {dims}; expected one of {sorted(SUPPORTED_DIMS)}")
    rng = np.random.Generator(np.random.PCG64(_seed_from_string(f"{dims}|{seed_string}")))
    return rng.standard_normal(dims)


def as_vector(values, dim: int) -> np.ndarray:
    """Validate ``values`` as a finite dense vector of length ``dim``."""
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != dim:
        raise ConfigError(f"expected vector of length {dim}, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ConfigError("vector entries must be finite")
    return vec
