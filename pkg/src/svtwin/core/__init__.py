from svtwin.core.embeddings import SUPPORTED_DIMS, as_vector, seeded_gaussian_embedding
from svtwin.core.errors import ConfigError, DomainError
from svtwin.core.metrics import CosineResult, cosine, cosine_checked, gini, shannon_entropy_bits
from svtwin.core.rng import RngStream, derive_stream, stable_hash64

__all__ = [
    "SUPPORTED_DIMS",
    "ConfigError",
    "CosineResult",
    "DomainError",
    "RngStream",
    "as_vector",
    "cosine",
    "cosine_checked",
    "derive_stream",
    "gini",
    "seeded_gaussian_embedding",
    "shannon_entropy_bits",
    "stable_hash64",
]
