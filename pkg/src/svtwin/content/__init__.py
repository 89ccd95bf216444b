"""Content twin: archetypes, content generation and the content store."""

from svtwin.content.archetypes import (
    ARCHETYPE_BY_NAME,
    ARCHETYPE_GROUP,
    ARCHETYPE_NAMES,
    ARCHETYPES,
    Archetype,
    archetype_tag,
    resolve_archetype,
)
from svtwin.content.model import (
    CandidateFilter,
    ContentProfile,
    ContentStore,
    PolicyError,
    apply_interaction,
    build_compact_vector,
    build_embeddings,
    canonical_tag,
    create_content,
    keyword_bucket,
    materialize,
    template_caption,
)

__all__ = [
    "ARCHETYPES",
    "ARCHETYPE_BY_NAME",
    "ARCHETYPE_GROUP",
    "ARCHETYPE_NAMES",
    "Archetype",
    "CandidateFilter",
    "ContentProfile",
    "ContentStore",
    "PolicyError",
    "apply_interaction",
    "archetype_tag",
    "build_compact_vector",
    "build_embeddings",
    "canonical_tag",
    "create_content",
    "keyword_bucket",
    "materialize",
    "resolve_archetype",
    "template_caption",
]
