"""Platform twin: recommendation, graduated exposure, governance and the registry."""

from svtwin.platform.promotion import ABSORBING, EXPANDED, INITIAL, LIMITED, STAGES, VIRAL, GateConfig, GateMetrics, PromotionStore, StageRecord, evaluate_gate
from svtwin.platform.reco import RecoConfig, RecoInputs, ScoredCandidate, preset, rank, rerank, retrieve, serve_feed
from svtwin.platform.registry import PLATFORM_HANDLERS, AccessViolation, IntegrityError, Registry, RollingCache

__all__ = [
    "ABSORBING",
    "EXPANDED",
    "INITIAL",
    "LIMITED",
    "PLATFORM_HANDLERS",
    "STAGES",
    "VIRAL",
    "AccessViolation",
    "GateConfig",
    "GateMetrics",
    "IntegrityError",
    "PromotionStore",
    "RecoConfig",
    "RecoInputs",
    "Registry",
    "RollingCache",
    "ScoredCandidate",
    "StageRecord",
    "evaluate_gate",
    "preset",
    "rank",
    "rerank",
    "retrieve",
    "serve_feed",
]
