"""Population initialisation."""

from __future__ import annotations

import math
from typing import Callable, Mapping

from svtwin.content.archetypes import ARCHETYPE_NAMES
from svtwin.core.errors import ConfigError
from svtwin.core.rng import derive_stream
from svtwin.users.personas import PERSONA_TEMPLATES, TEMPLATE_NAMES, persona_parameters
from svtwin.users.profile import ATTENTION_MAX, ATTENTION_MIN, TIERS, AgentProfile, TierConfig

# (agent_id, tier, domain) -> persona record with core_traits etc., or None to use a template.
PersonaService = Callable[[int, str, str], Mapping | None]

BASE_PROPENSITY_RANGES: Mapping[str, tuple[float, float]] = {
    "like": (0.08, 0.30),
    "comment": (0.01, 0.06),
    "share": (0.01, 0.06),
    "gift": (0.002, 0.02),
    "follow": (0.01, 0.05),
}
ATTENTION_MEDIAN = 9.0
ATTENTION_SIGMA = 0.6

_REGIONS = ("na", "eu", "latam", "apac", "mena")
_AGE_BANDS = ("13-17", "18-24", "25-34", "35-44", "45+")
_LANGS = ("en", "es", "pt", "hi", "id", "ar")


def tier_counts(n: int, shares: Mapping[str, float]) -> dict[str, int]:
    """Largest-remainder apportionment of ``n`` agents to tiers."""
    raw = {t: n * shares[t] for t in TIERS}
    counts = {t: int(math.floor(raw[t])) for t in TIERS}
    left = n - sum(counts.values())
    order = sorted(TIERS, key=lambda t: (-(raw[t] - counts[t]), TIERS.index(t)))
    for t in order[:left]:
        counts[t] += 1
    return counts


def assign_tiers(n: int, config: TierConfig, seed: int) -> list[str]:
    counts = tier_counts(n, config.shares)
    labels = [t for t in TIERS for _ in range(counts[t])]
    rng = derive_stream(seed, "tier-assignment")
    for i in range(len(labels) - 1, 0, -1):
        j = rng.randrange(i + 1)
        labels[i], labels[j] = labels[j], labels[i]
    return labels


def init_population(
    n: int,
    tier_config: TierConfig | None = None,
    persona_source: str = "template",
    seed: int = 0,
    persona_service: PersonaService | None = None,
) -> list[AgentProfile]:
    """Build ``n`` agents with tier-consistent attributes.

    With ``persona_source="llm"`` every elite and active agent asks
    ``persona_service`` for a persona; everyone else, and any agent whose
    request yields nothing, draws a template persona.
    """
    if n < 0:
        raise ConfigError("population size must be non-negative")
    if persona_source not in ("template", "llm"):
        raise ConfigError(f"unknown persona_source {persona_source!r}")
    config = tier_config or TierConfig()
    config.validate()
    tiers = assign_tiers(n, config, seed)
    agents = []
    for agent_id, tier in enumerate(tiers):
        rng = derive_stream(seed, "agent-init", (agent_id,))
        domain = rng.choice(ARCHETYPE_NAMES)
        template = PERSONA_TEMPLATES[rng.choice(TEMPLATE_NAMES)]
        traits: tuple[str, ...] = template.core_traits
        prefs_text = template.viewing_preferences
        persona_name = template.name
        source = "template"
        if persona_source == "llm" and tier in ("elite", "active") and persona_service is not None:
            record = persona_service(agent_id, tier, domain)
            if record:
                traits = tuple(str(t) for t in record.get("core_traits", ()))
                prefs_text = str(record.get("viewing_preferences", ""))
                persona_name = str(record.get("bio", ""))[:60]
                source = "llm"
        mapped = persona_parameters(traits, prefs_text)
        if source == "llm" and mapped.domain is not None:
            domain = mapped.domain
        attention = ATTENTION_MEDIAN * rng.lognormal_factor(ATTENTION_SIGMA) * math.exp(0.5 * ATTENTION_SIGMA**2)
        attention = min(ATTENTION_MAX, max(ATTENTION_MIN, attention * mapped.attention_multiplier))
        humor = min(1.0, max(0.0, rng.random() + mapped.humor_shift))
        toxicity = min(1.0, max(0.0, rng.random() * 0.6 + mapped.toxicity_shift))
        propensities = {}
        for kind, (lo, hi) in BASE_PROPENSITY_RANGES.items():
            base = rng.uniform(lo, hi)
            propensities[kind] = min(1.0, max(0.0, base * mapped.propensity_multipliers[kind]))
        lo, hi = config.creation_ranges[tier]
        creation = 0.0 if tier == "consumer" else rng.uniform(lo, hi)
        demographics = {
            "age_band": rng.choice(_AGE_BANDS),
            "region": rng.choice(_REGIONS),
            "language": rng.choice(_LANGS),
        }
        agents.append(
            AgentProfile(
                agent_id=agent_id,
                demographics=demographics,
                creator_tier=tier,
                attention_span=attention,
                humor_affinity=humor,
                toxicity_tolerance=toxicity,
                domain_expertise=domain,
                engagement_propensities=propensities,
                creation_probability=creation,
                persona_name=persona_name,
                persona_source=source,
                core_traits=traits,
            )
        )
    return agents
