"""Persona templates and the deterministic persona-to-parameter mapping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from svtwin.content.archetypes import ARCHETYPE_NAMES, DOMAIN_ALIASES


@dataclass(frozen=True)
class TraitEffect:
    attention: float = 1.0
    humor: float = 0.0
    toxicity: float = 0.0
    like: float = 1.0
    comment: float = 1.0
    share: float = 1.0
    gift: float = 1.0
    follow: float = 1.0


# Trait adjectives recognised by the mapping. Unknown words are neutral.
TRAIT_LEXICON: Mapping[str, TraitEffect] = {
    "trendy": TraitEffect(attention=0.85, share=1.3, follow=1.2),
    "impulsive": TraitEffect(attention=0.7, like=1.3, gift=1.3),
    "social": TraitEffect(comment=1.3, share=1.3, follow=1.3),
    "loud": TraitEffect(comment=1.4, toxicity=0.1),
    "competitive": TraitEffect(attention=1.1, gift=1.2),
    "analytical": TraitEffect(attention=1.3, like=0.8, comment=1.3),
    "skeptical": TraitEffect(like=0.7, share=0.8, toxicity=0.05),
    "articulate": TraitEffect(comment=1.4),
    "patient": TraitEffect(attention=1.35),
    "demanding": TraitEffect(like=0.75, attention=0.9),
    "quiet": TraitEffect(comment=0.4, share=0.6),
    "observant": TraitEffect(attention=1.2),
    "curious": TraitEffect(attention=1.2, follow=1.1),
    "reserved": TraitEffect(like=0.7, comment=0.5),
    "loyal": TraitEffect(follow=1.5, gift=1.2),
    "enthusiastic": TraitEffect(like=1.4, share=1.2),
    "generous": TraitEffect(gift=1.8),
    "emotional": TraitEffect(like=1.2, comment=1.2),
    "devoted": TraitEffect(follow=1.4, gift=1.4),
    "focused": TraitEffect(attention=1.3),
    "methodical": TraitEffect(attention=1.2, like=0.9),
    "thoughtful": TraitEffect(attention=1.15, comment=1.1),
    "witty": TraitEffect(humor=0.25, comment=1.2),
    "playful": TraitEffect(humor=0.2, like=1.1),
    "spontaneous": TraitEffect(attention=0.8, share=1.2),
    "irreverent": TraitEffect(humor=0.2, toxicity=0.15),
    "restless": TraitEffect(attention=0.6),
    "impatient": TraitEffect(attention=0.55),
    "distractible": TraitEffect(attention=0.6),
    "casual": TraitEffect(like=0.9),
    "easygoing": TraitEffect(toxicity=0.1),
    "aesthetic": TraitEffect(attention=1.1, share=1.1),
    "selective": TraitEffect(like=0.75),
    "stylish": TraitEffect(share=1.2),
    "calm": TraitEffect(attention=1.1, toxicity=-0.05),
    "discerning": TraitEffect(like=0.8, attention=1.1),
    "creative": TraitEffect(share=1.2, attention=1.05),
    "ambitious": TraitEffect(follow=1.2, gift=1.1),
    "authentic": TraitEffect(comment=1.1, follow=1.1),
    "energetic": TraitEffect(attention=0.85, like=1.2),
    "charismatic": TraitEffect(comment=1.2, share=1.2),
    "nostalgic": TraitEffect(attention=1.1),
    "humorous": TraitEffect(humor=0.25),
    "passionate": TraitEffect(like=1.2, gift=1.2),
}


@dataclass(frozen=True)
class PersonaTemplate:
    name: str
    core_traits: tuple[str, str, str, str, str]
    viewing_preferences: str
    creation_style: str


PERSONA_TEMPLATES: Mapping[str, PersonaTemplate] = {
    t.name: t
    for t in (
        PersonaTemplate(
            "The Hypebeast",
            ("trendy", "impulsive", "social", "loud", "competitive"),
            "fast cuts, trending sounds, drops and challenges",
            "jumps on every challenge within hours",
        ),
        PersonaTemplate(
            "The Critic",
            ("analytical", "skeptical", "articulate", "patient", "demanding"),
            "reviews, breakdowns and long takes",
            "voiceover commentary with side-by-side comparisons",
        ),
        PersonaTemplate(
            "The Lurker",
            ("quiet", "observant", "curious", "reserved", "loyal"),
            "whatever the feed serves, rarely interacts",
            "posts rarely and keeps it low-key",
        ),
        PersonaTemplate(
            "The Superfan",
            ("enthusiastic", "loyal", "generous", "emotional", "devoted"),
            "a handful of favourite creators and their live streams",
            "fan edits and reaction clips",
        ),
        PersonaTemplate(
            "The Scholar",
            ("curious", "focused", "methodical", "patient", "thoughtful"),
            "explainers, tutorials and deep dives",
            "structured lessons with on-screen notes",
        ),
        PersonaTemplate(
            "The Jester",
            ("witty", "playful", "spontaneous", "irreverent", "social"),
            "skits, memes and pranks",
            "one-take sketches with punchline endings",
        ),
        PersonaTemplate(
            "The Scroller",
            ("restless", "impatient", "distractible", "casual", "easygoing"),
            "anything under fifteen seconds",
            "quick snippets shot on the go",
        ),
        PersonaTemplate(
            "The Curator",
            ("aesthetic", "selective", "stylish", "calm", "discerning"),
            "polished visuals and slow pacing",
            "carefully graded shots and minimal captions",
        ),
    )
}
TEMPLATE_NAMES: tuple[str, ...] = tuple(PERSONA_TEMPLATES)


@dataclass(frozen=True)
class PersonaParameters:
    attention_multiplier: float
    humor_shift: float
    toxicity_shift: float
    propensity_multipliers: Mapping[str, float]
    domain: str | None


def _bounded(x: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, x))


def persona_parameters(core_traits: Sequence[str], viewing_preferences: str = "") -> PersonaParameters:
    """Fold trait effects multiplicatively (additively for humor/toxicity).

    Multipliers are bounded so a single persona cannot zero out or saturate a
    propensity. A domain is extracted when ``viewing_preferences`` names an
    archetype or a known alias.
    """
    att, humor, tox = 1.0, 0.0, 0.0
    mult = {"like": 1.0, "comment": 1.0, "share": 1.0, "gift": 1.0, "follow": 1.0}
    for raw in core_traits:
        eff = TRAIT_LEXICON.get(str(raw).strip().lower())
        if eff is None:
            continue
        att *= eff.attention
        humor += eff.humor
        tox += eff.toxicity
        for k in mult:
            mult[k] *= getattr(eff, k)
    domain = None
    text = viewing_preferences.lower()
    for name in ARCHETYPE_NAMES:
        if name.lower().replace("_", " ") in text or name.lower() in text:
            domain = name
            break
    if domain is None:
        for word in text.replace(",", " ").split():
            if word in DOMAIN_ALIASES:
                domain = DOMAIN_ALIASES[word]
                break
    return PersonaParameters(
        attention_multiplier=_bounded(att, 0.25, 4.0),
        humor_shift=_bounded(humor, -0.5, 0.5),
        toxicity_shift=_bounded(tox, -0.5, 0.5),
        propensity_multipliers={k: _bounded(v, 0.2, 3.0) for k, v in mult.items()},
        domain=domain,
    )
