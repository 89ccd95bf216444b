"""The twelve video archetypes and their keyword banks."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Archetype:
    name: str
    duration_mean: float
    duration_sd: float
    viral_potential: float
    signature: str


ARCHETYPES: tuple[Archetype, ...] = (
    Archetype("DANCE", 15.0, 5.0, 0.8, "High hook strength, music-synced execution."),
    Archetype("COMEDY", 45.0, 15.0, 0.9, "Narrative setup required, high completion reward."),
    Archetype("EDUCATIONAL", 55.0, 10.0, 0.5, "Information-dense, low re-watchability."),
    Archetype("GAMING", 30.0, 10.0, 0.6, "High visual chaos, niche audience alignment."),
    Archetype("LIFESTYLE", 25.0, 10.0, 0.3, "Aesthetic focus, lower hook strength."),
    Archetype("MUSIC", 20.0, 5.0, 0.7, "Audio-dominant, high share probability."),
    Archetype("PETS", 12.0, 4.0, 0.8, "Universal appeal, very short duration."),
    Archetype("DIY_CRAFTS", 50.0, 15.0, 0.4, "Process-oriented, satisfying visual patterns."),
    Archetype("TECH", 40.0, 10.0, 0.5, "News/Reviews, text-heavy."),
    Archetype("BEAUTY", 25.0, 8.0, 0.6, "Transformational content, visual-dominant."),
    Archetype("FITNESS", 35.0, 10.0, 0.5, "Instructional loops."),
    Archetype("NEWS", 55.0, 5.0, 0.3, "Speech-heavy, requires high attention."),
)

ARCHETYPE_BY_NAME: dict[str, Archetype] = {a.name: a for a in ARCHETYPES}
ARCHETYPE_NAMES: tuple[str, ...] = tuple(a.name for a in ARCHETYPES)

# The compact vector reserves ten one-hot slots, so twelve archetypes fold
# into ten groups. Pairs share a slot where their audiences overlap most.
ARCHETYPE_GROUP: dict[str, int] = {
    "DANCE": 0,
    "COMEDY": 1,
    "EDUCATIONAL": 2,
    "GAMING": 3,
    "TECH": 3,
    "LIFESTYLE": 4,
    "BEAUTY": 4,
    "MUSIC": 5,
    "PETS": 6,
    "DIY_CRAFTS": 7,
    "FITNESS": 8,
    "NEWS": 9,
}

# Free-text domains that are not archetype names but show up in personas and plans.
DOMAIN_ALIASES: dict[str, str] = {
    "cooking": "LIFESTYLE",
    "food": "LIFESTYLE",
    "travel": "LIFESTYLE",
    "fashion": "BEAUTY",
    "makeup": "BEAUTY",
    "science": "EDUCATIONAL",
    "history": "EDUCATIONAL",
    "animals": "PETS",
    "crafts": "DIY_CRAFTS",
    "diy": "DIY_CRAFTS",
    "workout": "FITNESS",
    "sports": "FITNESS",
    "games": "GAMING",
    "esports": "GAMING",
    "gadgets": "TECH",
    "politics": "NEWS",
    "songs": "MUSIC",
    "choreography": "DANCE",
    "memes": "COMEDY",
}


def resolve_archetype(name: str) -> str:
    """Map an archetype name or a free-text domain onto an archetype name.

    Unknown domains fall back to LIFESTYLE, the broadest category.
    """
    key = name.strip()
    if key.upper() in ARCHETYPE_BY_NAME:
        return key.upper()
    return DOMAIN_ALIASES.get(key.lower(), "LIFESTYLE")


# Base hook strength per archetype before creator-tier shifts.
BASE_HOOK: dict[str, float] = {
    "DANCE": 0.70,
    "COMEDY": 0.62,
    "EDUCATIONAL": 0.45,
    "GAMING": 0.58,
    "LIFESTYLE": 0.40,
    "MUSIC": 0.60,
    "PETS": 0.66,
    "DIY_CRAFTS": 0.50,
    "TECH": 0.48,
    "BEAUTY": 0.56,
    "FITNESS": 0.52,
    "NEWS": 0.42,
}

TOPIC_TAGS: dict[str, tuple[str, ...]] = {
    "DANCE": ("dancechallenge", "choreo", "tutorialdance", "kpopdance"),
    "COMEDY": ("skit", "prank", "standup", "relatable"),
    "EDUCATIONAL": ("learnontiktok", "sciencefacts", "studytips", "history"),
    "GAMING": ("gameplay", "speedrun", "esports", "gamingclips"),
    "LIFESTYLE": ("dayinmylife", "cooking", "vlog", "morningroutine"),
    "MUSIC": ("cover", "newmusic", "producer", "singing"),
    "PETS": ("dogsoftiktok", "catvideos", "puppy", "petcare"),
    "DIY_CRAFTS": ("diyproject", "woodworking", "satisfying", "crafting"),
    "TECH": ("techreview", "unboxing", "gadgets", "coding"),
    "BEAUTY": ("makeuptutorial", "skincare", "glowup", "grwm"),
    "FITNESS": ("workout", "gymtok", "homeworkout", "yoga"),
    "NEWS": ("breakingnews", "explained", "worldnews", "politics"),
}

VISUAL_KEYWORDS: dict[str, tuple[str, ...]] = {
    "DANCE": ("movement", "studio", "neon", "crowd"),
    "COMEDY": ("faces", "kitchen", "costume", "reaction"),
    "EDUCATIONAL": ("whiteboard", "diagram", "text", "lab"),
    "GAMING": ("screen", "explosions", "hud", "controller"),
    "LIFESTYLE": ("pastel", "sunlight", "food", "apartment"),
    "MUSIC": ("guitar", "stage", "microphone", "lights"),
    "PETS": ("dog", "cat", "garden", "sofa"),
    "DIY_CRAFTS": ("hands", "wood", "paint", "workbench"),
    "TECH": ("device", "desk", "closeup", "charts"),
    "BEAUTY": ("mirror", "brushes", "closeup", "beforeafter"),
    "FITNESS": ("gym", "weights", "mat", "outdoor"),
    "NEWS": ("anchor", "map", "headline", "studio"),
}

AUDIO_KEYWORDS: dict[str, tuple[str, ...]] = {
    "DANCE": ("beat", "bass", "trending_sound"),
    "COMEDY": ("dialogue", "laugh", "sting"),
    "EDUCATIONAL": ("voiceover", "calm", "ambient"),
    "GAMING": ("sfx", "commentary", "synth"),
    "LIFESTYLE": ("lofi", "acoustic", "ambient"),
    "MUSIC": ("vocals", "melody", "live_mix"),
    "PETS": ("bark", "purr", "cute_sound"),
    "DIY_CRAFTS": ("asmr", "tools", "lofi"),
    "TECH": ("voiceover", "electronic", "click"),
    "BEAUTY": ("pop", "voiceover", "chill"),
    "FITNESS": ("edm", "countdown", "coach"),
    "NEWS": ("speech", "jingle", "voiceover"),
}


def archetype_tag(name: str) -> str:
    """Canonical hashtag naming the archetype itself (e.g. ``diy_crafts``)."""
    return name.lower()
