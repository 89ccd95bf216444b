"""Per-encounter behaviour: hook gate, interest match, watch time, engagements."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from svtwin.core.errors import ConfigError
from svtwin.core.metrics import cosine
from svtwin.core.rng import RngStream
from svtwin.interaction.outcome import EncounterOutcome

HOOK_FLOOR = 0.01

# Bank used when a comment is drawn; mirrors the COMMENT surrogate.
COMMENT_BANK: tuple[str, ...] = (
    "Love this!",
    "Great vid",
    "lol",
    "Wait, how?",
    "This made my day",
    "Need part 2",
    "So satisfying",
    "Underrated",
)


@dataclass(frozen=True)
class BehaviorParams:
    alpha: float = 0.5
    beta: float = 2.0
    # Location of the skip-logit noise. Both reciprocal terms are positive, so
    # a zero-mean epsilon would keep every skip probability above 0.5.
    epsilon_loc: float = -1.7
    epsilon_scale: float = 0.3
    hook_window: float = 3.0
    skip_watch_low: float = 0.3
    base_completion: float = 0.45
    lognormal_sigma: float = 0.35
    match_uplift: float = 0.3
    quality_gain: float = 0.3
    fusion_weights: tuple[float, float, float] = (0.5, 0.2, 0.3)
    match_mode: str = "visual_slice"  # or "compact"
    gift_menu: tuple[float, ...] = (1.0, 5.0, 10.0, 50.0)
    gift_menu_weights: tuple[float, ...] = (0.6, 0.25, 0.1, 0.05)
    purchase_conversion: float = 0.03
    price_menu: tuple[float, ...] = (5.0, 10.0, 20.0, 50.0)
    cta_multiplier: float = 1.5

    def __post_init__(self) -> None:
        if abs(sum(self.fusion_weights) - 1.0) > 1e-9 or any(w < 0 for w in self.fusion_weights):
            raise ConfigError("fusion_weights must be non-negative and sum to 1")
        if self.match_mode not in ("visual_slice", "compact"):
            raise ConfigError(f"unknown match_mode {self.match_mode!r}")
        if not 0.0 <= self.base_completion <= 1.0:
            raise ConfigError("base_completion must lie in [0, 1]")
        if len(self.gift_menu) != len(self.gift_menu_weights):
            raise ConfigError("gift menu and weights differ in length")


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def skip_probability(hook_strength: float, attention_span: float, epsilon: float, params: BehaviorParams) -> float:
    """``sigmoid(alpha / hook + beta / attention + epsilon)``; hook is floored at 0.01."""
    hook = max(hook_strength, HOOK_FLOOR)
    return _sigmoid(params.alpha / hook + params.beta / attention_span + epsilon)


def interest_match(pref, content, params: BehaviorParams) -> float:
    """Interest match in [-1, 1].

    With modality slots the per-modality cosines are fused with
    ``fusion_weights``. Without them the 50-dim interests are compared to the
    first 50 entries of the visual embedding, or to the compact vector when
    ``match_mode="compact"``.
    """
    slots = getattr(pref, "modality_slots", None)
    if slots:
        wv, wa, wt = params.fusion_weights
        total = 0.0
        for w, key, emb in (
            (wv, "visual", content.visual_embedding),
            (wa, "audio", content.audio_embedding),
            (wt, "caption", content.caption_embedding),
        ):
            if w and key in slots:
                total += w * cosine(slots[key], emb)
        return max(-1.0, min(1.0, total))
    target = content.compact_vector if params.match_mode == "compact" else content.visual_embedding[:50]
    return cosine(pref.content_interests, target)


def expected_completion(match: float, params: BehaviorParams, quality: float = 0.5) -> float:
    e = params.base_completion + params.match_uplift * match + params.quality_gain * (quality - 0.5)
    return min(1.0, max(0.02, e))


def sample_watch(duration: float, match: float, params: BehaviorParams, rng: RngStream, quality: float = 0.5) -> tuple[float, float]:
    """Log-normal completion draw centred (in mean) on the expected completion, capped at 1."""
    if duration <= 0:
        raise ValueError("duration must be positive")
    draw = expected_completion(match, params, quality) * rng.lognormal_factor(params.lognormal_sigma)
    completion = min(1.0, max(0.0, draw))
    return duration * completion, completion


def engagement_gain(match: float, completion: float) -> float:
    return min(1.5, max(0.0, 0.5 + 0.5 * completion + 0.3 * match))


def sample_engagements(
    outcome: EncounterOutcome,
    propensities: Mapping[str, float],
    match: float,
    rng: RngStream,
    virality: float = 0.5,
    monetization: bool = True,
    comment_source: Callable[[RngStream], str] | None = None,
) -> tuple[tuple[str, ...], str | None]:
    """Independent draws for like/share/comment (and gift when monetised).

    Each fires with probability ``min(1, propensity * g)``; shares are further
    scaled by ``0.5 + virality``. Skipped outcomes never engage.
    """
    if outcome.skipped:
        return (), None
    g = engagement_gain(match, outcome.completion_rate)
    chosen = []
    comment = None
    draws = (
        ("like", propensities.get("like", 0.0) * g),
        ("share", propensities.get("share", 0.0) * g * (0.5 + virality)),
        ("comment", propensities.get("comment", 0.0) * g),
    )
    for kind, p in draws:
        if rng.random() < min(1.0, p):
            chosen.append(kind)
    if "comment" in chosen:
        comment = comment_source(rng) if comment_source is not None else rng.choice(COMMENT_BANK)
    if monetization and rng.random() < min(1.0, propensities.get("gift", 0.0) * g):
        chosen.append("gift")
    return tuple(chosen), comment


def simulate_encounter(
    user,
    session,
    content,
    params: BehaviorParams,
    rng: RngStream,
    pref=None,
    monetization: bool = True,
    commerce: bool = False,
    already_following: bool = False,
    creator_retention: float = 0.0,
    comment_source: Callable[[RngStream], str] | None = None,
) -> EncounterOutcome:
    """Run one impression through the four stages; no input is mutated."""
    eps = rng.gauss(params.epsilon_loc, params.epsilon_scale)
    p_skip = skip_probability(content.hook_strength, user.attention_span, eps, params)
    if rng.random() < p_skip:
        watch = min(rng.uniform(params.skip_watch_low, params.hook_window), content.duration)
        return EncounterOutcome(
            hooked=False,
            skipped=True,
            watch_time=watch,
            completion_rate=min(1.0, watch / content.duration),
            extras={"p_skip": p_skip},
        )
    match = interest_match(pref, content, params) if pref is not None else 0.0
    watch, completion = sample_watch(content.duration, match, params, rng, content.quality_score)
    props = dict(user.engagement_propensities)
    cta = getattr(content, "cta", None)
    if cta == "join_live":
        props["gift"] = props.get("gift", 0.0) * params.cta_multiplier
    elif cta == "comment":
        props["comment"] = props.get("comment", 0.0) * params.cta_multiplier
    elif cta == "share":
        props["share"] = props.get("share", 0.0) * params.cta_multiplier
    prelim = EncounterOutcome(True, False, watch, completion)
    engagements, comment = sample_engagements(prelim, props, match, rng, content.virality, monetization, comment_source)
    gift_amount = 0.0
    if "gift" in engagements:
        gift_amount = rng.weighted_choice(params.gift_menu, params.gift_menu_weights)
    g = engagement_gain(match, completion)
    follow = False
    if not already_following and user.agent_id != content.creator_id:
        p_follow = props.get("follow", 0.0) * g * (1.0 + min(1.0, creator_retention))
        if cta == "follow":
            p_follow *= params.cta_multiplier
        follow = rng.random() < min(1.0, p_follow)
    price = 0.0
    if commerce:
        p_buy = params.purchase_conversion * g * (params.cta_multiplier if cta == "purchase" else 1.0)
        if rng.random() < min(1.0, p_buy):
            price = rng.choice(params.price_menu)
    return EncounterOutcome(
        hooked=True,
        skipped=False,
        watch_time=watch,
        completion_rate=completion,
        engagements=engagements,
        comment_text=comment,
        gift_amount=gift_amount,
        follow=follow,
        purchase_price=price,
        extras={"p_skip": p_skip, "match": match},
    )


def outcome_consistent(outcome: EncounterOutcome, duration: float, tol: float = 1e-9) -> bool:
    if not 0.0 <= outcome.completion_rate <= 1.0:
        return False
    if outcome.skipped and (outcome.engagements or outcome.watch_time >= 3.0):
        return False
    return abs(min(outcome.watch_time / duration, 1.0) - outcome.completion_rate) <= tol


def batch_outcomes(outcomes: Sequence[tuple[int, int, EncounterOutcome]]) -> list[tuple[int, int, EncounterOutcome]]:
    """Order encounter results by (user_id, content_id) for publishing."""
    return sorted(outcomes, key=lambda t: (t[0], t[1]))
