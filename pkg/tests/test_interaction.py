from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from svtwin.content.model import create_content, materialize
from svtwin.core.rng import derive_stream
from svtwin.interaction.engine import (
    COMMENT_BANK,
    BehaviorParams,
    batch_outcomes,
    interest_match,
    outcome_consistent,
    sample_engagements,
    sample_watch,
    simulate_encounter,
    skip_probability,
)
from svtwin.interaction.outcome import EncounterOutcome
from svtwin.users.learning import PreferenceState
from svtwin.users.population import init_population
from svtwin.users.session import SessionState

AGENTS = init_population(300, seed=11)
UNIT = BehaviorParams(alpha=1.0, beta=1.0)


def logistic(x):
    return 1.0 / (1.0 + math.exp(-x))


def content(cid=0, **changes):
    author = next(a for a in AGENTS if a.creator_tier == "elite")
    c = materialize(create_content(author, 0, [], "template", derive_stream(0, "c", (cid,)), cid), 0)
    return dataclasses.replace(c, **changes) if changes else c


def test_skip_probability_examples():
    assert skip_probability(1e15, 1e15, 0.0, UNIT) == pytest.approx(0.5, abs=1e-12)
    assert skip_probability(0.5, 10.0, 0.0, UNIT) == pytest.approx(logistic(2.1), abs=1e-12)
    assert skip_probability(0.5, 10.0, 0.0, UNIT) == pytest.approx(0.890903, abs=1e-6)
    assert skip_probability(0.9, 10, 0.0, UNIT) < skip_probability(0.3, 10, 0.0, UNIT)


def test_skip_probability_matches_logistic_on_random_draws():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        a, b = rng.uniform(0.05, 3, 2)
        hook, attention, eps = rng.uniform(0.01, 1), rng.uniform(0.1, 120), rng.normal(0, 1)
        params = BehaviorParams(alpha=a, beta=b)
        assert abs(skip_probability(hook, attention, eps, params) - logistic(a / hook + b / attention + eps)) <= 1e-12


def test_interest_match_modes():
    c = content()
    pref = PreferenceState(c.compact_vector.copy())
    assert interest_match(pref, c, BehaviorParams(match_mode="compact")) == pytest.approx(1.0)
    slice_pref = PreferenceState(c.visual_embedding[:50].copy())
    assert interest_match(slice_pref, c, BehaviorParams()) == pytest.approx(1.0)
    # Visual-only fusion: a slot whose cosine with the visual embedding is 0.4.
    v = c.visual_embedding / np.linalg.norm(c.visual_embedding)
    ortho = np.random.default_rng(1).normal(size=512)
    ortho -= (ortho @ v) * v
    ortho /= np.linalg.norm(ortho)
    slot = 0.4 * v + math.sqrt(1 - 0.16) * ortho
    pref = PreferenceState(np.full(50, 0.1), {"visual": slot})
    assert interest_match(pref, c, BehaviorParams(fusion_weights=(1.0, 0.0, 0.0))) == pytest.approx(0.4, abs=1e-9)


def test_completion_prior_without_uplift():
    params = BehaviorParams(match_uplift=0.0)
    rng = derive_stream(3, "mc")
    comps = [sample_watch(30.0, 0.7, params, rng)[1] for _ in range(10_000)]
    assert abs(np.mean(comps) - params.base_completion) < 0.02


def test_watch_time_grows_with_match_and_is_capped():
    params = BehaviorParams()
    lo = np.mean([sample_watch(30.0, 0.1, params, derive_stream(1, "w", (i,)))[0] for i in range(10_000)])
    hi = np.mean([sample_watch(30.0, 0.9, params, derive_stream(1, "w", (i,)))[0] for i in range(10_000)])
    assert hi > lo
    for i in range(2000):
        watch, completion = sample_watch(12.0, 1.0, params, derive_stream(2, "w", (i,)))
        assert watch <= 12.0 and 0.0 <= completion <= 1.0


def test_skip_outcomes_are_short_and_unengaged():
    user = next(a for a in AGENTS if a.creator_tier == "consumer")
    c = content(hook_strength=0.01)
    skips = 0
    for i in range(500):
        out = simulate_encounter(user, SessionState(), c, BehaviorParams(), derive_stream(4, "e", (i,)), PreferenceState())
        assert outcome_consistent(out, c.duration)
        if out.skipped:
            skips += 1
            assert out.watch_time < 3.0 and out.engagements == ()
    assert skips > 400


def test_forced_like_and_empty_propensities():
    out = EncounterOutcome(True, False, 19.0, 0.95)
    likes, _ = sample_engagements(out, {"like": 1.0}, 0.5, derive_stream(0, "g"))
    assert "like" in likes
    none, text = sample_engagements(out, {}, 0.5, derive_stream(0, "g"))
    assert none == () and text is None
    kinds, text = sample_engagements(out, {"comment": 1.0}, 0.5, derive_stream(0, "g"))
    assert "comment" in kinds and text in COMMENT_BANK


def test_like_frequency_increases_with_completion():
    def rate(completion):
        out = EncounterOutcome(True, False, 10 * completion, completion)
        hits = sum("like" in sample_engagements(out, {"like": 0.3}, 0.2, derive_stream(5, "l", (i,)))[0] for i in range(10_000))
        return hits / 10_000

    assert rate(0.9) > rate(0.2)


def test_encounter_is_deterministic_and_pure():
    user = next(a for a in AGENTS if a.creator_tier == "consumer")
    c = content()
    pref = PreferenceState()
    before = (c.views, pref.content_interests.tobytes())
    a = simulate_encounter(user, SessionState(), c, BehaviorParams(), derive_stream(9, "e"), pref, commerce=True)
    b = simulate_encounter(user, SessionState(), c, BehaviorParams(), derive_stream(9, "e"), pref, commerce=True)
    assert a == b
    assert (c.views, pref.content_interests.tobytes()) == before


def test_skip_rate_falls_with_hook_strength():
    user = next(a for a in AGENTS if a.creator_tier == "consumer")

    def skip_rate(hook):
        c = content(hook_strength=hook)
        return np.mean([simulate_encounter(user, None, c, BehaviorParams(), derive_stream(6, "h", (i,))).skipped for i in range(3000)])

    assert skip_rate(0.9) <= skip_rate(0.3)


def test_batch_order():
    o = EncounterOutcome(True, False, 1.0, 0.1)
    assert [(u, c) for u, c, _ in batch_outcomes([(2, 1, o), (1, 5, o), (1, 2, o)])] == [(1, 2), (1, 5), (2, 1)]
