"""Live-tier clients: a scripted fixture fake and a minimal HTTP client."""

from __future__ import annotations

import json
import os
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Protocol, Sequence

from svtwin.content.archetypes import TOPIC_TAGS, archetype_tag, resolve_archetype
from svtwin.content.model import canonical_tag
from svtwin.core.rng import RngStream, stable_hash64
from svtwin.decisions.tasks import DecisionRequest, Task
from svtwin.users.personas import TRAIT_LEXICON

ENDPOINT_ENV = "SVTWIN_LLM_ENDPOINT"
API_KEY_ENV = "SVTWIN_LLM_API_KEY"


class LiveClient(Protocol):
    def complete(self, batch: Sequence[tuple[DecisionRequest, str]]) -> list[str | None]:
        """Return one raw text response (or ``None`` on failure) per request, in order."""


_FIXTURE_COMMENTS = (
    "ok this is actually genius",
    "saving this for later",
    "the ending got me",
    "how is this not viral yet",
    "came back to watch again",
    "need the full tutorial",
)


def _scripted(request: DecisionRequest) -> dict[str, Any]:
    """Stand-in for a recorded model response: trend-aware and schema-shaped."""
    p = request.payload
    rng = RngStream(0, "fixture-" + request.task.value, (stable_hash64(json.dumps(p, sort_keys=True)) & 0x7FFFFFFF,))
    if request.task is Task.PERSONA:
        traits = rng.sample(sorted(TRAIT_LEXICON), 5)
        domain = resolve_archetype(p["domain"])
        return {
            "bio": f"{p['tier'].capitalize()} creator known for {domain.lower()} clips with a {traits[0]} streak.",
            "core_traits": traits,
            "viewing_preferences": f"mostly {domain.lower()}, plus whatever is trending",
            "creation_style": rng.choice(("tight edits", "long takes", "voiceover", "live reactions")),
        }
    if request.task is Task.CAPTION:
        arch = p["archetype"]
        tags = [archetype_tag(arch)] + [canonical_tag(t) for t in p["trend_context"][:3]]
        tags = list(dict.fromkeys(t for t in tags if t))[:5]
        return {"title": f"{arch.title()} moment you cannot skip", "description": "Watch till the end.", "hashtags": tags}
    if request.task is Task.COMMENT:
        return {"text": rng.choice(_FIXTURE_COMMENTS)}
    if request.task is Task.CAMPAIGN:
        category = resolve_archetype(p["domain"])
        base = archetype_tag(category)
        ride = [canonical_tag(t) for t in p["trending"][:1] if canonical_tag(t)]
        entries = []
        ctas = ("follow", "comment", "purchase" if p["commerce"] else "join_live")
        for day in range(3):
            tags = list(dict.fromkeys([base] + ride + [TOPIC_TAGS[category][(day + 1) % 4]]))
            entries.append(
                {
                    "day_offset": day,
                    "category": category,
                    "theme": f"{category.lower()} x {ride[0] if ride else 'evergreen'} day {day + 1}",
                    "hashtags": tags,
                    "short_caption": f"My take on #{ride[0]}" if ride else "Something new today",
                    "live_slot": "19:00" if day >= 1 else None,
                    "cta": ctas[day],
                }
            )
        return {"entries": entries}
    if request.task is Task.TREND_PREDICTION:
        out = []
        for key, counts in sorted(p["series"].items()):
            c = [float(x) for x in counts]
            if len(c) >= 2 and c[-1] > c[-2] > 0:
                growth = c[-1] / c[-2]
                out.append({"hashtag": canonical_tag(key), "confidence": min(1.0, (growth - 1.0)), "rationale": "growing"})
        return {"forecasts": out}
    return {"action": p["options"][0]}


class FixtureClient:
    """Recorded-response fake.

    ``responses`` maps a task name to a raw response string, a list of raw
    strings consumed in order, or a callable on the request. Tasks without a
    fixture get a scripted, trend-aware response. ``calls`` counts requests.
    """

    def __init__(self, responses: Mapping[str, Any] | None = None) -> None:
        self.responses = {Task(k): (list(v) if isinstance(v, (list, tuple)) else v) for k, v in (responses or {}).items()}
        self.calls = 0
        self.batches: list[int] = []

    def _one(self, request: DecisionRequest) -> str | None:
        fixture = self.responses.get(request.task)
        if fixture is None:
            return json.dumps(_scripted(request))
        if callable(fixture):
            return fixture(request)
        if isinstance(fixture, list):
            return fixture.pop(0) if fixture else None
        return fixture

    def complete(self, batch: Sequence[tuple[DecisionRequest, str]]) -> list[str | None]:
        self.calls += len(batch)
        self.batches.append(len(batch))
        return [self._one(req) for req, _ in batch]


@dataclass
class HttpClient:
    """Chat-completions style client; one retry on failure, ``None`` when both attempts fail."""

    endpoint: str
    api_key: str = ""
    timeout: float = 30.0
    opener: Callable[..., Any] = urllib.request.urlopen

    @classmethod
    def from_env(cls, endpoint: str = "", timeout: float = 30.0) -> "HttpClient":
        return cls(os.environ.get(ENDPOINT_ENV, endpoint), os.environ.get(API_KEY_ENV, ""), timeout)

    def _post(self, request: DecisionRequest, prompt: str) -> str | None:
        body = json.dumps(
            {
                "model": request.model_id,
                "temperature": request.temperature,
                "messages": [{"role": "user", "content": prompt}],
                "response_format": {"type": "json_object"},
            }
        ).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        for _ in range(2):
            try:
                req = urllib.request.Request(self.endpoint, data=body, headers=headers, method="POST")
                with self.opener(req, timeout=self.timeout) as resp:
                    doc = json.loads(resp.read().decode("utf-8"))
                return doc["choices"][0]["message"]["content"]
            except (urllib.error.URLError, OSError, ValueError, KeyError, IndexError, TypeError):
                continue
        return None

    def complete(self, batch: Sequence[tuple[DecisionRequest, str]]) -> list[str | None]:
        return [self._post(req, prompt) for req, prompt in batch]
