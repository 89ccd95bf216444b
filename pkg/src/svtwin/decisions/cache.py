"""Disk-backed, content-addressed response cache (one JSON record per line)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from svtwin.decisions.schemas import output_errors
from svtwin.decisions.tasks import Task


@dataclass(frozen=True)
class CacheEntry:
    key: str
    task: Task
    output: Any
    cost: float
    created_at: int


class ResponseCache:
    """Keyed records; on load, entries failing their output schema are skipped."""

    def __init__(self, path: str | Path | None = None) -> None:
        self.path = Path(path) if path is not None else None
        self.entries: dict[str, CacheEntry] = {}
        self.rejected = 0
        if self.path is not None and self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._load(line)

    def _load(self, line: str) -> None:
        try:
            rec = json.loads(line)
            entry = CacheEntry(rec["key"], Task(rec["task"]), rec["output"], float(rec["cost"]), int(rec["created_at"]))
        except (ValueError, KeyError, TypeError):
            self.rejected += 1
            return
        if output_errors(entry.task, entry.output):
            self.rejected += 1
            return
        self.entries[entry.key] = entry

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, key: str) -> CacheEntry | None:
        return self.entries.get(key)

    def put(self, key: str, task: Task, output: Any, cost: float) -> CacheEntry:
        entry = CacheEntry(key, Task(task), output, cost, len(self.entries))
        self.entries[key] = entry
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                rec = {"key": key, "task": entry.task.value, "output": output, "cost": cost, "created_at": entry.created_at}
                fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")
        return entry
