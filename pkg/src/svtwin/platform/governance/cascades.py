"""Share cascades: one tree per root content item."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

ROOT = -1  # node id of the root content item itself


@dataclass
class CascadeTree:
    root_content_id: int
    nodes: list[tuple[int, int, int]] = field(default_factory=list)  # (sharer, parent_sharer, step)
    depth_of: dict[int, int] = field(default_factory=lambda: {ROOT: 0})
    child_count: dict[int, int] = field(default_factory=dict)
    depth: int = 0
    flagged: int = 0

    def add_share(self, sharer: int, parent_sharer: int | None, step: int) -> bool:
        """Attach ``sharer``; returns False when the share is a repeat and ignored.

        A parent that is not already in the tree is replaced by the root and
        counted in ``flagged``.
        """
        if sharer in self.depth_of:
            return False
        parent = ROOT if parent_sharer is None else parent_sharer
        if parent not in self.depth_of:
            parent = ROOT
            self.flagged += 1
        d = self.depth_of[parent] + 1
        self.depth_of[sharer] = d
        self.child_count[parent] = self.child_count.get(parent, 0) + 1
        self.nodes.append((sharer, parent, step))
        if d > self.depth:
            self.depth = d
        return True

    @property
    def branching_factor(self) -> float:
        """Mean children per internal node (nodes with at least one child)."""
        if not self.child_count:
            return 0.0
        return len(self.nodes) / len(self.child_count)

    @property
    def size(self) -> int:
        return len(self.nodes)


def recompute_metrics(nodes: list[tuple[int, int, int]]) -> tuple[int, float]:
    """From-scratch ``(depth, branching_factor)`` for a node list."""
    parent = {s: p for s, p, _ in nodes}
    children: dict[int, int] = {}
    for _, p, _ in nodes:
        children[p] = children.get(p, 0) + 1

    def depth(n: int) -> int:
        d = 0
        while n != ROOT:
            n = parent[n]
            d += 1
        return d

    max_depth = max((depth(s) for s, _, _ in nodes), default=0)
    bf = len(nodes) / len(children) if children else 0.0
    return max_depth, bf


class CascadeTracker:
    def __init__(self) -> None:
        self.trees: dict[int, CascadeTree] = {}

    def record_share(self, content_id: int, sharer: int, parent_sharer: int | None, step: int) -> bool:
        tree = self.trees.get(content_id)
        if tree is None:
            tree = self.trees[content_id] = CascadeTree(content_id)
        return tree.add_share(sharer, parent_sharer, step)

    def sharers(self, content_id: int) -> list[int]:
        tree = self.trees.get(content_id)
        return [] if tree is None else [s for s, _, _ in tree.nodes]

    def summary(self) -> dict[str, float]:
        if not self.trees:
            return {"cascades": 0, "max_depth": 0, "mean_depth": 0.0, "mean_branching": 0.0}
        depths = [t.depth for t in self.trees.values()]
        bfs = [t.branching_factor for t in self.trees.values()]
        return {
            "cascades": len(self.trees),
            "max_depth": max(depths),
            "mean_depth": sum(depths) / len(depths),
            "mean_branching": sum(bfs) / len(bfs),
        }

    def state_hash(self) -> str:
        h = hashlib.sha256()
        for cid in sorted(self.trees):
            h.update(f"{cid}|{self.trees[cid].nodes}|{self.trees[cid].flagged};".encode())
        return h.hexdigest()
