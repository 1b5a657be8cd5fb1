"""Alternating state/action search-tree nodes with visit-count metadata."""

from __future__ import annotations

from collections.abc import Hashable
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

from ..language.program import Program
from ..language.terms import ActionTerm


@dataclass
class Metadata:
    """Visit count and value estimate of a node; fresh nodes start at (0, 0.0)."""

    count: int = 0
    value: float = 0.0


@dataclass(eq=False)
class ActionNode:
    """
    An action choice below a state node.

    Holds the ground action, the program remaining after it (the tail) and the
    distinct successor states observed so far. Successors are indexed by the
    domain's state digest. ``backed_up_at`` is the visit count at the last
    value backup (0 if q was never backed up).
    """

    action: ActionTerm
    tail: Program
    meta: Metadata = field(default_factory=Metadata)
    backed_up_at: int = 0
    children: list[StateNode] = field(default_factory=list)
    _index: dict[Hashable, StateNode] = field(default_factory=dict, repr=False)

    def find_child(self, digest: Hashable) -> Optional[StateNode]:
        return self._index.get(digest)

    def add_child(self, digest: Hashable, node: StateNode) -> StateNode:
        if digest in self._index:
            raise ValueError(f"successor already present under {self.action}")
        self._index[digest] = node
        self.children.append(node)
        return node

    def child_count_sum(self) -> int:
        return sum(child.meta.count for child in self.children)

    def sort_key(self) -> tuple[object, object]:
        return (self.action.sort_key(), self.tail.sort_key())


@dataclass(eq=False)
class StateNode:
    """A sampled state, its metadata and one action node per potential entry."""

    state: Any
    meta: Metadata = field(default_factory=Metadata)
    children: list[ActionNode] = field(default_factory=list)

    @property
    def is_terminal(self) -> bool:
        """No action is available: the program has finished or is blocked here."""
        return not self.children

    def iter_nodes(self) -> Iterator[StateNode | ActionNode]:
        """Depth-first walk over this subtree, self first."""
        stack: list[StateNode | ActionNode] = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def size(self) -> int:
        return sum(1 for _ in self.iter_nodes())

    def depth(self) -> int:
        """Number of state levels below this node (0 for a leaf)."""
        deepest = 0
        for action_node in self.children:
            for child in action_node.children:
                deepest = max(deepest, 1 + child.depth())
        return deepest
