"""Graph primitives over citation snapshots.

All functions are pure with respect to the (immutable) snapshot; sampling
determinism comes only from explicit seed arguments.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass

import numpy as np

from .corpus import GraphSnapshot


def _require_node(g: GraphSnapshot, v: str) -> None:
    if not g.has_node(v):
        raise KeyError(f"unknown node {v!r}")


def neighbors(g: GraphSnapshot, v: str, direction: str = "undirected") -> list[str]:
    """Deduplicated, ascending-id neighbor list in the requested direction."""
    _require_node(g, v)
    if direction == "out":
        return list(g.out_neighbors(v))
    if direction == "in":
        return list(g.in_neighbors(v))
    if direction == "undirected":
        return list(g.und_neighbors(v))
    raise ValueError(f"direction must be out|in|undirected, got {direction!r}")


def node_rng(seed: int, v: str) -> np.random.Generator:
    """Generator whose stream depends on both the seed and the node id."""
    digest = hashlib.sha256(f"{seed}:{v}".encode()).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest[:8], "big")))


def sample_neighbors(g: GraphSnapshot, v: str, s: int, seed: int) -> list[str]:
    """Uniform sample without replacement of at most ``s`` undirected neighbors."""
    if s < 1:
        raise ValueError("sample size must be >= 1")
    _require_node(g, v)
    nbrs = g.und_neighbors(v)
    if len(nbrs) <= s:
        return list(nbrs)
    rng = node_rng(seed, v)
    idx = rng.choice(len(nbrs), size=s, replace=False)
    return [nbrs[i] for i in sorted(idx)]


@dataclass(frozen=True)
class NeighborPartition:
    """A node's undirected neighbors grouped into disjoint components."""

    center: str
    components: tuple[tuple[str, ...], ...]

    def member_union(self) -> set[str]:
        return {m for comp in self.components for m in comp}


def components_of(members: list[str], adjacency) -> list[list[str]]:
    """Connected components of the subgraph induced on ``members``.

    ``adjacency(u)`` must return an iterable of u's undirected neighbors in
    the host graph. Output components are sorted internally and ordered by
    smallest member.
    """
    member_set = set(members)
    unvisited = set(members)
    comps: list[list[str]] = []
    for start in sorted(members):
        if start not in unvisited:
            continue
        comp = []
        queue = deque([start])
        unvisited.discard(start)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in adjacency(u):
                if w in member_set and w in unvisited:
                    unvisited.discard(w)
                    queue.append(w)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: c[0])
    return comps


def neighborhood_components(g: GraphSnapshot, v: str) -> NeighborPartition:
    """Partition N(v) into connected components of its induced subgraph.

    The center is removed before computing components, so two neighbors end
    up together only if a path between them avoids v entirely (within N(v)).
    """
    _require_node(g, v)
    members = [u for u in g.und_neighbors(v)]
    comps = components_of(members, g.und_neighbors)
    return NeighborPartition(v, tuple(tuple(c) for c in comps))


UNREACHABLE = None


def shortest_path_length(g: GraphSnapshot, u: str, v: str) -> int | None:
    """Breadth-first hop count on the undirected view; None when disconnected."""
    _require_node(g, u)
    _require_node(g, v)
    if u == v:
        return 0
    dist = {u: 0}
    queue = deque([u])
    while queue:
        cur = queue.popleft()
        d = dist[cur] + 1
        for w in g.und_neighbors(cur):
            if w in dist:
                continue
            if w == v:
                return d
            dist[w] = d
            queue.append(w)
    return UNREACHABLE


def bfs_distances(g: GraphSnapshot, source: str,
                  targets: set[str] | None = None) -> dict[str, int]:
    """Hop distances from ``source`` to every reachable node (or until all
    ``targets`` are found). Used for batch hop-distance metrics."""
    _require_node(g, source)
    remaining = set(targets) if targets is not None else None
    dist = {source: 0}
    if remaining is not None:
        remaining.discard(source)
        if not remaining:
            return dist
    queue = deque([source])
    while queue:
        cur = queue.popleft()
        d = dist[cur] + 1
        for w in g.und_neighbors(cur):
            if w in dist:
                continue
            dist[w] = d
            queue.append(w)
            if remaining is not None:
                remaining.discard(w)
                if not remaining:
                    return dist
    return dist
