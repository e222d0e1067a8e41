"""Maximum-cardinality matching in general graphs (Edmonds' blossom method).

Augmenting paths are grown by breadth-first search from each exposed
vertex; odd cycles are contracted on the fly by relabelling their vertices
with a common base.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable


@dataclass(frozen=True)
class MatchGraph:
    vertices: tuple
    edges: tuple  # pairs (u, v) with u != v

    def __post_init__(self):
        vs = tuple(self.vertices)
        known = set(vs)
        if len(known) != len(vs):
            raise ValueError("duplicate vertex")
        seen = set()
        es = []
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u!r}")
            if u not in known or v not in known:
                raise ValueError(f"edge ({u!r}, {v!r}) uses an unknown vertex")
            key = frozenset((u, v))
            if key in seen:
                raise ValueError(f"parallel edge ({u!r}, {v!r})")
            seen.add(key)
            es.append((u, v))
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", tuple(es))


def max_matching(g: MatchGraph) -> set[frozenset]:
    """Return a maximum matching as a set of 2-element frozensets."""
    verts = sorted(g.vertices, key=_sort_key)
    index = {v: k for k, v in enumerate(verts)}
    n = len(verts)
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in g.edges:
        a, b = index[u], index[v]
        adj[a].append(b)
        adj[b].append(a)
    for row in adj:
        row.sort()
    match = [-1] * n

    # cheap greedy start; the blossom search fixes whatever it misses
    for a in range(n):
        if match[a] == -1:
            for b in adj[a]:
                if match[b] == -1:
                    match[a], match[b] = b, a
                    break

    for root in range(n):
        if match[root] == -1:
            end, parent = _find_path(root, adj, match)
            while end != -1:
                pv = parent[end]
                nxt = match[pv]
                match[end], match[pv] = pv, end
                end = nxt
    out = set()
    for a in range(n):
        if match[a] > a:
            out.add(frozenset((verts[a], verts[match[a]])))
    return out


def _sort_key(v: Hashable):
    return (type(v).__name__, v)


def _find_path(root: int, adj, match):
    n = len(adj)
    parent = [-1] * n
    base = list(range(n))
    used = [False] * n
    used[root] = True
    q = deque([root])

    def lca(a: int, b: int) -> int:
        seen = [False] * n
        while True:
            a = base[a]
            seen[a] = True
            if match[a] == -1:
                break
            a = parent[match[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = parent[match[b]]

    def mark(v: int, b: int, child: int, blossom):
        while base[v] != b:
            blossom[base[v]] = blossom[base[match[v]]] = True
            parent[v] = child
            child = match[v]
            v = parent[match[v]]

    while q:
        v = q.popleft()
        for to in adj[v]:
            if base[v] == base[to] or match[v] == to:
                continue
            if to == root or (match[to] != -1 and parent[match[to]] != -1):
                cur = lca(v, to)
                blossom = [False] * n
                mark(v, cur, to, blossom)
                mark(to, cur, v, blossom)
                for i in range(n):
                    if blossom[base[i]]:
                        base[i] = cur
                        if not used[i]:
                            used[i] = True
                            q.append(i)
            elif parent[to] == -1:
                parent[to] = v
                if match[to] == -1:
                    return to, parent
                used[match[to]] = True
                q.append(match[to])
    return -1, parent


def is_matching(edges: Iterable[frozenset]) -> bool:
    seen = set()
    for e in edges:
        if len(e) != 2 or seen & e:
            return False
        seen |= e
    return True
