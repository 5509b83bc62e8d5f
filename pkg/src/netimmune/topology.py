"""Router backbone, endpoint attachment and static shortest-path routing."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from netimmune.model import NodeKind


class TopologyError(ValueError):
    pass


@dataclass
class Topology:
    kinds: list
    edges: list  # sorted (u, v) pairs with u < v
    neighbors: list
    next_hop: np.ndarray  # next_hop[src, dst]; -1 where unreachable
    dist: np.ndarray
    contacts: list  # endpoint peer lists for securityware spreading

    @property
    def size(self) -> int:
        return len(self.kinds)

    def ids(self, kind: NodeKind) -> list:
        return [i for i, k in enumerate(self.kinds) if k is kind]

    @property
    def routers(self):
        return self.ids(NodeKind.ROUTER)

    @property
    def endpoints(self):
        return self.ids(NodeKind.ENDPOINT)

    def dump(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.edges)


def build_topology(config, rng) -> Topology:
    """Random connected backbone plus attached endpoints and lymph services.

    Node ids: routers first, then endpoints, then lymph services.  Endpoints
    and lymph services attach to ``world.attachment`` distinct routers each.
    """
    w = config.world
    n_r, n_e, n_l = w.routers, w.endpoints, w.lymph_nodes
    if n_r < 1 and (n_e or n_l):
        raise TopologyError("cannot attach endpoints without at least one router")
    kinds = [NodeKind.ROUTER] * n_r + [NodeKind.ENDPOINT] * n_e + [NodeKind.LYMPH] * n_l
    edges = set()

    order = list(range(n_r))
    rng.shuffle(order)
    for i in range(1, n_r):
        u, v = order[i], order[rng.randrange(i)]
        edges.add((min(u, v), max(u, v)))
    max_edges = n_r * (n_r - 1) // 2
    extra = min(w.extra_edges, max_edges - len(edges))
    while extra > 0:
        u, v = rng.randrange(n_r), rng.randrange(n_r)
        if u != v and (min(u, v), max(u, v)) not in edges:
            edges.add((min(u, v), max(u, v)))
            extra -= 1

    degree = min(w.attachment, n_r) if n_r else 0
    for node in range(n_r, n_r + n_e + n_l):
        for router in rng.sample(range(n_r), degree):
            edges.add((router, node))

    contacts = _contact_graph(list(range(n_r, n_r + n_e)), w.contacts, rng)
    return _finish(kinds, sorted(edges), contacts)


def _contact_graph(endpoints, extra, rng):
    """Ring over a random endpoint order plus ``extra`` random peers each."""
    peers = {e: set() for e in endpoints}
    if len(endpoints) >= 2:
        ring = endpoints[:]
        rng.shuffle(ring)
        for a, b in zip(ring, ring[1:] + ring[:1]):
            if a != b:
                peers[a].add(b)
                peers[b].add(a)
        for e in endpoints:
            for _ in range(extra):
                f = endpoints[rng.randrange(len(endpoints))]
                if f != e:
                    peers[e].add(f)
                    peers[f].add(e)
    return {e: sorted(p) for e, p in peers.items()}


def from_edges(kinds, edges, contacts=None) -> Topology:
    """Topology over explicit edges; used for hand-built test graphs."""
    norm = sorted({(min(u, v), max(u, v)) for u, v in edges})
    return _finish(list(kinds), norm, contacts or {})


def _finish(kinds, edges, contacts):
    n = len(kinds)
    neighbors = [[] for _ in range(n)]
    for u, v in edges:
        neighbors[u].append(v)
        neighbors[v].append(u)
    for nb in neighbors:
        nb.sort()
    dist = _distances(kinds, neighbors)
    next_hop = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        next_hop[src, src] = src
        for dst in range(n):
            d = dist[src, dst]
            if dst == src or d < 0:
                continue
            for u in neighbors[src]:
                if dist[u, dst] == d - 1 and (u == dst or kinds[u] is NodeKind.ROUTER):
                    next_hop[src, dst] = u
                    break
    topo = Topology(kinds, edges, neighbors, next_hop, dist, contacts)
    _check_connected(topo)
    return topo


def _distances(kinds, neighbors):
    """Hop distances where only routers may carry transit traffic."""
    n = len(kinds)
    dist = np.full((n, n), -1, dtype=np.int64)
    for dst in range(n):
        dist[dst, dst] = 0
        queue = deque([dst])
        while queue:
            v = queue.popleft()
            if v != dst and kinds[v] is not NodeKind.ROUTER:
                continue
            for u in neighbors[v]:
                if dist[u, dst] < 0:
                    dist[u, dst] = dist[v, dst] + 1
                    queue.append(u)
    return dist


def _check_connected(topo):
    if topo.size and (topo.dist < 0).any():
        raise TopologyError("topology is not connected")


def route_next_hop(topology: Topology, current: int, dst: int) -> int:
    n = topology.size
    if not (0 <= current < n and 0 <= dst < n):
        raise KeyError(f"unknown host id in ({current}, {dst})")
    return int(topology.next_hop[current, dst])


def nearest(topology: Topology, kind: NodeKind) -> list:
    """For every node, the closest node of ``kind`` (lowest id on ties), or -1."""
    targets = topology.ids(kind)
    out = []
    for v in range(topology.size):
        best = -1
        for t in targets:
            if best < 0 or topology.dist[v, t] < topology.dist[v, best]:
                best = t
        out.append(best)
    return out
