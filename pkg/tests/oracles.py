"""Reference implementations used only by the tests.

None of these import the engine's matching, routing or epidemic code; they
are written from the definitions so that agreement means something.
"""
from __future__ import annotations

import random
from collections import deque

import numpy as np


# --- matching -----------------------------------------------------------------

def scan_affinity(a: str, b: str) -> int:
    """Longest run of agreeing positions, by enumerating every run start."""
    assert len(a) == len(b)
    best = 0
    for start in range(len(a)):
        length = 0
        while start + length < len(a) and a[start + length] == b[start + length]:
            length += 1
        best = max(best, length)
    return best


def bits(value: int, length: int) -> str:
    return format(value, f"0{length}b")


# --- routing ------------------------------------------------------------------

def bfs_next_hops(n, edges, transit):
    """next_hop[s][d] by breadth-first search from every destination.

    ``transit[v]`` says whether v may relay traffic.  Among a node's
    neighbours on a shortest path, the lowest id wins.
    """
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    table = [[-1] * n for _ in range(n)]
    for d in range(n):
        dist = [-1] * n
        dist[d] = 0
        q = deque([d])
        while q:
            u = q.popleft()
            if u != d and not transit[u]:
                continue  # reached, but nobody routes through it
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    q.append(v)
        for s in range(n):
            if s == d:
                table[s][d] = d
            elif dist[s] > 0:
                table[s][d] = min(v for v in adj[s] if dist[v] == dist[s] - 1 and (v == d or transit[v]))
    return table


# --- epidemics ------------------------------------------------------------------

def si_chain(n_hosts, beta, malware_fraction, p_infect, steps, rng: random.Random):
    """Discrete SI chain for a star network with one relay.

    Each infected host sends ``beta`` packets per step, each malware with
    probability ``malware_fraction``, to a uniform other host.  A packet sent
    in step t reaches its target in step t+1 and infects a clean target with
    probability ``p_infect``; a host infected in step t first sends in step
    t+1.  Host 0 is infected at step 0.  Returns the list of new-infection
    counts for steps 1..steps.
    """
    infected = {0}
    in_flight = []
    counts = []
    for _ in range(steps):
        arriving, in_flight = in_flight, []
        new = set()
        for target in arriving:
            if target not in infected and target not in new and rng.random() < p_infect:
                new.add(target)
        for h in sorted(infected):
            for _ in range(beta):
                if rng.random() < malware_fraction:
                    t = rng.randrange(n_hosts - 1)
                    in_flight.append(t if t < h else t + 1)
        infected |= new
        counts.append(len(new))
    return counts


def si_spread_times(adj, sources, p, rng: random.Random, accept=1.0, delay=None, max_steps=10_000):
    """Step at which each node becomes informed in a synchronous SI process.

    Every step, each node informed in an earlier step contacts each of its
    neighbours independently with probability ``p``.  A contact sent in step
    s lands in step ``s + delay(u, v)`` (default 0: same step) and converts
    an uninformed node with probability ``accept``.  Sources start informed
    at step 0.
    """
    n = len(adj)
    when = [None] * n
    for s0 in sources:
        when[s0] = 0
    arrivals = {}
    for step in range(1, max_steps + 1):
        senders = [u for u in range(n) if when[u] is not None and when[u] < step]
        for u in senders:
            for v in adj[u]:
                if rng.random() < p:
                    lag = 0 if delay is None else delay(u, v)
                    arrivals.setdefault(step + lag, []).append(v)
        for v in arrivals.pop(step, []):
            if when[v] is None and rng.random() < accept:
                when[v] = step
        if all(t is not None for t in when):
            break
    return when


def coverage_time(when, fraction):
    times = sorted(t for t in when if t is not None)
    need = int(np.ceil(fraction * len(when)))
    return times[need - 1] if len(times) >= need else None


def has_run_by_shifts(x: int, r: int) -> bool:
    """Whether integer ``x`` holds ``r`` consecutive set bits: AND-ing ``x``
    with itself shifted by 1..r-1 leaves a bit set exactly at run starts."""
    y = x
    for k in range(1, r):
        y &= x >> k
    return y != 0
