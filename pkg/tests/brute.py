"""Exhaustive reference solver built only on the engine's rule functions."""
from __future__ import annotations

import itertools
from fractions import Fraction

from rbpebble.engine import Variant, apply_move, initial_state, is_goal, legal_moves


def _key(state, model):
    # only ONESHOT's rules read the computed set
    if model.variant is Variant.ONESHOT:
        return state.key()
    return tuple(sorted(state.status.items()))


def brute_force_opt(dag, model, R) -> Fraction | None:
    """Minimum pebbling cost by Bellman-Ford over every reachable state."""
    start = initial_state(dag, model)
    states = {_key(start, model): start}
    edges = []
    frontier = [start]
    while frontier:
        nxt = []
        for s in frontier:
            for m in legal_moves(dag, model, R, s):
                child, cost = apply_move(dag, model, R, s, m)
                k = _key(child, model)
                edges.append((_key(s, model), k, cost))
                if k not in states:
                    states[k] = child
                    nxt.append(child)
        frontier = nxt
    dist = {_key(start, model): Fraction(0)}
    changed = True
    while changed:
        changed = False
        for a, b, c in edges:
            if a in dist and (b not in dist or dist[a] + c < dist[b]):
                dist[b] = dist[a] + c
                changed = True
    goals = [dist[k] for k, s in states.items() if k in dist and is_goal(dag, model, s)]
    return min(goals) if goals else None


def small_dags(max_nodes: int):
    """One representative per isomorphism class of DAGs on up to ``max_nodes`` nodes."""
    from rbpebble.dag import Dag

    for n in range(1, max_nodes + 1):
        nodes = [f"v{i}" for i in range(n)]
        pairs = list(itertools.combinations(range(n), 2))
        perms = list(itertools.permutations(range(n)))
        seen = set()
        for mask in range(1 << len(pairs)):
            edges = [p for b, p in enumerate(pairs) if mask >> b & 1]
            canon = min(tuple(sorted((q[i], q[j]) for i, j in edges)) for q in perms)
            if canon in seen:
                continue
            seen.add(canon)
            yield Dag(tuple(nodes), tuple((nodes[i], nodes[j]) for i, j in edges))
