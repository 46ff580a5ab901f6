"""Exact search, greedy heuristics, the naive baseline and tradeoff curves."""
from __future__ import annotations

import csv
import enum
import heapq
import io
import itertools
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dag import Dag, feasibility_threshold
from .engine import (
    Finish, ModelSpec, Move, MoveKind, Start, Status, Trace, Variant, validate_trace,
)
from .schedule import FARTHEST_NEXT_USE, INF, LOWEST_ID, Executor, ScheduleError, computable

log = logging.getLogger(__name__)

DEFAULT_MAX_STATES = 5_000_000


class Infeasible(ValueError):
    """Fewer red pebbles than max indegree + 1: no pebbling exists."""


class TooManyGroups(ValueError):
    pass


def default_max_states() -> int:
    return int(os.environ.get("RBPEBBLE_MAX_STATES", DEFAULT_MAX_STATES))


@dataclass(frozen=True)
class SearchLimits:
    max_states: int = 0
    max_cost: Fraction | None = None

    def __post_init__(self):
        if self.max_states == 0:
            object.__setattr__(self, "max_states", default_max_states())
        if self.max_states < 1:
            raise ValueError("max_states must be >= 1")


@dataclass
class OptimalResult:
    cost: Fraction
    trace: Trace
    states_expanded: int
    exhausted: bool


def _require_feasible(dag: Dag, R: int) -> None:
    need = feasibility_threshold(dag)
    if R < need:
        raise Infeasible(f"R={R} < max indegree + 1 = {need}; no pebbling exists")


# -- exact search -------------------------------------------------------

_EMPTY, _RED, _BLUE, _DEAD = 0, 1, 2, 3


class _Space:
    """Compact state encoding: one byte per node.

    ONESHOT adds a DEAD code for computed nodes without a pebble; the other
    variants never consult the computed set, so it is dropped. Twin nodes
    (identical input and output sets) are interchangeable under a graph
    automorphism, so states are keyed with the codes of each twin class sorted.
    """

    def __init__(self, dag: Dag, model: ModelSpec, R: int):
        self.dag = dag
        self.model = model
        self.R = R
        self.names = dag.nodes
        idx = {v: i for i, v in enumerate(dag.nodes)}
        self.n = n = dag.n
        self.preds = [tuple(idx[u] for u in dag.preds[v]) for v in dag.nodes]
        self.succs = [tuple(idx[w] for w in dag.succs[v]) for v in dag.nodes]
        self.sinks = [i for i in range(n) if not self.succs[i]]
        self.is_sink = [not s for s in self.succs]
        self.oneshot = model.variant is Variant.ONESHOT
        self.nodel = model.variant is Variant.NODEL
        self.blue_sources = model.start is Start.BLUE_SOURCES
        self.blue_finish = model.finish is Finish.BLUE_ON_SINKS
        self.computable = [not (self.blue_sources and not self.preds[i]) for i in range(n)]
        self.src_fetchable = [self.computable[i] and not self.preds[i] for i in range(n)]
        # integer cost scale: transfers cost T, computes cost C
        eps = model.epsilon
        if model.variant is Variant.COMPCOST:
            self.T, self.C = eps.denominator, eps.numerator
        else:
            self.T, self.C = 1, 0
        groups: dict[tuple, list[int]] = {}
        for i, v in enumerate(dag.nodes):
            groups.setdefault((frozenset(dag.preds[v]), frozenset(dag.succs[v])), []).append(i)
        self.classes = [g for g in groups.values() if len(g) > 1]
        self.class_of = [-1] * n
        for ci, g in enumerate(self.classes):
            for i in g:
                self.class_of[i] = ci

    def initial(self) -> bytes:
        s = bytearray(self.n)
        if self.blue_sources:
            for i in range(self.n):
                if not self.preds[i]:
                    s[i] = _BLUE
        return bytes(s)

    def key(self, s: bytes) -> bytes:
        if not self.classes:
            return s
        b = bytearray(s)
        for g in self.classes:
            vals = sorted(b[i] for i in g)
            for i, x in zip(g, vals):
                b[i] = x
        return bytes(b)

    def is_goal(self, s: bytes) -> bool:
        if self.blue_finish:
            return all(s[i] == _BLUE for i in self.sinks)
        return all(s[i] in (_RED, _BLUE) for i in self.sinks)

    def needed(self, s, i) -> bool:
        """ONESHOT: node still has an uncomputed successor."""
        return any(s[w] == _EMPTY for w in self.succs[i])

    def heuristic(self, s: bytes) -> int:
        if self.oneshot:
            # each blue node with an uncomputed successor must be loaded again
            return self.T * sum(1 for i in range(self.n) if s[i] == _BLUE and self.needed(s, i))
        if self.nodel:
            # pebbles are never removed, so at most R nodes finish red
            blue = s.count(_BLUE)
            return self.T * max(0, self.n - self.R - blue)
        if self.C:
            return self.C * sum(1 for i in self.sinks if s[i] == _EMPTY)
        return 0

    def expand(self, s: bytes):
        """Yield (cost, moves, child) for every legal move, modulo twins."""
        n = self.n
        red = s.count(_RED)
        R = self.R
        T, C = self.T, self.C
        seen_class: set[tuple[int, int, str]] = set()
        for i in range(n):
            c = s[i]
            ci = self.class_of[i]
            if ci >= 0:
                tag = (ci, c)
                if tag in seen_class:
                    continue
                seen_class.add(tag)
            name = self.names[i]
            # ONESHOT: moving a pebble that nothing will read again is wasted
            # unless it sits on a sink
            idle = self.oneshot and not self.is_sink[i] and not self.needed(s, i)
            if c == _RED:
                if not idle:
                    b = bytearray(s)
                    b[i] = _BLUE
                    yield T, (Move(MoveKind.STORE, name),), bytes(b)
                if not self.nodel and self._may_delete(s, i):
                    b = bytearray(s)
                    b[i] = _DEAD if self.oneshot else _EMPTY
                    yield 0, (Move(MoveKind.DELETE, name),), bytes(b)
            elif c == _BLUE:
                if red < R and not idle:
                    b = bytearray(s)
                    b[i] = _RED
                    yield T, (Move(MoveKind.LOAD, name),), bytes(b)
                if not self.nodel and self._may_delete(s, i):
                    b = bytearray(s)
                    b[i] = _DEAD if self.oneshot else _EMPTY
                    yield 0, (Move(MoveKind.DELETE, name),), bytes(b)
            if not self.computable[i] or not (
                    c == _EMPTY or (c == _BLUE and not self.oneshot)):
                continue
            if not self.preds[i]:
                # sources are fetched together with their first reader; only a
                # source that is also a sink is ever worth computing on its own
                if self.is_sink[i] and red < R:
                    b = bytearray(s)
                    b[i] = _RED
                    yield C, (Move(MoveKind.COMPUTE, name),), bytes(b)
                continue
            fetch = []
            for u in self.preds[i]:
                su = s[u]
                if su == _RED:
                    continue
                if self.src_fetchable[u] and (su == _EMPTY or (su == _BLUE and not self.oneshot)):
                    fetch.append(u)
                else:
                    break
            else:
                if red + len(fetch) < R:
                    b = bytearray(s)
                    moves = []
                    for u in fetch:
                        b[u] = _RED
                        moves.append(Move(MoveKind.COMPUTE, self.names[u]))
                    b[i] = _RED
                    moves.append(Move(MoveKind.COMPUTE, name))
                    if self.oneshot:
                        self._drop_useless(b, i, moves)
                    yield C * len(moves_compute(moves)), tuple(moves), bytes(b)

    def _may_delete(self, s, i) -> bool:
        if not self.oneshot:
            return True
        # a pebble that is still needed, or sits on a sink, can never be
        # restored once deleted in ONESHOT
        return not self.is_sink[i] and not self.needed(s, i)

    def _drop_useless(self, b: bytearray, v: int, moves: list) -> None:
        # after computing v, inputs whose successors are all computed are dead
        # weight; deleting them is free and never hurts
        for u in self.preds[v]:
            if b[u] in (_RED, _BLUE) and not self.is_sink[u] and \
                    not any(b[w] == _EMPTY for w in self.succs[u]):
                b[u] = _DEAD
                moves.append(Move(MoveKind.DELETE, self.names[u]))


def moves_compute(moves) -> list[Move]:
    return [m for m in moves if m.kind is MoveKind.COMPUTE]


def _upper_bound(dag, model, R) -> tuple[Fraction, Trace]:
    best = None
    candidates = [naive_topological(dag, model, R)]
    for rule in GreedyRule:
        try:
            candidates.append(greedy_pebble(dag, model, R, GreedyPolicy(rule, FARTHEST_NEXT_USE)))
        except ScheduleError as e:
            log.debug("greedy bound failed: %s", e)
    for tr in candidates:
        c = validate_trace(dag, model, R, tr).total
        if best is None or c < best[0]:
            best = (c, tr)
    return best


def solve_exact(dag: Dag, model: ModelSpec, R: int,
                limits: SearchLimits | None = None) -> OptimalResult:
    """Minimum-cost pebbling by best-first search over pebble placements.

    Dijkstra order on integer-scaled costs (zero-cost compute/delete edges are
    fine there) with an admissible, consistent lower bound per variant. A
    heuristic schedule supplies the initial upper bound; states that cannot
    beat it are pruned. If the state budget runs out, the best known schedule
    comes back with ``exhausted=False``.
    """
    _require_feasible(dag, R)
    limits = limits or SearchLimits()
    sp = _Space(dag, model, R)
    scale = sp.T if model.variant is Variant.COMPCOST else 1
    ub_cost, ub_trace = _upper_bound(dag, model, R)
    ub = ub_cost * scale
    if limits.max_cost is not None:
        ub = min(ub, Fraction(limits.max_cost) * scale)
    start = sp.initial()
    k0 = sp.key(start)
    best_g = {k0: 0}
    parent: dict[bytes, tuple[bytes | None, tuple]] = {k0: (None, ())}
    concrete = {k0: start}
    closed = set()
    tie = itertools.count()
    heap = [(sp.heuristic(start), 0, next(tie), k0)]
    expanded = 0
    while heap:
        f, g, _, k = heapq.heappop(heap)
        if k in closed or g != best_g.get(k):
            continue
        if f > ub:
            break
        closed.add(k)
        s = concrete[k]
        if sp.is_goal(s):
            moves = []
            while k is not None:
                pk, mv = parent[k]
                moves.extend(reversed(mv))
                k = pk
            moves.reverse()
            return OptimalResult(Fraction(g, scale), Trace(moves), expanded, True)
        expanded += 1
        if expanded > limits.max_states:
            log.info("state budget %d exhausted; returning heuristic bound", limits.max_states)
            return OptimalResult(ub_cost, ub_trace, expanded, False)
        for c, mv, child in sp.expand(s):
            g2 = g + c
            ck = sp.key(child)
            if ck in closed:
                continue
            old = best_g.get(ck)
            if old is not None and old <= g2:
                continue
            f2 = g2 + sp.heuristic(child)
            if f2 > ub:
                continue
            best_g[ck] = g2
            parent[ck] = (k, mv)
            concrete[ck] = child
            heapq.heappush(heap, (f2, g2, next(tie), ck))
    # nothing within the bound beats the heuristic schedule: it is optimal,
    # unless a caller-imposed cost cap cut the search short
    capped = limits.max_cost is not None and Fraction(limits.max_cost) < ub_cost
    return OptimalResult(ub_cost, ub_trace, expanded, not capped)


# -- greedy ---------------------------------------------------------------

class GreedyRule(enum.Enum):
    MOST_RED_INPUTS = "most-red"
    FEWEST_BLUE_INPUTS = "fewest-blue"
    BEST_RED_RATIO = "best-ratio"


class Eviction(enum.Enum):
    FARTHEST_NEXT_USE = FARTHEST_NEXT_USE
    LOWEST_ID = LOWEST_ID


@dataclass(frozen=True)
class GreedyPolicy:
    rule: GreedyRule = GreedyRule.MOST_RED_INPUTS
    eviction: Eviction | str = Eviction.FARTHEST_NEXT_USE

    def __post_init__(self):
        if isinstance(self.rule, str):
            object.__setattr__(self, "rule", GreedyRule(self.rule))
        if isinstance(self.eviction, str):
            object.__setattr__(self, "eviction", Eviction(self.eviction))


def _priority(rule: GreedyRule, ex: Executor, v: str):
    ins = ex.dag.preds[v]
    red = sum(ex.status(u) is Status.RED for u in ins)
    if rule is GreedyRule.MOST_RED_INPUTS:
        return (-red, v)
    if rule is GreedyRule.FEWEST_BLUE_INPUTS:
        # an input without a red pebble costs a transfer or a computation
        return (len(ins) - red, v)
    ratio = Fraction(red, len(ins)) if ins else Fraction(0)
    return (-ratio, v)


def greedy_pebble(dag: Dag, model: ModelSpec, R: int,
                  policy: GreedyPolicy | None = None) -> Trace:
    """Pebble ``dag`` by repeatedly computing the best-looking ready node.

    Candidates are uncomputed nodes whose non-source inputs are all computed;
    sources are computed on demand. Nodes are computed once each, in every
    variant.
    """
    _require_feasible(dag, R)
    policy = policy or GreedyPolicy()
    ex = Executor(dag, model, R, policy.eviction.value)
    remaining_inputs = {v: sum(1 for u in dag.preds[v] if dag.preds[u]) for v in dag.nodes}
    todo = {v for v in computable(dag, model)
            if dag.preds[v] or not dag.succs[v]} - ex.done
    ready = {v for v in todo if remaining_inputs[v] == 0}
    topo_pos = {v: i for i, v in enumerate(dag.topological_order)}
    ranking: dict[str, int] = {}

    def next_use(u):
        best = INF
        for w in dag.succs[u]:
            if w in ex.done:
                continue
            r = ranking.get(w)
            d = r if r is not None else len(ranking) + 1 + topo_pos[w]
            best = min(best, d)
        return best

    ex.next_use = next_use
    while ready:
        order = sorted(ready, key=lambda v: _priority(policy.rule, ex, v))
        ranking = {v: i for i, v in enumerate(order)}
        v = order[0]
        ready.discard(v)
        ex.compute(v)
        for w in dag.succs[v]:
            remaining_inputs[w] -= 1
            if remaining_inputs[w] == 0 and w in todo and w not in ex.done:
                ready.add(w)
    return ex.finish()


def naive_topological(dag: Dag, model: ModelSpec, R: int) -> Trace:
    """Topological schedule that keeps only the next node's inputs red.

    Before each computation every other red pebble is stored, then the missing
    inputs are loaded. At most ``2*Delta + 1`` transfers per node.
    """
    _require_feasible(dag, R)
    ex = Executor(dag, model, R)
    for v in dag.topological_order:
        if v in ex.done:
            continue
        ins = set(dag.preds[v])
        for u, st in list(ex.state.status.items()):
            if st is Status.RED and u not in ins:
                ex.emit(MoveKind.STORE, u)
        for u in dag.preds[v]:
            if ex.status(u) is Status.BLUE:
                ex.emit(MoveKind.LOAD, u)
        ex._first_compute(v)
    return ex.finish()


def tradeoff_curve(dag: Dag, model: ModelSpec, R_min: int, R_max: int,
                   limits: SearchLimits | None = None) -> list[tuple[int, Fraction, bool]]:
    if R_min > R_max:
        raise ValueError("R_min must not exceed R_max")
    _require_feasible(dag, R_min)
    out = []
    for R in range(R_min, R_max + 1):
        res = solve_exact(dag, model, R, limits)
        out.append((R, res.cost, res.exhausted))
    return out


def curve_to_csv(curve: Sequence[tuple[int, Fraction, bool]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["R", "cost_num", "cost_den", "exhausted"])
    for R, cost, ok in curve:
        cost = Fraction(cost)
        w.writerow([R, cost.numerator, cost.denominator, str(bool(ok)).lower()])
    return buf.getvalue()


def curve_from_csv(text: str) -> list[tuple[int, Fraction, bool]]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [(int(r["R"]), Fraction(int(r["cost_num"]), int(r["cost_den"])),
             r["exhausted"] == "true") for r in rows]


# -- group-order oracle ---------------------------------------------------

MAX_GROUPS = 10


def group_order_search(instance, max_groups: int = MAX_GROUPS) -> tuple[list[str], Fraction]:
    """Cheapest precedence-respecting visiting order of the instance's groups.

    Uses the instance's analytical per-order cost (``instance.order_cost``)
    and exhaustive branch and bound; the per-step cost increments are
    non-negative so pruning on the partial cost is exact.
    """
    gids = list(instance.group_ids)
    if len(gids) > max_groups:
        raise TooManyGroups(f"{len(gids)} groups exceed the cap of {max_groups}")
    before = instance.precedence()  # gid -> set of gids that must come first
    best: list = [None, None]

    def rec(prefix: list[str], placed: set[str], cost: Fraction):
        if best[1] is not None and cost >= best[1]:
            return
        if len(prefix) == len(gids):
            if best[1] is None or cost < best[1]:
                best[0], best[1] = list(prefix), cost
            return
        for gid in gids:
            if gid in placed or not before.get(gid, set()) <= placed:
                continue
            step = instance.step_cost(prefix, gid)
            prefix.append(gid)
            placed.add(gid)
            rec(prefix, placed, cost + step)
            prefix.pop()
            placed.discard(gid)

    rec([], set(), Fraction(0))
    order = best[0]
    return order, instance.order_cost(order)
