"""Turn an order of first computations into a concrete pebbling trace.

Greedy heuristics, the naive topological baseline and the canonical traces of
the reduction instances all reduce to the same question: given the next node
to compute, which inputs to fetch and which red pebbles to give up. The
``Executor`` answers it once; callers only decide the order and how far away
the next use of a pebble is.
"""
from __future__ import annotations

from typing import Callable, Sequence

from .dag import Dag
from .engine import (
    ModelSpec, Move, MoveKind, PebbleState, Start, Status, Trace, Variant, Finish,
    _apply, check_move, initial_state,
)

FARTHEST_NEXT_USE = "farthest"
LOWEST_ID = "lowest-id"

INF = float("inf")


class ScheduleError(RuntimeError):
    pass


class Executor:
    """Mutable pebbling session that emits only legal moves.

    Inner nodes are computed at most once, which is what the greedy orderings
    describe in all four variants. Sources are the exception outside ONESHOT:
    when they are free to compute, recomputing one is never dearer than a
    load, so they are dropped rather than stored and recomputed on demand.
    """

    def __init__(self, dag: Dag, model: ModelSpec, R: int, eviction: str = FARTHEST_NEXT_USE):
        self.dag = dag
        self.model = model
        self.R = R
        self.eviction = eviction
        self.state: PebbleState = initial_state(dag, model)
        self.moves: list[Move] = []
        self.pending = {v: len(dag.succs[v]) for v in dag.nodes}
        self.done: set[str] = set(self.state.computed)
        self.is_sink = {v: not dag.succs[v] for v in dag.nodes}
        # distance to the next demand of a node; lower means sooner
        self.next_use: Callable[[str], float] = lambda v: INF
        self.cheap_sources = (model.variant is not Variant.ONESHOT
                              and model.start is Start.FREE_SOURCES)

    # -- primitives ---------------------------------------------------
    def emit(self, kind: MoveKind, v: str) -> None:
        m = Move(kind, v)
        check_move(self.dag, self.model, self.R, self.state, m)
        _apply(self.state, m)
        self.moves.append(m)

    def status(self, v: str) -> Status:
        return self.state.status[v]

    def has_future_use(self, v: str) -> bool:
        return self.pending[v] > 0

    def is_cheap_source(self, v: str) -> bool:
        return self.cheap_sources and not self.dag.preds[v] and not self.is_sink[v]

    def can_drop(self, v: str) -> bool:
        """Whether ``v`` can lose its red pebble without a transfer."""
        if self.model.variant is Variant.NODEL or self.is_sink[v]:
            return False
        return not self.has_future_use(v) or self.is_cheap_source(v)

    def _victim(self, protect: set[str]) -> str:
        cands = [v for v, s in self.state.status.items() if s is Status.RED and v not in protect]
        if not cands:
            raise ScheduleError("no red pebble can be released")
        if self.eviction == LOWEST_ID:
            return min(cands)

        def rank(v):
            return (0 if self.can_drop(v) else 1, -self.next_use(v), v)

        return min(cands, key=rank)

    def evict(self, v: str) -> None:
        self.emit(MoveKind.DELETE if self.can_drop(v) else MoveKind.STORE, v)

    def ensure_slot(self, protect: set[str]) -> None:
        while self.state.red_count >= self.R:
            self.evict(self._victim(protect))

    def redden(self, u: str, protect: set[str]) -> None:
        st = self.status(u)
        if st is Status.RED:
            return
        self.ensure_slot(protect)
        if self.is_cheap_source(u) and u in self.done:
            self.emit(MoveKind.COMPUTE, u)
        elif st is Status.BLUE:
            self.emit(MoveKind.LOAD, u)
        elif u not in self.done and not self.dag.preds[u]:
            self._first_compute(u)
        else:
            raise ScheduleError(f"input {u} has no pebble and cannot be recomputed")

    def _first_compute(self, v: str) -> None:
        self.emit(MoveKind.COMPUTE, v)
        self.done.add(v)
        for u in self.dag.preds[v]:
            self.pending[u] -= 1

    # -- public -------------------------------------------------------
    def compute(self, v: str) -> None:
        """Compute ``v`` for the first time, fetching inputs as needed."""
        if v in self.done:
            raise ScheduleError(f"{v} already computed")
        need = self.dag.preds[v]
        protect = set(need) | {v}
        for u in need:
            self.redden(u, protect)
        if self.status(v) is not Status.RED:
            self.ensure_slot(set(need))
        self._first_compute(v)

    def release_useless(self) -> None:
        """Drop red pebbles that no future computation needs."""
        if self.model.variant is Variant.NODEL:
            return
        for v, s in list(self.state.status.items()):
            if s is Status.RED and self.can_drop(v) and not self.has_future_use(v):
                self.emit(MoveKind.DELETE, v)

    def finish(self) -> Trace:
        for v in self.dag.sinks:
            if v not in self.done and self.status(v) is Status.EMPTY:
                self.compute(v)
        if self.model.finish is Finish.BLUE_ON_SINKS:
            for v in self.dag.sinks:
                if self.status(v) is Status.RED:
                    self.emit(MoveKind.STORE, v)
        return Trace(list(self.moves))


def computable(dag: Dag, model: ModelSpec) -> list[str]:
    """Nodes a schedule must compute explicitly (all but blue-started sources)."""
    if model.start is Start.BLUE_SOURCES:
        return [v for v in dag.nodes if dag.preds[v]]
    return list(dag.nodes)


def run_order(dag: Dag, model: ModelSpec, R: int, order: Sequence[str],
              eviction: str = FARTHEST_NEXT_USE) -> Trace:
    """Compute the nodes of ``order`` in sequence with Belady-style eviction.

    Sources left out of ``order`` are computed on demand. Eviction looks at the
    known future order: the victim is the red pebble whose next demand is
    farthest away.
    """
    ex = Executor(dag, model, R, eviction)
    pos = {}
    for i, v in enumerate(order):
        pos.setdefault(v, i)
    demand: dict[str, list[int]] = {}
    for v in dag.nodes:
        demand[v] = sorted(pos[w] for w in dag.succs[v] if w in pos)
    cursor = [0]

    def next_use(v):
        for p in demand[v]:
            if p >= cursor[0]:
                return p
        return INF

    ex.next_use = next_use
    for i, v in enumerate(order):
        cursor[0] = i
        if v in ex.done:
            continue
        ex.compute(v)
    return ex.finish()
