"""Executable rules of the red-blue pebble game in its four cost variants."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .dag import Dag, max_indegree


class Variant(enum.Enum):
    BASE = "base"
    ONESHOT = "oneshot"
    NODEL = "nodel"
    COMPCOST = "compcost"


class Start(enum.Enum):
    FREE_SOURCES = "free"
    BLUE_SOURCES = "blue-sources"


class Finish(enum.Enum):
    ANY_PEBBLE_ON_SINKS = "any"
    BLUE_ON_SINKS = "blue-sinks"


DEFAULT_EPSILON = Fraction(1, 100)


def parse_fraction(text: str) -> Fraction:
    """Parse ``P/Q`` into a rational strictly inside (0, 1)."""
    parts = str(text).split("/")
    if len(parts) != 2:
        raise ValueError(f"epsilon must look like P/Q, got {text!r}")
    num, den = (int(p) for p in parts)
    if num <= 0 or den <= 0:
        raise ValueError("epsilon numerator and denominator must be positive")
    eps = Fraction(num, den)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
    return eps


@dataclass(frozen=True)
class ModelSpec:
    variant: Variant = Variant.ONESHOT
    epsilon: Fraction = DEFAULT_EPSILON
    start: Start = Start.FREE_SOURCES
    finish: Finish = Finish.ANY_PEBBLE_ON_SINKS

    def __post_init__(self):
        eps = Fraction(self.epsilon)
        if not 0 < eps < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def of(cls, variant: str | Variant, **kw) -> "ModelSpec":
        if isinstance(variant, str):
            variant = Variant(variant.lower())
        return cls(variant, **kw)

    @property
    def compute_cost(self) -> Fraction:
        return self.epsilon if self.variant is Variant.COMPCOST else Fraction(0)


class Status(enum.IntEnum):
    EMPTY = 0
    RED = 1
    BLUE = 2


class MoveKind(enum.Enum):
    LOAD = "load"
    STORE = "store"
    COMPUTE = "compute"
    DELETE = "delete"


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    node: str

    def __repr__(self):
        return f"{self.kind.name}({self.node})"

    def to_json(self) -> str:
        return json.dumps({"op": self.kind.value, "node": self.node})

    @classmethod
    def from_dict(cls, d) -> "Move":
        return cls(MoveKind(d["op"]), d["node"])


def load(v): return Move(MoveKind.LOAD, v)
def store(v): return Move(MoveKind.STORE, v)
def compute(v): return Move(MoveKind.COMPUTE, v)
def delete(v): return Move(MoveKind.DELETE, v)


@dataclass
class PebbleState:
    status: dict[str, Status]
    computed: frozenset[str] = frozenset()
    red_count: int = 0

    def copy(self) -> "PebbleState":
        return PebbleState(dict(self.status), self.computed, self.red_count)

    def key(self):
        return (tuple(sorted(self.status.items())), self.computed)

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        return isinstance(other, PebbleState) and self.key() == other.key()


@dataclass(frozen=True)
class CostReport:
    loads: int = 0
    stores: int = 0
    computes: int = 0
    deletes: int = 0
    total: Fraction = Fraction(0)

    def to_dict(self) -> dict:
        return {
            "loads": self.loads, "stores": self.stores,
            "computes": self.computes, "deletes": self.deletes,
            "total": fraction_to_dict(self.total),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d) -> "CostReport":
        return cls(d["loads"], d["stores"], d["computes"], d["deletes"],
                   fraction_from_dict(d["total"]))


def fraction_to_dict(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def fraction_from_dict(d) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


@dataclass
class Trace:
    moves: list[Move] = field(default_factory=list)

    def __len__(self):
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def to_jsonl(self) -> str:
        return "".join(m.to_json() + "\n" for m in self.moves)

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        return cls([Move.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()])

    def cost(self, model: ModelSpec) -> Fraction:
        transfers = sum(m.kind in (MoveKind.LOAD, MoveKind.STORE) for m in self.moves)
        computes = sum(m.kind is MoveKind.COMPUTE for m in self.moves)
        return transfers + model.compute_cost * computes


# -- rules --------------------------------------------------------------

class IllegalMove(Exception):
    """A move that breaks a game rule; ``reason`` names the rule."""

    def __init__(self, reason: str, move: Move | None = None):
        self.reason = reason
        self.move = move
        super().__init__(f"{reason}: {move!r}" if move else reason)


class IllegalMoveAt(IllegalMove):
    def __init__(self, index: int, reason: str, move: Move | None = None):
        self.index = index
        super().__init__(reason, move)
        self.args = (f"move {index} {move!r}: {reason}",)


class GoalNotReached(Exception):
    pass


def initial_state(dag: Dag, model: ModelSpec) -> PebbleState:
    status = {v: Status.EMPTY for v in dag.nodes}
    computed = frozenset()
    if model.start is Start.BLUE_SOURCES:
        for v in dag.sources:
            status[v] = Status.BLUE
        computed = frozenset(dag.sources)
    return PebbleState(status, computed, 0)


def check_move(dag: Dag, model: ModelSpec, R: int, state: PebbleState, move: Move) -> None:
    """Raise ``IllegalMove`` if ``move`` is not allowed in ``state``."""
    v = move.node
    st = state.status.get(v)
    if st is None:
        raise IllegalMove("UnknownNode", move)
    kind = move.kind
    if kind is MoveKind.LOAD:
        if st is not Status.BLUE:
            raise IllegalMove("NotBlue", move)
        if state.red_count >= R:
            raise IllegalMove("RedBudgetExceeded", move)
    elif kind is MoveKind.STORE:
        if st is not Status.RED:
            raise IllegalMove("NotRed", move)
    elif kind is MoveKind.DELETE:
        if model.variant is Variant.NODEL:
            raise IllegalMove("DeleteForbidden", move)
        if st is Status.EMPTY:
            raise IllegalMove("NoPebble", move)
    else:
        if model.start is Start.BLUE_SOURCES and not dag.preds[v]:
            raise IllegalMove("SourceNotComputable", move)
        if model.variant is Variant.ONESHOT and v in state.computed:
            raise IllegalMove("RecomputeForbidden", move)
        if st is Status.RED:
            raise IllegalMove("AlreadyRed", move)
        if any(state.status[u] is not Status.RED for u in dag.preds[v]):
            raise IllegalMove("InputsNotRed", move)
        if state.red_count >= R:
            raise IllegalMove("RedBudgetExceeded", move)


def _apply(state: PebbleState, move: Move) -> None:
    v = move.node
    kind = move.kind
    if kind is MoveKind.LOAD:
        state.status[v] = Status.RED
        state.red_count += 1
    elif kind is MoveKind.STORE:
        state.status[v] = Status.BLUE
        state.red_count -= 1
    elif kind is MoveKind.DELETE:
        if state.status[v] is Status.RED:
            state.red_count -= 1
        state.status[v] = Status.EMPTY
    else:
        state.status[v] = Status.RED
        state.red_count += 1
        if v not in state.computed:
            state.computed = state.computed | {v}


def move_cost(model: ModelSpec, move: Move) -> Fraction:
    if move.kind in (MoveKind.LOAD, MoveKind.STORE):
        return Fraction(1)
    if move.kind is MoveKind.COMPUTE:
        return model.compute_cost
    return Fraction(0)


def apply_move(dag: Dag, model: ModelSpec, R: int, state: PebbleState,
               move: Move) -> tuple[PebbleState, Fraction]:
    check_move(dag, model, R, state, move)
    new = state.copy()
    _apply(new, move)
    return new, move_cost(model, move)


def legal_moves(dag: Dag, model: ModelSpec, R: int, state: PebbleState) -> set[Move]:
    out = set()
    for v in dag.nodes:
        for kind in MoveKind:
            m = Move(kind, v)
            try:
                check_move(dag, model, R, state, m)
            except IllegalMove:
                continue
            out.add(m)
    return out


def is_goal(dag: Dag, model: ModelSpec, state: PebbleState) -> bool:
    if model.finish is Finish.BLUE_ON_SINKS:
        return all(state.status[v] is Status.BLUE for v in dag.sinks)
    return all(state.status[v] is not Status.EMPTY for v in dag.sinks)


def validate_trace(dag: Dag, model: ModelSpec, R: int, trace: Trace | Iterable[Move]) -> CostReport:
    """Replay ``trace`` from the initial state and return its cost breakdown.

    Raises ``IllegalMoveAt`` at the first rule violation and ``GoalNotReached``
    if the final state leaves a sink unpebbled.
    """
    state = initial_state(dag, model)
    counts = {k: 0 for k in MoveKind}
    for i, m in enumerate(trace):
        try:
            check_move(dag, model, R, state, m)
        except IllegalMove as e:
            raise IllegalMoveAt(i, e.reason, m) from None
        _apply(state, m)
        counts[m.kind] += 1
    if not is_goal(dag, model, state):
        missing = [v for v in dag.sinks if state.status[v] is Status.EMPTY
                   or (model.finish is Finish.BLUE_ON_SINKS and state.status[v] is not Status.BLUE)]
        raise GoalNotReached(f"sinks not finished: {missing[:10]}")
    loads, stores = counts[MoveKind.LOAD], counts[MoveKind.STORE]
    computes = counts[MoveKind.COMPUTE]
    total = Fraction(loads + stores) + model.compute_cost * computes
    return CostReport(loads, stores, computes, counts[MoveKind.DELETE], total)


def length_bound(dag: Dag, model: ModelSpec) -> Fraction | None:
    """Explicit step-count bound for optimal traces; ``None`` for BASE."""
    n = dag.n
    spread = 2 * max_indegree(dag) + 1
    if model.variant is Variant.ONESHOT:
        return Fraction(2 * n + spread * n)
    if model.variant is Variant.NODEL:
        return Fraction(n + 2 * spread * n)
    if model.variant is Variant.COMPCOST:
        eps = model.epsilon
        top = (spread + eps) * n
        return top + 2 / eps * top
    return None


def length_bound_check(dag: Dag, model: ModelSpec, trace: Trace | Sequence[Move]) -> bool:
    bound = length_bound(dag, model)
    return bound is None or len(trace) <= bound
