"""DAG representation, JSON I/O and the structural transforms used by the
pebbling constructions (universal source, H2C gadget, constant-degree ladder).
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

log = logging.getLogger(__name__)


class DagError(ValueError):
    """Base class for rejected DAG inputs."""


class CycleDetected(DagError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__("cycle: " + " -> ".join(self.cycle))


class UnknownEndpoint(DagError):
    pass


class DuplicateEdge(DagError):
    pass


class DuplicateNode(DagError):
    pass


class InvalidGroup(DagError):
    pass


class InvalidR(DagError):
    pass


class GroupSizeMismatch(DagError):
    pass


@dataclass(frozen=True)
class InputGroup:
    members: tuple[str, ...]
    targets: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "targets", tuple(self.targets))


@dataclass(frozen=True)
class Dag:
    """Immutable DAG; an edge ``(u, v)`` means ``u`` is an input of ``v``.

    Construction validates every invariant, so any ``Dag`` instance in
    circulation is acyclic, loop-free and duplicate-free.
    """

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    name: str = "dag"
    groups: tuple[InputGroup, ...] = ()
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple((u, v) for u, v in self.edges))
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "meta", dict(self.meta))
        self._validate()

    def _validate(self):
        seen = set()
        for v in self.nodes:
            if not isinstance(v, str):
                raise DagError(f"node id must be a string: {v!r}")
            if v in seen:
                raise DuplicateNode(v)
            seen.add(v)
        edge_set = set()
        for u, v in self.edges:
            if u not in seen or v not in seen:
                raise UnknownEndpoint(f"edge ({u}, {v})")
            if u == v:
                raise CycleDetected([u, u])
            if (u, v) in edge_set:
                raise DuplicateEdge(f"({u}, {v})")
            edge_set.add((u, v))
        if len(self.topological_order) != len(self.nodes):
            raise CycleDetected(self._find_cycle())
        for g in self.groups:
            ms, ts = set(g.members), set(g.targets)
            if ms & ts:
                raise InvalidGroup(f"members and targets overlap: {sorted(ms & ts)}")
            for m in g.members:
                for t in g.targets:
                    if (m, t) not in edge_set:
                        raise InvalidGroup(f"missing group edge ({m}, {t})")

    def _find_cycle(self) -> list[str]:
        color = {v: 0 for v in self.nodes}
        stack_path: list[str] = []

        def visit(v):
            color[v] = 1
            stack_path.append(v)
            for w in self.succs[v]:
                if color[w] == 1:
                    return stack_path[stack_path.index(w):] + [w]
                if color[w] == 0:
                    found = visit(w)
                    if found:
                        return found
            stack_path.pop()
            color[v] = 2
            return None

        for v in self.nodes:
            if color[v] == 0:
                found = visit(v)
                if found:
                    return found
        return []

    @cached_property
    def preds(self) -> dict[str, tuple[str, ...]]:
        p: dict[str, list[str]] = {v: [] for v in self.nodes}
        for u, v in self.edges:
            p[v].append(u)
        return {v: tuple(us) for v, us in p.items()}

    @cached_property
    def succs(self) -> dict[str, tuple[str, ...]]:
        s: dict[str, list[str]] = {v: [] for v in self.nodes}
        for u, v in self.edges:
            s[u].append(v)
        return {v: tuple(ws) for v, ws in s.items()}

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        indeg = {v: len(self.preds[v]) for v in self.nodes}
        ready = [v for v in self.nodes if indeg[v] == 0]
        order = []
        i = 0
        while i < len(ready):
            v = ready[i]
            i += 1
            order.append(v)
            for w in self.succs[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
        return tuple(order)

    @cached_property
    def sources(self) -> tuple[str, ...]:
        return tuple(v for v in self.nodes if not self.preds[v])

    @cached_property
    def sinks(self) -> tuple[str, ...]:
        return tuple(v for v in self.nodes if not self.succs[v])

    @property
    def n(self) -> int:
        return len(self.nodes)

    def with_meta(self, **extra: str) -> "Dag":
        meta = dict(self.meta)
        meta.update({k: str(v) for k, v in extra.items()})
        return Dag(self.nodes, self.edges, self.name, self.groups, meta)


def max_indegree(dag: Dag) -> int:
    return max((len(p) for p in dag.preds.values()), default=0)


def feasibility_threshold(dag: Dag) -> int:
    """Smallest red-pebble budget that admits any pebbling: max indegree + 1."""
    return max_indegree(dag) + 1


def _stamp(dag: Dag, **extra) -> Dag:
    return dag.with_meta(feasibility_threshold=feasibility_threshold(dag), **extra)


# -- JSON ---------------------------------------------------------------

def dag_to_dict(dag: Dag) -> dict:
    out = {
        "name": dag.name,
        "nodes": list(dag.nodes),
        "edges": [[u, v] for u, v in dag.edges],
    }
    if dag.groups:
        out["groups"] = [
            {"members": list(g.members), "targets": list(g.targets)} for g in dag.groups
        ]
    if dag.meta:
        out["meta"] = dict(dag.meta)
    return out


def dag_from_dict(data: Mapping) -> Dag:
    if not isinstance(data, Mapping) or "nodes" not in data:
        raise DagError("DAG JSON needs a 'nodes' list")
    edges = []
    for e in data.get("edges", []):
        if len(e) != 2:
            raise DagError(f"edge must be a pair: {e!r}")
        edges.append((e[0], e[1]))
    groups = [InputGroup(g["members"], g["targets"]) for g in data.get("groups", []) or []]
    meta = {str(k): str(v) for k, v in (data.get("meta") or {}).items()}
    return Dag(tuple(data["nodes"]), tuple(edges), data.get("name", "dag"), tuple(groups), meta)


def parse_dag(text: str) -> Dag:
    return dag_from_dict(json.loads(text))


def serialize_dag(dag: Dag) -> str:
    return json.dumps(dag_to_dict(dag), indent=None, separators=(",", ":"))


def load_dag(path) -> Dag:
    with open(path) as fh:
        return parse_dag(fh.read())


def save_dag(dag: Dag, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_dag(dag) + "\n")


# -- transforms ---------------------------------------------------------

def _fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    name = f"{base}_{i}"
    log.warning("node id %r already taken, using %r", base, name)
    return name


def _bump_red(dag: Dag, by: int) -> str:
    return str(int(dag.meta.get("extra_red", "0")) + by)


def add_universal_source(dag: Dag) -> Dag:
    """Add one source feeding every other node; callers should pebble the
    result with one more red pebble (recorded as ``meta['extra_red']``)."""
    s0 = _fresh_name("s0", set(dag.nodes))
    nodes = (s0,) + dag.nodes
    edges = tuple((s0, v) for v in dag.nodes) + dag.edges
    out = Dag(nodes, edges, dag.name, dag.groups, dag.meta)
    return _stamp(out, extra_red=_bump_red(dag, 1), universal_source=s0)


def attach_h2c(dag: Dag, R: int, per_source_copies: bool = False) -> Dag:
    """Put a hard-to-compute gadget in front of every source.

    Each source ``v`` gets three starter nodes feeding it; every starter is fed
    by a group ``B`` of ``R - 1`` nodes which in turn all depend on one node
    ``s``. ``s`` and ``B`` are shared across sources unless
    ``per_source_copies`` is set.
    """
    if R < 2:
        raise InvalidR(f"H2C gadget needs R >= 2, got {R}")
    taken = set(dag.nodes)
    new_nodes: list[str] = []
    new_edges: list[tuple[str, str]] = []
    groups = list(dag.groups)

    def block(prefix):
        s = _fresh_name(f"{prefix}.s", taken)
        taken.add(s)
        bs = []
        for i in range(1, R):
            b = _fresh_name(f"{prefix}.B.{i}", taken)
            taken.add(b)
            bs.append(b)
        new_nodes.append(s)
        new_nodes.extend(bs)
        new_edges.extend((s, b) for b in bs)
        return bs

    shared = None if per_source_copies else block("h2c")
    for v in dag.sources:
        bs = block(f"h2c.{v}") if per_source_copies else shared
        us = []
        for i in (1, 2, 3):
            u = _fresh_name(f"h2c.{v}.u{i}", taken)
            taken.add(u)
            us.append(u)
        new_nodes.extend(us)
        for u in us:
            new_edges.extend((b, u) for b in bs)
        new_edges.extend((u, v) for u in us)
        groups.append(InputGroup(tuple(bs), tuple(us)))

    out = Dag(tuple(new_nodes) + dag.nodes, tuple(new_edges) + dag.edges, dag.name,
              tuple(groups), dag.meta)
    need = feasibility_threshold(out)
    if R < need:
        raise InvalidR(f"R={R} cannot pebble the gadget-augmented DAG (needs {need})")
    return _stamp(out, h2c_R=R)


def cd_transform(dag: Dag, R: int, h: int) -> Dag:
    """Replace every annotated input group by a ladder of ``h`` layers.

    Layer node ``(layer, col)`` takes group member ``col`` plus the previous
    ladder node, walking the members in order inside each layer. The final
    ladder node feeds every target of the group. Returned groups are empty:
    the ladder no longer has a single target fed by all members.
    """
    if not dag.groups:
        raise GroupSizeMismatch("DAG has no input groups to transform")
    if h < 1:
        raise ValueError("h must be positive")
    removed = set()
    taken = set(dag.nodes)
    new_nodes: list[str] = []
    new_edges: list[tuple[str, str]] = []
    for gi, g in enumerate(dag.groups):
        if len(g.members) != R - 1:
            raise GroupSizeMismatch(
                f"group {gi} has {len(g.members)} members, expected R-1={R - 1}")
        prev = None
        for layer in range(1, h + 1):
            for col, m in enumerate(g.members, start=1):
                node = _fresh_name(f"cd.{gi}.{layer}.{col}", taken)
                taken.add(node)
                new_nodes.append(node)
                new_edges.append((m, node))
                if prev is not None:
                    new_edges.append((prev, node))
                prev = node
        for t in g.targets:
            for m in g.members:
                removed.add((m, t))
            new_edges.append((prev, t))
    kept = tuple(e for e in dag.edges if e not in removed)
    out = Dag(dag.nodes + tuple(new_nodes), kept + tuple(new_edges), dag.name, (), dag.meta)
    return _stamp(out, extra_red=_bump_red(dag, 1), cd_h=h)


def dag_from_edges(edges: Iterable[tuple[str, str]], nodes: Iterable[str] = (),
                   name: str = "dag") -> Dag:
    """Convenience builder: nodes in first-seen order."""
    order: dict[str, None] = {v: None for v in nodes}
    edges = list(edges)
    for u, v in edges:
        order.setdefault(u, None)
        order.setdefault(v, None)
    return Dag(tuple(order), tuple(edges), name)
