"""Gadget and reduction-instance generators plus certificate decoders.

Every generator is a pure function of its parameters and produces
deterministic node names, so decoders and golden tests can rely on them.
"""
from __future__ import annotations

import enum
import itertools
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .dag import Dag, InputGroup, attach_h2c, dag_to_dict, feasibility_threshold
from .engine import (
    ModelSpec, MoveKind, Status, Trace, Variant, fraction_from_dict, fraction_to_dict,
    initial_state, _apply, validate_trace,
)
from .schedule import run_order

log = logging.getLogger(__name__)


class GeneratorError(ValueError):
    pass


class KTooSmall(GeneratorError):
    pass


class ParamsTooTight(GeneratorError):
    pass


class MalformedTrace(GeneratorError):
    pass


class NotACover(GeneratorError):
    pass


@dataclass(frozen=True)
class UndirectedGraph:
    nodes: tuple[str, ...]
    edges: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate graph node")
        es = set()
        for e in self.edges:
            a, b = tuple(e)
            if a == b:
                raise ValueError(f"self-loop on {a}")
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"unknown endpoint in edge {a}-{b}")
            es.add(frozenset((a, b)))
        object.__setattr__(self, "edges", frozenset(es))

    @property
    def N(self) -> int:
        return len(self.nodes)

    @property
    def M(self) -> int:
        return len(self.edges)

    def adjacent(self, a, b) -> bool:
        return frozenset((a, b)) in self.edges

    def sorted_edges(self) -> list[tuple[str, str]]:
        pos = {v: i for i, v in enumerate(self.nodes)}
        return sorted((tuple(sorted(e, key=pos.__getitem__)) for e in self.edges),
                      key=lambda e: (pos[e[0]], pos[e[1]]))

    def to_json(self) -> str:
        return json.dumps({"nodes": list(self.nodes), "edges": [list(e) for e in self.sorted_edges()]})

    @classmethod
    def from_json(cls, text: str) -> "UndirectedGraph":
        d = json.loads(text)
        return cls(tuple(d["nodes"]), frozenset(frozenset(e) for e in d["edges"]))


def has_hamiltonian_path(g: UndirectedGraph) -> bool:
    return any(all(g.adjacent(a, b) for a, b in zip(p, p[1:]))
               for p in itertools.permutations(g.nodes))


def is_vertex_cover(g: UndirectedGraph, cover) -> bool:
    cover = set(cover)
    return all(e & cover for e in g.edges)


def min_vertex_cover_size(g: UndirectedGraph) -> int:
    for size in range(g.N + 1):
        for c in itertools.combinations(g.nodes, size):
            if is_vertex_cover(g, c):
                return size
    return g.N


class Kind(enum.Enum):
    HAMPATH = "hampath"
    VERTEX_COVER = "vertexcover"


@dataclass
class ReductionInstance:
    dag: Dag
    R: int
    model: ModelSpec
    threshold: Fraction | None
    kind: Kind
    decode_meta: dict[str, list[str]]
    params: dict = field(default_factory=dict)
    graph: UndirectedGraph | None = None

    # group-order oracle interface -------------------------------------
    @property
    def group_ids(self) -> list[str]:
        return [str(i) for i in range(len(self.dag.groups))]

    def group(self, gid: str) -> InputGroup:
        return self.dag.groups[int(gid)]

    def precedence(self) -> dict[str, set[str]]:
        if self.kind is Kind.HAMPATH:
            return {}
        # a group can only be visited after the groups whose targets it holds;
        # a node's first-level group comes before its second-level group
        target_owner = {}
        for gid in self.group_ids:
            for t in self.group(gid).targets:
                target_owner[t] = gid
        before: dict[str, set[str]] = {gid: set() for gid in self.group_ids}
        for gid in self.group_ids:
            for m in self.group(gid).members:
                if m in target_owner:
                    before[gid].add(target_owner[m])
        for a in self.graph.nodes:
            g1, g2 = self.params["first"][a], self.params["second"][a]
            before[g2].add(g1)
        return before

    def step_cost(self, prefix: Sequence[str], gid: str) -> Fraction:
        """Cost added by visiting ``gid`` right after ``prefix``."""
        if self.kind is Kind.HAMPATH:
            if not prefix:
                return Fraction(self.params["order_offset"])
            a = self.decode_meta[prefix[-1]][0]
            b = self.decode_meta[gid][0]
            adj = self.graph.adjacent(a, b)
            return Fraction(self.params["step_adjacent" if adj else "step_apart"])
        # vertex cover: a second-level visit not right after its first-level
        # twin pays for storing and reloading every common node
        if self.params["level"][gid] == 2:
            a = self.decode_meta[gid][0]
            if not prefix or prefix[-1] != self.params["first"][a]:
                return Fraction(2 * self.params["k_prime"])
        return Fraction(0)

    def order_cost(self, order: Sequence[str]) -> Fraction:
        total = Fraction(0)
        for i, gid in enumerate(order):
            total += self.step_cost(order[:i], gid)
        return total

    # serialization ------------------------------------------------------
    def sidecar(self) -> dict:
        return {
            "kind": self.kind.value,
            "R": self.R,
            "threshold": None if self.threshold is None else fraction_to_dict(self.threshold),
            "params": _jsonable(self.params),
            "decode_meta": self.decode_meta,
            "model": {"variant": self.model.variant.value,
                      "epsilon": fraction_to_dict(self.model.epsilon)},
            "graph": json.loads(self.graph.to_json()) if self.graph else None,
        }

    def save(self, dag_path, sidecar_path) -> None:
        with open(dag_path, "w") as fh:
            fh.write(json.dumps(dag_to_dict(self.dag), separators=(",", ":")) + "\n")
        with open(sidecar_path, "w") as fh:
            fh.write(json.dumps(self.sidecar(), sort_keys=True) + "\n")

    @classmethod
    def from_parts(cls, dag: Dag, side: dict) -> "ReductionInstance":
        model = ModelSpec.of(side["model"]["variant"],
                             epsilon=fraction_from_dict(side["model"]["epsilon"]))
        thr = side["threshold"]
        graph = None
        if side.get("graph"):
            graph = UndirectedGraph.from_json(json.dumps(side["graph"]))
        params = dict(side["params"])
        for key in ("stated_threshold", "step_adjacent", "step_apart", "order_offset"):
            if isinstance(params.get(key), dict):
                params[key] = fraction_from_dict(params[key])
        return cls(dag, side["R"], model, None if thr is None else fraction_from_dict(thr),
                   Kind(side["kind"]), {k: list(v) for k, v in side["decode_meta"].items()},
                   params, graph)


def _jsonable(x):
    if isinstance(x, Fraction):
        return fraction_to_dict(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


# -- tradeoff DAG ---------------------------------------------------------

def gen_tradeoff_dag(d: int, m: int) -> Dag:
    """Two control groups of ``d`` sources and a chain of ``m`` nodes.

    Chain node ``c{i}`` reads ``c{i-1}`` and control group A (odd ``i``) or
    B (even ``i``); ``c1`` reads A only.
    """
    if d < 1 or m < 2:
        raise GeneratorError("need d >= 1 and m >= 2")
    A = [f"a{i}" for i in range(1, d + 1)]
    B = [f"b{i}" for i in range(1, d + 1)]
    chain = [f"c{i}" for i in range(1, m + 1)]
    edges = []
    for i, c in enumerate(chain, start=1):
        if i > 1:
            edges.append((chain[i - 2], c))
        edges.extend((x, c) for x in (A if i % 2 else B))
    groups = (InputGroup(tuple(A), tuple(chain[0::2])), InputGroup(tuple(B), tuple(chain[1::2])))
    dag = Dag(tuple(A + B + chain), tuple(edges), f"tradeoff_d{d}_m{m}", groups,
              {"d": str(d), "m": str(m)})
    return dag.with_meta(feasibility_threshold=feasibility_threshold(dag))


# -- Hamiltonian path -----------------------------------------------------

def hampath_thresholds(N: int, M: int, R: int, eps: Fraction) -> dict[str, Fraction]:
    """Largest cost a pebbling may have iff the graph has a Hamiltonian path.

    NODEL and ONESHOT follow from the per-order costs of
    ``hampath_step_costs``: an order along a Hamiltonian path has ``N - 1``
    adjacent steps. BASE and COMPCOST add the flat gadget cost to the ONESHOT
    value; those per-order costs do not depend on adjacency, so no threshold
    separates the two cases there.
    """
    S = N * (N - 1) - M
    nodel = Fraction((N - 1) ** 2)
    oneshot = Fraction(N - 1 + 2 * (M - (N - 1)))
    base = oneshot + 4 * S
    comp = base + eps * ((R + 4) * S + N)
    return {"nodel": nodel, "oneshot": oneshot, "base": base, "compcost": comp}


def hampath_stated_thresholds(N: int, M: int, R: int, eps: Fraction) -> dict[str, Fraction]:
    """The cost limits the construction was originally stated with.

    They count one transfer too many per group change, so graphs without a
    Hamiltonian path can slip under them; kept for comparison only.
    """
    S = N * (N - 1) - M
    nodel = Fraction((N - 1) * N)
    oneshot = Fraction((N - 1) * N + M)
    base = oneshot + 4 * S
    comp = base + eps * ((R + 4) * S + N)
    return {"nodel": nodel, "oneshot": oneshot, "base": base, "compcost": comp}


def hampath_step_costs(N: int, M: int, R: int, variant: Variant, eps: Fraction):
    """(first-visit offset, step cost if adjacent, step cost if not adjacent).

    NODEL: leaving a group stores its sink and every contact not shared with
    the next group. ONESHOT: each sink but the last is stored once, and each
    shared contact whose two groups are not consecutive is stored and
    reloaded, for ``N - 1 + 2 * (M - adjacent steps)`` in total.
    BASE/COMPCOST: a gadget needs all R pebbles, so nothing else is red while
    a contact is built. A group visit can start from one freshly built
    contact or one contact carried over from the previous group, never both,
    and every other contact is stored once and loaded per use. That makes the
    cost ``4*S + 2*N*(N-1) - N - 1`` (plus ``eps`` per compute) for every
    order: adjacency buys nothing.
    """
    S = N * (N - 1) - M
    if variant is Variant.NODEL:
        return Fraction(0), Fraction(N - 1), Fraction(N)
    if variant in (Variant.BASE, Variant.COMPCOST):
        offset = Fraction(4 * S + 2 * N * (N - 1) - N - 1)
        if variant is Variant.COMPCOST:
            offset += eps * ((R + 4) * S + N)
        return offset, Fraction(0), Fraction(0)
    # every order pays as if all N - 1 steps were adjacent; a non-adjacent
    # step adds two transfers. Non-negative increments keep branch and bound
    # pruning exact.
    return Fraction(2 * M - (N - 1)), Fraction(0), Fraction(2)


def reduce_hampath(g: UndirectedGraph, model: ModelSpec) -> ReductionInstance:
    """Pebbling instance whose cheap pebblings trace Hamiltonian paths of ``g``.

    One sink ``t.<a>`` per graph node, fed by the contacts ``v.<a>.<b>`` for
    every other node ``b``; the two contacts of an edge are merged. R = N.
    BASE and COMPCOST put a private H2C gadget in front of every contact.
    """
    N, M = g.N, g.M
    if N < 2:
        raise GeneratorError("Hamiltonian path reduction needs N >= 2")
    pos = {v: i for i, v in enumerate(g.nodes)}
    contact = {}
    nodes = []
    for a in g.nodes:
        for b in g.nodes:
            if a == b:
                continue
            if g.adjacent(a, b):
                x, y = sorted((a, b), key=pos.__getitem__)
                name = f"v.{x}.{y}"
            else:
                name = f"v.{a}.{b}"
            contact[a, b] = name
            if name not in nodes:
                nodes.append(name)
    targets = [f"t.{a}" for a in g.nodes]
    edges, groups, decode = [], [], {}
    for gi, a in enumerate(g.nodes):
        members = tuple(contact[a, b] for b in g.nodes if b != a)
        edges.extend((m, f"t.{a}") for m in members)
        groups.append(InputGroup(members, (f"t.{a}",)))
        decode[str(gi)] = [a]
    dag = Dag(tuple(nodes + targets), tuple(edges), f"hampath_N{N}_M{M}", tuple(groups),
              {"kind": "hampath"})
    R = N
    if model.variant in (Variant.BASE, Variant.COMPCOST):
        dag = attach_h2c(dag, R, per_source_copies=True)
        # keep only the target groups: the oracle visits those
        dag = Dag(dag.nodes, dag.edges, dag.name, tuple(groups), dag.meta)
    dag = dag.with_meta(feasibility_threshold=feasibility_threshold(dag))
    key = model.variant.value
    thr = hampath_thresholds(N, M, R, model.epsilon)[key]
    offset, adj, apart = hampath_step_costs(N, M, R, model.variant, model.epsilon)
    params = {
        "N": N, "M": M, "model": key, "epsilon": str(model.epsilon),
        "stated_threshold": hampath_stated_thresholds(N, M, R, model.epsilon)[key],
        "order_offset": offset, "step_adjacent": adj, "step_apart": apart,
    }
    return ReductionInstance(dag, R, model, thr, Kind.HAMPATH, decode, params, g)


def target_compute_order(trace: Trace, targets: Iterable[str]) -> list[str]:
    targets = set(targets)
    order = []
    for m in trace:
        if m.kind is MoveKind.COMPUTE and m.node in targets and m.node not in order:
            order.append(m.node)
    return order


def decode_hampath(instance: ReductionInstance, trace: Trace) -> list[str] | None:
    """Graph-node order in which the trace first computes the targets, or
    ``None`` when the trace is over the instance's cost threshold."""
    report = validate_trace(instance.dag, instance.model, instance.R, trace)
    if instance.threshold is not None and report.total > instance.threshold:
        return None
    tnode = {instance.group(gid).targets[0]: instance.decode_meta[gid][0]
             for gid in instance.group_ids}
    order = target_compute_order(trace, tnode)
    if len(order) != len(tnode):
        missing = sorted(set(tnode) - set(order))
        raise MalformedTrace(f"targets never computed: {missing}")
    return [tnode[t] for t in order]


def hampath_trace(instance: ReductionInstance, path: Sequence[str]) -> Trace:
    """Pebbling that visits the target groups in the order of ``path``."""
    gid_of = {instance.decode_meta[gid][0]: gid for gid in instance.group_ids}
    order = [instance.group(gid_of[a]).targets[0] for a in path]
    return run_order(instance.dag, instance.model, instance.R, _with_ancestors(instance.dag, order))


def _with_ancestors(dag: Dag, order: Sequence[str]) -> list[str]:
    """Expand ``order`` so every node is preceded by its uncomputed ancestors."""
    full: list[str] = []
    seen: set[str] = set()

    def visit(v):
        if v in seen:
            return
        seen.add(v)
        for u in dag.preds[v]:
            visit(u)
        full.append(v)

    for v in order:
        visit(v)
    return full


# -- vertex cover -----------------------------------------------------------

VC_TRACE_SLACK = 2


def reduce_vertex_cover(g: UndirectedGraph, k: int) -> ReductionInstance:
    """ONESHOT instance whose cheap pebblings expose small vertex covers.

    Node ``a`` gets a first-level group ``V1.<a>`` (targets ``t1.<a>.<b>`` for
    every other ``b``) and a second-level group ``V2.<a>`` (target
    ``t2.<a>``), both of size ``k`` and sharing ``k - N`` common nodes.
    ``t1.<a>.<b>`` sits in ``V2.<b>`` whenever ``a`` and ``b`` are adjacent.
    """
    N = g.N
    if k <= N:
        raise KTooSmall(f"k={k} must exceed N={N}")
    if k <= N * N:
        log.warning("k=%d is not much larger than N^2=%d; pebbling cost may not track the cover", k, N * N)
    kp = k - N
    nodes, edges, groups = [], [], []
    decode, first, second, level = {}, {}, {}, {}
    for a in g.nodes:
        nodes.extend(f"c.{a}.{i}" for i in range(1, kp + 1))
    for a in g.nodes:
        nodes.extend(f"t1.{a}.{b}" for b in g.nodes if b != a)
    for a in g.nodes:
        common = [f"c.{a}.{i}" for i in range(1, kp + 1)]
        f1 = [f"f1.{a}.{i}" for i in range(1, k - kp + 1)]
        held = [f"t1.{b}.{a}" for b in g.nodes if b != a and g.adjacent(a, b)]
        f2 = [f"f2.{a}.{i}" for i in range(1, k - kp - len(held) + 1)]
        nodes.extend(f1 + f2)
        nodes.append(f"t2.{a}")
        t1s = tuple(f"t1.{a}.{b}" for b in g.nodes if b != a)
        v1 = tuple(common + f1)
        v2 = tuple(common + held + f2)
        for t in t1s:
            edges.extend((m, t) for m in v1)
        edges.extend((m, f"t2.{a}") for m in v2)
        g1, g2 = str(len(groups)), str(len(groups) + 1)
        groups.append(InputGroup(v1, t1s))
        groups.append(InputGroup(v2, (f"t2.{a}",)))
        decode[g1] = [a]
        decode[g2] = [a]
        first[a], second[a] = g1, g2
        level[g1], level[g2] = 1, 2
    dag = Dag(tuple(nodes), tuple(edges), f"vertexcover_N{N}_k{k}", tuple(groups),
              {"kind": "vertexcover"})
    dag = dag.with_meta(feasibility_threshold=feasibility_threshold(dag))
    params = {"k": k, "k_prime": kp, "N": N, "M": g.M, "first": first, "second": second,
              "level": level}
    return ReductionInstance(dag, k + 1, ModelSpec(Variant.ONESHOT), None,
                             Kind.VERTEX_COVER, decode, params, g)


def group_order_trace(instance: ReductionInstance, order: Sequence[str]) -> Trace:
    """Pebbling that visits the instance's groups in ``order`` (group ids)."""
    targets = []
    for gid in order:
        targets.extend(instance.group(gid).targets)
    if instance.kind is Kind.HAMPATH:
        targets = _with_ancestors(instance.dag, targets)
    return run_order(instance.dag, instance.model, instance.R, targets)


def canonical_vc_trace(instance: ReductionInstance, cover) -> Trace:
    """First-level groups of the cover, then both groups of every other node
    back to back, then the second-level groups of the cover."""
    g = instance.graph
    cover = set(cover)
    if not is_vertex_cover(g, cover):
        raise NotACover(f"{sorted(cover)} leaves an edge uncovered")
    first, second = instance.params["first"], instance.params["second"]
    vc = [a for a in g.nodes if a in cover]
    rest = [a for a in g.nodes if a not in cover]
    order = [first[a] for a in vc]
    for a in rest:
        order += [first[a], second[a]]
    order += [second[a] for a in vc]
    return group_order_trace(instance, order)


def vc_cost_bound(instance: ReductionInstance, cover_size: int) -> int:
    N, kp = instance.params["N"], instance.params["k_prime"]
    return 2 * kp * cover_size + VC_TRACE_SLACK * N * N


def group_visit_order(dag: Dag, model: ModelSpec, trace: Trace) -> list[int]:
    """Indices of groups in the order their members first become all red."""
    state = initial_state(dag, model)
    containing: dict[str, list[int]] = {}
    for gi, grp in enumerate(dag.groups):
        for m in grp.members:
            containing.setdefault(m, []).append(gi)
    order, seen = [], set()
    for m in trace:
        _apply(state, m)
        if state.status[m.node] is not Status.RED:
            continue
        for gi in containing.get(m.node, ()):
            if gi in seen:
                continue
            if all(state.status[u] is Status.RED for u in dag.groups[gi].members):
                seen.add(gi)
                order.append(gi)
    return order


def decode_vertex_cover(instance: ReductionInstance, trace: Trace) -> set[str]:
    """Nodes whose two groups are not visited back to back form a cover."""
    validate_trace(instance.dag, instance.model, instance.R, trace)
    order = [str(gi) for gi in group_visit_order(instance.dag, instance.model, trace)]
    if len(order) != len(instance.dag.groups):
        raise MalformedTrace("some input group never had all members red at once")
    pos = {gid: i for i, gid in enumerate(order)}
    first, second = instance.params["first"], instance.params["second"]
    return {a for a in instance.graph.nodes if abs(pos[first[a]] - pos[second[a]]) != 1}


# -- greedy grid ------------------------------------------------------------

def grid_cells(l: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, l + 1) for j in range(1, l + 2 - i)]


def gen_greedy_grid(l: int, k: int, k_prime: int, misguide: int = 1, entry: int = 0) -> Dag:
    """Grid of input groups that lures every greedy rule into a bad order.

    Groups sit at ``(i, j)`` with ``i + j <= l + 1``; each diagonal shares
    ``k_prime`` common nodes. Target ``t.i.j`` joins group ``(i, j+1)``. The
    top group of column ``j`` shares ``misguide`` nodes with the bottom group
    of column ``j - 1``. An entry group ``S0`` has one target in every bottom
    group and shares ``entry`` nodes with ``(l, 1)``; its target for column
    ``l`` sorts last, so a greedy run leaves it red. Fillers pad every group to
    ``k``; R = k + 1. Group labels live in ``meta['group.<idx>']``.
    """
    if l < 2:
        raise GeneratorError("need l >= 2")
    if not 0 < k_prime < k:
        raise ParamsTooTight("need 0 < k_prime < k")
    cells = grid_cells(l)
    common = {x: [f"c.{x}.{i}" for i in range(1, k_prime + 1)] for x in range(2, l + 2)}
    s0_targets = {i: f"s0.t.{i:03d}" for i in range(1, l + 1)}
    top = {j: (j, l + 1 - j) for j in range(1, l + 1)}
    extra: dict[tuple[int, int], list[str]] = {c: [] for c in cells}
    s0_members: list[str] = []
    for (i, j) in cells:
        if j == 1:
            extra[i, j].append(s0_targets[i])
        else:
            extra[i, j].append(f"t.{i}.{j - 1}")
    for j in range(2, l + 1):
        shared = [f"m.{j}.{x}" for x in range(1, misguide + 1)]
        extra[top[j]].extend(shared)
        extra[j - 1, 1].extend(shared)
    entry_nodes = [f"e.{x}" for x in range(1, entry + 1)]
    extra[l, 1].extend(entry_nodes)
    s0_members.extend(entry_nodes)
    budget = k - k_prime
    for c in cells:
        if len(extra[c]) > budget:
            raise ParamsTooTight(
                f"group {c} needs {len(extra[c])} extra nodes but k - k_prime = {budget}")
    members = {}
    for (i, j) in cells:
        fill = [f"f.{i}.{j}.{x}" for x in range(1, budget - len(extra[i, j]) + 1)]
        members[i, j] = common[i + j] + extra[i, j] + fill
    s0_members += [f"f.s0.{x}" for x in range(1, k - len(s0_members) + 1)]

    nodes: dict[str, None] = {}
    for v in s0_members:
        nodes[v] = None
    for x in sorted(common):
        for v in common[x]:
            nodes[v] = None
    for c in cells:
        for v in members[c]:
            nodes.setdefault(v, None)
    for i in range(1, l + 1):
        nodes[s0_targets[i]] = None
    for (i, j) in cells:
        nodes[f"t.{i}.{j}"] = None
    edges, groups, meta = [], [], {}
    s0_t = tuple(s0_targets[i] for i in range(1, l + 1))
    for t in s0_t:
        edges.extend((m, t) for m in s0_members)
    groups.append(InputGroup(tuple(s0_members), s0_t))
    meta["group.0"] = "S0"
    for gi, (i, j) in enumerate(cells, start=1):
        t = f"t.{i}.{j}"
        edges.extend((m, t) for m in members[i, j])
        groups.append(InputGroup(tuple(members[i, j]), (t,)))
        meta[f"group.{gi}"] = f"{i},{j}"
    meta.update({"l": str(l), "k": str(k), "k_prime": str(k_prime), "R": str(k + 1),
                 "misguide": str(misguide), "entry": str(entry)})
    dag = Dag(tuple(nodes), tuple(edges), f"greedy_grid_l{l}_k{k}_kp{k_prime}", tuple(groups), meta)
    return dag.with_meta(feasibility_threshold=feasibility_threshold(dag))


def grid_group_labels(dag: Dag) -> list[str]:
    return [dag.meta[f"group.{gi}"] for gi in range(len(dag.groups))]


def diagonal_order(l: int) -> list[str]:
    """Visiting order that walks each diagonal from its bottom group up."""
    out = ["S0"]
    for i in range(1, l + 1):
        out += [f"{i - j + 1},{j}" for j in range(1, i + 1)]
    return out


def column_order(l: int) -> list[str]:
    """Order a greedy run takes: columns right to left, each bottom to top."""
    out = ["S0", f"{l},1"]
    for i in range(l - 1, 0, -1):
        out += [f"{i},{j}" for j in range(1, l + 2 - i)]
    return out


def grid_order_trace(dag: Dag, order: Sequence[str], model: ModelSpec | None = None) -> Trace:
    model = model or ModelSpec(Variant.ONESHOT)
    idx = {lab: gi for gi, lab in enumerate(grid_group_labels(dag))}
    targets = []
    for lab in order:
        targets.extend(dag.groups[idx[lab]].targets)
    return run_order(dag, model, int(dag.meta["R"]), targets)
