import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rbpebble.dag import parse_dag, serialize_dag
from rbpebble.engine import ModelSpec, Trace, Variant, validate_trace
from rbpebble.generators import (
    KTooSmall, MalformedTrace, NotACover, ParamsTooTight, ReductionInstance, UndirectedGraph,
    canonical_vc_trace, column_order, decode_hampath, decode_vertex_cover, diagonal_order,
    gen_greedy_grid, gen_tradeoff_dag, grid_cells, grid_group_labels, group_order_trace,
    has_hamiltonian_path, hampath_trace, is_vertex_cover, reduce_hampath,
    reduce_vertex_cover, vc_cost_bound,
)
from rbpebble.solvers import solve_exact

NODEL = ModelSpec(Variant.NODEL)


def graph(nodes, edges):
    return UndirectedGraph(tuple(nodes), frozenset(frozenset(e) for e in edges))


P3 = graph("abc", ["ab", "bc"])
K3 = graph("abc", ["ab", "bc", "ac"])


@st.composite
def graphs(draw, min_n=2, max_n=4):
    n = draw(st.integers(min_n, max_n))
    nodes = "abcde"[:n]
    pairs = list(itertools.combinations(nodes, 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return graph(nodes, [p for p, k in zip(pairs, keep) if k])


def test_tradeoff_shape():
    d = gen_tradeoff_dag(2, 5)
    assert d.n == 9 and max(len(p) for p in d.preds.values()) == 3
    assert d.preds["c1"] == ("a1", "a2")
    assert set(d.preds["c2"]) == {"c1", "b1", "b2"}


def test_tradeoff_endpoints():
    d = gen_tradeoff_dag(2, 5)
    assert solve_exact(d, ModelSpec(), 6).cost == 0


@pytest.mark.parametrize("g,n", [(P3, 7), (K3, 6), (graph("ab", []), 4)])
def test_hampath_node_counts(g, n):
    assert reduce_hampath(g, NODEL).dag.n == n


def test_hampath_thresholds_isolated_pair():
    inst = reduce_hampath(graph("ab", []), NODEL)
    assert inst.threshold == 1
    assert inst.params["stated_threshold"] == 2
    assert solve_exact(inst.dag, inst.model, inst.R).cost == 2


def test_hampath_base_uses_private_gadgets():
    inst = reduce_hampath(graph("abcd", ["ab"]), ModelSpec(Variant.BASE))
    assert "h2c.v.a.b.s" in inst.dag.nodes and "h2c.v.c.d.s" in inst.dag.nodes
    assert inst.R == 4


def test_decode_hampath_path():
    inst = reduce_hampath(P3, NODEL)
    res = solve_exact(inst.dag, inst.model, inst.R)
    assert decode_hampath(inst, res.trace) in (list("abc"), list("cba"))


def test_decode_hampath_triangle():
    inst = reduce_hampath(K3, NODEL)
    res = solve_exact(inst.dag, inst.model, inst.R)
    assert sorted(decode_hampath(inst, res.trace)) == list("abc")


def test_decode_hampath_over_threshold():
    inst = reduce_hampath(P3, NODEL)
    tr = hampath_trace(inst, list("acb"))
    assert validate_trace(inst.dag, inst.model, inst.R, tr).total > inst.threshold
    assert decode_hampath(inst, tr) is None


@settings(max_examples=30)
@given(graphs(), st.sampled_from([Variant.NODEL, Variant.ONESHOT]))
def test_hampath_oracle_matches_traces(g, variant):
    inst = reduce_hampath(g, ModelSpec(variant))
    for perm in itertools.permutations(inst.group_ids):
        tr = group_order_trace(inst, perm)
        assert validate_trace(inst.dag, inst.model, inst.R, tr).total == inst.order_cost(perm)


def test_vc_shapes():
    inst = reduce_vertex_cover(graph("ab", ["ab"]), 4)
    assert len(inst.dag.groups) == 4 and inst.R == 5
    assert all(len(g.members) == 4 for g in inst.dag.groups)
    assert inst.params["k_prime"] == 2
    path = reduce_vertex_cover(P3, 10)
    assert "t1.a.c" in path.dag.sinks and "t1.a.b" not in path.dag.sinks
    tri = reduce_vertex_cover(K3, 10)
    assert len(tri.dag.groups) == 6
    assert not any(s.startswith("t1.") for s in tri.dag.sinks)


def test_vc_k_too_small():
    with pytest.raises(KTooSmall):
        reduce_vertex_cover(P3, 3)


def test_vc_canonical_bounds():
    edge = reduce_vertex_cover(graph("ab", ["ab"]), 4)
    cost = validate_trace(edge.dag, edge.model, edge.R, canonical_vc_trace(edge, {"a"})).total
    assert cost <= vc_cost_bound(edge, 1) == 2 * 2 * 1 + 2 * 4
    tri = reduce_vertex_cover(K3, 10)
    cost = validate_trace(tri.dag, tri.model, tri.R, canonical_vc_trace(tri, {"a", "b"})).total
    assert cost <= 2 * 7 * 2 + 2 * 9


def test_vc_empty_graph_costs_nothing_extra():
    inst = reduce_vertex_cover(graph("abc", []), 5)
    tr = canonical_vc_trace(inst, set())
    order = [inst.group_ids[i] for i in range(0)] or None
    assert decode_vertex_cover(inst, tr) == set()
    assert order is None


def test_vc_rejects_non_cover():
    with pytest.raises(NotACover):
        canonical_vc_trace(reduce_vertex_cover(P3, 5), {"a"})


def test_vc_all_first_then_all_second():
    inst = reduce_vertex_cover(P3, 5)
    first, second = inst.params["first"], inst.params["second"]
    order = [first[a] for a in "abc"] + [second[a] for a in "abc"]
    assert decode_vertex_cover(inst, group_order_trace(inst, order)) == set("abc")


def test_vc_decode_needs_every_visit():
    inst = reduce_vertex_cover(graph("ab", ["ab"]), 4)
    with pytest.raises(Exception):
        decode_vertex_cover(inst, Trace([]))


@settings(max_examples=20)
@given(graphs(max_n=3), st.data())
def test_vc_decode_is_cover(g, data):
    inst = reduce_vertex_cover(g, 10)
    covers = [set(c) for r in range(g.N + 1) for c in itertools.combinations(g.nodes, r)
              if is_vertex_cover(g, c)]
    cover = data.draw(st.sampled_from(covers))
    decoded = decode_vertex_cover(inst, canonical_vc_trace(inst, cover))
    assert is_vertex_cover(g, decoded) and decoded <= cover


def test_grid_small():
    d = gen_greedy_grid(2, 6, 3)
    labels = grid_group_labels(d)
    assert labels == ["S0", "1,1", "1,2", "2,1"]
    g21, g12 = d.groups[labels.index("2,1")], d.groups[labels.index("1,2")]
    common = set(g21.members) & set(g12.members)
    assert {v for v in common if v.startswith("c.")} == {"c.3.1", "c.3.2", "c.3.3"}


@pytest.mark.parametrize("l,k,kp", [(2, 6, 3), (3, 6, 4), (4, 9, 6)])
def test_grid_invariants(l, k, kp):
    d = gen_greedy_grid(l, k, kp)
    assert all(len(g.members) == k for g in d.groups)
    assert d.meta["R"] == str(k + 1)
    idx = {lab: gi for gi, lab in enumerate(grid_group_labels(d))}
    for i, j in grid_cells(l):
        if (i, j + 1) in idx:
            upper = d.groups[idx[f"{i},{j + 1}"]]
            assert d.groups[idx[f"{i},{j}"]].targets[0] in upper.members


def test_grid_params_too_tight():
    with pytest.raises(ParamsTooTight):
        gen_greedy_grid(3, 6, 5)


def test_grid_orders():
    assert diagonal_order(3) == ["S0", "1,1", "2,1", "1,2", "3,1", "2,2", "1,3"]
    assert column_order(3) == ["S0", "3,1", "2,1", "2,2", "1,1", "1,2", "1,3"]


def test_instance_sidecar_round_trip(tmp_path):
    inst = reduce_hampath(graph("abcd", ["ab", "cd"]), ModelSpec(Variant.COMPCOST))
    inst.save(tmp_path / "d.json", tmp_path / "d.instance.json")
    dag = parse_dag((tmp_path / "d.json").read_text())
    back = ReductionInstance.from_parts(dag, json.loads((tmp_path / "d.instance.json").read_text()))
    assert back.threshold == inst.threshold and back.model == inst.model
    assert back.order_cost(back.group_ids) == inst.order_cost(inst.group_ids)
    assert serialize_dag(back.dag) == serialize_dag(inst.dag)


def test_graph_json_round_trip():
    assert UndirectedGraph.from_json(P3.to_json()) == P3
    assert has_hamiltonian_path(P3) and not has_hamiltonian_path(graph("abc", ["ab"]))


def test_malformed_hampath_trace():
    inst = reduce_hampath(graph("ab", ["ab"]), NODEL)
    tr = hampath_trace(inst, ["a", "b"])
    inst.threshold = Fraction(100)
    assert decode_hampath(inst, tr) == ["a", "b"]
    with pytest.raises(Exception):
        decode_hampath(inst, Trace(tr.moves[:2]))
    assert MalformedTrace
