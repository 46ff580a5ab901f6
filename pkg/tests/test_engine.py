from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rbpebble import Dag, dag_from_edges
from rbpebble.engine import (
    CostReport, Finish, GoalNotReached, IllegalMove, IllegalMoveAt, ModelSpec, Move,
    MoveKind, PebbleState, Start, Status, Trace, Variant, apply_move, compute, delete,
    initial_state, is_goal, legal_moves, length_bound, length_bound_check, load,
    parse_fraction, store, validate_trace,
)
from rbpebble.solvers import naive_topological
from strategies import dags

CHAIN = dag_from_edges([("a", "b"), ("b", "c")])
ONESHOT = ModelSpec(Variant.ONESHOT)
NODEL = ModelSpec(Variant.NODEL)


def state(**status):
    st_ = {v: Status.EMPTY for v in CHAIN.nodes}
    st_.update({k: Status[v] for k, v in status.items()})
    return PebbleState(st_, frozenset(k for k in status),
                       sum(v == "RED" for v in status.values()))


@pytest.mark.parametrize("text", ["0/3", "3/2", "1/1", "1", "a/b", "-1/2", "1/0"])
def test_epsilon_rejects(text):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_fraction(text)


def test_epsilon_exact():
    assert parse_fraction("1/100") == Fraction(1, 100)
    assert ModelSpec(Variant.COMPCOST).epsilon == Fraction(1, 100)


def test_initial_state_conventions():
    assert all(s is Status.EMPTY for s in initial_state(CHAIN, ONESHOT).status.values())
    blue = initial_state(CHAIN, ModelSpec(start=Start.BLUE_SOURCES))
    assert blue.status["a"] is Status.BLUE and blue.computed == {"a"}
    two = initial_state(Dag(("x", "y"), ()), ModelSpec(start=Start.BLUE_SOURCES))
    assert set(two.status.values()) == {Status.BLUE}


def test_legal_moves_from_empty():
    assert legal_moves(CHAIN, ONESHOT, 2, initial_state(CHAIN, ONESHOT)) == {compute("a")}


def test_legal_moves_full_budget():
    moves = legal_moves(CHAIN, ONESHOT, 2, state(a="RED", b="RED"))
    assert moves == {store("a"), store("b"), delete("a"), delete("b")}


@given(dags(max_nodes=5), st.data())
def test_nodel_never_offers_delete(dag, data):
    s = initial_state(dag, NODEL)
    R = max(len(p) for p in dag.preds.values()) + 1
    for _ in range(8):
        moves = sorted(legal_moves(dag, NODEL, R, s), key=lambda m: (m.kind.value, m.node))
        assert all(m.kind is not MoveKind.DELETE for m in moves)
        if not moves:
            break
        s, _ = apply_move(dag, NODEL, R, s, data.draw(st.sampled_from(moves)))


def test_apply_costs():
    s, c = apply_move(CHAIN, ONESHOT, 2, initial_state(CHAIN, ONESHOT), compute("a"))
    assert s.status["a"] is Status.RED and c == 0
    comp = ModelSpec(Variant.COMPCOST)
    _, c = apply_move(CHAIN, comp, 2, initial_state(CHAIN, comp), compute("a"))
    assert c == Fraction(1, 100)


@pytest.mark.parametrize("model,st_,move,reason", [
    (NODEL, dict(a="RED"), delete("a"), "DeleteForbidden"),
    (ONESHOT, {}, load("a"), "NotBlue"),
    (ONESHOT, {}, store("a"), "NotRed"),
    (ONESHOT, {}, delete("a"), "NoPebble"),
    (ONESHOT, {}, compute("b"), "InputsNotRed"),
    (ONESHOT, dict(a="RED", b="RED"), compute("c"), "RedBudgetExceeded"),
    (ONESHOT, dict(a="BLUE"), compute("a"), "RecomputeForbidden"),
    (ModelSpec(Variant.BASE), dict(a="RED"), compute("a"), "AlreadyRed"),
    (ONESHOT, {}, compute("zz"), "UnknownNode"),
])
def test_illegal_moves(model, st_, move, reason):
    with pytest.raises(IllegalMove) as exc:
        apply_move(CHAIN, model, 2, state(**st_), move)
    assert exc.value.reason == reason


def test_recompute_over_blue_allowed_outside_oneshot():
    for variant in (Variant.BASE, Variant.NODEL, Variant.COMPCOST):
        s, _ = apply_move(CHAIN, ModelSpec(variant), 2, state(a="BLUE"), compute("a"))
        assert s.status["a"] is Status.RED and s.red_count == 1


def test_blue_sources_not_computable():
    m = ModelSpec(start=Start.BLUE_SOURCES)
    with pytest.raises(IllegalMove) as exc:
        apply_move(CHAIN, m, 2, initial_state(CHAIN, m), compute("a"))
    assert exc.value.reason == "SourceNotComputable"


def test_goal_conventions():
    s = state(a="BLUE", b="BLUE", c="RED")
    assert is_goal(CHAIN, ONESHOT, s)
    assert not is_goal(CHAIN, ModelSpec(finish=Finish.BLUE_ON_SINKS), s)
    assert not is_goal(CHAIN, ONESHOT, initial_state(CHAIN, ONESHOT))


def test_validate_single_compute():
    rep = validate_trace(Dag(("a",), ()), ONESHOT, 1, [compute("a")])
    assert rep == CostReport(0, 0, 1, 0, Fraction(0))


def test_validate_reports_index():
    with pytest.raises(IllegalMoveAt) as exc:
        validate_trace(dag_from_edges([("a", "b")]), NODEL, 2, [compute("b")])
    assert exc.value.index == 0 and exc.value.reason == "InputsNotRed"


def test_validate_nodel_chain():
    d = dag_from_edges([("a", "b"), ("b", "c"), ("c", "d")])
    tr = [compute("a"), compute("b"), store("a"), compute("c"), store("b"), compute("d")]
    rep = validate_trace(d, NODEL, 2, tr)
    assert rep.total == 2 == d.n - 2


def test_validate_goal_missing():
    with pytest.raises(GoalNotReached):
        validate_trace(CHAIN, ONESHOT, 2, [compute("a")])


def test_length_bound():
    tr = Trace([compute("a"), compute("b"), delete("a"), compute("c")])
    assert validate_trace(CHAIN, ONESHOT, 2, tr).total == 0
    assert length_bound_check(CHAIN, ONESHOT, tr)
    bound = length_bound(CHAIN, ONESHOT)
    padded = Trace(tr.moves[:-1] + [store("b"), load("b")] * int(bound) + tr.moves[-1:])
    validate_trace(CHAIN, ONESHOT, 2, padded)
    assert not length_bound_check(CHAIN, ONESHOT, padded)
    assert length_bound(CHAIN, ModelSpec(Variant.BASE)) is None


@given(dags(max_nodes=6, max_indegree=2), st.sampled_from(list(Variant)))
def test_trace_invariants(dag, variant):
    model = ModelSpec(variant)
    R = 3
    tr = naive_topological(dag, model, R)
    s = initial_state(dag, model)
    for m in tr:
        s, _ = apply_move(dag, model, R, s, m)
        assert s.red_count <= R
        assert s.red_count == sum(v is Status.RED for v in s.status.values())
    rep = validate_trace(dag, model, R, tr)
    assert rep.total == tr.cost(model)
    if variant is Variant.ONESHOT:
        computes = [m.node for m in tr if m.kind is MoveKind.COMPUTE]
        assert len(computes) == len(set(computes))
    if variant is Variant.NODEL:
        assert rep.deletes == 0
    assert validate_trace(dag, model, R, tr).to_json() == rep.to_json()


def test_jsonl_and_report_round_trip():
    tr = Trace([compute("a"), store("a"), load("a")])
    assert Trace.from_jsonl(tr.to_jsonl()).moves == tr.moves
    rep = CostReport(1, 1, 1, 0, Fraction(201, 100))
    assert CostReport.from_dict(rep.to_dict()) == rep
    assert Move.from_dict({"op": "delete", "node": "x"}) == delete("x")
