"""Red-blue pebble game: rules, exact and heuristic solvers, hardness gadgets."""
from .dag import (
    Dag, DagError, InputGroup, add_universal_source, attach_h2c, cd_transform,
    dag_from_edges, feasibility_threshold, load_dag, parse_dag, save_dag, serialize_dag,
)
from .engine import (
    CostReport, Finish, IllegalMove, IllegalMoveAt, GoalNotReached, ModelSpec, Move,
    MoveKind, PebbleState, Start, Status, Trace, Variant, apply_move, initial_state,
    is_goal, legal_moves, length_bound, length_bound_check, validate_trace,
)
from .solvers import (
    GreedyPolicy, GreedyRule, Infeasible, OptimalResult, SearchLimits, greedy_pebble,
    group_order_search, naive_topological, solve_exact, tradeoff_curve,
)

__all__ = [
    "Dag", "DagError", "InputGroup", "add_universal_source", "attach_h2c", "cd_transform",
    "dag_from_edges", "feasibility_threshold", "load_dag", "parse_dag", "save_dag",
    "serialize_dag", "CostReport", "Finish", "IllegalMove", "IllegalMoveAt",
    "GoalNotReached", "ModelSpec", "Move", "MoveKind", "PebbleState", "Start", "Status",
    "Trace", "Variant", "apply_move", "initial_state", "is_goal", "legal_moves",
    "length_bound", "length_bound_check", "validate_trace", "GreedyPolicy", "GreedyRule",
    "Infeasible", "OptimalResult", "SearchLimits", "greedy_pebble", "group_order_search",
    "naive_topological", "solve_exact", "tradeoff_curve",
]
