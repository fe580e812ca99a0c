import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import random_equations
from rcpsolve.calculus import BWD, FWD, PropRule, concat_eq, equation
from rcpsolve.functions import ReplaceAll, Reverse
from rcpsolve.ordering import (
    FlowSequence,
    NotOrderable,
    build_splitting_graph,
    check_flow,
    has_chain,
    is_chain_free,
    is_straight_line,
    marking,
    order_report,
    try_marking,
)


def test_square_flow():
    eqs = [concat_eq(0, "y", "z", "u"), concat_eq(1, "y", "x", "x")]
    assert marking(eqs).as_pairs() == [(0, FWD), (1, BWD)]
    assert not is_straight_line(eqs)
    assert is_chain_free(eqs)


def test_three_equations_not_orderable():
    eqs = [concat_eq(0, "y", "z", "u"), concat_eq(1, "y", "x", "x"), concat_eq(2, "y", "u", "v")]
    with pytest.raises(NotOrderable) as err:
        marking(eqs)
    assert {e.id for e in err.value.stuck} == {0, 1, 2}
    assert is_chain_free(eqs) is False


def test_straight_line_chain():
    eqs = [equation(0, "y1", ReplaceAll("u", "A"), ["y"]), equation(1, "x", ReplaceAll("a", "T"), ["y1"])]
    assert is_straight_line(eqs)
    assert try_marking(eqs) is not None


def test_self_loop_is_a_chain():
    eqs = [concat_eq(0, "x", "a", "x", consts=[0])]
    assert has_chain(build_splitting_graph(eqs))
    assert try_marking(eqs) is None


def test_reverse_outside_graph():
    eqs = [equation(0, "y", Reverse(), ["x"])]
    assert is_chain_free(eqs) is None
    assert order_report(eqs).orderable


def test_report_json():
    eqs = [concat_eq(0, "y", "z", "u"), concat_eq(1, "y", "x", "x")]
    data = json.loads(order_report(eqs).to_json())
    assert data == {
        "verdict": "orderable",
        "flow": [[0, "fwd"], [1, "bwd"]],
        "stuck_equations": [],
        "straight_line": False,
        "chain_free": True,
    }


def test_check_flow_rejects_bad_order():
    eqs = [concat_eq(0, "y", "z", "u"), concat_eq(1, "y", "x", "x")]
    assert check_flow(eqs, marking(eqs))
    assert not check_flow(eqs, FlowSequence((PropRule(1, BWD), PropRule(0, FWD))))


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), nv=st.integers(2, 5), ne=st.integers(1, 4))
def test_marking_iff_chain_free(seed, nv, ne):
    eqs = random_equations(random.Random(seed), nv, ne, kinds=("concat", "transducer", "replaceall"))
    assert (try_marking(eqs) is not None) == is_chain_free(eqs)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), nv=st.integers(2, 5), ne=st.integers(1, 4))
def test_flow_respects_trigger_conditions(seed, nv, ne):
    eqs = random_equations(random.Random(seed), nv, ne)
    flow = try_marking(eqs)
    if flow is not None:
        assert check_flow(eqs, flow)
        assert sorted(r.eq for r in flow) == sorted(e.id for e in eqs)
    if is_straight_line(eqs):
        assert flow is not None
