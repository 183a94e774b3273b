import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quivrep import fmodule
from quivrep.quiver import (
    QuiverError,
    QuiverParseError,
    a2_quiver,
    all_paths,
    example_quiver,
    is_acyclic,
    is_left_rooted,
    loop_quiver,
    opposite,
    parse_quiver,
    path_ring,
    quiver,
    random_quiver,
    topological_order,
    two_cycle_quiver,
    v_sequence,
)


def _stages(q):
    return [set(s) for s in v_sequence(q).stages]


def test_v_sequence_example():
    seq = v_sequence(example_quiver())
    assert [set(s) for s in seq.stages[:-1]] == [set(), {"1", "2"}, {"1", "2", "3"}, {"1", "2", "3", "4"}]
    assert seq.left_rooted and seq.stabilization_index == 3
    assert seq.stage_of("3") == 2


def test_v_sequence_loop_and_a2():
    assert _stages(loop_quiver()) == [set(), set()]
    assert not is_left_rooted(loop_quiver())
    assert _stages(a2_quiver())[:-1] == [set(), {"1"}, {"1", "2"}]
    assert is_left_rooted(a2_quiver())
    assert not is_left_rooted(two_cycle_quiver())
    assert not is_acyclic(two_cycle_quiver())


def test_opposite():
    op = opposite(example_quiver())
    assert {(a.source, a.target) for a in op.arrows} == {("3", "1"), ("3", "2"), ("4", "3")}
    edgeless = quiver("123")
    assert opposite(edgeless) == edgeless
    assert [(a.source, a.target) for a in opposite(a2_quiver()).arrows] == [("2", "1")]
    assert opposite(opposite(example_quiver())) == example_quiver()


def test_parse_errors_report_lines():
    with pytest.raises(QuiverParseError) as err:
        parse_quiver("vertex 1\nvertex 2\narrow a 1 3\n")
    assert err.value.lineno == 3
    with pytest.raises(QuiverParseError):
        parse_quiver("vertex 1\nvertex 1\n")
    with pytest.raises(QuiverParseError):
        parse_quiver("vertex 1\nedge 1 2\n")
    q = parse_quiver("# comment\nvertex 1\nvertex 2\narrow a 1 2  # trailing\n")
    assert q == a2_quiver()


def test_topological_order_and_cycle_error():
    assert topological_order(example_quiver()) == ["1", "2", "3", "4"]
    with pytest.raises(QuiverError):
        topological_order(loop_quiver())


def test_path_ring_examples():
    a2 = path_ring(a2_quiver(), 2)
    assert a2.dimension == 3 and a2.order == 8
    app = path_ring(example_quiver(), 4)
    assert app.dimension == 9
    assert {str(p) for p in app.basis} == {"e1", "e2", "e3", "e4", "a", "b", "c", "ca", "cb"}
    edgeless = path_ring(quiver("12"), 3)
    assert edgeless.dimension == 2
    with pytest.raises(QuiverError):
        all_paths(loop_quiver())


def test_path_ring_is_unital_and_associative():
    for q in (a2_quiver(), example_quiver()):
        rq = path_ring(q, 4)
        one = rq.one()
        eye = np.eye(rq.dimension, dtype=np.int64)
        for u in eye:
            assert np.array_equal(rq.product(one, u), u)
            assert np.array_equal(rq.product(u, one), u)
        for u in eye:
            for v in eye:
                for w in eye:
                    assert np.array_equal(rq.product(rq.product(u, v), w), rq.product(u, rq.product(v, w)))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rooted_iff_acyclic(seed):
    q = random_quiver(np.random.default_rng(seed), 8)
    seq = v_sequence(q)
    assert seq.left_rooted == is_acyclic(q)
    for a, b in zip(seq.stages, seq.stages[1:]):
        assert a <= b


def test_path_ring_over_semisimple_ring_order():
    rq = path_ring(example_quiver(), fmodule.ring(6))
    assert rq.order == 6**9
