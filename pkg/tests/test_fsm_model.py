import pytest

from wsrel.fsm_model import Edge, ReliabilityFsm, UnknownNodeError, node_fault_factor, validate
from wsrel.profile_io import bundled_path, load_bundled_model

from conftest import model_from

BUNDLED_MODELS = ["pascal_triangle", "direct_edge", "self_loop", "two_node", "always_fault"]


def rules(violations):
    return {v.rule for v in violations}


def test_minimal_model_is_valid():
    assert validate(model_from("n", [("n", "C", 1.0)])) == []


def test_row_sum_violation_names_node():
    v = validate(model_from("n", [("n", "C", 0.6), ("n", "F", 0.3)]))
    assert [x.rule for x in v] == ["row-sum"]
    assert v[0].location == "n"
    assert "row sum != 1 at n" in v[0].message


def test_closed_cycle_has_no_absorbing_path():
    v = validate(model_from("a", [("a", "b", 1.0), ("b", "a", 1.0)]))
    msgs = [x.message for x in v if x.rule == "absorbing-path"]
    assert msgs == ["no absorbing path from a", "no absorbing path from b"]


def test_probability_one_self_loop_rejected():
    m = ReliabilityFsm(["n", "m"], [Edge("n", "n", 1.0), Edge("m", "C", 1.0)], "n")
    assert rules(validate(m)) == {"absorbing-path"}


def test_zero_probability_edge_does_not_count_for_reachability():
    m = ReliabilityFsm(["a"], [Edge("a", "a", 1.0), Edge("a", "C", 0.0)], "a")
    assert "absorbing-path" in rules(validate(m))


@pytest.mark.parametrize(
    "model, rule",
    [
        (ReliabilityFsm(["n"], [Edge("n", "C", 1.0)], "x"), "start-node"),
        (ReliabilityFsm(["n", "C"], [Edge("n", "C", 1.0)], "n"), "reserved-label"),
        (ReliabilityFsm(["n", "n"], [Edge("n", "C", 1.0)], "n"), "duplicate-node"),
        (ReliabilityFsm(["n"], [Edge("n", "C", 0.5), Edge("n", "C", 0.5)], "n"), "duplicate-edge"),
        (ReliabilityFsm(["n"], [Edge("n", "C", 1.0), Edge("C", "n", 1.0)], "n"), "absorbing-source"),
        (ReliabilityFsm(["n"], [Edge("n", "zz", 1.0)], "n"), "unknown-node"),
        (ReliabilityFsm(["n"], [Edge("n", "C", 1.3), Edge("n", "F", -0.3)], "n"), "probability-range"),
        (ReliabilityFsm([""], [], ""), "node-label"),
    ],
)
def test_each_rule_is_reported(model, rule):
    assert rule in rules(validate(model))


def test_row_sum_tolerance_is_1e_9():
    ok = model_from("n", [("n", "C", 0.5), ("n", "F", 0.5 + 5e-10)])
    bad = model_from("n", [("n", "C", 0.5), ("n", "F", 0.5 + 5e-9)])
    assert validate(ok) == []
    assert rules(validate(bad)) == {"row-sum"}


@pytest.mark.parametrize("name", BUNDLED_MODELS)
def test_bundled_models_validate(name):
    assert bundled_path(name).is_file()
    assert validate(load_bundled_model(name).model) == []


def test_fault_factor():
    assert node_fault_factor(model_from("n", [("n", "C", 0.9), ("n", "F", 0.1)]), "n") == 0.1
    assert node_fault_factor(model_from("n", [("n", "C", 1.0)]), "n") == 0.0
    assert node_fault_factor(model_from("n", [("n", "n", 0.1), ("n", "C", 0.8), ("n", "F", 0.1)]), "n") == 0.1


def test_fault_factor_unknown_node():
    with pytest.raises(UnknownNodeError):
        node_fault_factor(model_from("n", [("n", "C", 1.0)]), "q")


def test_pascal_nodes_and_fault_factors():
    m = load_bundled_model("pascal_triangle").model
    assert set(m.nodes) == {"W1", "F2", "S3", "F4", "I5", "E6", "S7", "S8"}
    assert m.start == "W1"
    for n in m.nodes:
        assert node_fault_factor(m, n) == 0.02
