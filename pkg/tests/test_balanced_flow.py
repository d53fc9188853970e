import random

import pytest

from rankfair import fixtures as fx
from rankfair.balanced_flow import (balanced_max_flow, build_flow_network,
                                    flow_to_allocation, leximin_flow_allocation,
                                    network_dump)
from rankfair.core import InapplicableAlgorithm, Instance, validate_allocation, values_vector
from rankfair.oracle import oracle_optimal
from rankfair.valuations import BinaryAssignmentValuation

from randgen import random_oxs_instance


def test_two_group_pinned_witness():
    inst = fx.two_group_matching_instance()
    alloc, network = leximin_flow_allocation(inst)
    assert alloc.bundle("g1") == frozenset({"o1", "o2", "o3"})
    assert alloc.bundle("g2") == frozenset({"o4", "o5", "o6"})
    assert not alloc.withheld
    assert network.out_flows() == {"g1": 3, "g2": 3}


def test_four_item_pair_balances_to_two_two():
    inst = fx.ef1_not_efx0_instance()
    alloc, network = leximin_flow_allocation(inst)
    assert tuple(sorted(values_vector(inst, alloc))) == (2, 2)
    assert network.out_flows() == {"g1": 2, "g2": 2}


def test_empty_adjacency_withholds_everything():
    inst = Instance(agents=("g1",), items=("o1", "o2"),
                    valuations={"g1": BinaryAssignmentValuation({"m": set()})})
    alloc, network = leximin_flow_allocation(inst)
    assert alloc.bundle("g1") == frozenset()
    assert alloc.withheld == frozenset({"o1", "o2"})
    assert network.out_flows().get("g1", 0) == 0


def test_single_unit_path():
    inst = Instance(agents=("g1",), items=("o1",),
                    valuations={"g1": BinaryAssignmentValuation({"m": {"o1"}})})
    alloc, network = leximin_flow_allocation(inst)
    assert alloc.bundle("g1") == frozenset({"o1"})
    assert network.out_flows() == {"g1": 1}


def test_non_binary_weights_are_refused():
    inst = fx.usw_not_ef1_instance()
    with pytest.raises(InapplicableAlgorithm):
        leximin_flow_allocation(inst)
    with pytest.raises(InapplicableAlgorithm):
        build_flow_network(inst)


def test_flow_vector_equals_oracle_leximin_fuzz():
    rng = random.Random(424242)
    for _ in range(80):
        inst = random_oxs_instance(rng)
        alloc, network = leximin_flow_allocation(inst)
        assert not validate_allocation(inst, alloc)
        got = tuple(sorted(values_vector(inst, alloc)))
        want = tuple(sorted(oracle_optimal(inst, "leximin").optimal_vector))
        assert got == want
        out = network.out_flows()
        for agent in inst.agents:
            assert out.get(agent, 0) == inst.value(agent, alloc.bundle(agent))


def test_network_dump_edge_list_format():
    inst = fx.two_group_matching_instance()
    _, network = leximin_flow_allocation(inst)
    lines = network_dump(network).splitlines()
    assert lines[0] == "tail\thead\tcapacity\tcost\tflow"
    body = [line.split("\t") for line in lines[1:]]
    assert all(len(row) == 5 for row in body)
    # source rows carry the out-flow per group
    source_rows = [row for row in body if row[0] == "s"]
    assert sorted(row[1] for row in source_rows) == ["g/g1", "g/g2"]
    assert sorted(int(row[4]) for row in source_rows) == [3, 3]


def test_flow_is_deterministic():
    inst = fx.two_group_matching_instance()
    first, _ = leximin_flow_allocation(inst)
    for _ in range(3):
        again, _ = leximin_flow_allocation(inst)
        assert again.bundles == first.bundles
