#!/usr/bin/env python3
"""
Tests for random regular MaxCut instances and QAOA circuit generation
"""

import sys
from collections import Counter
from pathlib import Path

sys.path.append(str(Path(__file__).parent / "src"))

import pytest

from circuit_ir import CommutationClass
from ldpg import build_ldpg
from qaoa import (InfeasibleInstanceError, MaxCutInstance, QaoaParams, load_instance, qaoa_circuit,
                  random_regular_graph, save_instance)
from seeds import derive_seed

DATA = Path(__file__).parent / "data"


def degrees(instance):
    counts = Counter()
    for a, b in instance.edges:
        counts[a] += 1
        counts[b] += 1
    return counts


def test_four_node_cubic_graph_is_k4():
    for seed in range(5):
        instance = random_regular_graph(4, 3, seed=seed)
        assert instance.edges == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
        assert instance.edges == load_instance(DATA / "instances" / "k4.json").edges


@pytest.mark.parametrize("n,k", [(10, 3), (12, 3), (8, 4), (20, 3)])
def test_regular_graphs_are_simple_and_regular(n, k):
    for seed in range(10):
        instance = random_regular_graph(n, k, seed=seed)
        assert len(instance.edges) == n * k // 2
        assert len(set(instance.edges)) == len(instance.edges)
        assert all(a < b for a, b in instance.edges)
        assert set(degrees(instance).values()) == {k}


def test_sampling_is_deterministic_per_seed():
    assert random_regular_graph(16, 3, seed=7) == random_regular_graph(16, 3, seed=7)
    samples = {random_regular_graph(16, 3, seed=s).edges for s in range(10)}
    assert len(samples) > 1


@pytest.mark.parametrize("n,k", [(5, 3), (3, 3), (0, 0), (7, -1)])
def test_infeasible_instances(n, k):
    with pytest.raises(InfeasibleInstanceError):
        random_regular_graph(n, k, seed=0)


def test_connectivity_is_reported():
    assert random_regular_graph(4, 3, seed=0).connected
    two_triangles = MaxCutInstance(num_nodes=6, edges=((0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)), k=2)
    assert not two_triangles.connected
    assert two_triangles.to_document()["connected"] is False


def test_instance_validation():
    with pytest.raises(ValueError):
        MaxCutInstance(num_nodes=3, edges=((0, 1), (1, 0)), k=1)
    with pytest.raises(ValueError):
        MaxCutInstance(num_nodes=3, edges=((0, 3),), k=1)
    with pytest.raises(ValueError):
        MaxCutInstance.from_document({"edges": []})


def test_instance_file_roundtrip(tmp_path):
    instance = random_regular_graph(10, 3, seed=derive_seed(2021, 10, 0))
    path = tmp_path / "instance.json"
    save_instance(instance, path)
    assert load_instance(path) == instance


def test_k4_single_layer_circuit():
    instance = random_regular_graph(4, 3, seed=0)
    circuit = qaoa_circuit(instance, QaoaParams(depth=1))
    assert len(circuit.gates) == 10
    assert [g.kind.name for g in circuit.gates] == ["zz"] * 6 + ["rx"] * 4
    assert [g.qubits for g in circuit.gates[:6]] == list(instance.edges)
    assert circuit.gates[0].kind.commutation_class is CommutationClass.Z_DIAGONAL
    assert circuit.gates[6].kind.commutation_class is CommutationClass.X_AXIS


def test_cost_layer_only():
    instance = random_regular_graph(10, 3, seed=2)
    circuit = qaoa_circuit(instance, QaoaParams(depth=1), include_mixer=False)
    assert len(circuit.gates) == 15
    assert all(g.is_two_qubit for g in circuit.gates)


def test_two_layer_dependencies():
    instance = random_regular_graph(4, 3, seed=0)
    circuit = qaoa_circuit(instance, QaoaParams(depth=2, gammas=(0.1, 0.2), betas=(0.3, 0.4), t_x=1, t_zz=2))
    assert len(circuit.gates) == 20
    ldpg = build_ldpg(circuit)
    for zz in circuit.gates[:6]:
        assert ldpg.parents(zz.id) == []
    for q in range(4):
        rx = circuit.gates[6 + q]
        touching = [g.id for g in circuit.gates[:6] if q in g.qubits]
        assert ldpg.parents(rx.id) == touching
    for zz in circuit.gates[10:16]:
        assert ldpg.parents(zz.id) == sorted(6 + q for q in zz.qubits)
        assert zz.latency == 2 and zz.params == (0.2,)
    assert circuit.gates[16].params == (0.8,)


def test_params_validation():
    with pytest.raises(ValueError):
        QaoaParams(depth=0)
    with pytest.raises(ValueError):
        QaoaParams(depth=2, gammas=(0.1,))
    with pytest.raises(ValueError):
        QaoaParams(t_zz=0)
