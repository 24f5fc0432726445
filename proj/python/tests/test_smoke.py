# Copyright 2026 The lwsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import math

import numpy as np
import pytest

import lwsim


def test_graph_roundtrip_and_generators():
    g = lwsim.Graph(4, [(0, 1), (1, 2), (2, 3)])
    assert g.num_vertices == 4
    assert g.num_edges == 3
    assert g.edges() == [(0, 1), (1, 2), (2, 3)]
    assert g.neighbors(1) == [0, 2]
    assert g.to_edge_list(root=0).splitlines()[0] == "n 4 root 0"
    er = lwsim.erdos_renyi(200, 0.02, seed=3)
    assert er == lwsim.erdos_renyi(200, 0.02, seed=3)
    assert lwsim.gnm(50, 60, seed=1).num_edges == 60
    assert all(d == 3 for d in lwsim.random_regular(20, 3, seed=2).degrees())
    box, root = lwsim.lattice_box(2, 2)
    assert box.num_vertices == 25 and box.degree(root) == 4
    tree, _ = lwsim.regular_tree(3, 4)
    assert tree.num_vertices == 1 + 3 * (2**4 - 1)


def test_invalid_input_raises_value_error():
    with pytest.raises(ValueError):
        lwsim.Graph(3, [(0, 0)])
    with pytest.raises(ValueError):
        lwsim.survival_prob("binomial:3")


def test_canonical_codes_are_isomorphism_invariant():
    a = lwsim.Graph(4, [(0, 1), (0, 2), (0, 3)])
    b = lwsim.Graph(4, [(3, 0), (3, 1), (3, 2)])
    assert lwsim.canonical_code(a, 0) == lwsim.canonical_code(b, 3)
    assert lwsim.canonical_code(a, 0) != lwsim.canonical_code(a, 1)
    box, root = lwsim.lattice_box(2, 5)
    assert lwsim.ball_code(box, root, 2)[:1] == b"G"


def test_limit_tree_quantities():
    assert lwsim.survival_prob("poisson:2") == pytest.approx(0.7968121300200202, abs=1e-9)
    t = lwsim.poisson_dual(2.0)
    assert t * math.exp(-t) == pytest.approx(2 * math.exp(-2), abs=1e-15)
    rep = lwsim.duality("poisson:2")
    assert rep["dual_theta"] == pytest.approx(t, abs=1e-8)
    assert sum(rep["dual"]) == pytest.approx(1.0, abs=1e-12)


def test_simulation_shapes_and_determinism():
    g = lwsim.erdos_renyi(100, 0.03, seed=5)
    x0 = [float(i % 2) for i in range(100)]
    a = lwsim.simulate(g, x0, model="voter", steps=4, seed=9)
    b = lwsim.simulate(g, x0, model="voter", steps=4, seed=9)
    assert a.shape == (100, 5, 1)
    np.testing.assert_array_equal(a, b)
    assert set(np.unique(a)) <= {0.0, 1.0}
    k2 = lwsim.Graph(2, [(0, 1)])
    y = lwsim.simulate(k2, [1.0, 0.0], model="consensus_sde", params={"sigma": 0.0},
                       t=1.0, dt=0.01)
    assert y.shape == (2, 101, 1)
    assert y[0, -1, 0] == pytest.approx(0.5 + 0.5 * math.exp(-2), abs=0.05)


def test_run_experiment_and_config_errors():
    passed, summary = lwsim.run_experiment("integrator-check", seed=1)
    assert passed and summary["pass"]
    assert summary["experiment"] == "integrator-check"
    cfg = lwsim.default_config("duality")
    assert cfg["theta"] == [1.5, 2.0, 3.0]
    passed, summary = lwsim.run_experiment("duality", {"theta": [2.0]}, seed=1)
    assert passed
    with pytest.raises(ValueError):
        lwsim.run_experiment("duality", {"thetaa": [2.0]})
    with pytest.raises(ValueError):
        lwsim.run_experiment("no-such-experiment")
