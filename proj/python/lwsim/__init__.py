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

"""Local weak convergence simulator."""

import json

from lwsim._lwsim import (
    Graph,
    NumericalError,
    ball_code,
    canonical_code,
    component_labels,
    duality,
    erdos_renyi,
    gnm,
    lattice_box,
    poisson_dual,
    random_regular,
    regular_tree,
    simulate,
    survival_prob,
    ugw_tree,
)
from lwsim._lwsim import default_config as _default_config
from lwsim._lwsim import run_experiment as _run_experiment

__all__ = [
    "Graph",
    "NumericalError",
    "ball_code",
    "canonical_code",
    "component_labels",
    "default_config",
    "duality",
    "erdos_renyi",
    "gnm",
    "lattice_box",
    "poisson_dual",
    "random_regular",
    "regular_tree",
    "run_experiment",
    "simulate",
    "survival_prob",
    "ugw_tree",
]


def default_config(name):
    """Default configuration of an experiment as a dict."""
    return json.loads(_default_config(name))


def run_experiment(name, config=None, seed=0, threads=1):
    """Runs an experiment; returns (passed, summary dict)."""
    passed, summary = _run_experiment(name, json.dumps(config or {}), seed, threads)
    return passed, json.loads(summary)
