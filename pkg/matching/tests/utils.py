"""Instances and helpers shared by the matching tests."""
import os
from unittest import skipUnless

import numpy as np

from matching.auction import feasibility_precheck
from matching.generators import GRAPH_MODELS, WEIGHT_MODELS, GenSpec, generate_instance
from matching.graph import build_graph

slow = skipUnless(os.environ.get("RUN_SLOW_TESTS"), "set RUN_SLOW_TESTS=1 to run timing checks")


def make_g0():
    """The 2x2 instance with optimum {u0v0, u1v1} of weight 2."""
    return build_graph(2, 2, [(0, 0, 1), (0, 1, 3), (1, 0, 2), (1, 1, 1)])


def make_single():
    return build_graph(1, 1, [(0, 0, 5)])


def random_feasible_instances(count, *, max_n=8, balanced=None, seed=0, min_n=1,
                              densities=(0.3, 0.6, 1.0)):
    """Yield ``count`` feasible generated instances, cycling through every
    graph and weight model.

    ``balanced`` forces n == s (True) or n > s (False); None mixes both.
    """
    rng = np.random.default_rng(seed)
    combos = [(g, w) for g in GRAPH_MODELS for w in WEIGHT_MODELS]
    produced = attempt = 0
    while produced < count:
        model, weight_model = combos[attempt % len(combos)]
        attempt += 1
        n = int(rng.integers(max(min_n, 1 if balanced is not False else 2), max_n, endpoint=True))
        if balanced is True:
            s = n
        elif balanced is False:
            s = int(rng.integers(1, n - 1, endpoint=True))
        else:
            s = int(rng.integers(1, n, endpoint=True))
        spec = GenSpec(
            model=model,
            n=n,
            s=s,
            d=float(densities[attempt % len(densities)]),
            r_norm=float(rng.choice([0.1, 0.5, 1.0])),
            weight_model=weight_model,
            p_low=float(rng.choice([0.1, 0.5, 0.9])),
            seed=int(rng.integers(0, 2**32)),
        )
        graph = generate_instance(spec)
        if graph.m and feasibility_precheck(graph):
            produced += 1
            yield graph
