"""Random small worlds shared by the test modules."""

import random

from sensorsynth import ACTION, OBSERVATION, PGraph, PlanningProblem, validate


def random_world(rng: random.Random, n_states=None, n_obs=None, n_actions=None, edge_p=0.45):
    """A valid random p-graph problem with at most 6 states and 3 observations."""
    while True:
        n = n_states or rng.randint(2, 6)
        ys = [f"y{i}" for i in range(1, (n_obs or rng.randint(1, 3)) + 1)]
        us = [f"u{i}" for i in range(1, (n_actions or rng.randint(1, 2)) + 1)]
        kinds = {v: rng.choice((ACTION, OBSERVATION)) for v in range(n)}
        edges = []
        for v in range(n):
            targets = [w for w in range(n) if kinds[w] != kinds[v]]
            alphabet = us if kinds[v] == ACTION else ys
            for w in targets:
                if rng.random() < edge_p:
                    k = rng.randint(1, min(2, len(alphabet)))
                    edges.append((v, w, rng.sample(alphabet, k)))
        start_kind = kinds[0]
        same = [v for v in range(n) if kinds[v] == start_kind]
        initial = rng.sample(same, rng.randint(1, min(2, len(same))))
        goal = rng.sample(range(n), rng.randint(1, 2))
        g = PGraph(kinds, edges, initial, us, ys)
        if validate(g):
            continue
        return PlanningProblem(g, goal)


def corpus(seed=0, size=200):
    rng = random.Random(seed)
    return [random_world(rng) for _ in range(size)]
