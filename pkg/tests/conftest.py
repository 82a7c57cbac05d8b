import os
import sys
import itertools

import numpy as np
import pytest
import scipy.linalg

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, ROOT)

# Keep a developer's ~/.permalloc-config.json out of the test run
os.environ['PERMALLOC_CONFIG'] = os.path.join(ROOT, 'tests', 'no-such-config.json')

from perm import enumerate_permutations  # noqa: E402
from dynamics import objective_J  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def scenario_file():
    def path(name):
        return os.path.join(ROOT, 'scenarios', name)
    return path


def dense_steady_state(sys_, p):
    """x_per from a dense solve of (I - P D) x = P v."""

    P = p.matrix()
    return scipy.linalg.solve(np.eye(sys_.size) - P @ np.diag(sys_.d), P @ sys_.v)


def brute_force_J(sys_):
    """(argmax, max, argmin, min) of J by plain enumeration; first permutation wins ties."""

    best = worst = None
    for p in enumerate_permutations(sys_.size):
        value = objective_J(sys_, p)
        if best is None or value > best[1]:
            best = (p, value)
        if worst is None or value < worst[1]:
            worst = (p, value)
    return best[0], best[1], worst[0], worst[1]


def brute_force_f_bounds(u, v, m):
    """Smallest and largest sum of m products u_n v_j over distinct n and distinct j."""

    n = len(u)
    m = min(m, n)
    sums = [
        sum(u[i] * v[j] for i, j in zip(rows, columns))
        for rows in itertools.combinations(range(n), m)
        for columns in itertools.permutations(range(n), m)
    ]
    return min(sums), max(sums)
