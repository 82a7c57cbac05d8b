"""Long checks of the raceway reproductions. Run with `pytest -m slow`."""

import numpy as np
import pytest

from criterion import check
from perm import identity
from raceway import RacewayScenario, build_han_system, mu_bar
from renderers.sweep import run_sweep
from solvers import solve_approx, solve_exact

pytestmark = pytest.mark.slow

SAME = 1e-10


def strategies(sc):
    pair = build_han_system(sc)
    p_max = solve_exact(pair[1], mode='max').best_perm
    p_plus = solve_approx(pair[1], mode='max').best_perm
    return mu_bar(sc, p_max, pair), mu_bar(sc, p_plus, pair)


def test_criterion_regime_verdicts():
    for N in range(2, 8):
        report = check(build_han_system(RacewayScenario(I_s=2000.0, q=0.05, T=1000.0, N=N))[1])
        assert report.satisfied, f'N={N}: max phi = {report.max_phi}'
    # layers 6 and 7 straddle the peak of Gamma at N = 8, so s_1 nearly vanishes
    for N in (8, 9):
        assert not check(build_han_system(RacewayScenario(I_s=2000.0, q=0.05, T=1000.0, N=N))[1]).satisfied


def test_criterion_regime_maximum_at_smallest_block():
    report = check(build_han_system(RacewayScenario(I_s=2000.0, q=0.05, T=1000.0, N=7))[1])
    assert report.argmax_m1 == 2


@pytest.mark.parametrize('N', range(2, 11))
def test_criterion_regime_sorted_matching_is_optimal(N):
    mu_max, mu_plus = strategies(RacewayScenario(I_s=2000.0, q=0.05, T=1000.0, N=N))
    assert mu_plus == pytest.approx(mu_max, rel=SAME)


@pytest.mark.parametrize('N', range(1, 4))
def test_approx_failure_regime_small_n(N):
    mu_max, mu_plus = strategies(RacewayScenario(I_s=800.0, q=0.005, T=1.0, N=N))
    assert mu_plus == pytest.approx(mu_max, rel=SAME)


@pytest.mark.parametrize('N', range(5, 9))
def test_approx_failure_regime_large_n(N):
    mu_max, mu_plus = strategies(RacewayScenario(I_s=800.0, q=0.005, T=1.0, N=N))
    assert mu_plus < mu_max * (1.0 - SAME)


def test_approx_failure_regime_criterion_unsatisfied():
    assert not check(build_han_system(RacewayScenario(I_s=800.0, q=0.005, T=1.0, N=7))[1]).satisfied


def test_flashing_effect():
    T_values = (1.0, 10.0, 100.0, 1000.0)
    for I_s in (500.0, 1000.0, 1500.0, 2000.0):
        rows = run_sweep([RacewayScenario(I_s=I_s, q=0.001, T=T, N=7) for T in T_values], workers=1)
        mu = [row['mu_pmax'] for row in rows]
        # below T = 10 the curve is flat to within the optimiser gain
        assert abs(mu[0] - mu[1]) <= 1e-3 * abs(mu[1]), f'I_s={I_s}: {mu}'
        assert all(a > b for a, b in zip(mu[1:], mu[2:])), f'I_s={I_s}: {mu}'


def ratio_grid(N):
    return [
        RacewayScenario(I_s=I_s, q=q, T=1.0, N=N)
        for I_s in (500.0, 1000.0, 1500.0, 2000.0, 2500.0)
        for q in (0.001, 0.005, 0.01, 0.05, 0.1)
    ]


def test_ratio_magnitude_smoke():
    rows = run_sweep(ratio_grid(7))
    assert 0.10 <= max(row['r2'] for row in rows) <= 0.45


def test_ratio_magnitude():
    rows = run_sweep(ratio_grid(9), workers=4)
    assert 0.20 <= max(row['r2'] for row in rows) <= 0.40
    assert max(row['r1'] for row in rows) >= 0.10


def test_identity_is_never_better_than_optimum():
    for N in (4, 7):
        sc = RacewayScenario(I_s=1500.0, q=0.01, T=1.0, N=N)
        pair = build_han_system(sc)
        exact = solve_exact(pair[1], mode='both')
        mu = [mu_bar(sc, p, pair) for p in (exact.best_perm, identity(N), exact.worst_perm)]
        assert np.all(np.diff(mu) <= 1e-12 * abs(mu[0]))
