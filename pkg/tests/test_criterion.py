import math

import numpy as np
import pytest

from conftest import brute_force_f_bounds
from criterion import (
    DegenerateGapsError,
    SignHypothesisError,
    check,
    f_bounds,
    f_sequences,
    gap_products,
    phi,
    sign_case,
)
from dynamics import AllocationSystem, objective_J, normalize_sorted_u, random_system
from perm import Permutation, divergence_sets, random_permutation
from solvers import solve_approx, solve_exact

SIGNS = [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)]


def sigma_plus_of(v):
    return Permutation.from_index_array(np.argsort(v, kind='stable'))


def test_sign_case():
    assert sign_case([1.0, 2.0], [3.0, 0.0]) == 'u+v+'
    assert sign_case([-1.0, -2.0], [3.0, 1.0]) == 'u-v+'
    assert sign_case([1.0, 2.0], [-3.0, -1.0]) == 'u+v-'
    with pytest.raises(SignHypothesisError):
        sign_case([-1.0, 2.0], [1.0, 1.0])


def test_f_bounds_example():
    assert f_bounds([1.0, 2.0], [3.0, 4.0], 1) == (3.0, 8.0)
    assert f_bounds([1.0, 2.0], [3.0, 4.0], 2) == (10.0, 11.0)


def test_f_bounds_saturate():
    u = [0.5, 1.0, 3.0]
    v = [2.0, 0.1, 1.0]
    assert f_bounds(u, v, 7) == f_bounds(u, v, 3)


def test_f_plus_is_an_upper_bound_for_negative_u():
    # the single best product of u = (-2, -1), v = (1, 2) is -1 * 1
    assert f_bounds([-2.0, -1.0], [1.0, 2.0], 1) == (-4.0, -1.0)


@pytest.mark.parametrize('u_sign, v_sign', SIGNS)
def test_f_bounds_match_brute_force(rng, u_sign, v_sign):
    for _ in range(20):
        n = int(rng.integers(1, 6))
        u = np.sort(u_sign * rng.uniform(0.1, 1.0, n))
        v = v_sign * rng.uniform(0.1, 1.0, n)
        for m in range(1, n + 1):
            low, high = brute_force_f_bounds(u, v, m)
            f_minus, f_plus = f_bounds(u, v, m)
            assert f_minus == pytest.approx(low, rel=1e-12)
            assert f_plus == pytest.approx(high, rel=1e-12)


@pytest.mark.parametrize('u_sign, v_sign', SIGNS)
def test_f_sequences_shape(rng, u_sign, v_sign):
    u = np.sort(u_sign * rng.uniform(0.1, 1.0, 6))
    v = v_sign * rng.uniform(0.1, 1.0, 6)
    f_minus, f_plus = f_sequences(u, v)
    assert np.all(f_plus >= f_minus)
    if u_sign == v_sign:
        assert np.all(np.diff(f_plus) >= 0)
        assert np.all(np.diff(f_minus) >= 0)
    else:
        assert np.all(np.diff(f_plus) <= 0)
        assert np.all(np.diff(f_minus) <= 0)


def test_f_bounds_needs_sorted_u():
    with pytest.raises(ValueError):
        f_bounds([2.0, 1.0], [1.0, 2.0], 1)
    with pytest.raises(ValueError):
        f_bounds([1.0, 2.0], [1.0, 2.0], 0)


def test_gap_products_example():
    u = np.array([1.0, 2.0, 4.0])
    v = np.array([1.0, 3.0, 4.0])
    p_tilde, p_sorted, s = gap_products(u, v, sigma_plus_of(v))
    assert p_tilde.tolist() == [2.0, 1.0, 2.0]
    assert p_sorted.tolist() == [1.0, 2.0, 2.0]
    assert s.tolist() == [1.0, 3.0, 5.0]


def test_gap_products_match_brute_force(rng):
    for _ in range(500):
        n = int(rng.integers(2, 9))
        u = np.sort(rng.uniform(-1.0, 1.0, n))
        v = rng.uniform(0.0, 1.0, n)
        sigma_plus = sigma_plus_of(v)
        w = v[sigma_plus.as_index_array()]
        expected = [
            min(abs((u[k] - u[i]) * (w[k] - w[j])) for i in range(n) if i != k for j in range(n) if j != k)
            for k in range(n)
        ]
        p_tilde, _, _ = gap_products(u, v, sigma_plus)
        assert np.allclose(p_tilde, expected, rtol=1e-14, atol=0.0)


def test_gap_products_with_repeated_entry():
    u = np.array([1.0, 1.0, 2.0])
    v = np.array([1.0, 2.0, 3.0])
    _, _, s = gap_products(u, v, sigma_plus_of(v))
    assert s[0] == 0.0


def test_phi_at_largest_m1():
    sys_ = AllocationSystem([1.0, 2.0, 4.0, 5.0], [0.3, 0.9, 0.5, 0.1], [0.2, 0.4, 0.3, 0.1])
    u, v = sys_.u, sys_.v
    _, _, s = gap_products(u, v, sigma_plus_of(v))
    f_minus, f_plus = f_sequences(u, v)
    d_max, d_min = sys_.d_max, sys_.d_min
    expected = (d_max / (1 - d_max) * f_plus[-1] - d_min / (1 - d_min) * f_minus[-1]) / s[1]
    assert phi(sys_, 4) == pytest.approx(expected, rel=1e-13)
    with pytest.raises(ValueError):
        phi(sys_, 1)


def naive_phi(sys_, m1, terms=200):
    sorted_sys, _ = normalize_sorted_u(sys_)
    u, v = sorted_sys.u, sorted_sys.v
    _, _, s = gap_products(u, v, sigma_plus_of(v))
    f_minus, f_plus = f_sequences(u, v)
    if sign_case(u, v) in ('u-v+', 'u+v-'):
        f_minus, f_plus = -f_plus, -f_minus
    n = sys_.size
    total = 0.0
    for l in range(1, terms + 1):
        m = min((l + 1) * m1, n)
        total += sys_.d_max ** l * f_plus[m - 1] - sys_.d_min ** l * f_minus[m - 1]
    return total / s[math.ceil(m1 / 2) - 1]


@pytest.mark.parametrize('u_sign, v_sign', SIGNS)
def test_phi_matches_partial_sums(rng, u_sign, v_sign):
    for _ in range(25):
        n = int(rng.integers(2, 10))
        sys_ = random_system(n, rng, u_sign=u_sign, v_sign=v_sign, d_range=(0.05, 0.85))
        for m1 in range(2, n + 1):
            assert phi(sys_, m1) == pytest.approx(naive_phi(sys_, m1), rel=1e-10, abs=1e-14)


def test_phi_is_invariant_under_negation(rng):
    sys_ = random_system(6, rng)
    flipped = AllocationSystem(-sys_.u, -sys_.v, sys_.d)
    for m1 in range(2, 7):
        assert phi(flipped, m1) == pytest.approx(phi(sys_, m1), rel=1e-12)


def test_check_report_fields():
    sys_ = AllocationSystem([3.0, 1.0, 2.0, 5.0], [0.2, 0.9, 0.4, 0.6], [0.1, 0.2, 0.05, 0.15])
    report = check(sys_)
    assert report.sign_case == 'u+v+'
    assert report.m1_values == (2, 3, 4)
    assert report.phi.shape == (3,)
    assert report.max_phi == pytest.approx(report.phi.max())
    assert report.argmax_m1 == report.m1_values[int(np.argmax(report.phi))]
    assert report.satisfied == (report.max_phi <= 1.0)
    assert [row['m1'] for row in report.table_rows()] == [2, 3, 4]
    assert set(report.to_json()) >= {'phi', 'max_phi', 'satisfied', 'p_tilde', 's', 'f_plus', 'f_minus'}


def test_check_tiny_decay_is_satisfied():
    sys_ = AllocationSystem([1.0, 2.0, 3.0], [1.0, 2.0, 4.0], [1e-12, 2e-12, 3e-12])
    report = check(sys_)
    assert report.satisfied
    assert report.max_phi == pytest.approx(0.0, abs=1e-9)


def test_check_heuristic_mode():
    sys_ = AllocationSystem([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 4.0, 3.0], [0.1, 0.2, 0.3, 0.4])
    report = check(sys_, heuristic=True)
    assert report.heuristic
    assert report.m1_values == (2,)
    assert report.max_phi == pytest.approx(phi(sys_, 2))


def test_check_rejects_mixed_signs():
    with pytest.raises(SignHypothesisError):
        check(AllocationSystem([-1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [0.5, 0.5, 0.5]))


def test_check_rejects_repeated_entries():
    with pytest.raises(DegenerateGapsError):
        check(AllocationSystem([1.0, 1.0, 2.0], [1.0, 2.0, 3.0], [0.5, 0.5, 0.5]))


def test_check_needs_two_slots():
    with pytest.raises(ValueError):
        check(AllocationSystem([1.0], [1.0], [0.5]))




def magnitude_bounds(u, v):
    f_minus, f_plus = f_sequences(u, v)
    if sign_case(u, v) in ('u-v+', 'u+v-'):
        return -f_plus, -f_minus
    return f_minus, f_plus


@pytest.mark.parametrize('u_sign, v_sign', SIGNS)
def test_series_terms_are_bounded_by_product_sums(rng, u_sign, v_sign):
    for _ in range(60):
        n = int(rng.integers(2, 8))
        sys_, _ = normalize_sorted_u(random_system(n, rng, u_sign=u_sign, v_sign=v_sign, d_range=(0.01, 0.95)))
        u, v, d = sys_.u, sys_.v, sys_.d
        low, high = magnitude_bounds(u, v)
        p_plus = sigma_plus_of(v)
        p = random_permutation(n, rng)
        m1 = divergence_sets(p_plus, p, 1).m
        if m1 == 0:
            continue

        plus_step = p_plus.matrix() @ np.diag(d)
        step = p.matrix() @ np.diag(d)
        for l in range(1, 6):
            difference = (
                u @ np.linalg.matrix_power(plus_step, l) @ p_plus.matrix() @ v
                - u @ np.linalg.matrix_power(step, l) @ p.matrix() @ v
            )
            m = min((l + 1) * m1, n)
            bound = sys_.d_max ** l * high[m - 1] - sys_.d_min ** l * low[m - 1]
            assert abs(difference) <= bound * (1.0 + 1e-9) + 1e-15


def spread_decay_system(rng, n, u_sign, v_sign):
    # decay scales from 1e-5 to 0.5 put systems on both sides of max phi = 1
    d_hi = 10.0 ** rng.uniform(-5.0, -0.3)
    return random_system(n, rng, u_sign=u_sign, v_sign=v_sign, d_range=(0.2 * d_hi, d_hi))


@pytest.mark.parametrize('u_sign, v_sign', SIGNS)
def test_satisfied_criterion_implies_same_optimum(rng, u_sign, v_sign):
    satisfied = unsatisfied = 0
    for _ in range(75):
        n = int(rng.integers(3, 9))
        sys_ = spread_decay_system(rng, n, u_sign, v_sign)
        if not check(sys_).satisfied:
            unsatisfied += 1
            continue

        satisfied += 1
        exact = solve_exact(sys_)
        approx = solve_approx(sys_)
        assert objective_J(sys_, approx.best_perm) == pytest.approx(exact.best_value, rel=1e-10)
        assert objective_J(sys_, approx.worst_perm) == pytest.approx(exact.worst_value, rel=1e-10)
    assert satisfied > 0
    assert unsatisfied > 0
