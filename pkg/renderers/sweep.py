#! /usr/bin/env python3

"""Parameter sweeps of raceway scenarios: one CSV row per grid point, in grid order."""

import sys
import os
import math
import concurrent.futures

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import Config
from criterion import check
from raceway import ZeroDenominatorError, build_han_system, efficiency_ratios, mu_bar
from solvers import solve_approx, solve_exact
from perm import check_cap, identity
from util import progress, write_csv

cfg = Config()


class BudgetExceededError(ValueError):
    pass


SCENARIO_COLUMNS = ['I_s', 'q', 'T', 'N', 'h']

SWEEP_COLUMNS = SCENARIO_COLUMNS + [
    'mu_pmax', 'mu_pplus', 'mu_identity', 'mu_pmin',
    'r1', 'r2', 'r3', 'rt1', 'rt2',
    'criterion', 'max_phi', 'same_optimum', 'same_perm',
    'pmax', 'pplus',
]

SAME_OPTIMUM_RTOL = 1e-10


def estimate_work(scenarios):
    """Number of J evaluations the exact solves of a sweep need (sum of N!)."""
    return sum(math.factorial(sc.N) for sc in scenarios)


def check_budget(scenarios, budget=None):
    budget = cfg.SWEEP_BUDGET if budget is None else budget
    work = 0 if cfg.DEBUG_SKIP_EXACT else estimate_work(scenarios)
    progress(f'Sweep of {len(scenarios)} grid point(s): {work} exact evaluations (budget {budget})')
    if work > budget:
        raise BudgetExceededError(
            f'The sweep needs {work} exact evaluations, above the budget of {budget}; '
            f'shrink the grid or raise --budget / SWEEP_BUDGET'
        )
    return work


def _criterion_columns(system):
    try:
        report = check(system)
    except ValueError as e:
        progress(f'  criterion not evaluated: {e}')
        return None, None
    return report.satisfied, report.max_phi


def evaluate_point(sc, workers=1, cap=None):
    """Every sweep column for a single scenario."""

    pair = build_han_system(sc)
    _, system = pair
    row = {key: value for key, value in sc.to_json().items() if key in SCENARIO_COLUMNS}

    p_plus = solve_approx(system, mode='max').best_perm
    row['mu_pplus'] = mu_bar(sc, p_plus, pair)
    row['mu_identity'] = mu_bar(sc, identity(sc.N), pair)
    row['pplus'] = p_plus.to_json()
    row['criterion'], row['max_phi'] = _criterion_columns(system) if sc.N >= 2 else (None, None)

    for key in ('mu_pmax', 'mu_pmin', 'r1', 'r2', 'r3', 'rt1', 'rt2', 'same_optimum', 'same_perm', 'pmax'):
        row[key] = None
    if cfg.DEBUG_SKIP_EXACT:
        return row

    exact = solve_exact(system, mode='both', workers=workers, cap=cap)
    row['pmax'] = exact.best_perm.to_json()
    row['mu_pmax'] = mu_bar(sc, exact.best_perm, pair)
    row['mu_pmin'] = mu_bar(sc, exact.worst_perm, pair)
    row['same_optimum'] = abs(row['mu_pmax'] - row['mu_pplus']) <= SAME_OPTIMUM_RTOL * abs(row['mu_pmax'])
    row['same_perm'] = exact.best_perm == p_plus
    try:
        ratios = efficiency_ratios(sc, exact=exact, system=pair, p_plus=p_plus)
        row.update({key: getattr(ratios, key) for key in ('r1', 'r2', 'r3', 'rt1', 'rt2')})
    except ZeroDenominatorError as e:
        progress(f'  ratios not evaluated at {sc.to_json()}: {e}')
    return row


def _evaluate_point_args(args):
    return evaluate_point(*args)


def run_sweep(scenarios, workers=None, budget=None, cap=None):
    """Evaluate every scenario; rows come back in the order of `scenarios`.

    With several points the pool runs across points and each exact solve is
    single-process; a single point gets the whole pool for its exact solve.
    """

    workers = cfg.MAX_WORKERS if workers is None else workers
    for sc in scenarios:
        if not cfg.DEBUG_SKIP_EXACT:
            check_cap(sc.N, cap)
    check_budget(scenarios, budget)

    if len(scenarios) == 1 or workers == 1:
        inner = workers if len(scenarios) == 1 else 1
        rows = []
        for idx, sc in enumerate(scenarios, start=1):
            progress(f'  point {idx} of {len(scenarios)}: I_s={sc.I_s!r} q={sc.q!r} T={sc.T!r} N={sc.N}')
            rows.append(evaluate_point(sc, inner, cap))
        return rows

    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(_evaluate_point_args, [(sc, 1, cap) for sc in scenarios]))


def write_sweep_csv(rows, info, out_path=None, columns=None):
    columns = SWEEP_COLUMNS if columns is None else columns
    return write_csv(rows, columns, info, out_path)
