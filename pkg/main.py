#!/usr/bin/env python3

import sys
import json
import argparse
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

import perm
from config import Config
from criterion import DegenerateGapsError, SignHypothesisError, check
from dynamics import (
    InvalidSystemError,
    error_sequence,
    objective_J,
    objective_J_approx,
    random_system,
    simulate,
    steady_state,
)
from perm import PermutationError, PermutationLimitError
from raceway import ZeroDenominatorError, build_han_system, efficiency_ratios, han_system_dynamics, mu_bar
from schema import SchemaError, load_grid, load_scenario, load_system
from solvers import MODES, solve_approx, solve_exact
from renderers.figures import FIGURES, FigureOptions, UnknownFigureError, reproduce
from renderers.report import (
    format_criterion_table,
    run_info,
    write_error_csv,
    write_json_report,
    write_trajectory_csv,
)
from renderers.sweep import BudgetExceededError, run_sweep, write_sweep_csv
from util import progress, write_text

cfg = Config()

EXIT_OK = 0
EXIT_CRITERION_NOT_SATISFIED = 1
EXIT_MALFORMED_INPUT = 2
EXIT_LIMIT = 3
EXIT_DEGENERATE = 4


@dataclass
class RunConfig:
    command: str
    system: Optional[str] = None
    scenario: Optional[str] = None
    grid: Optional[str] = None
    out: Optional[str] = None
    workers: int = 1
    n_cap: int = 12
    budget: Optional[int] = None
    seed: Optional[int] = None
    random_n: Optional[int] = None
    mode: str = 'both'
    method: str = 'exact'
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args):
        known = {'command', 'system', 'scenario', 'grid', 'out', 'workers', 'n_cap', 'budget', 'seed', 'random_n', 'mode', 'method'}
        values = {k: v for k, v in vars(args).items() if k in known}
        values['workers'] = cfg.MAX_WORKERS if args.workers is None else args.workers
        values['n_cap'] = cfg.N_CAP if args.n_cap is None else args.n_cap
        extra = {k: v for k, v in vars(args).items() if k not in known and k != 'handler'}
        return cls(extra=extra, **values)

    def options(self):
        """Everything that determines the result; worker count and output path are left out."""

        result = {
            'N_CAP': self.n_cap,
            'TIE_TOLERANCE': cfg.TIE_TOLERANCE,
            'DEFAULT_DEPTH': cfg.DEFAULT_DEPTH,
        }
        for key in ('system', 'scenario', 'grid', 'random_n', 'mode', 'method'):
            value = getattr(self, key)
            if value is not None:
                result[key] = value
        result.update({k: v for k, v in self.extra.items() if v is not None})
        return result

    def run_info(self):
        return run_info(self.command, self.options(), self.seed)


def _load_allocation_system(rc):
    """(AllocationSystem, SwitchedDynamics or None) from --system, --scenario or --random-n."""

    if rc.random_n is not None:
        if rc.seed is None:
            rc.seed = 0
        return random_system(rc.random_n, np.random.default_rng(rc.seed)), None
    if rc.scenario is not None:
        sc = load_scenario(rc.scenario)
        return build_han_system(sc)[1], han_system_dynamics(sc)
    if rc.system is not None:
        loaded = load_system(rc.system)
        return loaded.system, loaded.dynamics
    raise SchemaError('one of --system, --scenario or --random-n is required')


def _parse_perm(text, n):
    return perm.identity(n) if text is None else perm.parse(text, n)


def cmd_solve(rc):
    system, _ = _load_allocation_system(rc)
    if rc.method == 'exact':
        result = solve_exact(system, mode=rc.mode, workers=rc.workers, cap=rc.n_cap, verbose=True)
    else:
        result = solve_approx(system, mode=rc.mode)

    payload = {
        'result': result,
        'optimum_perm': result.optimum_perm,
        'optimum_value': result.optimum_value,
        'optimum_cycles': result.optimum_perm.to_cycle_string(),
        'system': system,
    }
    write_json_report(payload, rc.run_info(), rc.out)
    return EXIT_OK


def cmd_criterion(rc):
    system, _ = _load_allocation_system(rc)
    report = check(system, heuristic=rc.extra.get('heuristic', False))
    write_text(format_criterion_table(report))
    if rc.out is not None:
        write_json_report({'report': report, 'system': system}, rc.run_info(), rc.out)
    return EXIT_OK if report.satisfied else EXIT_CRITERION_NOT_SATISFIED


def cmd_steady_state(rc):
    system, _ = _load_allocation_system(rc)
    p = _parse_perm(rc.extra.get('perm'), system.size)
    steady = steady_state(system, p)
    payload = {
        'perm': p,
        'cycles': p.to_cycle_string(),
        'order': perm.order(p),
        'x_per': steady.x_per,
        'J': objective_J(system, p),
        'J_approx': objective_J_approx(system, p),
    }
    if rc.scenario is not None:
        payload['mu_bar'] = mu_bar(load_scenario(rc.scenario), p)
    write_json_report(payload, rc.run_info(), rc.out)
    return EXIT_OK


def cmd_simulate(rc):
    system, dyn = _load_allocation_system(rc)
    if dyn is None:
        raise SchemaError('simulate needs rates: give a system file with a, b, T, u or a --scenario')

    p = _parse_perm(rc.extra.get('perm'), dyn.size)
    x0_text = rc.extra.get('x0')
    if x0_text is None:
        x0 = np.zeros(dyn.size)
    else:
        try:
            x0 = np.array(json.loads(x0_text), dtype=float)
        except (ValueError, TypeError) as e:
            raise SchemaError(f'--x0 must be a JSON array of numbers: {e}')
        if x0.ndim != 1:
            raise SchemaError('--x0 must be a JSON array of numbers')

    trajectory = simulate(dyn, p, x0, rc.extra.get('periods', 10), rc.extra.get('samples', 20))
    if rc.extra.get('errors'):
        errors = error_sequence(trajectory, steady_state(system, p))
        write_error_csv(trajectory, errors, rc.run_info(), rc.out)
    else:
        write_trajectory_csv(trajectory, rc.run_info(), rc.out)
    return EXIT_OK


def cmd_raceway_eval(rc):
    if rc.scenario is None:
        raise SchemaError('raceway-eval needs --scenario')
    sc = load_scenario(rc.scenario)
    pair = build_han_system(sc)
    vectors, system = pair

    p_plus = solve_approx(system, mode='max').best_perm
    payload = {
        'scenario': sc,
        'epsilon': sc.epsilon,
        'vectors': vectors,
        'p_plus': p_plus,
        'mu_pplus': mu_bar(sc, p_plus, pair),
        'mu_identity': mu_bar(sc, perm.identity(sc.N), pair),
    }
    if rc.extra.get('perm') is not None:
        p = perm.parse(rc.extra['perm'], sc.N)
        payload['perm'] = p
        payload['mu_perm'] = mu_bar(sc, p, pair)

    if sc.N >= 2:
        try:
            report = check(system)
            payload['criterion'] = {'satisfied': report.satisfied, 'max_phi': report.max_phi}
        except (SignHypothesisError, DegenerateGapsError) as e:
            payload['criterion'] = {'error': str(e)}

    if rc.method == 'exact':
        exact = solve_exact(system, mode='both', workers=rc.workers, cap=rc.n_cap, verbose=True)
        payload['p_max'] = exact.best_perm
        payload['p_min'] = exact.worst_perm
        try:
            payload['ratios'] = efficiency_ratios(sc, exact=exact, system=pair, p_plus=p_plus)
        except ZeroDenominatorError as e:
            payload['ratios'] = {'error': str(e)}

    write_json_report(payload, rc.run_info(), rc.out)
    return EXIT_OK


def cmd_sweep(rc):
    if rc.grid is None:
        raise SchemaError('sweep needs --grid')
    grid = load_grid(rc.grid)
    rows = run_sweep(grid.points(), workers=rc.workers, budget=rc.budget, cap=rc.n_cap)
    info = rc.run_info()
    info['config']['grid_axes'] = grid.to_json()
    write_sweep_csv(rows, info, rc.out)
    return EXIT_OK


def cmd_reproduce(rc):
    opts = FigureOptions(
        N=rc.extra.get('N'),
        T=rc.extra.get('T'),
        workers=rc.workers,
        cap=rc.n_cap,
        budget=rc.budget,
    )
    settings = {'N_CAP': rc.n_cap, 'TIE_TOLERANCE': cfg.TIE_TOLERANCE}
    reproduce(rc.extra['figure'], rc.out, opts, settings)
    return EXIT_OK


def _add_common(parser):
    parser.add_argument('--workers', type=int, help='process pool size (default: MAX_WORKERS)')
    parser.add_argument('--n-cap', dest='n_cap', type=int, help='largest N for exhaustive search (default: N_CAP)')
    parser.add_argument('--seed', type=int, help='random seed, recorded in the output')
    parser.add_argument('--out', help='output path (default: standard output)')


def _add_inputs(parser):
    parser.add_argument('--system', help='system JSON file')
    parser.add_argument('--scenario', help='raceway scenario JSON file')
    parser.add_argument('--random-n', dest='random_n', type=int, help='random constant-sign instance of size N (uses --seed)')


def _add_method(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument('--exact', dest='method', action='store_const', const='exact', help='exhaustive search (default)')
    group.add_argument('--approx', dest='method', action='store_const', const='approx', help='sorted matching on J_approx')
    parser.set_defaults(method='exact')


def build_parser():
    parser = argparse.ArgumentParser(prog='permalloc', description='Periodic permutation re-allocation of switched linear systems.')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('solve', help='optimise J (exact) or J_approx (sorted matching)')
    _add_common(p)
    _add_inputs(p)
    _add_method(p)
    p.add_argument('--mode', choices=MODES, default='both')
    p.set_defaults(handler=cmd_solve)

    p = commands.add_parser('criterion', help='check max phi(m1) <= 1')
    _add_common(p)
    _add_inputs(p)
    p.add_argument('--heuristic', action='store_true', help='evaluate m1 = 2 only')
    p.set_defaults(handler=cmd_criterion)

    p = commands.add_parser('steady-state', help='periodic regime x_per and J for a permutation')
    _add_common(p)
    _add_inputs(p)
    p.add_argument('--perm', help='permutation as [2,3,1] or (1 2 3) (default: identity)')
    p.set_defaults(handler=cmd_steady_state)

    p = commands.add_parser('simulate', help='sample a trajectory as CSV')
    _add_common(p)
    _add_inputs(p)
    p.add_argument('--perm', help='permutation as [2,3,1] or (1 2 3) (default: identity)')
    p.add_argument('--x0', help='initial state as a JSON array (default: zeros)')
    p.add_argument('--periods', type=int, default=10, help='number of re-allocations')
    p.add_argument('--samples', type=int, default=20, help='samples per period')
    p.add_argument('--errors', action='store_true', help='write x(T_k) - x_per instead of the samples')
    p.set_defaults(handler=cmd_simulate)

    p = commands.add_parser('raceway-eval', help='evaluate a raceway scenario')
    _add_common(p)
    _add_method(p)
    p.add_argument('--scenario', help='raceway scenario JSON file')
    p.add_argument('--perm', help='also evaluate this permutation')
    p.set_defaults(handler=cmd_raceway_eval)

    p = commands.add_parser('sweep', help='evaluate every point of a scenario grid as CSV')
    _add_common(p)
    p.add_argument('--grid', help='grid JSON file')
    p.add_argument('--budget', type=int, help='maximum sum of N! (default: SWEEP_BUDGET)')
    p.set_defaults(handler=cmd_sweep)

    p = commands.add_parser('reproduce', help='write the CSV behind a figure')
    _add_common(p)
    p.add_argument('figure', help=f'one of {", ".join(FIGURES)}, all')
    p.add_argument('--N', type=int, help='layer count override')
    p.add_argument('--T', type=float, help='lap duration override')
    p.add_argument('--budget', type=int, help='maximum sum of N! per sweep (default: SWEEP_BUDGET)')
    p.set_defaults(handler=cmd_reproduce)

    return parser


def main(argv=None):

    args = build_parser().parse_args(argv)
    rc = RunConfig.from_args(args)

    try:
        return args.handler(rc)
    except PermutationLimitError as e:
        progress(f'error: {e}')
        return EXIT_LIMIT
    except BudgetExceededError as e:
        progress(f'error: {e}')
        return EXIT_LIMIT
    except (SignHypothesisError, DegenerateGapsError) as e:
        progress(f'error: {type(e).__name__}: {e}')
        return EXIT_DEGENERATE
    except UnknownFigureError as e:
        progress(f'error: {e}')
        return EXIT_MALFORMED_INPUT
    except (SchemaError, PermutationError, InvalidSystemError, ValueError) as e:
        progress(f'error: {e}')
        return EXIT_MALFORMED_INPUT


if __name__ == '__main__':
    sys.exit(main())
