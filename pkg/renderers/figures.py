#! /usr/bin/env python3

"""Canned reproductions: one CSV per figure id, written to the output folder.

    muN       mean growth against N, P_max (exact) and P_+ (up to N = 100)
    4muT      flashing effect: mu_bar(P_max) against T, q = 0.1%, N = 7
    2mark     mu_bar(P_max) and mu_bar(P_+) surfaces over (I_s, q) with the criterion verdict
    3r        r1, r2, r3 surfaces over (I_s, q)
    2rt       rt1, rt2 surfaces over (I_s, q), with r1, r2 for comparison
    Fm        F_m^+, F_m^- and s_m against m
    criterion phi(m1) against m1
    gammaV    Gamma and V against light intensity, with the layer intensities
    Popt      non-zero entries of P_max and P_+

The (I_s, q) grids are I_s in {0, 500, ..., 2500} and q in {0.1%, 0.5%, 1%, 5%, 10%}.
"""

import sys
import os
import functools
from dataclasses import dataclass
from typing import Optional

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import Config
from criterion import check, f_sequences, gap_products
from dynamics import normalize_sorted_u
from perm import Permutation, identity
from raceway import HanParams, RacewayScenario, build_han_system, han_vectors_at, light_profile, mu_bar
from solvers import solve_approx, solve_exact
from renderers.report import run_info
from renderers.sweep import SCENARIO_COLUMNS, check_budget, run_sweep
from util import print_phase, progress, write_csv

cfg = Config()


class UnknownFigureError(ValueError):
    pass


TRIPLETS = {
    'criterion-regime': (2000.0, 0.05, 1000.0),
    'approx-failure': (800.0, 0.005, 1.0),
}

SURFACE_I_S = (0.0, 500.0, 1000.0, 1500.0, 2000.0, 2500.0)
SURFACE_Q = (0.001, 0.005, 0.01, 0.05, 0.1)
SURFACE_T = (1.0, 1000.0)
SURFACE_N = (5, 9)

FLASHING_I_S = (500.0, 1000.0, 1500.0, 2000.0)
FLASHING_T = (1.0, 10.0, 100.0, 1000.0)

MU_N_EXACT_MAX = 9
MU_N_APPROX_MAX = 100
PROFILE_N = (7, 20)
POPT_EXACT_N = 9
POPT_APPROX_N = 100
GAMMA_V_SAMPLES = 251


@dataclass(frozen=True)
class FigureOptions:
    N: Optional[int] = None
    T: Optional[float] = None
    workers: Optional[int] = None
    cap: Optional[int] = None
    budget: Optional[int] = None


def _triplet_scenario(label, N):
    I_s, q, T = TRIPLETS[label]
    return RacewayScenario(I_s=I_s, q=q, T=T, N=N)


def _triplet_columns(label, sc):
    return {'triplet': label, 'I_s': sc.I_s, 'q': sc.q, 'T': sc.T, 'N': sc.N}


def figure_mu_n(opts):
    n_exact = opts.N or MU_N_EXACT_MAX
    check_budget([_triplet_scenario(label, N) for label in TRIPLETS for N in range(1, n_exact + 1)], opts.budget)

    rows = []
    for label in TRIPLETS:
        for N in range(1, max(n_exact, MU_N_APPROX_MAX) + 1):
            sc = _triplet_scenario(label, N)
            pair = build_han_system(sc)
            p_plus = solve_approx(pair[1], mode='max').best_perm
            row = _triplet_columns(label, sc)
            row.update(mu_pplus=mu_bar(sc, p_plus, pair), mu_identity=mu_bar(sc, identity(N), pair))
            row.update(mu_pmax=None, same_optimum=None, criterion=None)
            if N >= 2:
                try:
                    row['criterion'] = check(pair[1]).satisfied
                except ValueError:
                    pass
            if N <= n_exact:
                exact = solve_exact(pair[1], mode='max', workers=opts.workers, cap=opts.cap)
                row['mu_pmax'] = mu_bar(sc, exact.best_perm, pair)
                row['same_optimum'] = abs(row['mu_pmax'] - row['mu_pplus']) <= 1e-10 * abs(row['mu_pmax'])
            rows.append(row)
    columns = ['triplet', 'I_s', 'q', 'T', 'N', 'mu_pmax', 'mu_pplus', 'mu_identity', 'same_optimum', 'criterion']
    return rows, columns


def figure_flashing(opts):
    N = opts.N or 7
    T_values = (opts.T,) if opts.T else FLASHING_T
    scenarios = [RacewayScenario(I_s=I_s, q=0.001, T=T, N=N) for I_s in FLASHING_I_S for T in T_values]
    rows = run_sweep(scenarios, opts.workers, opts.budget, opts.cap)
    return rows, SCENARIO_COLUMNS + ['mu_pmax', 'mu_pplus', 'mu_identity', 'same_optimum']


@functools.lru_cache(maxsize=None)
def _surface_rows(opts):
    T_values = (opts.T,) if opts.T else SURFACE_T
    N_values = (opts.N,) if opts.N else SURFACE_N
    scenarios = [
        RacewayScenario(I_s=I_s, q=q, T=T, N=N)
        for T in T_values for N in N_values for I_s in SURFACE_I_S for q in SURFACE_Q
    ]
    return tuple(run_sweep(scenarios, opts.workers, opts.budget, opts.cap))


def figure_surfaces(opts):
    return list(_surface_rows(opts)), SCENARIO_COLUMNS + ['mu_pmax', 'mu_pplus', 'same_optimum', 'same_perm', 'criterion', 'max_phi']


def figure_ratios(opts):
    return list(_surface_rows(opts)), SCENARIO_COLUMNS + ['r1', 'r2', 'r3']


def figure_tilde_ratios(opts):
    return list(_surface_rows(opts)), SCENARIO_COLUMNS + ['rt1', 'rt2', 'r1', 'r2']


def figure_fm(opts):
    rows = []
    for label in TRIPLETS:
        for N in ((opts.N,) if opts.N else PROFILE_N):
            sc = _triplet_scenario(label, N)
            sorted_sys, _ = normalize_sorted_u(build_han_system(sc)[1])
            sigma_plus = Permutation.from_index_array(np.argsort(sorted_sys.v, kind='stable'))
            _, _, s = gap_products(sorted_sys.u, sorted_sys.v, sigma_plus)
            f_minus, f_plus = f_sequences(sorted_sys.u, sorted_sys.v)
            for m in range(1, N + 1):
                row = _triplet_columns(label, sc)
                row.update(m=m, f_minus=f_minus[m - 1], f_plus=f_plus[m - 1], s=s[m - 1])
                rows.append(row)
    return rows, ['triplet', 'I_s', 'q', 'T', 'N', 'm', 'f_minus', 'f_plus', 's']


def figure_criterion(opts):
    rows = []
    for label in TRIPLETS:
        for N in ((opts.N,) if opts.N else PROFILE_N):
            sc = _triplet_scenario(label, N)
            report = check(build_han_system(sc)[1])
            for entry in report.table_rows():
                row = _triplet_columns(label, sc)
                row.update(entry)
                row.update(max_phi=report.max_phi, satisfied=report.satisfied)
                rows.append(row)
    return rows, ['triplet', 'I_s', 'q', 'T', 'N', 'm1', 'phi', 'max_phi', 'satisfied']


def figure_gamma_v(opts):
    N = opts.N or POPT_EXACT_N
    rows = []
    for label, (_, _, T) in TRIPLETS.items():
        curve = han_vectors_at(np.linspace(0.0, 2500.0, GAMMA_V_SAMPLES), T, HanParams())
        for intensity, gamma, v in zip(curve.intensity, curve.gamma_vec, curve.v_vec):
            rows.append({'triplet': label, 'kind': 'curve', 'n': None, 'I': intensity, 'Gamma': gamma, 'V': v})

        sc = _triplet_scenario(label, N)
        layers = han_vectors_at(light_profile(sc), T, sc.han)
        for n, (intensity, gamma, v) in enumerate(zip(layers.intensity, layers.gamma_vec, layers.v_vec), start=1):
            rows.append({'triplet': label, 'kind': 'layer', 'n': n, 'I': intensity, 'Gamma': gamma, 'V': v})
    return rows, ['triplet', 'kind', 'n', 'I', 'Gamma', 'V']


def figure_popt(opts):
    n_exact = opts.N or POPT_EXACT_N
    check_budget([_triplet_scenario(label, n_exact) for label in TRIPLETS], opts.budget)

    rows = []

    def add(label, method, p):
        for n, image in enumerate(p.images, start=1):
            rows.append({'triplet': label, 'method': method, 'N': p.size, 'row': n, 'column': image})

    for label in TRIPLETS:
        system = build_han_system(_triplet_scenario(label, n_exact))[1]
        add(label, 'pmax', solve_exact(system, mode='max', workers=opts.workers, cap=opts.cap).best_perm)
        add(label, 'pplus', solve_approx(system, mode='max').best_perm)
        system = build_han_system(_triplet_scenario(label, POPT_APPROX_N))[1]
        add(label, 'pplus', solve_approx(system, mode='max').best_perm)
    return rows, ['triplet', 'method', 'N', 'row', 'column']


FIGURES = {
    'muN': figure_mu_n,
    '4muT': figure_flashing,
    '2mark': figure_surfaces,
    '3r': figure_ratios,
    '2rt': figure_tilde_ratios,
    'Fm': figure_fm,
    'criterion': figure_criterion,
    'gammaV': figure_gamma_v,
    'Popt': figure_popt,
}


def reproduce(figure_id, out_folder=None, opts=FigureOptions(), settings=None):
    """Write <out_folder>/<figure_id>.csv; `all` writes every figure. Returns the paths written."""

    if figure_id == 'all':
        figure_ids = list(FIGURES)
    elif figure_id in FIGURES:
        figure_ids = [figure_id]
    else:
        raise UnknownFigureError(f'Unknown figure id {figure_id!r}; known ids: {", ".join(FIGURES)}, all')

    out_folder = cfg.OUTPUT_FOLDER if out_folder is None else out_folder
    written = []
    for idx, name in enumerate(figure_ids, start=1):
        print_phase(f'Figure {idx} of {len(figure_ids)}: {name}')
        rows, columns = FIGURES[name](opts)
        options = {'figure': name, 'N': opts.N, 'T': opts.T}
        options.update(settings or {})
        path = os.path.join(out_folder, f'{name}.csv')
        written.append(write_csv(rows, columns, run_info('reproduce', options), path))
        progress(f'  {len(rows)} row(s)')
    return written
