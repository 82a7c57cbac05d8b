#! /usr/bin/env python3

import math
import concurrent.futures
from dataclasses import dataclass
from typing import Optional

import numpy as np

import perm
from perm import Permutation
from config import Config
from dynamics import normalize_sorted_u, objective_J_approx, objective_J_batch
from util import progress

cfg = Config()

MODES = ('max', 'min', 'both')


@dataclass(frozen=True)
class SolveResult:
    method: str
    mode: str
    objective: str
    best_perm: Permutation
    best_value: float
    worst_perm: Permutation
    worst_value: float
    evaluated: int
    ties: Optional[int] = None
    ties_min: Optional[int] = None

    @property
    def optimum_perm(self):
        return self.worst_perm if self.mode == 'min' else self.best_perm

    @property
    def optimum_value(self):
        return self.worst_value if self.mode == 'min' else self.best_value

    def to_json(self):
        result = {
            'method': self.method,
            'mode': self.mode,
            'objective': self.objective,
            'best_perm': self.best_perm.to_json(),
            'best_value': self.best_value,
            'worst_perm': self.worst_perm.to_json(),
            'worst_value': self.worst_value,
            'evaluated': self.evaluated,
        }
        if self.mode in ('max', 'both'):
            result['ties'] = self.ties
        if self.mode in ('min', 'both'):
            result['ties_min'] = self.ties_min
        return result


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f'mode must be one of {MODES}, got {mode!r}')


class _Extremes:
    """Running max/min over rank-ordered batches plus near-optimal values for the tie count."""

    def __init__(self, slack):
        self.slack = slack
        self.best_value = -math.inf
        self.best_rank = None
        self.worst_value = math.inf
        self.worst_rank = None
        self.top = {}
        self.bottom = {}
        self.evaluated = 0


    @staticmethod
    def _add_counts(target, values):
        unique, counts = np.unique(values, return_counts=True)
        for value, count in zip(unique.tolist(), counts.tolist()):
            target[value] = target.get(value, 0) + count


    def _prune(self):
        self.top = {v: c for v, c in self.top.items() if v >= self.best_value - self.slack}
        self.bottom = {v: c for v, c in self.bottom.items() if v <= self.worst_value + self.slack}


    def update(self, start_rank, values):
        i = int(np.argmax(values))
        if values[i] > self.best_value:
            self.best_value = float(values[i])
            self.best_rank = start_rank + i
        j = int(np.argmin(values))
        if values[j] < self.worst_value:
            self.worst_value = float(values[j])
            self.worst_rank = start_rank + j

        self._add_counts(self.top, values[values >= self.best_value - self.slack])
        self._add_counts(self.bottom, values[values <= self.worst_value + self.slack])
        self._prune()
        self.evaluated += values.size


    def merge(self, later):
        """Fold in the extremes of a block whose ranks all come after ours."""

        if later.best_value > self.best_value:
            self.best_value, self.best_rank = later.best_value, later.best_rank
        if later.worst_value < self.worst_value:
            self.worst_value, self.worst_rank = later.worst_value, later.worst_rank
        for value, count in later.top.items():
            self.top[value] = self.top.get(value, 0) + count
        for value, count in later.bottom.items():
            self.bottom[value] = self.bottom.get(value, 0) + count
        self._prune()
        self.evaluated += later.evaluated


    def tie_counts(self, tolerance):
        tol = tolerance * max(abs(self.best_value), abs(self.worst_value))
        ties = sum(c for v, c in self.top.items() if v >= self.best_value - tol)
        ties_min = sum(c for v, c in self.bottom.items() if v <= self.worst_value + tol)
        return ties, ties_min


def _scan_block(sys, start, stop, chunk_size, slack):
    n = sys.size
    extremes = _Extremes(slack)
    for lo in range(start, stop, chunk_size):
        hi = min(lo + chunk_size, stop)
        images = perm.unrank_block(n, lo, hi)
        extremes.update(lo, objective_J_batch(sys, images))
    return extremes


def value_bound(sys):
    """Upper bound on |J(P)| over all P: sum|u| max|v| / (1 - d_max)."""

    bound = float(np.abs(sys.u).sum() * np.abs(sys.v).max() / (1.0 - sys.d_max))
    return bound * (1.0 + 1e-9)


def solve_exact(sys, mode='both', workers=None, cap=None, chunk_size=None, verbose=False):
    """Exhaustive search of J over all N! permutations.

    Ranks [0, N!) are split into one contiguous block per worker; blocks are
    reduced in rank order with strict comparisons, so the lexicographically
    smallest permutation wins among exactly equal values whatever the worker
    count.
    """

    _check_mode(mode)
    n = sys.size
    perm.check_cap(n, cap)
    workers = cfg.MAX_WORKERS if workers is None else workers
    chunk_size = cfg.CHUNK_SIZE if chunk_size is None else chunk_size
    slack = cfg.TIE_TOLERANCE * value_bound(sys)

    blocks = perm.partition_ranks(n, workers)
    if verbose:
        progress(f'Scanning {math.factorial(n)} permutations of N={n} in {len(blocks)} block(s)...')

    if len(blocks) == 1:
        results = [_scan_block(sys, blocks[0][0], blocks[0][1], chunk_size, slack)]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=len(blocks)) as executor:
            futures = [executor.submit(_scan_block, sys, lo, hi, chunk_size, slack) for lo, hi in blocks]
            results = [future.result() for future in futures]

    total = results[0]
    for later in results[1:]:
        total.merge(later)

    ties, ties_min = total.tie_counts(cfg.TIE_TOLERANCE)
    result = SolveResult(
        method='exact',
        mode=mode,
        objective='J',
        best_perm=perm.unrank(n, total.best_rank),
        best_value=total.best_value,
        worst_perm=perm.unrank(n, total.worst_rank),
        worst_value=total.worst_value,
        evaluated=total.evaluated,
        ties=ties,
        ties_min=ties_min,
    )

    if verbose:
        progress(f'  max J = {result.best_value!r} at {result.best_perm.to_json()} ({ties} within tolerance)')
        progress(f'  min J = {result.worst_value!r} at {result.worst_perm.to_json()} ({ties_min} within tolerance)')
    return result


def sorted_matchings(sys):
    """(P+, P-) (ascending and descending sorted matchings) in the labelling of `sys`.

    P+ pairs the k-th smallest u with the k-th smallest v, P- pairs it with the
    k-th largest v. Ties keep the original relative order (stable sorts).
    """

    sorted_sys, q = normalize_sorted_u(sys)
    ascending = np.argsort(sorted_sys.v, kind='stable')
    descending = np.argsort(-sorted_sys.v, kind='stable')
    back = perm.inverse(q)
    p_plus = perm.conjugate(Permutation.from_index_array(ascending), back)
    p_minus = perm.conjugate(Permutation.from_index_array(descending), back)
    return p_plus, p_minus


def solve_approx(sys, mode='both'):
    _check_mode(mode)
    p_plus, p_minus = sorted_matchings(sys)
    return SolveResult(
        method='approx',
        mode=mode,
        objective='J_approx',
        best_perm=p_plus,
        best_value=objective_J_approx(sys, p_plus),
        worst_perm=p_minus,
        worst_value=objective_J_approx(sys, p_minus),
        evaluated=2,
    )
