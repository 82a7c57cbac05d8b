#! /usr/bin/env python3

"""Sufficient condition under which max/min of J and of J^approx share their solution.

All quantities are computed on the system relabelled so that u is ascending.
phi(m1) is evaluated exactly: the series in l is a finite sum up to
l* = floor(N / m1) - 1 plus two geometric tails on F_N.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from perm import Permutation
from dynamics import normalize_sorted_u

SIGN_CASES = ('u+v+', 'u-v+', 'u+v-', 'u-v-')


class SignHypothesisError(ValueError):
    pass


class DegenerateGapsError(ValueError):
    pass


def _sign(x, name):
    if np.all(x >= 0):
        return '+'
    if np.all(x <= 0):
        return '-'
    raise SignHypothesisError(
        f'{name} has entries of both signs; the criterion only holds when u and v each keep a constant sign'
    )


def sign_case(u, v):
    return f'u{_sign(np.asarray(u), "u")}v{_sign(np.asarray(v), "v")}'


def _check_sorted(u):
    if np.any(np.diff(u) < 0):
        raise ValueError('u must be sorted in ascending order (normalize the system first)')


def _neighbor_gaps(x):
    """min_{i != n} |x_n - x_i| for a monotone sequence: only neighbours matter."""

    step = np.abs(np.diff(x))
    gaps = np.empty(x.size)
    gaps[0] = step[0]
    gaps[-1] = step[-1]
    gaps[1:-1] = np.minimum(step[:-1], step[1:])
    return gaps


def gap_products(u, v, sigma_plus):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.size < 2:
        raise ValueError('the criterion needs N >= 2')
    _check_sorted(u)

    w = v[sigma_plus.as_index_array()]
    p_tilde = _neighbor_gaps(u) * _neighbor_gaps(w)
    p_sorted = np.sort(p_tilde)
    s = np.array([math.fsum(p_sorted[:m].tolist()) for m in range(1, u.size + 1)])
    return p_tilde, p_sorted, s


def products_non_negative(case):
    return case in ('u+v+', 'u-v-')


def f_bounds(u, v, m):
    """(F_m^-, F_m^+): smallest and largest sum of m products u_n v_j over distinct n and distinct j.

    u must be ascending; m above N saturates at N. For u, v >= 0 this is
    F^- = sum_{n<=m} u_n v_{sigma_-(N-m+n)} and F^+ = sum_{n>N-m} u_n v_{sigma_+(n)}.
    For u <= 0 <= v, F^- = sum_{n<=m} u_n v_{sigma_-(n)} and F^+ pairs the high
    block n > N-m with v_{sigma_+(n-N+m)}. The two remaining sign cases follow
    from F^{+/-}(u, v) = -F^{-/+}(u, -v).
    """

    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_sorted(u)
    if m < 1:
        raise ValueError(f'm must be >= 1, got {m}')

    case = sign_case(u, v)
    if case.endswith('-'):
        low, high = f_bounds(u, -v, m)
        return -high, -low

    n = u.size
    m = min(m, n)
    ascending = np.argsort(v, kind='stable')
    descending = np.argsort(-v, kind='stable')

    if case == 'u+v+':
        f_minus = math.fsum(u[k] * v[descending[n - m + k]] for k in range(m))
        f_plus = math.fsum(u[k] * v[ascending[k]] for k in range(n - m, n))
    else:
        f_minus = math.fsum(u[k] * v[descending[k]] for k in range(m))
        f_plus = math.fsum(u[k] * v[ascending[k - n + m]] for k in range(n - m, n))
    return f_minus, f_plus


def f_sequences(u, v):
    pairs = [f_bounds(u, v, m) for m in range(1, len(u) + 1)]
    return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])


def _magnitudes(case, f_minus, f_plus):
    """Smallest and largest |sum| of m products, as sequences in m."""

    if products_non_negative(case):
        return f_minus, f_plus
    return -f_plus, -f_minus


def _phi_value(s, low, high, d_max, d_min, m1):
    n = s.size
    denominator = s[math.ceil(m1 / 2) - 1]
    if denominator == 0:
        raise DegenerateGapsError(
            f's_{math.ceil(m1 / 2)} = 0 (repeated entries in u or v): phi({m1}) is undefined'
        )

    l_star = n // m1 - 1
    terms = []
    for l in range(1, l_star + 1):
        m = (l + 1) * m1
        terms.append(d_max ** l * high[m - 1])
        terms.append(-(d_min ** l) * low[m - 1])
    terms.append(d_max ** (l_star + 1) / (1.0 - d_max) * high[n - 1])
    terms.append(-(d_min ** (l_star + 1)) / (1.0 - d_min) * low[n - 1])
    return math.fsum(terms) / denominator


def _sorted_inputs(sys):
    sorted_sys, _ = normalize_sorted_u(sys)
    u, v = sorted_sys.u, sorted_sys.v
    case = sign_case(u, v)
    sigma_plus = Permutation.from_index_array(np.argsort(v, kind='stable'))
    sigma_minus = Permutation.from_index_array(np.argsort(-v, kind='stable'))
    return u, v, case, sigma_plus, sigma_minus


def phi(sys, m1):
    """phi(m1) for the maximisation side: gaps along sigma_+ of the u-sorted system."""

    n = sys.size
    if not 2 <= m1 <= n:
        raise ValueError(f'm1 must lie in 2..{n}, got {m1}')
    u, v, case, sigma_plus, _ = _sorted_inputs(sys)
    _, _, s = gap_products(u, v, sigma_plus)
    low, high = _magnitudes(case, *f_sequences(u, v))
    return _phi_value(s, low, high, sys.d_max, sys.d_min, m1)


@dataclass(frozen=True, eq=False)
class CriterionReport:
    sign_case: str
    p_tilde: np.ndarray
    s: np.ndarray
    f_plus: np.ndarray
    f_minus: np.ndarray
    m1_values: tuple
    phi: np.ndarray
    max_phi: float
    argmax_m1: int
    satisfied: bool
    d_max: float
    d_min: float
    heuristic: bool = False
    phi_min_side: Optional[np.ndarray] = None
    max_phi_min_side: Optional[float] = None
    satisfied_min_side: bool = False

    def table_rows(self):
        for m1, value in zip(self.m1_values, self.phi):
            yield {'m1': m1, 'phi': float(value)}

    def to_json(self):
        return {
            'sign_case': self.sign_case,
            'p_tilde': self.p_tilde,
            's': self.s,
            'f_plus': self.f_plus,
            'f_minus': self.f_minus,
            'm1': list(self.m1_values),
            'phi': self.phi,
            'max_phi': self.max_phi,
            'argmax_m1': self.argmax_m1,
            'satisfied': self.satisfied,
            'd_max': self.d_max,
            'd_min': self.d_min,
            'heuristic': self.heuristic,
            'phi_min_side': self.phi_min_side,
            'max_phi_min_side': self.max_phi_min_side,
            'satisfied_min_side': self.satisfied_min_side,
        }


def check(sys, heuristic=False):
    """Evaluate phi(m1) for m1 = 2..N (only m1 = 2 when `heuristic`) and the verdict max phi <= 1.

    The min-side fields repeat the computation with the gaps taken along
    sigma_- instead of sigma_+.
    """

    u, v, case, sigma_plus, sigma_minus = _sorted_inputs(sys)
    p_tilde, _, s = gap_products(u, v, sigma_plus)
    f_minus, f_plus = f_sequences(u, v)
    low, high = _magnitudes(case, f_minus, f_plus)
    d_max, d_min = sys.d_max, sys.d_min

    m1_values = (2,) if heuristic else tuple(range(2, sys.size + 1))
    phis = np.array([_phi_value(s, low, high, d_max, d_min, m1) for m1 in m1_values])
    best = int(np.argmax(phis))

    try:
        _, _, s_min_side = gap_products(u, v, sigma_minus)
        phis_min_side = np.array([_phi_value(s_min_side, low, high, d_max, d_min, m1) for m1 in m1_values])
        max_min_side = float(phis_min_side.max())
    except DegenerateGapsError:
        phis_min_side = None
        max_min_side = None

    return CriterionReport(
        sign_case=case,
        p_tilde=p_tilde,
        s=s,
        f_plus=f_plus,
        f_minus=f_minus,
        m1_values=m1_values,
        phi=phis,
        max_phi=float(phis[best]),
        argmax_m1=m1_values[best],
        satisfied=bool(phis[best] <= 1.0),
        d_max=d_max,
        d_min=d_min,
        heuristic=heuristic,
        phi_min_side=phis_min_side,
        max_phi_min_side=max_min_side,
        satisfied_min_side=max_min_side is not None and max_min_side <= 1.0,
    )
