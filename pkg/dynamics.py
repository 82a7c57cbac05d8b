#! /usr/bin/env python3

"""The switched linear system x' = -a x + b with a re-allocation x <- P x every period T.

The state is indexed by slot: slot n always relaxes with (a_n, b_n), and at
each T_k its content moves according to (P x)_n = x_{sigma(n)}, so that
x(T_{k+1}) = P D x(T_k) + P v.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from perm import Permutation, PermutationError


class InvalidSystemError(ValueError):
    pass


def _frozen_array(values, name):
    result = np.array(values, dtype=float)
    if result.ndim != 1 or result.size == 0:
        raise InvalidSystemError(f'{name} must be a non-empty one-dimensional array')
    if not np.all(np.isfinite(result)):
        raise InvalidSystemError(f'{name} contains non-finite entries')
    result.setflags(write=False)
    return result


def _check_perm(p, n):
    if not isinstance(p, Permutation):
        raise PermutationError(f'Expected a Permutation, got {type(p).__name__}')
    if p.size != n:
        raise PermutationError(f'Permutation of size {p.size} applied to a system of size {n}')


@dataclass(frozen=True, eq=False)
class SwitchedDynamics:
    a: np.ndarray
    b: np.ndarray
    T: float
    t0: float = 0.0

    def __post_init__(self):
        a = _frozen_array(self.a, 'a')
        b = _frozen_array(self.b, 'b')
        if a.size != b.size:
            raise InvalidSystemError(f'a and b differ in length: {a.size} vs {b.size}')
        if np.any(a <= 0):
            raise InvalidSystemError('every decay rate a_n must be > 0')
        if np.any(b < 0):
            raise InvalidSystemError('every source rate b_n must be >= 0')
        if not (math.isfinite(self.T) and self.T > 0):
            raise InvalidSystemError(f'the period T must be > 0, got {self.T}')
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)
        object.__setattr__(self, 'T', float(self.T))
        object.__setattr__(self, 't0', float(self.t0))

    @property
    def size(self):
        return self.a.size

    def period_start(self, k):
        return k * self.T + self.t0

    def to_json(self):
        return {'a': self.a, 'b': self.b, 'T': self.T, 't0': self.t0}


@dataclass(frozen=True, eq=False)
class AllocationSystem:
    u: np.ndarray
    v: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        u = _frozen_array(self.u, 'u')
        v = _frozen_array(self.v, 'v')
        d = _frozen_array(self.d, 'd')
        if not (u.size == v.size == d.size):
            raise InvalidSystemError(f'u, v, d lengths differ: {u.size}, {v.size}, {d.size}')
        if np.any(d <= 0) or np.any(d >= 1):
            raise InvalidSystemError('every d_n must lie strictly between 0 and 1')
        object.__setattr__(self, 'u', u)
        object.__setattr__(self, 'v', v)
        object.__setattr__(self, 'd', d)

    @property
    def size(self):
        return self.u.size

    @property
    def d_max(self):
        return float(self.d.max())

    @property
    def d_min(self):
        return float(self.d.min())

    def to_json(self):
        return {'u': self.u, 'v': self.v, 'd': self.d}


@dataclass(frozen=True, eq=False)
class GeneralObjective:
    w: np.ndarray
    dtilde: np.ndarray
    vtilde: np.ndarray
    T: float

    def __post_init__(self):
        for name in ('w', 'dtilde', 'vtilde'):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), name))
        if not (self.w.size == self.dtilde.size == self.vtilde.size):
            raise InvalidSystemError('w, dtilde, vtilde lengths differ')
        if np.any(self.dtilde <= 0):
            raise InvalidSystemError('every dtilde_n must be > 0')


@dataclass(frozen=True, eq=False)
class SteadyState:
    x_per: np.ndarray

    def error(self, x):
        return np.asarray(x, dtype=float) - self.x_per

    def to_json(self):
        return {'x_per': self.x_per}


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    boundary_states: np.ndarray

    def csv_columns(self):
        return ['t'] + [f'x{n}' for n in range(1, self.states.shape[1] + 1)]

    def csv_rows(self):
        columns = self.csv_columns()
        for t, x in zip(self.times, self.states):
            yield dict(zip(columns, [float(t)] + [float(value) for value in x]))


def build_system(dyn, u):
    """d_n = exp(-a_n T), v_n = (b_n / a_n)(1 - exp(-a_n T))."""

    u = _frozen_array(u, 'u')
    if u.size != dyn.size:
        raise InvalidSystemError(f'u has {u.size} entries for a system of size {dyn.size}')

    exponent = dyn.a * dyn.T
    d = np.exp(-exponent)
    tiny = np.finfo(float).tiny
    if np.any(d < tiny):
        warnings.warn(
            f'exp(-a_n T) underflows for a_n T >= {exponent[d < tiny].min():.1f}; clamping d_n to {tiny:g}',
            RuntimeWarning,
            stacklevel=2,
        )
        d = np.maximum(d, tiny)
    if np.any(d >= 1.0):
        raise InvalidSystemError('a_n T is too small: exp(-a_n T) rounds to 1')

    v = (dyn.b / dyn.a) * -np.expm1(-exponent)
    return AllocationSystem(u, v, d)


def state_at(dyn, x_start, elapsed):
    """Closed-form state `elapsed` time units after a period start (0 <= elapsed <= T)."""

    decay = np.exp(-dyn.a * elapsed)
    return decay * np.asarray(x_start, dtype=float) + (dyn.b / dyn.a) * -np.expm1(-dyn.a * elapsed)


def simulate(dyn, p, x0, k_steps, samples_per_period):
    """Sample k_steps + 1 periods starting at T_0, with k_steps re-allocations in between.

    Each period contributes `samples_per_period` equally spaced samples from its
    start; the last sample is the state at T_{k_steps+1}^-, just before the next
    re-allocation. `boundary_states[k]` is x(T_k) for k = 0..k_steps.
    """

    _check_perm(p, dyn.size)
    if k_steps < 0:
        raise ValueError(f'k_steps must be >= 0, got {k_steps}')
    if samples_per_period < 1:
        raise ValueError(f'samples_per_period must be >= 1, got {samples_per_period}')

    x = _frozen_array(x0, 'x0').copy()
    if x.size != dyn.size:
        raise InvalidSystemError(f'x0 has {x.size} entries for a system of size {dyn.size}')

    sigma = p.as_index_array()
    offsets = np.arange(samples_per_period) * (dyn.T / samples_per_period)
    decay = np.exp(-np.outer(offsets, dyn.a))
    equilibrium = dyn.b / dyn.a

    times = []
    states = []
    boundary = [x.copy()]
    for k in range(k_steps + 1):
        times.append(dyn.period_start(k) + offsets)
        states.append(decay * x + equilibrium * (1.0 - decay))
        x_end = state_at(dyn, x, dyn.T)
        if k < k_steps:
            x = x_end[sigma]
            boundary.append(x.copy())

    times.append(np.array([dyn.period_start(k_steps + 1)]))
    states.append(x_end[None, :])

    return Trajectory(np.concatenate(times), np.vstack(states), np.array(boundary))


def error_sequence(trajectory, steady):
    return trajectory.boundary_states - steady.x_per[None, :]


def steady_state(sys, p):
    """Solve (I - P D) x = P v cycle by cycle.

    Along a cycle c_0 -> c_1 -> ... -> c_L = c_0 of sigma the equations read
    x_{c_i} = d_{c_{i+1}} x_{c_{i+1}} + v_{c_{i+1}}; unrolling once around the
    cycle gives x_{c_0}, the others follow backwards.
    """

    _check_perm(p, sys.size)
    d = sys.d.tolist()
    v = sys.v.tolist()
    x = [0.0] * sys.size
    for c in p.cycles(include_fixed=True):
        c = [n - 1 for n in c]
        length = len(c)
        acc = 0.0
        product = 1.0
        for i in range(1, length + 1):
            node = c[i % length]
            acc += product * v[node]
            product *= d[node]
        x[c[0]] = acc / (1.0 - product)
        for i in range(length - 1, 0, -1):
            following = c[(i + 1) % length]
            x[c[i]] = d[following] * x[following] + v[following]

    x_per = np.array(x)
    x_per.setflags(write=False)
    return SteadyState(x_per)


def objective_J(sys, p):
    x = steady_state(sys, p).x_per
    return math.fsum((sys.u * x).tolist())


def objective_J_batch(sys, images):
    """J for every row of `images` (0-based image arrays), vectorised over rows.

    For each n the walk n -> sigma(n) -> ... accumulates
    x_n = sum_i (prod_{j<i} d_{c_j}) v_{c_i} / (1 - prod_cycle d). A row's value
    does not depend on which other rows share the batch.
    """

    images = np.asarray(images, dtype=np.intp)
    count, n = images.shape
    rows = np.arange(count)[:, None]
    column = np.arange(n)[None, :]

    position = images.copy()
    weight = np.ones((count, n))
    total = np.zeros((count, n))
    still_open = np.ones((count, n), dtype=bool)
    for _ in range(n):
        total += np.where(still_open, weight * sys.v[position], 0.0)
        weight = np.where(still_open, weight * sys.d[position], weight)
        still_open &= position != column
        if not still_open.any():
            break
        position = images[rows, position]

    x = total / (1.0 - weight)
    values = np.zeros(count)
    for k in range(n):
        values += sys.u[k] * x[:, k]
    return values


def objective_J_approx(sys, p):
    _check_perm(p, sys.size)
    sigma = p.as_index_array()
    return math.fsum((sys.u * sys.v[sigma]).tolist())


def general_objective(dyn, w):
    """Benefit weights w with their time-integrated decay and source terms over one period."""

    w = _frozen_array(w, 'w')
    if w.size != dyn.size:
        raise InvalidSystemError(f'w has {w.size} entries for a system of size {dyn.size}')
    dtilde = -np.expm1(-dyn.a * dyn.T) / dyn.a
    vtilde = (dyn.b / dyn.a) * (dyn.T - dtilde)
    return GeneralObjective(w, dtilde, vtilde, dyn.T)


def system_for_objective(dyn, obj):
    return build_system(dyn, obj.dtilde * obj.w)


def period_benefit(obj, x_start):
    """f^k = (1/T)(<D~ w, x(T_k)> + <w, v~>)."""

    x_start = np.asarray(x_start, dtype=float)
    return (math.fsum((obj.dtilde * obj.w * x_start).tolist()) + math.fsum((obj.w * obj.vtilde).tolist())) / obj.T


def average_benefit(obj, sys, p):
    """J_av(P) = (1/T)(J(P) + <w, v~>); requires u = D~ w."""

    expected = obj.dtilde * obj.w
    if expected.size != sys.size or not np.allclose(sys.u, expected, rtol=1e-12, atol=0.0):
        raise InvalidSystemError('the system weights u do not equal D~ w for this objective')
    return (objective_J(sys, p) + math.fsum((obj.w * obj.vtilde).tolist())) / obj.T


def normalize_sorted_u(sys):
    """Relabel slots so that u is ascending (stable), returning (sorted system, Q).

    Q has images pi(n) where pi is the stable argsort of u; a permutation p of
    the original system corresponds to `perm.conjugate(p, Q)` in the sorted
    frame and both J and J^approx are unchanged by that map.
    """

    order_ = np.argsort(sys.u, kind='stable')
    sorted_sys = AllocationSystem(sys.u[order_], sys.v[order_], sys.d[order_])
    return sorted_sys, Permutation.from_index_array(order_)


def random_system(n, rng, u_sign=1.0, v_sign=1.0, d_range=(0.05, 0.85)):
    u = u_sign * rng.uniform(0.1, 1.0, n)
    v = v_sign * rng.uniform(0.1, 1.0, n)
    d = rng.uniform(d_range[0], d_range[1], n)
    return AllocationSystem(u, v, d)
