#! /usr/bin/env python3

"""Microalgae raceway: Han photoinhibition model on N layers of a Beer-Lambert light field.

Each lap of duration T the paddle wheel moves the algae of layer sigma(n) to
layer n. With C the fraction of damaged reaction centres,

    dC/dt = -alpha(I) C + beta(I),    mu(C, I) = -gamma(I) C + zeta(I),

the mean growth over a lap in the periodic regime is
mu_bar = (1 / (N T)) (<Gamma, C(0)> + <1, Z>) with C(0) = (I - P D)^-1 P V,
i.e. an AllocationSystem with u = Gamma, v = V, d = exp(-alpha T).
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from config import Config
from dynamics import AllocationSystem, SwitchedDynamics, build_system, objective_J
from solvers import solve_approx, solve_exact
from perm import identity

cfg = Config()


class ZeroDenominatorError(ValueError):
    pass


@dataclass(frozen=True)
class HanParams:
    k_r: float = 6.8e-3
    k_d: float = 2.99e-4
    tau_H: float = 0.25
    sigma_H: float = 0.047
    k_H: float = 8.7e-6
    R: float = 1.389e-7

    def __post_init__(self):
        for name, value in self.to_json().items():
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f'Han parameter {name} must be > 0, got {value}')

    def to_json(self):
        return {
            'k_r': self.k_r,
            'k_d': self.k_d,
            'tau_H': self.tau_H,
            'sigma_H': self.sigma_H,
            'k_H': self.k_H,
            'R': self.R,
        }


@dataclass(frozen=True)
class RacewayScenario:
    I_s: float
    q: float
    T: float
    N: int
    h: float = field(default_factory=lambda: cfg.DEFAULT_DEPTH)
    han: HanParams = field(default_factory=HanParams)

    def __post_init__(self):
        if not (math.isfinite(self.I_s) and self.I_s >= 0):
            raise ValueError(f'I_s must be >= 0, got {self.I_s}')
        if not 0 < self.q <= 1:
            raise ValueError(f'q must lie in (0, 1], got {self.q}')
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError(f'T must be > 0, got {self.T}')
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f'N must be a positive integer, got {self.N}')
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f'h must be > 0, got {self.h}')
        object.__setattr__(self, 'N', int(self.N))

    @property
    def epsilon(self):
        return math.log(1.0 / self.q) / self.h

    @property
    def I_b(self):
        return self.q * self.I_s

    def depths(self):
        return -(np.arange(1, self.N + 1) - 0.5) * self.h / self.N

    def with_(self, **changes):
        return replace(self, **changes)

    def to_json(self):
        return {
            'I_s': self.I_s,
            'q': self.q,
            'T': self.T,
            'N': self.N,
            'h': self.h,
            'han': self.han.to_json(),
        }


@dataclass(frozen=True, eq=False)
class HanVectors:
    intensity: np.ndarray
    gamma_vec: np.ndarray
    v_vec: np.ndarray
    z_vec: np.ndarray
    d_vec: np.ndarray

    def to_json(self):
        return {
            'I': self.intensity,
            'Gamma': self.gamma_vec,
            'V': self.v_vec,
            'Z': self.z_vec,
            'D': self.d_vec,
        }


def light_profile(sc):
    return sc.I_s * np.exp(sc.epsilon * sc.depths())


def han_rates(intensity, p):
    intensity = np.asarray(intensity, dtype=float)
    if np.any(intensity < 0):
        raise ValueError('light intensity must be >= 0')
    absorbed = p.sigma_H * intensity
    saturation = p.tau_H * absorbed + 1.0
    alpha = p.k_d * p.tau_H * absorbed ** 2 / saturation + p.k_r
    beta = alpha - p.k_r
    gamma = p.k_H * absorbed / saturation
    zeta = gamma - p.R
    return alpha, beta, gamma, zeta


def han_vectors_at(intensity, T, p):
    """Gamma, V, Z, D over one lap of duration T spent at light intensity I."""

    intensity = np.asarray(intensity, dtype=float)
    alpha, beta, gamma, zeta = han_rates(intensity, p)

    relaxed = -np.expm1(-alpha * T)
    gamma_vec = -(gamma / alpha) * relaxed
    v_vec = (beta / alpha) * relaxed
    z_vec = (gamma * beta / alpha ** 2) * relaxed - (gamma * beta / alpha) * T + zeta * T
    d_vec = np.exp(-alpha * T)
    return HanVectors(intensity, gamma_vec, v_vec, z_vec, d_vec)


def build_han_system(sc):
    vectors = han_vectors_at(light_profile(sc), sc.T, sc.han)
    return vectors, AllocationSystem(vectors.gamma_vec, vectors.v_vec, vectors.d_vec)


def han_system_dynamics(sc):
    alpha, beta, _, _ = han_rates(light_profile(sc), sc.han)
    return SwitchedDynamics(alpha, beta, sc.T)


def han_allocation_system(sc):
    """Same AllocationSystem as build_han_system, obtained through the generic dynamics layer."""

    vectors, _ = build_han_system(sc)
    return build_system(han_system_dynamics(sc), vectors.gamma_vec)


def growth_rate(damaged, intensity, p):
    _, _, gamma, zeta = han_rates(intensity, p)
    return -gamma * np.asarray(damaged, dtype=float) + zeta


def a_steady(damaged, intensity, p):
    """Open reaction centres at the fast pseudo-steady state: (1 - C) / (tau_H sigma_H I + 1)."""

    intensity = np.asarray(intensity, dtype=float)
    return (1.0 - np.asarray(damaged, dtype=float)) / (p.tau_H * p.sigma_H * intensity + 1.0)


def mu_bar(sc, p, system=None):
    if system is None:
        vectors, system = build_han_system(sc)
    else:
        vectors, system = system
    total = objective_J(system, p) + math.fsum(vectors.z_vec.tolist())
    return total / (sc.N * sc.T)


@dataclass(frozen=True)
class EfficiencyRatios:
    r1: float
    r2: float
    r3: float
    rt1: float
    rt2: float
    mu_pmax: float
    mu_pplus: float
    mu_identity: float
    mu_pmin: float

    def to_json(self):
        return {
            'r1': self.r1,
            'r2': self.r2,
            'r3': self.r3,
            'rt1': self.rt1,
            'rt2': self.rt2,
            'mu_pmax': self.mu_pmax,
            'mu_pplus': self.mu_pplus,
            'mu_identity': self.mu_identity,
            'mu_pmin': self.mu_pmin,
        }


def _ratio(numerator, denominator, name):
    if denominator == 0:
        raise ZeroDenominatorError(f'{name} is zero: the ratio is undefined')
    return numerator / denominator


def efficiency_ratios(sc, workers=None, cap=None, exact=None, system=None, p_plus=None):
    """r1, r2, r3 compare P_max, P_min and the identity; rt1, rt2 put P_+ in place of P_max.

    `exact`, `system` (the build_han_system pair) and `p_plus` may carry results
    already computed for this scenario. With I_s = 0 every strategy gives
    mu_bar = -R and all ratios are 0.
    """

    pair = build_han_system(sc) if system is None else system
    if exact is None:
        exact = solve_exact(pair[1], mode='both', workers=workers, cap=cap)
    if p_plus is None:
        p_plus = solve_approx(pair[1], mode='max').best_perm

    mu_max = mu_bar(sc, exact.best_perm, pair)
    mu_min = mu_bar(sc, exact.worst_perm, pair)
    mu_id = mu_bar(sc, identity(sc.N), pair)
    mu_plus = mu_bar(sc, p_plus, pair)

    return EfficiencyRatios(
        r1=_ratio(mu_max - mu_id, mu_id, 'mu_bar(I)'),
        r2=_ratio(mu_max - mu_min, mu_min, 'mu_bar(P_min)'),
        r3=_ratio(mu_id - mu_min, mu_id, 'mu_bar(I)'),
        rt1=_ratio(mu_plus - mu_id, mu_id, 'mu_bar(I)'),
        rt2=_ratio(mu_plus - mu_min, mu_min, 'mu_bar(P_min)'),
        mu_pmax=mu_max,
        mu_pplus=mu_plus,
        mu_identity=mu_id,
        mu_pmin=mu_min,
    )
