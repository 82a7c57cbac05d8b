#! /usr/bin/env python3

"""Typed loading of the JSON input files: systems, raceway scenarios and sweep grids.

System files come in two forms:

    {"u": [...], "v": [...], "d": [...]}               an AllocationSystem directly
    {"a": [...], "b": [...], "T": t, "u": [...]}       dynamics, reduced with build_system

Scenario files carry I_s, q, T, N and optionally h and a partial "han" block
(missing parameters take their default values). Grid files carry the same
keys with a list per swept axis.
"""

import os
import json
import itertools
from dataclasses import dataclass
from typing import Optional

from dynamics import AllocationSystem, SwitchedDynamics, build_system
from raceway import HanParams, RacewayScenario


class SchemaError(ValueError):
    pass


GRID_AXES = ('I_s', 'q', 'T', 'N')


@dataclass(frozen=True, eq=False)
class SystemInput:
    system: AllocationSystem
    dynamics: Optional[SwitchedDynamics] = None


@dataclass(frozen=True)
class SweepGrid:
    I_s: tuple
    q: tuple
    T: tuple
    N: tuple
    h: Optional[float] = None
    han: HanParams = HanParams()

    def points(self):
        """Grid scenarios in row order: I_s outermost, N innermost."""

        result = []
        for I_s, q, T, N in itertools.product(self.I_s, self.q, self.T, self.N):
            kwargs = dict(I_s=I_s, q=q, T=T, N=N, han=self.han)
            if self.h is not None:
                kwargs['h'] = self.h
            result.append(RacewayScenario(**kwargs))
        return result

    def to_json(self):
        return {
            'I_s': list(self.I_s),
            'q': list(self.q),
            'T': list(self.T),
            'N': list(self.N),
            'h': self.h,
            'han': self.han.to_json(),
        }


def load_json(file_name):
    if not os.path.exists(file_name):
        raise SchemaError(f'Input file not found: {file_name}')
    try:
        with open(file_name, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f'Malformed JSON in {file_name}: {e}')


def _require(data, keys, what):
    if not isinstance(data, dict):
        raise SchemaError(f'{what} must be a JSON object')
    missing = [k for k in keys if k not in data]
    if missing:
        raise SchemaError(f'{what} is missing keys: {missing}')


def _float_list(value, name):
    if not isinstance(value, list) or not value:
        raise SchemaError(f'{name} must be a non-empty JSON array')
    try:
        return [float(x) for x in value]
    except (TypeError, ValueError):
        raise SchemaError(f'{name} must contain numbers only')


def parse_system(data):
    if isinstance(data, dict) and 'd' in data:
        _require(data, ('u', 'v', 'd'), 'system')
        try:
            return SystemInput(AllocationSystem(
                _float_list(data['u'], 'u'), _float_list(data['v'], 'v'), _float_list(data['d'], 'd')
            ))
        except ValueError as e:
            raise SchemaError(f'Invalid system: {e}')

    _require(data, ('a', 'b', 'T', 'u'), 'system')
    try:
        dyn = SwitchedDynamics(
            _float_list(data['a'], 'a'),
            _float_list(data['b'], 'b'),
            float(data['T']),
            float(data.get('t0', 0.0)),
        )
        return SystemInput(build_system(dyn, _float_list(data['u'], 'u')), dyn)
    except (TypeError, ValueError) as e:
        raise SchemaError(f'Invalid system: {e}')


def load_system(file_name):
    try:
        return parse_system(load_json(file_name))
    except SchemaError as e:
        raise SchemaError(f'{file_name}: {e}')


def parse_han(data):
    if data is None:
        return HanParams()
    if not isinstance(data, dict):
        raise SchemaError('han must be a JSON object')
    unknown = sorted(set(data) - set(HanParams().to_json()))
    if unknown:
        raise SchemaError(f'Unknown Han parameters: {unknown}')
    try:
        return HanParams(**{k: float(v) for k, v in data.items()})
    except (TypeError, ValueError) as e:
        raise SchemaError(f'Invalid Han parameters: {e}')


def parse_scenario(data):
    _require(data, ('I_s', 'q', 'T', 'N'), 'scenario')
    kwargs = dict(han=parse_han(data.get('han')))
    if 'h' in data:
        kwargs['h'] = data['h']
    try:
        return RacewayScenario(I_s=float(data['I_s']), q=float(data['q']), T=float(data['T']), N=data['N'], **kwargs)
    except (TypeError, ValueError) as e:
        raise SchemaError(f'Invalid scenario: {e}')


def load_scenario(file_name):
    try:
        return parse_scenario(load_json(file_name))
    except SchemaError as e:
        raise SchemaError(f'{file_name}: {e}')


def parse_grid(data):
    _require(data, GRID_AXES, 'grid')
    axes = {}
    for axis in GRID_AXES:
        value = data[axis]
        axes[axis] = tuple(_float_list(value if isinstance(value, list) else [value], axis))
    if any(n != int(n) for n in axes['N']):
        raise SchemaError('N values must be integers')
    axes['N'] = tuple(int(n) for n in axes['N'])
    grid = SweepGrid(h=float(data['h']) if 'h' in data else None, han=parse_han(data.get('han')), **axes)
    try:
        grid.points()
    except ValueError as e:
        raise SchemaError(f'Invalid grid: {e}')
    return grid


def load_grid(file_name):
    try:
        return parse_grid(load_json(file_name))
    except SchemaError as e:
        raise SchemaError(f'{file_name}: {e}')
