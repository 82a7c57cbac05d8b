#! /usr/bin/env python3

"""Permutations of {1..N}: algebra, enumeration and the index sets used by the criterion.

Every public surface is 1-based (images, cycle text, JSON). The 0-based
positions are only handed out through `Permutation.as_index_array` for numpy
indexing inside the package.
"""

import re
import json
import math
import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from config import Config

cfg = Config()


class PermutationError(ValueError):
    pass


class PermutationLimitError(PermutationError):
    pass


class Permutation:

    __slots__ = ('_map',)

    def __init__(self, images):
        images = tuple(int(i) for i in images)
        if len(images) == 0:
            raise PermutationError('A permutation needs at least one element')
        if sorted(images) != list(range(1, len(images) + 1)):
            raise PermutationError(f'Not a bijection of 1..{len(images)}: {list(images)}')
        object.__setattr__(self, '_map', tuple(i - 1 for i in images))


    @classmethod
    def from_index_array(cls, positions):
        return cls([int(i) + 1 for i in positions])


    def __setattr__(self, name, value):
        raise AttributeError('Permutation is immutable')


    def __reduce__(self):
        return (Permutation, (self.images,))


    @property
    def size(self):
        return len(self._map)


    @property
    def images(self):
        return tuple(i + 1 for i in self._map)


    def as_index_array(self):
        return np.array(self._map, dtype=np.intp)


    def __call__(self, n):
        if not 1 <= n <= len(self._map):
            raise PermutationError(f'{n} is outside 1..{len(self._map)}')
        return self._map[n - 1] + 1


    def __len__(self):
        return len(self._map)


    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._map == other._map


    def __lt__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._map < other._map


    def __hash__(self):
        return hash(self._map)


    def __mul__(self, other):
        return compose(self, other)


    def __repr__(self):
        return f'Permutation({list(self.images)})'


    def is_identity(self):
        return all(i == n for n, i in enumerate(self._map))


    def inverse(self):
        return inverse(self)


    def cycles(self, include_fixed=False):
        """Disjoint cycles as 1-based tuples, each starting at its smallest element."""

        seen = [False] * len(self._map)
        result = []
        for start in range(len(self._map)):
            if seen[start]:
                continue
            cycle_ = []
            n = start
            while not seen[n]:
                seen[n] = True
                cycle_.append(n + 1)
                n = self._map[n]
            if len(cycle_) > 1 or include_fixed:
                result.append(tuple(cycle_))
        return result


    def to_cycle_string(self):
        cycles_ = self.cycles()
        if not cycles_:
            return '()'
        return ''.join('(' + ' '.join(str(n) for n in c) + ')' for c in cycles_)


    def matrix(self):
        """Permutation matrix with (P x)_n = x_{sigma(n)}."""

        n = len(self._map)
        result = np.zeros((n, n))
        result[np.arange(n), self._map] = 1.0
        return result


    def to_json(self):
        return list(self.images)


def _check_same_size(p, q):
    if p.size != q.size:
        raise PermutationError(f'Size mismatch: {p.size} vs {q.size}')


def identity(n):
    return Permutation(range(1, n + 1))


def transposition(n, i, j):
    images = list(range(1, n + 1))
    images[i - 1], images[j - 1] = images[j - 1], images[i - 1]
    return Permutation(images)


def cycle(n, *elements):
    if len(set(elements)) != len(elements):
        raise PermutationError(f'Repeated element in cycle {elements}')
    images = list(range(1, n + 1))
    for a, b in zip(elements, elements[1:] + elements[:1]):
        if not (1 <= a <= n):
            raise PermutationError(f'{a} is outside 1..{n}')
        images[a - 1] = b
    return Permutation(images)


def compose(p, q):
    _check_same_size(p, q)
    return Permutation.from_index_array([p._map[i] for i in q._map])


def inverse(p):
    result = [0] * p.size
    for n, i in enumerate(p._map):
        result[i] = n
    return Permutation.from_index_array(result)


def power(p, k):
    if k < 0:
        return power(inverse(p), -k)
    result = identity(p.size)
    base = p
    while k:
        if k & 1:
            result = compose(base, result)
        base = compose(base, base)
        k >>= 1
    return result


def order(p):
    """Smallest K >= 1 with p^K = id, as the lcm of the cycle lengths."""

    return math.lcm(*(len(c) for c in p.cycles(include_fixed=True)))


def conjugate(p, q):
    """q^-1 o p o q: p expressed in the frame relabelled by q."""

    return compose(inverse(q), compose(p, q))


_CYCLE_RE = re.compile(r'\(([^()]*)\)')


def parse(text, n=None):
    """Parse either a JSON image array "[2,3,1]" or cycle text "(1 2)(3 4 5)"."""

    text = text.strip()
    if text.startswith('['):
        try:
            images = json.loads(text)
        except json.JSONDecodeError as e:
            raise PermutationError(f'Malformed permutation JSON {text!r}: {e}')
        p = Permutation(images)
        if n is not None and p.size != n:
            raise PermutationError(f'Expected a permutation of size {n}, got {p.size}')
        return p

    if _CYCLE_RE.sub('', text).strip():
        raise PermutationError(f'Malformed cycle notation: {text!r}')

    cycles_ = []
    for body in _CYCLE_RE.findall(text):
        tokens = [t for t in re.split(r'[\s,]+', body.strip()) if t]
        try:
            cycles_.append(tuple(int(t) for t in tokens))
        except ValueError:
            raise PermutationError(f'Malformed cycle notation: {text!r}')

    largest = max((max(c) for c in cycles_ if c), default=0)
    if n is None:
        n = largest
    if n < 1:
        raise PermutationError(f'Cannot infer the size from {text!r}; give N explicitly')
    if largest > n:
        raise PermutationError(f'Cycle element {largest} is outside 1..{n}')

    result = identity(n)
    for c in cycles_:
        if len(c) > 1:
            result = compose(result, cycle(n, *c))
    return result


@dataclass(frozen=True)
class TranspositionChain:
    steps: tuple

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, n):
        return self.steps[n]


def transposition_chain(p):
    """sigma_0 = p, sigma_n = (n sigma_{n-1}(n)) o sigma_{n-1}, n = 1..N."""

    current = list(p._map)
    steps = [p]
    for n in range(p.size):
        target = current[n]
        if target != n:
            # (n target) o current
            current = [target if i == n else n if i == target else i for i in current]
        steps.append(Permutation.from_index_array(current))
    return TranspositionChain(tuple(steps))


class DivergenceSets(NamedTuple):
    e: tuple
    g: tuple
    m: int


def divergence_profile(p, q, k_max):
    """E_k, G_k and m_k for k = 1..k_max, powers accumulated incrementally."""

    _check_same_size(p, q)
    if k_max < 1:
        raise PermutationError(f'k must be a positive integer, got {k_max}')

    n = p.size
    p_pow = list(range(n))
    q_pow = list(range(n))
    agreeing = [True] * n
    profile = []
    for _ in range(k_max):
        p_pow = [p._map[i] for i in p_pow]
        q_pow = [q._map[i] for i in q_pow]
        e = tuple(i + 1 for i in range(n) if p_pow[i] != q_pow[i])
        for i in e:
            agreeing[i - 1] = False
        g = tuple(i + 1 for i in range(n) if agreeing[i])
        profile.append(DivergenceSets(e, g, len(e)))
    return profile


def divergence_sets(p, q, k):
    return divergence_profile(p, q, k)[-1]


def check_cap(n, cap=None):
    cap = cfg.N_CAP if cap is None else cap
    if n < 1:
        raise PermutationError(f'N must be positive, got {n}')
    if n > cap:
        raise PermutationLimitError(
            f'N={n} is above the enumeration cap of {cap} ({math.factorial(n)} permutations); '
            f'raise the cap with --n-cap or N_CAP if you accept the cost'
        )


def enumerate_permutations(n, cap=None):
    check_cap(n, cap)
    for images in itertools.permutations(range(1, n + 1)):
        yield Permutation(images)


def rank(p):
    """Lexicographic rank in [0, N!) (factorial number system)."""

    n = p.size
    result = 0
    for i in range(n):
        smaller = sum(1 for j in range(i + 1, n) if p._map[j] < p._map[i])
        result += smaller * math.factorial(n - 1 - i)
    return result


def unrank(n, r):
    if not 0 <= r < math.factorial(n):
        raise PermutationError(f'Rank {r} is outside [0, {n}!)')
    remaining = list(range(n))
    result = []
    for i in range(n):
        digit, r = divmod(r, math.factorial(n - 1 - i))
        result.append(remaining.pop(digit))
    return Permutation.from_index_array(result)


def unrank_block(n, start, stop):
    """0-based image arrays (rows) of the permutations with ranks start..stop-1."""

    remainder = np.arange(start, stop, dtype=np.int64)
    count = remainder.size
    rows = np.arange(count)
    available = np.ones((count, n), dtype=bool)
    out = np.empty((count, n), dtype=np.intp)
    for position in range(n):
        base = math.factorial(n - 1 - position)
        digit = remainder // base
        remainder = remainder % base
        running = np.cumsum(available, axis=1)
        chosen = np.argmax(running == (digit[:, None] + 1), axis=1)
        out[:, position] = chosen
        available[rows, chosen] = False
    return out


def partition_ranks(n, parts):
    """Split [0, N!) into `parts` contiguous, ordered, non-empty blocks."""

    total = math.factorial(n)
    parts = max(1, min(parts, total))
    bounds = [total * i // parts for i in range(parts + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(parts)]


def random_permutation(n, rng):
    return Permutation.from_index_array(rng.permutation(n))
