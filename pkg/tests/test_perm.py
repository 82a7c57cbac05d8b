import math
import pickle

import numpy as np
import pytest

import perm
from perm import (
    Permutation,
    PermutationError,
    PermutationLimitError,
    compose,
    conjugate,
    cycle,
    divergence_profile,
    divergence_sets,
    enumerate_permutations,
    identity,
    inverse,
    order,
    parse,
    partition_ranks,
    power,
    random_permutation,
    rank,
    transposition,
    transposition_chain,
    unrank,
    unrank_block,
)


def test_rejects_non_bijection():
    with pytest.raises(PermutationError):
        Permutation([1, 1, 3])
    with pytest.raises(PermutationError):
        Permutation([0, 1, 2])
    with pytest.raises(PermutationError):
        Permutation([])


def test_compose_four_cycle_with_itself():
    c = cycle(4, 1, 2, 3, 4)
    square = compose(c, c)
    assert square.images == (3, 4, 1, 2)
    assert square.to_cycle_string() == '(1 3)(2 4)'


def test_compose_with_identity():
    p = parse('(1 3)(2 4 5)')
    assert compose(identity(5), p) == p
    assert compose(p, identity(5)) == p


def test_matrix_convention(rng):
    p = random_permutation(6, rng)
    q = random_permutation(6, rng)
    x = rng.normal(size=6)
    assert np.allclose(p.matrix() @ x, x[p.as_index_array()])
    assert np.array_equal(p.matrix() @ q.matrix(), compose(q, p).matrix())


def test_inverse_and_bijectivity(rng):
    for n in range(1, 13):
        p = random_permutation(n, rng)
        q = random_permutation(n, rng)
        assert compose(p, inverse(p)).is_identity()
        assert sorted(compose(p, q).images) == list(range(1, n + 1))


@pytest.mark.parametrize('p, expected', [
    (identity(3), 1),
    (cycle(4, 1, 2, 3, 4), 4),
    (parse('(1 2)(3 4 5)', 5), 6),
])
def test_order(p, expected):
    assert order(p) == expected
    assert power(p, expected).is_identity()
    assert all(not power(p, k).is_identity() for k in range(1, expected))


def test_power_negative():
    p = cycle(5, 1, 3, 4)
    assert power(p, -1) == inverse(p)
    assert compose(power(p, 2), power(p, -2)).is_identity()


def test_transposition_chain_of_swap():
    chain = transposition_chain(transposition(3, 1, 2))
    assert len(chain) == 4
    assert chain[0] == transposition(3, 1, 2)
    assert all(chain[n].is_identity() for n in (1, 2, 3))


def test_transposition_chain_repeats_when_already_fixed():
    chain = transposition_chain(parse('(1 2)(3 4)', 4))
    assert chain[2] == chain[1]
    assert chain[4].is_identity()


def test_transposition_chain_properties(rng):
    for _ in range(50):
        n = int(rng.integers(1, 9))
        p = random_permutation(n, rng)
        chain = transposition_chain(p)
        fixed = [k for k in range(1, n + 1) if p(k) == k]
        for step, sigma in enumerate(chain.steps):
            assert all(sigma(k) == k for k in fixed)
            assert all(sigma(k) == k for k in range(1, step + 1))


def test_telescoping_identity(rng):
    for _ in range(100):
        n = int(rng.integers(2, 9))
        u = rng.normal(size=n)
        v = rng.normal(size=n)
        p = random_permutation(n, rng)
        chain = transposition_chain(p)

        lhs = float(u @ v - u @ v[p.as_index_array()])
        rhs = 0.0
        for k in range(1, n):
            previous = chain[k - 1]
            rhs += (u[k - 1] - u[inverse(previous)(k) - 1]) * (v[k - 1] - v[previous(k) - 1])
        assert rhs == pytest.approx(lhs, rel=1e-12, abs=1e-12)


def test_divergence_sets_example():
    sets = divergence_sets(transposition(3, 1, 2), identity(3), 1)
    assert sets.e == (1, 2)
    assert sets.g == (3,)
    assert sets.m == 2


def test_divergence_sets_of_equal_permutations():
    p = cycle(4, 1, 2, 4)
    sets = divergence_sets(p, p, 3)
    assert sets.e == ()
    assert sets.g == (1, 2, 3, 4)
    assert sets.m == 0


def test_divergence_profile_bounds(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        p = random_permutation(n, rng)
        q = random_permutation(n, rng)
        profile = divergence_profile(p, q, n)
        m1 = profile[0].m
        for k, sets in enumerate(profile, start=1):
            assert sets.m <= k * m1
            assert len(sets.g) >= max(n - k * m1, 0)


def test_divergence_profile_rejects_non_positive_k():
    with pytest.raises(PermutationError):
        divergence_profile(identity(3), identity(3), 0)


def test_enumeration_order_and_rank():
    perms = list(enumerate_permutations(3))
    assert [p.images for p in perms] == [
        (1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1),
    ]
    assert [rank(p) for p in perms] == list(range(6))


def test_enumeration_is_complete():
    perms = list(enumerate_permutations(5))
    assert len(perms) == 120
    assert len(set(perms)) == 120


def test_unrank_inverts_rank():
    for p in enumerate_permutations(6):
        assert unrank(6, rank(p)) == p
    with pytest.raises(PermutationError):
        unrank(4, 24)


def test_unrank_block_matches_unrank():
    block = unrank_block(5, 7, 41)
    assert block.shape == (34, 5)
    for offset, row in enumerate(block):
        assert tuple(row + 1) == unrank(5, 7 + offset).images


def test_partition_ranks_covers_everything():
    blocks = partition_ranks(4, 5)
    assert blocks[0][0] == 0
    assert blocks[-1][1] == 24
    assert all(a[1] == b[0] for a, b in zip(blocks, blocks[1:]))
    assert all(lo < hi for lo, hi in blocks)
    assert partition_ranks(2, 8) == [(0, 1), (1, 2)]


def test_cap_names_the_limit():
    with pytest.raises(PermutationLimitError, match='cap of 12'):
        next(enumerate_permutations(13))
    with pytest.raises(PermutationLimitError):
        perm.check_cap(5, cap=4)


@pytest.mark.parametrize('text, n, images', [
    ('[2,3,1]', None, (2, 3, 1)),
    ('(1 2 3)', None, (2, 3, 1)),
    ('(1 2)(3 4 5)', 5, (2, 1, 4, 5, 3)),
    ('(2 3)', 4, (1, 3, 2, 4)),
    ('()', 3, (1, 2, 3)),
])
def test_parse(text, n, images):
    assert parse(text, n).images == images


@pytest.mark.parametrize('text', ['[1,1]', '(1 x)', '(1 2) junk', '[1,2', '(1 5)'])
def test_parse_rejects(text):
    with pytest.raises(PermutationError):
        parse(text, 4)


def test_conjugate_relabels():
    p = cycle(3, 1, 2)
    q = cycle(3, 1, 2, 3)
    c = conjugate(p, q)
    assert all(c(n) == inverse(q)(p(q(n))) for n in range(1, 4))
    assert conjugate(c, inverse(q)) == p


def test_permutation_is_immutable_and_picklable():
    p = cycle(4, 1, 4)
    with pytest.raises(AttributeError):
        p.foo = 1
    assert pickle.loads(pickle.dumps(p)) == p
    assert hash(p) == hash(Permutation(p.images))
    assert math.factorial(4) == len(list(enumerate_permutations(4)))
