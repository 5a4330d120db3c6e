import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sheaflab.errors import InputError
from sheaflab.linalg import (
    DEFAULT_PRIME,
    ExtensionField,
    PrimeField,
    Subspace,
    count_subspaces,
    enumerate_subspaces,
    generic_field,
    is_prime,
    is_totally_independent,
    kernel,
    random_subspace,
    random_totally_independent,
    rank,
    rref,
    vandermonde_totally_independent,
)

FIELDS = [PrimeField(2), PrimeField(3), PrimeField(101), PrimeField(), ExtensionField(2, 16), ExtensionField(3, 5)]


def matrices(max_rows=5, max_cols=5):
    return st.tuples(
        st.integers(0, max_rows), st.integers(0, max_cols), st.integers(0, 2**32 - 1), st.sampled_from(FIELDS)
    ).map(lambda t: (t[3].random(np.random.default_rng(t[2]), (t[0], t[1])), t[3]))


def test_primes():
    assert is_prime(DEFAULT_PRIME)
    assert not is_prime(1) and not is_prime(561) and is_prime(65537)


@pytest.mark.parametrize("field", FIELDS, ids=lambda f: f.name)
def test_field_axioms(field):
    rng = np.random.default_rng(0)
    a, b, c = (field.random(rng, 200) for _ in range(3))
    assert np.array_equal(field.add(a, b), field.add(b, a))
    assert np.array_equal(field.mul(a, field.add(b, c)), field.add(field.mul(a, b), field.mul(a, c)))
    assert np.array_equal(field.sub(field.add(a, b), b), a)
    assert np.array_equal(field.add(a, field.neg(a)), np.zeros_like(a))
    for x in field.random(rng, 20, nonzero=True):
        assert field.mul(np.array([x]), np.array([field.inv(int(x))]))[0] == 1


def test_extension_characteristic_and_size():
    f = ExtensionField(3, 5)
    assert f.order == 243 and f.characteristic == 3
    ones = np.ones(3, dtype=np.int64)
    assert np.array_equal(f.add(f.add(ones, ones), ones), np.zeros(3, dtype=np.int64))
    assert generic_field(PrimeField(2)).order >= 1 << 16
    assert generic_field(PrimeField(7)).characteristic == 7


def test_large_prime_matmul_matches_python_ints():
    F = PrimeField()
    rng = np.random.default_rng(1)
    a, b = F.random(rng, (6, 7)), F.random(rng, (7, 5))
    exact = [[sum(int(a[i, k]) * int(b[k, j]) for k in range(7)) % F.p for j in range(5)] for i in range(6)]
    assert F.matmul(a, b).tolist() == exact


def test_identity_and_zero():
    F = PrimeField(7)
    assert rank(np.eye(4, dtype=np.int64), F) == 4
    assert kernel(np.eye(4, dtype=np.int64), F).shape == (0, 4)
    z = np.zeros((3, 4), dtype=np.int64)
    assert rank(z, F) == 0
    assert Subspace.span(F, 4, kernel(z, F)).dim == 4


def test_unhappy_twisted_matrix_has_one_dimensional_kernel():
    F = PrimeField()
    p1, p2 = 12345, 67890
    d = F.embed(np.array([[1, 0, 1, 0], [0, 1, -p2, 0], [-p1, 0, 0, 1], [0, -p1, 0, -p2]]))
    assert rank(d, F) == 3
    k = kernel(d, F)
    assert k.shape[0] == 1
    # the dependence nu1 - p2 nu2 - nu3 + p1 nu4 = 0
    assert Subspace.span(F, 4, k) == Subspace.span(F, 4, F.embed(np.array([[1, -p2, -1, p1]])))


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity_and_kernel_vectors(mf):
    m, F = mf
    r = rank(m, F)
    k = kernel(m, F)
    assert r + k.shape[0] == m.shape[1]
    if k.size:
        assert not F.matmul(m, k.T).any()


@settings(max_examples=60, deadline=None)
@given(matrices(), st.integers(0, 2**32 - 1))
def test_rank_invariant_under_permutations(mf, seed):
    m, F = mf
    rng = np.random.default_rng(seed)
    pm = m[rng.permutation(m.shape[0])][:, rng.permutation(m.shape[1])]
    assert rank(pm, F) == rank(m, F)


def test_rref_is_reduced():
    F = PrimeField(5)
    m = F.random(np.random.default_rng(3), (4, 6))
    r, piv = rref(m, F)
    for i, c in enumerate(piv):
        assert r[i, c] == 1
        assert np.count_nonzero(r[:, c]) == 1


def test_subspace_basics():
    F = PrimeField(13)
    u = Subspace.span(F, 2, [[1, 2]])
    w = Subspace.span(F, 2, [[3, 1]])
    assert u.intersection(u) == u and u.sum(u) == u
    assert u.sum(w).dim == 2 and u.intersection(w).dim == 0


@pytest.mark.parametrize("p", [2, 101, DEFAULT_PRIME])
def test_dimension_identity_random(p):
    F = PrimeField(p)
    rng = np.random.default_rng(p % 1000)
    for _ in range(1000 if p == 101 else 200):
        a, b = random_subspace(F, 5, rng), random_subspace(F, 5, rng)
        s, i = a.sum(b), a.intersection(b)
        assert s.dim + i.dim == a.dim + b.dim
        assert a.is_subspace_of(s) and i.is_subspace_of(a) and i.is_subspace_of(b)


def test_subspace_enumeration_counts():
    for q, d in [(2, 0), (2, 3), (3, 4), (2, 4)]:
        subs = list(enumerate_subspaces(PrimeField(q), d))
        assert len(subs) == count_subspaces(q, d) == len(set(subs))
    assert count_subspaces(3, 4) == 212


def test_quotient_matrix_kills_subspace():
    F = PrimeField(7)
    u = random_subspace(F, 5, np.random.default_rng(2), dim=2)
    q = u.quotient_matrix()
    assert q.shape == (3, 5)
    assert not F.matmul(q, u.basis.T).any()
    assert rank(q, F) == 3


def test_total_independence():
    F = PrimeField(101)
    assert is_totally_independent(np.array([[1, 5, 7, 100]]), F)
    m = vandermonde_totally_independent(2, "abcd", F, seed=4)
    for i, j in itertools.combinations(range(4), 2):
        assert (m[0, i] * m[1, j] - m[0, j] * m[1, i]) % 101
    assert not is_totally_independent(np.array([[1, 1], [3, 3]]), F)


@pytest.mark.parametrize("k", range(1, 5))
def test_vandermonde_exhaustive_subsets(k):
    F = PrimeField()
    for seed in range(5):
        m = vandermonde_totally_independent(k, range(8), F, seed)
        for cols in itertools.combinations(range(8), k):
            assert rank(m[:, cols], F) == k


def test_vandermonde_needs_room():
    with pytest.raises(InputError):
        vandermonde_totally_independent(2, range(3), PrimeField(3))
    assert random_totally_independent(2, 4, PrimeField(2), np.random.default_rng(0), attempts=50) is None
    assert random_totally_independent(2, 3, PrimeField(2), np.random.default_rng(0)) is not None
