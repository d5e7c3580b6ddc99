import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from memb.fields import (FieldError, FqField, choose_splitting_field, lowest_irreducible,
                         multiplicative_order)
from oracles import digits, poly_mul_mod, undigits


@pytest.mark.parametrize("p,k", [(2, 1), (2, 3), (3, 2), (5, 2), (7, 2)])
def test_tables_match_polynomial_arithmetic(p, k):
    F = FqField(p, k)
    for a, b in itertools.product(range(F.q), repeat=2):
        da, db = digits(a, p, k), digits(b, p, k)
        assert F.add[a, b] == undigits([(x + y) % p for x, y in zip(da, db)], p)
        assert F.mul[a, b] == undigits(poly_mul_mod(da, db, list(F.modulus), p), p)
    for a in range(1, F.q):
        assert F.mul[a, F.inv[a]] == 1


def test_lowest_irreducible_moduli():
    # x^2 + 2 is the smallest irreducible quadratic over F_5 under the integer code
    assert lowest_irreducible(5, 2) == (2, 0, 1)
    assert lowest_irreducible(2, 2) == (1, 1, 1)
    assert lowest_irreducible(3, 2) == (1, 0, 1)


def test_rejects_bad_input():
    with pytest.raises(FieldError):
        FqField(4)
    with pytest.raises(FieldError):
        FqField(5, 2, modulus=(1, 0, 1))  # x^2 + 1 = (x - 2)(x + 2) over F_5
    with pytest.raises(FieldError):
        choose_splitting_field(6, 3, 6)


def test_splitting_field_degree():
    assert multiplicative_order(5, 6) == 2
    assert multiplicative_order(7, 6) == 1
    assert choose_splitting_field(6, 5).q == 25
    assert choose_splitting_field(12, 5).q == 25
    assert choose_splitting_field(4, 7).q == 49


def test_nullspace_and_inverse():
    F = FqField(7)
    rng = np.random.default_rng(2)
    m = F.random_elements(rng, (3, 5))
    ns = F.nullspace(m)
    assert ns.shape[0] == 5 - F.rank(m)
    assert (F.matmul(m, ns.T) == 0).all()
    a = np.array([[1, 2], [3, 4]])
    assert (F.matmul(a, F.inverse(a)) == F.eye(2)).all()


@settings(max_examples=30, deadline=None)
@given(p=st.sampled_from([2, 3, 5]), k=st.integers(1, 2), seed=st.integers(0, 10_000))
def test_factorization_recovers_squarefree_product(p, k, seed):
    F = FqField(p, k)
    rng = np.random.default_rng(seed)
    f = [int(c) for c in F.random_elements(rng, 5)] + [1]
    factors = F.factor(f, rng)
    prod = [1]
    for g in factors:
        assert g[-1] == 1
        prod = F.pmul(prod, g)
    # every factor divides f, and f's squarefree part is their product
    for g in factors:
        assert not any(F.pmod(f, g))
    assert not any(F.pmod(f, prod))
    assert len(prod) - 1 <= 5
