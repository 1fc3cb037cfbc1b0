import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import brute_force_states
from scarsim.hilbert import (
    BlockadeConstraint,
    Boundary,
    count_dimension,
    enumerate_basis,
    quantum_dimension,
    transfer_matrix,
)


@pytest.mark.parametrize("alpha", [0, 1, 2, 3])
@pytest.mark.parametrize("n", [4, 7, 10, 13])
@pytest.mark.parametrize("boundary", ["pbc", "obc"])
def test_enumeration_matches_brute_force(alpha, n, boundary):
    if boundary == "pbc" and n <= alpha:
        pytest.skip("ring shorter than the blockade")
    basis = enumerate_basis(BlockadeConstraint(alpha, n, boundary))
    ref = brute_force_states(alpha, n, boundary == "pbc")
    np.testing.assert_array_equal(basis.states, ref)
    assert count_dimension(basis.constraint) == len(ref)


def test_known_ring_counts():
    # Lucas numbers for the nearest-neighbour ring
    lucas = [None, None, 3, 4, 7, 11, 18, 29, 47, 76, 123]
    for n in range(3, 11):
        assert count_dimension(BlockadeConstraint(1, n)) == lucas[n]
    # Fibonacci numbers for the open chain
    fib = [1, 2]
    for _ in range(20):
        fib.append(fib[-1] + fib[-2])
    for n in range(1, 20):
        assert count_dimension(BlockadeConstraint(1, n, "obc")) == fib[n]


def test_alpha_zero_is_full_space():
    assert count_dimension(BlockadeConstraint(0, 9)) == 2 ** 9
    assert count_dimension(BlockadeConstraint(0, 40, "obc")) == 2 ** 40


def test_large_counts_are_exact_integers():
    n = count_dimension(BlockadeConstraint(1, 200))
    assert isinstance(n, int)
    phi = (1 + 5 ** 0.5) / 2
    assert n.bit_length() == math.floor(200 * math.log2(phi)) + 1


def test_transfer_matrix_shape():
    t = transfer_matrix(3)
    assert len(t) == 4 and all(len(r) == 4 for r in t)


def test_quantum_dimension_values():
    assert quantum_dimension(0) == pytest.approx(2.0)
    assert quantum_dimension(1) == pytest.approx((1 + 5 ** 0.5) / 2, abs=1e-12)
    with pytest.raises(ValueError):
        quantum_dimension(-1)


@given(st.integers(1, 8))
def test_quantum_dimension_root(alpha):
    d = quantum_dimension(alpha)
    assert 1.0 < d < 2.0
    assert d ** (alpha + 1) == pytest.approx(d ** alpha + 1, rel=1e-12)


@given(st.integers(1, 5))
def test_growth_rate_approaches_quantum_dimension(alpha):
    a = count_dimension(BlockadeConstraint(alpha, 120, "obc"))
    b = count_dimension(BlockadeConstraint(alpha, 121, "obc"))
    assert b / a == pytest.approx(quantum_dimension(alpha), rel=1e-8)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        BlockadeConstraint(2, 2)
    with pytest.raises(ValueError):
        BlockadeConstraint(-1, 5)
    with pytest.raises(ValueError):
        BlockadeConstraint(1, 0)
    with pytest.raises(ValueError):
        Boundary.parse("twisted")


@given(st.integers(0, 3), st.integers(4, 12), st.booleans())
def test_basis_sorted_and_legal(alpha, n, periodic):
    if periodic and n <= alpha:
        return
    c = BlockadeConstraint(alpha, n, "pbc" if periodic else "obc")
    basis = enumerate_basis(c)
    assert np.all(np.diff(basis.states) > 0)
    assert np.all(c.is_legal(basis.states))
    assert np.all(basis.index(basis.states) == np.arange(basis.dim))


def test_index_of_missing_state():
    basis = enumerate_basis(BlockadeConstraint(1, 6))
    assert basis.index(0b11) == -1
    assert basis.occupation_strings()[basis.index(0b101)] == "101000"
