import numpy as np
import pytest
from hypothesis import given, strategies as st

from scarsim.hilbert import BlockadeConstraint, enumerate_basis
from scarsim.operators import build_hamiltonian
from scarsim.symmetry import (
    all_momentum_sectors,
    all_semimomentum_blocks,
    allowed_momenta_for_period,
    build_momentum_sector,
    build_semimomentum_block,
    inversion_operator,
    normalize_k_index,
    orbit_table,
    project_to_sector,
    reflect_bits,
    translate_bits,
    translation_operator,
)


def ring(alpha, n):
    return enumerate_basis(BlockadeConstraint(alpha, n))


@given(st.integers(0, 2), st.integers(3, 12), st.integers(-20, 20))
def test_translation_is_a_group_action(alpha, n, shift):
    if n <= alpha:
        return
    b = ring(alpha, n)
    once = translate_bits(b.states, n, shift)
    assert np.all(b.index(once) >= 0)
    back = translate_bits(once, n, -shift)
    np.testing.assert_array_equal(back, b.states)
    np.testing.assert_array_equal(translate_bits(b.states, n, n), b.states)


@given(st.integers(0, 2), st.integers(3, 12))
def test_reflection_is_an_involution(alpha, n):
    if n <= alpha:
        return
    b = ring(alpha, n)
    r = reflect_bits(b.states, n)
    np.testing.assert_array_equal(reflect_bits(r, n), b.states)
    assert np.all(b.index(r) >= 0)


@pytest.mark.parametrize("alpha,n", [(1, 10), (2, 12), (1, 9), (3, 12)])
def test_sectors_form_unitary_decomposition(alpha, n):
    b = ring(alpha, n)
    secs = all_momentum_sectors(b)
    assert sum(s.dim for s in secs) == b.dim
    lift = np.hstack([s.lift.toarray() for s in secs])
    np.testing.assert_allclose(lift.conj().T @ lift, np.eye(b.dim), atol=1e-12)


@pytest.mark.parametrize("alpha,n", [(1, 10), (2, 12), (1, 11)])
def test_sector_eigenvectors_carry_momentum(alpha, n):
    b = ring(alpha, n)
    t = translation_operator(b)
    for s in all_momentum_sectors(b):
        if s.dim == 0:
            continue
        v = s.lift.toarray()
        # T^{-1} acting as translation by one site gives eigenvalue exp(ik) under our phase convention
        tv = t @ v
        ratios = np.einsum("ij,ij->j", v.conj(), tv)
        np.testing.assert_allclose(np.abs(ratios), 1.0, atol=1e-12)
        np.testing.assert_allclose(tv, v * ratios, atol=1e-12)


@pytest.mark.parametrize("alpha,n", [(1, 12), (2, 14)])
def test_block_hamiltonian_spectra_reassemble_full_spectrum(alpha, n):
    b = ring(alpha, n)
    full = np.linalg.eigvalsh(build_hamiltonian(b).toarray())
    parts = np.concatenate([np.linalg.eigvalsh(build_hamiltonian(s).toarray()) for s in all_momentum_sectors(b)])
    np.testing.assert_allclose(np.sort(parts), full, atol=1e-10)
    semi = np.concatenate([np.linalg.eigvalsh(build_hamiltonian(s).toarray()) for s in all_semimomentum_blocks(b)])
    # semi-momentum blocks cover k and -k once each
    np.testing.assert_allclose(np.sort(semi), full, atol=1e-10)


def test_semimomentum_blocks_are_parity_eigenspaces():
    b = ring(1, 12)
    p = inversion_operator(b)
    for blk in all_semimomentum_blocks(b):
        v = blk.lift.toarray()
        np.testing.assert_allclose(p @ v, blk.parity * v, atol=1e-12)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(blk.dim), atol=1e-12)


def test_plus_minus_k_spectra_identical():
    b = ring(2, 15)
    for n in range(1, 8):
        ep = np.linalg.eigvalsh(build_hamiltonian(build_momentum_sector(b, n)).toarray())
        em = np.linalg.eigvalsh(build_hamiltonian(build_momentum_sector(b, -n)).toarray())
        np.testing.assert_allclose(ep, em, atol=1e-12)


def test_orbit_table_periods():
    b = ring(1, 12)
    tab = orbit_table(b)
    assert tab.rep_period.sum() == b.dim
    assert set(tab.rep_period.tolist()) <= {1, 2, 3, 4, 6, 12}


def test_project_to_sector_roundtrip(rng):
    b = ring(1, 10)
    s = build_momentum_sector(b, 3)
    c = rng.standard_normal(s.dim) + 1j * rng.standard_normal(s.dim)
    np.testing.assert_allclose(project_to_sector(s.embed(c), s), c, atol=1e-12)


def test_momentum_helpers():
    assert normalize_k_index(7, 12) == -5
    assert normalize_k_index(6, 12) == 6
    assert allowed_momenta_for_period(4, 24) == [-6, 0, 6, 12]
    with pytest.raises(ValueError):
        allowed_momenta_for_period(5, 24)
    with pytest.raises(ValueError):
        build_semimomentum_block(ring(1, 8), 1, 0)


def test_open_chain_rejected():
    b = enumerate_basis(BlockadeConstraint(1, 8, "obc"))
    with pytest.raises(ValueError):
        build_momentum_sector(b, 0)
