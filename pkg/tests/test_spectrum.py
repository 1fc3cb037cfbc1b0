import numpy as np
import pytest

from scarsim._bipartition import cut_mask, entanglement_entropy, region_mask
from scarsim.hilbert import BlockadeConstraint, enumerate_basis
from scarsim.spectrum import (
    alternates,
    diagonalize_all,
    diagonalize_sector,
    eigenstate_entropy_profile,
    eigenstate_overlap_profile,
    half_chain_cut,
    identify_scar_towers,
    sector_dimensions,
)
from scarsim.states import StateVector, build_initial_state


def dense_entropy(amps_full, n, left_sites):
    """Entropy from the reduced density matrix on the 2^n space (independent of the Schmidt code)."""
    psi = np.zeros(1 << n, dtype=complex)
    psi[:] = amps_full
    perm_left = sorted(left_sites)
    right = [j for j in range(n) if j not in perm_left]
    t = psi.reshape([2] * n)  # axis 0 is the most significant bit = site n-1
    axes_left = [n - 1 - j for j in perm_left]
    axes_right = [n - 1 - j for j in right]
    m = np.transpose(t, axes_left + axes_right).reshape(1 << len(perm_left), -1)
    rho = m @ m.conj().T
    ev = np.linalg.eigvalsh(rho)
    ev = ev[ev > 1e-15]
    return float(-(ev * np.log(ev)).sum())


def test_full_and_sector_spectra_agree():
    b = enumerate_basis(BlockadeConstraint(1, 14))
    full = diagonalize_sector(b, check=True)
    parts = np.sort(np.concatenate([e.energies for e in diagonalize_all(b)]))
    np.testing.assert_allclose(parts, full.energies, atol=1e-10)
    semi = np.sort(np.concatenate([e.energies for e in diagonalize_all(b, "semimomentum")]))
    np.testing.assert_allclose(semi, full.energies, atol=1e-10)


def test_spectrum_symmetric_about_zero():
    # the chain is bipartite under the number parity, so E and -E pair up
    b = enumerate_basis(BlockadeConstraint(2, 15))
    e = np.sort(np.concatenate([x.energies for x in diagonalize_all(b)]))
    np.testing.assert_allclose(e, -e[::-1], atol=1e-10)


def test_overlap_profile_sums_to_one():
    b = enumerate_basis(BlockadeConstraint(1, 12))
    prof = eigenstate_overlap_profile(diagonalize_all(b), build_initial_state(b, "Z2"))
    assert prof.overlaps.sum() == pytest.approx(1.0, abs=1e-12)
    assert len(prof) == b.dim
    assert np.all(np.diff(prof.energies) >= 0)


def test_entropy_matches_dense_reduced_density_matrix(rng):
    n = 10
    b = enumerate_basis(BlockadeConstraint(1, n))
    v = rng.standard_normal(b.dim) + 1j * rng.standard_normal(b.dim)
    v /= np.linalg.norm(v)
    full = np.zeros(1 << n, dtype=complex)
    full[b.states] = v
    for cut in (3, (2, 7), (0, 5)):
        mask = cut_mask(n, cut, True)
        left = [j for j in range(n) if mask >> j & 1]
        assert entanglement_entropy(b.states, v, mask) == pytest.approx(dense_entropy(full, n, left), abs=1e-10)


def test_eigenstate_entropy_profile_bounds():
    b = enumerate_basis(BlockadeConstraint(1, 12))
    ent = eigenstate_entropy_profile(diagonalize_all(b), K=2)
    s = np.array([r[1] for r in ent])
    assert len(ent) == b.dim
    assert s.min() >= -1e-12
    assert s.max() <= 6 * np.log(2)


def test_pxp_towers_from_neel():
    n = 16
    b = enumerate_basis(BlockadeConstraint(1, n))
    prof = eigenstate_overlap_profile(diagonalize_all(b), build_initial_state(b, "Z2"))
    towers = identify_scar_towers(prof, 2, n)
    assert towers.count_ok and towers.count == n + 1
    np.testing.assert_allclose(towers.energies, -towers.energies[::-1], atol=1e-8)
    # towers are roughly evenly spaced
    gaps = np.diff(towers.energies)
    assert gaps.max() / gaps.min() < 1.5


def test_alternates_and_helpers():
    assert alternates(["a", "b", "a"]) and not alternates(["a", "a"])
    b = enumerate_basis(BlockadeConstraint(1, 12))
    assert half_chain_cut(b, 4) == (0, 4)
    assert half_chain_cut(b, 2) == (0, 6)
    assert sum(sector_dimensions(b).values()) == b.dim
    assert region_mask([0, 2]) == 0b101


def test_dense_limit_enforced():
    b = enumerate_basis(BlockadeConstraint(1, 12))
    with pytest.raises(ValueError):
        diagonalize_sector(b, dense_limit=10)
    prof = eigenstate_overlap_profile(diagonalize_sector(b), StateVector(b, np.eye(b.dim)[0]))
    assert prof.labels == ("full",)
