import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from conftest import dense_pxp
from scarsim.hilbert import BlockadeConstraint, enumerate_basis
from scarsim.operators import (
    algebra_closure_residual,
    build_algebra,
    build_hamiltonian,
    build_observable,
    closure_residual_operator,
    commutator,
    operator_norm,
    pxp_su2_corrections,
    sign_profile,
    string_operator,
)
from scarsim.states import build_initial_state

PAULI = {
    "P": np.array([[1, 0], [0, 0]], dtype=complex),  # index 0 = down
    "n": np.array([[0, 0], [0, 1]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
    "+": np.array([[0, 0], [1, 0]], dtype=complex),
    "-": np.array([[0, 1], [0, 0]], dtype=complex),
}


def kron_operator(n, factors):
    """Dense 2^n matrix in the bit-j = site-j ordering."""
    mats = [np.eye(2, dtype=complex) for _ in range(n)]
    for site, op in factors:
        mats[site % n] = PAULI[op] @ mats[site % n]
    out = np.ones((1, 1), dtype=complex)
    for j in reversed(range(n)):  # most significant bit is the last site
        out = np.kron(out, mats[j])
    return out


@pytest.mark.parametrize("alpha,n,pbc", [(1, 8, True), (2, 9, True), (1, 7, False), (3, 10, False), (0, 5, True)])
def test_hamiltonian_matches_dense_oracle(alpha, n, pbc):
    ref, states, _ = dense_pxp(alpha, n, pbc)
    b = enumerate_basis(BlockadeConstraint(alpha, n, "pbc" if pbc else "obc"))
    np.testing.assert_array_equal(b.states, states)
    np.testing.assert_array_equal(build_hamiltonian(b).toarray(), ref)


@given(st.integers(1, 2), st.integers(5, 9), st.data())
def test_string_operator_matches_kronecker_products(alpha, n, data):
    b = enumerate_basis(BlockadeConstraint(alpha, n))
    n_fac = data.draw(st.integers(1, 3))
    sites = data.draw(st.lists(st.integers(0, n - 1), min_size=n_fac, max_size=n_fac, unique=True))
    ops = data.draw(st.lists(st.sampled_from(list(PAULI)), min_size=n_fac, max_size=n_fac))
    factors = list(zip(sites, ops))
    ref = kron_operator(n, factors)[np.ix_(b.states, b.states)]
    got = string_operator(b, [(1.0, factors)]).toarray()
    # the product is then projected: only states inside the constrained space are kept
    np.testing.assert_allclose(got, ref, atol=1e-14)


@pytest.mark.parametrize("alpha,K,n", [(1, 2, 12), (1, 3, 12), (2, 4, 12), (2, 5, 15), (3, 7, 14)])
def test_jx_is_half_hamiltonian(alpha, K, n):
    b = enumerate_basis(BlockadeConstraint(alpha, n))
    alg = build_algebra(b, K)
    diff = alg.j_x - 0.5 * build_hamiltonian(b)
    assert abs(diff).max() == 0.0 if diff.nnz else True
    assert abs(alg.j_y - alg.j_y.conj().T).max() < 1e-15
    assert abs(alg.j_z - alg.j_z.conj().T).max() < 1e-14


@pytest.mark.parametrize("alpha,K,n", [(1, 2, 12), (1, 4, 12), (2, 4, 16), (2, 6, 18), (3, 6, 18), (3, 8, 16)])
def test_lowering_annihilates_k_state(alpha, K, n):
    b = enumerate_basis(BlockadeConstraint(alpha, n))
    alg = build_algebra(b, K)
    psi = build_initial_state(b, "K", K)
    assert np.linalg.norm(alg.j_minus @ psi.amplitudes) < 1e-12


def test_pxp_algebra_corrections_entrywise():
    b = enumerate_basis(BlockadeConstraint(1, 10))
    alg = build_algebra(b, 2)
    corr = pxp_su2_corrections(b)
    for rel in ("zx", "yz"):
        res = closure_residual_operator(alg, rel).toarray()
        np.testing.assert_allclose(res, corr[rel].toarray(), atol=1e-12)
    assert closure_residual_operator(alg, "xy").nnz == 0


def test_operator_norm_against_dense(rng):
    a = rng.standard_normal((30, 30)) + 1j * rng.standard_normal((30, 30))
    assert operator_norm(sp.csr_matrix(a), n_iter=2000, tol=1e-12) == pytest.approx(np.linalg.norm(a, 2), rel=1e-6)
    assert operator_norm(sp.csr_matrix((4, 4))) == 0.0


def test_closure_residual_nonzero_and_hermitian():
    b = enumerate_basis(BlockadeConstraint(1, 10))
    alg = build_algebra(b, 2)
    res = closure_residual_operator(alg, "zx")
    assert abs(res - res.conj().T).max() < 1e-14
    assert algebra_closure_residual(alg, "zx") > 0.1


def test_commutator_antisymmetry(rng):
    a = sp.random(20, 20, density=0.2, random_state=1, format="csr")
    c = sp.random(20, 20, density=0.2, random_state=2, format="csr")
    assert abs(commutator(a, c) + commutator(c, a)).max() < 1e-14


def test_sign_profile():
    np.testing.assert_array_equal(sign_profile(8, 4), [1, 1, -1, -1, 1, 1, -1, -1])
    np.testing.assert_array_equal(sign_profile(5, 5), [1, 1, 0, -1, -1])


def test_observables():
    b = enumerate_basis(BlockadeConstraint(2, 12))
    w = build_observable(b, "w_projector", 2)
    wd = w.toarray()
    # compressed projector: Hermitian with spectrum inside [0, 1]
    np.testing.assert_allclose(wd, wd.conj().T, atol=1e-15)
    ew = np.linalg.eigvalsh(wd)
    assert ew.min() > -1e-12 and ew.max() < 1 + 1e-12
    cw = build_observable(b, "cell_w_projector", 4)
    ev = np.linalg.eigvalsh(cw.toarray())
    assert ev.min() > -1e-12 and ev.max() < 1 + 1e-12
    imb = build_observable(b, "imbalance").diagonal()
    z = b.index(0b100010001000)  # up on sites 3, 7, 11
    assert imb[z] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        build_observable(b, "magnetisation")
    with pytest.raises(ValueError):
        build_algebra(b, 5)
