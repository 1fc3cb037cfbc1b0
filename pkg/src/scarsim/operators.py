"""Sparse operators on a constrained basis: Hamiltonian, scar algebra, observables.

Operators are scipy CSR matrices over the full constrained basis.  Passing a
symmetry block instead of a basis restricts the result with the block's lift.

Single-site conventions: ``sigma_z |up> = +|up>``, ``sigma_+ = |up><down|``,
``sigma_y |up> = i|down>``, ``sigma_y |down> = -i|up>``.  A *dressed* operator
carries the projector onto ``down`` on every site within the blockade radius.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .hilbert import ConstrainedBasis
from .symmetry import SymmetryBlock

OPS = ("P", "n", "x", "y", "z", "+", "-", "I")


def _split(basis_or_block):
    if isinstance(basis_or_block, SymmetryBlock):
        return basis_or_block.basis, basis_or_block
    return basis_or_block, None


def _finish(op, block):
    return op if block is None else block.restrict(op)


def _flip_data(basis: ConstrainedBasis):
    rows, cols = _kernels.flip_pairs(basis.states, basis.constraint.neighbour_masks())
    diff = basis.states[rows] ^ basis.states[cols]
    site = np.log2(diff.astype(np.float64)).astype(np.int64)
    raising = (basis.states[rows] & diff) != 0
    return rows, cols, site, raising


def build_hamiltonian(basis_or_block, alpha: int | None = None) -> sp.csr_matrix:
    """Sum of dressed ``sigma_x`` over all sites; every allowed flip has amplitude 1."""
    basis, block = _split(basis_or_block)
    if alpha is not None and alpha != basis.alpha:
        raise ValueError(f"basis has alpha={basis.alpha}, requested alpha={alpha}")
    rows, cols, _, _ = _flip_data(basis)
    h = sp.csr_matrix((np.ones(rows.shape[0]), (rows, cols)), shape=(basis.dim, basis.dim))
    return _finish(h, block)


def string_operator(basis: ConstrainedBasis, terms) -> sp.csr_matrix:
    """Assemble ``sum coef * prod_k op_k(site_k)`` projected onto the constrained space.

    ``terms`` is an iterable of ``(coef, [(site, op), ...])`` where ``op`` is one of
    ``P`` (down projector), ``n`` (up projector), ``x``, ``y``, ``z``, ``+``,
    ``-``, ``I``.  The product is applied right to left; sites are taken modulo N
    on a ring and dropped terms outside an open chain act as identity for ``P``
    and annihilate for anything else.
    """
    n = basis.n_sites
    states = basis.states
    d = basis.dim
    src = np.arange(d, dtype=np.int64)
    all_r, all_c, all_v = [], [], []
    for coef, factors in terms:
        bits = states.copy()
        amp = np.full(d, complex(coef))
        dead = False
        for site, op in reversed(list(factors)):
            if op not in OPS:
                raise ValueError(f"unknown single-site operator {op!r}")
            if basis.periodic:
                site %= n
            elif not 0 <= site < n:
                if op in ("P", "I"):
                    continue
                dead = True
                break
            b = (bits >> site) & 1
            one = np.int64(1) << site
            if op == "P":
                amp = amp * (b == 0)
            elif op == "n":
                amp = amp * (b == 1)
            elif op == "x":
                bits = bits ^ one
            elif op == "y":
                amp = amp * np.where(b == 1, 1j, -1j)
                bits = bits ^ one
            elif op == "z":
                amp = amp * np.where(b == 1, 1.0, -1.0)
            elif op == "+":
                amp = amp * (b == 0)
                bits = bits | one
            elif op == "-":
                amp = amp * (b == 1)
                bits = bits & ~one
        if dead:
            continue
        tgt = basis.index(bits)
        keep = (tgt >= 0) & (amp != 0)
        all_r.append(tgt[keep])
        all_c.append(src[keep])
        all_v.append(amp[keep])
    if not all_r:
        return sp.csr_matrix((d, d), dtype=complex)
    r = np.concatenate(all_r)
    c = np.concatenate(all_c)
    v = np.concatenate(all_v)
    op = sp.csr_matrix((v, (r, c)), shape=(d, d))
    op.sum_duplicates()
    op.eliminate_zeros()
    if np.all(op.data.imag == 0):
        op = op.real.tocsr()
    return op


def dressing(basis: ConstrainedBasis, site: int) -> list[tuple[int, str]]:
    """Projector factors on the blockade neighbourhood of ``site``."""
    a = basis.alpha
    out = []
    for dd in range(1, a + 1):
        out.append((site - dd, "P"))
        out.append((site + dd, "P"))
    return out


def dressed_site(basis: ConstrainedBasis, site: int, op: str, coef: complex = 1.0) -> sp.csr_matrix:
    return string_operator(basis, [(coef, dressing(basis, site) + [(site, op)])])


def sign_profile(n_sites: int, K: int) -> np.ndarray:
    """+1 on the first half of each unit cell, -1 on the second, 0 on an odd cell's middle site."""
    pos = np.arange(n_sites) % K
    if K % 2 == 0:
        return np.where(pos < K // 2, 1, -1)
    h = (K - 1) // 2
    return np.where(pos < h, 1, np.where(pos == h, 0, -1))


@dataclass(frozen=True, eq=False)
class AlgebraSet:
    j_plus: sp.csr_matrix
    j_minus: sp.csr_matrix
    j_x: sp.csr_matrix
    j_y: sp.csr_matrix
    j_z: sp.csr_matrix
    K: int
    signs: np.ndarray
    basis: ConstrainedBasis | None = None
    block: SymmetryBlock | None = None

    def restricted(self, block: SymmetryBlock) -> "AlgebraSet":
        r = block.restrict
        return AlgebraSet(
            r(self.j_plus), r(self.j_minus), r(self.j_x), r(self.j_y), r(self.j_z),
            self.K, self.signs, self.basis, block,
        )


def commutator(a, b) -> sp.csr_matrix:
    c = (a @ b - b @ a).tocsr()
    c.eliminate_zeros()
    return c


def build_algebra(basis_or_block, K: int) -> AlgebraSet:
    """Collective raising/lowering operators for a unit cell of ``K`` sites.

    ``J+`` applies dressed raising on sites with sign +1, dressed lowering on
    sites with sign -1, and half a dressed flip on an odd cell's middle site, so
    that ``J+ + J-`` is the Hamiltonian.
    """
    basis, block = _split(basis_or_block)
    if K < 1 or basis.n_sites % K:
        raise ValueError(f"unit cell K={K} does not divide N={basis.n_sites}")
    f = sign_profile(basis.n_sites, K)
    rows, cols, site, raising = _flip_data(basis)
    fs = f[site]
    w = np.where(fs == 0, 0.5, ((fs > 0) & raising) | ((fs < 0) & ~raising)).astype(float)
    keep = w != 0
    d = basis.dim
    jp = sp.csr_matrix((w[keep], (rows[keep], cols[keep])), shape=(d, d))
    jm = jp.T.tocsr()
    jx = ((jp + jm) * 0.5).tocsr()
    jy = ((jp - jm) * (-0.5j)).tocsr()
    jz = (commutator(jx, jy) * (-1j)).tocsr()
    if np.allclose(jz.data.imag, 0.0, atol=0.0):
        jz = jz.real.tocsr()
    alg = AlgebraSet(jp, jm, jx, jy, jz, K, f, basis, None)
    return alg if block is None else alg.restricted(block)


def closure_residual_operator(algebra: AlgebraSet, relation: str = "zx") -> sp.csr_matrix:
    """Deviation of a commutation relation from su(2).

    ``"zx"``: ``[Jz, Jx]/i - Jy``;  ``"yz"``: ``[Jy, Jz]/i - Jx``;
    ``"xy"``: ``[Jx, Jy]/i - Jz`` (zero by construction).
    """
    a = algebra
    if relation == "zx":
        out = commutator(a.j_z, a.j_x) * (-1j) - a.j_y
    elif relation == "yz":
        out = commutator(a.j_y, a.j_z) * (-1j) - a.j_x
    elif relation == "xy":
        out = commutator(a.j_x, a.j_y) * (-1j) - a.j_z
    else:
        raise ValueError(f"unknown relation {relation!r}")
    out = out.tocsr()
    out.eliminate_zeros()
    return out


def operator_norm(op, n_iter: int = 100, tol: float = 1e-8, seed: int = 1234) -> float:
    """Largest singular value by power iteration on ``A^H A``."""
    d = op.shape[0]
    if d == 0 or op.nnz == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    oph = op.conj().T.tocsr()
    sigma = 0.0
    for _ in range(n_iter):
        w = oph @ (op @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        new = np.sqrt(nw)
        v = w / nw
        if abs(new - sigma) <= tol * new:
            sigma = new
            break
        sigma = new
    return float(sigma)


def algebra_closure_residual(algebra: AlgebraSet, relation: str = "zx") -> float:
    return operator_norm(closure_residual_operator(algebra, relation))


def pxp_su2_corrections(basis: ConstrainedBasis) -> dict[str, sp.csr_matrix]:
    """Hand-assembled correction terms of the nearest-neighbour two-site-cell algebra.

    Returns ``{"zx": ..., "yz": ...}`` with
    ``zx = 1/4 sum_j (-1)^j (P_{j-2} + P_{j+2}) P_{j-1} sigma^y_j P_{j+1}``
    and ``yz = -1/4 sum_j (P_{j-2} + P_{j+2}) P_{j-1} sigma^x_j P_{j+1}``,
    sites counted from 1 in the sign.  The overall sign of ``yz`` is fixed by
    direct numerical comparison with the commutator.
    """
    if basis.alpha != 1:
        raise ValueError("corrections are tabulated for alpha=1 only")
    n = basis.n_sites
    zx, yz = [], []
    for s in range(n):
        sign = -1.0 if s % 2 == 0 else 1.0  # (-1)^j with j = s + 1
        for far in (s - 2, s + 2):
            factors = [(far, "P"), (s - 1, "P"), (s, "y"), (s + 1, "P")]
            zx.append((0.25 * sign, factors))
            yz.append((-0.25, [(far, "P"), (s - 1, "P"), (s, "x"), (s + 1, "P")]))
    return {"zx": string_operator(basis, zx), "yz": string_operator(basis, yz)}


def w_projector_terms(sites) -> list:
    """String terms of ``|W><W|`` on a block of sites (single excitation, equal weights)."""
    sites = list(sites)
    m = len(sites)
    terms = []
    for a in sites:
        for b in sites:
            rest = [(c, "P") for c in sites if c not in (a, b)]
            if a == b:
                terms.append((1.0 / m, rest + [(a, "n")]))
            else:
                terms.append((1.0 / m, rest + [(a, "+"), (b, "-")]))
    return terms


def build_observable(basis_or_block, kind: str, *args) -> sp.csr_matrix:
    """Measurement operators.

    ``occupation, j`` -- up projector on site j;
    ``w_projector, j[, j+1]`` -- projector onto the two-site W state on (j, j+1);
    ``imbalance`` -- (4/N) sum_j [n_{4j+2} + n_{4j+3} - n_{4j} - n_{4j+1}] (0-based);
    ``cell_w_projector, K[, cells]`` -- mean over unit cells of the W projector on the
    second half of each cell.
    """
    basis, block = _split(basis_or_block)
    n = basis.n_sites
    if kind == "occupation":
        (j,) = args
        if not 0 <= j < n:
            raise ValueError(f"site {j} outside chain of {n}")
        diag = ((basis.states >> j) & 1).astype(float)
        op = sp.diags(diag, format="csr")
    elif kind == "w_projector":
        j = args[0]
        j2 = args[1] if len(args) > 1 else j + 1
        for s in (j, j2):
            if not basis.periodic and not 0 <= s < n:
                raise ValueError(f"site {s} outside chain of {n}")
        op = string_operator(basis, w_projector_terms([j % n, j2 % n]))
    elif kind == "imbalance":
        if n % 4:
            raise ValueError("imbalance needs N divisible by 4")
        occ = basis.occupations().astype(float)
        pos = np.arange(n) % 4
        w = np.where(pos >= 2, 1.0, -1.0) * 4.0 / n
        op = sp.diags(occ @ w, format="csr")
    elif kind == "cell_w_projector":
        K = args[0]
        if K < 2 or n % K:
            raise ValueError(f"unit cell K={K} does not divide N={n}")
        cells = args[1] if len(args) > 1 and args[1] is not None else range(n // K)
        cells = list(cells)
        half = K // 2
        terms = []
        for c in cells:
            blk = [c * K + K - half + i for i in range(half)]
            terms += [(coef / len(cells), fac) for coef, fac in w_projector_terms(blk)]
        op = string_operator(basis, terms)
    else:
        raise ValueError(f"unknown observable kind {kind!r}")
    return _finish(op, block)
