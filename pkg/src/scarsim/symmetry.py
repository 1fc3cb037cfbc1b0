"""Translation-momentum and inversion-resolved blocks of a periodic constrained basis.

Every block is described by an isometric *lift* matrix ``V`` (full dim x block
dim) whose orthonormal columns span the block.  Restricting an operator is
``V^H A V``; projecting a state is ``V^H psi``; lifting back is ``V c``.

Conventions: one translation ``T`` moves site ``j`` to ``j+1``; momentum
states are ``sum_l exp(-i k l) T^l |r>`` so that ``T |r(k)> = exp(i k) |r(k)>``
with ``k = 2 pi n / N`` and ``n`` in ``(-N/2, N/2]``.  Inversion maps site ``j``
to ``N-1-j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .hilbert import ConstrainedBasis


def normalize_k_index(k_index: int, n_sites: int) -> int:
    n = int(k_index) % n_sites
    if n > n_sites // 2:
        n -= n_sites
    return n


def allowed_momenta_for_period(K: int, N: int) -> list[int]:
    """Momentum indices ``n`` (``k = 2 pi n / N``) available to a ``K``-periodic state."""
    if K < 1 or N % K:
        raise ValueError(f"unit cell K={K} does not divide N={N}")
    return sorted({normalize_k_index(m * (N // K), N) for m in range(K)})


def reflect_bits(states: np.ndarray, n_sites: int) -> np.ndarray:
    states = np.asarray(states, dtype=np.int64)
    out = np.zeros_like(states)
    for j in range(n_sites):
        out |= ((states >> j) & 1) << (n_sites - 1 - j)
    return out


def translate_bits(states: np.ndarray, n_sites: int, shift: int = 1) -> np.ndarray:
    states = np.asarray(states, dtype=np.int64)
    s = shift % n_sites
    if s == 0:
        return states.copy()
    full = (1 << n_sites) - 1
    return ((states << s) | (states >> (n_sites - s))) & full


def translation_operator(basis: ConstrainedBasis, shift: int = 1) -> sp.csr_matrix:
    """Permutation matrix of ``T**shift`` on the full basis."""
    _require_periodic(basis)
    tgt = basis.index(translate_bits(basis.states, basis.n_sites, shift))
    d = basis.dim
    return sp.csr_matrix((np.ones(d), (tgt, np.arange(d))), shape=(d, d))


def inversion_operator(basis: ConstrainedBasis) -> sp.csr_matrix:
    tgt = basis.index(reflect_bits(basis.states, basis.n_sites))
    d = basis.dim
    return sp.csr_matrix((np.ones(d), (tgt, np.arange(d))), shape=(d, d))


def _require_periodic(basis: ConstrainedBasis) -> None:
    if not basis.periodic:
        raise ValueError("translation sectors need a periodic basis")


@dataclass(frozen=True)
class OrbitTable:
    """Per-state translation-orbit data for a periodic basis."""

    basis: ConstrainedBasis
    rep_of: np.ndarray  # representative bitmask of each basis state
    shift: np.ndarray  # l with T^l rep = state, 0 <= l < period
    period: np.ndarray
    reps: np.ndarray  # sorted representative bitmasks
    rep_slot: np.ndarray  # position of each state's representative in ``reps``

    @classmethod
    def build(cls, basis: ConstrainedBasis) -> "OrbitTable":
        _require_periodic(basis)
        rep_of, to_rep, period = _kernels.translation_orbits(basis.states, basis.n_sites)
        shift = (-to_rep) % period
        reps = np.unique(rep_of)
        rep_slot = np.searchsorted(reps, rep_of)
        return cls(basis, rep_of, shift, period, reps, rep_slot)

    @cached_property
    def rep_period(self) -> np.ndarray:
        return self.period[self.basis.index(self.reps)]

    @cached_property
    def reflection(self) -> tuple[np.ndarray, np.ndarray]:
        """For every representative ``a``: slot of rep(I a) and ``m`` with ``I a = T^m rep(I a)``."""
        n = self.basis.n_sites
        ia = self.basis.index(reflect_bits(self.reps, n))
        return self.rep_slot[ia], self.shift[ia]


_orbit_cache: dict[int, OrbitTable] = {}


def orbit_table(basis: ConstrainedBasis) -> OrbitTable:
    key = id(basis)
    tab = _orbit_cache.get(key)
    if tab is None or tab.basis is not basis:
        tab = OrbitTable.build(basis)
        if len(_orbit_cache) >= 8:
            _orbit_cache.clear()
        _orbit_cache[key] = tab
    return tab


@dataclass(frozen=True, eq=False)
class SymmetryBlock:
    """A symmetry-adapted subspace given by its isometric lift matrix."""

    basis: ConstrainedBasis
    lift: sp.csr_matrix = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.lift.shape[1])

    @property
    def label(self) -> str:  # pragma: no cover - overridden
        return "block"

    @cached_property
    def _lift_h(self) -> sp.csr_matrix:
        return self.lift.conj().T.tocsr()

    def project(self, psi: np.ndarray) -> np.ndarray:
        psi = np.asarray(psi)
        if psi.shape[0] != self.basis.dim:
            raise ValueError(f"state has dimension {psi.shape[0]}, basis has {self.basis.dim}")
        return np.asarray(self._lift_h @ psi)

    def embed(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs)
        if coeffs.shape[0] != self.dim:
            raise ValueError(f"coefficients have dimension {coeffs.shape[0]}, block has {self.dim}")
        return np.asarray(self.lift @ coeffs)

    def restrict(self, op) -> np.ndarray | sp.csr_matrix:
        """``V^H op V`` as a sparse matrix."""
        return (self._lift_h @ (op @ self.lift)).tocsr()


@dataclass(frozen=True, eq=False)
class MomentumSector(SymmetryBlock):
    k_index: int = 0
    reps: np.ndarray = field(default=None, repr=False)
    periods: np.ndarray = field(default=None, repr=False)

    @property
    def k(self) -> float:
        return 2 * np.pi * self.k_index / self.basis.n_sites

    @property
    def norms(self) -> np.ndarray:
        """Normalisation ``1/sqrt(period)`` of each representative's column."""
        return 1.0 / np.sqrt(self.periods)

    @property
    def label(self) -> str:
        return f"k={self.k_index}"

    @property
    def key(self) -> tuple:
        return ("k", self.k_index)


@dataclass(frozen=True, eq=False)
class SemiMomentumBlock(SymmetryBlock):
    k_abs_index: int = 0
    parity: int = 1

    @property
    def label(self) -> str:
        return f"k={self.k_abs_index},p={self.parity:+d}"

    @property
    def key(self) -> tuple:
        return ("kp", self.k_abs_index, self.parity)


def build_momentum_sector(basis: ConstrainedBasis, k_index: int) -> MomentumSector:
    _require_periodic(basis)
    n_sites = basis.n_sites
    n = normalize_k_index(k_index, n_sites)
    tab = orbit_table(basis)
    k = 2 * np.pi * n / n_sites
    ok_rep = (n * tab.rep_period) % n_sites == 0
    col_of_rep = np.full(tab.reps.shape[0], -1, dtype=np.int64)
    col_of_rep[ok_rep] = np.arange(int(ok_rep.sum()))
    cols = col_of_rep[tab.rep_slot]
    rows = np.nonzero(cols >= 0)[0]
    cols = cols[rows]
    vals = np.exp(-1j * k * tab.shift[rows]) / np.sqrt(tab.period[rows])
    lift = sp.csr_matrix((vals, (rows, cols)), shape=(basis.dim, int(ok_rep.sum())))
    return MomentumSector(
        basis, lift, k_index=n, reps=tab.reps[ok_rep], periods=tab.rep_period[ok_rep]
    )


def all_momentum_sectors(basis: ConstrainedBasis) -> list[MomentumSector]:
    n = basis.n_sites
    idx = [normalize_k_index(i, n) for i in range(n)]
    return [build_momentum_sector(basis, i) for i in sorted(idx)]


def build_semimomentum_block(basis: ConstrainedBasis, k_abs_index: int, parity: int) -> SemiMomentumBlock:
    """Real orthonormal basis of the inversion-parity ``parity`` subspace of ``{+k, -k}``."""
    _require_periodic(basis)
    if parity not in (1, -1):
        raise ValueError("parity must be +1 or -1")
    n_sites = basis.n_sites
    kk = abs(normalize_k_index(k_abs_index, n_sites))
    if kk * 2 > n_sites:
        raise ValueError("k_abs_index out of range")
    tab = orbit_table(basis)
    k = 2 * np.pi * kk / n_sites
    special = kk == 0 or 2 * kk == n_sites
    ok_rep = (kk * tab.rep_period) % n_sites == 0
    state_rep = tab.rep_slot
    rows = np.arange(basis.dim)
    keep = ok_rep[state_rep]
    phase = k * tab.shift

    nrep = tab.reps.shape[0]
    if special:
        c_vals = np.cos(phase) / np.sqrt(tab.period)
        s_vals = np.zeros_like(c_vals)
    else:
        c_vals = np.sqrt(2.0) * np.cos(phase) / np.sqrt(tab.period)
        s_vals = np.sqrt(2.0) * np.sin(phase) / np.sqrt(tab.period)
    C = sp.csr_matrix((c_vals[keep], (rows[keep], state_rep[keep])), shape=(basis.dim, nrep))
    S = sp.csr_matrix((s_vals[keep], (rows[keep], state_rep[keep])), shape=(basis.dim, nrep))

    bar, m = tab.reflection
    km = k * m
    mc_r, mc_c, mc_v = [], [], []
    ms_r, ms_c, ms_v = [], [], []
    col = 0
    inv2 = 1.0 / np.sqrt(2.0)
    for a in range(nrep):
        if not ok_rep[a]:
            continue
        b = bar[a]
        if b < a:
            continue
        ca, sa = np.cos(km[a]), np.sin(km[a])
        if special:
            if b == a:
                if round(ca) == parity:
                    mc_r.append(a); mc_c.append(col); mc_v.append(1.0)
                    col += 1
            else:
                mc_r += [a, b]; mc_c += [col, col]; mc_v += [inv2, parity * ca * inv2]
                col += 1
            continue
        if b == a:
            h = 0.5 * km[a]
            if parity == 1:
                cc, ss = np.cos(h), np.sin(h)
            else:
                cc, ss = -np.sin(h), np.cos(h)
            mc_r.append(a); mc_c.append(col); mc_v.append(cc)
            ms_r.append(a); ms_c.append(col); ms_v.append(ss)
            col += 1
        else:
            # (c_a + p I c_a)/sqrt2 and (s_a + p I s_a)/sqrt2
            mc_r += [a, b]; mc_c += [col, col]; mc_v += [inv2, parity * ca * inv2]
            ms_r.append(b); ms_c.append(col); ms_v.append(parity * sa * inv2)
            col += 1
            ms_r += [a, b]; ms_c += [col, col]; ms_v += [inv2, -parity * ca * inv2]
            mc_r.append(b); mc_c.append(col); mc_v.append(parity * sa * inv2)
            col += 1
    Mc = sp.csr_matrix((mc_v, (mc_r, mc_c)), shape=(nrep, col))
    Ms = sp.csr_matrix((ms_v, (ms_r, ms_c)), shape=(nrep, col))
    lift = (C @ Mc + S @ Ms).tocsr()
    lift.eliminate_zeros()
    return SemiMomentumBlock(basis, lift, k_abs_index=kk, parity=parity)


def all_semimomentum_blocks(basis: ConstrainedBasis) -> list[SemiMomentumBlock]:
    out = []
    for kk in range(basis.n_sites // 2 + 1):
        for p in (1, -1):
            blk = build_semimomentum_block(basis, kk, p)
            if blk.dim:
                out.append(blk)
    return out


def project_to_sector(state, sector: SymmetryBlock) -> np.ndarray:
    """Sector amplitudes ``V^H psi`` of a full-basis state (not renormalised)."""
    amps = state.amplitudes if hasattr(state, "amplitudes") else state
    return sector.project(amps)
