"""Sector-resolved exact diagonalisation and scar-tower diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._bipartition import cut_mask, entropy_from_schmidt
from .hilbert import ConstrainedBasis
from .operators import build_hamiltonian
from .states import StateVector
from .symmetry import (
    SymmetryBlock,
    all_momentum_sectors,
    all_semimomentum_blocks,
    build_momentum_sector,
)

DENSE_LIMIT = 20_000


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Eigenpairs of the Hamiltonian in one block (``block=None`` means the full basis)."""

    basis: ConstrainedBasis
    block: SymmetryBlock | None
    energies: np.ndarray
    vectors: np.ndarray = field(repr=False)

    @property
    def label(self) -> str:
        return "full" if self.block is None else self.block.label

    @property
    def key(self) -> tuple:
        return ("full",) if self.block is None else self.block.key

    def full_vectors(self, idx=None) -> np.ndarray:
        v = self.vectors if idx is None else self.vectors[:, idx]
        if self.block is None:
            return v
        return np.asarray(self.block.lift @ v)


def diagonalize_sector(space, dense_limit: int = DENSE_LIMIT, check: bool = False) -> Eigensystem:
    """Dense diagonalisation of ``H`` on a basis or symmetry block; ascending energies."""
    if isinstance(space, SymmetryBlock):
        basis, block = space.basis, space
    else:
        basis, block = space, None
    h = build_hamiltonian(space)
    d = h.shape[0]
    if d > dense_limit:
        raise ValueError(
            f"block dimension {d} exceeds the dense limit {dense_limit}; "
            "resolve momentum sectors or use Krylov time evolution instead"
        )
    dense = h.toarray()
    if np.iscomplexobj(dense) and np.allclose(dense.imag, 0.0, atol=1e-14):
        dense = dense.real
    w, v = np.linalg.eigh(dense)
    if check and d:
        res = np.linalg.norm(dense @ v - v * w, axis=0).max()
        if res > 1e-10:
            raise RuntimeError(f"eigenpair residual {res:.2e} above 1e-10")
    return Eigensystem(basis, block, w, v)


def diagonalize_all(basis: ConstrainedBasis, kind: str = "momentum",
                    dense_limit: int = DENSE_LIMIT) -> list[Eigensystem]:
    """All symmetry sectors of a periodic basis (``kind`` = ``momentum`` or ``semimomentum``).

    For momentum sectors the ``-k`` eigenvectors are the complex conjugates of
    the ``+k`` ones, so partner states carry identical overlaps with real probes.
    """
    if kind == "full" or not basis.periodic:
        return [diagonalize_sector(basis, dense_limit)]
    if kind == "semimomentum":
        return [diagonalize_sector(b, dense_limit) for b in all_semimomentum_blocks(basis)]
    if kind != "momentum":
        raise ValueError(f"unknown sector kind {kind!r}")
    out = {}
    for sec in all_momentum_sectors(basis):
        n = sec.k_index
        if sec.dim == 0:
            continue
        if n < 0 and -n in out:
            plus = out[-n]
            out[n] = Eigensystem(basis, sec, plus.energies.copy(), np.conj(plus.vectors))
            continue
        out[n] = diagonalize_sector(sec, dense_limit)
        if n > 0 and 2 * n != basis.n_sites and -n in out:
            # -k was visited first; rebuild it from +k for the conjugation convention
            minus_sec = out[-n].block
            out[-n] = Eigensystem(basis, minus_sec, out[n].energies.copy(), np.conj(out[n].vectors))
    return [out[k] for k in sorted(out)]


@dataclass(frozen=True)
class OverlapProfile:
    energies: np.ndarray
    overlaps: np.ndarray
    sector: np.ndarray  # index into ``labels``
    labels: tuple
    keys: tuple

    def __len__(self) -> int:
        return int(self.energies.shape[0])

    def records(self) -> list[tuple[float, float, str]]:
        return [(float(e), float(o), self.labels[s]) for e, o, s in zip(self.energies, self.overlaps, self.sector)]


def eigenstate_overlap_profile(eigs, probe: StateVector) -> OverlapProfile:
    """``(E, |<probe|E>|^2)`` over every eigenpair of every supplied sector, sorted by energy."""
    if isinstance(eigs, Eigensystem):
        eigs = [eigs]
    e_all, o_all, s_all = [], [], []
    for i, es in enumerate(eigs):
        if es.block is None:
            p = probe.full().amplitudes
        else:
            p = probe.in_block(es.block).amplitudes
        ov = np.abs(es.vectors.conj().T @ p) ** 2
        e_all.append(es.energies)
        o_all.append(ov)
        s_all.append(np.full(es.energies.shape[0], i))
    e = np.concatenate(e_all)
    o = np.concatenate(o_all)
    s = np.concatenate(s_all)
    order = np.lexsort((s, e))
    return OverlapProfile(e[order], o[order], s[order], tuple(x.label for x in eigs), tuple(x.key for x in eigs))


class _Bipartitioner:
    """Reusable Schmidt reshaping for one basis and one region mask."""

    def __init__(self, basis: ConstrainedBasis, mask: int):
        left = basis.states & mask
        right = basis.states & ~mask
        lu, self.li = np.unique(left, return_inverse=True)
        ru, self.ri = np.unique(right, return_inverse=True)
        self.shape = (lu.shape[0], ru.shape[0])

    def entropy(self, amps: np.ndarray) -> float:
        mat = np.zeros(self.shape, dtype=amps.dtype)
        mat[self.li, self.ri] = amps
        return entropy_from_schmidt(np.linalg.svd(mat, compute_uv=False))


def half_chain_cut(basis: ConstrainedBasis, K: int | None = None) -> tuple[int, int]:
    """Left region for a half-chain cut, aligned to a unit-cell boundary when ``K`` is given."""
    n = basis.n_sites
    half = n // 2
    if K:
        half = max(K, (half // K) * K) if n > K else half
    return (0, half)


def eigenstate_entropy_profile(eigs, cut=None, K: int | None = None) -> list[tuple[float, float, str]]:
    """``(E, S_vN)`` for every eigenvector, lifted to the full basis before the bipartition."""
    if isinstance(eigs, Eigensystem):
        eigs = [eigs]
    if not eigs:
        return []
    basis = eigs[0].basis
    cut = half_chain_cut(basis, K) if cut is None else cut
    part = _Bipartitioner(basis, cut_mask(basis.n_sites, cut, basis.periodic))
    out = []
    for es in eigs:
        full = es.full_vectors()
        for j, e in enumerate(es.energies):
            out.append((float(e), part.entropy(full[:, j]), es.label))
    out.sort(key=lambda r: (r[0], r[2]))
    return out


@dataclass
class TowerSummary:
    energies: np.ndarray  # top-of-tower energies, ascending
    top_overlaps: np.ndarray
    top_sectors: list  # sector label of each top state
    members: list  # number of member eigenstates per tower
    expected_count: int
    spacing: float
    messages: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return int(self.energies.shape[0])

    @property
    def total_members(self) -> int:
        return int(sum(self.members))

    @property
    def count_ok(self) -> bool:
        return self.count == self.expected_count

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "expected_count": self.expected_count,
            "count_ok": self.count_ok,
            "energies": [float(x) for x in self.energies],
            "top_overlaps": [float(x) for x in self.top_overlaps],
            "top_sectors": list(self.top_sectors),
            "members": list(self.members),
            "total_members": self.total_members,
            "spacing": float(self.spacing),
            "messages": list(self.messages),
        }


def _merge_zero_modes(profile: OverlapProfile, tol: float):
    """Collapse each sector's zero-energy eigenstates into one entry with summed overlap."""
    e, o, s = profile.energies, profile.overlaps, profile.sector
    zero = np.abs(e) < tol
    keep = ~zero
    e2, o2, s2 = list(e[keep]), list(o[keep]), list(s[keep])
    for sec in np.unique(s[zero]):
        sel = zero & (s == sec)
        e2.append(0.0)
        o2.append(float(o[sel].sum()))
        s2.append(int(sec))
    e2, o2, s2 = np.array(e2), np.array(o2), np.array(s2, dtype=int)
    order = np.lexsort((s2, e2))
    return e2[order], o2[order], s2[order]


def identify_scar_towers(profile: OverlapProfile, K: int, N: int, spacing: float | None = None,
                         exclusion: float = 0.75, prominence: float = 5.0, zero_tol: float = 1e-8,
                         degeneracy_tol: float = 1e-7) -> TowerSummary:
    """Locate the ``2N/K + 1`` scar-tower energies in an overlap profile.

    The mean tower spacing ``D`` defaults to ``(E_max - E_min) / (2N/K)``.
    Candidates are visited in order of decreasing overlap; a candidate becomes a
    tower top when no accepted top lies within ``exclusion * D`` and its overlap
    exceeds ``prominence`` times the median overlap of the probe-supported
    states within ``D/2`` of it (its local window).  Zero modes of each sector
    are merged into a single entry first.  Member states of a tower are the
    eigenstates degenerate with its top (within ``degeneracy_tol``) carrying at
    least half of its overlap.  A count mismatch is reported, not corrected.
    """
    expected = 2 * N // K + 1
    e, o, s = _merge_zero_modes(profile, zero_tol)
    if e.size == 0:
        return TowerSummary(np.zeros(0), np.zeros(0), [], [], expected, 0.0, ["empty profile"])
    if spacing is None:
        spacing = (e.max() - e.min()) / max(1, expected - 1)
    n_sec = int(s.max()) + 1
    supported = np.array([o[s == k].sum() > 1e-12 for k in range(n_sec)])[s]
    radius = exclusion * spacing
    tops, ratios = [], []
    for i in np.argsort(-o, kind="stable"):
        if o[i] <= 0.0:
            break
        if tops and np.min(np.abs(e[tops] - e[i])) < radius:
            continue
        dist = np.abs(e - e[i])
        local = supported & (dist < 0.5 * spacing) & (dist > degeneracy_tol)
        background = float(np.median(o[local])) if local.any() else 0.0
        if o[i] <= prominence * background:
            continue
        tops.append(i)
        ratios.append(np.inf if background == 0.0 else o[i] / background)
    order = np.argsort(e[tops]) if tops else []
    tops = [tops[j] for j in order]
    energies, top_ov, sectors, members = [], [], [], []
    for i in tops:
        degenerate = (np.abs(e - e[i]) < degeneracy_tol) & (o >= 0.5 * o[i])
        energies.append(e[i])
        top_ov.append(o[i])
        sectors.append(profile.labels[s[i]])
        members.append(int(degenerate.sum()))
    msgs = []
    if len(tops) != expected:
        msgs.append(f"found {len(tops)} towers, expected {expected}")
    return TowerSummary(np.array(energies), np.array(top_ov), sectors, members, expected,
                        float(spacing), msgs)


def tower_sector_pattern(summary: TowerSummary) -> list[str]:
    return list(summary.top_sectors)


def alternates(labels: list) -> bool:
    """True when consecutive entries always differ."""
    return all(a != b for a, b in zip(labels, labels[1:]))


def sector_dimensions(basis: ConstrainedBasis) -> dict:
    return {sec.k_index: sec.dim for sec in all_momentum_sectors(basis)}


def momentum_eigensystem(basis: ConstrainedBasis, k_index: int) -> Eigensystem:
    return diagonalize_sector(build_momentum_sector(basis, k_index))
