"""Rydberg-array emulation on a triangular ladder and comparison with the radius-2 chain.

Energies and times are in units of the Rabi frequency: the array Hamiltonian is
``H/Omega = (1/2) sum sigma^x - (Delta/Omega) sum n + (V1/Omega) sum n_j n_k / d^6``.
In the strict blockade limit it reduces to ``(1/2) H_2`` on the open chain, so
the effective model is propagated with ``H_2 / 2`` on the same clock.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .dynamics import QuenchSeries, evolve, quench_series
from .hilbert import BlockadeConstraint, ConstrainedBasis, enumerate_basis
from .operators import build_algebra, build_hamiltonian, build_observable, sign_profile
from .states import StateVector, extremal_algebra_state, extremal_eigvec

FULL_SPACE_LIMIT = 24
UNIT_TOL = 1e-9


@dataclass(frozen=True)
class AtomGeometry:
    """Atom positions in units of the lattice spacing ``a``; atoms are ordered along the chain."""

    positions: np.ndarray = field(repr=False)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError("positions must be an (N, 2) array")
        d = self._dist(pos)
        iu = np.triu_indices(pos.shape[0], 1)
        if np.any(d[iu] <= 0):
            raise ValueError("atoms must be at distinct positions")
        object.__setattr__(self, "positions", pos)

    @staticmethod
    def _dist(pos):
        return np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)

    @property
    def n_atoms(self) -> int:
        return int(self.positions.shape[0])

    @property
    def distances(self) -> np.ndarray:
        return self._dist(self.positions)

    def neighbours(self, radius: float = 1.0) -> list[list[int]]:
        d = self.distances
        return [[k for k in range(self.n_atoms) if k != j and d[j, k] <= radius + UNIT_TOL]
                for j in range(self.n_atoms)]

    def coordination(self, radius: float = 1.0) -> np.ndarray:
        return np.array([len(x) for x in self.neighbours(radius)])


def triangular_ladder_geometry(n_atoms: int) -> AtomGeometry:
    """Two staggered rows; atom ``j`` sits at ``(j/2, (j mod 2) sqrt(3)/2)``.

    Chain neighbours ``j +- 1`` and ``j +- 2`` are all at unit distance, so a
    nearest-neighbour blockade becomes a radius-2 blockade along the chain.
    """
    if n_atoms < 4:
        raise ValueError("a triangular ladder needs at least 4 atoms")
    j = np.arange(n_atoms)
    return AtomGeometry(np.column_stack([j / 2.0, (j % 2) * math.sqrt(3) / 2.0]))


@dataclass(frozen=True)
class RydbergParams:
    """Drive and interaction parameters, with ``Delta`` and ``V1`` in units of ``Omega``.

    ``v1 = inf`` is the strict blockade limit: pairs closer than the unit
    distance are removed from the Hilbert space instead of penalised.
    """

    omega: float = 2 * math.pi * 2.0  # rad / us
    delta: float = 0.213
    v1: float = 9.0
    cutoff: float = 3.0

    def __post_init__(self):
        if not self.v1 > 0:
            raise ValueError("v1 must be positive")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.cutoff >= 1.0:
            raise ValueError("interaction cutoff must include the nearest neighbours")

    @property
    def blockade_radius(self) -> float:
        """``R_b / a`` from ``Omega = V1 (a/R_b)^6``."""
        return math.inf if math.isinf(self.v1) else self.v1 ** (1.0 / 6.0)

    def to_microseconds(self, t) -> np.ndarray:
        return np.asarray(t) / self.omega


def experimental_space(geometry: AtomGeometry, params: RydbergParams) -> ConstrainedBasis:
    """Configurations the array Hamiltonian acts on.

    The full ``2^N`` space for finite ``V1``; with ``V1 = inf`` the states with
    an excited pair at unit distance are dropped.  For the triangular ladder
    that is exactly the radius-2 open chain.
    """
    n = geometry.n_atoms
    if n > FULL_SPACE_LIMIT:
        raise ValueError(f"{n} atoms exceed the full-space limit of {FULL_SPACE_LIMIT}")
    full = enumerate_basis(BlockadeConstraint(0, n, "open"))
    if not math.isinf(params.v1):
        return full
    pairs = _pairs_within(geometry, 1.0)
    ok = np.ones(full.dim, dtype=bool)
    for j, k in pairs:
        ok &= ~((((full.states >> j) & 1) == 1) & (((full.states >> k) & 1) == 1))
    # the blocked space is stored with the radius-2 open-chain label it reduces to on the ladder
    return ConstrainedBasis(BlockadeConstraint(2, n, "open"), full.states[ok].copy())


def _pairs_within(geometry: AtomGeometry, radius: float):
    d = geometry.distances
    j, k = np.triu_indices(geometry.n_atoms, 1)
    sel = d[j, k] <= radius + UNIT_TOL
    return list(zip(j[sel].tolist(), k[sel].tolist()))


def build_experimental_hamiltonian(geometry: AtomGeometry, params: RydbergParams,
                                   space: ConstrainedBasis | None = None) -> sp.csr_matrix:
    """Array Hamiltonian divided by ``Omega``, on ``space`` (default: ``experimental_space``)."""
    space = experimental_space(geometry, params) if space is None else space
    n = geometry.n_atoms
    states = space.states
    occ = ((states[:, None] >> np.arange(n)) & 1).astype(float)
    diag = -params.delta * occ.sum(axis=1)
    d = geometry.distances
    if not math.isinf(params.v1):
        for j, k in _pairs_within(geometry, params.cutoff):
            diag += params.v1 / d[j, k] ** 6 * occ[:, j] * occ[:, k]
    else:
        for j, k in _pairs_within(geometry, params.cutoff):
            if d[j, k] > 1.0 + UNIT_TOL:
                raise ValueError("the strict blockade limit is only defined with the interaction cut at d = 1")
    rows, cols = [], []
    for j in range(n):
        target = space.index(states ^ (1 << j))
        ok = target >= 0
        rows.append(np.nonzero(ok)[0])
        cols.append(target[ok])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    h = sp.csr_matrix((np.full(rows.size, 0.5), (rows, cols)), shape=(space.dim, space.dim))
    return (h + sp.diags(diag)).tocsr()


def embed(state: StateVector, space: ConstrainedBasis) -> StateVector:
    """Isometric embedding of a state into a larger configuration space."""
    src = state.full()
    idx = space.index(src.basis.states)
    if np.any(idx < 0):
        raise ValueError("state has support outside the target space")
    amps = np.zeros(space.dim, dtype=np.result_type(src.amplitudes.dtype, np.complex128))
    amps[idx] = src.amplitudes
    return StateVector(space, amps)


# ---------------------------------------------------------------------------
# state preparation


def rotation_phases(basis: ConstrainedBasis, pattern, angle: float = math.pi / 4) -> np.ndarray:
    """Diagonal of ``prod_j exp(-i f_j angle sigma^z_j)`` on ``basis``."""
    f = np.asarray(pattern, dtype=float)
    if f.shape != (basis.n_sites,):
        raise ValueError("rotation pattern must have one entry per site")
    sz = 2.0 * basis.occupations() - 1.0
    return np.exp(-1j * angle * (sz @ f))


def apply_rotations(state: StateVector, pattern, angle: float = math.pi / 4) -> StateVector:
    full = state.full()
    return StateVector(full.basis, rotation_phases(full.basis, pattern, angle) * full.amplitudes)


def hamiltonian_ground_state(basis: ConstrainedBasis) -> StateVector:
    _, vec = extremal_eigvec(build_hamiltonian(basis), "min")
    return StateVector(basis, vec)


@dataclass
class PreparedState:
    state: StateVector
    target: StateVector
    overlap: float
    pattern: np.ndarray


def preparation_protocol(basis: ConstrainedBasis, K: int = 4, algebra=None, sign: int = 1) -> PreparedState:
    """Ground state of ``H`` followed by single-site ``+-pi/2`` rotations about ``z``.

    The rotation pattern is ``sign * f_j`` with ``f`` the unit-cell sign profile,
    which turns ``sigma^x`` into ``+-sigma^y`` site by site and so maps the
    collective ``J^x`` onto ``J^y``.  Returns the prepared state together with
    ``|<GS_y|prepared>|``.
    """
    algebra = build_algebra(basis, K) if algebra is None else algebra
    gs = hamiltonian_ground_state(basis)
    pattern = sign * np.asarray(sign_profile(basis.n_sites, K), dtype=float)
    prepared = apply_rotations(gs, pattern)
    target = extremal_algebra_state(algebra, "GS_y").full()
    ov = float(abs(np.vdot(target.amplitudes, prepared.amplitudes)))
    return PreparedState(prepared, target, ov, pattern)


# ---------------------------------------------------------------------------
# dynamics comparison


@dataclass
class RydbergComparison:
    times: np.ndarray
    experimental: QuenchSeries
    effective: QuenchSeries
    params: RydbergParams

    def gap(self, name: str, t_max: float | None = None) -> float:
        sel = slice(None) if t_max is None else self.times <= t_max + 1e-12
        a = self.experimental.observables[name][sel]
        b = self.effective.observables[name][sel]
        return float(np.max(np.abs(a - b)))

    def columns(self) -> dict:
        out = {"t": self.times, "t_us": self.params.to_microseconds(self.times)}
        for k, v in self.experimental.observables.items():
            out[f"{k}_exp"] = v
        for k, v in self.effective.observables.items():
            out[f"{k}_eff"] = v
        return out

    def write_csv(self, path, header_lines=()) -> None:
        cols = self.columns()
        names = list(cols)
        data = np.column_stack([np.real(cols[k]) for k in names])
        with open(path, "w", encoding="utf-8") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write(",".join(names) + "\n")
            np.savetxt(fh, data, delimiter=",", fmt="%.10g")


def comparison_observables(basis: ConstrainedBasis, K: int = 4) -> dict:
    """Cell-averaged W projectors on both halves of the cell and the imbalance."""
    n = basis.n_sites
    cells = n // K
    first = sum(build_observable(basis, "w_projector", c * K, c * K + 1) for c in range(cells)) / cells
    return {
        "P_W": build_observable(basis, "cell_w_projector", K),
        "P_W_first": first.tocsr(),
        "imbalance": build_observable(basis, "imbalance"),
    }


def compare_effective(geometry: AtomGeometry, params: RydbergParams, initial: StateVector,
                      times, K: int = 4, method: str = "krylov") -> RydbergComparison:
    """Parallel ``P_W`` and imbalance series under the array Hamiltonian and under ``H_2 / 2``."""
    times = np.asarray(times, dtype=float)
    chain = initial.basis
    if chain.alpha != 2 or chain.periodic or chain.n_sites != geometry.n_atoms:
        raise ValueError("initial state must live on the radius-2 open chain of the same length")
    space = experimental_space(geometry, params)
    h_exp = build_experimental_hamiltonian(geometry, params, space)
    psi_exp = embed(initial, space)
    ser_exp = quench_series(evolve(h_exp, psi_exp, times, method=method),
                            observables=comparison_observables(space, K), meta={"model": "array"})
    h_eff = 0.5 * build_hamiltonian(chain)
    psi_eff = initial.full()
    ser_eff = quench_series(evolve(h_eff, psi_eff, times, method="eig"),
                            observables=comparison_observables(chain, K), meta={"model": "chain"})
    return RydbergComparison(times, ser_exp, ser_eff, params)


def gs_y_initial_state(n_atoms: int, K: int = 4) -> StateVector:
    basis = enumerate_basis(BlockadeConstraint(2, n_atoms, "open"))
    return extremal_algebra_state(build_algebra(basis, K), "GS_y").full()
