"""Quench dynamics: propagation, time series of diagnostics, revival metrics, random baselines."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal
from scipy.signal import find_peaks

from . import _kernels
from ._bipartition import cut_mask
from .hilbert import ConstrainedBasis, quantum_dimension
from .spectrum import Eigensystem, _Bipartitioner, diagonalize_sector
from .states import StateVector
from .symmetry import SymmetryBlock, build_momentum_sector

EIG_LIMIT = 2500
KRYLOV_MAX_DIM = 64
KRYLOV_TOL = 1e-10


class KrylovError(RuntimeError):
    pass


def default_t_est(K: int) -> float:
    """Revival-time scale of the two-level cell picture, ``pi / sqrt(K/2)``."""
    return math.pi / math.sqrt(K / 2.0)


def default_times(K: int, periods: float = 3.0, per_period: int = 200) -> np.ndarray:
    t_est = default_t_est(K)
    n = int(round(periods * per_period))
    return np.linspace(0.0, periods * t_est, n + 1)


# ---------------------------------------------------------------------------
# Krylov propagation


def _lanczos_expm(h, v: np.ndarray, dt: float, m_max: int, tol: float):
    """``exp(-i h dt) v`` from a Lanczos space; returns ``(w, ok)``."""
    beta0 = np.linalg.norm(v)
    if beta0 == 0.0:
        return v.copy(), True
    n = v.shape[0]
    m_max = min(m_max, n)
    vecs = [v / beta0]
    alphas, betas = [], []
    prev = np.zeros_like(v)
    b_prev = 0.0
    for j in range(m_max):
        w = _kernels.csr_matvec(h, vecs[j])
        a = float(np.real(np.vdot(vecs[j], w)))
        w = w - a * vecs[j] - b_prev * prev
        # full reorthogonalisation keeps the small basis clean
        for u in vecs:
            w -= np.vdot(u, w) * u
        b = float(np.linalg.norm(w))
        alphas.append(a)
        m = j + 1
        evals, evecs = eigh_tridiagonal(np.array(alphas), np.array(betas)) if m > 1 else (
            np.array(alphas), np.ones((1, 1)))
        coef = evecs @ (np.exp(-1j * dt * evals) * evecs[0].conj())
        err = beta0 * b * abs(coef[-1])
        if b < 1e-14 or err < tol or m == n:
            basis = np.column_stack(vecs)
            return beta0 * (basis @ coef), True
        if m == m_max:
            return None, False
        betas.append(b)
        prev, b_prev = vecs[j], b
        vecs.append(w / b)
    return None, False


def krylov_propagate(h, psi: np.ndarray, dt: float, m_max: int = KRYLOV_MAX_DIM,
                     tol: float = KRYLOV_TOL, min_step: float = 1e-12) -> np.ndarray:
    """Advance ``psi`` by ``dt`` with adaptive sub-steps (halved until the error estimate passes)."""
    psi = np.asarray(psi, dtype=np.complex128)
    remaining = dt
    step = dt
    while remaining > 0.0:
        step = min(step, remaining)
        out, ok = _lanczos_expm(h, psi, step, m_max, tol)
        if not ok:
            step *= 0.5
            if step < min_step:
                raise KrylovError(f"Krylov step collapsed below {min_step:g}")
            continue
        psi = out
        remaining -= step
        if remaining < 1e-15 * max(1.0, abs(dt)):
            break
        step *= 2.0
    return psi


# ---------------------------------------------------------------------------
# trajectories


class Trajectory:
    """Lazily generated ``psi(t)`` on a fixed time grid.

    Iterating yields ``(t, amplitudes)``; amplitudes live in ``(basis, block)``
    where ``block=None`` means the full constrained basis.
    """

    def __init__(self, times, basis: ConstrainedBasis, block: SymmetryBlock | None, psi0: StateVector):
        self.times = np.asarray(times, dtype=float)
        if self.times.ndim != 1 or self.times.size == 0:
            raise ValueError("times must be a non-empty 1-D array")
        if np.any(np.diff(self.times) < 0):
            raise ValueError("times must be ascending")
        self.basis = basis
        self.block = block
        self.psi0 = psi0

    def __iter__(self):  # pragma: no cover - abstract
        raise NotImplementedError

    def state_at_index(self, i: int) -> StateVector:
        for j, (_, amps) in enumerate(self):
            if j == i:
                return StateVector(self.basis, amps, self.block)
        raise IndexError(i)

    def overlaps(self, target: StateVector) -> np.ndarray:
        """``<target|psi(t)>`` over the grid."""
        tv = _coeffs_in(target, self.basis, self.block)
        return np.array([np.vdot(tv, amps) for _, amps in self])

    def full(self, amps: np.ndarray) -> np.ndarray:
        return amps if self.block is None else np.asarray(self.block.lift @ amps)


def _coeffs_in(state: StateVector, basis, block) -> np.ndarray:
    if block is None:
        return state.full().amplitudes
    return state.in_block(block).amplitudes


class EigTrajectory(Trajectory):
    """Propagation through a dense eigendecomposition of one block."""

    def __init__(self, h, psi0: StateVector, times, basis, block):
        super().__init__(times, basis, block, psi0)
        dense = h.toarray() if sp.issparse(h) else np.asarray(h)
        self.energies, self.vectors = np.linalg.eigh(dense)
        self.c0 = self.vectors.conj().T @ _coeffs_in(psi0, basis, block)

    def __iter__(self):
        for t in self.times:
            yield t, self.vectors @ (np.exp(-1j * self.energies * t) * self.c0)

    def overlaps(self, target: StateVector) -> np.ndarray:
        tc = self.vectors.conj().T @ _coeffs_in(target, self.basis, self.block)
        w = tc.conj() * self.c0
        return np.exp(-1j * np.outer(self.times, self.energies)) @ w


class KrylovTrajectory(Trajectory):
    def __init__(self, h, psi0: StateVector, times, basis, block, m_max=KRYLOV_MAX_DIM, tol=KRYLOV_TOL):
        super().__init__(times, basis, block, psi0)
        self.h = h.tocsr()
        self.m_max = m_max
        self.tol = tol

    def __iter__(self):
        psi = _coeffs_in(self.psi0, self.basis, self.block).astype(np.complex128)
        t_prev = 0.0
        for t in self.times:
            if t > t_prev:
                psi = krylov_propagate(self.h, psi, t - t_prev, self.m_max, self.tol)
                t_prev = t
            yield t, psi


class SpectralTrajectory(Trajectory):
    """Propagation through the eigensystems of several symmetry sectors; yields full-basis vectors."""

    def __init__(self, eigs: list[Eigensystem], psi0: StateVector, times):
        basis = eigs[0].basis
        super().__init__(times, basis, None, psi0)
        full = psi0.full().amplitudes
        self.eigs = eigs
        self.coeffs = []
        for es in eigs:
            v = full if es.block is None else es.block.project(full)
            self.coeffs.append(es.vectors.conj().T @ v)
        captured = sum(float(np.sum(np.abs(c) ** 2)) for c in self.coeffs)
        self.captured_weight = captured

    def __iter__(self):
        for t in self.times:
            out = np.zeros(self.basis.dim, dtype=np.complex128)
            for es, c in zip(self.eigs, self.coeffs):
                vec = es.vectors @ (np.exp(-1j * es.energies * t) * c)
                out += vec if es.block is None else es.block.lift @ vec
            yield t, out

    def overlaps(self, target: StateVector) -> np.ndarray:
        full = target.full().amplitudes
        out = np.zeros(self.times.shape[0], dtype=np.complex128)
        for es, c in zip(self.eigs, self.coeffs):
            v = full if es.block is None else es.block.project(full)
            w = (es.vectors.conj().T @ v).conj() * c
            out += np.exp(-1j * np.outer(self.times, es.energies)) @ w
        return out


def evolve(h, psi0: StateVector, times, method: str = "auto", eig_limit: int = EIG_LIMIT,
           m_max: int = KRYLOV_MAX_DIM, tol: float = KRYLOV_TOL) -> Trajectory:
    """``psi(t) = exp(-i H t) psi0`` on ``times``.

    ``h`` acts on the space of ``psi0`` (its block when it has one).  ``method`` is
    ``eig`` (dense eigendecomposition), ``krylov`` (adaptive Lanczos), or ``auto``
    (eigendecomposition up to ``eig_limit`` states).
    """
    nrm = psi0.norm
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"initial state has norm {nrm}, expected 1")
    if h.shape[0] != psi0.dim:
        raise ValueError(f"operator dimension {h.shape[0]} does not match state dimension {psi0.dim}")
    if method == "auto":
        method = "eig" if psi0.dim <= eig_limit else "krylov"
    if method == "eig":
        return EigTrajectory(h, psi0, times, psi0.basis, psi0.block)
    if method == "krylov":
        return KrylovTrajectory(h, psi0, times, psi0.basis, psi0.block, m_max, tol)
    raise ValueError(f"unknown method {method!r}")


def sector_eigensystems(basis: ConstrainedBasis, k_indices) -> list[Eigensystem]:
    """Eigensystems of the listed momentum sectors, with ``-k`` built by conjugating ``+k``."""
    done: dict[int, Eigensystem] = {}
    for n in k_indices:
        sec = build_momentum_sector(basis, n)
        if sec.dim == 0:
            continue
        if -sec.k_index in done and 2 * sec.k_index % basis.n_sites:
            partner = done[-sec.k_index]
            done[sec.k_index] = Eigensystem(basis, sec, partner.energies.copy(), np.conj(partner.vectors))
        else:
            done[sec.k_index] = diagonalize_sector(sec)
    return [done[k] for k in sorted(done)]


def support_momenta(state: StateVector, tol: float = 1e-12) -> list[int]:
    """Momentum indices carrying weight above ``tol``."""
    basis = state.basis
    out = []
    full = state.full().amplitudes
    from .symmetry import all_momentum_sectors

    for sec in all_momentum_sectors(basis):
        if sec.dim and np.linalg.norm(sec.project(full)) ** 2 > tol:
            out.append(sec.k_index)
    return out


def evolve_spectral(eigs: list[Eigensystem], psi0: StateVector, times) -> SpectralTrajectory:
    return SpectralTrajectory(eigs, psi0, times)


# ---------------------------------------------------------------------------
# time series


@dataclass
class QuenchSeries:
    times: np.ndarray
    fidelity: np.ndarray
    transfers: dict = field(default_factory=dict)
    entropy: dict = field(default_factory=dict)
    observables: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def columns(self) -> dict:
        cols = {"t": self.times, "fidelity": self.fidelity}
        for k, v in self.transfers.items():
            cols[f"transfer:{k}"] = v
        for k, v in self.entropy.items():
            cols[f"entropy:{k}"] = v
        for k, v in self.observables.items():
            cols[f"obs:{k}"] = v
        return cols

    def write_csv(self, path, header_lines=()) -> None:
        cols = self.columns()
        names = list(cols)
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(names)
            for i in range(len(self.times)):
                w.writerow([repr(float(cols[n][i])) for n in names])


def _cut_label(cut) -> str:
    return f"{cut[0]}-{cut[1]}" if isinstance(cut, (tuple, list)) else str(cut)


def quench_series(traj: Trajectory, targets: dict | None = None, cuts=(), observables: dict | None = None,
                  meta: dict | None = None) -> QuenchSeries:
    """Fidelity, state transfers, entanglement entropies and expectation values along a trajectory.

    ``targets`` maps names to states; ``cuts`` are integer or ``(a, b)`` region
    cuts; ``observables`` maps names to operators on the full basis.
    """
    targets = dict(targets or {})
    observables = dict(observables or {})
    fid = np.abs(traj.overlaps(traj.psi0)) ** 2
    transfers = {name: np.abs(traj.overlaps(st)) ** 2 for name, st in targets.items()}
    entropy, obs = {}, {}
    if cuts or observables:
        basis = traj.basis
        parts = {_cut_label(c): _Bipartitioner(basis, cut_mask(basis.n_sites, c, basis.periodic)) for c in cuts}
        ent = {k: [] for k in parts}
        vals = {k: [] for k in observables}
        for _, amps in traj:
            full = traj.full(amps)
            for k, part in parts.items():
                ent[k].append(part.entropy(full))
            for k, op in observables.items():
                vals[k].append(float(np.real(np.vdot(full, op @ full))))
        entropy = {k: np.array(v) for k, v in ent.items()}
        obs = {k: np.array(v) for k, v in vals.items()}
    m = {"n_sites": traj.basis.n_sites, "alpha": traj.basis.alpha}
    m.update(meta or {})
    return QuenchSeries(traj.times.copy(), np.clip(fid, 0.0, 1.0), transfers, entropy, obs, m)


# ---------------------------------------------------------------------------
# revivals


@dataclass(frozen=True)
class RevivalMetrics:
    first_revival_time: float
    fidelity: float
    fidelity_density: float
    ratio: float  # ln(d) / f1, ``inf`` for a perfect revival
    reviving: bool

    def as_dict(self) -> dict:
        return {
            "T1": self.first_revival_time,
            "F1": self.fidelity,
            "f1": self.fidelity_density,
            "ln_d_over_f1": "inf" if math.isinf(self.ratio) else self.ratio,
            "reviving": self.reviving,
        }


def _refine_peak(t, f, i):
    if 0 < i < len(f) - 1:
        y0, y1, y2 = f[i - 1], f[i], f[i + 1]
        den = y0 - 2 * y1 + y2
        if den < 0:
            shift = 0.5 * (y0 - y2) / den
            h = t[i + 1] - t[i]
            return t[i] + shift * h, y1 - 0.25 * (y0 - y2) * shift
    return t[i], f[i]


def revival_metrics(series: QuenchSeries, alpha: int, K: int | None = None, n_sites: int | None = None,
                    t_est: float | None = None, prominence: float = 0.1) -> RevivalMetrics:
    """First revival after an exclusion window of ``t_est / 2``.

    The first revival is the earliest fidelity peak after the exclusion window
    whose topographic prominence is at least ``prominence`` times the fidelity
    range over that part of the series (so round-off wiggles in a decayed
    signal are skipped), refined by a parabola through the neighbouring grid
    points.  Without such a peak the global maximum after the window is
    reported and ``reviving`` is False.
    """
    n = n_sites if n_sites is not None else series.meta.get("n_sites")
    if n is None:
        raise ValueError("system size unknown")
    if t_est is None:
        K = K if K is not None else series.meta.get("K")
        if K is None:
            raise ValueError("need K or t_est to set the exclusion window")
        t_est = default_t_est(K)
    t, f = series.times, series.fidelity
    start = int(np.searchsorted(t, 0.5 * t_est))
    if start >= t.size:
        raise ValueError("time window shorter than the exclusion window")
    tail = f[start:]
    span = float(tail.max() - tail.min())
    peaks, _ = find_peaks(tail, prominence=max(prominence * span, 1e-300)) if span > 0 else ([], None)
    reviving = len(peaks) > 0
    found = start + int(peaks[0]) if reviving else start + int(np.argmax(tail))
    t1, f1 = _refine_peak(t, f, found)
    f1 = min(max(f1, 1e-300), 1.0)
    dens = max(0.0, -math.log(f1) / n)
    d = quantum_dimension(alpha)
    ratio = math.inf if dens == 0.0 else math.log(d) / dens
    return RevivalMetrics(float(t1), float(f1), float(dens), float(ratio), reviving)


def overlap_approximation(reference: QuenchSeries, weight: float) -> np.ndarray:
    """Fidelity of a state predicted from its weight on a reviving reference state.

    If all the coherent dynamics of ``|psi>`` comes from its component along
    ``|ref>``, its fidelity is roughly ``|<psi|ref>|^2`` times the fidelity of
    ``|ref>``.  ``weight`` is that squared overlap.
    """
    if not 0.0 <= weight <= 1.0 + 1e-12:
        raise ValueError("weight must be a squared overlap in [0, 1]")
    return weight * reference.fidelity


# ---------------------------------------------------------------------------
# random baselines


def random_basis_state(basis: ConstrainedBasis, rng: np.random.Generator, eigs: list[Eigensystem] | None = None,
                       max_tries: int = 1000) -> StateVector:
    """Uniformly drawn basis state projected onto the sectors of ``eigs`` (if given), normalised."""
    for _ in range(max_tries):
        idx = int(rng.integers(basis.dim))
        amps = np.zeros(basis.dim, dtype=np.complex128)
        amps[idx] = 1.0
        if eigs:
            proj = np.zeros_like(amps)
            for es in eigs:
                proj += es.block.embed(es.block.project(amps)) if es.block is not None else amps
            amps = proj
        nrm = np.linalg.norm(amps)
        if nrm > 1e-12:
            return StateVector(basis, amps / nrm)
    raise RuntimeError("could not draw a state with weight in the requested sectors")


def random_baseline(basis: ConstrainedBasis, eigs: list[Eigensystem], n_samples: int, seed: int, times,
                    meta: dict | None = None) -> list[QuenchSeries]:
    """Fidelity series for random computational basis states projected onto the given sectors."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_samples):
        psi = random_basis_state(basis, rng, eigs)
        traj = SpectralTrajectory(eigs, psi, times)
        out.append(quench_series(traj, meta=meta))
    return out
