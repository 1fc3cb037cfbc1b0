"""Initial states: unit-cell |K> states, product states, algebra eigenstates, MPS states."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _kernels
from .hilbert import ConstrainedBasis
from .operators import AlgebraSet
from .symmetry import SymmetryBlock, reflect_bits

DEFAULT_BETA = 0.65
DENSE_EIG_LIMIT = 3000

# optimised angles of the period-(2 alpha + 1) reviving state, in units of pi
THETA_STAR = {
    1: (0.0, 0.1162, 0.5),
    2: (0.0, 0.0, 0.1266, 0.25, 0.5),
    3: (0.0, 0.0, 0.0, 0.0645, 0.2017, 0.2665, 0.5),
}


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes over a constrained basis, or over a symmetry block of it when ``block`` is set."""

    basis: ConstrainedBasis
    amplitudes: np.ndarray = field(repr=False)
    block: SymmetryBlock | None = None

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.shape[0] != self.dim:
            raise ValueError(f"amplitude vector of length {amps.shape[0]} for space of dim {self.dim}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.basis.dim if self.block is None else self.block.dim

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        nrm = self.norm
        if nrm == 0.0:
            raise ValueError("cannot normalise a zero vector")
        return StateVector(self.basis, self.amplitudes / nrm, self.block)

    def full(self) -> "StateVector":
        """The same state expressed in the full constrained basis."""
        if self.block is None:
            return self
        return StateVector(self.basis, self.block.embed(self.amplitudes))

    def in_block(self, block: SymmetryBlock) -> "StateVector":
        if self.block is block:
            return self
        return StateVector(self.basis, block.project(self.full().amplitudes), block)

    def expectation(self, op) -> float:
        return float(np.real(np.vdot(self.amplitudes, op @ self.amplitudes)))

    def reflected(self) -> "StateVector":
        """Spatial inversion ``I`` applied to the state (full basis)."""
        f = self.full()
        tgt = f.basis.index(reflect_bits(f.basis.states, f.basis.n_sites))
        out = np.zeros_like(f.amplitudes)
        out[tgt] = f.amplitudes
        return StateVector(f.basis, out)


def overlap(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``."""
    if a.basis is not b.basis and not (
        a.basis.constraint == b.basis.constraint and a.basis.dim == b.basis.dim
    ):
        raise ValueError("states live in different bases")
    if a.block is not b.block:
        a, b = a.full(), b.full()
    return complex(np.vdot(a.amplitudes, b.amplitudes))


@dataclass(frozen=True)
class UnitCellSpec:
    alpha: int
    K: int
    n_cells: int
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if self.K < 1 or self.n_cells < 1:
            raise ValueError("K and the number of cells must be positive")

    @property
    def n_sites(self) -> int:
        return self.K * self.n_cells

    @classmethod
    def for_basis(cls, basis: ConstrainedBasis, K: int, beta: float = DEFAULT_BETA) -> "UnitCellSpec":
        if K > basis.n_sites:
            raise ValueError(f"K={K} exceeds N={basis.n_sites}")
        if basis.n_sites % K:
            raise ValueError(f"unit cell K={K} does not divide N={basis.n_sites}")
        return cls(basis.alpha, K, basis.n_sites // K, beta)


def cell_amplitudes(K: int, beta: float = DEFAULT_BETA) -> np.ndarray:
    """Amplitude table (length ``2**K``) of one unit cell.

    Even ``K``: vacuum on the first half, W-state on the second half.  Odd ``K``:
    vacuum on the first ``(K-1)/2`` sites, then the deformed W-state
    ``beta|up 0..0> + sqrt(h)|down>|W>_h`` (normalised) on the remaining ``h+1``.
    """
    table = np.zeros(1 << K)
    if K % 2 == 0:
        h = K // 2
        for j in range(h, K):
            table[1 << j] = 1.0 / np.sqrt(h)
        return table
    h = (K - 1) // 2
    if np.isinf(beta):
        table[1 << h] = 1.0
        return table
    if h == 0:
        table[1] = 1.0
        return table
    nrm = np.sqrt(beta**2 + h)
    table[1 << h] = beta / nrm
    for j in range(h + 1, K):
        table[1 << j] = 1.0 / nrm
    return table


def build_k_state(basis: ConstrainedBasis, spec: UnitCellSpec) -> StateVector:
    """Tensor product of unit-cell states, projected onto the constrained space and normalised."""
    if spec.n_sites != basis.n_sites:
        raise ValueError(f"{spec.n_cells} cells of {spec.K} sites do not tile N={basis.n_sites}")
    table = cell_amplitudes(spec.K, spec.beta)
    cell_mask = (1 << spec.K) - 1
    amps = np.ones(basis.dim)
    for c in range(spec.n_cells):
        amps *= table[(basis.states >> (c * spec.K)) & cell_mask]
    nrm = np.linalg.norm(amps)
    if nrm == 0.0:
        raise ValueError("unit-cell state has no weight in the constrained space")
    return StateVector(basis, amps / nrm)


def pattern_bits(pattern, n_sites: int) -> int:
    """Bitmask for ``"Z<d>"`` (site d-1 of every d-site cell up) or an explicit 0/1 string."""
    if isinstance(pattern, str) and pattern.upper().startswith("Z") and pattern[1:].isdigit():
        d = int(pattern[1:])
        if d < 1 or n_sites % d:
            raise ValueError(f"Z{d} does not tile {n_sites} sites")
        return sum(1 << (c * d + d - 1) for c in range(n_sites // d))
    s = str(pattern).replace("↑", "1").replace("↓", "0")
    if len(s) != n_sites or set(s) - {"0", "1"}:
        raise ValueError(f"bitstring {pattern!r} does not describe {n_sites} sites")
    return sum(1 << j for j, ch in enumerate(s) if ch == "1")


def build_product_state(basis: ConstrainedBasis, pattern) -> StateVector:
    bits = pattern_bits(pattern, basis.n_sites)
    idx = basis.index(bits)
    if idx < 0:
        raise ValueError(f"pattern {pattern!r} violates the blockade constraint")
    amps = np.zeros(basis.dim)
    amps[idx] = 1.0
    return StateVector(basis, amps)


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    ph = vec[k] / abs(vec[k])
    return vec / ph


def extremal_eigvec(op, which: str = "min") -> tuple[float, np.ndarray]:
    """Lowest (``"min"``) or highest (``"max"``) eigenpair of a Hermitian matrix."""
    d = op.shape[0]
    if d <= DENSE_EIG_LIMIT:
        dense = op.toarray() if sp.issparse(op) else np.asarray(op)
        w, v = np.linalg.eigh(dense)
        k = 0 if which == "min" else -1
        return float(w[k]), v[:, k]
    mode = "SA" if which == "min" else "LA"
    v0 = np.ones(d, dtype=op.dtype) / np.sqrt(d)
    try:
        w, v = spla.eigsh(op, k=1, which=mode, v0=v0, tol=1e-12, maxiter=20 * d)
    except spla.ArpackNoConvergence as exc:
        raise RuntimeError("eigensolver did not converge") from exc
    return float(w[0]), v[:, 0]


def extremal_algebra_state(algebra: AlgebraSet, which: str) -> StateVector:
    """Ground (``GS_y``, ``GS_z``) or ceiling (``CS_y``, ``CS_z``) state of ``J^y`` or ``J^z``.

    The largest-magnitude amplitude is made real and positive.
    """
    key = which.replace("_", "").upper()
    table = {"GSY": ("y", "min"), "CSY": ("y", "max"), "GSZ": ("z", "min"), "CSZ": ("z", "max")}
    if key not in table:
        raise ValueError(f"unknown extremal state {which!r}")
    comp, end = table[key]
    op = algebra.j_y if comp == "y" else algebra.j_z
    _, vec = extremal_eigvec(op, end)
    basis = algebra.basis if algebra.basis is not None else algebra.block.basis
    return StateVector(basis, _fix_phase(vec), algebra.block)


@dataclass(frozen=True)
class MPSAnsatz:
    """Companion-form MPS of bond dimension ``alpha+1`` with a ``K``-site angle unit cell."""

    alpha: int
    theta: tuple
    phi: tuple = None

    def __post_init__(self):
        th = tuple(float(t) for t in self.theta)
        ph = tuple(0.0 for _ in th) if self.phi is None else tuple(float(p) for p in self.phi)
        if len(ph) != len(th) or not th:
            raise ValueError("theta and phi must have the same non-zero length")
        if not all(np.isfinite(th + ph)):
            raise ValueError("angles must be finite")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", ph)

    @property
    def K(self) -> int:
        return len(self.theta)

    @property
    def bond_dimension(self) -> int:
        return self.alpha + 1

    @classmethod
    def from_pi_units(cls, alpha: int, theta_over_pi, phi_over_pi=None) -> "MPSAnsatz":
        th = [np.pi * t for t in theta_over_pi]
        ph = None if phi_over_pi is None else [np.pi * p for p in phi_over_pi]
        return cls(alpha, th, ph)

    def tensor(self, j: int) -> np.ndarray:
        """``(2, chi, chi)`` tensor of site ``j`` (index 0 = down, 1 = up)."""
        chi = self.alpha + 1
        t, p = self.theta[j % self.K], self.phi[j % self.K]
        a = np.zeros((2, chi, chi), dtype=np.complex128)
        a[0, 0, 0] = np.cos(t)
        a[1, 0, chi - 1] = np.exp(1j * p) * np.sin(t)
        for r in range(1, chi):
            a[0, r, r - 1] = 1.0
        return a

    def site_amplitudes(self, n_sites: int) -> tuple[np.ndarray, np.ndarray]:
        if n_sites % self.K:
            raise ValueError(f"angle unit cell K={self.K} does not divide N={n_sites}")
        th = np.tile(np.asarray(self.theta), n_sites // self.K)
        ph = np.tile(np.asarray(self.phi), n_sites // self.K)
        return np.exp(1j * ph) * np.sin(th), np.cos(th).astype(np.complex128)


def k_state_angles(alpha: int, K: int, beta: float = DEFAULT_BETA) -> MPSAnsatz:
    """Angles representing the unit-cell state exactly for ``2 alpha <= K <= 2 alpha + 2``."""
    if not 2 * alpha <= K <= 2 * alpha + 2 or K < 1:
        raise ValueError(f"K={K} outside the window [2 alpha, 2 alpha + 2] for alpha={alpha}")
    a = [np.pi / 2]
    while len(a) < K:
        a.append(np.arctan(np.sin(a[-1])))
    if K % 2 == 0:
        theta = [0.0 if j <= K // 2 else a[K - j] for j in range(1, K + 1)]
    else:
        h = (K - 1) // 2
        tail = [a[h - 1 - i] for i in range(h)]  # a_h, ..., a_1
        mid = np.pi / 2 if np.isinf(beta) else np.arctan(beta * np.sin(tail[0]))
        theta = [0.0] * h + [mid] + tail
    return MPSAnsatz(alpha, theta)


def theta_star_ansatz(alpha: int) -> MPSAnsatz:
    if alpha not in THETA_STAR:
        raise ValueError(f"no tabulated optimal angles for alpha={alpha}")
    return MPSAnsatz.from_pi_units(alpha, THETA_STAR[alpha])


def mps_amplitudes(ansatz: MPSAnsatz, basis: ConstrainedBasis) -> np.ndarray:
    """Unnormalised tensor-chain amplitudes (trace on a ring, open boundary vectors otherwise)."""
    if ansatz.alpha != basis.alpha:
        raise ValueError(f"ansatz alpha={ansatz.alpha} but basis alpha={basis.alpha}")
    up, down = ansatz.site_amplitudes(basis.n_sites)
    return _kernels.mps_amplitudes(basis.states, up, down, basis.alpha, basis.periodic)


def mps_to_statevector(ansatz: MPSAnsatz, basis: ConstrainedBasis) -> StateVector:
    amps = mps_amplitudes(ansatz, basis)
    nrm = np.linalg.norm(amps)
    if nrm == 0.0 or not np.isfinite(nrm):
        raise ValueError("MPS state has zero norm on this basis")
    return StateVector(basis, amps / nrm)


def fsa_basis(algebra: AlgebraSet, start: StateVector, max_vectors: int | None = None,
              tol: float = 1e-10) -> np.ndarray:
    """Orthonormal columns spanning ``(J+)^n |start>``, with full Gram-Schmidt re-orthogonalisation."""
    v = start.amplitudes if start.block is algebra.block else start.in_block(algebra.block).amplitudes
    v = v / np.linalg.norm(v)
    vecs = [v]
    limit = max_vectors if max_vectors is not None else algebra.j_plus.shape[0]
    while len(vecs) < limit:
        w = algebra.j_plus @ vecs[-1]
        for _ in range(2):
            for u in vecs:
                w = w - np.vdot(u, w) * u
        nw = np.linalg.norm(w)
        if nw < tol:
            break
        vecs.append(w / nw)
    return np.column_stack(vecs)


def optimize_beta(basis: ConstrainedBasis, K: int, bracket=(0.3, 1.2), tol: float = 1e-3,
                  t_max: float | None = None) -> tuple[float, float]:
    """Golden-section search for the deformation maximising the first-revival fidelity.

    Returns ``(beta, F1)``.
    """
    from scipy.optimize import minimize_scalar

    from .dynamics import evolve, quench_series, revival_metrics
    from .operators import build_hamiltonian

    if K % 2 == 0:
        raise ValueError("the deformation only applies to odd K")
    h = build_hamiltonian(basis)
    t_est = np.pi / np.sqrt(K / 2)
    t_max = t_max if t_max is not None else 2.0 * t_est
    times = np.linspace(0.0, t_max, int(np.ceil(t_max / (t_est / 200))) + 1)

    def neg_f1(beta):
        psi = build_k_state(basis, UnitCellSpec.for_basis(basis, K, beta))
        series = quench_series(evolve(h, psi, times))
        return -revival_metrics(series, basis.alpha, K=K).fidelity

    res = minimize_scalar(neg_f1, bracket=bracket, method="golden", tol=tol)
    return float(res.x), float(-res.fun)


STATE_KINDS = ("K", "Zd", "GSy", "GSz", "CSy", "CSz", "theta-star", "mps", "bits")


def build_initial_state(basis: ConstrainedBasis, kind: str, K: int | None = None, *,
                        beta: float = DEFAULT_BETA, d: int | None = None, theta=None, phi=None,
                        bits: str | None = None, algebra: AlgebraSet | None = None) -> StateVector:
    """Resolve a named initial state on the full basis.

    ``K``: the unit-cell state; ``Zd`` (or ``Z<d>``): the period-``d`` product
    state, ``d`` defaulting to ``K``; ``GSy``/``GSz``/``CSy``/``CSz``: extremal
    states of the collective operators for cell ``K``; ``theta-star``: the
    tabulated optimal MPS; ``mps``: the MPS with explicit angles (radians);
    ``bits``: an explicit occupation string.
    """
    key = kind.replace("_", "").replace("*", "-star")
    if key.upper().startswith("Z") and key[1:].isdigit():
        d, key = int(key[1:]), "Zd"
    if key == "K":
        _need(K, kind)
        return build_k_state(basis, UnitCellSpec.for_basis(basis, K, beta))
    if key == "Zd":
        d = d if d is not None else K
        _need(d, kind)
        return build_product_state(basis, f"Z{d}")
    if key.upper() in ("GSY", "GSZ", "CSY", "CSZ"):
        if algebra is None:
            from .operators import build_algebra

            _need(K, kind)
            algebra = build_algebra(basis, K)
        return extremal_algebra_state(algebra, key).full()
    if key.lower() == "theta-star":
        return mps_to_statevector(theta_star_ansatz(basis.alpha), basis)
    if key == "mps":
        if theta is None:
            raise ValueError("the mps state needs explicit angles")
        return mps_to_statevector(MPSAnsatz(basis.alpha, theta, phi), basis)
    if key == "bits":
        if bits is None:
            raise ValueError("the bits state needs an occupation string")
        return build_product_state(basis, bits)
    raise ValueError(f"unknown state kind {kind!r}; expected one of {STATE_KINDS}")


def _need(value, kind):
    if value is None:
        raise ValueError(f"state {kind!r} needs a cell size")
