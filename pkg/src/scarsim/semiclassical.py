"""Semiclassical (variational MPS) dynamics of the angle unit cell.

The flow lives on the plane ``phi_j = pi/2`` and is written in closed form for
blockade radius 1 and 2 with a four-site angle unit cell.  Alongside the
closed forms this module provides a numerical projection of the exact
dynamics onto the MPS tangent space, used as an independent check.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import _kernels
from ._bipartition import cut_mask, entanglement_entropy
from .hilbert import BlockadeConstraint, ConstrainedBasis, enumerate_basis
from .operators import build_hamiltonian
from .states import MPSAnsatz

SUPPORTED = ((1, 4), (2, 4))
PHI_PLANE = np.pi / 2
ORACLE_PLANE = -np.pi / 2


def _check_supported(alpha: int, K: int) -> None:
    if (alpha, K) not in SUPPORTED:
        raise ValueError(f"closed-form equations of motion exist only for (alpha, K) in {SUPPORTED}")


def _shift(theta, j: int):
    """Angles relabelled so that cell site ``j`` takes the role of site 0."""
    K = len(theta)
    return [theta[(j + i) % K] for i in range(K)]


def _rhs_site0(alpha: int, t):
    c = [np.cos(x) for x in t]
    s = [np.sin(x) for x in t]
    if alpha == 1:
        num = c[2] ** 2 + c[0] ** 2 * s[1] ** 2 * s[2] ** 2
        den = c[3] ** 2 + c[1] ** 2 * s[2] ** 2 * s[3] ** 2
        return c[1] + c[3] * s[0] * s[3] * num / den
    den = c[2] ** 2 * c[3] ** 2 + s[2] ** 2 * s[1] ** 2
    bracket = (
        c[2] * s[2] * (s[0] ** 2 * s[3] ** 2 + c[0] ** 2 * c[1] ** 2)
        + c[1] * s[3] * (c[1] ** 2 * c[2] ** 2 + s[0] ** 2 * s[1] ** 2)
    )
    return c[2] * c[1] + c[3] * s[0] / den * bracket


def _den_site0(alpha: int, t):
    c = [np.cos(x) for x in t]
    s = [np.sin(x) for x in t]
    if alpha == 1:
        return c[3] ** 2 + c[1] ** 2 * s[2] ** 2 * s[3] ** 2
    return c[2] ** 2 * c[3] ** 2 + s[2] ** 2 * s[1] ** 2


def eom_rhs(theta, alpha: int, K: int = 4):
    """Time derivative of the ``K`` cell angles on the ``phi = pi/2`` plane.

    Works for real or complex input (complex-step differentiation relies on it).
    """
    _check_supported(alpha, K)
    theta = np.asarray(theta)
    if theta.shape != (K,):
        raise ValueError(f"expected {K} angles")
    return np.array([_rhs_site0(alpha, _shift(theta, j)) for j in range(K)])


def eom_denominators(theta, alpha: int, K: int = 4) -> np.ndarray:
    _check_supported(alpha, K)
    return np.array([_den_site0(alpha, _shift(np.asarray(theta), j)) for j in range(K)])


def is_singular(theta, alpha: int, K: int = 4, tol: float = 1e-10) -> bool:
    """True where a denominator of the equations of motion vanishes."""
    return bool(np.min(np.abs(eom_denominators(theta, alpha, K))) < tol)


@dataclass(frozen=True)
class AngleConfiguration:
    """Cell angles of the variational state; ``phi`` sits on the invariant plane by default."""

    theta: tuple
    alpha: int
    K: int = 4
    phi: tuple | None = None

    def __post_init__(self):
        th = tuple(float(t) for t in self.theta)
        if len(th) != self.K:
            raise ValueError(f"expected {self.K} angles, got {len(th)}")
        ph = (PHI_PLANE,) * self.K if self.phi is None else tuple(float(p) for p in self.phi)
        if len(ph) != self.K or not np.all(np.isfinite(th + ph)):
            raise ValueError("angles must be finite and match the cell size")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", ph)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.theta)

    def rhs(self) -> np.ndarray:
        return eom_rhs(self.array, self.alpha, self.K)

    def occupation(self) -> np.ndarray:
        return cell_occupation(self.array, self.alpha, self.K)

    def ansatz(self) -> MPSAnsatz:
        return MPSAnsatz(self.alpha, self.theta, self.phi)


# involutions M(theta) = S theta + c with f(M theta) = -S f(theta): they map an
# orbit onto itself run backwards
_REVERSAL = {
    1: (np.array([-1.0, -1.0, 1.0, -1.0]), np.array([0.0, 0.0, 0.0, np.pi])),
    2: (np.array([-1.0, 1.0, 1.0, -1.0]), np.array([0.0, 0.0, 0.0, np.pi])),
}


def reversal_map(alpha: int, theta) -> np.ndarray:
    """Reversing symmetry of the flow that fixes the unit-cell state ``(0, 0, pi/4, pi/2)``."""
    sgn, shift = _REVERSAL[alpha]
    return sgn * np.asarray(theta, dtype=float) + shift


def eom_jacobian(theta, alpha: int, K: int = 4) -> np.ndarray:
    """Exact Jacobian by complex-step differentiation."""
    theta = np.asarray(theta, dtype=float)
    h = 1e-30
    jac = np.empty((K, K))
    for j in range(K):
        z = theta.astype(complex)
        z[j] += 1j * h
        jac[:, j] = eom_rhs(z, alpha, K).imag / h
    return jac


def cell_occupation(theta, alpha: int, K: int = 4) -> np.ndarray:
    """Site occupations of the infinite uniform MPS from the closed-form expressions."""
    _check_supported(alpha, K)
    out = []
    for j in range(K):
        t = _shift(np.asarray(theta, dtype=float), j)
        c = [np.cos(x) for x in t]
        s = [np.sin(x) for x in t]
        if alpha == 1:
            num = s[0] ** 2 * (c[3] ** 2 + c[1] ** 2 * s[2] ** 2 * s[3] ** 2)
            den = 1 - s[0] ** 2 * s[1] ** 2 * s[2] ** 2 * s[3] ** 2
        else:
            num = s[0] ** 2 * (s[1] ** 2 * s[2] ** 2 + c[2] ** 2 * c[3] ** 2)
            den = (
                1
                - s[1] ** 2 * c[2] ** 2 * s[3] ** 2
                - s[0] ** 2 * c[1] ** 2 * s[2] ** 2
                + s[0] ** 2 * s[3] ** 2 * (s[1] ** 2 + s[2] ** 2)
            )
        if abs(den) < 1e-14:
            raise ZeroDivisionError("occupation formula is singular at this configuration")
        out.append(num / den)
    return np.array(out)


# ---------------------------------------------------------------------------
# orbits


def angle_distance(a, b) -> float:
    """Euclidean distance between angle vectors with each component taken modulo ``2 pi``."""
    d = np.asarray(a, float) - np.asarray(b, float)
    return float(np.linalg.norm((d + np.pi) % (2 * np.pi) - np.pi))


@dataclass
class Orbit:
    alpha: int
    K: int
    theta0: np.ndarray
    times: np.ndarray
    thetas: np.ndarray  # (n_times, K)
    period: float | None = None
    closure: float | None = None  # |theta(T) - theta(0)| modulo 2 pi
    solution: object = field(default=None, repr=False)

    def at(self, t) -> np.ndarray:
        return np.asarray(self.solution.sol(t)).T

    def ansatz(self, i: int) -> MPSAnsatz:
        return MPSAnsatz(self.alpha, self.thetas[i], [PHI_PLANE] * self.K)


def distance_to_orbit(points, orbit: Orbit, n_ref: int = 4000) -> np.ndarray:
    """Distance (angles modulo ``2 pi``) from each point to a dense sampling of one period."""
    if orbit.period is None:
        raise ValueError("orbit has no detected period")
    ref = orbit.at(np.linspace(0.0, orbit.period, n_ref))
    pts = np.atleast_2d(points)
    d = pts[:, None, :] - ref[None, :, :]
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return np.sqrt((d**2).sum(-1)).min(axis=1)


def reversal_defect(orbit: Orbit, n_samples: int = 64) -> float:
    """``max_s |theta(T - s) - M theta(s)|`` over one period (0 for a reversible orbit)."""
    if orbit.period is None:
        raise ValueError("orbit has no detected period")
    s = np.linspace(0.0, orbit.period, n_samples)
    fwd = orbit.at(s)
    back = orbit.at(orbit.period - s)
    d = back - reversal_map(orbit.alpha, fwd)
    return float(np.abs((d + np.pi) % (2 * np.pi) - np.pi).max())


def departure_velocity(theta0, alpha: int, K: int = 4, eps: float = 1e-8, max_iter: int = 200,
                       tol: float = 1e-10) -> np.ndarray:
    """Velocity with which the flow leaves ``theta0``.

    Off the singular set this is just the right-hand side.  On it, some terms
    are ``0/0`` with a direction-dependent limit; the departure velocity is
    then the self-consistent solution of ``v = lim f(theta0 + eps v)``, found by
    damped fixed-point iteration.
    """
    theta0 = np.asarray(theta0, dtype=float)
    if not is_singular(theta0, alpha, K):
        return eom_rhs(theta0, alpha, K)
    v = np.ones(K)
    for _ in range(max_iter):
        new = 0.5 * (v + eom_rhs(theta0 + eps * v, alpha, K))
        if np.max(np.abs(new - v)) < tol:
            return new
        v = new
    raise RuntimeError("departure velocity did not converge at the singular start")


def _wrap(d, angular: bool):
    return (d + np.pi) % (2 * np.pi) - np.pi if angular else d


def first_return(rhs, y0, anchor, normal, t_end: float, tol: float = 1e-12, method: str = "DOP853",
                 return_radius: float = 0.1, t_min: float = 0.1, angular: bool = True):
    """Integrate ``y' = rhs(t, y)`` until the first return to ``anchor``.

    The return is the first upward crossing, after ``t_min``, of the hyperplane
    through ``anchor`` with normal ``normal`` that lies within ``return_radius``
    of ``anchor``.  With ``angular`` the coordinates are compared modulo ``2 pi``.
    Steps are capped at half the return radius divided by the starting speed,
    so the gated crossing cannot be stepped over.  Returns ``(solution, period, closure)``; ``period`` and ``closure`` are None
    when no return happens before ``t_end``.
    """
    anchor = np.asarray(anchor, dtype=float)
    normal = np.asarray(normal, dtype=float)
    normal = normal / np.linalg.norm(normal)

    def dist(y):
        return float(np.linalg.norm(_wrap(np.asarray(y) - anchor, angular)))

    def ret(t, y):
        if t < t_min or dist(y) > return_radius:
            return -1.0
        return float(np.dot(_wrap(np.asarray(y) - anchor, angular), normal))

    ret.direction = 1.0
    ret.terminal = True
    speed = float(np.linalg.norm(rhs(0.0, np.asarray(y0, dtype=float))))
    max_step = 0.5 * return_radius / speed if speed > 0 else np.inf
    sol = solve_ivp(rhs, (0.0, t_end), np.asarray(y0, dtype=float), method=method, rtol=tol, atol=tol,
                    dense_output=True, events=ret, max_step=max_step)
    if sol.status == -1:
        raise RuntimeError(f"integration failed: {sol.message}")
    if not sol.t_events[0].size:
        return sol, None, None
    period = float(sol.t_events[0][0])
    return sol, period, dist(sol.sol(period))


def integrate_orbit(theta0, alpha: int, t_end: float, tol: float = 1e-12, K: int = 4,
                    n_points: int = 400, find_period: bool = True, method: str = "DOP853",
                    step_off: float = 1e-4, return_radius: float = 0.1, t_min: float = 0.1) -> Orbit:
    """Integrate the angle flow; optionally locate the first return to the start.

    The return map uses the hyperplane through ``theta0`` normal to the departure
    velocity (see ``first_return``); the crossing time comes from the
    integrator's root finder on the dense output and the integration stops
    there.  A start on the singular set of the flow is replaced by
    ``theta0 + step_off * v`` with ``v`` the departure velocity, which moves it
    off the orbit by ``O(step_off**2)``.
    """
    _check_supported(alpha, K)
    theta0 = np.asarray(theta0, dtype=float)
    if not np.all(np.isfinite(theta0)):
        raise ValueError("angles must be finite")
    v = departure_velocity(theta0, alpha, K)
    y0 = theta0 + step_off * v if is_singular(theta0, alpha, K) else theta0

    def rhs(t, y):
        return eom_rhs(y, alpha, K)

    if find_period:
        sol, period, closure = first_return(rhs, y0, theta0, v, t_end, tol, method, return_radius, t_min)
    else:
        sol = solve_ivp(rhs, (0.0, t_end), y0, method=method, rtol=tol, atol=tol, dense_output=True)
        if sol.status == -1:
            raise RuntimeError(f"integration failed: {sol.message}")
        period = closure = None
    times = np.linspace(0.0, sol.t[-1], n_points)
    return Orbit(alpha, K, theta0, times, np.asarray(sol.sol(times)).T, period, closure, sol)


def periodic_orbit(theta0, alpha: int, K: int = 4, t_guess: float = 20.0, tol: float = 1e-12,
                   n_points: int = 400, **kwargs) -> Orbit:
    """Integrate until the first return and resample one full period."""
    orb = integrate_orbit(theta0, alpha, t_guess, tol, K, n_points, **kwargs)
    if orb.period is None:
        raise RuntimeError("no return to the start within the integration window")
    times = np.linspace(0.0, orb.period, n_points)
    orb.times = times
    orb.thetas = np.asarray(orb.solution.sol(times)).T
    return orb


@dataclass
class Stability:
    period: float
    multipliers: np.ndarray
    exponents: np.ndarray
    closure: float


def monodromy(rhs, jac, y0, period: float, tol: float = 1e-12, method: str = "DOP853"):
    """Monodromy matrix and end point ``(M, y(T))`` from the variational equations over one period."""
    n = len(y0)

    def full(t, z):
        y = z[:n]
        m = z[n:].reshape(n, n)
        return np.concatenate([rhs(t, y), (jac(t, y) @ m).ravel()])

    z0 = np.concatenate([np.asarray(y0, float), np.eye(n).ravel()])
    sol = solve_ivp(full, (0.0, period), z0, method=method, rtol=tol, atol=tol)
    if not sol.success:
        raise RuntimeError(f"variational integration failed: {sol.message}")
    return sol.y[n:, -1].reshape(n, n), sol.y[:n, -1]


def floquet_analysis(rhs, jac, y0, period: float, tol: float = 1e-12, angular: bool = False) -> Stability:
    """Floquet multipliers and exponents ``log|mu| / T`` of a closed orbit.

    ``closure`` is ``|y(T) - y(0)|``, with angles compared modulo ``2 pi`` when
    ``angular`` is set.
    """
    mono, y_end = monodromy(rhs, jac, y0, period, tol)
    mu = np.linalg.eigvals(mono)
    d = _wrap(np.asarray(y_end) - np.asarray(y0, dtype=float), angular)
    return Stability(period, mu, np.log(np.abs(mu)) / period, float(np.linalg.norm(d)))


def orbit_period_and_stability(orbit: Orbit, tol: float = 1e-12, closure_tol: float = 1e-6) -> Stability:
    if orbit.period is None:
        raise ValueError("orbit has no detected period")
    if orbit.closure is not None and orbit.closure > closure_tol:
        raise RuntimeError(f"orbit does not close: residual {orbit.closure:.2e}")
    a, K = orbit.alpha, orbit.K
    return floquet_analysis(
        lambda t, y: eom_rhs(y, a, K), lambda t, y: eom_jacobian(y, a, K), orbit.theta0, orbit.period, tol,
        angular=True,
    )


# ---------------------------------------------------------------------------
# tangent-space projection on a finite ring (independent check of the closed forms)


def _site_factors(alpha, theta, phi, n_sites):
    K = len(theta)
    th = np.tile(np.asarray(theta, float), n_sites // K)
    ph = np.tile(np.asarray(phi, float), n_sites // K)
    return th, ph


def mps_tangent(ansatz: MPSAnsatz, basis: ConstrainedBasis):
    """Unnormalised amplitudes and their derivatives with respect to each cell angle.

    Returns ``(psi, d_theta, d_phi)`` with derivative arrays of shape ``(K, dim)``.
    """
    K = ansatz.K
    n = basis.n_sites
    if n % K:
        raise ValueError("unit cell does not divide the chain")
    th, ph = _site_factors(ansatz.alpha, ansatz.theta, ansatz.phi, n)
    up = np.exp(1j * ph) * np.sin(th)
    down = np.cos(th).astype(complex)
    states = basis.states
    psi = _kernels.mps_amplitudes(states, up, down, basis.alpha, basis.periodic)
    full = (1 << n) - 1
    blocked = np.zeros_like(states)
    for d in range(1, basis.alpha + 1):
        shifted = states << d
        if basis.periodic:
            shifted |= states >> (n - d)
        blocked |= shifted & full
    d_th = np.zeros((K, basis.dim), dtype=complex)
    d_ph = np.zeros((K, basis.dim), dtype=complex)
    for i in range(n):
        j = i % K
        is_up = ((states >> i) & 1).astype(bool)
        is_free = ~is_up & (((blocked >> i) & 1) == 0)
        u2, d2 = up.copy(), down.copy()
        u2[i] = d2[i] = 1.0
        rest = _kernels.mps_amplitudes(states, u2, d2, basis.alpha, basis.periodic)
        e = np.exp(1j * ph[i])
        d_th[j] += rest * np.where(is_up, e * np.cos(th[i]), np.where(is_free, -np.sin(th[i]), 0.0))
        d_ph[j] += rest * np.where(is_up, 1j * e * np.sin(th[i]), 0.0)
    return psi, d_th, d_ph


def _normalised_tangent(psi, d):
    nrm = np.linalg.norm(psi)
    proj = np.real(d @ psi.conj()) / nrm**2
    return (d - proj[:, None] * psi[None, :]) / nrm


@dataclass
class TDVPProjection:
    theta_dot: np.ndarray
    phi_dot: np.ndarray
    energy: float


def tdvp_projection(theta, alpha: int, n_sites: int = 16, basis: ConstrainedBasis | None = None,
                    phi=None) -> TDVPProjection:
    """Angle velocities from projecting ``-iH`` onto the MPS tangent space of a finite ring.

    Solves ``sum_j 2 Im<d_theta_j psi|d_phi_k psi> theta_dot_j = d_phi_k E`` and the
    conjugate equations for ``phi_dot`` using normalised tangent vectors, for
    the Schroedinger flow ``exp(-iHt)``.  On the ``phi = pi/2`` plane this gives
    ``-eom_rhs``; the closed forms coincide with the projection on the mirror
    plane ``phi = -pi/2`` (``ORACLE_PLANE``), which is the same orbit with time
    reversed.
    """
    theta = np.asarray(theta, float)
    K = theta.size
    phi = np.full(K, PHI_PLANE) if phi is None else np.asarray(phi, float)
    if basis is None:
        basis = enumerate_basis(BlockadeConstraint(alpha, n_sites))
    h = build_hamiltonian(basis)
    psi, d_th, d_ph = mps_tangent(MPSAnsatz(alpha, theta, phi), basis)
    t_th = _normalised_tangent(psi, d_th)
    t_ph = _normalised_tangent(psi, d_ph)
    psi_n = psi / np.linalg.norm(psi)
    hpsi = h @ psi_n
    energy = float(np.real(np.vdot(psi_n, hpsi)))
    grad_th = 2 * np.real(t_th.conj() @ hpsi)
    grad_ph = 2 * np.real(t_ph.conj() @ hpsi)
    # symplectic form on (theta, phi)
    w_tp = 2 * np.imag(t_th.conj() @ t_ph.T)  # [j, k] = 2 Im<d_theta_j|d_phi_k>
    w_tt = 2 * np.imag(t_th.conj() @ t_th.T)
    w_pp = 2 * np.imag(t_ph.conj() @ t_ph.T)
    omega = np.block([[w_tt, w_tp], [-w_tp.T, w_pp]])
    grad = np.concatenate([grad_th, grad_ph])
    # Omega^T x = grad: the theta_dot rows reproduce sum_j 2Im<d_th_j|d_ph_k> theta_dot_j = dE/dphi_k
    x, *_ = np.linalg.lstsq(omega.T, grad, rcond=None)
    return TDVPProjection(x[:K], x[K:], energy)


# ---------------------------------------------------------------------------
# entanglement along the orbit


def _transfer(tensors):
    chi = tensors[0].shape[1]
    e = np.eye(chi * chi, dtype=complex)
    for a in tensors:
        e = e @ sum(np.kron(a[s], a[s].conj()) for s in range(2))
    return e


def _dominant(mat):
    w, v = np.linalg.eig(mat)
    k = int(np.argmax(np.abs(w)))
    return w[k], v[:, k]


def infinite_mps_entropy(ansatz: MPSAnsatz, cut: int) -> float:
    """Von Neumann entropy across the bond before cell site ``cut`` of the infinite uniform MPS."""
    K = ansatz.K
    chi = ansatz.bond_dimension
    tensors = [ansatz.tensor((cut + i) % K) for i in range(K)]
    e = _transfer(tensors)
    _, r = _dominant(e)
    _, l = _dominant(e.T)
    r = r.reshape(chi, chi)
    l = l.reshape(chi, chi)
    # fix phases so both fixed points are Hermitian positive
    r = r / np.trace(r)
    l = l / np.trace(l)
    r = 0.5 * (r + r.conj().T)
    l = 0.5 * (l + l.conj().T)
    wl, vl = np.linalg.eigh(l)
    wl = np.clip(wl, 0.0, None)
    sl = vl @ np.diag(np.sqrt(wl)) @ vl.conj().T
    m = sl.T @ r @ sl.T.conj()
    p = np.clip(np.linalg.eigvalsh(0.5 * (m + m.conj().T)), 0.0, None)
    if p.sum() <= 0:
        raise FloatingPointError("norm underflow in the transfer-matrix fixed points")
    p = p / p.sum()
    p = p[p > 1e-300]
    return float(max(0.0, -np.sum(p * np.log(p))))


def finite_mps_entropy(ansatz: MPSAnsatz, basis: ConstrainedBasis, cut) -> float:
    from .states import mps_to_statevector

    psi = mps_to_statevector(ansatz, basis)
    return entanglement_entropy(basis.states, psi.amplitudes, cut_mask(basis.n_sites, cut, basis.periodic))


def trajectory_entropy(orbit: Orbit, cuts=None, basis: ConstrainedBasis | None = None) -> dict:
    """Entropy time series along an orbit for each cut.

    Without ``basis`` the cuts are bond positions ``0..K-1`` in the infinite
    uniform MPS; with a basis they are region cuts of that finite chain.
    """
    if basis is None:
        cuts = list(range(orbit.K)) if cuts is None else list(cuts)
        return {c: np.array([infinite_mps_entropy(orbit.ansatz(i), c) for i in range(len(orbit.times))])
                for c in cuts}
    if cuts is None:
        raise ValueError("finite-chain entropy needs explicit cuts")
    return {c: np.array([finite_mps_entropy(orbit.ansatz(i), basis, c) for i in range(len(orbit.times))])
            for c in cuts}


def bond_pair_entropy(entropies: dict, n_sites: int, start: int, K: int = 4) -> np.ndarray:
    """Infinite-chain analogue of the ring bipartition ``[start, start + N/2)``.

    That region has two boundaries, before cell sites ``start`` and
    ``start + N/2`` (mod ``K``), so its entropy is the sum of the two bond entropies.
    """
    a = start % K
    b = (start + n_sites // 2) % K
    return entropies[a] + entropies[b]


def oscillation_period(times, signal, detrend: bool = True, pad: int = 1 << 16) -> float:
    """Dominant period of a uniformly sampled signal after removing a linear ramp."""
    from scipy.signal import periodogram

    t = np.asarray(times, dtype=float)
    y = np.asarray(signal, dtype=float)
    if detrend:
        y = y - np.polyval(np.polyfit(t, y, 1), t)
    f, p = periodogram(y, fs=1.0 / (t[1] - t[0]), nfft=max(pad, y.size), detrend=False)
    i = int(np.argmax(p[1:])) + 1
    if 1 <= i < p.size - 1:
        # parabolic refinement of the spectral peak
        a, b, c = np.log(p[i - 1 : i + 2] + 1e-300)
        den = a - 2 * b + c
        shift = 0.5 * (a - c) / den if den != 0 else 0.0
        freq = f[i] + shift * (f[1] - f[0])
    else:
        freq = f[i]
    return float(1.0 / freq)


def periodic_samples(orbit: Orbit, values: np.ndarray, times) -> np.ndarray:
    """Evaluate a quantity sampled on one period at arbitrary times by periodic extension."""
    if orbit.period is None:
        raise ValueError("orbit has no detected period")
    return np.interp(np.mod(times, orbit.period), orbit.times, values, period=orbit.period)
