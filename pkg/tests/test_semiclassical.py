import numpy as np
import pytest
from hypothesis import given, strategies as st

from scarsim import semiclassical as sc
from scarsim.hilbert import BlockadeConstraint, enumerate_basis
from scarsim.states import MPSAnsatz, k_state_angles, mps_to_statevector

START = np.array([0.0, 0.0, np.pi / 4, np.pi / 2])
angles = st.lists(st.floats(0.05, np.pi - 0.05), min_size=4, max_size=4).map(np.array)


@pytest.fixture(scope="module")
def orbit1():
    return sc.periodic_orbit(START, 1, t_guess=20.0, n_points=801)


# ---------------------------------------------------------------------------
# equations of motion


def test_rhs_at_unit_cell_state():
    f = sc.eom_rhs(START, 1)
    assert f[0] == pytest.approx(1.0, abs=1e-15)  # cos(theta_1) plus a term multiplied by cos(theta_4) = 0
    assert sc.cell_occupation(START, 1)[0] == 0.0


def test_singular_set_flagged():
    assert sc.is_singular([0.3, np.pi / 2, 0.7, np.pi / 2], 1)
    assert not sc.is_singular([0.3, 0.4, 0.7, 0.2], 1)
    # the unit-cell start is a 0/0 point of the radius-2 equations but not of the nearest-neighbour ones
    assert sc.is_singular(START, 2)
    assert not sc.is_singular(START, 1)


@given(angles, st.integers(1, 2), st.integers(1, 3))
def test_cyclic_shift_symmetry(theta, alpha, shift):
    if sc.is_singular(theta, alpha) or sc.is_singular(np.roll(theta, shift), alpha):
        return
    np.testing.assert_allclose(sc.eom_rhs(np.roll(theta, shift), alpha), np.roll(sc.eom_rhs(theta, alpha), shift),
                               atol=1e-12)


@given(angles, st.integers(1, 2))
def test_reversing_symmetry_of_the_flow(theta, alpha):
    m = sc.reversal_map(alpha, theta)
    if sc.is_singular(theta, alpha) or sc.is_singular(m, alpha):
        return
    sgn = np.sign(sc.reversal_map(alpha, np.ones(4)) - sc.reversal_map(alpha, np.zeros(4)))
    np.testing.assert_allclose(sc.eom_rhs(m, alpha), -sgn * sc.eom_rhs(theta, alpha), atol=1e-10)


@given(angles, st.integers(1, 2))
def test_complex_step_jacobian_matches_finite_differences(theta, alpha):
    if sc.is_singular(theta, alpha, tol=1e-3):
        return
    jac = sc.eom_jacobian(theta, alpha)
    h = 1e-6
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        fd = (sc.eom_rhs(theta + e, alpha) - sc.eom_rhs(theta - e, alpha)) / (2 * h)
        np.testing.assert_allclose(jac[:, j], fd, rtol=1e-5, atol=1e-5)


@pytest.mark.parametrize("theta", [[0.3, 0.7, 1.1, 0.5], [0.2, 0.4, 0.9, 1.3], [1.0, 0.6, 0.8, 0.4]])
def test_rhs_matches_numerical_tdvp_projection_alpha1(theta):
    proj = sc.tdvp_projection(theta, 1, 16, phi=[sc.ORACLE_PLANE] * 4)
    np.testing.assert_allclose(proj.theta_dot, sc.eom_rhs(theta, 1), atol=1e-4)


@pytest.mark.slow
@pytest.mark.parametrize("theta", [[0.3, 0.7, 1.1, 0.5], [0.2, 0.4, 0.9, 1.3]])
def test_rhs_matches_numerical_tdvp_projection_alpha2(theta):
    # radius-2 corrections decay more slowly with N; 24 sites bring them below 1e-4
    proj = sc.tdvp_projection(theta, 2, 24, phi=[sc.ORACLE_PLANE] * 4)
    np.testing.assert_allclose(proj.theta_dot, sc.eom_rhs(theta, 2), atol=1e-4)


def test_plane_convention():
    theta = [0.3, 0.7, 1.1, 0.5]
    on_plane = sc.tdvp_projection(theta, 1, 16)
    np.testing.assert_allclose(on_plane.theta_dot, -sc.eom_rhs(theta, 1), atol=1e-4)


@pytest.mark.parametrize("alpha", [1, 2])
def test_flow_invariant_plane(alpha):
    proj = sc.tdvp_projection([0.3, 0.7, 1.1, 0.5], alpha, 16)
    assert np.max(np.abs(proj.phi_dot)) < 1e-12


def test_tangent_vectors_match_finite_differences():
    b = enumerate_basis(BlockadeConstraint(2, 12))
    th = np.array([0.3, 0.7, 1.1, 0.5])
    ph = np.array([0.2, 1.0, -0.4, 0.9])
    psi, d_th, d_ph = sc.mps_tangent(MPSAnsatz(2, th, ph), b)
    h = 1e-6
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        from scarsim.states import mps_amplitudes

        fd_t = (mps_amplitudes(MPSAnsatz(2, th + e, ph), b) - mps_amplitudes(MPSAnsatz(2, th - e, ph), b)) / (2 * h)
        fd_p = (mps_amplitudes(MPSAnsatz(2, th, ph + e), b) - mps_amplitudes(MPSAnsatz(2, th, ph - e), b)) / (2 * h)
        np.testing.assert_allclose(d_th[j], fd_t, atol=1e-8)
        np.testing.assert_allclose(d_ph[j], fd_p, atol=1e-8)


# ---------------------------------------------------------------------------
# occupations


def test_occupation_special_values():
    np.testing.assert_allclose(sc.cell_occupation([np.pi / 2, 0, 0, 0], 1), [1, 0, 0, 0], atol=1e-15)
    with pytest.raises(ZeroDivisionError):
        sc.cell_occupation([np.pi / 2] * 4, 1)


def _mps_occupations(theta, alpha, n):
    b = enumerate_basis(BlockadeConstraint(alpha, n))
    psi = mps_to_statevector(MPSAnsatz(alpha, theta, [np.pi / 2] * 4), b)
    return (np.abs(psi.amplitudes) ** 2 @ b.occupations())[:4]


@pytest.mark.parametrize("alpha", [1, 2])
def test_occupation_matches_state_where_exact(alpha):
    theta = [np.pi / 2, 0.0, 0.0, 0.0]
    np.testing.assert_allclose(_mps_occupations(theta, alpha, 16), sc.cell_occupation(theta, alpha), atol=1e-10)


@pytest.mark.parametrize("alpha,sizes,tol", [(1, (16, 20, 24), 1e-10), (2, (16, 20, 24), 1e-7)])
def test_occupation_finite_size_convergence(alpha, sizes, tol):
    theta = [0.3, 0.7, 1.1, 0.5]
    exact = sc.cell_occupation(theta, alpha)
    errs = [np.abs(_mps_occupations(theta, alpha, n) - exact).max() for n in sizes]
    assert errs[0] < 1e-4
    assert errs[1] < errs[0] and errs[2] < errs[1]
    assert errs[-1] < tol


# ---------------------------------------------------------------------------
# orbits and stability


def test_orbit_closes(orbit1):
    assert orbit1.period == pytest.approx(5.1927, abs=1e-3)
    assert orbit1.closure < 1e-6
    d = sc.distance_to_orbit(START, orbit1)
    assert d[0] < 1e-9


def test_orbit_is_neutrally_stable(orbit1):
    stab = sc.orbit_period_and_stability(orbit1)
    assert np.all(np.abs(stab.exponents) < 1e-6)
    assert stab.closure < 1e-6


def test_orbit_reversal(orbit1):
    assert sc.reversal_defect(orbit1) < 1e-8


def test_perturbed_start_stays_close(orbit1):
    t_end = 10 * orbit1.period
    pert = sc.integrate_orbit(START + 1e-3, 1, t_end, find_period=False, n_points=2000)
    assert np.max(sc.distance_to_orbit(pert.thetas, orbit1)) < 1e-2


def test_alpha2_orbit_exists():
    # the start is a singular point of the flow, left along the departure velocity;
    # the return misses it by an amount proportional to the step-off, so the orbit passes through it
    coarse = sc.periodic_orbit(START, 2, t_guess=20.0, step_off=1e-3)
    fine = sc.periodic_orbit(START, 2, t_guess=20.0, step_off=3e-4)
    assert 6.3 < fine.period < 6.7
    assert abs(fine.period - coarse.period) < 1e-3
    assert coarse.closure < 2e-3 and fine.closure < 2 * 3e-4
    assert fine.closure / coarse.closure == pytest.approx(0.3, rel=0.05)


def test_departure_velocity_at_singular_start():
    v = sc.departure_velocity(START, 2)
    np.testing.assert_allclose(v, [1 / (2 * np.sqrt(2)), 0.0, 0.0, 2.0], atol=1e-6)
    np.testing.assert_allclose(sc.departure_velocity(START, 1), sc.eom_rhs(START, 1))


def harmonic(t, y):
    return np.array([y[1], -y[0]])


def harmonic_jac(t, y):
    return np.array([[0.0, 1.0], [-1.0, 0.0]])


def test_harmonic_oscillator_calibration():
    y0 = np.array([1.0, 0.0])
    sol, period, closure = sc.first_return(harmonic, y0, y0, harmonic(0, y0), 20.0, angular=False)
    assert period == pytest.approx(2 * np.pi, abs=1e-9)
    assert closure < 1e-9
    stab = sc.floquet_analysis(harmonic, harmonic_jac, y0, period)
    np.testing.assert_allclose(stab.exponents, 0.0, atol=1e-9)


def test_inverted_pendulum_exponent():
    # x'' = sin(x) about the upright equilibrium: linearised exponents are +-1
    def rhs(t, y):
        return np.array([y[1], np.sin(y[0])])

    def jac(t, y):
        return np.array([[0.0, 1.0], [np.cos(y[0]), 0.0]])

    stab = sc.floquet_analysis(rhs, jac, np.zeros(2), 3.0)
    assert stab.exponents.max() == pytest.approx(1.0, rel=1e-2)
    assert stab.exponents.min() == pytest.approx(-1.0, rel=1e-2)


# ---------------------------------------------------------------------------
# entanglement along the orbit


def test_entropy_of_vacuum_is_zero():
    ans = MPSAnsatz(1, [0.0] * 4, [np.pi / 2] * 4)
    for cut in range(4):
        assert sc.infinite_mps_entropy(ans, cut) == pytest.approx(0.0, abs=1e-14)


def test_infinite_entropy_matches_long_open_chain():
    ans = MPSAnsatz(1, [0.3, 0.7, 1.1, 0.5], [np.pi / 2] * 4)
    b = enumerate_basis(BlockadeConstraint(1, 24, "obc"))
    for cut in range(4):
        finite = sc.finite_mps_entropy(ans, b, 12 + cut)
        assert sc.infinite_mps_entropy(ans, cut) == pytest.approx(finite, abs=1e-6)


def test_unit_cell_state_has_ln2_across_w():
    ans = k_state_angles(1, 4)
    ent = [sc.infinite_mps_entropy(ans, c) for c in range(4)]
    assert ent[3] == pytest.approx(np.log(2), abs=1e-12)
    assert ent[0] == pytest.approx(0.0, abs=1e-12)


def test_trajectory_entropy_maximum(orbit1):
    ent = sc.trajectory_entropy(orbit1)
    assert max(s.max() for s in ent.values()) == pytest.approx(np.log(2), abs=1e-3)
    assert ent[3].max() == pytest.approx(np.log(2), abs=1e-3)


def test_oscillation_period_of_ramped_signal():
    t = np.linspace(0, 40, 801)
    y = 0.3 * t + np.sin(2 * np.pi * t / 3.7)
    assert sc.oscillation_period(t, y) == pytest.approx(3.7, rel=1e-3)


def test_periodic_samples(orbit1):
    vals = orbit1.thetas[:, 2]
    again = sc.periodic_samples(orbit1, vals, orbit1.times + orbit1.period)
    np.testing.assert_allclose(again, vals, atol=1e-12)


def test_bond_pair_entropy():
    ent = {0: np.array([1.0]), 1: np.array([2.0]), 2: np.array([4.0]), 3: np.array([8.0])}
    assert sc.bond_pair_entropy(ent, 28, 1)[0] == 2.0 + 8.0  # boundaries before sites 1 and 15 = 3 mod 4


def test_configuration_dataclass():
    cfg = sc.AngleConfiguration([0.3, 0.7, 1.1, 0.5], 1)
    assert cfg.phi == (sc.PHI_PLANE,) * 4
    np.testing.assert_allclose(cfg.rhs(), sc.eom_rhs(cfg.array, 1))
    with pytest.raises(ValueError):
        sc.AngleConfiguration([0.1, 0.2], 1)
    with pytest.raises(ValueError):
        sc.eom_rhs(np.zeros(5), 1, K=5)
