import cmath
import math

import numpy as np
import pytest

from qpurify.core import DensityMatrix, analyze, local_max_at_first_possible, local_min_at_first, trajectory
from qpurify.errors import DegenerateTau
from qpurify.matrix import eig2_biorthogonal
from qpurify.model import (
    ModelParams,
    down_state_threshold,
    eigensystem,
    eta_threshold,
    hamiltonian,
    propagator,
    v_operator,
    v_oracle,
)

DIP = dict(p_up=0.9, eps_tau=7.82, theta=2.25, omega_over_eps=10.0)
PEAK = dict(p_up=0.5, eps_tau=2.50, theta=1.0, omega_over_eps=10.0)

UU, UD, DU, DD = np.eye(4)


def params(omega=10.0, eps_tau=1.0, theta=0.0):
    return ModelParams.dimensionless(omega, eps_tau, theta)


def setup(cfg):
    p = ModelParams.dimensionless(cfg["omega_over_eps"], cfg["eps_tau"], cfg["theta"])
    return DensityMatrix.from_populations(cfg["p_up"]), v_operator(p)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(omega=-1, epsilon=1, tau=1, theta=0)
    with pytest.raises(ValueError):
        ModelParams(omega=1, epsilon=1, tau=1, theta=4.0)


def test_hamiltonian_elements():
    p = ModelParams(omega=3.0, epsilon=0.7, tau=1.0, theta=0.0)
    h = hamiltonian(p)
    assert h[0, 0] == 2 * p.omega
    assert h[3, 3] == 0
    assert UD @ h @ DU == p.epsilon
    np.testing.assert_array_equal(h, h.conj().T)


def test_eigensystem():
    p = ModelParams(omega=3.0, epsilon=0.7, tau=1.0, theta=0.0)
    es = eigensystem(p)
    h = hamiltonian(p)
    assert es.energies == (6.0, 3.7, 0.0, 3.0 - 0.7)
    s = np.array(es.states)
    np.testing.assert_allclose(s @ s.conj().T, np.eye(4), atol=1e-15)
    for e, v in zip(es.energies, es.states):
        assert np.max(np.abs(h @ v - e * v)) < 1e-12
    one, singlet = es.states[1], es.states[3]
    assert abs(np.vdot(one, singlet)) < 1e-15
    # independent numerical diagonalization
    np.testing.assert_allclose(sorted(es.energies), np.linalg.eigvalsh(h), atol=1e-12)


@pytest.mark.parametrize("omega,eps_tau", [(10.0, 0.3), (1.0, 2.2), (42.0, 5.0)])
def test_v_operator_up_and_down_records(omega, eps_tau):
    up = v_operator(params(omega, eps_tau, 0.0))
    l_up = cmath.exp(-1j * omega * eps_tau) * math.cos(eps_tau)
    np.testing.assert_allclose(up, np.diag([cmath.exp(-2j * omega * eps_tau), l_up]), atol=1e-15)
    down = v_operator(params(omega, eps_tau, math.pi))
    np.testing.assert_allclose(down, np.diag([l_up, 1.0]), atol=1e-15)


def test_v_oracle_limits():
    np.testing.assert_allclose(v_oracle(params(7.0, 0.0, 1.3)), np.eye(2), atol=1e-15)
    omega = 7.0
    v = v_oracle(params(omega, math.pi / 2, 0.0))
    np.testing.assert_allclose(v, np.diag([cmath.exp(-2j * omega * math.pi / 2), 0]), atol=1e-15)
    assert eig2_biorthogonal(v).g < 1e-15


def test_v_operator_matches_oracle_random(rng):
    worst = 0.0
    for _ in range(500):
        p = params(rng.uniform(1, 100), rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi))
        worst = max(worst, np.max(np.abs(v_operator(p) - v_oracle(p))))
    assert worst < 1e-10


def test_propagator_matches_numerical_diagonalization(rng):
    # oracle for the oracle: numpy eigh of the Hamiltonian, no analytic eigenstates
    for _ in range(50):
        p = params(rng.uniform(1, 100), rng.uniform(0, 2 * np.pi), 0.0)
        e, w = np.linalg.eigh(hamiltonian(p))
        ref = w @ np.diag(np.exp(-1j * e * p.tau)) @ w.conj().T
        assert np.max(np.abs(propagator(p) - ref)) < 1e-10


def test_v_is_contraction(rng):
    for _ in range(1000):
        p = params(rng.uniform(1, 100), rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi))
        assert np.linalg.svd(v_operator(p), compute_uv=False).max() <= 1 + 1e-12


def test_singlet_is_stationary(rng):
    for _ in range(200):
        p = params(rng.uniform(1, 100), rng.uniform(0, 2 * np.pi), 0.0)
        s = eigensystem(p).states[3]
        out = propagator(p) @ s
        phase = np.exp(-1j * (p.omega - p.epsilon) * p.tau)
        assert np.max(np.abs(out - phase * s)) < 1e-12


def test_up_state_g_law(rng):
    for _ in range(200):
        eps_tau = rng.uniform(0.05, 3.0)
        if abs(abs(math.cos(eps_tau)) - 1) < 1e-6:
            continue
        spec = eig2_biorthogonal(v_operator(params(rng.uniform(1, 100), eps_tau, 0.0)))
        assert spec.g == pytest.approx(abs(math.cos(eps_tau)), abs=1e-12)


def test_eta_values():
    assert eta_threshold(0.5, 0.7) == 0.5
    assert eta_threshold(0.9, 0.7) < 1
    x = math.acos(0.9)
    expected = 0.5 * (1 + math.log(1 / 9) / math.log(0.9))
    assert expected == pytest.approx(10.927, abs=1e-3)
    assert eta_threshold(0.1, x) == pytest.approx(expected, rel=1e-12)
    assert eta_threshold(0.1, math.pi / 2) == 0.5


def test_eta_non_monotonic_region_via_trajectory():
    x = math.acos(0.9)
    eta = eta_threshold(0.1, x)
    rho0, V = DensityMatrix.from_populations(0.1), v_operator(params(10.0, x, 0.0))
    p = trajectory(rho0, V, math.ceil(eta) + 40).purities
    assert np.any(np.diff(p[: math.ceil(eta)]) < 0)
    assert np.all(np.diff(p[math.ceil(eta) - 1 :]) >= -1e-12)


@pytest.mark.parametrize("eps_tau", [0.0, math.pi, 2 * math.pi])
def test_eta_degenerate_tau(eps_tau):
    with pytest.raises(DegenerateTau):
        eta_threshold(0.3, eps_tau)


def test_down_state_threshold_symmetry(rng):
    assert down_state_threshold(0.5, 1.1) == eta_threshold(0.5, 1.1) == 0.5
    assert down_state_threshold(0.9, 1.1) == pytest.approx(eta_threshold(0.1, 1.1), rel=1e-14)
    for _ in range(100):
        p, x = rng.uniform(0.01, 0.99), rng.uniform(0.05, 3.0)
        assert down_state_threshold(p, x) == eta_threshold(1 - p, x)


@pytest.mark.parametrize("p_up", [0.05, 0.2, 0.45, 0.7])
@pytest.mark.parametrize("eps_tau", [0.2, 0.6, 1.3, 2.5])
def test_down_record_threshold_matches_trajectory(p_up, eps_tau):
    eta = down_state_threshold(p_up, eps_tau)
    V = v_operator(params(10.0, eps_tau, math.pi))
    p = trajectory(DensityMatrix.from_populations(p_up), V, math.ceil(eta) + 30).purities
    start = max(1, math.ceil(eta))
    assert np.all(p[start:] - p[start - 1 : -1] >= -1e-12)
    if eta > 1:
        assert np.any(np.diff(p[:start]) < 0)


def test_threshold_behaviour_consistency(rng):
    for _ in range(300):
        p_up, eps_tau = rng.uniform(0.02, 0.98), rng.uniform(0.05, 3.05)
        if abs(math.cos(eps_tau)) > 0.995:
            continue
        eta = eta_threshold(p_up, eps_tau)
        V = v_operator(params(rng.uniform(1, 100), eps_tau, 0.0))
        p = trajectory(DensityMatrix.from_populations(p_up), V, math.ceil(eta) + 20).purities
        start = max(1, math.ceil(eta))
        assert np.all(p[start:] - p[start - 1 : -1] >= -1e-12)
        if eta > 1:
            assert np.any(np.diff(p[:start]) < 0)


def test_dip_local_min():
    rho0, V = setup(DIP)
    spec, d, rep = analyze(rho0, V)
    assert local_min_at_first(d, spec.g)
    p = trajectory(rho0, V, 2).purities
    assert p[1] < p[0]


def test_peak_local_max():
    rho0, V = setup(PEAK)
    spec, d, rep = analyze(rho0, V)
    assert local_max_at_first_possible(d, spec.g)
    p = trajectory(rho0, V, 3).purities
    assert p[1] > p[0] and p[1] > p[2] and p[2] < p[3]
