"""Two qubits S and X with an excitation-preserving (flip-flop) coupling.

    H = sum_{i=S,X} (omega/2)(1 + sz_i) + epsilon (s+_S s-_X + s-_S s+_X)

X is measured every ``tau`` and found in ``|theta> = cos(theta/2)|up> +
sin(theta/2)|down>``; S then evolves under ``V = <theta| exp(-iH tau) |theta>``.

Basis conventions: ``{up, down}`` for one qubit (up first) and
``{up up, up down, down up, down down}`` for the pair, S as the left factor.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from qpurify.errors import DegenerateTau
from qpurify.matrix import cmatrix, cvector, spectral_exp

UP = np.array([1.0, 0.0], dtype=complex)
DOWN = np.array([0.0, 1.0], dtype=complex)

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
SIGMA_PLUS = np.outer(UP, DOWN)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
_I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class ModelParams:
    omega: float
    epsilon: float
    tau: float
    theta: float

    def __post_init__(self):
        if not self.omega > 0 or not self.epsilon > 0:
            raise ValueError("omega and epsilon must be positive")
        if not self.tau >= 0:
            raise ValueError("tau must be non-negative")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")

    @classmethod
    def dimensionless(cls, omega_over_eps, eps_tau, theta):
        """Units with epsilon = 1."""
        return cls(omega=omega_over_eps, epsilon=1.0, tau=eps_tau, theta=theta)


@dataclass(frozen=True)
class EigenSystem4:
    labels: Tuple[str, ...]
    states: Tuple[np.ndarray, ...]
    energies: Tuple[float, ...]


def measured_state(theta):
    return cvector(math.cos(theta / 2) * UP + math.sin(theta / 2) * DOWN)


def hamiltonian(p):
    om, eps = p.omega, p.epsilon
    h = 0.5 * om * (np.kron(_I2 + SIGMA_Z, _I2) + np.kron(_I2, _I2 + SIGMA_Z))
    h = h + eps * (np.kron(SIGMA_PLUS, SIGMA_MINUS) + np.kron(SIGMA_MINUS, SIGMA_PLUS))
    return cmatrix(h)


def eigensystem(p):
    """Triplet ``|2>, |1>, |0>`` and singlet ``|s>`` with their energies."""
    uu, ud, du, dd = np.eye(4, dtype=complex)
    r = 1.0 / math.sqrt(2.0)
    states = (uu, r * (ud + du), dd, r * (ud - du))
    energies = (2.0 * p.omega, p.omega + p.epsilon, 0.0, p.omega - p.epsilon)
    return EigenSystem4(
        labels=("2", "1", "0", "s"),
        states=tuple(cvector(s) for s in states),
        energies=energies,
    )


def v_operator(p):
    """Closed-form conditional map for the record ``|theta>`` on X."""
    ch, sh = math.cos(p.theta / 2), math.sin(p.theta / 2)
    om_t, eps_t = p.omega * p.tau, p.epsilon * p.tau
    e1 = np.exp(-1j * om_t)
    e2 = np.exp(-2j * om_t)
    cos_e, sin_e = math.cos(eps_t), math.sin(eps_t)
    off = -1j * e1 * sin_e * sh * ch
    return cmatrix(
        [
            [e2 * ch**2 + e1 * cos_e * sh**2, off],
            [off, sh**2 + e1 * cos_e * ch**2],
        ]
    )


def propagator(p):
    es = eigensystem(p)
    return spectral_exp(es.energies, es.states, p.tau)


def v_oracle(p):
    """``<theta|_X exp(-iH tau) |theta>_X`` from the full four-level evolution."""
    u = np.asarray(propagator(p)).reshape(2, 2, 2, 2)  # (s', x', s, x)
    th = np.asarray(measured_state(p.theta))
    return cmatrix(np.einsum("y,aybx,x->ab", th.conj(), u, th))


def eta_threshold(p_up, eps_tau, tol=1e-12):
    """Non-negative monotonicity threshold for the up-state record (theta = 0).

    ``eta = max(0, (1 + log(p/(1-p)) / log|cos(eps tau)|) / 2)``; the purity is
    monotonic from the first measurement iff ``eta < 1``. At
    ``cos(eps tau) = 0`` the map has rank one and the g -> 0 limit, 1/2, is
    returned.
    """
    if not 0.0 < p_up < 1.0:
        raise ValueError(f"p_up={p_up!r} must lie in (0, 1)")
    g = abs(math.cos(eps_tau))
    if g >= 1.0 - tol:
        raise DegenerateTau(f"|cos(eps*tau)| = {g!r}: no extraction (g = 1)")
    if g <= tol:
        return 0.5
    return max(0.0, 0.5 * (1.0 + math.log(p_up / (1.0 - p_up)) / math.log(g)))


def down_state_threshold(p_up, eps_tau, tol=1e-12):
    """Same threshold when the down state of X is recorded instead."""
    return eta_threshold(1.0 - p_up, eps_tau, tol=tol)
