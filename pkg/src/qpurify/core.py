"""Purification of a qubit by repeated measurement of a partner system.

After ``k`` identical measurement outcomes the qubit state is

    rho_k = V^k rho_0 (V^dag)^k / tr[V^k rho_0 (V^dag)^k]

for the conditional map ``V``. Writing ``rho_0`` in the biorthonormal
eigenbasis of ``V`` gives a closed form for the purity ``tr rho_k^2`` in terms
of four numbers (``a``, ``b``, ``c_tilde`` and a phase that advances linearly
in ``k``), from which the conditions for non-monotonic purity follow.
"""

import cmath
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from qpurify.errors import (
    DegenerateDenominator,
    InvalidK,
    InvariantViolation,
    StateAnnihilated,
    UndefinedThreshold,
)
from qpurify.matrix import DEFAULT_TOL, SpectralData, cmatrix, eig2_biorthogonal

STATE_TOL = 1e-12
WEIGHT_FLOOR = 1e-300
DENOM_FLOOR = 1e-14
TIE_TOL = 1e-12


@dataclass(frozen=True)
class DensityMatrix:
    """A qubit density matrix in the ``{up, down}`` basis.

    Construction checks hermiticity, unit trace and positivity to ``1e-12``.
    """

    m: np.ndarray

    def __post_init__(self):
        m = self.m
        if not (isinstance(m, np.ndarray) and m.dtype == complex and m.shape == (2, 2)):
            m = cmatrix(m, dim=2)
        elif m.flags.writeable:
            m = m.copy()
            m.setflags(write=False)
        object.__setattr__(self, "m", m)
        (p, q), (r, s) = m.tolist()
        if not all(map(cmath.isfinite, (p, q, r, s))):
            raise ValueError("density matrix has non-finite entries")
        if abs(q - r.conjugate()) > STATE_TOL or abs(p.imag) > STATE_TOL or abs(s.imag) > STATE_TOL:
            raise InvariantViolation("density matrix is not Hermitian")
        tr = p.real + s.real
        if abs(tr - 1.0) > STATE_TOL:
            raise InvariantViolation(f"density matrix has trace {tr!r}")
        half_gap = 0.5 * (p.real - s.real)
        lam_min = 0.5 * tr - math.sqrt(half_gap * half_gap + abs(q) ** 2)
        if lam_min < -STATE_TOL:
            raise InvariantViolation(f"density matrix has eigenvalue {lam_min!r} < 0")

    @classmethod
    def from_populations(cls, p_up, coherence=0.0):
        """``p_up |up><up| + (1-p_up) |down><down|`` plus ``coherence |up><down| + h.c.``"""
        coherence = complex(coherence)
        return cls(np.array([[p_up, coherence], [coherence.conjugate(), 1.0 - p_up]]))

    @classmethod
    def pure(cls, ket):
        ket = np.asarray(ket, dtype=complex)
        ket = ket / np.linalg.norm(ket)
        return cls(np.outer(ket, ket.conj()))

    @property
    def purity(self):
        m = self.m
        return float(m[0, 0].real ** 2 + m[1, 1].real ** 2 + 2.0 * abs(m[0, 1]) ** 2)

    @property
    def det(self):
        m = self.m
        return float(m[0, 0].real * m[1, 1].real - abs(m[0, 1]) ** 2)


class StepResult(NamedTuple):
    state: DensityMatrix
    weight: float


def _sandwich(v, m):
    """``v m v^dag`` for 2x2 nested lists of Python complex numbers."""
    (v00, v01), (v10, v11) = v
    (m00, m01), (m10, m11) = m
    # x = v m
    x00 = v00 * m00 + v01 * m10
    x01 = v00 * m01 + v01 * m11
    x10 = v10 * m00 + v11 * m10
    x11 = v10 * m01 + v11 * m11
    c00, c01, c10, c11 = v00.conjugate(), v01.conjugate(), v10.conjugate(), v11.conjugate()
    y00 = x00 * c00 + x01 * c01
    y01 = x00 * c10 + x01 * c11
    y11 = x10 * c10 + x11 * c11
    return y00.real, y01, y11.real


def _step(v, rho, weight_floor):
    y00, y01, y11 = _sandwich(v, rho.m.tolist())
    weight = y00 + y11
    if not weight > weight_floor:
        raise StateAnnihilated(f"step weight {weight!r} below floor {weight_floor!r}")
    y00, y01, y11 = y00 / weight, y01 / weight, y11 / weight
    # rebuilt Hermitian by construction, trace fixed to one
    m = np.array([[y00, y01], [y01.conjugate(), 1.0 - y00]], dtype=complex)
    return StepResult(DensityMatrix(m), weight)


def evolve_step(rho, V, weight_floor=WEIGHT_FLOOR):
    """One conditional step: ``V rho V^dag`` renormalized, and its trace.

    Raises :class:`StateAnnihilated` when the trace drops below
    ``weight_floor``.
    """
    return _step(cmatrix(V, dim=2).tolist(), rho, weight_floor)


@dataclass(frozen=True)
class TrajectoryStep:
    k: int
    purity: float
    success_weight: float
    state: DensityMatrix


@dataclass
class PurityTrajectory:
    steps: List[TrajectoryStep] = field(default_factory=list)
    truncated_at: Optional[int] = None

    @property
    def purities(self):
        return np.array([s.purity for s in self.steps])

    @property
    def weights(self):
        return np.array([s.success_weight for s in self.steps])

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, k):
        return self.steps[k]


def trajectory(rho0, V, k_max, weight_floor=WEIGHT_FLOOR, strict=True):
    """Iterate :func:`evolve_step` ``k_max`` times starting from ``rho0``.

    ``success_weight`` at step ``k`` is ``tr[V^k rho0 (V^dag)^k]``, the
    probability of the whole measurement record. If the state is annihilated
    at some step the trajectory stops there and ``truncated_at`` records the
    step; with ``strict=True`` the :class:`StateAnnihilated` is re-raised with
    the partial trajectory attached.
    """
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    v = cmatrix(V, dim=2).tolist()
    traj = PurityTrajectory([TrajectoryStep(0, rho0.purity, 1.0, rho0)])
    rho, weight = rho0, 1.0
    for k in range(1, k_max + 1):
        try:
            rho, w = _step(v, rho, weight_floor)
        except StateAnnihilated as exc:
            traj.truncated_at = k
            if strict:
                raise StateAnnihilated(str(exc), step=k, partial=traj) from exc
            break
        weight *= w
        traj.steps.append(TrajectoryStep(k, rho.purity, weight, rho))
    return traj


@dataclass(frozen=True)
class InitialDecomposition:
    """``rho0 = a|u1><u1| + b|u2><u2| + c|u1><u2| + c*|u2><u1|``.

    ``alpha(k) = beta + k * delta`` is the phase of
    ``c <u2|u1> (l1 l2*)^k``; ``det_residual`` is the mismatch between
    ``det rho0`` and ``(ab - |c|^2) |<u2|u1_perp>|^2``.
    """

    a: float
    b: float
    c: complex
    c_tilde: float
    beta: float
    delta: float
    overlap_u2u1: complex
    det_rho0: float
    det_residual: float = 0.0

    def alpha(self, k):
        return self.beta + k * self.delta


def decompose(rho0, spec):
    m = rho0.m
    v1, v2 = spec.v1, spec.v2
    a = np.vdot(v1, m @ v1)
    b = np.vdot(v2, m @ v2)
    c = complex(np.vdot(v1, m @ v2))
    a, b = float(a.real), float(b.real)
    if a < -STATE_TOL or b < -STATE_TOL:
        raise InvariantViolation(f"negative diagonal weight a={a!r}, b={b!r}")
    a, b = max(a, 0.0), max(b, 0.0)

    overlap = complex(np.vdot(spec.u2, spec.u1))
    cross = c * overlap
    c_tilde = abs(cross)
    beta = float(np.angle(cross)) if c_tilde > 0.0 else 0.0
    delta = float(np.angle(spec.lambda1 * spec.lambda2.conjugate()))

    det_rho0 = rho0.det
    det_expanded = (a * b - abs(c) ** 2) * abs(np.vdot(spec.u2, spec.u1_perp)) ** 2
    residual = abs(det_rho0 - det_expanded)
    if residual > 1e-10 * max(1.0, a * b + abs(c) ** 2):
        raise InvariantViolation(f"determinant identity off by {residual:.3g}")

    return InitialDecomposition(
        a=a,
        b=b,
        c=c,
        c_tilde=c_tilde,
        beta=beta,
        delta=delta,
        overlap_u2u1=overlap,
        det_rho0=det_rho0,
        det_residual=residual,
    )


def _denominator(d, g, k):
    gk = g**k
    return d.a + d.b * gk * gk + 2.0 * d.c_tilde * gk * math.cos(d.alpha(k))


def purity_closed_form(d, g, k):
    """Purity after ``k`` steps from the decomposition alone.

    ``P = 1 - 2 g^(2k) det(rho0) / (a + b g^(2k) + 2 c_tilde g^k cos alpha_k)^2``
    """
    if k < 0:
        raise InvalidK("k must be non-negative")
    if k == 0 and g == 0.0:
        raise InvalidK("closed form does not cover k=0 when g=0; use tr(rho0^2)")
    denom = _denominator(d, g, k)
    if denom <= DENOM_FLOOR:
        raise DegenerateDenominator(f"denominator {denom!r} at k={k}")
    return 1.0 - 2.0 * g ** (2 * k) * d.det_rho0 / denom**2


def local_min_at_first(d, g):
    """True when the first measurement lowers the purity (for mixed rho0)."""
    rhs = d.b * g - 2.0 * g * d.c_tilde / (1.0 - g) * (math.cos(d.alpha(1)) - math.cos(d.alpha(0)))
    return bool(d.a < rhs)


def local_max_at_first_possible(d, g):
    """Necessary condition for a local maximum of the purity at ``k = 1``.

    Not sufficient: a ``True`` here does not guarantee ``P1 > P0`` and
    ``P1 > P2``.
    """
    c0, c1, c2 = (math.cos(d.alpha(k)) for k in (0, 1, 2))
    rhs = 2.0 * d.c_tilde / ((1.0 - g) ** 2 * (1.0 + g)) * (c1 - c0 + g * (c1 - c2))
    return bool(d.b < rhs)


def monotonic_lhs(d, g, k):
    """Left side of the step-``k`` monotonicity test; ``<= 0`` iff ``P_k >= P_{k-1}``
    (for ``det rho0 > 0``)."""
    dcos = math.cos(d.alpha(k)) - math.cos(d.alpha(k - 1))
    return d.b * g ** (2 * k - 1) - 2.0 * g**k * d.c_tilde / (1.0 - g) * dcos - d.a


def monotonic_from(d, g, k0=1, k_probe=None):
    """Whether ``P_k >= P_{k-1}`` holds for every ``k >= k0``.

    Steps ``k0..k_probe`` are checked one by one. Beyond the sufficient
    threshold the envelope ``b g^(2k-1) + 4 c_tilde g^k/(1-g) - a`` is
    non-positive and decreasing, so probing up to that threshold makes the
    answer exact.
    """
    if k0 < 1:
        raise ValueError("k0 must be >= 1")
    if d.a <= 0.0:
        # positivity of rho0 forces c = 0 when a = 0, leaving b g^(2k-1) > 0
        return d.b <= 0.0
    k_end = max(k0, k_threshold_sufficient(d, g))
    if k_probe is not None:
        if k_probe < k0:
            raise ValueError("k_probe must be >= k0")
        k_end = max(k_end, k_probe)
    return all(monotonic_lhs(d, g, k) <= 0.0 for k in range(k0, k_end + 1))


def _ceil_tol(x):
    return max(0, math.ceil(x - TIE_TOL))


def k_threshold_sufficient(d, g):
    """Smallest ``k`` past which the purity can no longer decrease.

    Solves ``g^(2k) + 4 g c_tilde/((1-g) b) g^k - a g / b <= 0`` for ``g^k``.
    """
    if not 0.0 <= g < 1.0:
        raise ValueError(f"g={g!r} outside [0, 1)")
    if d.b <= 0.0 or g == 0.0:
        return 0
    if d.a <= 0.0:
        raise UndefinedThreshold("a = 0: the map does not extract the dominant eigenvector")
    r = 2.0 * g * d.c_tilde / ((1.0 - g) * d.b)
    q = d.a * g / d.b
    # sqrt(r^2 + q) - r without cancellation
    root = q / (math.sqrt(r * r + q) + r)
    if root >= 1.0:
        return 0
    return _ceil_tol(math.log(root) / math.log(g))


class SimplifiedThreshold(NamedTuple):
    k: int
    exact: bool


def k_threshold_simplified(d, g, tol=DEFAULT_TOL):
    """``k >= (1 + log(a/b)/log g) / 2``, as the smallest ``k >= 1``.

    Monotonicity compares ``P_k`` with ``P_{k-1}``, so ``k = 1`` already means
    "from the first measurement on"; ``k = 0`` is reserved for ``b = 0``, where
    the purity is identically one. ``exact`` flags the cases where the bound
    is also necessary: ``c_tilde = 0`` or ``l1 l2*`` real positive.
    """
    if not 0.0 <= g < 1.0:
        raise ValueError(f"g={g!r} outside [0, 1)")
    if d.a <= 0.0:
        raise UndefinedThreshold("a = 0: log(a/b) diverges")
    wrapped = math.remainder(d.delta, 2.0 * math.pi)
    exact = d.c_tilde <= tol or abs(wrapped) <= tol
    if d.b <= 0.0:
        return SimplifiedThreshold(0, exact)
    ratio = 0.0 if g == 0.0 else math.log(d.a / d.b) / math.log(g)
    return SimplifiedThreshold(max(1, _ceil_tol(0.5 * (1.0 + ratio))), exact)


@dataclass(frozen=True)
class OscillationReport:
    local_min_at_1: bool
    local_max_at_1_possible: bool
    k_monotonic_sufficient: Optional[int]
    k_monotonic_simplified: Optional[int]
    simplified_is_exact: bool


def oscillation_report(d, g):
    """Bundle the predicates and thresholds; undefined thresholds become ``None``."""
    try:
        k_suff = k_threshold_sufficient(d, g)
    except UndefinedThreshold:
        k_suff = None
    try:
        simp = k_threshold_simplified(d, g)
        k_simp, exact = simp.k, simp.exact
    except UndefinedThreshold:
        k_simp, exact = None, False
    return OscillationReport(
        local_min_at_1=local_min_at_first(d, g),
        local_max_at_1_possible=local_max_at_first_possible(d, g),
        k_monotonic_sufficient=k_suff,
        k_monotonic_simplified=k_simp,
        simplified_is_exact=exact,
    )


def analyze(rho0, V, tol=DEFAULT_TOL):
    """Decompose ``rho0`` against ``V`` and report its oscillation behaviour."""
    spec = eig2_biorthogonal(V, tol=tol)
    d = decompose(rho0, spec)
    return spec, d, oscillation_report(d, spec.g)


__all__ = [
    "DensityMatrix",
    "InitialDecomposition",
    "OscillationReport",
    "PurityTrajectory",
    "SimplifiedThreshold",
    "SpectralData",
    "StepResult",
    "TrajectoryStep",
    "analyze",
    "decompose",
    "evolve_step",
    "k_threshold_simplified",
    "k_threshold_sufficient",
    "local_max_at_first_possible",
    "local_min_at_first",
    "monotonic_from",
    "monotonic_lhs",
    "oscillation_report",
    "purity_closed_form",
    "trajectory",
]
