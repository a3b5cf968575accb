"""Small dense complex matrices (2x2 and 4x4) and a closed-form 2x2 eigensolver.

Matrices are plain ``numpy`` complex arrays. The constructors here validate
shape and finiteness and hand back read-only arrays, so a value built by this
module cannot be mutated in place by a caller.
"""

from dataclasses import dataclass

import numpy as np

from qpurify.errors import DefectiveMap, DimensionError, NonExtractive, NullMap

DEFAULT_TOL = 1e-9
ALLOWED_DIMS = (2, 4)


def _frozen(a):
    a.setflags(write=False)
    return a


def cmatrix(entries, dim=None):
    """Return a validated, read-only complex matrix of dimension 2 or 4."""
    m = np.array(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in ALLOWED_DIMS:
        raise DimensionError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise DimensionError(f"expected a {dim}x{dim} matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return _frozen(m)


def cvector(entries, dim=None):
    v = np.array(entries, dtype=complex)
    if v.ndim != 1 or (dim is not None and v.shape[0] != dim):
        raise DimensionError(f"expected a vector of length {dim}, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return _frozen(v)


def identity(dim=2):
    return cmatrix(np.eye(dim))


def mat_mul(a, b):
    a, b = cmatrix(a), cmatrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return _frozen(a @ b)


def adjoint(a):
    return _frozen(cmatrix(a).conj().T.copy())


def trace(a):
    return complex(np.trace(cmatrix(a)))


def det2(a):
    a = cmatrix(a, dim=2)
    return complex(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])


def outer(ket, bra):
    """|ket><bra| for two vectors given as column amplitudes."""
    return np.outer(ket, np.conj(bra))


def spectral_exp(energies, states, t):
    """exp(-i H t) for H = sum_n E_n |n><n| with orthonormal ``states``.

    ``states`` is a sequence of eigenvectors; no series expansion is involved.
    """
    states = [np.asarray(s, dtype=complex) for s in states]
    dim = states[0].shape[0]
    u = np.zeros((dim, dim), dtype=complex)
    for e, s in zip(energies, states):
        u += np.exp(-1j * e * t) * np.outer(s, s.conj())
    return cmatrix(u)


def _pin_phase(v, i):
    out = v * (abs(v[i]) / v[i])
    out[i] = abs(v[i])
    return out


def _fix_phase_largest(v):
    return _pin_phase(v, int(np.argmax(np.abs(v))))


def _fix_phase_first_nonzero(v, tol=1e-15):
    for i, x in enumerate(v):
        if abs(x) > tol:
            return _pin_phase(v, i)
    return v


@dataclass(frozen=True)
class SpectralData:
    """Biorthonormal eigendecomposition ``V = l1 |u1><v1| + l2 |u2><v2|``.

    ``|l1| > |l2|``; the right eigenvectors have unit norm, the left ones
    satisfy ``<v_i|u_j> = delta_ij``. ``u1_perp`` is the unit vector
    orthogonal to ``u1``.
    """

    lambda1: complex
    lambda2: complex
    u1: np.ndarray
    u2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    g: float
    u1_perp: np.ndarray

    def reconstruct(self):
        return cmatrix(
            self.lambda1 * outer(self.u1, self.v1) + self.lambda2 * outer(self.u2, self.v2)
        )

    def biorthogonality_error(self):
        u = (self.u1, self.u2)
        v = (self.v1, self.v2)
        return max(
            abs(np.vdot(v[i], u[j]) - (1.0 if i == j else 0.0))
            for i in range(2)
            for j in range(2)
        )


def _dominant_column(m):
    norms = np.linalg.norm(m, axis=0)
    col = m[:, int(np.argmax(norms))]
    return col / np.linalg.norm(col)


def eig2_biorthogonal(V, tol=DEFAULT_TOL):
    """Closed-form eigendecomposition of a diagonalizable 2x2 matrix.

    Eigenvalues come from the trace/determinant quadratic; the right
    eigenvector for one eigenvalue is read off a column of ``V - l_other I``
    (Cayley-Hamilton), and the left eigenvectors are the conjugated rows of
    the inverse of ``[u1 u2]``.

    Raises
    ------
    NullMap
        ``V`` is numerically zero.
    DefectiveMap
        Repeated eigenvalue with a one-dimensional eigenspace.
    NonExtractive
        ``|l1|`` and ``|l2|`` agree within ``tol`` (relative).
    """
    V = cmatrix(V, dim=2)
    scale = float(np.max(np.abs(V)))
    if scale < np.finfo(float).tiny:
        raise NullMap("conditional map is numerically zero")
    w = V / scale

    half_tr = 0.5 * (w[0, 0] + w[1, 1])
    det = w[0, 0] * w[1, 1] - w[0, 1] * w[1, 0]
    disc = np.sqrt(0.25 * (w[0, 0] - w[1, 1]) ** 2 + w[0, 1] * w[1, 0])
    lp, lm = half_tr + disc, half_tr - disc
    big = lp if abs(lp) >= abs(lm) else lm
    if abs(big) == 0.0:
        raise DefectiveMap("nonzero nilpotent map has no eigenbasis")
    small = det / big

    eye = np.eye(2)
    if abs(big - small) <= tol:
        if np.max(np.abs(w - big * eye)) <= tol:
            raise NonExtractive("map is proportional to the identity")
        raise DefectiveMap("repeated eigenvalue with a single eigenvector")
    if abs(small) >= abs(big) * (1.0 - tol):
        raise NonExtractive(
            f"eigenvalue moduli {abs(big) * scale:.6g} and {abs(small) * scale:.6g} coincide"
        )

    u1 = _fix_phase_largest(_dominant_column(w - small * eye))
    u2 = _fix_phase_largest(_dominant_column(w - big * eye))

    det_u = u1[0] * u2[1] - u2[0] * u1[1]
    # rows of [u1 u2]^-1 are <v1| and <v2|
    v1 = np.conj(np.array([u2[1], -u2[0]]) / det_u)
    v2 = np.conj(np.array([-u1[1], u1[0]]) / det_u)

    u1_perp = _fix_phase_first_nonzero(np.array([-np.conj(u1[1]), np.conj(u1[0])]))

    return SpectralData(
        lambda1=complex(big * scale),
        lambda2=complex(small * scale),
        u1=cvector(u1),
        u2=cvector(u2),
        v1=cvector(v1),
        v2=cvector(v2),
        g=float(abs(small) / abs(big)),
        u1_perp=cvector(u1_perp),
    )
