"""Random inputs shared by the test modules."""

import numpy as np

from qpurify.core import DensityMatrix
from qpurify.errors import NonExtractive
from qpurify.matrix import eig2_biorthogonal


def random_density(rng, rank=2):
    a = rng.normal(size=(2, rank)) + 1j * rng.normal(size=(2, rank))
    m = a @ a.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_pure(rng):
    return random_density(rng, rank=1)


def random_map(rng, min_gap=1e-3):
    """Ginibre 2x2 map, resampled until |l2/l1| <= 1 - min_gap."""
    while True:
        v = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        try:
            spec = eig2_biorthogonal(v)
        except NonExtractive:
            continue
        if spec.g <= 1.0 - min_gap:
            return v, spec
