"""Qubit purification by repeated measurement of an interacting partner.

The purity of the extracted state need not rise monotonically; this package
computes purity trajectories, their closed form, and the conditions and
step thresholds that separate oscillating from monotonic behaviour.
"""

__version__ = "0.1.0"

from qpurify.core import (  # noqa: E402
    DensityMatrix,
    InitialDecomposition,
    OscillationReport,
    PurityTrajectory,
    analyze,
    decompose,
    evolve_step,
    k_threshold_simplified,
    k_threshold_sufficient,
    local_max_at_first_possible,
    local_min_at_first,
    monotonic_from,
    oscillation_report,
    purity_closed_form,
    trajectory,
)
from qpurify.matrix import SpectralData, eig2_biorthogonal  # noqa: E402
from qpurify.model import (  # noqa: E402
    ModelParams,
    down_state_threshold,
    eigensystem,
    eta_threshold,
    hamiltonian,
    v_operator,
    v_oracle,
)
