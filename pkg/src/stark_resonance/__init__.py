"""Stark resonances of a one-dimensional double well of point interactions.

Submodules:

* :mod:`.airy` - complex Airy functions and the outgoing combinations Ci+-
* :mod:`.kernel` - free and full resolvent kernels, Krein determinant
* :mod:`.resonances` - resonance search, residues, branch tracking
* :mod:`.crossing` - Agmon lengths, type I/II classification, critical field
* :mod:`.survival` - survival amplitude of a Gaussian wavepacket
* :mod:`.cli` - command-line front end
"""

__version__ = "0.1.0"

from .crossing import (
    CrossingReport,
    CrossingType,
    agmon_lengths,
    classify_numeric,
    classify_semiclassical,
    continued_pair,
    critical_field,
    semiclassical_fc,
)
from .errors import StarkError
from .kernel import ModelParams, d_function, full_kernel, k0, kmatrix, m_matrix
from .resonances import (
    BranchTrack,
    Resonance,
    count_zeros,
    find_pair,
    find_resonance,
    track_branches,
)
from .survival import (
    GaussianState,
    SurvivalSeries,
    amplitude,
    coefficients,
    free_term,
    oscillation_metric,
)

__all__ = [
    "__version__",
    "ModelParams",
    "GaussianState",
    "Resonance",
    "BranchTrack",
    "SurvivalSeries",
    "CrossingReport",
    "CrossingType",
    "StarkError",
    "k0",
    "kmatrix",
    "d_function",
    "m_matrix",
    "full_kernel",
    "find_resonance",
    "find_pair",
    "count_zeros",
    "track_branches",
    "agmon_lengths",
    "semiclassical_fc",
    "classify_semiclassical",
    "classify_numeric",
    "critical_field",
    "continued_pair",
    "coefficients",
    "free_term",
    "amplitude",
    "oscillation_metric",
]
