"""Checkerboard random matrix laboratory.

Random Hermitian matrices whose entries are i.i.d. except for a constant w at
every position with i = j (mod k) split into two spectral regimes: a bulk of
N-k eigenvalues converging (scaled by 1/sqrt(N)) to a semicircle of radius
2*sqrt(1 - 1/k), and k outliers near N*w/k whose centered fluctuations match
the spectrum of the k x k hollow (zero-diagonal) Gaussian ensembles.  This
package samples the ensembles over the reals, complexes, and quaternions,
builds the weighted spectral measures isolating each regime, and verifies the
limits against exact combinatorial oracles.
"""

__version__ = "0.1.0"

from .algebra import DivisionAlgebra, HermitianMatrix, complex_embed, conjugate_transpose
from .ensembles import (
    CheckerboardParams,
    HollowParams,
    congruence_indicator_matrix,
    sample_checkerboard,
    sample_hollow,
    sample_hollow_batch,
)
from .spectra import (
    AtomicMeasure,
    BlipConfig,
    Spectrum,
    averaged_blip_measure,
    blip_measure,
    blip_weight,
    bulk_measure,
    eigensolve,
    histogram,
)
from .moments import (
    MomentVector,
    OracleResult,
    alternating_binomial_sum,
    average_trial_moments,
    blip_limit_moment,
    hollow_moment_oracle,
    measure_moments,
    monte_carlo_hollow_moment,
    semicircle_moment,
    trace_expansion_blip_moment,
)
from .analysis import (
    ComparisonReport,
    RegimeSplit,
    WeylResult,
    bulk_divergence_probe,
    compare_blip_to_hollow,
    split_regimes,
    variance_decay_probe,
    weyl_check,
)

__all__ = [
    "__version__",
    "DivisionAlgebra",
    "HermitianMatrix",
    "complex_embed",
    "conjugate_transpose",
    "CheckerboardParams",
    "HollowParams",
    "congruence_indicator_matrix",
    "sample_checkerboard",
    "sample_hollow",
    "sample_hollow_batch",
    "AtomicMeasure",
    "BlipConfig",
    "Spectrum",
    "averaged_blip_measure",
    "blip_measure",
    "blip_weight",
    "bulk_measure",
    "eigensolve",
    "histogram",
    "MomentVector",
    "OracleResult",
    "alternating_binomial_sum",
    "average_trial_moments",
    "blip_limit_moment",
    "hollow_moment_oracle",
    "measure_moments",
    "monte_carlo_hollow_moment",
    "semicircle_moment",
    "trace_expansion_blip_moment",
    "ComparisonReport",
    "RegimeSplit",
    "WeylResult",
    "bulk_divergence_probe",
    "compare_blip_to_hollow",
    "split_regimes",
    "variance_decay_probe",
    "weyl_check",
]
